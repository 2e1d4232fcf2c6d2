//! The closed node-type vocabulary and label classification helpers.
//!
//! Every tree produced by the Java frontend uses exactly these labels, so the
//! matchers, printers, and the benchmark format can rely on string equality.
//! Fine-grained relabeling (see [`crate::gumtree::fg_relabel`]) derives
//! compound labels like `SimpleType-SimpleName`; those are deliberately not
//! part of this list and only ever live inside baseline matcher runs.

pub const COMPILATION_UNIT: &str = "CompilationUnit";
pub const PACKAGE_DECLARATION: &str = "PackageDeclaration";
pub const IMPORT_DECLARATION: &str = "ImportDeclaration";
pub const TYPE_DECLARATION: &str = "TypeDeclaration";
pub const ENUM_DECLARATION: &str = "EnumDeclaration";
pub const ENUM_CONSTANT_DECLARATION: &str = "EnumConstantDeclaration";
pub const INITIALIZER: &str = "Initializer";
pub const METHOD_DECLARATION: &str = "MethodDeclaration";
pub const FIELD_DECLARATION: &str = "FieldDeclaration";
pub const SINGLE_VARIABLE_DECLARATION: &str = "SingleVariableDeclaration";
pub const VARIABLE_DECLARATION_FRAGMENT: &str = "VariableDeclarationFragment";
pub const MODIFIER: &str = "Modifier";
pub const BLOCK: &str = "Block";
pub const IF_STATEMENT: &str = "IfStatement";
pub const FOR_STATEMENT: &str = "ForStatement";
pub const ENHANCED_FOR_STATEMENT: &str = "EnhancedForStatement";
pub const WHILE_STATEMENT: &str = "WhileStatement";
pub const DO_STATEMENT: &str = "DoStatement";
pub const SWITCH_STATEMENT: &str = "SwitchStatement";
pub const SWITCH_CASE: &str = "SwitchCase";
pub const TRY_STATEMENT: &str = "TryStatement";
pub const CATCH_CLAUSE: &str = "CatchClause";
pub const SYNCHRONIZED_STATEMENT: &str = "SynchronizedStatement";
pub const RETURN_STATEMENT: &str = "ReturnStatement";
pub const THROW_STATEMENT: &str = "ThrowStatement";
pub const BREAK_STATEMENT: &str = "BreakStatement";
pub const CONTINUE_STATEMENT: &str = "ContinueStatement";
pub const LABELED_STATEMENT: &str = "LabeledStatement";
pub const EXPRESSION_STATEMENT: &str = "ExpressionStatement";
pub const VARIABLE_DECLARATION_STATEMENT: &str = "VariableDeclarationStatement";
pub const METHOD_INVOCATION: &str = "MethodInvocation";
pub const SUPER_METHOD_INVOCATION: &str = "SuperMethodInvocation";
pub const CLASS_INSTANCE_CREATION: &str = "ClassInstanceCreation";
pub const FIELD_ACCESS: &str = "FieldAccess";
pub const QUALIFIED_NAME: &str = "QualifiedName";
pub const SIMPLE_NAME: &str = "SimpleName";
pub const SIMPLE_TYPE: &str = "SimpleType";
pub const QUALIFIED_TYPE: &str = "QualifiedType";
pub const PARAMETERIZED_TYPE: &str = "ParameterizedType";
pub const ARRAY_TYPE: &str = "ArrayType";
pub const UNION_TYPE: &str = "UnionType";
pub const PRIMITIVE_TYPE: &str = "PrimitiveType";
pub const INFIX_EXPRESSION: &str = "InfixExpression";
pub const INFIX_OPERATOR: &str = "InfixOperator";
pub const PREFIX_EXPRESSION: &str = "PrefixExpression";
pub const POSTFIX_EXPRESSION: &str = "PostfixExpression";
pub const ASSIGNMENT: &str = "Assignment";
pub const CONDITIONAL_EXPRESSION: &str = "ConditionalExpression";
pub const CAST_EXPRESSION: &str = "CastExpression";
pub const INSTANCEOF_EXPRESSION: &str = "InstanceofExpression";
pub const LAMBDA_EXPRESSION: &str = "LambdaExpression";
pub const TYPE_LITERAL: &str = "TypeLiteral";
pub const NUMBER_LITERAL: &str = "NumberLiteral";
pub const STRING_LITERAL: &str = "StringLiteral";
pub const BOOLEAN_LITERAL: &str = "BooleanLiteral";
pub const NULL_LITERAL: &str = "NullLiteral";
pub const CHARACTER_LITERAL: &str = "CharacterLiteral";
pub const ARRAY_ACCESS: &str = "ArrayAccess";
pub const ARRAY_CREATION: &str = "ArrayCreation";
pub const ARRAY_INITIALIZER: &str = "ArrayInitializer";
pub const THIS_EXPRESSION: &str = "ThisExpression";
pub const PARENTHESIZED_EXPRESSION: &str = "ParenthesizedExpression";
pub const JAVADOC: &str = "Javadoc";

/// All labels the frontend can emit, in a fixed order.
pub const ALL_LABELS: &[&str] = &[
    COMPILATION_UNIT,
    PACKAGE_DECLARATION,
    IMPORT_DECLARATION,
    TYPE_DECLARATION,
    ENUM_DECLARATION,
    ENUM_CONSTANT_DECLARATION,
    INITIALIZER,
    METHOD_DECLARATION,
    FIELD_DECLARATION,
    SINGLE_VARIABLE_DECLARATION,
    VARIABLE_DECLARATION_FRAGMENT,
    MODIFIER,
    BLOCK,
    IF_STATEMENT,
    FOR_STATEMENT,
    ENHANCED_FOR_STATEMENT,
    WHILE_STATEMENT,
    DO_STATEMENT,
    SWITCH_STATEMENT,
    SWITCH_CASE,
    TRY_STATEMENT,
    CATCH_CLAUSE,
    SYNCHRONIZED_STATEMENT,
    RETURN_STATEMENT,
    THROW_STATEMENT,
    BREAK_STATEMENT,
    CONTINUE_STATEMENT,
    LABELED_STATEMENT,
    EXPRESSION_STATEMENT,
    VARIABLE_DECLARATION_STATEMENT,
    METHOD_INVOCATION,
    SUPER_METHOD_INVOCATION,
    CLASS_INSTANCE_CREATION,
    FIELD_ACCESS,
    QUALIFIED_NAME,
    SIMPLE_NAME,
    SIMPLE_TYPE,
    QUALIFIED_TYPE,
    PARAMETERIZED_TYPE,
    ARRAY_TYPE,
    UNION_TYPE,
    PRIMITIVE_TYPE,
    INFIX_EXPRESSION,
    INFIX_OPERATOR,
    PREFIX_EXPRESSION,
    POSTFIX_EXPRESSION,
    ASSIGNMENT,
    CONDITIONAL_EXPRESSION,
    CAST_EXPRESSION,
    INSTANCEOF_EXPRESSION,
    LAMBDA_EXPRESSION,
    TYPE_LITERAL,
    NUMBER_LITERAL,
    STRING_LITERAL,
    BOOLEAN_LITERAL,
    NULL_LITERAL,
    CHARACTER_LITERAL,
    ARRAY_ACCESS,
    ARRAY_CREATION,
    ARRAY_INITIALIZER,
    THIS_EXPRESSION,
    PARENTHESIZED_EXPRESSION,
    JAVADOC,
];

pub fn is_known_label(label: &str) -> bool {
    ALL_LABELS.contains(&label)
}

/// Program-element declarations: the units listed in benchmark
/// `matchedElements` sections plus imports and package declarations.
pub fn is_declaration(label: &str) -> bool {
    matches!(
        label,
        TYPE_DECLARATION
            | ENUM_DECLARATION
            | ENUM_CONSTANT_DECLARATION
            | INITIALIZER
            | METHOD_DECLARATION
            | FIELD_DECLARATION
            | IMPORT_DECLARATION
            | PACKAGE_DECLARATION
    )
}

/// Statement-level labels, composites and leaves alike.
pub fn is_statement(label: &str) -> bool {
    matches!(
        label,
        BLOCK
            | IF_STATEMENT
            | FOR_STATEMENT
            | ENHANCED_FOR_STATEMENT
            | WHILE_STATEMENT
            | DO_STATEMENT
            | SWITCH_STATEMENT
            | SWITCH_CASE
            | TRY_STATEMENT
            | CATCH_CLAUSE
            | SYNCHRONIZED_STATEMENT
            | RETURN_STATEMENT
            | THROW_STATEMENT
            | BREAK_STATEMENT
            | CONTINUE_STATEMENT
            | LABELED_STATEMENT
            | EXPRESSION_STATEMENT
            | VARIABLE_DECLARATION_STATEMENT
    )
}

/// Statements that contain nested statements. Blocks are composite but are
/// treated as transparent wrappers by the depth/parent definitions.
pub fn is_composite_statement(label: &str) -> bool {
    matches!(
        label,
        BLOCK
            | IF_STATEMENT
            | FOR_STATEMENT
            | ENHANCED_FOR_STATEMENT
            | WHILE_STATEMENT
            | DO_STATEMENT
            | SWITCH_STATEMENT
            | TRY_STATEMENT
            | CATCH_CLAUSE
            | SYNCHRONIZED_STATEMENT
            | LABELED_STATEMENT
    )
}

pub fn is_leaf_statement(label: &str) -> bool {
    is_statement(label) && !is_composite_statement(label) && label != SWITCH_CASE
}

/// Type references.
pub fn is_type_label(label: &str) -> bool {
    matches!(
        label,
        SIMPLE_TYPE | QUALIFIED_TYPE | PARAMETERIZED_TYPE | ARRAY_TYPE | UNION_TYPE | PRIMITIVE_TYPE
    )
}

/// Labels whose nodes carry their token text in `value`.
pub fn is_valued_leaf(label: &str) -> bool {
    matches!(
        label,
        SIMPLE_NAME
            | MODIFIER
            | INFIX_OPERATOR
            | PRIMITIVE_TYPE
            | NUMBER_LITERAL
            | STRING_LITERAL
            | BOOLEAN_LITERAL
            | NULL_LITERAL
            | CHARACTER_LITERAL
            | THIS_EXPRESSION
    )
}

/// Invocation-shaped parents whose name child binds a callee.
pub fn is_invocation(label: &str) -> bool {
    matches!(label, METHOD_INVOCATION | SUPER_METHOD_INVOCATION)
}
