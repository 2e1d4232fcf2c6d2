//! Semantic roles: what a node *does* at its position in the tree.
//!
//! Several labels serve multiple, mutually incompatible purposes — a `Block`
//! can be a method body or a loop body; a `SimpleName` can name a method or
//! reference a variable; a `Modifier` can control access or concurrency.
//! `semantic_role` reads the parent chain to name the purpose. The audit
//! report uses these groupings to explain cross-context mappings.

use crate::taxonomy as tax;
use crate::tree::{flags, AstTree, NodeId};

/// Compatibility group of a modifier keyword. Only members of the same
/// group are sensible mapping partners.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModifierGroup {
    /// `public`, `private`, `protected`.
    Access,
    /// `final`, `sealed`, `non-sealed`.
    Seal,
    /// Every other modifier stands alone (`static`, `abstract`, …); marker
    /// annotations group by their own text.
    Single(String),
}

pub fn modifier_group(text: &str) -> ModifierGroup {
    match text {
        "public" | "private" | "protected" => ModifierGroup::Access,
        "final" | "sealed" | "non-sealed" => ModifierGroup::Seal,
        other => ModifierGroup::Single(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticRole {
    // --- Block contexts ---
    MethodBody,
    InitializerBody,
    CatchBody,
    TryBody,
    SynchronizedBody,
    FinallyBody,
    /// Body of a control statement (`if`, `while`, `for`, `do`, …).
    ControlBody,
    /// Free-standing block nested in another block, or a lambda body.
    NestedBlock,
    // --- SingleVariableDeclaration contexts ---
    CatchException,
    EnhancedForParameter,
    MethodParameter,
    LambdaParameter,
    // --- MethodDeclaration ---
    Constructor,
    Method,
    // --- Modifier ---
    Modifier(ModifierGroup),
    // --- Type contexts ---
    ReturnType,
    ThrownException,
    SuperclassType,
    InterfaceType,
    CastType,
    CreationType,
    FieldType,
    VariableType,
    InstanceofType,
    TypeLiteralType,
    ArrayComponentType,
    /// First child of a `ParameterizedType` (the generic type itself).
    GenericBaseType,
    /// Later children of a `ParameterizedType` (its arguments).
    TypeArgument,
    UnionMember,
    /// A type in any remaining position.
    TypeReference,
    // --- SimpleName contexts ---
    /// Name slot of a method or super-method invocation.
    MethodName,
    /// Name of a method, type, enum, or enum-constant declaration.
    DeclarationName,
    /// Name of a declared variable, parameter, or field fragment.
    VariableName,
    /// The name wrapped by a `SimpleType`/`QualifiedType`.
    TypeName,
    /// Segment of a dotted name (`a.b.c`).
    QualifiedNamePart,
    /// Field selected on a non-name receiver.
    FieldAccessName,
    /// Label of a labeled/`break`/`continue` statement.
    StatementLabel,
    /// Bare (untyped) lambda parameter.
    LambdaParameterName,
    /// Free use as an expression: a variable or field reference.
    VariableReference,
    // --- everything else ---
    /// The label alone determines the role; no context distinction exists.
    LabelDetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleError {
    /// The node has no parent chain (tree root), so positional roles are
    /// undefined for it.
    Detached,
}

impl std::fmt::Display for RoleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "node is detached from any parent chain")
    }
}

impl std::error::Error for RoleError {}

/// Role of `id` inside `tree`. Labels outside the six context-sensitive
/// families report [`SemanticRole::LabelDetermined`] without consulting the
/// parent.
pub fn semantic_role(tree: &AstTree, id: NodeId) -> Result<SemanticRole, RoleError> {
    let label = tree.label(id);
    match label {
        tax::BLOCK => {
            let parent = tree.parent(id).ok_or(RoleError::Detached)?;
            if tree.flags(id) & flags::FINALLY != 0 {
                return Ok(SemanticRole::FinallyBody);
            }
            Ok(match tree.label(parent) {
                tax::METHOD_DECLARATION => SemanticRole::MethodBody,
                tax::INITIALIZER => SemanticRole::InitializerBody,
                tax::CATCH_CLAUSE => SemanticRole::CatchBody,
                tax::TRY_STATEMENT => SemanticRole::TryBody,
                tax::SYNCHRONIZED_STATEMENT => SemanticRole::SynchronizedBody,
                tax::IF_STATEMENT
                | tax::WHILE_STATEMENT
                | tax::DO_STATEMENT
                | tax::FOR_STATEMENT
                | tax::ENHANCED_FOR_STATEMENT
                | tax::LABELED_STATEMENT
                | tax::SWITCH_STATEMENT => SemanticRole::ControlBody,
                _ => SemanticRole::NestedBlock,
            })
        }
        tax::SINGLE_VARIABLE_DECLARATION => {
            let parent = tree.parent(id).ok_or(RoleError::Detached)?;
            Ok(match tree.label(parent) {
                tax::CATCH_CLAUSE => SemanticRole::CatchException,
                tax::ENHANCED_FOR_STATEMENT => SemanticRole::EnhancedForParameter,
                tax::METHOD_DECLARATION => SemanticRole::MethodParameter,
                tax::LAMBDA_EXPRESSION => SemanticRole::LambdaParameter,
                _ => SemanticRole::MethodParameter,
            })
        }
        tax::METHOD_DECLARATION => {
            if tree.flags(id) & flags::CONSTRUCTOR != 0 {
                Ok(SemanticRole::Constructor)
            } else {
                Ok(SemanticRole::Method)
            }
        }
        tax::MODIFIER => Ok(SemanticRole::Modifier(modifier_group(tree.value(id)))),
        l if tax::is_type_label(l) => {
            let parent = tree.parent(id).ok_or(RoleError::Detached)?;
            if tree.flags(id) & flags::SUPERCLASS != 0 {
                return Ok(SemanticRole::SuperclassType);
            }
            let plabel = tree.label(parent);
            Ok(match plabel {
                tax::METHOD_DECLARATION => {
                    // Return type precedes the name; throws types follow it.
                    let name_pos = tree
                        .children(parent)
                        .iter()
                        .position(|&c| tree.label(c) == tax::SIMPLE_NAME);
                    let my_pos = tree.children(parent).iter().position(|&c| c == id);
                    match (my_pos, name_pos) {
                        (Some(m), Some(n)) if m < n => SemanticRole::ReturnType,
                        _ => SemanticRole::ThrownException,
                    }
                }
                tax::TYPE_DECLARATION | tax::ENUM_DECLARATION => SemanticRole::InterfaceType,
                tax::CAST_EXPRESSION => SemanticRole::CastType,
                tax::CLASS_INSTANCE_CREATION | tax::ARRAY_CREATION => SemanticRole::CreationType,
                tax::FIELD_DECLARATION => SemanticRole::FieldType,
                tax::VARIABLE_DECLARATION_STATEMENT | tax::SINGLE_VARIABLE_DECLARATION | tax::FOR_STATEMENT => {
                    SemanticRole::VariableType
                }
                tax::INSTANCEOF_EXPRESSION => SemanticRole::InstanceofType,
                tax::TYPE_LITERAL => SemanticRole::TypeLiteralType,
                tax::ARRAY_TYPE => SemanticRole::ArrayComponentType,
                tax::PARAMETERIZED_TYPE => {
                    if tree.children(parent).first() == Some(&id) {
                        SemanticRole::GenericBaseType
                    } else {
                        SemanticRole::TypeArgument
                    }
                }
                tax::UNION_TYPE => SemanticRole::UnionMember,
                _ => SemanticRole::TypeReference,
            })
        }
        tax::SIMPLE_NAME => {
            let parent = tree.parent(id).ok_or(RoleError::Detached)?;
            if tree.flags(id) & flags::NAME_SLOT != 0 {
                return Ok(SemanticRole::MethodName);
            }
            let plabel = tree.label(parent);
            Ok(match plabel {
                tax::METHOD_DECLARATION
                | tax::TYPE_DECLARATION
                | tax::ENUM_DECLARATION
                | tax::ENUM_CONSTANT_DECLARATION => SemanticRole::DeclarationName,
                tax::VARIABLE_DECLARATION_FRAGMENT | tax::SINGLE_VARIABLE_DECLARATION => {
                    SemanticRole::VariableName
                }
                tax::SIMPLE_TYPE | tax::QUALIFIED_TYPE => SemanticRole::TypeName,
                tax::QUALIFIED_NAME => SemanticRole::QualifiedNamePart,
                tax::FIELD_ACCESS => SemanticRole::FieldAccessName,
                tax::LABELED_STATEMENT | tax::BREAK_STATEMENT | tax::CONTINUE_STATEMENT => {
                    SemanticRole::StatementLabel
                }
                tax::LAMBDA_EXPRESSION => {
                    // A SimpleName child of a lambda is a parameter unless it
                    // is the body (last child).
                    if tree.children(parent).last() == Some(&id) {
                        SemanticRole::VariableReference
                    } else {
                        SemanticRole::LambdaParameterName
                    }
                }
                _ => SemanticRole::VariableReference,
            })
        }
        _ => Ok(SemanticRole::LabelDetermined),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_java;

    fn tree_of(src: &str) -> AstTree {
        parse_java(src).expect("fixture parses").tree
    }

    fn find<'t>(tree: &'t AstTree, label: &str) -> Vec<NodeId> {
        tree.preorder().filter(|&n| tree.label(n) == label).collect()
    }

    #[test]
    fn block_roles_follow_context() {
        let t = tree_of(
            "class A { void m() { while (true) { x(); } try { y(); } catch (E e) { z(); } finally { w(); } } }",
        );
        let blocks = find(&t, tax::BLOCK);
        let roles: Vec<SemanticRole> = blocks
            .iter()
            .map(|&b| semantic_role(&t, b).unwrap())
            .collect();
        assert!(roles.contains(&SemanticRole::MethodBody));
        assert!(roles.contains(&SemanticRole::ControlBody));
        assert!(roles.contains(&SemanticRole::TryBody));
        assert!(roles.contains(&SemanticRole::CatchBody));
        assert!(roles.contains(&SemanticRole::FinallyBody));
    }

    #[test]
    fn modifier_groups() {
        assert_eq!(modifier_group("public"), ModifierGroup::Access);
        assert_eq!(modifier_group("protected"), ModifierGroup::Access);
        assert_eq!(modifier_group("final"), ModifierGroup::Seal);
        assert_eq!(modifier_group("non-sealed"), ModifierGroup::Seal);
        assert_eq!(modifier_group("static"), ModifierGroup::Single("static".into()));
        assert_ne!(modifier_group("static"), modifier_group("abstract"));
    }

    #[test]
    fn constructor_vs_method() {
        let t = tree_of("class A { A() {} void m() {} }");
        let decls = find(&t, tax::METHOD_DECLARATION);
        assert_eq!(decls.len(), 2);
        assert_eq!(semantic_role(&t, decls[0]).unwrap(), SemanticRole::Constructor);
        assert_eq!(semantic_role(&t, decls[1]).unwrap(), SemanticRole::Method);
    }

    #[test]
    fn invocation_name_slot_vs_argument() {
        let t = tree_of("class A { void m() { foo(bar); } }");
        let names = find(&t, tax::SIMPLE_NAME);
        let foo = names.iter().find(|&&n| t.value(n) == "foo").copied().unwrap();
        let bar = names.iter().find(|&&n| t.value(n) == "bar").copied().unwrap();
        assert_eq!(semantic_role(&t, foo).unwrap(), SemanticRole::MethodName);
        assert_eq!(semantic_role(&t, bar).unwrap(), SemanticRole::VariableReference);
    }

    #[test]
    fn type_contexts() {
        let t = tree_of("class A extends B implements C { int f; D m(E p) throws F { return (G) null; } }");
        let mut seen = Vec::new();
        for n in t.preorder() {
            if tax::is_type_label(t.label(n)) {
                seen.push(semantic_role(&t, n).unwrap());
            }
        }
        for expected in [
            SemanticRole::SuperclassType,
            SemanticRole::InterfaceType,
            SemanticRole::FieldType,
            SemanticRole::ReturnType,
            SemanticRole::VariableType,
            SemanticRole::ThrownException,
            SemanticRole::CastType,
        ] {
            assert!(seen.contains(&expected), "missing {expected:?} in {seen:?}");
        }
    }

    #[test]
    fn detached_node_errors() {
        // A context-sensitive node with no parent chain must refuse rather
        // than guess a role.
        use crate::tree::{Span, TreeBuilder};
        let mut b = TreeBuilder::new();
        let root = b.node(tax::BLOCK, "", Span::new(0, 2), vec![]);
        let t = b.finish(root).unwrap();
        assert_eq!(semantic_role(&t, t.root()), Err(RoleError::Detached));
        // Labels whose role never depends on context answer even at the root.
        let t2 = tree_of("class A {}");
        assert_eq!(semantic_role(&t2, t2.root()), Ok(SemanticRole::LabelDetermined));
    }

    #[test]
    fn svd_contexts() {
        let t = tree_of(
            "class A { void m(int p) { for (int x : xs) {} try {} catch (E e) {} } }",
        );
        let svds = find(&t, tax::SINGLE_VARIABLE_DECLARATION);
        let roles: Vec<SemanticRole> = svds.iter().map(|&n| semantic_role(&t, n).unwrap()).collect();
        assert!(roles.contains(&SemanticRole::MethodParameter));
        assert!(roles.contains(&SemanticRole::EnhancedForParameter));
        assert!(roles.contains(&SemanticRole::CatchException));
    }
}
