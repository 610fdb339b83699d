use std::collections::BTreeMap;
use std::fmt;

use super::ast::{Decl, Expr, Pos, Program};
use super::printer::print_expr;
use super::Diagnostic;
use crate::theory::{Backend, System};

/// Input and output wires of a diagram, as lists of system names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireType {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

fn wires(names: &[String]) -> String {
    if names.is_empty() {
        "I".into()
    } else {
        names.join(" * ")
    }
}

impl fmt::Display for WireType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", wires(&self.input), wires(&self.output))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypedNode {
    Seq(Box<TypedExpr>, Box<TypedExpr>),
    Par(Box<TypedExpr>, Box<TypedExpr>),
    Atom(String),
    Id(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedExpr {
    pub node: TypedNode,
    pub ty: WireType,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedProgram {
    pub program: Program,
    pub backend: Backend,
    pub systems: BTreeMap<String, usize>,
    pub root: TypedExpr,
}

impl TypedProgram {
    /// The composite system carried by a list of wires.
    pub fn system_of(&self, names: &[String]) -> System {
        let dims: Vec<usize> = names.iter().map(|n| self.systems[n]).collect();
        System::composite(self.backend, &dims).expect("declared dimensions are positive")
    }
}

pub fn typecheck(program: &Program) -> Result<TypedProgram, Diagnostic> {
    let mut backend: Option<(Backend, Pos)> = None;
    let mut systems = BTreeMap::new();
    let mut atoms = BTreeMap::new();
    for d in &program.decls {
        match d {
            Decl::System { name, backend: b, dim, pos } => {
                match backend {
                    Some((first, at)) if first != *b => {
                        return Err(Diagnostic::new(
                            *pos,
                            format!("system '{name}' uses backend {b} but the program already uses {first} (declared at {at})"),
                        ));
                    }
                    _ => backend = Some((*b, *pos)),
                }
                systems.insert(name.clone(), *dim);
            }
            Decl::Atom { name, input, output, .. } => {
                atoms.insert(
                    name.clone(),
                    WireType {
                        input: input.clone(),
                        output: output.clone(),
                    },
                );
            }
        }
    }
    let backend = match backend {
        Some((b, _)) => b,
        None => return Err(Diagnostic::new(program.run.pos(), "program declares no systems")),
    };
    let root = check_expr(&program.run, &atoms)?;
    Ok(TypedProgram {
        program: program.clone(),
        backend,
        systems,
        root,
    })
}

fn check_expr(e: &Expr, atoms: &BTreeMap<String, WireType>) -> Result<TypedExpr, Diagnostic> {
    match e {
        Expr::Atom(name, pos) => {
            let ty = atoms
                .get(name)
                .cloned()
                .ok_or_else(|| Diagnostic::new(*pos, format!("unknown identifier '{name}'")))?;
            Ok(TypedExpr {
                node: TypedNode::Atom(name.clone()),
                ty,
                pos: *pos,
            })
        }
        Expr::Id(s, pos) => Ok(TypedExpr {
            node: TypedNode::Id(s.clone()),
            ty: WireType {
                input: s.clone(),
                output: s.clone(),
            },
            pos: *pos,
        }),
        Expr::Seq(f, g, pos) => {
            let tf = check_expr(f, atoms)?;
            let tg = check_expr(g, atoms)?;
            if tg.ty.output != tf.ty.input {
                return Err(Diagnostic::new(
                    *pos,
                    format!(
                        "wire mismatch in '{}': '{}' outputs {} but '{}' expects {}",
                        print_expr(e),
                        print_expr(g),
                        wires(&tg.ty.output),
                        print_expr(f),
                        wires(&tf.ty.input)
                    ),
                ));
            }
            let ty = WireType {
                input: tg.ty.input.clone(),
                output: tf.ty.output.clone(),
            };
            Ok(TypedExpr {
                node: TypedNode::Seq(Box::new(tf), Box::new(tg)),
                ty,
                pos: *pos,
            })
        }
        Expr::Par(f, g, pos) => {
            let tf = check_expr(f, atoms)?;
            let tg = check_expr(g, atoms)?;
            let cat = |a: &[String], b: &[String]| a.iter().chain(b).cloned().collect::<Vec<_>>();
            let ty = WireType {
                input: cat(&tf.ty.input, &tg.ty.input),
                output: cat(&tf.ty.output, &tg.ty.output),
            };
            Ok(TypedExpr {
                node: TypedNode::Par(Box::new(tf), Box::new(tg)),
                ty,
                pos: *pos,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    const DECLS: &str = "system A qubit 2; system B qubit 2; system C qubit 3; system D qubit 3; \
        proc f on A -> B = kraus[[[1,0],[0,1]]]; proc g on B -> C = kraus[[[1,0],[0,1],[0,0]]]; \
        proc h on C -> D = kraus[[[1,0,0],[0,1,0],[0,0,1]]];";

    fn ty(run: &str) -> Result<WireType, Diagnostic> {
        typecheck(&parse(&format!("{DECLS} run {run}")).unwrap()).map(|t| t.root.ty)
    }

    #[test]
    fn composition_types() {
        assert_eq!(ty("g . f").unwrap().to_string(), "A -> C");
        assert_eq!(ty("f || h").unwrap().to_string(), "A * C -> B * D");
        assert_eq!(ty("(g || id[A]) . (f || id[A])").unwrap().to_string(), "A * A -> C * A");
    }

    #[test]
    fn mismatch_names_both_lists() {
        let e = ty("h . f").unwrap_err();
        assert!(e.message.contains("'f' outputs B"), "{}", e.message);
        assert!(e.message.contains("'h' expects C"), "{}", e.message);
    }

    #[test]
    fn closed_diagram_type() {
        let t = typecheck(&parse("system A qubit 2; state s on A = maxmix; effect u on A = unit; run u . s").unwrap()).unwrap();
        assert_eq!(t.root.ty.to_string(), "I -> I");
    }

    #[test]
    fn mixed_backends_rejected() {
        let e = typecheck(&parse("system A qubit 2; system B real 2; run id[A]").unwrap()).unwrap_err();
        assert!(e.message.contains("backend"));
    }
}
