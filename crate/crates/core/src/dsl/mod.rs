//! A small textual language for closed and open diagrams.
//!
//! ```text
//! program := decl* "run" expr [";"]
//! decl    := "system" ID backend INT ";"
//!          | "state"  ID "on" syslist "=" literal ";"
//!          | "effect" ID "on" syslist "=" literal ";"
//!          | "proc"   ID "on" syslist "->" syslist "=" literal ";"
//! syslist := ID ("*" ID)*
//! expr    := expr "." expr | expr "||" expr | "(" expr ")" | ID | "id" "[" syslist "]"
//! literal := "maxmix" | "bell" | "bell_effect" | "unit"
//!          | "matrix" matrix | "vector" "[" num,* "]" | "ket" row
//!          | "kraus" "[" matrix ("," matrix)* "]" | "stoch" matrix
//! matrix  := "[" row ("," row)* "]"      row := "[" entry ("," entry)* "]"
//! entry   := num | "[" num "," num "]"   num := ["-"] (FLOAT | "sqrt(" num ")") ["/" ...]
//! ```
//!
//! `f . g` applies `g` first; `||` binds tighter than `.`; both are
//! left-associative. `#` starts a comment.

mod ast;
mod eval;
mod lexer;
mod parser;
mod printer;
mod typecheck;

use std::fmt;

pub use ast::{Decl, DeclKind, Entry, Expr, Literal, MatrixLit, Pos, Program};
pub use eval::{bind, evaluate, Env, EvalResult};
pub use parser::{parse, RESERVED};
pub use printer::{print_decl, print_expr, print_literal, print_program};
pub use typecheck::{typecheck, TypedExpr, TypedNode, TypedProgram, WireType};

/// A positioned error from any stage of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            message: message.into(),
        }
    }

    /// `file:line:col: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}", self.pos.line, self.pos.col, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.pos.line, self.pos.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Parse, typecheck, bind and evaluate.
pub fn run_source(src: &str) -> Result<EvalResult, Diagnostic> {
    let typed = typecheck(&parse(src)?)?;
    let env = bind(&typed)?;
    evaluate(&typed, &env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::random_process;
    use crate::theory::{Backend, System};
    use proptest::prelude::*;

    fn sys_names() -> Vec<&'static str> {
        vec!["A", "B"]
    }

    fn arb_entry() -> impl Strategy<Value = Entry> {
        prop_oneof![
            (-4.0f64..4.0).prop_map(Entry::Real),
            ((-4.0f64..4.0), (-4.0f64..4.0)).prop_map(|(a, b)| Entry::Complex(a, b))
        ]
    }

    fn arb_matrix() -> impl Strategy<Value = MatrixLit> {
        (1usize..3, 1usize..3).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(arb_entry(), c), r))
    }

    fn arb_literal() -> impl Strategy<Value = Literal> {
        prop_oneof![
            Just(Literal::MaxMix),
            Just(Literal::Bell),
            Just(Literal::BellEffect),
            Just(Literal::Unit),
            arb_matrix().prop_map(Literal::Matrix),
            prop::collection::vec(-2.0f64..2.0, 1..4).prop_map(Literal::Vector),
            prop::collection::vec(arb_entry(), 1..4).prop_map(Literal::Ket),
            prop::collection::vec(arb_matrix(), 1..3).prop_map(Literal::Kraus),
            arb_matrix().prop_map(Literal::Stoch),
        ]
    }

    fn arb_syslist() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(sys_names()).prop_map(String::from), 1..3)
    }

    fn arb_expr(atoms: Vec<String>) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            prop::sample::select(atoms).prop_map(|a| Expr::atom(&a)),
            arb_syslist().prop_map(|s| Expr::Id(s, Pos::default())),
        ];
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(f, g)| Expr::seq(f, g)),
                (inner.clone(), inner).prop_map(|(f, g)| Expr::par(f, g)),
            ]
        })
    }

    fn arb_program() -> impl Strategy<Value = Program> {
        let atom_decl = (0usize..3, arb_syslist(), arb_syslist(), arb_literal());
        prop::collection::vec(atom_decl, 1..4).prop_flat_map(|atoms| {
            let mut decls = vec![
                Decl::System {
                    name: "A".into(),
                    backend: Backend::Quantum,
                    dim: 2,
                    pos: Pos::default(),
                },
                Decl::System {
                    name: "B".into(),
                    backend: Backend::Quantum,
                    dim: 3,
                    pos: Pos::default(),
                },
            ];
            let mut names = Vec::new();
            for (i, (k, a, b, lit)) in atoms.into_iter().enumerate() {
                let name = format!("x{i}");
                let kind = [DeclKind::State, DeclKind::Effect, DeclKind::Proc][k];
                let (input, output) = match kind {
                    DeclKind::State => (vec![], b),
                    DeclKind::Effect => (a, vec![]),
                    DeclKind::Proc => (a, b),
                };
                decls.push(Decl::Atom {
                    kind,
                    name: name.clone(),
                    input,
                    output,
                    lit,
                    pos: Pos::default(),
                });
                names.push(name);
            }
            arb_expr(names).prop_map(move |run| Program { decls: decls.clone(), run })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_parse_round_trip(p in arb_program()) {
            let text = print_program(&p);
            let q = parse(&text).map_err(|e| TestCaseError::fail(format!("{}\n{text}", e.render("printed"))))?;
            prop_assert_eq!(p, q);
        }

        #[test]
        fn parsing_is_total(s in "\\PC{0,80}") {
            let _ = parse(&s);
        }

        #[test]
        fn parsing_token_soup_is_total(toks in prop::collection::vec(prop::sample::select(vec![
            "system", "state", "effect", "proc", "run", "on", "id", "A", "qubit", "2", "0.5", "=", ";", ".", "||",
            "(", ")", "[", "]", ",", "*", "->", "-", "/", "sqrt", "kraus", "maxmix", "unit", "bell",
        ]), 0..30)) {
            let _ = run_source(&toks.join(" "));
        }
    }

    /// `(f . g) || (h . k)` and `(f || h) . (g || k)` with random processes
    /// bound directly in the environment (literals are never bound).
    fn interchange_program(seed: u64, backend: Backend) -> (TypedProgram, TypedProgram, Env) {
        let src = |run: &str| {
            format!(
                "system A {b} 2; system B {b} 3; system C {b} 2; system D {b} 2; system E {b} 3; system F {b} 2;\n\
                 proc g on A -> B = unit; proc f on B -> C = unit; proc k on D -> E = unit; proc h on E -> F = unit;\n\
                 run {run}",
                b = backend.name()
            )
        };
        let lhs = typecheck(&parse(&src("(f . g) || (h . k)")).unwrap()).unwrap();
        let rhs = typecheck(&parse(&src("(f || h) . (g || k)")).unwrap()).unwrap();
        let d2 = System::atomic(backend, 2).unwrap();
        let d3 = System::atomic(backend, 3).unwrap();
        let mut env = Env::new();
        env.insert("g".into(), random_process(&d2, &d3, seed).unwrap());
        env.insert("f".into(), random_process(&d3, &d2, seed + 1).unwrap());
        env.insert("k".into(), random_process(&d2, &d3, seed + 2).unwrap());
        env.insert("h".into(), random_process(&d3, &d2, seed + 3).unwrap());
        (lhs, rhs, env)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn interchange_law(seed in 0u64..10_000, b in prop::sample::select(vec![Backend::Classical, Backend::Quantum, Backend::Real])) {
            let (lhs, rhs, env) = interchange_program(seed, b);
            let l = evaluate(&lhs, &env).unwrap();
            let r = evaluate(&rhs, &env).unwrap();
            let (EvalResult::Process(l), EvalResult::Process(r)) = (l, r) else { panic!("expected processes") };
            prop_assert!(l.distance(&r).unwrap() < 1e-12);
        }
    }
}
