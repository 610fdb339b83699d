use std::fmt::Write;

use super::ast::{Decl, DeclKind, Entry, Expr, Literal, MatrixLit, Program};

/// Canonical source text; `parse(print(p)) == p` for every parsed `p`.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&print_decl(d));
        out.push('\n');
    }
    let _ = writeln!(out, "run {}", print_expr(&p.run));
    out
}

pub fn print_decl(d: &Decl) -> String {
    match d {
        Decl::System { name, backend, dim, .. } => format!("system {name} {} {dim};", backend.name()),
        Decl::Atom {
            kind,
            name,
            input,
            output,
            lit,
            ..
        } => {
            let wires = match kind {
                DeclKind::State => output.join(" * "),
                DeclKind::Effect => input.join(" * "),
                DeclKind::Proc => format!("{} -> {}", input.join(" * "), output.join(" * ")),
            };
            format!("{} {name} on {wires} = {};", kind.keyword(), print_literal(lit))
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn entry(e: &Entry) -> String {
    match e {
        Entry::Real(x) => num(*x),
        Entry::Complex(re, im) => format!("[{}, {}]", num(*re), num(*im)),
    }
}

fn row(r: &[Entry]) -> String {
    format!("[{}]", r.iter().map(entry).collect::<Vec<_>>().join(", "))
}

fn matrix(m: &MatrixLit) -> String {
    format!("[{}]", m.iter().map(|r| row(r)).collect::<Vec<_>>().join(", "))
}

pub fn print_literal(l: &Literal) -> String {
    match l {
        Literal::MaxMix => "maxmix".into(),
        Literal::Bell => "bell".into(),
        Literal::BellEffect => "bell_effect".into(),
        Literal::Unit => "unit".into(),
        Literal::Matrix(m) => format!("matrix {}", matrix(m)),
        Literal::Vector(v) => format!("vector [{}]", v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")),
        Literal::Ket(v) => format!("ket {}", row(v)),
        Literal::Kraus(ms) => format!("kraus[{}]", ms.iter().map(matrix).collect::<Vec<_>>().join(", ")),
        Literal::Stoch(m) => format!("stoch {}", matrix(m)),
    }
}

/// Minimal parenthesization: `.` is left-associative and binds looser than
/// `||`, which is also left-associative.
pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Atom(n, _) => n.clone(),
        Expr::Id(s, _) => format!("id[{}]", s.join(" * ")),
        Expr::Seq(f, g, _) => {
            let rhs = match **g {
                Expr::Seq(..) => format!("({})", print_expr(g)),
                _ => print_expr(g),
            };
            format!("{} . {}", print_expr(f), rhs)
        }
        Expr::Par(f, g, _) => {
            let lhs = match **f {
                Expr::Seq(..) => format!("({})", print_expr(f)),
                _ => print_expr(f),
            };
            let rhs = match **g {
                Expr::Seq(..) | Expr::Par(..) => format!("({})", print_expr(g)),
                _ => print_expr(g),
            };
            format!("{lhs} || {rhs}")
        }
    }
}
