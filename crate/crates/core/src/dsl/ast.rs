use std::fmt;

use crate::theory::Backend;

/// Source position (1-based). Positions never take part in equality, so
/// two ASTs that differ only in layout compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A matrix entry written either as a number or as a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    Real(f64),
    Complex(f64, f64),
}

impl Entry {
    pub fn re(self) -> f64 {
        match self {
            Entry::Real(x) | Entry::Complex(x, _) => x,
        }
    }

    pub fn im(self) -> f64 {
        match self {
            Entry::Real(_) => 0.0,
            Entry::Complex(_, y) => y,
        }
    }
}

/// Rows of entries.
pub type MatrixLit = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    /// Complete state of the declared systems.
    MaxMix,
    /// Maximally entangled state on `X * Y` with `dim X == dim Y`.
    Bell,
    /// Projector on the maximally entangled state, as an effect.
    BellEffect,
    /// The deterministic effect.
    Unit,
    /// Density matrix (state) or operator (effect).
    Matrix(MatrixLit),
    /// Probability vector (state) or response function (effect), classical only.
    Vector(Vec<f64>),
    /// Pure state `|v><v|` or rank-one effect.
    Ket(Vec<Entry>),
    Kraus(Vec<MatrixLit>),
    Stoch(MatrixLit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    State,
    Effect,
    Proc,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::State => "state",
            DeclKind::Effect => "effect",
            DeclKind::Proc => "proc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    System {
        name: String,
        backend: Backend,
        dim: usize,
        pos: Pos,
    },
    /// `state` has no input, `effect` has no output.
    Atom {
        kind: DeclKind,
        name: String,
        input: Vec<String>,
        output: Vec<String>,
        lit: Literal,
        pos: Pos,
    },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::System { name, .. } | Decl::Atom { name, .. } => name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Decl::System { pos, .. } | Decl::Atom { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// `f . g`: apply `g`, then `f`.
    Seq(Box<Expr>, Box<Expr>, Pos),
    /// `f || g`.
    Par(Box<Expr>, Box<Expr>, Pos),
    Atom(String, Pos),
    /// `id[A * B]`.
    Id(Vec<String>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Seq(_, _, p) | Expr::Par(_, _, p) | Expr::Atom(_, p) | Expr::Id(_, p) => *p,
        }
    }

    pub fn seq(f: Expr, g: Expr) -> Expr {
        let pos = f.pos();
        Expr::Seq(Box::new(f), Box::new(g), pos)
    }

    pub fn par(f: Expr, g: Expr) -> Expr {
        let pos = f.pos();
        Expr::Par(Box::new(f), Box::new(g), pos)
    }

    pub fn atom(name: &str) -> Expr {
        Expr::Atom(name.to_string(), Pos::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub run: Expr,
}
