use std::collections::HashMap;

use super::ast::{Decl, DeclKind, Entry, Expr, Literal, MatrixLit, Pos, Program};
use super::lexer::{tokenize, Tok, Token};
use super::Diagnostic;
use crate::theory::Backend;

/// Words that cannot name a system or an atom.
pub const RESERVED: &[&str] = &["system", "state", "effect", "proc", "on", "run", "id", "sqrt"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum NameKind {
    System,
    Atom,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    names: HashMap<String, (NameKind, Pos)>,
}

pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        names: HashMap::new(),
    };
    p.program()
}

fn parse_backend(word: &str) -> Option<Backend> {
    word.parse().ok()
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> Result<T, Diagnostic> {
        let t = self.peek();
        Err(Diagnostic::new(t.pos, format!("syntax error at token '{}': expected {}", t.text, what)))
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<Token, Diagnostic> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            self.error(what)
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), Diagnostic> {
        match &self.peek().tok {
            Tok::Ident(w) => {
                let w = w.clone();
                let pos = self.next().pos;
                Ok((w, pos))
            }
            _ => self.error(what),
        }
    }

    fn declare(&mut self, name: &str, pos: Pos, kind: NameKind) -> Result<(), Diagnostic> {
        if RESERVED.contains(&name) {
            return Err(Diagnostic::new(pos, format!("'{name}' is a reserved word")));
        }
        if let Some((_, first)) = self.names.get(name) {
            return Err(Diagnostic::new(
                pos,
                format!("duplicate declaration of '{name}' (first declared at {first})"),
            ));
        }
        self.names.insert(name.to_string(), (kind, pos));
        Ok(())
    }

    fn resolve(&self, name: &str, pos: Pos, kind: NameKind) -> Result<(), Diagnostic> {
        match self.names.get(name) {
            None => Err(Diagnostic::new(pos, format!("unknown identifier '{name}'"))),
            Some((k, _)) if *k != kind => {
                let want = if kind == NameKind::System {
                    "a system"
                } else {
                    "a state, effect or process"
                };
                Err(Diagnostic::new(pos, format!("'{name}' is not {want}")))
            }
            Some(_) => Ok(()),
        }
    }

    fn program(&mut self) -> Result<Program, Diagnostic> {
        let mut decls = Vec::new();
        loop {
            if self.is_word("run") {
                self.next();
                let run = self.expr()?;
                if self.peek().tok == Tok::Semi {
                    self.next();
                }
                if self.peek().tok != Tok::Eof {
                    return self.error("end of input after the run expression");
                }
                return Ok(Program { decls, run });
            }
            let decl = if self.is_word("system") {
                self.system_decl()?
            } else if self.is_word("state") {
                self.atom_decl(DeclKind::State)?
            } else if self.is_word("effect") {
                self.atom_decl(DeclKind::Effect)?
            } else if self.is_word("proc") {
                self.atom_decl(DeclKind::Proc)?
            } else {
                return self.error("declaration or 'run'");
            };
            decls.push(decl);
        }
    }

    fn system_decl(&mut self) -> Result<Decl, Diagnostic> {
        let pos = self.next().pos;
        let (name, name_pos) = self.ident("system name")?;
        let backend = match &self.peek().tok {
            Tok::Ident(w) => match parse_backend(w) {
                Some(b) => b,
                None => return self.error("backend (classical, quantum or real)"),
            },
            _ => return self.error("backend (classical, quantum or real)"),
        };
        self.next();
        let dim = match self.peek().tok {
            Tok::Num(v) if v >= 1.0 && v.fract() == 0.0 && v <= 4096.0 => v as usize,
            _ => return self.error("positive integer dimension"),
        };
        self.next();
        self.eat(Tok::Semi, "';'")?;
        self.declare(&name, name_pos, NameKind::System)?;
        Ok(Decl::System { name, backend, dim, pos })
    }

    fn syslist(&mut self) -> Result<Vec<String>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            let (name, pos) = self.ident("system name")?;
            self.resolve(&name, pos, NameKind::System)?;
            out.push(name);
            if self.peek().tok != Tok::Star {
                return Ok(out);
            }
            self.next();
        }
    }

    fn atom_decl(&mut self, kind: DeclKind) -> Result<Decl, Diagnostic> {
        let pos = self.next().pos;
        let (name, name_pos) = self.ident("name")?;
        if !self.is_word("on") {
            return self.error("'on'");
        }
        self.next();
        let first = self.syslist()?;
        let (input, output) = match kind {
            DeclKind::State => (vec![], first),
            DeclKind::Effect => (first, vec![]),
            DeclKind::Proc => {
                self.eat(Tok::Arrow, "'->'")?;
                (first, self.syslist()?)
            }
        };
        self.eat(Tok::Eq, "'='")?;
        let lit = self.literal()?;
        self.eat(Tok::Semi, "';'")?;
        self.declare(&name, name_pos, NameKind::Atom)?;
        Ok(Decl::Atom {
            kind,
            name,
            input,
            output,
            lit,
            pos,
        })
    }

    fn literal(&mut self) -> Result<Literal, Diagnostic> {
        let word = match &self.peek().tok {
            Tok::Ident(w) => w.clone(),
            _ => return self.error("literal"),
        };
        let lit = match word.as_str() {
            "maxmix" => Literal::MaxMix,
            "bell" => Literal::Bell,
            "bell_effect" => Literal::BellEffect,
            "unit" => Literal::Unit,
            "matrix" | "vector" | "ket" | "kraus" | "stoch" => {
                self.next();
                return match word.as_str() {
                    "matrix" => Ok(Literal::Matrix(self.matrix()?)),
                    "vector" => Ok(Literal::Vector(self.vector()?)),
                    "ket" => Ok(Literal::Ket(self.row()?)),
                    "stoch" => Ok(Literal::Stoch(self.matrix()?)),
                    _ => {
                        self.eat(Tok::LBrack, "'['")?;
                        let mut ms = vec![self.matrix()?];
                        while self.peek().tok == Tok::Comma {
                            self.next();
                            ms.push(self.matrix()?);
                        }
                        self.eat(Tok::RBrack, "']'")?;
                        Ok(Literal::Kraus(ms))
                    }
                };
            }
            _ => return self.error("literal (maxmix, bell, bell_effect, unit, matrix, vector, ket, kraus or stoch)"),
        };
        self.next();
        Ok(lit)
    }

    fn matrix(&mut self) -> Result<MatrixLit, Diagnostic> {
        let pos = self.eat(Tok::LBrack, "'[' opening a matrix")?.pos;
        let mut rows = vec![self.row()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            rows.push(self.row()?);
        }
        self.eat(Tok::RBrack, "']'")?;
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Diagnostic::new(pos, "matrix rows have different lengths"));
        }
        Ok(rows)
    }

    fn row(&mut self) -> Result<Vec<Entry>, Diagnostic> {
        self.eat(Tok::LBrack, "'[' opening a row")?;
        let mut row = vec![self.entry()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            row.push(self.entry()?);
        }
        self.eat(Tok::RBrack, "']'")?;
        Ok(row)
    }

    fn entry(&mut self) -> Result<Entry, Diagnostic> {
        if self.peek().tok == Tok::LBrack {
            self.next();
            let re = self.number()?;
            self.eat(Tok::Comma, "','")?;
            let im = self.number()?;
            self.eat(Tok::RBrack, "']'")?;
            Ok(Entry::Complex(re, im))
        } else {
            Ok(Entry::Real(self.number()?))
        }
    }

    fn vector(&mut self) -> Result<Vec<f64>, Diagnostic> {
        self.eat(Tok::LBrack, "'['")?;
        let mut v = vec![self.number()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            v.push(self.number()?);
        }
        self.eat(Tok::RBrack, "']'")?;
        Ok(v)
    }

    /// `signed ("/" signed)?`, folded to a constant.
    fn number(&mut self) -> Result<f64, Diagnostic> {
        let num = self.signed()?;
        if self.peek().tok != Tok::Slash {
            return Ok(num);
        }
        let pos = self.next().pos;
        let den = self.signed()?;
        if den == 0.0 {
            return Err(Diagnostic::new(pos, "division by zero"));
        }
        Ok(num / den)
    }

    fn signed(&mut self) -> Result<f64, Diagnostic> {
        let mut sign = 1.0;
        while self.peek().tok == Tok::Minus {
            self.next();
            sign = -sign;
        }
        match self.peek().tok.clone() {
            Tok::Num(v) => {
                self.next();
                Ok(sign * v)
            }
            Tok::Ident(w) if w == "sqrt" => {
                self.next();
                self.eat(Tok::LParen, "'('")?;
                let pos = self.peek().pos;
                let v = self.number()?;
                self.eat(Tok::RParen, "')'")?;
                if v < 0.0 {
                    return Err(Diagnostic::new(pos, "square root of a negative number"));
                }
                Ok(sign * v.sqrt())
            }
            _ => self.error("number"),
        }
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.par()?;
        while self.peek().tok == Tok::Dot {
            let pos = self.next().pos;
            let rhs = self.par()?;
            lhs = Expr::Seq(Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn par(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.primary()?;
        while self.peek().tok == Tok::Bar2 {
            let pos = self.next().pos;
            let rhs = self.primary()?;
            lhs = Expr::Par(Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.eat(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(w) if w == "id" => {
                let pos = self.next().pos;
                self.eat(Tok::LBrack, "'[' after 'id'")?;
                let systems = self.syslist()?;
                self.eat(Tok::RBrack, "']'")?;
                Ok(Expr::Id(systems, pos))
            }
            Tok::Ident(w) if !RESERVED.contains(&w.as_str()) => {
                let pos = self.next().pos;
                self.resolve(&w, pos, NameKind::Atom)?;
                Ok(Expr::Atom(w, pos))
            }
            _ => self.error("expression"),
        }
    }
}
