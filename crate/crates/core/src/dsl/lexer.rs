use super::ast::Pos;
use super::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(f64),
    Semi,
    Eq,
    Dot,
    Bar2,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Star,
    Arrow,
    Minus,
    Slash,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub text: String,
    pub pos: Pos,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, col };
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if ch.is_ascii_digit() {
            let digits = |i: &mut usize| {
                while *i < chars.len() && chars[*i].is_ascii_digit() {
                    *i += 1;
                }
            };
            digits(&mut i);
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                digits(&mut i);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    digits(&mut i);
                }
            }
            let text: String = chars[start..i].iter().collect();
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Tok::Num(v),
                _ => return Err(Diagnostic::new(pos, format!("invalid number '{text}'"))),
            }
        } else {
            i += 1;
            match ch {
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '.' => Tok::Dot,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '|' if i < chars.len() && chars[i] == '|' => {
                    i += 1;
                    Tok::Bar2
                }
                '-' if i < chars.len() && chars[i] == '>' => {
                    i += 1;
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                '|' => return Err(Diagnostic::new(pos, "unexpected character '|' (parallel composition is '||')")),
                other => return Err(Diagnostic::new(pos, format!("unexpected character '{}'", other.escape_default()))),
            }
        };
        col += i - start;
        out.push(Token {
            tok,
            text: chars[start..i].iter().collect(),
            pos,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        text: "end of input".into(),
        pos: Pos { line, col },
    });
    Ok(out)
}
