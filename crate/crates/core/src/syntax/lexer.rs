use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::syntax::Rel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Sum,
    Diff,
    External,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Star,
    Minus,
    Comma,
    Dot,
    If,
    Rel(Rel),
    Amp,
    Bar,
    Arrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Sum => "`&sum`".into(),
            Tok::Diff => "`&diff`".into(),
            Tok::External => "`#external`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Star => "`*`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::If => "`:-`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let err = |line, col, msg: String| Error::Syntax { line, col, msg };

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let value = digits
                .parse::<BigInt>()
                .map_err(|e| err(line, col, format!("bad integer `{digits}`: {e}")))?;
            (Tok::Int(value), j - i)
        } else {
            match (c, peek) {
                ('&', _) => {
                    let word: String = chars[i + 1..]
                        .iter()
                        .take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_')
                        .collect();
                    match word.as_str() {
                        "sum" => (Tok::Sum, 4),
                        "diff" => (Tok::Diff, 5),
                        _ => (Tok::Amp, 1),
                    }
                }
                ('#', _) => {
                    let word: String = chars[i + 1..]
                        .iter()
                        .take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_')
                        .collect();
                    if word == "external" {
                        (Tok::External, 9)
                    } else {
                        return Err(err(line, col, format!("unknown directive `#{word}`")));
                    }
                }
                (':', Some('-')) => (Tok::If, 2),
                ('<', Some('=')) => (Tok::Rel(Rel::Le), 2),
                ('>', Some('=')) => (Tok::Rel(Rel::Ge), 2),
                ('!', Some('=')) => (Tok::Rel(Rel::Ne), 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', _) => (Tok::Rel(Rel::Lt), 1),
                ('>', _) => (Tok::Rel(Rel::Gt), 1),
                ('=', _) => (Tok::Rel(Rel::Eq), 1),
                ('-', _) => (Tok::Minus, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (';', _) => (Tok::Semi, 1),
                ('*', _) => (Tok::Star, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('|', _) => (Tok::Bar, 1),
                _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_theory_keywords_from_conjunction() {
        let toks: Vec<Tok> = tokenize("&sum{x} & p -> q")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(toks[0], Tok::Sum);
        assert_eq!(toks[4], Tok::Amp);
        assert_eq!(toks[6], Tok::Arrow);
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("% hello\n  a.").unwrap();
        assert_eq!(toks[0].0, Tok::Ident("a".into()));
        assert_eq!(toks[0].1, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(
            tokenize("a :- $b."),
            Err(Error::Syntax {
                line: 1,
                col: 6,
                ..
            })
        ));
    }
}
