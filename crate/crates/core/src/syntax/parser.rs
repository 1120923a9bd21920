use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::lexer::{tokenize, Pos, Tok};
use super::{Atom, Head, Program, Rel, Rule, Term, TheoryAtom};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Sort `&sum` terms by variable and merge repeated variables.
    pub normalize: bool,
}

pub fn parse_program(text: &str) -> Result<Program> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program> {
    Parser::new(text, opts)?.program()
}

/// Parse a single `&sum{...}` or `&diff{...}` atom.
pub fn parse_theory_atom(text: &str) -> Result<TheoryAtom> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let atom = p.theory_atom()?;
    p.expect(&Tok::Eof)?;
    Ok(atom)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    opts: ParseOptions,
}

impl Parser {
    pub(crate) fn new(text: &str, opts: ParseOptions) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            opts,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> Error {
        let pos = self.pos();
        Error::Syntax {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let negative = if self.peek() == &Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            other => Err(self.error(format!("expected integer, found {}", other.describe()))),
        }
    }

    fn rel(&mut self) -> Result<Rel> {
        match self.peek().clone() {
            Tok::Rel(r) => {
                self.bump();
                Ok(r)
            }
            other => Err(self.error(format!(
                "expected comparison operator, found {}",
                other.describe()
            ))),
        }
    }

    fn term(&mut self) -> Result<Term> {
        if matches!(self.peek(), Tok::Int(_) | Tok::Minus) {
            let coeff = self.int()?;
            self.expect(&Tok::Star)?;
            let var = self.ident()?;
            Ok(Term { coeff, var })
        } else {
            Ok(Term::new(1, self.ident()?))
        }
    }

    pub(crate) fn at_theory_atom(&self) -> bool {
        matches!(self.peek(), Tok::Sum | Tok::Diff)
    }

    pub(crate) fn theory_atom(&mut self) -> Result<TheoryAtom> {
        match self.bump() {
            Tok::Sum => {
                self.expect(&Tok::LBrace)?;
                let mut terms = vec![self.term()?];
                while self.peek() == &Tok::Semi {
                    self.bump();
                    terms.push(self.term()?);
                }
                self.expect(&Tok::RBrace)?;
                let rel = self.rel()?;
                let rhs = self.int()?;
                let atom = TheoryAtom::sum(terms, rel, rhs)?;
                Ok(if self.opts.normalize {
                    atom.normalized()
                } else {
                    atom
                })
            }
            Tok::Diff => {
                self.expect(&Tok::LBrace)?;
                let x = self.ident()?;
                self.expect(&Tok::Minus)?;
                let y = self.ident()?;
                self.expect(&Tok::RBrace)?;
                if self.peek() != &Tok::Rel(Rel::Le) {
                    return Err(self.error("&diff atoms only support `<=`"));
                }
                self.bump();
                let k = self.int()?;
                Ok(TheoryAtom::diff(x, y, k))
            }
            other => {
                self.at -= 1;
                Err(self.error(format!("expected theory atom, found {}", other.describe())))
            }
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        if self.at_theory_atom() {
            return Ok(Atom::Theory(self.theory_atom()?));
        }
        let name = self.ident()?;
        if name == "not" {
            self.at -= 1;
            return Err(self.error("`not` cannot be used as an atom name"));
        }
        Ok(Atom::Regular(name))
    }

    fn body(&mut self) -> Result<(Vec<Atom>, Vec<Atom>)> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        if self.peek() == &Tok::Dot {
            return Ok((pos, neg));
        }
        loop {
            if self.peek() == &Tok::Ident("not".into()) {
                self.bump();
                neg.push(self.atom()?);
            } else {
                pos.push(self.atom()?);
            }
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                return Ok((pos, neg));
            }
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut program = Program::new();
        let mut declared = BTreeSet::new();
        loop {
            let start = self.pos();
            match self.peek() {
                Tok::Eof => return Ok(program),
                Tok::External => {
                    self.bump();
                    let s = self.theory_atom()?;
                    self.expect(&Tok::Dot)?;
                    if !declared.insert(s.clone()) {
                        return Err(Error::DuplicateExternal {
                            line: start.line,
                            col: start.col,
                            atom: s.to_string(),
                        });
                    }
                    program.declared_externals.push(s);
                }
                Tok::If => {
                    self.bump();
                    let (pos, neg) = self.body()?;
                    self.expect(&Tok::Dot)?;
                    program.push_rule(Rule::new(Head::Bottom, pos, neg), start.line);
                }
                _ => {
                    let head = self.atom()?;
                    let (pos, neg) = if self.peek() == &Tok::If {
                        self.bump();
                        self.body()?
                    } else {
                        (vec![], vec![])
                    };
                    self.expect(&Tok::Dot)?;
                    program.push_rule(Rule::new(Head::Atom(head), pos, neg), start.line);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::AtomKind;

    #[test]
    fn running_example() {
        let p = parse_program("a :- &sum{1*x;1*y} = 4.\n&sum{1*y;1*z} = 2 :- a.").unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.regulars, BTreeSet::from(["a".to_string()]));
        let texts: Vec<String> = p.theory_atoms.iter().map(|s| s.to_string()).collect();
        assert_eq!(texts, vec!["&sum{x;y}=4", "&sum{y;z}=2"]);
        assert_eq!(p.rule_lines, vec![1, 2]);
    }

    #[test]
    fn empty_input() {
        let p = parse_program("").unwrap();
        assert!(p.rules.is_empty() && p.regulars.is_empty() && p.theory_atoms.is_empty());
    }

    #[test]
    fn integrity_constraint() {
        let p = parse_program(":- not a.").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].head, Head::Bottom);
        assert_eq!(p.rules[0].nbody, vec![Atom::Regular("a".into())]);
        assert!(p.rules[0].pbody.is_empty());
    }

    #[test]
    fn empty_body_constraint() {
        let p = parse_program(":- .").unwrap();
        assert_eq!(p.rules[0], Rule::constraint(vec![], vec![]));
        assert_eq!(p.to_string(), ":- .\n");
    }

    #[test]
    fn diff_atoms_and_negative_constants() {
        let s = parse_theory_atom("&diff{x-y}<=-4").unwrap();
        assert_eq!(s.kind(), AtomKind::Diff);
        assert_eq!(s.rhs(), &BigInt::from(-4));
        assert_eq!(s.to_string(), "&diff{x-y}<=-4");
        assert!(parse_theory_atom("&diff{x-y}<4").is_err());
    }

    #[test]
    fn negative_coefficients_round_trip() {
        let s = parse_theory_atom("&sum{-2*x;y;0*z}>=-3").unwrap();
        assert_eq!(s.to_string(), "&sum{-2*x;y;0*z}>=-3");
    }

    #[test]
    fn syntax_error_location() {
        match parse_program("a.\nb :- c d.") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_external_is_rejected() {
        let err = parse_program("#external &sum{x}=1.\n#external &sum{x}=1.").unwrap_err();
        assert!(matches!(err, Error::DuplicateExternal { line: 2, .. }));
    }

    #[test]
    fn empty_sum_is_rejected() {
        assert!(parse_program("a :- &sum{}=1.").is_err());
    }
}
