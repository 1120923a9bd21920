//! Text format for HT_c theories: one formula per `.`-terminated item.
//!
//! ```text
//! formula := or ('->' formula)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := 'not' unary | '(' formula ')' | 'bot' | 'top' | 'def' '(' IDENT ')'
//!          | theory-atom | IDENT
//! ```

use super::Formula;
use crate::error::Result;
use crate::syntax::{ParseOptions, Parser, Tok};

pub fn parse_formulas(text: &str) -> Result<Vec<Formula>> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let mut out = Vec::new();
    while p.peek() != &Tok::Eof {
        out.push(formula(&mut p)?);
        p.expect(&Tok::Dot)?;
    }
    Ok(out)
}

/// A single formula, with an optional trailing `.`.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let f = formula(&mut p)?;
    if p.peek() == &Tok::Dot {
        p.bump();
    }
    p.expect(&Tok::Eof)?;
    Ok(f)
}

fn formula(p: &mut Parser) -> Result<Formula> {
    let lhs = disjunction(p)?;
    if p.peek() == &Tok::Arrow {
        p.bump();
        return Ok(Formula::implies(lhs, formula(p)?));
    }
    Ok(lhs)
}

fn disjunction(p: &mut Parser) -> Result<Formula> {
    let mut f = conjunction(p)?;
    while p.peek() == &Tok::Bar {
        p.bump();
        f = Formula::or(f, conjunction(p)?);
    }
    Ok(f)
}

fn conjunction(p: &mut Parser) -> Result<Formula> {
    let mut f = unary(p)?;
    while p.peek() == &Tok::Amp {
        p.bump();
        f = Formula::and(f, unary(p)?);
    }
    Ok(f)
}

fn unary(p: &mut Parser) -> Result<Formula> {
    if p.at_theory_atom() {
        return Ok(Formula::linear(p.theory_atom()?));
    }
    match p.peek().clone() {
        Tok::LParen => {
            p.bump();
            let f = formula(p)?;
            p.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(word) => {
            p.bump();
            match word.as_str() {
                "not" => Ok(Formula::not(unary(p)?)),
                "bot" => Ok(Formula::Bottom),
                "top" => Ok(Formula::top()),
                "def" if p.peek() == &Tok::LParen => {
                    p.bump();
                    let x = p.ident()?;
                    p.expect(&Tok::RParen)?;
                    Ok(Formula::def(x))
                }
                _ => Ok(Formula::prop(word)),
            }
        }
        other => Err(p.error(format!("expected formula, found {}", other.describe()))),
    }
}
