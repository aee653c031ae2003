use std::fmt;

use super::{Formula, FormulaKind, TRUTH_ATOM};

/// Concrete-syntax rendering that re-sugars the shapes the parser desugars,
/// so printing and re-parsing yields the same tree.
pub struct Display<'a, S> {
    formula: &'a Formula,
    roster: &'a [S],
}

impl<'a, S: AsRef<str>> Display<'a, S> {
    pub(super) fn new(formula: &'a Formula, roster: &'a [S]) -> Self {
        Display { formula, roster }
    }
}

impl<S: AsRef<str>> fmt::Display for Display<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self.formula, self.roster, QUANT)
    }
}

// Binding levels, loosest first.
const QUANT: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNTIL: u8 = 4;
const UNARY: u8 = 5;
const ATOMIC: u8 = 6;

enum View<'a> {
    True,
    False,
    Atom(&'a str),
    Not(&'a Formula),
    Next(&'a Formula),
    Eventually(&'a Formula),
    Globally(&'a Formula),
    Know(usize, &'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Until(&'a Formula, &'a Formula),
    Quant(&'static str, &'a super::Var, &'a Formula),
}

fn is_truth(f: &Formula) -> bool {
    match f.kind() {
        FormulaKind::Implies(a, b) => {
            matches!((a.kind(), b.kind()), (FormulaKind::Atom(x), FormulaKind::Atom(y)) if x == TRUTH_ATOM && y == TRUTH_ATOM)
        }
        _ => false,
    }
}

fn view(f: &Formula) -> View<'_> {
    use FormulaKind::*;
    if is_truth(f) {
        return View::True;
    }
    match f.kind() {
        Atom(name) => View::Atom(name),
        Not(inner) => {
            if is_truth(inner) {
                return View::False;
            }
            match inner.kind() {
                Until(t, b) if is_truth(t) => match b.kind() {
                    Not(g) => View::Globally(g),
                    _ => View::Not(inner),
                },
                Implies(a, b) => match b.kind() {
                    Not(c) => View::And(a, c),
                    _ => View::Not(inner),
                },
                _ => View::Not(inner),
            }
        }
        Implies(a, b) => match a.kind() {
            Not(c) => View::Or(c, b),
            _ => View::Implies(a, b),
        },
        Next(a) => View::Next(a),
        Until(t, b) if is_truth(t) => View::Eventually(b),
        Until(a, b) => View::Until(a, b),
        Know(i, a) => View::Know(*i, a),
        Exists(v, a) => View::Quant("exists", v, a),
        Forall(v, a) => View::Quant("forall", v, a),
    }
}

fn write_at<S: AsRef<str>>(
    out: &mut fmt::Formatter<'_>,
    f: &Formula,
    roster: &[S],
    min: u8,
) -> fmt::Result {
    let v = view(f);
    let level = match v {
        View::True | View::False | View::Atom(_) => ATOMIC,
        View::Not(_) | View::Next(_) | View::Eventually(_) | View::Globally(_) | View::Know(..) => {
            UNARY
        }
        View::Until(..) => UNTIL,
        View::And(..) => AND,
        View::Or(..) => OR,
        View::Implies(..) => IMPLIES,
        View::Quant(..) => QUANT,
    };
    let paren = level < min;
    if paren {
        out.write_str("(")?;
    }
    let name = |i: usize| roster.get(i).map_or("?", |s| s.as_ref());
    match v {
        View::True => out.write_str("true")?,
        View::False => out.write_str("false")?,
        View::Atom(a) => out.write_str(a)?,
        View::Not(a) => {
            out.write_str("!")?;
            write_at(out, a, roster, UNARY)?;
        }
        View::Next(a) => {
            out.write_str("X ")?;
            write_at(out, a, roster, UNARY)?;
        }
        View::Eventually(a) => {
            out.write_str("F ")?;
            write_at(out, a, roster, UNARY)?;
        }
        View::Globally(a) => {
            out.write_str("G ")?;
            write_at(out, a, roster, UNARY)?;
        }
        View::Know(i, a) => {
            write!(out, "K[{}] ", name(i))?;
            write_at(out, a, roster, UNARY)?;
        }
        View::And(a, b) => {
            write_at(out, a, roster, AND)?;
            out.write_str(" & ")?;
            write_at(out, b, roster, UNTIL)?;
        }
        View::Or(a, b) => {
            write_at(out, a, roster, OR)?;
            out.write_str(" | ")?;
            write_at(out, b, roster, AND)?;
        }
        View::Implies(a, b) => {
            write_at(out, a, roster, OR)?;
            out.write_str(" -> ")?;
            write_at(out, b, roster, QUANT)?;
        }
        View::Until(a, b) => {
            write_at(out, a, roster, UNARY)?;
            out.write_str(" U ")?;
            write_at(out, b, roster, UNTIL)?;
        }
        View::Quant(kw, var, body) => {
            write!(out, "{kw} {}:{}. ", var.name, name(var.agent))?;
            write_at(out, body, roster, QUANT)?;
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}
