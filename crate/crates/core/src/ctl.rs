//! CTL formulas: syntax tree, parser and printer.
//!
//! Surface syntax, loosest binding first:
//!
//! ```text
//! f -> g            right-associative
//! f | g             left-associative
//! f & g             left-associative
//! !f  EX f  AX f  EF f  AG f
//! E[f U g]  A[f U g]  E[f W g]  A[f W g]  deadlock  Comp.place  (f)
//! ```
//!
//! `U` is the strong until (the right operand must eventually hold), `W`
//! the weak one (it need never hold). `EF` and `AG` include the current
//! state.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Cursor, SyntaxError, Tok};

/// Atomic proposition: place `place` of component `component` is marked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub component: String,
    pub place: String,
}

impl Atom {
    pub fn new(component: impl Into<String>, place: impl Into<String>) -> Self {
        Self {
            component: component.into(),
            place: place.into(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.place)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    /// True exactly at states without successors.
    Deadlock,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ExistsNext(Box<Formula>),
    AllNext(Box<Formula>),
    ExistsFinally(Box<Formula>),
    AllGlobally(Box<Formula>),
    ExistsUntil(Box<Formula>, Box<Formula>),
    AllUntil(Box<Formula>, Box<Formula>),
    ExistsWeakUntil(Box<Formula>, Box<Formula>),
    AllWeakUntil(Box<Formula>, Box<Formula>),
}

/// Shorthand constructors, mostly for tests and generated corpora.
impl Formula {
    pub fn atom(component: &str, place: &str) -> Self {
        Formula::Atom(Atom::new(component, place))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }
    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }
    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }
    pub fn ex(f: Formula) -> Self {
        Formula::ExistsNext(Box::new(f))
    }
    pub fn ax(f: Formula) -> Self {
        Formula::AllNext(Box::new(f))
    }
    pub fn ef(f: Formula) -> Self {
        Formula::ExistsFinally(Box::new(f))
    }
    pub fn ag(f: Formula) -> Self {
        Formula::AllGlobally(Box::new(f))
    }
    pub fn eu(f: Formula, g: Formula) -> Self {
        Formula::ExistsUntil(Box::new(f), Box::new(g))
    }
    pub fn au(f: Formula, g: Formula) -> Self {
        Formula::AllUntil(Box::new(f), Box::new(g))
    }
    pub fn ew(f: Formula, g: Formula) -> Self {
        Formula::ExistsWeakUntil(Box::new(f), Box::new(g))
    }
    pub fn aw(f: Formula, g: Formula) -> Self {
        Formula::AllWeakUntil(Box::new(f), Box::new(g))
    }

    /// Distinct atoms, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Deadlock => {}
            Formula::Not(f)
            | Formula::ExistsNext(f)
            | Formula::AllNext(f)
            | Formula::ExistsFinally(f)
            | Formula::AllGlobally(f) => f.collect_atoms(out),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::ExistsUntil(f, g)
            | Formula::AllUntil(f, g)
            | Formula::ExistsWeakUntil(f, g)
            | Formula::AllWeakUntil(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Deadlock => 0,
            Formula::Not(f)
            | Formula::ExistsNext(f)
            | Formula::AllNext(f)
            | Formula::ExistsFinally(f)
            | Formula::AllGlobally(f) => 1 + f.depth(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::ExistsUntil(f, g)
            | Formula::AllUntil(f, g)
            | Formula::ExistsWeakUntil(f, g)
            | Formula::AllWeakUntil(f, g) => 1 + f.depth().max(g.depth()),
        }
    }
}

/// Parses a single formula; the whole input must be consumed.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let f = parse_in(&mut cur)?;
    cur.expect_eof()?;
    Ok(f)
}

/// Parses one formula at the cursor, leaving trailing tokens.
pub(crate) fn parse_in(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    implied(cur)
}

fn implied(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let lhs = ored(cur)?;
    if cur.eat_sym("->") {
        Ok(Formula::implies(lhs, implied(cur)?))
    } else {
        Ok(lhs)
    }
}

fn ored(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut f = anded(cur)?;
    while cur.eat_sym("|") {
        f = Formula::or(f, anded(cur)?);
    }
    Ok(f)
}

fn anded(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut f = unary(cur)?;
    while cur.eat_sym("&") {
        f = Formula::and(f, unary(cur)?);
    }
    Ok(f)
}

const UNARY_START: [&str; 10] = [
    "`!`",
    "`EX`",
    "`AX`",
    "`EF`",
    "`AG`",
    "`E[`",
    "`A[`",
    "`deadlock`",
    "atom `Comp.place`",
    "`(`",
];

fn unary(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    if cur.eat_sym("!") {
        return Ok(Formula::not(unary(cur)?));
    }
    if cur.eat_sym("(") {
        let f = implied(cur)?;
        cur.expect_sym(")")?;
        return Ok(f);
    }
    let Tok::Ident(word) = cur.peek().clone() else {
        return Err(cur.error(UNARY_START));
    };
    // An identifier followed by `.` is always an atom, so component names
    // may coincide with operator keywords.
    if matches!(cur.peek_at(1), Tok::Sym(".")) {
        cur.bump();
        cur.bump();
        let (place, _) = cur.expect_ident()?;
        return Ok(Formula::atom(&word, &place));
    }
    match word.as_str() {
        "EX" | "AX" | "EF" | "AG" => {
            cur.bump();
            let f = unary(cur)?;
            Ok(match word.as_str() {
                "EX" => Formula::ex(f),
                "AX" => Formula::ax(f),
                "EF" => Formula::ef(f),
                _ => Formula::ag(f),
            })
        }
        "E" | "A" if matches!(cur.peek_at(1), Tok::Sym("[")) => {
            cur.bump();
            cur.bump();
            let lhs = implied(cur)?;
            let strong = if cur.eat_keyword("U") {
                true
            } else if cur.eat_keyword("W") {
                false
            } else {
                return Err(cur.error(["`U`", "`W`", "a binary operator"]));
            };
            let rhs = implied(cur)?;
            cur.expect_sym("]")?;
            Ok(match (word.as_str(), strong) {
                ("E", true) => Formula::eu(lhs, rhs),
                ("A", true) => Formula::au(lhs, rhs),
                ("E", false) => Formula::ew(lhs, rhs),
                _ => Formula::aw(lhs, rhs),
            })
        }
        "deadlock" => {
            cur.bump();
            Ok(Formula::Deadlock)
        }
        _ => {
            // Bare identifier: the only valid continuation is `.place`.
            cur.bump();
            Err(cur.error(["`.`"]))
        }
    }
}

/// Binding strength used by the printer; higher binds tighter.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

/// Minimal-parenthesis rendering that parses back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(out, "{a}"),
            Formula::Deadlock => out.write_str("deadlock"),
            Formula::Not(f) => {
                out.write_str("!")?;
                write_at(f, 3, out)
            }
            Formula::ExistsNext(f) | Formula::AllNext(f) | Formula::ExistsFinally(f) | Formula::AllGlobally(f) => {
                out.write_str(match self {
                    Formula::ExistsNext(_) => "EX ",
                    Formula::AllNext(_) => "AX ",
                    Formula::ExistsFinally(_) => "EF ",
                    _ => "AG ",
                })?;
                write_at(f, 3, out)
            }
            Formula::And(f, g) => {
                write_at(f, 2, out)?;
                out.write_str(" & ")?;
                write_at(g, 3, out)
            }
            Formula::Or(f, g) => {
                write_at(f, 1, out)?;
                out.write_str(" | ")?;
                write_at(g, 2, out)
            }
            Formula::Implies(f, g) => {
                write_at(f, 1, out)?;
                out.write_str(" -> ")?;
                write_at(g, 0, out)
            }
            Formula::ExistsUntil(f, g) => write!(out, "E[{f} U {g}]"),
            Formula::AllUntil(f, g) => write!(out, "A[{f} U {g}]"),
            Formula::ExistsWeakUntil(f, g) => write!(out, "E[{f} W {g}]"),
            Formula::AllWeakUntil(f, g) => write!(out, "A[{f} W {g}]"),
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pos;

    #[test]
    fn liveness_shape() {
        let f = parse_formula("AG (EF (Seller.S0 & Purchaser.P0))").unwrap();
        assert_eq!(
            f,
            Formula::ag(Formula::ef(Formula::and(
                Formula::atom("Seller", "S0"),
                Formula::atom("Purchaser", "P0")
            )))
        );
        assert_eq!(f.to_string(), "AG EF (Seller.S0 & Purchaser.P0)");
        let atoms: Vec<_> = f.atoms().into_iter().collect();
        assert_eq!(
            atoms,
            vec![Atom::new("Purchaser", "P0"), Atom::new("Seller", "S0")]
        );
    }

    #[test]
    fn implication_round_trip() {
        let f = parse_formula("a.p -> a.p").unwrap();
        assert_eq!(f, Formula::implies(Formula::atom("a", "p"), Formula::atom("a", "p")));
        assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f);
    }

    #[test]
    fn strong_and_weak_until_differ() {
        let s = parse_formula("A[ x.q U x.r ]").unwrap();
        let w = parse_formula("A[ x.q W x.r ]").unwrap();
        assert_eq!(s, Formula::au(Formula::atom("x", "q"), Formula::atom("x", "r")));
        assert_eq!(w, Formula::aw(Formula::atom("x", "q"), Formula::atom("x", "r")));
        assert_ne!(s, w);
        assert_eq!(s.to_string(), "A[x.q U x.r]");
    }

    #[test]
    fn next_round_trip() {
        assert_eq!(parse_formula("EX a.p").unwrap().to_string(), "EX a.p");
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!a.p & b.q | c.r -> d.s -> e.t").unwrap();
        let expected = Formula::implies(
            Formula::or(
                Formula::and(Formula::not(Formula::atom("a", "p")), Formula::atom("b", "q")),
                Formula::atom("c", "r"),
            ),
            Formula::implies(Formula::atom("d", "s"), Formula::atom("e", "t")),
        );
        assert_eq!(f, expected);
        assert_eq!(f.to_string(), "!a.p & b.q | c.r -> d.s -> e.t");
        let left = Formula::implies(
            Formula::implies(Formula::atom("a", "p"), Formula::atom("b", "q")),
            Formula::atom("c", "r"),
        );
        assert_eq!(left.to_string(), "(a.p -> b.q) -> c.r");
        let right_and = Formula::and(
            Formula::atom("a", "p"),
            Formula::and(Formula::atom("b", "q"), Formula::atom("c", "r")),
        );
        assert_eq!(right_and.to_string(), "a.p & (b.q & c.r)");
    }

    #[test]
    fn keyword_components_are_atoms() {
        let f = parse_formula("A.p & E[EX.q U A.r]").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::atom("A", "p"),
                Formula::eu(Formula::atom("EX", "q"), Formula::atom("A", "r"))
            )
        );
    }

    #[test]
    fn deadlock_has_no_atoms() {
        assert!(parse_formula("deadlock").unwrap().atoms().is_empty());
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_formula("").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        let e = parse_formula("(a.p & b.q").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 11 });
        assert_eq!(e.expected, vec!["`)`".to_string()]);
        let e = parse_formula("a.p )").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 5 });
        let e = parse_formula("E[a.p a.q]").unwrap_err();
        assert!(e.expected.contains(&"`U`".to_string()));
        assert!(parse_formula("A[a.p U a.q").is_err());
        assert!(parse_formula("foo").is_err());
    }
}
