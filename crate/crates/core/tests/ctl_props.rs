mod common;

use std::collections::BTreeSet;

use netcheck::ctl::{parse_formula, render_formula, Atom, Formula};
use proptest::prelude::*;

/// Independent leaf fold used as the atoms() oracle.
fn leaves(f: &Formula, out: &mut Vec<Atom>) {
    match f {
        Formula::Atom(a) => out.push(a.clone()),
        Formula::Deadlock => {}
        Formula::Not(g)
        | Formula::ExistsNext(g)
        | Formula::AllNext(g)
        | Formula::ExistsFinally(g)
        | Formula::AllGlobally(g) => leaves(g, out),
        Formula::And(g, h)
        | Formula::Or(g, h)
        | Formula::Implies(g, h)
        | Formula::ExistsUntil(g, h)
        | Formula::AllUntil(g, h)
        | Formula::ExistsWeakUntil(g, h)
        | Formula::AllWeakUntil(g, h) => {
            leaves(g, out);
            leaves(h, out);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_inverts_render(f in common::arb_formula()) {
        let text = render_formula(&f);
        let back = parse_formula(&text);
        prop_assert_eq!(back.as_ref(), Ok(&f), "rendered: {}", text);
        // Canonical form is a fixpoint.
        prop_assert_eq!(render_formula(&back.unwrap()), text);
    }

    #[test]
    fn atoms_match_leaf_fold(f in common::arb_formula()) {
        let mut v = Vec::new();
        leaves(&f, &mut v);
        let expected: BTreeSet<Atom> = v.into_iter().collect();
        prop_assert_eq!(f.atoms(), expected);
    }

    #[test]
    fn redundant_parentheses_are_accepted(f in common::arb_formula()) {
        let text = format!("(({}))", render_formula(&f));
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }
}

#[test]
fn rejects_empty_and_unbalanced() {
    for bad in ["", "   ", "(", ")", "(a.p", "a.p)", "E[a.p U a.q", "A[a.p W a.q]]", "!(a.p"] {
        let e = parse_formula(bad).unwrap_err();
        assert!(e.pos.line >= 1 && e.pos.col >= 1, "{bad}");
    }
}

#[test]
fn multi_line_error_positions() {
    let e = parse_formula("AG (a.p &\n   )").unwrap_err();
    assert_eq!((e.pos.line, e.pos.col), (2, 4));
}
