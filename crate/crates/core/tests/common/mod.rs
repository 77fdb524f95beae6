#![allow(dead_code)]

use netcheck::ctl::Formula;
use netcheck::model::{Edge, StateModel};
use netcheck::petri::QualifiedName;
use proptest::prelude::*;
use rand::Rng;

pub const ATOM_COMPONENT: &str = "m";

/// Random model with 1..=8 states, 0..=16 edges and 1..=3 propositions
/// `m.a0`, `m.a1`, `m.a2`.
pub fn random_model<R: Rng>(rng: &mut R) -> StateModel {
    let n = rng.gen_range(1..=8);
    let atoms = rng.gen_range(1..=3);
    let props = (0..atoms)
        .map(|i| QualifiedName::new(ATOM_COMPONENT, format!("a{i}")))
        .collect();
    let labels = (0..n)
        .map(|_| (0..atoms).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let edges = (0..rng.gen_range(0..=16))
        .map(|i| Edge {
            source: rng.gen_range(0..n),
            transition: format!("t{i}"),
            target: rng.gen_range(0..n),
        })
        .collect();
    StateModel::from_parts("m", props, labels, rng.gen_range(0..n), edges).unwrap()
}

/// Number of formula constructors: atom, deadlock, 4 boolean, 4 unary
/// temporal, 4 until.
pub const CONSTRUCTORS: usize = 14;

pub fn constructor_index(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) => 0,
        Formula::Deadlock => 1,
        Formula::Not(_) => 2,
        Formula::And(..) => 3,
        Formula::Or(..) => 4,
        Formula::Implies(..) => 5,
        Formula::ExistsNext(_) => 6,
        Formula::AllNext(_) => 7,
        Formula::ExistsFinally(_) => 8,
        Formula::AllGlobally(_) => 9,
        Formula::ExistsUntil(..) => 10,
        Formula::AllUntil(..) => 11,
        Formula::ExistsWeakUntil(..) => 12,
        Formula::AllWeakUntil(..) => 13,
    }
}

pub fn visit(f: &Formula, seen: &mut [bool; CONSTRUCTORS]) {
    seen[constructor_index(f)] = true;
    match f {
        Formula::Atom(_) | Formula::Deadlock => {}
        Formula::Not(g)
        | Formula::ExistsNext(g)
        | Formula::AllNext(g)
        | Formula::ExistsFinally(g)
        | Formula::AllGlobally(g) => visit(g, seen),
        Formula::And(g, h)
        | Formula::Or(g, h)
        | Formula::Implies(g, h)
        | Formula::ExistsUntil(g, h)
        | Formula::AllUntil(g, h)
        | Formula::ExistsWeakUntil(g, h)
        | Formula::AllWeakUntil(g, h) => {
            visit(g, seen);
            visit(h, seen);
        }
    }
}

/// Random formula of depth at most `depth` over `atoms` propositions of
/// component `m`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, atoms: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.85) {
            Formula::atom(ATOM_COMPONENT, &format!("a{}", rng.gen_range(0..atoms)))
        } else {
            Formula::Deadlock
        };
    }
    let mut sub = || random_formula(rng, depth - 1, atoms);
    let (f, g) = (sub(), sub());
    match rng.gen_range(0..12) {
        0 => Formula::not(f),
        1 => Formula::and(f, g),
        2 => Formula::or(f, g),
        3 => Formula::implies(f, g),
        4 => Formula::ex(f),
        5 => Formula::ax(f),
        6 => Formula::ef(f),
        7 => Formula::ag(f),
        8 => Formula::eu(f, g),
        9 => Formula::au(f, g),
        10 => Formula::ew(f, g),
        _ => Formula::aw(f, g),
    }
}

pub fn model_atoms(m: &StateModel) -> usize {
    m.props().len()
}

/// Proptest strategy over formulas, including atoms whose component names
/// collide with operator keywords.
pub fn arb_formula() -> impl Strategy<Value = Formula> {
    let component = prop::sample::select(vec!["m", "A", "E", "EX", "AG", "U", "W", "deadlock", "Seller"]);
    let place = prop::sample::select(vec!["p", "q", "S0", "U", "A", "r_1"]);
    let leaf = prop_oneof![
        5 => (component, place).prop_map(|(c, p)| Formula::atom(c, p)),
        1 => Just(Formula::Deadlock),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::ex),
            inner.clone().prop_map(Formula::ax),
            inner.clone().prop_map(Formula::ef),
            inner.clone().prop_map(Formula::ag),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::or(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::eu(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::au(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::ew(f, g)),
            (inner.clone(), inner).prop_map(|(f, g)| Formula::aw(f, g)),
        ]
    })
}
