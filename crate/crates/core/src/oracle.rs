//! Reference evaluator that decides CTL formulas straight from maximal-path
//! semantics, by enumerating paths. Exponential; for cross-checking
//! [`crate::check::sat`] on small models only.
//!
//! From each state, a depth-first search extends a simple path until it
//! reaches a dead-end or a successor already on the path. Each such prefix
//! stands for one maximal path (finite, or a lasso whose loop states are
//! already in the prefix). Every maximal path's until-verdict is realised by
//! one of these prefixes, so quantifying over them is exact.

use crate::check::{resolve_atom, CheckError, StateSet};
use crate::ctl::Formula;
use crate::model::{StateIdx, StateModel};

pub const DEFAULT_ORACLE_BOUND: usize = 12;

/// Maximal-path prefixes from every state, computed once per model.
pub struct PathOracle<'m> {
    model: &'m StateModel,
    paths: Vec<Vec<Vec<StateIdx>>>,
}

impl<'m> PathOracle<'m> {
    pub fn new(model: &'m StateModel, bound: usize) -> Result<Self, CheckError> {
        if model.len() > bound {
            return Err(CheckError::OracleBound {
                states: model.len(),
                bound,
            });
        }
        let paths = (0..model.len())
            .map(|s| {
                let mut acc = Vec::new();
                let mut stack = vec![s];
                enumerate(model, &mut stack, &mut acc);
                acc
            })
            .collect();
        Ok(Self { model, paths })
    }

    /// Maximal-path prefixes starting at `s`.
    pub fn paths_from(&self, s: StateIdx) -> &[Vec<StateIdx>] {
        &self.paths[s]
    }

    pub fn sat(&self, f: &Formula) -> Result<StateSet, CheckError> {
        let m = self.model;
        let n = m.len();
        let states = 0..n;
        let set = |pred: &dyn Fn(StateIdx) -> bool| {
            StateSet::from_states(n, states.clone().filter(|&s| pred(s)))
        };
        Ok(match f {
            Formula::Atom(a) => {
                let p = resolve_atom(m, a).ok_or_else(|| CheckError::UnresolvedAtom(a.clone()))?;
                set(&|s| m.holds(s, p))
            }
            Formula::Deadlock => set(&|s| m.edges().iter().all(|e| e.source != s)),
            Formula::Not(f) => {
                let a = self.sat(f)?;
                set(&|s| !a.contains(s))
            }
            Formula::And(f, g) => {
                let (a, b) = (self.sat(f)?, self.sat(g)?);
                set(&|s| a.contains(s) && b.contains(s))
            }
            Formula::Or(f, g) => {
                let (a, b) = (self.sat(f)?, self.sat(g)?);
                set(&|s| a.contains(s) || b.contains(s))
            }
            Formula::Implies(f, g) => {
                let (a, b) = (self.sat(f)?, self.sat(g)?);
                set(&|s| !a.contains(s) || b.contains(s))
            }
            Formula::ExistsNext(f) => {
                let a = self.sat(f)?;
                set(&|s| m.edges().iter().any(|e| e.source == s && a.contains(e.target)))
            }
            Formula::AllNext(f) => {
                let a = self.sat(f)?;
                set(&|s| m.edges().iter().all(|e| e.source != s || a.contains(e.target)))
            }
            Formula::ExistsFinally(f) => {
                let a = self.sat(f)?;
                set(&|s| self.paths[s].iter().any(|p| p.iter().any(|&x| a.contains(x))))
            }
            Formula::AllGlobally(f) => {
                let a = self.sat(f)?;
                set(&|s| self.paths[s].iter().all(|p| p.iter().all(|&x| a.contains(x))))
            }
            Formula::ExistsUntil(lhs, rhs)
            | Formula::AllUntil(lhs, rhs)
            | Formula::ExistsWeakUntil(lhs, rhs)
            | Formula::AllWeakUntil(lhs, rhs) => {
                let (a, b) = (self.sat(lhs)?, self.sat(rhs)?);
                let strong = matches!(f, Formula::ExistsUntil(..) | Formula::AllUntil(..));
                let exists = matches!(f, Formula::ExistsUntil(..) | Formula::ExistsWeakUntil(..));
                let holds = |p: &Vec<StateIdx>| until_on_path(p, &a, &b, strong);
                set(&|s| {
                    if exists {
                        self.paths[s].iter().any(holds)
                    } else {
                        self.paths[s].iter().all(holds)
                    }
                })
            }
        })
    }
}

/// Decides `f U g` (or `f W g` when `!strong`) on the maximal path
/// represented by `path`. The first `g` state, if any, lies in the prefix;
/// without one, only the weak variant can hold, and only if `f` holds at
/// every state of the prefix (which covers any loop).
fn until_on_path(path: &[StateIdx], f: &StateSet, g: &StateSet, strong: bool) -> bool {
    for &s in path {
        if g.contains(s) {
            return true;
        }
        if !f.contains(s) {
            return false;
        }
    }
    !strong
}

fn enumerate(model: &StateModel, stack: &mut Vec<StateIdx>, acc: &mut Vec<Vec<StateIdx>>) {
    let top = *stack.last().unwrap();
    let succ = model.successors(top);
    if succ.is_empty() {
        acc.push(stack.clone());
        return;
    }
    let mut closed = false;
    for t in succ {
        if stack.contains(&t) {
            // Several back-edges give the same state sequence.
            if !closed {
                acc.push(stack.clone());
                closed = true;
            }
        } else {
            stack.push(t);
            enumerate(model, stack, acc);
            stack.pop();
        }
    }
}

/// Evaluates `f` by path enumeration. Fails if the model has more than
/// [`DEFAULT_ORACLE_BOUND`] states.
pub fn oracle_sat(model: &StateModel, f: &Formula) -> Result<StateSet, CheckError> {
    PathOracle::new(model, DEFAULT_ORACLE_BOUND)?.sat(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::sat;
    use crate::model::Edge;
    use crate::petri::QualifiedName;

    fn fig10() -> StateModel {
        let props = vec![QualifiedName::new("x", "q"), QualifiedName::new("x", "r")];
        let e = |s, t| Edge {
            source: s,
            transition: format!("t{s}{t}"),
            target: t,
        };
        StateModel::from_parts(
            "x",
            props,
            vec![vec![0], vec![0], vec![1]],
            0,
            vec![e(0, 1), e(0, 2), e(1, 1), e(1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn fig10_paths() {
        let m = fig10();
        let o = PathOracle::new(&m, DEFAULT_ORACLE_BOUND).unwrap();
        assert_eq!(o.paths_from(0), &[vec![0, 1], vec![0, 1, 2], vec![0, 2]]);
        assert_eq!(o.paths_from(2), &[vec![2]]);
    }

    #[test]
    fn agrees_on_fig10_untils() {
        let m = fig10();
        let (q, r) = (Formula::atom("x", "q"), Formula::atom("x", "r"));
        for f in [
            Formula::au(q.clone(), r.clone()),
            Formula::aw(q.clone(), r.clone()),
            Formula::eu(q.clone(), r.clone()),
            Formula::ew(q, r),
        ] {
            assert_eq!(oracle_sat(&m, &f).unwrap(), sat(&m, &f).unwrap(), "{f}");
        }
    }

    #[test]
    fn vacuous_next_on_dead_end() {
        let m = StateModel::from_parts("m", vec![QualifiedName::new("m", "p")], vec![vec![0]], 0, vec![])
            .unwrap();
        let p = Formula::atom("m", "p");
        let ex = oracle_sat(&m, &Formula::ex(p.clone())).unwrap();
        let ax = oracle_sat(&m, &Formula::ax(p.clone())).unwrap();
        assert!(!ex.contains(0));
        assert!(ax.contains(0));
        assert_eq!(ex, sat(&m, &Formula::ex(p.clone())).unwrap());
        assert_eq!(ax, sat(&m, &Formula::ax(p)).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let labels = vec![vec![]; 13];
        let m = StateModel::from_parts("m", vec![], labels, 0, vec![]).unwrap();
        assert!(matches!(
            oracle_sat(&m, &Formula::Deadlock),
            Err(CheckError::OracleBound { states: 13, bound: 12 })
        ));
    }
}
