//! Explicit-state CTL evaluation by fixpoint iteration, with witness and
//! counterexample traces.
//!
//! The model may contain dead-end states. Paths are maximal: they are either
//! infinite or end in a dead-end. The characterizations used:
//!
//! | formula      | fixpoint                                            |
//! |--------------|-----------------------------------------------------|
//! | `EX f`       | `pre_E(f)`                                          |
//! | `AX f`       | `pre_A(f)` (true at dead-ends)                      |
//! | `EF f`       | `μZ. f ∪ pre_E(Z)`                                  |
//! | `AG f`       | `νZ. f ∩ pre_A(Z)`                                  |
//! | `E[f U g]`   | `μZ. g ∪ (f ∩ pre_E(Z))`                            |
//! | `A[f U g]`   | `μZ. g ∪ (f ∩ live ∩ pre_A(Z))`                     |
//! | `E[f W g]`   | `νZ. g ∪ (f ∩ (pre_E(Z) ∪ dead))`                   |
//! | `A[f W g]`   | `νZ. g ∪ (f ∩ pre_A(Z))`                            |
//!
//! where `live` are states with a successor and `dead` the rest.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::ctl::{Atom, Formula};
use crate::model::{StateIdx, StateModel};
use crate::petri::QualifiedName;

/// Set of states of one model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        Self(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self(bits)
    }

    pub fn from_states(n: usize, states: impl IntoIterator<Item = StateIdx>) -> Self {
        let mut s = Self::empty(n);
        for i in states {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, s: StateIdx) {
        self.0.insert(s);
    }

    pub fn contains(&self, s: StateIdx) -> bool {
        self.0.contains(s)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateIdx> + '_ {
        self.0.ones()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        StateSet(bits)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        StateSet(bits)
    }

    pub fn complement(&self) -> StateSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        StateSet(bits)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|s| format!("s{s}")).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("atom `{0}` does not name a place of the model")]
    UnresolvedAtom(Atom),
    #[error("model has {states} states; the path-enumeration oracle is limited to {bound}")]
    OracleBound { states: usize, bound: usize },
}

/// `{ s | some successor of s is in z }`
pub fn pre_exists(model: &StateModel, z: &StateSet) -> StateSet {
    let mut out = StateSet::empty(model.len());
    for e in model.edges() {
        if z.contains(e.target) {
            out.insert(e.source);
        }
    }
    out
}

/// `{ s | every successor of s is in z }`; includes dead-end states.
pub fn pre_forall(model: &StateModel, z: &StateSet) -> StateSet {
    let mut out = StateSet::full(model.len());
    for e in model.edges() {
        if !z.contains(e.target) {
            out.0.set(e.source, false);
        }
    }
    out
}

/// States with no successors, as a set.
pub fn deadlocks(model: &StateModel) -> StateSet {
    StateSet::from_states(model.len(), (0..model.len()).filter(|&s| model.is_deadlock(s)))
}

/// Resolves an atom to a proposition of the model. `Comp.place` matches the
/// proposition of that name; for a raw (uncomposed) net `Net.place` also
/// works, since its places are qualified by the net name.
pub fn resolve_atom(model: &StateModel, atom: &Atom) -> Option<usize> {
    model.prop_index(&QualifiedName::new(&atom.component, &atom.place))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixpointKind {
    Least,
    Greatest,
}

/// Every iterate of one fixpoint computation, starting with the seed
/// (empty for least, full for greatest) and ending with the fixpoint.
#[derive(Debug, Clone)]
pub struct FixpointRun {
    pub kind: FixpointKind,
    pub iterates: Vec<StateSet>,
}

impl FixpointRun {
    /// Number of applications of the step function.
    pub fn rounds(&self) -> usize {
        self.iterates.len() - 1
    }
}

struct Evaluator<'m> {
    model: &'m StateModel,
    live: StateSet,
    dead: StateSet,
    log: Option<Vec<FixpointRun>>,
}

impl<'m> Evaluator<'m> {
    fn new(model: &'m StateModel, record: bool) -> Self {
        let dead = deadlocks(model);
        Self {
            model,
            live: dead.complement(),
            dead,
            log: record.then(Vec::new),
        }
    }

    fn fixpoint(&mut self, kind: FixpointKind, step: impl Fn(&StateSet) -> StateSet) -> StateSet {
        let n = self.model.len();
        let mut z = match kind {
            FixpointKind::Least => StateSet::empty(n),
            FixpointKind::Greatest => StateSet::full(n),
        };
        let mut iterates = vec![z.clone()];
        loop {
            let next = step(&z);
            let done = next == z;
            if self.log.is_some() {
                iterates.push(next.clone());
            }
            z = next;
            if done {
                break;
            }
        }
        if let Some(log) = &mut self.log {
            log.push(FixpointRun { kind, iterates });
        }
        z
    }

    fn sat(&mut self, f: &Formula) -> Result<StateSet, CheckError> {
        let m = self.model;
        let n = m.len();
        Ok(match f {
            Formula::Atom(a) => {
                let p = resolve_atom(m, a).ok_or_else(|| CheckError::UnresolvedAtom(a.clone()))?;
                StateSet::from_states(n, (0..n).filter(|&s| m.holds(s, p)))
            }
            Formula::Deadlock => self.dead.clone(),
            Formula::Not(f) => self.sat(f)?.complement(),
            Formula::And(f, g) => self.sat(f)?.intersection(&self.sat(g)?),
            Formula::Or(f, g) => self.sat(f)?.union(&self.sat(g)?),
            Formula::Implies(f, g) => self.sat(f)?.complement().union(&self.sat(g)?),
            Formula::ExistsNext(f) => pre_exists(m, &self.sat(f)?),
            Formula::AllNext(f) => pre_forall(m, &self.sat(f)?),
            Formula::ExistsFinally(f) => {
                let sf = self.sat(f)?;
                self.fixpoint(FixpointKind::Least, |z| sf.union(&pre_exists(m, z)))
            }
            Formula::AllGlobally(f) => {
                let sf = self.sat(f)?;
                self.fixpoint(FixpointKind::Greatest, |z| sf.intersection(&pre_forall(m, z)))
            }
            Formula::ExistsUntil(f, g) => {
                let (sf, sg) = (self.sat(f)?, self.sat(g)?);
                self.fixpoint(FixpointKind::Least, |z| {
                    sg.union(&sf.intersection(&pre_exists(m, z)))
                })
            }
            Formula::AllUntil(f, g) => {
                let (sf, sg) = (self.sat(f)?, self.sat(g)?);
                let guard = sf.intersection(&self.live);
                self.fixpoint(FixpointKind::Least, |z| {
                    sg.union(&guard.intersection(&pre_forall(m, z)))
                })
            }
            Formula::ExistsWeakUntil(f, g) => {
                let (sf, sg) = (self.sat(f)?, self.sat(g)?);
                let dead = self.dead.clone();
                self.fixpoint(FixpointKind::Greatest, |z| {
                    sg.union(&sf.intersection(&pre_exists(m, z).union(&dead)))
                })
            }
            Formula::AllWeakUntil(f, g) => {
                let (sf, sg) = (self.sat(f)?, self.sat(g)?);
                self.fixpoint(FixpointKind::Greatest, |z| {
                    sg.union(&sf.intersection(&pre_forall(m, z)))
                })
            }
        })
    }
}

/// Exact set of states satisfying `f`.
pub fn sat(model: &StateModel, f: &Formula) -> Result<StateSet, CheckError> {
    Evaluator::new(model, false).sat(f)
}

/// Like [`sat`], also returning every fixpoint computation performed, in
/// evaluation order.
pub fn sat_traced(
    model: &StateModel,
    f: &Formula,
) -> Result<(StateSet, Vec<FixpointRun>), CheckError> {
    let mut ev = Evaluator::new(model, true);
    let set = ev.sat(f)?;
    Ok((set, ev.log.unwrap_or_default()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Witness,
    Counterexample,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceKind::Witness => "witness",
            TraceKind::Counterexample => "counterexample",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub state: StateIdx,
    /// Transition fired to enter `state`; `None` for the first step.
    pub via: Option<String>,
}

/// Closing edge of a lasso: from the last step back to `steps[index]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopBack {
    pub index: usize,
    pub via: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub kind: TraceKind,
    pub steps: Vec<TraceStep>,
    pub loop_back: Option<LoopBack>,
}

impl Trace {
    pub fn states(&self) -> Vec<StateIdx> {
        self.steps.iter().map(|s| s.state).collect()
    }

    /// Human-readable rendering, one state per line.
    pub fn render(&self, model: &StateModel) -> String {
        let mut out = format!("{}:\n", self.kind);
        for (i, step) in self.steps.iter().enumerate() {
            let arrow = match &step.via {
                Some(t) => format!("--{t}--> "),
                None => String::new(),
            };
            out.push_str(&format!(
                "  {i}: {arrow}s{} {}\n",
                step.state,
                model.label_text(step.state)
            ));
        }
        if let Some(lb) = &self.loop_back {
            out.push_str(&format!(
                "  loop: --{}--> back to step {} (s{})\n",
                lb.via, lb.index, self.steps[lb.index].state
            ));
        } else if let Some(last) = self.steps.last() {
            if model.is_deadlock(last.state) {
                out.push_str("  dead end\n");
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub formula: Formula,
    pub satisfying: StateSet,
    pub holds_at_initial: bool,
    pub trace: Option<Trace>,
}

/// Evaluates `f` and explains the verdict at the initial state.
///
/// Witnesses are attached to holding `EX`/`EF`/`E[U]`/`E[W]` formulas and
/// counterexamples to failing `AX`/`AG`/`A[U]`/`A[W]` formulas. Paths to a
/// target are shortest (BFS); when several candidates tie, the lowest state
/// index wins.
pub fn check(model: &StateModel, f: &Formula) -> Result<CheckResult, CheckError> {
    let satisfying = sat(model, f)?;
    let init = model.initial();
    let holds = satisfying.contains(init);
    let tracer = Tracer { model };
    let trace = match (f, holds) {
        (Formula::ExistsNext(g), true) => {
            let sg = sat(model, g)?;
            Some(tracer.next_step(TraceKind::Witness, init, |s| sg.contains(s)))
        }
        (Formula::AllNext(g), false) => {
            let sg = sat(model, g)?;
            Some(tracer.next_step(TraceKind::Counterexample, init, |s| !sg.contains(s)))
        }
        (Formula::ExistsFinally(g), true) => {
            let sg = sat(model, g)?;
            let all = StateSet::full(model.len());
            tracer.shortest(TraceKind::Witness, init, &all, &sg)
        }
        (Formula::AllGlobally(g), false) => {
            let bad = sat(model, g)?.complement();
            let all = StateSet::full(model.len());
            tracer.shortest(TraceKind::Counterexample, init, &all, &bad)
        }
        (Formula::ExistsUntil(a, b), true) => {
            let (sa, sb) = (sat(model, a)?, sat(model, b)?);
            tracer.shortest(TraceKind::Witness, init, &sa, &sb)
        }
        (Formula::ExistsWeakUntil(a, b), true) => {
            let (sa, sb) = (sat(model, a)?, sat(model, b)?);
            match tracer.shortest(TraceKind::Witness, init, &sa, &sb) {
                Some(t) => Some(t),
                // No reachable g: stay inside the satisfying set until a
                // dead-end or a repeated state.
                None => Some(tracer.walk(TraceKind::Witness, init, |s| {
                    model.successors(s).into_iter().find(|&t| satisfying.contains(t))
                })),
            }
        }
        (Formula::AllUntil(a, _), false) => {
            let sa = sat(model, a)?;
            let outside = satisfying.complement();
            // Prefer a finite violation: a state where f fails, or a dead end.
            let target = StateSet::from_states(
                model.len(),
                outside
                    .iter()
                    .filter(|&s| !sa.contains(s) || model.is_deadlock(s)),
            );
            match tracer.shortest(TraceKind::Counterexample, init, &outside, &target) {
                Some(t) => Some(t),
                None => Some(tracer.walk(TraceKind::Counterexample, init, |s| {
                    model.successors(s).into_iter().find(|&t| !satisfying.contains(t))
                })),
            }
        }
        (Formula::AllWeakUntil(a, _), false) => {
            let sa = sat(model, a)?;
            let outside = satisfying.complement();
            let target = outside.intersection(&sa.complement());
            tracer.shortest(TraceKind::Counterexample, init, &outside, &target)
        }
        _ => None,
    };
    Ok(CheckResult {
        formula: f.clone(),
        satisfying,
        holds_at_initial: holds,
        trace,
    })
}

struct Tracer<'m> {
    model: &'m StateModel,
}

impl Tracer<'_> {
    fn edge_name(&self, from: StateIdx, to: StateIdx) -> String {
        self.model
            .out_edges(from)
            .find(|e| e.target == to)
            .map(|e| e.transition.clone())
            .expect("edge exists")
    }

    fn next_step(
        &self,
        kind: TraceKind,
        init: StateIdx,
        pick: impl Fn(StateIdx) -> bool,
    ) -> Trace {
        let mut steps = vec![TraceStep {
            state: init,
            via: None,
        }];
        if let Some(t) = self.model.successors(init).into_iter().find(|&t| pick(t)) {
            steps.push(TraceStep {
                state: t,
                via: Some(self.edge_name(init, t)),
            });
        }
        Trace {
            kind,
            steps,
            loop_back: None,
        }
    }

    /// Shortest path from `init` to a `target` state whose intermediate
    /// states all lie in `through`.
    fn shortest(
        &self,
        kind: TraceKind,
        init: StateIdx,
        through: &StateSet,
        target: &StateSet,
    ) -> Option<Trace> {
        let n = self.model.len();
        let mut parent: Vec<Option<StateIdx>> = vec![None; n];
        let mut seen = StateSet::empty(n);
        let mut queue = VecDeque::from([init]);
        seen.insert(init);
        let mut found = None;
        while let Some(s) = queue.pop_front() {
            if target.contains(s) {
                found = Some(s);
                break;
            }
            if !through.contains(s) {
                continue;
            }
            for t in self.model.successors(s) {
                if !seen.contains(t) {
                    seen.insert(t);
                    parent[t] = Some(s);
                    queue.push_back(t);
                }
            }
        }
        let mut path = vec![found?];
        while let Some(p) = parent[*path.last().unwrap()] {
            path.push(p);
        }
        path.reverse();
        Some(self.to_trace(kind, &path, None))
    }

    /// Follows `next` from `init` until it returns `None` or a state repeats.
    fn walk(
        &self,
        kind: TraceKind,
        init: StateIdx,
        next: impl Fn(StateIdx) -> Option<StateIdx>,
    ) -> Trace {
        let mut path = vec![init];
        loop {
            let cur = *path.last().unwrap();
            match next(cur) {
                None => return self.to_trace(kind, &path, None),
                Some(t) => match path.iter().position(|&s| s == t) {
                    Some(i) => return self.to_trace(kind, &path, Some(i)),
                    None => path.push(t),
                },
            }
        }
    }

    fn to_trace(&self, kind: TraceKind, path: &[StateIdx], loop_to: Option<usize>) -> Trace {
        let steps = path
            .iter()
            .enumerate()
            .map(|(i, &s)| TraceStep {
                state: s,
                via: (i > 0).then(|| self.edge_name(path[i - 1], s)),
            })
            .collect();
        let loop_back = loop_to.map(|i| LoopBack {
            index: i,
            via: self.edge_name(*path.last().unwrap(), path[i]),
        });
        Trace {
            kind,
            steps,
            loop_back,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;

    /// A(q) -> B(q), A -> C(r), B -> B, B -> C; C is a dead end.
    fn fig10() -> StateModel {
        let props = vec![QualifiedName::new("x", "q"), QualifiedName::new("x", "r")];
        let e = |s, t, name: &str| Edge {
            source: s,
            transition: name.into(),
            target: t,
        };
        StateModel::from_parts(
            "x",
            props,
            vec![vec![0], vec![0], vec![1]],
            0,
            vec![e(0, 1, "ab"), e(0, 2, "ac"), e(1, 1, "bb"), e(1, 2, "bc")],
        )
        .unwrap()
    }

    fn q() -> Formula {
        Formula::atom("x", "q")
    }
    fn r() -> Formula {
        Formula::atom("x", "r")
    }

    #[test]
    fn predecessor_sets() {
        let m = fig10();
        let c = StateSet::from_states(3, [2]);
        assert!(pre_exists(&m, &StateSet::empty(3)).is_empty());
        assert_eq!(pre_exists(&m, &c), StateSet::from_states(3, [0, 1]));
        assert_eq!(pre_forall(&m, &c), StateSet::from_states(3, [2]));
        assert_eq!(pre_forall(&m, &StateSet::full(3)), StateSet::full(3));
    }

    #[test]
    fn until_triptych() {
        let m = fig10();
        assert!(sat(&m, &Formula::aw(q(), r())).unwrap().contains(0));
        assert!(!sat(&m, &Formula::au(q(), r())).unwrap().contains(0));
        assert!(sat(&m, &Formula::eu(q(), r())).unwrap().contains(0));
        assert!(sat(&m, &Formula::ew(q(), r())).unwrap().contains(0));
    }

    #[test]
    fn excluded_middle() {
        let m = fig10();
        let f = Formula::or(Formula::ef(r()), Formula::not(Formula::ef(r())));
        assert_eq!(sat(&m, &f).unwrap(), StateSet::full(3));
    }

    #[test]
    fn unresolved_atom() {
        let m = fig10();
        assert_eq!(
            sat(&m, &Formula::atom("x", "zz")),
            Err(CheckError::UnresolvedAtom(Atom::new("x", "zz")))
        );
    }

    #[test]
    fn strong_until_counterexample_is_lasso() {
        let m = fig10();
        let res = check(&m, &Formula::au(q(), r())).unwrap();
        assert!(!res.holds_at_initial);
        let t = res.trace.unwrap();
        assert_eq!(t.kind, TraceKind::Counterexample);
        assert_eq!(t.states(), vec![0, 1]);
        assert_eq!(
            t.loop_back,
            Some(LoopBack {
                index: 1,
                via: "bb".into()
            })
        );
    }

    #[test]
    fn reflexive_ef_witness_has_length_zero() {
        let m = fig10();
        let t = check(&m, &Formula::ef(q())).unwrap().trace.unwrap();
        assert_eq!(t.states(), vec![0]);
        assert_eq!(t.kind, TraceKind::Witness);
    }

    #[test]
    fn traces_for_other_operators() {
        let m = fig10();
        let t = check(&m, &Formula::ex(r())).unwrap().trace.unwrap();
        assert_eq!(t.states(), vec![0, 2]);
        assert_eq!(t.steps[1].via.as_deref(), Some("ac"));

        let res = check(&m, &Formula::ag(q())).unwrap();
        assert!(!res.holds_at_initial);
        assert_eq!(res.trace.unwrap().states(), vec![0, 2]);

        let res = check(&m, &Formula::ax(q())).unwrap();
        assert_eq!(res.trace.unwrap().states(), vec![0, 2]);

        let t = check(&m, &Formula::eu(q(), r())).unwrap().trace.unwrap();
        assert_eq!(t.states(), vec![0, 2]);

        // E[q W false]: stay in q forever via the B self-loop.
        let never = Formula::and(r(), Formula::not(r()));
        let t = check(&m, &Formula::ew(q(), never.clone())).unwrap().trace.unwrap();
        assert_eq!(t.states(), vec![0, 1]);
        assert_eq!(t.loop_back.as_ref().map(|l| l.index), Some(1));

        // A[q W false] fails via A -> C where q is false.
        let res = check(&m, &Formula::aw(q(), never)).unwrap();
        assert_eq!(res.trace.unwrap().states(), vec![0, 2]);
    }

    #[test]
    fn fixpoint_log_is_recorded() {
        let m = fig10();
        let (set, runs) = sat_traced(&m, &Formula::ef(r())).unwrap();
        assert_eq!(set, StateSet::full(3));
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].kind, FixpointKind::Least);
        assert!(runs[0].rounds() <= m.len() + 1);
    }
}
