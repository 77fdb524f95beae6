//! Reachability state models (Kripke structures) of nets.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::petri::{Marking, NetError, PetriNet, QualifiedName};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

pub type StateIdx = usize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: StateIdx,
    pub transition: String,
    pub target: StateIdx,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("state explosion: more than {limit} reachable states (explored {explored}, frontier {frontier})")]
    Explosion {
        limit: usize,
        explored: usize,
        frontier: usize,
    },
    #[error("invalid model: {0}")]
    Malformed(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Directed graph of states labeled by atomic propositions.
///
/// Propositions are qualified place names (`Seller.S0`); a state's label is
/// the set of propositions true in it. Edges carry the name of the fired
/// transition and are sorted by `(source, transition, target)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateModel {
    name: String,
    props: Vec<QualifiedName>,
    labels: Vec<FixedBitSet>,
    initial: StateIdx,
    edges: Vec<Edge>,
    /// Edge indices per source state.
    out: Vec<Vec<usize>>,
}

impl StateModel {
    /// Builds a model directly from its parts. Labels are indices into
    /// `props`. Unreachable states are allowed here.
    pub fn from_parts(
        name: impl Into<String>,
        props: Vec<QualifiedName>,
        labels: Vec<Vec<usize>>,
        initial: StateIdx,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        if n == 0 || initial >= n {
            return Err(ModelError::Malformed(format!(
                "initial state {initial} out of range for {n} states"
            )));
        }
        let labels = labels
            .into_iter()
            .map(|l| {
                let mut bits = FixedBitSet::with_capacity(props.len());
                for p in l {
                    if p >= props.len() {
                        return Err(ModelError::Malformed(format!("proposition index {p}")));
                    }
                    bits.insert(p);
                }
                Ok(bits)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(e) = edges.iter().find(|e| e.source >= n || e.target >= n) {
            return Err(ModelError::Malformed(format!(
                "edge {} -> {} out of range",
                e.source, e.target
            )));
        }
        Ok(Self::assemble(name.into(), props, labels, initial, edges))
    }

    fn assemble(
        name: String,
        props: Vec<QualifiedName>,
        labels: Vec<FixedBitSet>,
        initial: StateIdx,
        mut edges: Vec<Edge>,
    ) -> Self {
        edges.sort();
        edges.dedup();
        let mut out = vec![Vec::new(); labels.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        Self {
            name,
            props,
            labels,
            initial,
            edges,
            out,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn initial(&self) -> StateIdx {
        self.initial
    }

    pub fn props(&self) -> &[QualifiedName] {
        &self.props
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, s: StateIdx) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&i| &self.edges[i])
    }

    /// Distinct successor states of `s`, ascending.
    pub fn successors(&self, s: StateIdx) -> Vec<StateIdx> {
        let mut v: Vec<StateIdx> = self.out_edges(s).map(|e| e.target).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_deadlock(&self, s: StateIdx) -> bool {
        self.out[s].is_empty()
    }

    pub fn prop_index(&self, name: &QualifiedName) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn holds(&self, s: StateIdx, prop: usize) -> bool {
        self.labels[s].contains(prop)
    }

    /// Propositions true in `s`, in proposition order.
    pub fn label(&self, s: StateIdx) -> Vec<&QualifiedName> {
        self.labels[s].ones().map(|p| &self.props[p]).collect()
    }

    pub fn label_text(&self, s: StateIdx) -> String {
        let names: Vec<String> = self.label(s).iter().map(|p| p.to_string()).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Breadth-first reachability from the net's initial marking.
///
/// States are numbered in discovery order; successors are expanded in
/// transition-name order, so the result is fully deterministic.
pub fn build_model(net: &PetriNet, max_states: usize) -> Result<StateModel, ModelError> {
    let props: Vec<QualifiedName> = (0..net.places().len()).map(|p| net.place_id(p)).collect();
    let mut index: HashMap<Marking, StateIdx> = HashMap::new();
    let mut markings: Vec<Marking> = Vec::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();

    index.insert(net.initial().clone(), 0);
    markings.push(net.initial().clone());
    queue.push_back(0);

    while let Some(s) = queue.pop_front() {
        for (t, next) in net.successors(&markings[s])? {
            let target = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = markings.len();
                    if i >= max_states {
                        return Err(ModelError::Explosion {
                            limit: max_states,
                            explored: markings.len(),
                            frontier: queue.len() + 1,
                        });
                    }
                    index.insert(next.clone(), i);
                    markings.push(next);
                    queue.push_back(i);
                    i
                }
            };
            edges.push(Edge {
                source: s,
                transition: net.transition(t).name.clone(),
                target,
            });
        }
    }

    let labels = markings
        .into_iter()
        .map(|m| {
            let mut bits = m.bits().clone();
            bits.grow(props.len());
            bits
        })
        .collect();
    Ok(StateModel::assemble(
        net.name().to_string(),
        props,
        labels,
        0,
        edges,
    ))
}

/// States without outgoing edges.
pub fn deadlock_states(model: &StateModel) -> Vec<StateIdx> {
    (0..model.len()).filter(|&s| model.is_deadlock(s)).collect()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Nodes are `s<i>` labeled with their marked places;
/// the initial state is drawn with a double border.
pub fn export_dot(model: &StateModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(model.name()));
    let _ = writeln!(out, "  node [shape=box];");
    for s in 0..model.len() {
        let names: Vec<String> = model.label(s).iter().map(|p| p.to_string()).collect();
        let extra = if s == model.initial() {
            ", peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  s{s} [label=\"s{s}\\n{}\"{extra}];",
            dot_escape(&names.join(", "))
        );
    }
    for e in model.edges() {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"];",
            e.source,
            e.target,
            dot_escape(&e.transition)
        );
    }
    out.push_str("}\n");
    out
}
