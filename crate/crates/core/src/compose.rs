//! Event-synchronized composition of component nets.
//!
//! Each event of a [`SyncSpec`] fuses one transition from every component
//! that maps it into a single transition whose pre/post sets are the unions
//! of its constituents'. Component transitions that no event targets are
//! carried over unchanged. Places are qualified by their component name.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::petri::{is_ident, NetDecl, NetError, PetriNet, TransIdx, TransitionDecl, ValidationReport};

/// One synchronization event and the transition it selects in each
/// participating component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub name: String,
    /// `(component net, transition)` pairs, in declaration order.
    pub mappings: Vec<(String, String)>,
}

impl Event {
    pub fn new<I, A, B>(name: impl Into<String>, mappings: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        Self {
            name: name.into(),
            mappings: mappings
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }
}

/// Event set plus the per-component partial maps event → transition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyncSpec {
    pub events: Vec<Event>,
}

impl SyncSpec {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events }
    }

    /// The partial map of one component: event → transition.
    pub fn map_of(&self, component: &str) -> BTreeMap<&str, &str> {
        self.events
            .iter()
            .flat_map(|e| {
                e.mappings
                    .iter()
                    .filter(move |(c, _)| c == component)
                    .map(move |(_, t)| (e.name.as_str(), t.as_str()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyncViolation {
    #[error("component net name `{0}` is used twice")]
    DuplicateComponent(String),
    #[error("component net `{0}` uses qualified (dotted) names; only raw component nets can be composed")]
    QualifiedComponent(String),
    #[error("invalid event name `{0}`")]
    InvalidEventName(String),
    #[error("event `{0}` is declared twice")]
    DuplicateEvent(String),
    #[error("event `{event}` refers to unknown component `{component}`")]
    UnknownComponent { event: String, component: String },
    #[error("event `{event}` maps component `{component}` more than once")]
    DuplicateMapping { event: String, component: String },
    #[error("event `{event}` refers to unknown transition `{transition}` of `{component}`")]
    UnknownTransition {
        event: String,
        component: String,
        transition: String,
    },
    #[error("event `{event}` targets unlabeled transition `{transition}` of `{component}`")]
    UnlabeledTransition {
        event: String,
        component: String,
        transition: String,
    },
    #[error("event `{event}` is mapped in {count} component(s); it needs at least two to synchronize anything")]
    Unsynchronizable { event: String, count: usize },
}

/// Reports every problem that would make `compose` ill-defined.
pub fn validate_sync(nets: &[PetriNet], spec: &SyncSpec) -> ValidationReport<SyncViolation> {
    let mut violations = Vec::new();
    let mut by_name: BTreeMap<&str, &PetriNet> = BTreeMap::new();
    for net in nets {
        if by_name.insert(net.name(), net).is_some() {
            violations.push(SyncViolation::DuplicateComponent(net.name().to_string()));
        }
        let qualified = net.places().iter().any(|p| p.contains('.'))
            || net.transitions().iter().any(|t| t.name.contains('.'));
        if qualified {
            violations.push(SyncViolation::QualifiedComponent(net.name().to_string()));
        }
    }

    let mut events = BTreeSet::new();
    for e in &spec.events {
        if !is_ident(&e.name) {
            violations.push(SyncViolation::InvalidEventName(e.name.clone()));
        }
        if !events.insert(e.name.as_str()) {
            violations.push(SyncViolation::DuplicateEvent(e.name.clone()));
        }
        let mut components = BTreeSet::new();
        for (component, transition) in &e.mappings {
            if !components.insert(component.as_str()) {
                violations.push(SyncViolation::DuplicateMapping {
                    event: e.name.clone(),
                    component: component.clone(),
                });
                continue;
            }
            let Some(net) = by_name.get(component.as_str()) else {
                violations.push(SyncViolation::UnknownComponent {
                    event: e.name.clone(),
                    component: component.clone(),
                });
                continue;
            };
            match net.transition_index(transition) {
                None => violations.push(SyncViolation::UnknownTransition {
                    event: e.name.clone(),
                    component: component.clone(),
                    transition: transition.clone(),
                }),
                Some(t) if net.transition(t).label.is_none() => {
                    violations.push(SyncViolation::UnlabeledTransition {
                        event: e.name.clone(),
                        component: component.clone(),
                        transition: transition.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        if components.len() < 2 {
            violations.push(SyncViolation::Unsynchronizable {
                event: e.name.clone(),
                count: components.len(),
            });
        }
    }
    ValidationReport { violations }
}

/// Provenance of a transition of a composed net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    CarriedOver {
        component: String,
        transition: String,
    },
    /// Constituents sorted by component name.
    Synchronized {
        event: String,
        parts: Vec<(String, String)>,
    },
}

/// Output of [`compose`]: the net plus one [`Origin`] per transition,
/// indexed like `net.transitions()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedNet {
    pub net: PetriNet,
    pub origins: Vec<Origin>,
}

impl ComposedNet {
    pub fn origin(&self, t: TransIdx) -> &Origin {
        &self.origins[t.0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("nothing to compose")]
    NoNets,
    #[error("invalid synchronization:\n{0}")]
    Invalid(ValidationReport<SyncViolation>),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Name given to the composed net: component names, sorted, joined by `_`.
pub fn composed_name(nets: &[PetriNet]) -> String {
    let mut names: Vec<&str> = nets.iter().map(|n| n.name()).collect();
    names.sort_unstable();
    names.join("_")
}

fn qualify(component: &str, local: &str) -> String {
    format!("{component}.{local}")
}

/// Composes `nets` under `spec`.
///
/// Synchronized transitions are named after their event; carried-over ones
/// keep their component-qualified name (`B.b2`).
pub fn compose(nets: &[PetriNet], spec: &SyncSpec) -> Result<ComposedNet, ComposeError> {
    if nets.is_empty() {
        return Err(ComposeError::NoNets);
    }
    let report = validate_sync(nets, spec);
    if !report.is_empty() {
        return Err(ComposeError::Invalid(report));
    }

    let mut sorted: Vec<&PetriNet> = nets.iter().collect();
    sorted.sort_by(|a, b| a.name().cmp(b.name()));
    let by_name: BTreeMap<&str, &PetriNet> = sorted.iter().map(|n| (n.name(), *n)).collect();

    let mut decl = NetDecl::new(composed_name(nets));
    for net in &sorted {
        for (i, p) in net.places().iter().enumerate() {
            decl.places
                .push((qualify(net.name(), p), net.initial().is_marked(i)));
        }
    }

    let targeted: BTreeSet<(&str, &str)> = spec
        .events
        .iter()
        .flat_map(|e| e.mappings.iter().map(|(c, t)| (c.as_str(), t.as_str())))
        .collect();

    let mut origins: BTreeMap<String, Origin> = BTreeMap::new();
    for net in &sorted {
        for t in net.transitions() {
            if targeted.contains(&(net.name(), t.name.as_str())) {
                continue;
            }
            let name = qualify(net.name(), &t.name);
            let places = |ps: &[usize]| {
                ps.iter()
                    .map(|&p| qualify(net.name(), &net.places()[p]))
                    .collect::<Vec<_>>()
            };
            decl.transitions.push(TransitionDecl {
                name: name.clone(),
                label: t.label.clone(),
                pre: places(&t.pre),
                post: places(&t.post),
            });
            origins.insert(
                name,
                Origin::CarriedOver {
                    component: net.name().to_string(),
                    transition: t.name.clone(),
                },
            );
        }
    }

    for e in &spec.events {
        let mut parts: Vec<(String, String)> = e.mappings.clone();
        parts.sort();
        let mut pre = BTreeSet::new();
        let mut post = BTreeSet::new();
        for (component, transition) in &parts {
            let net = by_name[component.as_str()];
            let t = net.transition(net.transition_index(transition).expect("validated"));
            pre.extend(t.pre.iter().map(|&p| qualify(component, &net.places()[p])));
            post.extend(t.post.iter().map(|&p| qualify(component, &net.places()[p])));
        }
        decl.transitions.push(TransitionDecl {
            name: e.name.clone(),
            label: None,
            pre: pre.into_iter().collect(),
            post: post.into_iter().collect(),
        });
        origins.insert(
            e.name.clone(),
            Origin::Synchronized {
                event: e.name.clone(),
                parts,
            },
        );
    }

    let net = decl.build()?;
    let origins = net
        .transitions()
        .iter()
        .map(|t| origins.remove(&t.name).expect("every transition has an origin"))
        .collect();
    Ok(ComposedNet { net, origins })
}
