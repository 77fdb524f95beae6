//! Petri nets with boolean (set-valued) markings and the interleaving token game.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Component-qualified identifier of a place or transition.
///
/// Names declared in a raw component net are qualified by the net's own
/// name. Names in a composed net already carry their component
/// (`Seller.S0`) and are split at the dot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName {
    pub component: String,
    pub local: String,
}

impl QualifiedName {
    pub fn new(component: impl Into<String>, local: impl Into<String>) -> Self {
        Self {
            component: component.into(),
            local: local.into(),
        }
    }

    /// Qualifies `name` as declared inside the net called `net`.
    pub fn resolve(net: &str, name: &str) -> Self {
        match name.split_once('.') {
            Some((component, local)) => Self::new(component, local),
            None => Self::new(net, name),
        }
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.local)
    }
}

/// Index of a place within its net.
pub type PlaceIdx = usize;

/// Index of a transition within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransIdx(pub usize);

/// Unvalidated transition declaration, referencing places by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDecl {
    pub name: String,
    pub label: Option<String>,
    pub pre: Vec<String>,
    pub post: Vec<String>,
}

impl TransitionDecl {
    pub fn new<I, J, S, T>(name: impl Into<String>, pre: I, post: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        Self {
            name: name.into(),
            label: None,
            pre: pre.into_iter().map(Into::into).collect(),
            post: post.into_iter().map(Into::into).collect(),
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Unvalidated net description as written by a user or a file.
///
/// `PetriNet::from_decl` turns this into an indexed, name-sorted net once
/// `validate_net` reports no violations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NetDecl {
    pub name: String,
    /// Places in declaration order with their initial-marking flag.
    pub places: Vec<(String, bool)>,
    pub transitions: Vec<TransitionDecl>,
}

impl NetDecl {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn place(mut self, name: impl Into<String>, initially_marked: bool) -> Self {
        self.places.push((name.into(), initially_marked));
        self
    }

    pub fn transition(mut self, t: TransitionDecl) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn build(&self) -> Result<PetriNet, NetError> {
        PetriNet::from_decl(self)
    }
}

/// A single invariant violation found by [`validate_net`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetViolation {
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("transition `{transition}` references undeclared place `{place}`")]
    DanglingPlace { transition: String, place: String },
    #[error("transition `{transition}` lists place `{place}` twice in one arc set")]
    RepeatedArc { transition: String, place: String },
}

/// List of violations; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl<V: fmt::Display> fmt::Display for ValidationReport<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("invalid net:\n{0}")]
    Invalid(ValidationReport<NetViolation>),
    #[error("marking refers to place index {0}, which is not a place of this net")]
    ForeignPlace(PlaceIdx),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
}

/// Plain identifier: `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Plain identifier or `Component.Local`.
pub fn is_net_name(s: &str) -> bool {
    match s.split_once('.') {
        Some((a, b)) => is_ident(a) && is_ident(b),
        None => is_ident(s),
    }
}

/// Reports every invariant violation of a net declaration.
pub fn validate_net(decl: &NetDecl) -> ValidationReport<NetViolation> {
    let mut violations = Vec::new();
    if !is_ident(&decl.name) {
        violations.push(NetViolation::InvalidName(decl.name.clone()));
    }

    let mut places = BTreeSet::new();
    for (p, _) in &decl.places {
        if !is_net_name(p) {
            violations.push(NetViolation::InvalidName(p.clone()));
        }
        if !places.insert(p.as_str()) {
            violations.push(NetViolation::DuplicatePlace(p.clone()));
        }
    }

    let mut transitions = BTreeSet::new();
    for t in &decl.transitions {
        if !is_net_name(&t.name) {
            violations.push(NetViolation::InvalidName(t.name.clone()));
        }
        if let Some(label) = &t.label {
            if !is_ident(label) {
                violations.push(NetViolation::InvalidName(label.clone()));
            }
        }
        if !transitions.insert(t.name.as_str()) {
            violations.push(NetViolation::DuplicateTransition(t.name.clone()));
        }
        for arcs in [&t.pre, &t.post] {
            let mut seen = BTreeSet::new();
            for p in arcs {
                if !places.contains(p.as_str()) {
                    violations.push(NetViolation::DanglingPlace {
                        transition: t.name.clone(),
                        place: p.clone(),
                    });
                }
                if !seen.insert(p.as_str()) {
                    violations.push(NetViolation::RepeatedArc {
                        transition: t.name.clone(),
                        place: p.clone(),
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Set of marked places of one net.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(FixedBitSet);

impl Marking {
    pub fn empty(places: usize) -> Self {
        Self(FixedBitSet::with_capacity(places))
    }

    pub fn from_indices(places: usize, marked: impl IntoIterator<Item = PlaceIdx>) -> Self {
        let mut bits = FixedBitSet::with_capacity(places);
        for p in marked {
            bits.grow(p + 1);
            bits.insert(p);
        }
        Self(bits)
    }

    pub fn is_marked(&self, p: PlaceIdx) -> bool {
        self.0.contains(p)
    }

    pub fn marked(&self) -> impl Iterator<Item = PlaceIdx> + '_ {
        self.0.ones()
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_subset(&self, other: &Marking) -> bool {
        self.0.is_subset(&other.0)
    }

    pub(crate) fn bits(&self) -> &FixedBitSet {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub label: Option<String>,
    /// Sorted place indices.
    pub pre: Vec<PlaceIdx>,
    /// Sorted place indices.
    pub post: Vec<PlaceIdx>,
}

/// A validated net. Places and transitions are stored name-sorted, so
/// indices and every iteration order are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    name: String,
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Marking,
}

impl PetriNet {
    pub fn from_decl(decl: &NetDecl) -> Result<Self, NetError> {
        let report = validate_net(decl);
        if !report.is_empty() {
            return Err(NetError::Invalid(report));
        }
        let mut places: Vec<String> = decl.places.iter().map(|(p, _)| p.clone()).collect();
        places.sort();
        let index = |p: &str| places.binary_search_by(|q| q.as_str().cmp(p)).unwrap();
        let resolve = |names: &[String]| {
            let mut idx: Vec<PlaceIdx> = names.iter().map(|p| index(p)).collect();
            idx.sort_unstable();
            idx
        };
        let mut transitions: Vec<Transition> = decl
            .transitions
            .iter()
            .map(|t| Transition {
                name: t.name.clone(),
                label: t.label.clone(),
                pre: resolve(&t.pre),
                post: resolve(&t.post),
            })
            .collect();
        transitions.sort_by(|a, b| a.name.cmp(&b.name));
        let initial = Marking::from_indices(
            places.len(),
            decl.places.iter().filter(|(_, m)| *m).map(|(p, _)| index(p)),
        );
        Ok(Self {
            name: decl.name.clone(),
            places,
            transitions,
            initial,
        })
    }

    /// Declaration view of this net, in canonical (sorted) order.
    pub fn to_decl(&self) -> NetDecl {
        NetDecl {
            name: self.name.clone(),
            places: self
                .places
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), self.initial.is_marked(i)))
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDecl {
                    name: t.name.clone(),
                    label: t.label.clone(),
                    pre: t.pre.iter().map(|&p| self.places[p].clone()).collect(),
                    post: t.post.iter().map(|&p| self.places[p].clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: TransIdx) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn place_index(&self, name: &str) -> Option<PlaceIdx> {
        self.places.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn transition_index(&self, name: &str) -> Option<TransIdx> {
        self.transitions
            .binary_search_by(|t| t.name.as_str().cmp(name))
            .ok()
            .map(TransIdx)
    }

    pub fn place_id(&self, p: PlaceIdx) -> QualifiedName {
        QualifiedName::resolve(&self.name, &self.places[p])
    }

    pub fn transition_id(&self, t: TransIdx) -> QualifiedName {
        QualifiedName::resolve(&self.name, &self.transitions[t.0].name)
    }

    /// Builds a marking from place names.
    pub fn marking<I, S>(&self, marked: I) -> Result<Marking, NetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut idx = Vec::new();
        for p in marked {
            let p = p.as_ref();
            idx.push(
                self.place_index(p)
                    .ok_or_else(|| NetError::UnknownPlace(p.to_string()))?,
            );
        }
        Ok(Marking::from_indices(self.places.len(), idx))
    }

    pub fn marked_names(&self, m: &Marking) -> Vec<&str> {
        m.marked().map(|p| self.places[p].as_str()).collect()
    }

    fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        match m.marked().find(|&p| p >= self.places.len()) {
            Some(p) => Err(NetError::ForeignPlace(p)),
            None => Ok(()),
        }
    }

    fn is_enabled(&self, m: &Marking, t: &Transition) -> bool {
        t.pre.iter().all(|&p| m.is_marked(p))
    }

    /// Transitions whose preconditions are all marked, in name order.
    pub fn enabled(&self, m: &Marking) -> Result<Vec<TransIdx>, NetError> {
        self.check_marking(m)?;
        Ok(self
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| self.is_enabled(m, t))
            .map(|(i, _)| TransIdx(i))
            .collect())
    }

    /// Unmarks the preconditions of `t`, then marks its postconditions.
    pub fn fire(&self, m: &Marking, t: TransIdx) -> Result<Marking, NetError> {
        self.check_marking(m)?;
        let tr = self
            .transitions
            .get(t.0)
            .ok_or_else(|| NetError::UnknownTransition(format!("#{}", t.0)))?;
        if !self.is_enabled(m, tr) {
            return Err(NetError::NotEnabled(tr.name.clone()));
        }
        Ok(self.fire_unchecked(m, tr))
    }

    fn fire_unchecked(&self, m: &Marking, t: &Transition) -> Marking {
        let mut bits = m.0.clone();
        bits.grow(self.places.len());
        for &p in &t.pre {
            bits.set(p, false);
        }
        for &p in &t.post {
            bits.insert(p);
        }
        Marking(bits)
    }

    /// One `(transition, successor marking)` pair per enabled transition.
    pub fn successors(&self, m: &Marking) -> Result<Vec<(TransIdx, Marking)>, NetError> {
        self.check_marking(m)?;
        Ok(self
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| self.is_enabled(m, t))
            .map(|(i, t)| (TransIdx(i), self.fire_unchecked(m, t)))
            .collect())
    }
}
