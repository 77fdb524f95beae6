//! Bundled scenarios: the seller/purchaser goods exchange, its two-phase
//! goods-and-funds extension, and the small figure examples.
//!
//! The scenario nets are reconstructions of the protocol from its
//! description, not transcriptions of the original diagrams. Each scenario carries
//! a manifest of expected results that the test suite reproduces.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::check::{check, CheckError};
use crate::compose::{compose, ComposeError, ComposedNet};
use crate::ctl::Formula;
use crate::io::{load_net, load_props, load_sync, FormatError};
use crate::model::{build_model, deadlock_states, Edge, ModelError, StateModel, DEFAULT_MAX_STATES};
use crate::petri::{PetriNet, QualifiedName};

/// Expected pipeline results for a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Manifest {
    pub states: usize,
    pub edges: usize,
    pub deadlocks: usize,
    pub verdicts: BTreeMap<String, bool>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{file}: {source}")]
    Format {
        file: &'static str,
        source: FormatError,
    },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
}

/// A scenario as file texts, in the formats of [`crate::io`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    /// `(file name, contents)` per component net.
    pub nets: Vec<(&'static str, &'static str)>,
    pub sync: &'static str,
    pub props: &'static str,
    pub manifest: &'static str,
}

/// What running the pipeline on a scenario produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub composed: ComposedNet,
    pub model: StateModel,
    pub verdicts: Vec<(String, bool)>,
}

impl Outcome {
    /// The observed results in manifest form.
    pub fn observed(&self) -> Manifest {
        Manifest {
            states: self.model.len(),
            edges: self.model.edges().len(),
            deadlocks: deadlock_states(&self.model).len(),
            verdicts: self.verdicts.iter().cloned().collect(),
        }
    }
}

impl Scenario {
    pub fn component_nets(&self) -> Result<Vec<PetriNet>, ScenarioError> {
        self.nets
            .iter()
            .map(|(file, text)| load_net(text).map_err(|source| ScenarioError::Format { file, source }))
            .collect()
    }

    pub fn properties(&self) -> Result<Vec<(String, Formula)>, ScenarioError> {
        load_props(self.props).map_err(|source| ScenarioError::Format {
            file: "contract.ctl",
            source,
        })
    }

    pub fn expected(&self) -> Result<Manifest, ScenarioError> {
        Ok(toml::from_str(self.manifest)?)
    }

    pub fn compose(&self) -> Result<ComposedNet, ScenarioError> {
        let nets = self.component_nets()?;
        let spec = load_sync(self.sync, &nets).map_err(|source| ScenarioError::Format {
            file: "contract.sync",
            source,
        })?;
        Ok(compose(&nets, &spec)?)
    }

    /// Compose, build the state model, and check every property at the
    /// initial state.
    pub fn run(&self) -> Result<Outcome, ScenarioError> {
        let composed = self.compose()?;
        let model = build_model(&composed.net, DEFAULT_MAX_STATES)?;
        let verdicts = self
            .properties()?
            .into_iter()
            .map(|(name, f)| Ok((name, check(&model, &f)?.holds_at_initial)))
            .collect::<Result<Vec<_>, CheckError>>()?;
        Ok(Outcome {
            composed,
            model,
            verdicts,
        })
    }
}

pub fn seller_purchaser() -> Scenario {
    Scenario {
        name: "seller_purchaser",
        nets: vec![
            ("seller.net", include_str!("../fixtures/seller_purchaser/seller.net")),
            ("purchaser.net", include_str!("../fixtures/seller_purchaser/purchaser.net")),
        ],
        sync: include_str!("../fixtures/seller_purchaser/contract.sync"),
        props: include_str!("../fixtures/seller_purchaser/contract.ctl"),
        manifest: include_str!("../fixtures/seller_purchaser/manifest.toml"),
    }
}

/// Goods exchange followed by a mirrored funds exchange in which the
/// purchaser supplies and the seller requests and accepts.
pub fn goods_and_funds() -> Scenario {
    Scenario {
        name: "goods_and_funds",
        nets: vec![
            ("seller.net", include_str!("../fixtures/goods_and_funds/seller.net")),
            ("purchaser.net", include_str!("../fixtures/goods_and_funds/purchaser.net")),
        ],
        sync: include_str!("../fixtures/goods_and_funds/contract.sync"),
        props: include_str!("../fixtures/goods_and_funds/contract.ctl"),
        manifest: include_str!("../fixtures/goods_and_funds/manifest.toml"),
    }
}

pub fn scenarios() -> Vec<Scenario> {
    vec![seller_purchaser(), goods_and_funds()]
}

pub const FIG3_NET: &str = include_str!("../fixtures/figures/fig3.net");
pub const FIG6_A_NET: &str = include_str!("../fixtures/figures/fig6_a.net");
pub const FIG6_B_NET: &str = include_str!("../fixtures/figures/fig6_b.net");
pub const FIG6_SYNC: &str = include_str!("../fixtures/figures/fig6.sync");

/// Three states A(q), B(q), C(r) with edges A→B, A→C, B→B, B→C and initial
/// state A. Propositions are `x.q` and `x.r`; C is a dead end.
pub fn figure10() -> StateModel {
    let props = vec![QualifiedName::new("x", "q"), QualifiedName::new("x", "r")];
    let edge = |source, name: &str, target| Edge {
        source,
        transition: name.to_string(),
        target,
    };
    StateModel::from_parts(
        "figure10",
        props,
        vec![vec![0], vec![0], vec![1]],
        0,
        vec![
            edge(0, "A_B", 1),
            edge(0, "A_C", 2),
            edge(1, "B_B", 1),
            edge(1, "B_C", 2),
        ],
    )
    .expect("figure 10 model is well formed")
}
