//! Composition of per-party Petri nets into one synchronized net,
//! reachability state models, and explicit-state CTL checking with
//! witness and counterexample traces.

pub mod check;
pub mod cli;
pub mod compose;
pub mod corpus;
pub mod ctl;
pub mod io;
pub mod model;
pub mod oracle;
pub mod petri;
pub mod syntax;

pub use check::{check, sat, CheckResult, StateSet, Trace};
pub use compose::{compose, validate_sync, ComposedNet, Event, Origin, SyncSpec};
pub use ctl::{parse_formula, render_formula, Atom, Formula};
pub use model::{build_model, deadlock_states, export_dot, StateModel};
pub use oracle::oracle_sat;
pub use petri::{validate_net, Marking, NetDecl, PetriNet, TransIdx, TransitionDecl};
