//! Text formats for nets, synchronization specs and property files.
//!
//! ```text
//! net Seller {
//!   place S0 init;
//!   place S1;
//!   trans ready { in: S0; out: S1; }
//!   trans RFG_T label RFG_T { in: S1; out: S2; }
//! }
//!
//! sync {
//!   event RFG { Seller: RFG_T; Purchaser: RFG_T; }
//! }
//!
//! prop live: AG EF (Seller.S0 & Purchaser.P0);
//! ```
//!
//! `#` starts a line comment. Composed nets use `Component.Local` names.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::compose::{validate_sync, Event, SyncSpec, SyncViolation};
use crate::ctl::{self, Formula};
use crate::petri::{NetDecl, NetError, PetriNet, TransitionDecl, ValidationReport};
use crate::syntax::{Cursor, Pos, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("invalid synchronization:\n{}", .0.join("\n"))]
    Sync(Vec<String>),
    #[error("{pos}: duplicate property name `{name}`")]
    DuplicateProp { name: String, pos: Pos },
}

impl FormatError {
    /// Position of the offending token, for syntax errors.
    pub fn pos(&self) -> Option<Pos> {
        match self {
            FormatError::Syntax(e) => Some(e.pos),
            FormatError::DuplicateProp { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}

fn name(cur: &mut Cursor) -> Result<String, SyntaxError> {
    let (mut s, _) = cur.expect_ident()?;
    if cur.eat_sym(".") {
        let (local, _) = cur.expect_ident()?;
        s = format!("{s}.{local}");
    }
    Ok(s)
}

fn name_list(cur: &mut Cursor) -> Result<Vec<String>, SyntaxError> {
    let mut out = Vec::new();
    if cur.at_sym(";") {
        return Ok(out);
    }
    out.push(name(cur)?);
    while cur.eat_sym(",") {
        out.push(name(cur)?);
    }
    Ok(out)
}

/// Parses a net file without semantic validation.
pub fn parse_net(text: &str) -> Result<NetDecl, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("net")?;
    let (net_name, _) = cur.expect_ident()?;
    let mut decl = NetDecl::new(net_name);
    cur.expect_sym("{")?;
    loop {
        if cur.eat_keyword("place") {
            let p = name(&mut cur)?;
            let init = cur.eat_keyword("init");
            cur.expect_sym(";")?;
            decl.places.push((p, init));
        } else if cur.eat_keyword("trans") {
            let t = name(&mut cur)?;
            let label = if cur.eat_keyword("label") {
                Some(cur.expect_ident()?.0)
            } else {
                None
            };
            cur.expect_sym("{")?;
            cur.expect_keyword("in")?;
            cur.expect_sym(":")?;
            let pre = name_list(&mut cur)?;
            cur.expect_sym(";")?;
            cur.expect_keyword("out")?;
            cur.expect_sym(":")?;
            let post = name_list(&mut cur)?;
            cur.expect_sym(";")?;
            cur.expect_sym("}")?;
            decl.transitions.push(TransitionDecl {
                name: t,
                label,
                pre,
                post,
            });
        } else if cur.eat_sym("}") {
            break;
        } else {
            return Err(cur.error(["`place`", "`trans`", "`}`"]));
        }
    }
    cur.expect_eof()?;
    Ok(decl)
}

/// Parses and validates a net file.
pub fn load_net(text: &str) -> Result<PetriNet, FormatError> {
    Ok(parse_net(text)?.build()?)
}

/// Canonical text of a net: places, then transitions, each name-sorted.
pub fn save_net(net: &PetriNet) -> String {
    let decl = net.to_decl();
    let mut out = format!("net {} {{\n", decl.name);
    for (p, init) in &decl.places {
        let _ = writeln!(out, "  place {p}{};", if *init { " init" } else { "" });
    }
    for t in &decl.transitions {
        let label = t
            .label
            .as_ref()
            .map(|l| format!(" label {l}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  trans {}{label} {{ in: {}; out: {}; }}",
            t.name,
            t.pre.join(", "),
            t.post.join(", ")
        );
    }
    out.push_str("}\n");
    out
}

/// Parsed sync file with the position of each event declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncDocument {
    pub spec: SyncSpec,
    pub positions: Vec<Pos>,
}

pub fn parse_sync(text: &str) -> Result<SyncDocument, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("sync")?;
    cur.expect_sym("{")?;
    let mut events = Vec::new();
    let mut positions = Vec::new();
    while !cur.eat_sym("}") {
        if !cur.at_keyword("event") {
            return Err(cur.error(["`event`", "`}`"]));
        }
        positions.push(cur.bump().pos);
        let (event, _) = cur.expect_ident()?;
        cur.expect_sym("{")?;
        let mut mappings = Vec::new();
        loop {
            let (component, _) = cur.expect_ident()?;
            cur.expect_sym(":")?;
            let (transition, _) = cur.expect_ident()?;
            cur.expect_sym(";")?;
            mappings.push((component, transition));
            if cur.eat_sym("}") {
                break;
            }
        }
        events.push(Event {
            name: event,
            mappings,
        });
    }
    cur.expect_eof()?;
    Ok(SyncDocument {
        spec: SyncSpec::new(events),
        positions,
    })
}

fn violation_event(v: &SyncViolation) -> Option<&str> {
    match v {
        SyncViolation::InvalidEventName(e) | SyncViolation::DuplicateEvent(e) => Some(e),
        SyncViolation::UnknownComponent { event, .. }
        | SyncViolation::DuplicateMapping { event, .. }
        | SyncViolation::UnknownTransition { event, .. }
        | SyncViolation::UnlabeledTransition { event, .. }
        | SyncViolation::Unsynchronizable { event, .. } => Some(event),
        SyncViolation::DuplicateComponent(_) | SyncViolation::QualifiedComponent(_) => None,
    }
}

/// Parses a sync file and validates it against the component nets.
/// Validation messages are prefixed with the event's position.
pub fn load_sync(text: &str, nets: &[PetriNet]) -> Result<SyncSpec, FormatError> {
    let doc = parse_sync(text)?;
    let report: ValidationReport<SyncViolation> = validate_sync(nets, &doc.spec);
    if report.is_empty() {
        return Ok(doc.spec);
    }
    let messages = report
        .violations
        .iter()
        .map(|v| {
            let pos = violation_event(v).and_then(|e| {
                doc.spec
                    .events
                    .iter()
                    .position(|ev| ev.name == e)
                    .map(|i| doc.positions[i])
            });
            match pos {
                Some(p) => format!("{p}: {v}"),
                None => v.to_string(),
            }
        })
        .collect();
    Err(FormatError::Sync(messages))
}

pub fn save_sync(spec: &SyncSpec) -> String {
    let mut out = String::from("sync {\n");
    for e in &spec.events {
        let _ = write!(out, "  event {} {{", e.name);
        for (c, t) in &e.mappings {
            let _ = write!(out, " {c}: {t};");
        }
        out.push_str(" }\n");
    }
    out.push_str("}\n");
    out
}

/// Parses a property file into named formulas, in file order.
pub fn load_props(text: &str) -> Result<Vec<(String, Formula)>, FormatError> {
    let mut cur = Cursor::new(text)?;
    let mut seen: BTreeMap<String, Pos> = BTreeMap::new();
    let mut props = Vec::new();
    while !cur.at_eof() {
        if !cur.at_keyword("prop") {
            return Err(cur.error(["`prop`", "end of input"]).into());
        }
        cur.bump();
        let (prop, pos) = cur.expect_ident()?;
        if seen.insert(prop.clone(), pos).is_some() {
            return Err(FormatError::DuplicateProp { name: prop, pos });
        }
        cur.expect_sym(":")?;
        let f = ctl::parse_in(&mut cur)?;
        cur.expect_sym(";")?;
        props.push((prop, f));
    }
    Ok(props)
}

pub fn save_props(props: &[(String, Formula)]) -> String {
    props
        .iter()
        .map(|(name, f)| format!("prop {name}: {f};\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = "net fig3 {\n  place p1 init; place p2 init; place p3;\n  trans t { in: p1, p2; out: p1, p3; }\n}\n";

    #[test]
    fn fig3_loads() {
        let net = load_net(FIG3).unwrap();
        assert_eq!(net.places().len(), 3);
        assert_eq!(net.transitions().len(), 1);
        let t = &net.transitions()[0];
        assert_eq!(t.pre, vec![0, 1]);
        assert_eq!(t.post, vec![0, 2]);
        assert_eq!(load_net(&save_net(&net)).unwrap(), net);
    }

    #[test]
    fn single_place() {
        let net = load_net("net n { place S0 init; }").unwrap();
        assert_eq!(net.places(), ["S0"]);
        assert_eq!(net.marked_names(net.initial()), vec!["S0"]);
        assert_eq!(load_net(&save_net(&net)).unwrap(), net);
    }

    #[test]
    fn net_syntax_error_is_positioned() {
        let err = load_net("net n {\n  place a\n}").unwrap_err();
        let pos = err.pos().unwrap();
        assert_eq!((pos.line, pos.col), (3, 1));
        assert!(err.to_string().contains("`;`"));
    }

    #[test]
    fn net_semantic_error_is_reported() {
        let err = load_net("net n { trans t { in: pX; out: ; } }").unwrap_err();
        assert!(matches!(err, FormatError::Net(NetError::Invalid(_))));
        assert!(err.to_string().contains("pX"));
    }

    #[test]
    fn empty_sync_is_valid() {
        let spec = load_sync("sync { }", &[]).unwrap();
        assert!(spec.events.is_empty());
    }

    #[test]
    fn sync_validation_is_positioned() {
        let a = load_net("net A { place a; trans a1 label l { in: a; out: ; } }").unwrap();
        let err = load_sync("sync {\n  event x { A: a1; }\n}", &[a]).unwrap_err();
        let FormatError::Sync(msgs) = err else {
            panic!("expected sync error");
        };
        assert_eq!(msgs.len(), 1);
        assert!(msgs[0].starts_with("2:3:"), "{}", msgs[0]);
    }

    #[test]
    fn props_parse_and_reject_duplicates() {
        assert!(load_props("# nothing\n").unwrap().is_empty());
        let props = load_props("prop a: x.p;\nprop b: AG x.p;").unwrap();
        assert_eq!(props.len(), 2);
        assert_eq!(load_props(&save_props(&props)).unwrap(), props);
        let err = load_props("prop p: x.a;\nprop p: x.b;").unwrap_err();
        assert_eq!(err.pos().map(|p| p.line), Some(2));
        assert!(matches!(err, FormatError::DuplicateProp { .. }));
    }

    #[test]
    fn props_formula_error_is_positioned() {
        let err = load_props("prop a: AG (x.p;").unwrap_err();
        assert_eq!(err.pos().map(|p| (p.line, p.col)), Some((1, 16)));
    }
}
