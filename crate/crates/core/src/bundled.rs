//! Example properties and specs shipped with the library.

use crate::automata::{Alphabet, Dfa, Nfa, StateId};
use crate::specio::{PropertySpec, VerdictMode};

pub const Q0: StateId = 0;
pub const Q1: StateId = 1;
pub const Q2: StateId = 2;
pub const QERR: StateId = 3;

/// SafeIter: create an iterator (`c`), call `next` (`n`) any number of
/// times, and once the collection is updated (`u`) never call `next` again.
pub fn safeiter() -> Dfa {
    let sigma = Alphabet::new(["c", "n", "u"]).expect("static alphabet");
    Dfa::property_from_edges(sigma, 3, Q0, &[(Q0, "c", Q1), (Q1, "n", Q1), (Q1, "u", Q2), (Q2, "u", Q2)])
        .expect("static property")
}

pub fn safeiter_spec() -> PropertySpec {
    PropertySpec {
        name: "SafeIter".into(),
        events: vec!["c".into(), "n".into(), "u".into()],
        creation_events: vec!["c".into()],
        regex: "c n* (u u*)?".into(),
        verdict: VerdictMode::Fail,
    }
}

pub fn hasnext_spec() -> PropertySpec {
    PropertySpec {
        name: "HasNext".into(),
        events: vec!["hasnext".into(), "next".into()],
        creation_events: vec![],
        regex: "(hasnext hasnext* next)*".into(),
        verdict: VerdictMode::Fail,
    }
}

pub fn file_spec() -> PropertySpec {
    PropertySpec {
        name: "SafeFile".into(),
        events: vec!["open".into(), "read".into(), "write".into(), "close".into()],
        creation_events: vec!["open".into()],
        regex: "open (read | write)* close".into(),
        verdict: VerdictMode::Fail,
    }
}

/// Specs used by the default experiment.
pub fn experiment_specs() -> Vec<PropertySpec> {
    vec![safeiter_spec(), hasnext_spec(), file_spec()]
}

/// State names of [`safeiter_pair`], by id.
pub const PAIR_STATES: [&str; 7] = ["(1,1)", "(2,1)", "(2,2)", "(3,3)", "(3,1)", "(3,2)", "err"];

/// SafeIter composed for two iterators over one collection. Event subscripts
/// name the iterator; `u` updates the shared collection. Missing edges go to
/// `err`.
pub fn safeiter_pair() -> Dfa {
    let sigma = Alphabet::new(["c1", "n1", "c2", "n2", "u"]).expect("static alphabet");
    let (s11, s21, s22, s33, s31, s32) = (0, 1, 2, 3, 4, 5);
    Dfa::property_from_edges(
        sigma,
        6,
        s11,
        &[
            (s11, "c1", s21),
            (s21, "n1", s21),
            (s21, "c2", s22),
            (s22, "n1", s22),
            (s22, "n2", s22),
            (s22, "u", s33),
            (s33, "u", s33),
            (s21, "u", s31),
            (s31, "c2", s32),
            (s31, "u", s31),
            (s32, "n2", s32),
            (s32, "u", s33),
        ],
    )
    .expect("static property")
}

/// Three-state NFA property over `{a, b, c}` with error state 3.
pub fn artificial_nfa() -> Nfa {
    let sigma = Alphabet::new(["a", "b", "c"]).expect("static alphabet");
    Nfa::property(
        sigma,
        4,
        0,
        3,
        &[
            (0, "a", 1),
            (0, "a", 2),
            (0, "b", 2),
            (0, "c", 0),
            (1, "a", 2),
            (1, "b", 3),
            (1, "c", 1),
            (1, "c", 2),
            (2, "a", 0),
            (2, "b", 3),
            (2, "c", 1),
        ],
    )
    .expect("static property")
}

/// Labels kept by the six-state approximation of [`artificial_nfa`]'s
/// monitor.
pub fn artificial_keep_set() -> Vec<Vec<StateId>> {
    vec![vec![0, 3], vec![2, 3], vec![0, 1, 3], vec![1, 2, 3], vec![0, 1, 2, 3], vec![3]]
}

/// Loop property over `{a, b, c}`: `q0 -a-> q1 -a-> q1`, `q1 -b-> q2 -c-> q1`,
/// `q0 -b-> q3 -c-> q0`. Error state 4.
pub fn loop_property() -> Dfa {
    let sigma = Alphabet::new(["a", "b", "c"]).expect("static alphabet");
    Dfa::property_from_edges(
        sigma,
        4,
        0,
        &[(0, "a", 1), (1, "a", 1), (1, "b", 2), (2, "c", 1), (0, "b", 3), (3, "c", 0)],
    )
    .expect("static property")
}

/// Where [`loop_property`] may be after the loop body is skipped and
/// replaced by one summary symbol.
pub fn loop_region_map() -> Vec<Vec<StateId>> {
    vec![vec![2, 3], vec![2], vec![4], vec![4], vec![4]]
}

/// A bundled automaton: either a DFA property or an NFA property.
#[derive(Clone, Debug)]
pub enum BundledProperty {
    Dfa(Dfa),
    Nfa(Nfa),
}

pub const NAMES: [&str; 6] = ["safeiter", "safeiter_pair", "artificial", "loop", "hasnext", "file"];

/// Looks up a bundled property by name.
pub fn by_name(name: &str) -> Option<BundledProperty> {
    let built = |spec: PropertySpec| crate::specio::build_property(&spec).ok().map(|b| BundledProperty::Dfa(b.dfa));
    match name {
        "safeiter" => Some(BundledProperty::Dfa(safeiter())),
        "safeiter_pair" => Some(BundledProperty::Dfa(safeiter_pair())),
        "artificial" => Some(BundledProperty::Nfa(artificial_nfa())),
        "loop" => Some(BundledProperty::Dfa(loop_property())),
        "hasnext" => built(hasnext_spec()),
        "file" => built(file_spec()),
        _ => None,
    }
}

/// Bundled spec by name, for properties that have one.
pub fn spec_by_name(name: &str) -> Option<PropertySpec> {
    match name {
        "safeiter" => Some(safeiter_spec()),
        "hasnext" => Some(hasnext_spec()),
        "file" => Some(file_spec()),
        _ => None,
    }
}
