//! Property specification files.
//!
//! ```json
//! {"name":"SafeIter","events":["c","n","u"],"creation_events":["c"],
//!  "regex":"c n* (u u*)?","verdict":"fail"}
//! ```
//!
//! With `"verdict":"fail"` a prefix violates once no extension of it matches
//! the regex. With `"verdict":"match"` a prefix violates once some prefix of
//! it matches.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automata::json::AutomatonDoc;
use crate::automata::{compile_regex, determinize, Alphabet, Dfa, Nfa, StateId, SymbolId};
use crate::bundled::{self, BundledProperty};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictMode {
    /// Violation when the regex matches.
    Match,
    /// Violation when the regex can no longer match.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySpec {
    pub name: String,
    pub events: Vec<String>,
    #[serde(default)]
    pub creation_events: Vec<String>,
    pub regex: String,
    pub verdict: VerdictMode,
}

impl PropertySpec {
    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.events.iter().cloned()).map_err(|e| Error::spec("events", e.to_string()))
    }

    pub fn creation_ids(&self) -> Result<Vec<SymbolId>> {
        let sigma = self.alphabet()?;
        self.creation_events
            .iter()
            .enumerate()
            .map(|(i, c)| sigma.id(c).ok_or_else(|| Error::spec(format!("creation_events[{i}]"), format!("`{c}` is not an event"))))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.events.is_empty() {
            return Err(Error::spec("events", "at least one event is required"));
        }
        let sigma = self.alphabet()?;
        self.creation_ids()?;
        compile_regex(&self.regex, &sigma).map_err(|e| Error::spec("regex", e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

pub fn parse_spec(text: &str) -> Result<PropertySpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: PropertySpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::spec(path, e.into_inner().to_string())
    })?;
    spec.validate()?;
    Ok(spec)
}

/// A property DFA built from a spec.
#[derive(Clone, Debug)]
pub struct BuiltProperty {
    pub dfa: Dfa,
    /// The error state is unreachable or the initial state is already an
    /// error, so no loss model can change anything.
    pub trivial: bool,
}

/// Minimal property DFA with the error state last.
pub fn build_property(spec: &PropertySpec) -> Result<BuiltProperty> {
    spec.validate()?;
    let sigma = spec.alphabet()?;
    let lang = determinize(&compile_regex(&spec.regex, &sigma)?)?.dfa;
    let bad: Vec<bool> = match spec.verdict {
        VerdictMode::Fail => lang.dead_states(),
        VerdictMode::Match => {
            // a state violates once any accepting state was passed
            lang.accepting().to_vec()
        }
    };
    let dfa = collapse(&lang, &bad)?;
    let (min, _) = dfa.minimize();
    let dfa = min.error_last();
    let trivial = match dfa.error() {
        None => true,
        Some(e) => dfa.initial() == e,
    };
    let dfa = match dfa.error() {
        Some(_) => dfa,
        // never violated: add an unreachable trap to keep the property shape
        None => with_unreachable_error(&dfa)?,
    };
    Ok(BuiltProperty { dfa, trivial })
}

/// Redirects every transition into a `bad` state to a single trap and makes
/// every other state accepting.
fn collapse(lang: &Dfa, bad: &[bool]) -> Result<Dfa> {
    let k = lang.alphabet().len();
    let n = lang.num_states();
    let err = n;
    let mut delta = Vec::with_capacity((n + 1) * k);
    for q in 0..n {
        for a in 0..k {
            let t = lang.step(q, a);
            delta.push(if bad[q] || bad[t] { err } else { t });
        }
    }
    delta.extend(std::iter::repeat_n(err, k));
    let initial = if bad[lang.initial()] { err } else { lang.initial() };
    Dfa::property(lang.alphabet().clone(), delta, initial, err)
}

fn with_unreachable_error(dfa: &Dfa) -> Result<Dfa> {
    let k = dfa.alphabet().len();
    let err: StateId = dfa.num_states();
    let mut delta = dfa.delta().to_vec();
    delta.extend(std::iter::repeat_n(err, k));
    Dfa::property(dfa.alphabet().clone(), delta, dfa.initial(), err)
}

/// A property loaded from disk or the bundled set, with its creation events.
#[derive(Clone, Debug)]
pub struct LoadedProperty {
    pub name: String,
    pub automaton: BundledProperty,
    pub creation: Vec<SymbolId>,
    pub trivial: bool,
}

impl LoadedProperty {
    pub fn dfa(&self) -> Result<&Dfa> {
        match &self.automaton {
            BundledProperty::Dfa(d) => Ok(d),
            BundledProperty::Nfa(_) => Err(Error::InvalidAutomaton(format!("`{}` is an NFA property", self.name))),
        }
    }
}

/// Loads `builtin:NAME`, a property spec file, or an automaton JSON file
/// (a DFA if every row has one target, otherwise an NFA).
pub fn load_property(source: &str) -> Result<LoadedProperty> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let automaton = bundled::by_name(name).ok_or_else(|| {
            Error::Config(format!("unknown builtin `{name}`; known: {}", bundled::NAMES.join(", ")))
        })?;
        let creation = match bundled::spec_by_name(name) {
            Some(spec) => spec.creation_ids()?,
            None => Vec::new(),
        };
        return Ok(LoadedProperty { name: name.to_string(), automaton, creation, trivial: false });
    }
    let text = std::fs::read_to_string(Path::new(source))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("regex").is_some() {
        let spec = parse_spec(&text)?;
        let built = build_property(&spec)?;
        return Ok(LoadedProperty {
            name: spec.name.clone(),
            creation: spec.creation_ids()?,
            automaton: BundledProperty::Dfa(built.dfa),
            trivial: built.trivial,
        });
    }
    let doc: AutomatonDoc = serde_json::from_value(value)?;
    let name = Path::new(source).file_stem().and_then(|s| s.to_str()).unwrap_or("property").to_string();
    let automaton = if doc.delta.iter().all(|r| r.targets.len() == 1) {
        BundledProperty::Dfa(doc.to_dfa()?)
    } else {
        BundledProperty::Nfa(doc.to_nfa()?)
    };
    Ok(LoadedProperty { name, automaton, creation: Vec::new(), trivial: false })
}

impl BundledProperty {
    pub fn to_nfa(&self) -> Nfa {
        match self {
            BundledProperty::Dfa(d) => d.to_nfa(),
            BundledProperty::Nfa(n) => n.clone(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            BundledProperty::Dfa(d) => d.alphabet(),
            BundledProperty::Nfa(n) => n.alphabet(),
        }
    }
}
