//! JSON document format shared by properties, NFAs and monitors:
//!
//! ```json
//! {"alphabet":["c","n","u"], "states":4, "initial":0, "error":3,
//!  "delta":[[0,"c",1], [0,"n",3], ...], "labels":[[0,3], ...]}
//! ```
//!
//! `delta` rows are `[state, symbol, target...]`; a DFA row has one target.
//! `accepting` lists accepting states and may be omitted, in which case every
//! state other than `error` accepts.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, LabeledDfa, Nfa, StateId, SubsetLabel};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRow {
    pub state: StateId,
    pub symbol: String,
    pub targets: Vec<StateId>,
}

impl Serialize for DeltaRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2 + self.targets.len()))?;
        seq.serialize_element(&self.state)?;
        seq.serialize_element(&self.symbol)?;
        for t in &self.targets {
            seq.serialize_element(t)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for DeltaRow {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RowVisitor;
        impl<'de> Visitor<'de> for RowVisitor {
            type Value = DeltaRow;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array [state, symbol, target...]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<DeltaRow, A::Error> {
                let state = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let symbol = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let mut targets = Vec::new();
                while let Some(t) = seq.next_element()? {
                    targets.push(t);
                }
                Ok(DeltaRow { state, symbol, targets })
            }
        }
        deserializer.deserialize_seq(RowVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDoc {
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: StateId,
    pub error: Option<StateId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<StateId>>,
    pub delta: Vec<DeltaRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<SubsetLabel>>,
}

impl AutomatonDoc {
    fn accepting_flags(&self) -> Result<Vec<bool>> {
        let mut flags = vec![false; self.states];
        match &self.accepting {
            Some(list) => {
                for &q in list {
                    *flags.get_mut(q).ok_or_else(|| bad(format!("accepting state {q} out of range")))? = true;
                }
            }
            None => {
                for (q, f) in flags.iter_mut().enumerate() {
                    *f = Some(q) != self.error;
                }
            }
        }
        Ok(flags)
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let k = alphabet.len();
        let mut delta = vec![None; self.states * k];
        for row in &self.delta {
            let a = alphabet.require(&row.symbol)?;
            if row.targets.len() != 1 {
                return Err(bad(format!("DFA row for state {} on `{}` needs one target", row.state, row.symbol)));
            }
            let slot = delta
                .get_mut(row.state * k + a)
                .filter(|_| row.state < self.states)
                .ok_or_else(|| bad(format!("state {} out of range", row.state)))?;
            if slot.replace(row.targets[0]).is_some() {
                return Err(bad(format!("duplicate row for state {} on `{}`", row.state, row.symbol)));
            }
        }
        let delta = delta
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| bad(format!("missing transition for state {} on `{}`", i / k, alphabet.name(i % k)))))
            .collect::<Result<Vec<_>>>()?;
        Dfa::new(alphabet, delta, self.initial, self.accepting_flags()?, self.error)
    }

    pub fn to_labeled_dfa(&self) -> Result<LabeledDfa> {
        let dfa = self.to_dfa()?;
        let labels = self.labels.clone().ok_or_else(|| bad("missing `labels`".into()))?;
        LabeledDfa::new(dfa, labels)
    }

    pub fn to_nfa(&self) -> Result<Nfa> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        if self.initial >= self.states {
            return Err(bad(format!("initial state {} out of range", self.initial)));
        }
        let mut nfa = Nfa::new(alphabet, self.states, self.initial);
        for (q, f) in self.accepting_flags()?.into_iter().enumerate() {
            nfa.set_accepting(q, f);
        }
        for row in &self.delta {
            let a = nfa.alphabet().require(&row.symbol)?;
            if row.state >= self.states {
                return Err(bad(format!("state {} out of range", row.state)));
            }
            for &t in &row.targets {
                if t >= self.states {
                    return Err(bad(format!("target {t} out of range")));
                }
                nfa.add_transition(row.state, a, t);
            }
        }
        nfa.set_error(self.error)?;
        Ok(nfa)
    }

    pub fn from_dfa(dfa: &Dfa, labels: Option<&[SubsetLabel]>) -> Self {
        let alphabet = dfa.alphabet();
        let mut delta = Vec::new();
        for q in 0..dfa.num_states() {
            for a in alphabet.ids() {
                delta.push(DeltaRow { state: q, symbol: alphabet.name(a).to_string(), targets: vec![dfa.step(q, a)] });
            }
        }
        AutomatonDoc {
            alphabet: alphabet.names().to_vec(),
            states: dfa.num_states(),
            initial: dfa.initial(),
            error: dfa.error(),
            accepting: explicit_accepting(dfa.accepting(), dfa.error()),
            delta,
            labels: labels.map(|l| l.to_vec()),
        }
    }

    pub fn from_labeled(l: &LabeledDfa) -> Self {
        AutomatonDoc::from_dfa(&l.dfa, Some(&l.labels))
    }

    pub fn from_nfa(nfa: &Nfa) -> Self {
        let alphabet = nfa.alphabet();
        let mut delta = Vec::new();
        for q in 0..nfa.num_states() {
            for a in alphabet.ids() {
                let targets = nfa.successors(q, a);
                if !targets.is_empty() {
                    delta.push(DeltaRow { state: q, symbol: alphabet.name(a).to_string(), targets: targets.to_vec() });
                }
            }
        }
        let flags: Vec<bool> = (0..nfa.num_states()).map(|q| nfa.is_accepting(q)).collect();
        AutomatonDoc {
            alphabet: alphabet.names().to_vec(),
            states: nfa.num_states(),
            initial: nfa.initial(),
            error: nfa.error(),
            accepting: explicit_accepting(&flags, nfa.error()),
            delta,
            labels: None,
        }
    }
}

fn explicit_accepting(flags: &[bool], error: Option<StateId>) -> Option<Vec<StateId>> {
    let implied = flags.iter().enumerate().all(|(q, &f)| f == (Some(q) != error));
    if implied {
        None
    } else {
        Some(flags.iter().enumerate().filter(|(_, &f)| f).map(|(q, _)| q).collect())
    }
}

fn bad(message: String) -> Error {
    Error::InvalidAutomaton(message)
}
