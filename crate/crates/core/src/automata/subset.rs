use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, MergeClasses, Nfa, StateId, TransitionSystem, DEFAULT_SUBSET_CAP};
use crate::{Error, Result};

/// Sorted, duplicate-free, non-empty set of reference-automaton states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<StateId>", into = "Vec<StateId>")]
pub struct SubsetLabel(Vec<StateId>);

impl SubsetLabel {
    pub fn new(mut members: Vec<StateId>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidAutomaton("subset labels must be non-empty".into()));
        }
        Ok(SubsetLabel(members))
    }

    pub fn singleton(q: StateId) -> Self {
        SubsetLabel(vec![q])
    }

    pub fn members(&self) -> &[StateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubsetLabel) -> bool {
        self.0.iter().all(|&q| other.contains(q))
    }

    pub fn union(&self, other: &SubsetLabel) -> SubsetLabel {
        let mut members = self.0.clone();
        members.extend_from_slice(&other.0);
        members.sort_unstable();
        members.dedup();
        SubsetLabel(members)
    }

    pub fn with(&self, q: StateId) -> SubsetLabel {
        self.union(&SubsetLabel::singleton(q))
    }
}

impl TryFrom<Vec<StateId>> for SubsetLabel {
    type Error = Error;
    fn try_from(v: Vec<StateId>) -> Result<Self> {
        SubsetLabel::new(v)
    }
}

impl From<SubsetLabel> for Vec<StateId> {
    fn from(l: SubsetLabel) -> Self {
        l.0
    }
}

impl fmt::Debug for SubsetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SubsetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

/// A DFA whose states carry subsets of a reference automaton's states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDfa {
    pub dfa: Dfa,
    pub labels: Vec<SubsetLabel>,
}

impl LabeledDfa {
    pub fn new(dfa: Dfa, labels: Vec<SubsetLabel>) -> Result<Self> {
        if labels.len() != dfa.num_states() {
            return Err(Error::InvalidAutomaton(format!(
                "{} labels for {} states",
                labels.len(),
                dfa.num_states()
            )));
        }
        Ok(LabeledDfa { dfa, labels })
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    pub fn label(&self, q: StateId) -> &SubsetLabel {
        &self.labels[q]
    }

    pub fn state_with_label(&self, label: &SubsetLabel) -> Option<StateId> {
        self.labels.iter().position(|l| l == label)
    }

    /// Label of the state reached on `word`.
    pub fn label_after(&self, word: &[usize]) -> &SubsetLabel {
        &self.labels[self.dfa.run(word)]
    }

    /// Minimizes the DFA. Each output state is labelled by the union of the
    /// labels of its merge class.
    pub fn minimize(&self) -> (LabeledDfa, MergeClasses) {
        let (dfa, classes) = self.dfa.minimize();
        let labels = classes
            .classes()
            .iter()
            .map(|members| {
                members
                    .iter()
                    .skip(1)
                    .fold(self.labels[members[0]].clone(), |acc, &q| acc.union(&self.labels[q]))
            })
            .collect();
        (LabeledDfa { dfa, labels }, classes)
    }
}

/// How successor subsets are normalized during the subset construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubsetMode {
    /// Plain subset construction. A reachable empty subset becomes `{error}`.
    #[default]
    Raw,
    /// Every subset is closed under adding the error state. Since the error
    /// state accepts nothing this does not change the language, and it
    /// identifies `S` with `S ∪ {error}` up front.
    SaturateError,
    /// Any subset containing the error state collapses to `{error}`.
    CollapseError,
}

#[derive(Clone, Copy, Debug)]
pub struct DeterminizeOptions {
    pub cap: usize,
    pub mode: SubsetMode,
}

impl Default for DeterminizeOptions {
    fn default() -> Self {
        DeterminizeOptions { cap: DEFAULT_SUBSET_CAP, mode: SubsetMode::Raw }
    }
}

/// Subset construction with default options.
pub fn determinize<T: TransitionSystem + ?Sized>(nfa: &T) -> Result<LabeledDfa> {
    determinize_with(nfa, DeterminizeOptions::default())
}

/// Subset construction over the reachable subsets only.
///
/// A subset accepts iff it contains an accepting state. Automata without an
/// error state are first completed with a fresh trap (id `num_states()`), so
/// every label is non-empty. The error state of the result is the state
/// labelled `{error}`, when reachable.
pub fn determinize_with<T: TransitionSystem + ?Sized>(nfa: &T, opts: DeterminizeOptions) -> Result<LabeledDfa> {
    match nfa.error() {
        Some(e) => subset_construction(nfa, e, opts),
        None => {
            let completed = to_nfa(nfa).with_error_trap();
            let e = completed.error().expect("trap was just added");
            subset_construction(&completed, e, opts)
        }
    }
}

fn to_nfa<T: TransitionSystem + ?Sized>(ts: &T) -> Nfa {
    let mut nfa = Nfa::new(ts.alphabet().clone(), ts.num_states(), ts.initial());
    let mut buf = Vec::new();
    for q in 0..ts.num_states() {
        nfa.set_accepting(q, ts.is_accepting(q));
        for a in ts.alphabet().ids() {
            buf.clear();
            ts.extend_successors(q, a, &mut buf);
            for &t in &buf {
                nfa.add_transition(q, a, t);
            }
        }
    }
    nfa
}

fn normalize(mut set: Vec<StateId>, error: StateId, mode: SubsetMode) -> Vec<StateId> {
    match mode {
        SubsetMode::Raw => {
            if set.is_empty() {
                set.push(error);
            }
        }
        SubsetMode::SaturateError => {
            if let Err(pos) = set.binary_search(&error) {
                set.insert(pos, error);
            }
        }
        SubsetMode::CollapseError => {
            if set.is_empty() || set.binary_search(&error).is_ok() {
                set.clear();
                set.push(error);
            }
        }
    }
    set
}

fn subset_construction<T: TransitionSystem + ?Sized>(
    nfa: &T,
    error: StateId,
    opts: DeterminizeOptions,
) -> Result<LabeledDfa> {
    let alphabet: Alphabet = nfa.alphabet().clone();
    let k = alphabet.len();
    let start = normalize(vec![nfa.initial()], error, opts.mode);
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        for a in 0..k {
            let next = normalize(nfa.step_set(&subsets[i], a), error, opts.mode);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= opts.cap {
                        return Err(Error::StateExplosion { cap: opts.cap });
                    }
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            delta.push(id);
        }
        i += 1;
    }
    let accepting = subsets.iter().map(|s| s.iter().any(|&q| nfa.is_accepting(q))).collect();
    let err_state = index.get(&vec![error]).copied();
    let dfa = Dfa::new(alphabet, delta, 0, accepting, err_state)?;
    let labels = subsets.into_iter().map(SubsetLabel).collect();
    Ok(LabeledDfa { dfa, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn safeiter_nfa() -> Nfa {
        crate::bundled::safeiter().to_nfa()
    }

    #[test]
    fn label_invariants() {
        assert!(SubsetLabel::new(vec![]).is_err());
        let l = SubsetLabel::new(vec![3, 1, 3]).unwrap();
        assert_eq!(l.members(), &[1, 3]);
        assert_eq!(l.to_string(), "{1,3}");
        assert!(SubsetLabel::singleton(1).is_subset_of(&l));
    }

    #[test]
    fn deterministic_input_gets_singleton_labels() {
        let nfa = safeiter_nfa();
        let det = determinize(&nfa).unwrap();
        assert!(det.labels.iter().all(|l| l.len() == 1));
        assert!(det.dfa.is_isomorphic(&crate::bundled::safeiter()));
    }

    #[test]
    fn cap_is_an_error() {
        let nfa = crate::bundled::artificial_nfa();
        let err = determinize_with(&nfa, DeterminizeOptions { cap: 3, mode: SubsetMode::Raw });
        assert!(matches!(err, Err(Error::StateExplosion { cap: 3 })));
    }

    #[test]
    fn modes_normalize_error() {
        assert_eq!(normalize(vec![], 9, SubsetMode::Raw), vec![9]);
        assert_eq!(normalize(vec![1, 2], 9, SubsetMode::SaturateError), vec![1, 2, 9]);
        assert_eq!(normalize(vec![1, 9], 9, SubsetMode::CollapseError), vec![9]);
        assert_eq!(normalize(vec![1, 2], 9, SubsetMode::CollapseError), vec![1, 2]);
    }
}
