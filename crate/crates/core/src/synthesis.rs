//! Alternate monitor synthesis.
//!
//! The alternate NFA ψ* has the property's states and moves from `q` on a
//! lossy symbol γ to every state reachable from `q` on some segment of
//! R⁻¹(γ). Its subset construction, minimized, is the optimal complete
//! monitor: it rejects a lossy stream exactly when every completion violates.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::json::AutomatonDoc;
use crate::automata::{
    determinize_with, Alphabet, DeterminizeOptions, Dfa, LabeledDfa, Nfa, StateId, SubsetLabel, SubsetMode,
    TransitionSystem, DEFAULT_SUBSET_CAP,
};
use crate::lossmodel::LossModel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonitorMode {
    /// Never reports a violation that some completion avoids.
    Complete,
    /// Reports a violation as soon as some completion violates.
    Sound,
}

impl std::str::FromStr for MonitorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(MonitorMode::Complete),
            "sound" => Ok(MonitorMode::Sound),
            _ => Err(Error::Config(format!("unknown monitor mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorSource {
    pub property: String,
    pub loss: String,
}

#[derive(Clone, Debug)]
pub struct AlternateMonitor {
    pub mode: MonitorMode,
    pub source: MonitorSource,
    /// Error state of the property; every label refers to property states.
    pub property_error: StateId,
    pub property_states: usize,
    /// ψ* over Γ.
    pub alternate: Nfa,
    /// Subset construction of ψ*, before minimization.
    pub subsets: LabeledDfa,
    /// Minimized monitor; labels are unions over merge classes.
    pub minimal: LabeledDfa,
}

impl AlternateMonitor {
    pub fn gamma(&self) -> &Alphabet {
        self.alternate.alphabet()
    }

    /// The rejecting state of the minimal monitor.
    pub fn reject_state(&self) -> Option<StateId> {
        self.minimal.dfa.error()
    }

    pub fn num_states(&self) -> usize {
        self.minimal.num_states()
    }

    /// Label of the minimal monitor after reading `word`.
    pub fn label_after(&self, word: &[usize]) -> &SubsetLabel {
        self.minimal.label_after(word)
    }

    pub fn rejects(&self, word: &[usize]) -> bool {
        Some(self.minimal.dfa.run(word)) == self.reject_state()
    }

    /// Full property state set `Q`.
    pub fn full_label(&self) -> SubsetLabel {
        SubsetLabel::new((0..self.property_states).collect()).expect("non-empty property")
    }

    pub fn to_doc(&self) -> MonitorDoc {
        MonitorDoc {
            mode: self.mode,
            source: self.source.clone(),
            gamma: self.gamma().names().to_vec(),
            property_error: self.property_error,
            automaton: AutomatonDoc::from_labeled(&self.minimal),
        }
    }
}

/// Serialized monitor: the automaton document plus provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorDoc {
    pub mode: MonitorMode,
    pub source: MonitorSource,
    pub gamma: Vec<String>,
    pub property_error: StateId,
    #[serde(flatten)]
    pub automaton: AutomatonDoc,
}

/// Builds ψ*: `δψ(q, γ) = δ(q, R⁻¹(γ))`. Accepting states and the error
/// state are the property's.
pub fn alternate_nfa<T: TransitionSystem + ?Sized>(property: &T, model: &LossModel) -> Result<Nfa> {
    let error = property
        .error()
        .ok_or_else(|| Error::InvalidAutomaton("the property needs an error state".into()))?;
    let table = model.reach_table(property)?;
    let gamma = model.gamma().clone();
    let mut nfa = Nfa::new(gamma.clone(), property.num_states(), property.initial());
    for q in 0..property.num_states() {
        nfa.set_accepting(q, property.is_accepting(q));
        for g in gamma.ids() {
            for &t in &table[q][g] {
                nfa.add_transition(q, g, t);
            }
        }
    }
    nfa.set_error(Some(error))?;
    Ok(nfa)
}

#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    pub cap: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { cap: DEFAULT_SUBSET_CAP }
    }
}

/// The optimal complete alternate monitor.
pub fn synthesize_optimal<T: TransitionSystem + ?Sized>(property: &T, model: &LossModel) -> Result<AlternateMonitor> {
    synthesize(property, model, MonitorMode::Complete, SynthesisOptions::default())
}

/// The sound variant: a successor set containing the error state collapses
/// to `{error}`. Requires a deterministic property.
pub fn synthesize_sound<T: TransitionSystem + ?Sized>(property: &T, model: &LossModel) -> Result<AlternateMonitor> {
    synthesize(property, model, MonitorMode::Sound, SynthesisOptions::default())
}

pub fn synthesize<T: TransitionSystem + ?Sized>(
    property: &T,
    model: &LossModel,
    mode: MonitorMode,
    opts: SynthesisOptions,
) -> Result<AlternateMonitor> {
    if mode == MonitorMode::Sound && !property.is_deterministic() {
        return Err(Error::InvalidAutomaton("sound monitors need a deterministic property".into()));
    }
    let alternate = alternate_nfa(property, model)?;
    let subset_mode = match mode {
        MonitorMode::Complete => SubsetMode::SaturateError,
        MonitorMode::Sound => SubsetMode::CollapseError,
    };
    let subsets = determinize_with(&alternate, DeterminizeOptions { cap: opts.cap, mode: subset_mode })?;
    let (minimal, _) = subsets.minimize();
    Ok(AlternateMonitor {
        mode,
        source: MonitorSource { property: String::new(), loss: model.descriptor().to_string() },
        property_error: property.error().expect("checked by alternate_nfa"),
        property_states: property.num_states(),
        alternate,
        subsets,
        minimal,
    })
}

/// Whether the monitor can ever report a violation.
pub fn monitorable(monitor: &AlternateMonitor) -> bool {
    monitor.reject_state().is_some()
}

/// Replaces every transition into a discarded label `S` by one into the
/// smallest kept superset of `S` (ties: lexicographically smallest label).
///
/// `keep` must contain the initial label and the full set `Q`. Labels are
/// closed under adding the error state before use. Only kept labels
/// reachable from the initial one appear in the result.
pub fn approximate(monitor: &AlternateMonitor, keep: &[SubsetLabel]) -> Result<AlternateMonitor> {
    if monitor.mode != MonitorMode::Complete {
        return Err(Error::InvalidKeepSet("approximation needs a complete monitor".into()));
    }
    let err = monitor.property_error;
    let mut kept: Vec<SubsetLabel> = keep.iter().map(|l| l.with(err)).collect();
    kept.sort();
    kept.dedup();
    if let Some(l) = kept.iter().find(|l| l.members().iter().any(|&q| q >= monitor.property_states)) {
        return Err(Error::InvalidKeepSet(format!("label {l} names a state outside the property")));
    }
    let initial = monitor.subsets.label(monitor.subsets.dfa.initial()).clone();
    if !kept.contains(&initial) {
        return Err(Error::InvalidKeepSet(format!("the initial label {initial} must be kept")));
    }
    let full = monitor.full_label();
    if !kept.contains(&full) {
        return Err(Error::InvalidKeepSet(format!("the full set {full} must be kept")));
    }
    // redirect candidates: by cardinality, then label order
    let mut by_size = kept.clone();
    by_size.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let redirect = |s: &SubsetLabel| -> SubsetLabel {
        by_size.iter().find(|k| s.is_subset_of(k)).cloned().expect("the full set covers every label")
    };

    let psi = &monitor.alternate;
    let k = psi.alphabet().len();
    let mut index: HashMap<SubsetLabel, StateId> = HashMap::from([(initial.clone(), 0)]);
    let mut labels = vec![initial];
    let mut delta = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in 0..k {
            let step = psi.step_set(labels[i].members(), g);
            let target = redirect(&SubsetLabel::new(step).unwrap_or_else(|_| SubsetLabel::singleton(err)).with(err));
            let id = *index.entry(target.clone()).or_insert_with(|| {
                labels.push(target);
                queue.push_back(labels.len() - 1);
                labels.len() - 1
            });
            delta.push(id);
        }
    }
    let accepting: Vec<bool> = labels.iter().map(|l| l.members().iter().any(|&q| psi.is_accepting(q))).collect();
    let error = labels.iter().position(|l| l.members() == [err]);
    let dfa = Dfa::new(psi.alphabet().clone(), delta, 0, accepting, error)?;
    let subsets = LabeledDfa::new(dfa, labels)?;
    let (minimal, _) = subsets.minimize();
    Ok(AlternateMonitor { subsets, minimal, ..monitor.clone() })
}

/// Chooses at most `budget` labels: the initial label, `{error}` when
/// reachable, and `Q`, then the smallest remaining labels in breadth-first
/// order.
pub fn default_keep_heuristic(monitor: &AlternateMonitor, budget: usize) -> Result<Vec<SubsetLabel>> {
    let subsets = &monitor.subsets;
    let order = subsets.dfa.bfs_order();
    let err = SubsetLabel::singleton(monitor.property_error);
    let full = monitor.full_label();
    let mut mandatory = vec![subsets.label(subsets.dfa.initial()).clone()];
    if order.iter().any(|&q| subsets.label(q) == &err) {
        mandatory.push(err);
    }
    mandatory.push(full);
    mandatory.dedup();
    let mut seen = std::collections::HashSet::new();
    mandatory.retain(|l| seen.insert(l.clone()));
    if budget < mandatory.len() {
        return Err(Error::InvalidKeepSet(format!(
            "budget {budget} is below the {} mandatory labels",
            mandatory.len()
        )));
    }
    let mut rest: Vec<(usize, usize, &SubsetLabel)> = order
        .iter()
        .enumerate()
        .map(|(pos, &q)| (subsets.label(q).len(), pos, subsets.label(q)))
        .filter(|(_, _, l)| !seen.contains(*l))
        .collect();
    rest.sort();
    let mut keep = mandatory;
    keep.extend(rest.into_iter().take(budget - keep.len()).map(|(_, _, l)| l.clone()));
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{artificial_keep_set, artificial_nfa, safeiter, Q1, Q2, QERR};

    fn label(v: &[StateId]) -> SubsetLabel {
        SubsetLabel::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_model_reproduces_the_property() {
        let p = safeiter();
        let m = synthesize_optimal(&p, &LossModel::identity(p.alphabet())).unwrap();
        assert!(m.minimal.dfa.is_isomorphic(&p));
        assert!(monitorable(&m));
    }

    #[test]
    fn dropped_count_two_labels() {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let m = synthesize_optimal(&p, &model).unwrap();
        let w = |s: &str| m.gamma().encode(s.chars().map(|c| c.to_string())).unwrap();
        assert_eq!(m.label_after(&w("2nun2n")), &label(&[QERR]));
        assert_eq!(m.label_after(&w("c2uu")), &label(&[Q2, QERR]));
        assert_eq!(m.label_after(&w("2n2")), &label(&[Q1, Q2, QERR]));
        assert!(m.rejects(&w("2nun2n")));
        assert!(!m.rejects(&w("c2uu")));
    }

    #[test]
    fn sound_monitor_rejects_mixed() {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let s = synthesize_sound(&p, &model).unwrap();
        let w = s.gamma().encode(["c", "2", "u", "u"]).unwrap();
        assert!(s.rejects(&w));
        assert!(synthesize_sound(&artificial_nfa(), &LossModel::identity(artificial_nfa().alphabet())).is_err());
    }

    #[test]
    fn artificial_exact_and_approximate() {
        let p = artificial_nfa();
        let m = synthesize_optimal(&p, &LossModel::identity(p.alphabet())).unwrap();
        assert_eq!(m.num_states(), 8);
        let keep: Vec<_> = artificial_keep_set().iter().map(|l| label(l)).collect();
        let a = approximate(&m, &keep).unwrap();
        assert_eq!(a.subsets.num_states(), 6);
        let bcb = m.gamma().encode(["b", "c", "b"]).unwrap();
        assert!(m.rejects(&bcb));
        assert!(!a.rejects(&bcb));
    }

    #[test]
    fn keep_everything_is_identity() {
        let p = safeiter();
        let m = synthesize_optimal(&p, &LossModel::dropped_count(p.alphabet(), 2).unwrap()).unwrap();
        let keep = default_keep_heuristic(&m, 1000).unwrap();
        let a = approximate(&m, &keep).unwrap();
        assert!(a.minimal.dfa.is_isomorphic(&m.minimal.dfa));
        assert!(default_keep_heuristic(&m, 2).is_err());
    }

    #[test]
    fn approximation_preconditions() {
        let p = artificial_nfa();
        let m = synthesize_optimal(&p, &LossModel::identity(p.alphabet())).unwrap();
        assert!(approximate(&m, &[label(&[0, 3])]).is_err());
        assert!(approximate(&m, &[label(&[0, 1, 2, 3])]).is_err());
    }
}
