//! Brute-force ground truth for tests.
//!
//! Completions are enumerated word by word. To keep the enumeration finite,
//! each factor R⁻¹(γ) is cut at a length bound. The default bound is exact:
//! a finite factor is cut at its number of states, and an infinite one at
//! the pumping length of its product with the property's subset automaton.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::automata::{StateId, SubsetLabel, SymbolId, TransitionSystem};
use crate::injector::apply_filter;
use crate::lossmodel::{InverseSpec, LossModel};
use crate::synthesis::{AlternateMonitor, MonitorMode};
use crate::{Error, Result};

pub const DEFAULT_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    AllViolate,
    NoneViolate,
    Mixed,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Overrides the per-factor length bound.
    pub max_factor_len: Option<usize>,
    pub cap: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_factor_len: None, cap: DEFAULT_CAP }
    }
}

/// Sets of property states reached by completions, one set per completion
/// class; for a DFA property every set is a singleton.
pub type Reached = BTreeSet<Vec<StateId>>;

pub struct Oracle<'a, T: TransitionSystem + ?Sized> {
    property: &'a T,
    model: &'a LossModel,
    factors: Vec<Vec<Vec<SymbolId>>>,
    memo: HashMap<(Vec<StateId>, SymbolId), Reached>,
}

impl<'a, T: TransitionSystem + ?Sized> Oracle<'a, T> {
    pub fn new(property: &'a T, model: &'a LossModel) -> Result<Self> {
        Oracle::with_options(property, model, OracleOptions::default())
    }

    pub fn with_options(property: &'a T, model: &'a LossModel, opts: OracleOptions) -> Result<Self> {
        model.sigma().check_same(property.alphabet())?;
        let det_states = if property.is_deterministic() {
            property.num_states()
        } else {
            1usize.checked_shl(property.num_states() as u32).unwrap_or(usize::MAX)
        };
        let mut factors = Vec::with_capacity(model.gamma().len());
        for g in model.gamma().ids() {
            let bound = match opts.max_factor_len {
                Some(b) => b,
                None => match model.inverse(g) {
                    InverseSpec::Singleton(_) => 1,
                    InverseSpec::CountVector(c) => c.iter().sum::<u32>() as usize,
                    InverseSpec::Regular(nfa) if model.is_finite(g) => nfa.num_states(),
                    InverseSpec::Regular(nfa) => det_states.saturating_mul(nfa.num_states()),
                    InverseSpec::StateMap { .. } => {
                        return Err(Error::OracleUnsupported(format!(
                            "`{}` is a state map",
                            model.gamma().name(g)
                        )))
                    }
                },
            };
            factors.push(model.factor_words(g, bound, opts.cap)?);
        }
        Ok(Oracle { property, model, factors, memo: HashMap::new() })
    }

    pub fn factor(&self, gamma: SymbolId) -> &[Vec<SymbolId>] {
        &self.factors[gamma]
    }

    fn initial(&self) -> Reached {
        BTreeSet::from([vec![self.property.initial()]])
    }

    fn advance(&mut self, reached: &Reached, gamma: SymbolId) -> Reached {
        let mut out = BTreeSet::new();
        for set in reached {
            let key = (set.clone(), gamma);
            if let Some(r) = self.memo.get(&key) {
                out.extend(r.iter().cloned());
                continue;
            }
            let mut here = BTreeSet::new();
            for w in &self.factors[gamma] {
                let end = w.iter().fold(set.clone(), |s, &a| self.property.step_set(&s, a));
                here.insert(end);
            }
            out.extend(here.iter().cloned());
            self.memo.insert(key, here);
        }
        out
    }

    /// State sets reached by the completions of `y`.
    pub fn reached(&mut self, y: &[SymbolId]) -> Reached {
        let mut r = self.initial();
        for &g in y {
            r = self.advance(&r, g);
        }
        r
    }

    fn violates(&self, set: &[StateId]) -> bool {
        !set.iter().any(|&q| self.property.is_accepting(q))
    }

    fn classify_reached(&self, reached: &Reached) -> Classification {
        let bad = reached.iter().filter(|s| self.violates(s)).count();
        if bad == reached.len() {
            Classification::AllViolate
        } else if bad == 0 {
            Classification::NoneViolate
        } else {
            Classification::Mixed
        }
    }

    pub fn classify(&mut self, y: &[SymbolId]) -> Classification {
        let r = self.reached(y);
        self.classify_reached(&r)
    }

    /// Shortest `y` with `|y| <= max_len` all of whose completions violate.
    pub fn find_all_violating(&mut self, max_len: usize) -> Option<Vec<SymbolId>> {
        let start = self.initial();
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([(start, Vec::new())]);
        while let Some((r, y)) = queue.pop_front() {
            if self.classify_reached(&r) == Classification::AllViolate {
                return Some(y);
            }
            if y.len() == max_len {
                continue;
            }
            for g in self.model.gamma().ids() {
                let next = self.advance(&r, g);
                if seen.insert(next.clone()) {
                    let mut y2 = y.clone();
                    y2.push(g);
                    queue.push_back((next, y2));
                }
            }
        }
        None
    }
}

/// Shorthand for a one-off classification.
pub fn classify<T: TransitionSystem + ?Sized>(property: &T, model: &LossModel, y: &[SymbolId]) -> Result<Classification> {
    Ok(Oracle::new(property, model)?.classify(y))
}

/// The completion set of `y` as the concatenation of its factors, each
/// factor cut at `max_len`.
pub fn completions(model: &LossModel, y: &[SymbolId], max_len: usize, cap: usize) -> Result<BTreeSet<Vec<SymbolId>>> {
    let mut out: Vec<Vec<SymbolId>> = vec![Vec::new()];
    for &g in y {
        let words = model.factor_words(g, max_len, cap)?;
        if out.len().saturating_mul(words.len()) > cap {
            return Err(Error::EnumerationCap { what: "completions", cap });
        }
        out = out
            .iter()
            .flat_map(|prefix| {
                words.iter().map(move |w| {
                    let mut x = prefix.clone();
                    x.extend_from_slice(w);
                    x
                })
            })
            .collect();
    }
    Ok(out.into_iter().collect())
}

/// Every lossy image of `x` over segmentations into non-empty segments.
pub fn filter_images(model: &LossModel, x: &[SymbolId]) -> Result<BTreeSet<Vec<SymbolId>>> {
    let mut out = BTreeSet::new();
    if x.is_empty() {
        out.insert(Vec::new());
        return Ok(out);
    }
    let n = x.len();
    // bit i set: a cut after position i
    for cuts in 0u64..(1u64 << (n - 1)) {
        let mut lens = Vec::new();
        let mut start = 0;
        for i in 0..n {
            if i == n - 1 || cuts >> i & 1 == 1 {
                lens.push(i + 1 - start);
                start = i + 1;
            }
        }
        let mut choices: Vec<Vec<SymbolId>> = Vec::with_capacity(lens.len());
        let mut pos = 0;
        for &len in &lens {
            let seg = &x[pos..pos + len];
            let gs: Vec<SymbolId> =
                model.gamma().ids().filter(|&g| model.segment_matches(g, seg).unwrap_or(false)).collect();
            choices.push(gs);
            pos += len;
        }
        let mut stack: Vec<Vec<SymbolId>> = vec![Vec::new()];
        for c in &choices {
            stack = stack
                .into_iter()
                .flat_map(|p| {
                    c.iter().map(move |&g| {
                        let mut p2 = p.clone();
                        p2.push(g);
                        p2
                    })
                })
                .collect();
        }
        for gammas in stack {
            let segmentation: Vec<(usize, SymbolId)> = lens.iter().copied().zip(gammas).collect();
            out.insert(apply_filter(model, x, &segmentation)?);
        }
    }
    Ok(out)
}

/// `{x | |x| <= max_len, y ∈ filter_images(x)}`.
pub fn completions_by_filters(model: &LossModel, y: &[SymbolId], max_len: usize) -> Result<BTreeSet<Vec<SymbolId>>> {
    let k = model.sigma().len();
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<SymbolId>> = vec![Vec::new()];
    for len in 0..=max_len {
        for x in &layer {
            if filter_images(model, x)?.contains(y) {
                out.insert(x.clone());
            }
        }
        if len < max_len {
            layer = layer
                .iter()
                .flat_map(|x| {
                    (0..k).map(move |a| {
                        let mut x2 = x.clone();
                        x2.push(a);
                        x2
                    })
                })
                .collect();
        }
    }
    Ok(out)
}

/// What a monitor is expected to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Complete: reject ⇔ all completions violate. Sound: reject ⇔ some does.
    Exact,
    /// Reject ⇒ all completions violate.
    CompleteOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub y: Vec<String>,
    pub classification: Classification,
    pub monitor_rejects: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelViolation {
    pub y: Vec<String>,
    pub label: SubsetLabel,
    pub missing: Vec<StateId>,
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub checked: usize,
    pub rejected: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Labels that miss a state some completion reaches.
    pub label_violations: Vec<LabelViolation>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.label_violations.is_empty()
    }
}

/// Checks `monitor` on every `y` with `|y| <= max_y_len`.
pub fn check_monitor_against_oracle<T: TransitionSystem + ?Sized>(
    property: &T,
    model: &LossModel,
    monitor: &AlternateMonitor,
    max_y_len: usize,
) -> Result<OracleReport> {
    check_with(property, model, monitor, max_y_len, Expectation::Exact)
}

pub fn check_with<T: TransitionSystem + ?Sized>(
    property: &T,
    model: &LossModel,
    monitor: &AlternateMonitor,
    max_y_len: usize,
    expectation: Expectation,
) -> Result<OracleReport> {
    model.gamma().check_same(monitor.gamma())?;
    let mut oracle = Oracle::new(property, model)?;
    let dfa = &monitor.minimal.dfa;
    let reject = monitor.reject_state();
    let err = monitor.property_error;
    let mut report = OracleReport::default();
    let mut stack = vec![(Vec::<SymbolId>::new(), oracle.initial(), dfa.initial())];
    while let Some((y, reached, q)) = stack.pop() {
        report.checked += 1;
        let class = oracle.classify_reached(&reached);
        let rejects = Some(q) == reject;
        report.rejected += rejects as usize;
        let ok = match (expectation, monitor.mode) {
            (Expectation::CompleteOnly, _) => !rejects || class == Classification::AllViolate,
            (Expectation::Exact, MonitorMode::Complete) => rejects == (class == Classification::AllViolate),
            (Expectation::Exact, MonitorMode::Sound) => rejects == (class != Classification::NoneViolate),
        };
        let names = || model.gamma().decode(&y).into_iter().map(String::from).collect::<Vec<_>>();
        if !ok {
            report.counterexamples.push(Counterexample { y: names(), classification: class, monitor_rejects: rejects });
        }
        let label = monitor.minimal.label(q);
        let collapsed = monitor.mode == MonitorMode::Sound && label.members() == [err];
        if !collapsed {
            let missing: BTreeSet<StateId> =
                reached.iter().flatten().copied().filter(|&s| !label.contains(s)).collect();
            if !missing.is_empty() {
                report.label_violations.push(LabelViolation {
                    y: names(),
                    label: label.clone(),
                    missing: missing.into_iter().collect(),
                });
            }
        }
        if y.len() < max_y_len {
            for g in model.gamma().ids().rev() {
                let next = oracle.advance(&reached, g);
                let mut y2 = y.clone();
                y2.push(g);
                stack.push((y2, next, dfa.step(q, g)));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::safeiter;
    use crate::synthesis::synthesize_optimal;

    fn word(model: &LossModel, s: &str) -> Vec<SymbolId> {
        model.gamma().encode(s.chars().map(String::from)).unwrap()
    }

    #[test]
    fn completion_counts() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        assert_eq!(completions(&m, &word(&m, "c2uu"), 6, DEFAULT_CAP).unwrap().len(), 9);
        assert_eq!(completions(&m, &word(&m, "c2un"), 6, DEFAULT_CAP).unwrap().len(), 9);
        assert_eq!(completions(&m, &[], 6, DEFAULT_CAP).unwrap(), BTreeSet::from([vec![]]));
        let all = completions(&m, &word(&m, "2nun2n"), 6, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 81);
        assert!(all.iter().all(|x| !p.accepts(x)));
    }

    #[test]
    fn classifications() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        assert_eq!(classify(&p, &m, &word(&m, "2nun2n")).unwrap(), Classification::AllViolate);
        assert_eq!(classify(&p, &m, &word(&m, "c2uu")).unwrap(), Classification::Mixed);
        let id = LossModel::identity(p.alphabet());
        assert_eq!(classify(&p, &id, &word(&id, "cnnu")).unwrap(), Classification::NoneViolate);
    }

    #[test]
    fn segmentations_of_o2() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let x = p.alphabet().encode("cnnuu".chars().map(String::from)).unwrap();
        let images = filter_images(&m, &x).unwrap();
        for y in ["c2uu", "cnnu1", "2n2"] {
            assert!(images.contains(&word(&m, y)), "{y}");
        }
    }

    #[test]
    fn safeiter_dropped_count_passes() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let mon = synthesize_optimal(&p, &m).unwrap();
        let report = check_monitor_against_oracle(&p, &m, &mon, 4).unwrap();
        assert!(report.passed(), "{:?}", report.counterexamples);
        assert_eq!(report.checked, (0..=4).map(|k| 5usize.pow(k)).sum::<usize>());
        assert!(report.rejected > 0);
    }

    #[test]
    fn state_maps_are_unsupported() {
        let p = crate::bundled::loop_property();
        let m = LossModel::loop_summary(&p, "k", crate::bundled::loop_region_map()).unwrap();
        assert!(matches!(Oracle::new(&p, &m), Err(Error::OracleUnsupported(_))));
    }
}
