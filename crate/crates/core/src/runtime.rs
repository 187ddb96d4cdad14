//! Incremental monitoring.

use std::fmt;

use crate::automata::{Alphabet, Dfa, LabeledDfa, StateId, SubsetLabel, SymbolId};
use crate::synthesis::AlternateMonitor;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// No continuation can violate.
    True,
    /// Violation reported.
    False,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// An executable monitor: a DFA, an optional rejecting state, and the states
/// from which rejection is unreachable.
#[derive(Clone, Debug)]
pub struct Monitor {
    dfa: Dfa,
    labels: Option<Vec<SubsetLabel>>,
    reject: Option<StateId>,
    safe: Vec<bool>,
}

impl Monitor {
    fn build(dfa: Dfa, labels: Option<Vec<SubsetLabel>>) -> Self {
        let reject = dfa.error();
        let safe = match reject {
            Some(r) => dfa.can_reach(r).into_iter().map(|x| !x).collect(),
            None => vec![true; dfa.num_states()],
        };
        Monitor { dfa, labels, reject, safe }
    }

    /// Monitors a property directly; the rejecting state is its error state.
    pub fn from_property(property: &Dfa) -> Self {
        Monitor::build(property.clone(), None)
    }

    pub fn from_alternate(monitor: &AlternateMonitor) -> Self {
        Monitor::from_labeled(&monitor.minimal)
    }

    pub fn from_labeled(l: &LabeledDfa) -> Self {
        Monitor::build(l.dfa.clone(), Some(l.labels.clone()))
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.dfa.alphabet()
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn label(&self, q: StateId) -> Option<&SubsetLabel> {
        self.labels.as_ref().map(|l| &l[q])
    }

    pub fn reject_state(&self) -> Option<StateId> {
        self.reject
    }

    pub fn verdict_of(&self, q: StateId) -> Verdict {
        if Some(q) == self.reject {
            Verdict::False
        } else if self.safe[q] {
            Verdict::True
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn session(&self) -> MonitorSession<'_> {
        MonitorSession::new(self)
    }

    pub fn run(&self, word: &[SymbolId]) -> Result<RunOutcome> {
        let mut s = self.session();
        for &a in word {
            s.step(a)?;
        }
        Ok(s.outcome())
    }

    pub fn run_tokens<I, S>(&self, tokens: I) -> Result<RunOutcome>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut s = self.session();
        for t in tokens {
            s.step_symbol(t.as_ref())?;
        }
        Ok(s.outcome())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub state: StateId,
    pub label: Option<SubsetLabel>,
    /// Index of the symbol that first produced `False`.
    pub first_violation: Option<usize>,
    pub events_processed: usize,
}

#[derive(Clone, Debug)]
pub struct MonitorSession<'m> {
    monitor: &'m Monitor,
    current: StateId,
    verdict: Verdict,
    events_processed: usize,
    first_violation: Option<usize>,
    poisoned: bool,
}

impl<'m> MonitorSession<'m> {
    pub fn new(monitor: &'m Monitor) -> Self {
        let current = monitor.dfa.initial();
        MonitorSession {
            monitor,
            current,
            verdict: monitor.verdict_of(current),
            events_processed: 0,
            first_violation: None,
            poisoned: false,
        }
    }

    pub fn step(&mut self, symbol: SymbolId) -> Result<Verdict> {
        if self.poisoned {
            return Err(Error::PoisonedSession);
        }
        if symbol >= self.monitor.alphabet().len() {
            self.poisoned = true;
            return Err(Error::UnknownSymbol(format!("#{symbol}")));
        }
        self.current = self.monitor.dfa.step(self.current, symbol);
        self.verdict = self.monitor.verdict_of(self.current);
        if self.verdict == Verdict::False && self.first_violation.is_none() {
            self.first_violation = Some(self.events_processed);
        }
        self.events_processed += 1;
        Ok(self.verdict)
    }

    pub fn step_symbol(&mut self, name: &str) -> Result<Verdict> {
        if self.poisoned {
            return Err(Error::PoisonedSession);
        }
        match self.monitor.alphabet().id(name) {
            Some(a) => self.step(a),
            None => {
                self.poisoned = true;
                Err(Error::UnknownSymbol(name.to_string()))
            }
        }
    }

    pub fn current(&self) -> StateId {
        self.current
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn label(&self) -> Option<&SubsetLabel> {
        self.monitor.label(self.current)
    }

    pub fn events_processed(&self) -> usize {
        self.events_processed
    }

    pub fn is_poisoned(&self) -> bool {
        self.poisoned
    }

    pub fn outcome(&self) -> RunOutcome {
        RunOutcome {
            verdict: self.verdict,
            state: self.current,
            label: self.label().cloned(),
            first_violation: self.first_violation,
            events_processed: self.events_processed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{safeiter, QERR};

    #[test]
    fn primary_violates_at_first_next_after_update() {
        let m = Monitor::from_property(&safeiter());
        let out = m.run_tokens("cnnunnun".chars().map(String::from)).unwrap();
        assert_eq!(out.verdict, Verdict::False);
        assert_eq!(out.first_violation, Some(4));
        assert_eq!(out.state, QERR);
        assert_eq!(out.events_processed, 8);
    }

    #[test]
    fn empty_run_stays_initial() {
        let m = Monitor::from_property(&safeiter());
        let out = m.run(&[]).unwrap();
        assert_eq!(out.verdict, Verdict::Inconclusive);
        assert_eq!(out.state, 0);
    }

    #[test]
    fn unknown_symbols_poison() {
        let m = Monitor::from_property(&safeiter());
        let mut s = m.session();
        s.step_symbol("c").unwrap();
        assert!(matches!(s.step_symbol("x"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(s.step_symbol("n"), Err(Error::PoisonedSession)));
        assert_eq!(s.events_processed(), 1);
    }
}
