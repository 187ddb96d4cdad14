use std::collections::VecDeque;

use crate::automata::{Alphabet, Nfa, StateId, SymbolId, TransitionSystem};
use crate::{Error, Result};

/// Total deterministic automaton.
///
/// When `error` is set it must be a non-accepting trap. Finite-state
/// properties additionally accept every state except `error`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    delta: Vec<StateId>,
    initial: StateId,
    accepting: Vec<bool>,
    error: Option<StateId>,
}

impl Dfa {
    /// `delta` is row-major: the successor of `q` on `a` is `delta[q * |Σ| + a]`.
    pub fn new(
        alphabet: Alphabet,
        delta: Vec<StateId>,
        initial: StateId,
        accepting: Vec<bool>,
        error: Option<StateId>,
    ) -> Result<Self> {
        let k = alphabet.len();
        let n = accepting.len();
        if k == 0 {
            return Err(Error::InvalidAutomaton("empty alphabet".into()));
        }
        if delta.len() != n * k {
            return Err(Error::InvalidAutomaton(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * k
            )));
        }
        if initial >= n {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        if let Some(&t) = delta.iter().find(|&&t| t >= n) {
            return Err(Error::InvalidAutomaton(format!("target state {t} out of range")));
        }
        if let Some(e) = error {
            if e >= n {
                return Err(Error::InvalidAutomaton(format!("error state {e} out of range")));
            }
            if accepting[e] {
                return Err(Error::InvalidAutomaton("error state must not be accepting".into()));
            }
            if (0..k).any(|a| delta[e * k + a] != e) {
                return Err(Error::InvalidAutomaton("error state must be a trap".into()));
            }
        }
        Ok(Dfa { alphabet, delta, initial, accepting, error })
    }

    /// A finite-state property: every state but `error` accepts.
    pub fn property(alphabet: Alphabet, delta: Vec<StateId>, initial: StateId, error: StateId) -> Result<Self> {
        let n = delta.len() / alphabet.len().max(1);
        let accepting = (0..n).map(|q| q != error).collect();
        Dfa::new(alphabet, delta, initial, accepting, Some(error))
    }

    /// Builds a property from a partial edge list; missing transitions go to
    /// the error state, which is added as the last state.
    pub fn property_from_edges(
        alphabet: Alphabet,
        num_states: usize,
        initial: StateId,
        edges: &[(StateId, &str, StateId)],
    ) -> Result<Self> {
        let k = alphabet.len();
        let error = num_states;
        let mut delta = vec![error; (num_states + 1) * k];
        for &(from, symbol, to) in edges {
            let a = alphabet.require(symbol)?;
            if from >= num_states || to > num_states {
                return Err(Error::InvalidAutomaton(format!("edge {from} -{symbol}-> {to} out of range")));
            }
            delta[from * k + a] = to;
        }
        Dfa::property(alphabet, delta, initial, error)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn error(&self) -> Option<StateId> {
        self.error
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn delta(&self) -> &[StateId] {
        &self.delta
    }

    #[inline]
    pub fn step(&self, q: StateId, a: SymbolId) -> StateId {
        self.delta[q * self.alphabet.len() + a]
    }

    pub fn run_from(&self, q: StateId, word: &[SymbolId]) -> StateId {
        word.iter().fold(q, |q, &a| self.step(q, a))
    }

    pub fn run(&self, word: &[SymbolId]) -> StateId {
        self.run_from(self.initial, word)
    }

    pub fn accepts(&self, word: &[SymbolId]) -> bool {
        self.accepting[self.run(word)]
    }

    /// Whether every non-error state accepts and the error state rejects.
    pub fn is_property(&self) -> bool {
        match self.error {
            Some(e) => (0..self.num_states()).all(|q| self.accepting[q] == (q != e)),
            None => false,
        }
    }

    pub fn with_error(mut self, error: Option<StateId>) -> Result<Self> {
        self.error = None;
        Dfa::new(self.alphabet, self.delta, self.initial, self.accepting, error)
    }

    pub fn to_nfa(&self) -> Nfa {
        let k = self.alphabet.len();
        let mut nfa = Nfa::new(self.alphabet.clone(), self.num_states(), self.initial);
        for q in 0..self.num_states() {
            nfa.set_accepting(q, self.accepting[q]);
            for a in 0..k {
                nfa.add_transition(q, a, self.step(q, a));
            }
        }
        nfa.set_error(self.error).expect("a valid DFA error state is a valid NFA error state");
        nfa
    }

    /// States reachable from the initial state, in breadth-first order
    /// (symbols visited in alphabet order).
    pub fn bfs_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for a in self.alphabet.ids() {
                let t = self.step(q, a);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Restricts to `order` (a set of states closed under transitions) and
    /// renumbers state `order[i]` as `i`. Returns the new automaton and the
    /// old-to-new map.
    pub(crate) fn renumber(&self, order: &[StateId]) -> (Dfa, Vec<Option<StateId>>) {
        let k = self.alphabet.len();
        let mut map = vec![None; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            map[q] = Some(i);
        }
        let mut delta = Vec::with_capacity(order.len() * k);
        for &q in order {
            for a in 0..k {
                delta.push(map[self.step(q, a)].expect("renumbering set must be closed"));
            }
        }
        let dfa = Dfa {
            alphabet: self.alphabet.clone(),
            delta,
            initial: map[self.initial].expect("initial state must be kept"),
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            error: self.error.and_then(|e| map[e]),
        };
        (dfa, map)
    }

    /// Reachable part renumbered in breadth-first order. Two DFAs are
    /// isomorphic iff their canonical forms are equal.
    pub fn canonical(&self) -> Dfa {
        self.renumber(&self.bfs_order()).0
    }

    pub fn is_isomorphic(&self, other: &Dfa) -> bool {
        self.canonical() == other.canonical()
    }

    /// Moves the error state (if any) to the last id, keeping the relative
    /// order of the others.
    pub fn error_last(&self) -> Dfa {
        match self.error {
            None => self.clone(),
            Some(e) => {
                let mut order: Vec<_> = (0..self.num_states()).filter(|&q| q != e).collect();
                order.push(e);
                self.renumber(&order).0
            }
        }
    }

    /// States from which no accepting state is reachable.
    pub fn dead_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let k = self.alphabet.len();
        let mut preds = vec![Vec::new(); n];
        for q in 0..n {
            for a in 0..k {
                preds[self.step(q, a)].push(q);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<_> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live.into_iter().map(|l| !l).collect()
    }

    /// For each state, whether `target` is reachable from it.
    pub fn can_reach(&self, target: StateId) -> Vec<bool> {
        let n = self.num_states();
        let mut preds = vec![Vec::new(); n];
        for q in 0..n {
            for a in self.alphabet.ids() {
                preds[self.step(q, a)].push(q);
            }
        }
        let mut reach = vec![false; n];
        reach[target] = true;
        let mut stack = vec![target];
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !reach[p] {
                    reach[p] = true;
                    stack.push(p);
                }
            }
        }
        reach
    }
}

impl TransitionSystem for Dfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn num_states(&self) -> usize {
        self.accepting.len()
    }
    fn initial(&self) -> StateId {
        self.initial
    }
    fn error(&self) -> Option<StateId> {
        self.error
    }
    fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }
    fn extend_successors(&self, state: StateId, symbol: SymbolId, out: &mut Vec<StateId>) {
        out.push(self.step(state, symbol));
    }
    fn is_deterministic(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn error_must_be_a_trap() {
        let err = Dfa::new(ab(), vec![1, 1, 0, 1], 0, vec![true, false], Some(1));
        assert!(matches!(err, Err(Error::InvalidAutomaton(_))));
    }

    #[test]
    fn edges_are_error_completed() {
        let dfa = Dfa::property_from_edges(ab(), 1, 0, &[(0, "a", 0)]).unwrap();
        assert_eq!(dfa.num_states(), 2);
        assert_eq!(dfa.step(0, 1), 1);
        assert!(dfa.accepts(&[0, 0]));
        assert!(!dfa.accepts(&[0, 1, 0]));
        assert!(dfa.is_property());
    }

    #[test]
    fn canonical_form_ignores_numbering() {
        let a = Dfa::new(ab(), vec![1, 0, 1, 1], 0, vec![true, false], None).unwrap();
        let b = Dfa::new(ab(), vec![0, 0, 0, 1], 1, vec![false, true], None).unwrap();
        assert!(a.is_isomorphic(&b));
    }
}
