use crate::automata::{Alphabet, StateId, SymbolId, TransitionSystem};
use crate::{Error, Result};

/// Nondeterministic automaton without ε-transitions.
///
/// Transition sets may be empty. If `error` is set it is a non-accepting
/// trap with a self-loop on every symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    // delta[q * |Σ| + a], each sorted and deduplicated
    delta: Vec<Vec<StateId>>,
    initial: StateId,
    accepting: Vec<bool>,
    error: Option<StateId>,
}

impl Nfa {
    /// `num_states` states, none accepting, no transitions.
    pub fn new(alphabet: Alphabet, num_states: usize, initial: StateId) -> Self {
        assert!(initial < num_states.max(1), "initial state out of range");
        let k = alphabet.len();
        Nfa {
            alphabet,
            delta: vec![Vec::new(); num_states.max(1) * k],
            initial,
            accepting: vec![false; num_states.max(1)],
            error: None,
        }
    }

    /// An NFA property: every state but `error` accepts and unspecified
    /// transitions stay empty. `error` receives its self-loops here.
    pub fn property(
        alphabet: Alphabet,
        num_states: usize,
        initial: StateId,
        error: StateId,
        edges: &[(StateId, &str, StateId)],
    ) -> Result<Self> {
        let mut nfa = Nfa::new(alphabet, num_states, initial);
        for q in 0..num_states {
            nfa.set_accepting(q, q != error);
        }
        for &(from, symbol, to) in edges {
            let a = nfa.alphabet.require(symbol)?;
            if from >= num_states || to >= num_states {
                return Err(Error::InvalidAutomaton(format!("edge {from} -{symbol}-> {to} out of range")));
            }
            nfa.add_transition(from, a, to);
        }
        for a in nfa.alphabet.ids() {
            nfa.add_transition(error, a, error);
        }
        nfa.set_error(Some(error))?;
        Ok(nfa)
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        let id = self.accepting.len();
        self.accepting.push(accepting);
        self.delta.extend((0..self.alphabet.len()).map(|_| Vec::new()));
        id
    }

    pub fn add_transition(&mut self, from: StateId, symbol: SymbolId, to: StateId) {
        assert!(to < self.accepting.len(), "target state out of range");
        let k = self.alphabet.len();
        let row = &mut self.delta[from * k + symbol];
        if let Err(pos) = row.binary_search(&to) {
            row.insert(pos, to);
        }
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn set_initial(&mut self, q: StateId) {
        assert!(q < self.accepting.len());
        self.initial = q;
    }

    pub fn set_error(&mut self, error: Option<StateId>) -> Result<()> {
        if let Some(e) = error {
            if e >= self.num_states() {
                return Err(Error::InvalidAutomaton(format!("error state {e} out of range")));
            }
            if self.accepting[e] {
                return Err(Error::InvalidAutomaton("error state must not be accepting".into()));
            }
            if self.alphabet.ids().any(|a| self.successors(e, a) != [e]) {
                return Err(Error::InvalidAutomaton("error state must be a trap".into()));
            }
        }
        self.error = error;
        Ok(())
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

    pub fn successors(&self, q: StateId, a: SymbolId) -> &[StateId] {
        &self.delta[q * self.alphabet.len() + a]
    }

    /// Adds a fresh non-accepting trap as the error state and sends every
    /// empty transition set to it. No-op if an error state already exists.
    pub fn with_error_trap(&self) -> Nfa {
        if self.error.is_some() {
            return self.clone();
        }
        let mut nfa = self.clone();
        let e = nfa.add_state(false);
        let k = nfa.alphabet.len();
        for q in 0..nfa.num_states() {
            for a in 0..k {
                if nfa.delta[q * k + a].is_empty() {
                    nfa.delta[q * k + a].push(e);
                }
            }
        }
        nfa.error = Some(e);
        nfa
    }

    /// Keeps only states reachable from the initial state.
    pub fn trim(&self) -> Nfa {
        let n = self.num_states();
        let mut seen = vec![false; n];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for a in self.alphabet.ids() {
                for &t in self.successors(q, a) {
                    if !seen[t] {
                        seen[t] = true;
                        order.push(t);
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; n];
        for (i, &q) in order.iter().enumerate() {
            map[q] = i;
        }
        let mut out = Nfa::new(self.alphabet.clone(), order.len(), 0);
        for (i, &q) in order.iter().enumerate() {
            out.accepting[i] = self.accepting[q];
            for a in self.alphabet.ids() {
                for &t in self.successors(q, a) {
                    out.add_transition(i, a, map[t]);
                }
            }
        }
        out.error = self.error.filter(|&e| seen[e]).map(|e| map[e]);
        out
    }

    /// Whether some accepting state is reachable.
    pub fn is_language_empty(&self) -> bool {
        let t = self.trim();
        !t.accepting.iter().any(|&a| a)
    }

    /// A shortest accepted word, if any.
    pub fn shortest_word(&self) -> Option<Vec<SymbolId>> {
        let n = self.num_states();
        let mut parent: Vec<Option<(StateId, SymbolId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut queue = std::collections::VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for a in self.alphabet.ids() {
                for &t in self.successors(q, a) {
                    if !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((q, a));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, SymbolId, StateId)> + '_ {
        let k = self.alphabet.len();
        self.delta
            .iter()
            .enumerate()
            .flat_map(move |(i, row)| row.iter().map(move |&t| (i / k, i % k, t)))
    }
}

impl TransitionSystem for Nfa {
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
        out.extend_from_slice(self.successors(state, symbol));
    }
    fn is_deterministic(&self) -> bool {
        self.delta.iter().all(|row| row.len() == 1)
    }
}
