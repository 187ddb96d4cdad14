//! Finite-state transducers and the generalized (regex-labelled) variant.

use std::collections::BTreeSet;

use crate::automata::{compile_regex, Alphabet, StateId, SymbolId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NftTransition {
    pub from: StateId,
    pub input: SymbolId,
    pub to: StateId,
    /// `None` is the empty output.
    pub output: Option<SymbolId>,
}

/// Nondeterministic transducer: every transition reads one input symbol and
/// writes at most one output symbol.
#[derive(Clone, Debug)]
pub struct Nft {
    pub input: Alphabet,
    pub output: Alphabet,
    pub num_states: usize,
    pub initial: StateId,
    pub finals: Vec<bool>,
    pub transitions: Vec<NftTransition>,
}

impl Nft {
    /// All pairs `(x, y)` with `|x| <= max_input_len` such that some path from
    /// the initial state to a final state reads `x` and writes `y`.
    pub fn relation(&self, max_input_len: usize) -> BTreeSet<(Vec<SymbolId>, Vec<SymbolId>)> {
        let mut out = BTreeSet::new();
        let mut by_state = vec![Vec::new(); self.num_states];
        for t in &self.transitions {
            by_state[t.from].push(*t);
        }
        let mut stack = vec![(self.initial, Vec::new(), Vec::new())];
        while let Some((q, x, y)) = stack.pop() {
            if self.finals[q] {
                out.insert((x.clone(), y.clone()));
            }
            if x.len() == max_input_len {
                continue;
            }
            for t in &by_state[q] {
                let mut x2 = x.clone();
                x2.push(t.input);
                let mut y2 = y.clone();
                y2.extend(t.output);
                stack.push((t.to, x2, y2));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnftTransition {
    pub from: StateId,
    pub to: StateId,
    /// Pattern in the event regex dialect, over the input alphabet.
    pub regex: String,
    pub output: Option<SymbolId>,
}

/// Generalized transducer: a transition reads any string of its regex and
/// writes one output symbol (or nothing).
#[derive(Clone, Debug)]
pub struct Gnft {
    pub input: Alphabet,
    pub output: Alphabet,
    pub num_states: usize,
    pub initial: StateId,
    pub final_state: StateId,
    pub transitions: Vec<GnftTransition>,
}

impl Gnft {
    pub fn validate(&self) -> Result<()> {
        if self.initial == self.final_state {
            return Err(Error::InvalidAutomaton("GNFT initial and final states must differ".into()));
        }
        for t in &self.transitions {
            if t.from >= self.num_states || t.to >= self.num_states {
                return Err(Error::InvalidAutomaton(format!("GNFT edge {} -> {} out of range", t.from, t.to)));
            }
            if t.to == self.initial {
                return Err(Error::InvalidAutomaton("GNFT transition into the initial state".into()));
            }
            if t.from == self.final_state {
                return Err(Error::InvalidAutomaton("GNFT transition out of the final state".into()));
            }
            if let Some(o) = t.output {
                if o >= self.output.len() {
                    return Err(Error::InvalidAutomaton(format!("output symbol {o} out of range")));
                }
            }
        }
        Ok(())
    }
}

/// Expands every `(regex, γ)` transition `p -> q` into a copy of the
/// regex's NFA hung off `p`, with `γ` written on the transitions that enter
/// an accepting copy state and redirected to `q`. Transitions whose regex
/// accepts ε become ε-moves, which are then eliminated by closure.
///
/// An ε-input transition that writes a symbol has no NFT counterpart and is
/// rejected.
pub fn gnft_to_nft(g: &Gnft) -> Result<Nft> {
    g.validate()?;
    let mut num_states = g.num_states;
    let mut eps: Vec<(StateId, StateId)> = Vec::new();
    let mut edges: Vec<NftTransition> = Vec::new();
    for t in &g.transitions {
        let nfa = compile_regex(&t.regex, &g.input)?;
        if nfa.is_language_empty() {
            continue;
        }
        let base = num_states;
        num_states += nfa.num_states();
        eps.push((t.from, base + nfa.initial()));
        if nfa.is_accepting(nfa.initial()) {
            if t.output.is_some() {
                return Err(Error::InvalidAutomaton(format!(
                    "regex `{}` accepts the empty string but writes a symbol",
                    t.regex
                )));
            }
            eps.push((t.from, t.to));
        }
        for (s, a, r) in nfa.transitions() {
            edges.push(NftTransition { from: base + s, input: a, to: base + r, output: None });
            if nfa.is_accepting(r) {
                edges.push(NftTransition { from: base + s, input: a, to: t.to, output: t.output });
            }
        }
    }

    // ε-closure elimination
    let mut eps_out = vec![Vec::new(); num_states];
    for &(p, q) in &eps {
        eps_out[p].push(q);
    }
    let closure = |q: StateId| {
        let mut seen = vec![false; num_states];
        let mut stack = vec![q];
        seen[q] = true;
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            out.push(p);
            for &r in &eps_out[p] {
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        out
    };
    let mut by_state = vec![Vec::new(); num_states];
    for e in &edges {
        by_state[e.from].push(*e);
    }
    let mut finals = vec![false; num_states];
    let mut transitions = BTreeSet::new();
    for q in 0..num_states {
        for p in closure(q) {
            if p == g.final_state {
                finals[q] = true;
            }
            for e in &by_state[p] {
                transitions.insert(NftTransition { from: q, ..*e });
            }
        }
    }

    // keep states reachable from the initial state
    let mut map = vec![usize::MAX; num_states];
    map[g.initial] = 0;
    let mut order = vec![g.initial];
    let mut i = 0;
    let all: Vec<_> = transitions.into_iter().collect();
    while i < order.len() {
        let q = order[i];
        i += 1;
        for e in all.iter().filter(|e| e.from == q) {
            if map[e.to] == usize::MAX {
                map[e.to] = order.len();
                order.push(e.to);
            }
        }
    }
    let transitions = all
        .into_iter()
        .filter(|e| map[e.from] != usize::MAX)
        .map(|e| NftTransition { from: map[e.from], to: map[e.to], ..e })
        .collect();
    Ok(Nft {
        input: g.input.clone(),
        output: g.output.clone(),
        num_states: order.len(),
        initial: 0,
        finals: order.iter().map(|&q| finals[q]).collect(),
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_transition_emits_once_at_the_end() {
        let input = Alphabet::new(["a"]).unwrap();
        let output = Alphabet::new(["g"]).unwrap();
        let g = Gnft {
            input,
            output,
            num_states: 2,
            initial: 0,
            final_state: 1,
            transitions: vec![GnftTransition { from: 0, to: 1, regex: "a a*".into(), output: Some(0) }],
        };
        let nft = gnft_to_nft(&g).unwrap();
        let rel = nft.relation(3);
        let expected: BTreeSet<_> = (1..=3).map(|n| (vec![0; n], vec![0])).collect();
        assert_eq!(rel, expected);
    }

    #[test]
    fn paths_must_reach_the_final_state() {
        let input = Alphabet::new(["a", "b"]).unwrap();
        let output = Alphabet::new(["g"]).unwrap();
        let g = Gnft {
            input,
            output,
            num_states: 3,
            initial: 0,
            final_state: 2,
            transitions: vec![
                GnftTransition { from: 0, to: 1, regex: "a".into(), output: Some(0) },
                GnftTransition { from: 1, to: 2, regex: "b".into(), output: Some(0) },
            ],
        };
        assert_eq!(gnft_to_nft(&g).unwrap().relation(1), BTreeSet::new());
        assert_eq!(gnft_to_nft(&g).unwrap().relation(2).len(), 1);
    }

    #[test]
    fn rejects_edges_into_initial() {
        let input = Alphabet::new(["a"]).unwrap();
        let g = Gnft {
            input: input.clone(),
            output: input,
            num_states: 2,
            initial: 0,
            final_state: 1,
            transitions: vec![GnftTransition { from: 0, to: 0, regex: "a".into(), output: None }],
        };
        assert!(gnft_to_nft(&g).is_err());
    }
}
