//! Finite automata kernel: DFAs and NFAs with a trap error state, regex
//! compilation, subset construction with labels, minimization with merge
//! classes, product constructions and transducers.

mod alphabet;
mod dfa;
pub mod json;
mod minimize;
mod nfa;
mod product;
pub mod regex;
mod subset;
pub mod transducer;

pub use alphabet::Alphabet;
pub use dfa::Dfa;
pub use minimize::MergeClasses;
pub use nfa::Nfa;
pub use product::{complement, includes, intersect, is_empty, reachable_states, states_reachable_via};
pub use regex::compile_regex;
pub use subset::{determinize, determinize_with, DeterminizeOptions, LabeledDfa, SubsetLabel, SubsetMode};
pub use transducer::{gnft_to_nft, Gnft, GnftTransition, Nft, NftTransition};

pub type StateId = usize;
pub type SymbolId = usize;

/// Default bound on the number of subsets materialized by the subset construction.
pub const DEFAULT_SUBSET_CAP: usize = 1 << 20;

/// Read-only view of a (possibly nondeterministic) transition relation.
///
/// Properties are interpreted with the usual convention: an execution
/// violates the property when none of the states it can reach is accepting.
pub trait TransitionSystem {
    fn alphabet(&self) -> &Alphabet;
    fn num_states(&self) -> usize;
    fn initial(&self) -> StateId;
    fn error(&self) -> Option<StateId>;
    fn is_accepting(&self, state: StateId) -> bool;
    /// Appends the successors of `state` on `symbol` to `out`.
    fn extend_successors(&self, state: StateId, symbol: SymbolId, out: &mut Vec<StateId>);
    fn is_deterministic(&self) -> bool;

    /// Image of a state set under one symbol, sorted and deduplicated.
    fn step_set(&self, states: &[StateId], symbol: SymbolId) -> Vec<StateId> {
        let mut out = Vec::new();
        for &q in states {
            self.extend_successors(q, symbol, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Set of states reached from the initial state on `word`.
    fn run_set(&self, word: &[SymbolId]) -> Vec<StateId> {
        word.iter()
            .fold(vec![self.initial()], |set, &a| self.step_set(&set, a))
    }

    fn accepts(&self, word: &[SymbolId]) -> bool {
        self.run_set(word).iter().any(|&q| self.is_accepting(q))
    }
}
