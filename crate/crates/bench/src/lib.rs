//! Shared inputs for the benchmarks.

use lossmon_core::bundled::safeiter;
use lossmon_core::experiment::generate_trace;
use lossmon_core::injector::rng_for;
use lossmon_core::{Dfa, LossModel};

pub fn safeiter_dropped(n: u32) -> (Dfa, LossModel) {
    let p = safeiter();
    let m = LossModel::dropped_count(p.alphabet(), n).expect("n >= 1");
    (p, m)
}

/// A SafeIter trace of `len` events from a fixed seed.
pub fn safeiter_trace(len: usize, seed: u64) -> Vec<usize> {
    generate_trace(3, &[0], len, &mut rng_for(seed)).expect("len >= 1")
}
