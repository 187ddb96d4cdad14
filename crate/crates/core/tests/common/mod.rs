//! Test-side reference implementations. Nothing here calls the library's
//! synthesis or oracle code.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use lossmon_core::{Alphabet, Dfa, LossModel, Nfa, StateId, SymbolId};
use rand::Rng;

pub fn sigma(k: usize) -> Alphabet {
    Alphabet::new(["a", "b", "c", "d"].into_iter().take(k)).unwrap()
}

/// A random minimal property with at most `max_states` live states over
/// `k` symbols whose error state is reachable and not initial.
pub fn random_property<R: Rng>(rng: &mut R, max_states: usize, k: usize) -> Dfa {
    loop {
        let n = rng.gen_range(1..=max_states);
        let err = n;
        let mut delta = Vec::with_capacity((n + 1) * k);
        for _ in 0..n {
            for _ in 0..k {
                // bias towards live states so properties are not all trivial
                let t = if rng.gen_bool(0.25) { err } else { rng.gen_range(0..n) };
                delta.push(t);
            }
        }
        delta.extend(std::iter::repeat_n(err, k));
        let dfa = Dfa::property(sigma(k), delta, 0, err).unwrap();
        let (min, _) = dfa.minimize();
        let min = min.error_last();
        if matches!(min.error(), Some(e) if e != min.initial()) {
            return min;
        }
    }
}

/// A random NFA property: error is the last state and a trap, every other
/// state accepts, and missing transitions mean the run dies.
pub fn random_nfa_property<R: Rng>(rng: &mut R, n: usize, k: usize) -> Nfa {
    let err = n;
    let mut edges = Vec::new();
    for q in 0..n {
        for a in 0..k {
            for t in 0..=n {
                if rng.gen_bool(if t == err { 0.15 } else { 0.3 }) {
                    edges.push((q, a, t));
                }
            }
        }
    }
    let mut nfa = Nfa::new(sigma(k), n + 1, 0);
    for q in 0..n {
        nfa.set_accepting(q, true);
    }
    for a in 0..k {
        nfa.add_transition(err, a, err);
    }
    for (q, a, t) in edges {
        nfa.add_transition(q, a, t);
    }
    nfa.set_error(Some(err)).unwrap();
    nfa
}

/// Loss models with hand-written inverse semantics.
#[derive(Clone, Debug)]
pub enum TestLoss {
    Identity,
    DroppedCount(usize),
    SilentDrop(Vec<SymbolId>),
}

impl TestLoss {
    pub fn build(&self, sigma: &Alphabet) -> LossModel {
        match self {
            TestLoss::Identity => LossModel::identity(sigma),
            TestLoss::DroppedCount(n) => LossModel::dropped_count(sigma, *n as u32).unwrap(),
            TestLoss::SilentDrop(d) => {
                let names: Vec<&str> = d.iter().map(|&a| sigma.name(a)).collect();
                LossModel::silent_drop(sigma, &names).unwrap()
            }
        }
    }

    pub fn gamma_len(&self, k: usize) -> usize {
        match self {
            TestLoss::Identity | TestLoss::SilentDrop(_) => k,
            TestLoss::DroppedCount(n) => k + n,
        }
    }

    /// States reachable from `q` over the inverse language of `g`.
    pub fn reach(&self, p: &Dfa, q: StateId, g: SymbolId) -> BTreeSet<StateId> {
        let k = p.alphabet().len();
        match self {
            TestLoss::Identity => BTreeSet::from([p.step(q, g)]),
            TestLoss::DroppedCount(_) if g < k => BTreeSet::from([p.step(q, g)]),
            TestLoss::DroppedCount(_) => {
                let mut cur = BTreeSet::from([q]);
                for _ in 0..(g - k + 1) {
                    cur = cur.iter().flat_map(|&s| (0..k).map(move |a| p.step(s, a))).collect();
                }
                cur
            }
            TestLoss::SilentDrop(delta) => {
                let mut closure = BTreeSet::from([q]);
                let mut stack = vec![q];
                while let Some(s) = stack.pop() {
                    for &d in delta {
                        let t = p.step(s, d);
                        if closure.insert(t) {
                            stack.push(t);
                        }
                    }
                }
                closure.iter().map(|&s| p.step(s, g)).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    All,
    None,
    Mixed,
}

/// End states of all completions of `y` on a DFA property.
pub fn reached(p: &Dfa, loss: &TestLoss, y: &[SymbolId]) -> BTreeSet<StateId> {
    let mut cur = BTreeSet::from([p.initial()]);
    for &g in y {
        cur = cur.iter().flat_map(|&q| loss.reach(p, q, g)).collect();
    }
    cur
}

pub fn classify(p: &Dfa, loss: &TestLoss, y: &[SymbolId]) -> Class {
    let err = p.error().unwrap();
    let r = reached(p, loss, y);
    if r.iter().all(|&q| q == err) {
        Class::All
    } else if r.contains(&err) {
        Class::Mixed
    } else {
        Class::None
    }
}

/// Whether `x` violates an NFA property: no run stays outside the error.
pub fn nfa_violates(p: &Nfa, x: &[SymbolId]) -> bool {
    let err = p.error().unwrap();
    let mut cur = BTreeSet::from([p.initial()]);
    for &a in x {
        cur = cur.iter().flat_map(|&q| p.successors(q, a).iter().copied()).collect();
    }
    cur.iter().all(|&q| q == err)
}

/// All words over `0..k` of length at most `max_len`, shortest first.
pub fn words(k: usize, max_len: usize) -> Vec<Vec<SymbolId>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<SymbolId>| {
                (0..k).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Myhill-Nerode classes over the full powerset of an NFA's states, by
/// Moore refinement. A subset accepts iff it holds an accepting state.
/// Returns the class id of every subset, indexed by bitmask.
pub fn powerset_classes(nfa: &Nfa) -> Vec<usize> {
    let n = nfa.num_states();
    assert!(n <= 12, "powerset too large");
    let k = nfa.alphabet().len();
    let size = 1usize << n;
    let step = |mask: usize, a: SymbolId| -> usize {
        let mut out = 0;
        for q in 0..n {
            if mask >> q & 1 == 1 {
                for &t in nfa.successors(q, a) {
                    out |= 1 << t;
                }
            }
        }
        out
    };
    let succ: Vec<Vec<usize>> = (0..size).map(|m| (0..k).map(|a| step(m, a)).collect()).collect();
    let mut class: Vec<usize> =
        (0..size).map(|m| usize::from((0..n).any(|q| m >> q & 1 == 1 && nfa.is_accepting(q)))).collect();
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..size)
            .map(|m| {
                let sig = (class[m], succ[m].iter().map(|&t| class[t]).collect());
                let len = ids.len();
                *ids.entry(sig).or_insert(len)
            })
            .collect();
        let before: BTreeSet<_> = class.iter().collect();
        if ids.len() == before.len() {
            return next;
        }
        class = next;
    }
}

pub fn mask(members: &[StateId]) -> usize {
    members.iter().fold(0, |m, &q| m | 1 << q)
}
