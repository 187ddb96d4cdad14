use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automata::{Dfa, Nfa, StateId, TransitionSystem};
use crate::Result;

/// Product automaton accepting `L(a) ∩ L(b)` (reachable pairs only).
pub fn intersect(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    a.alphabet().check_same(b.alphabet())?;
    let k = a.alphabet().len();
    let start = (a.initial(), b.initial());
    let mut index = HashMap::from([(start, 0usize)]);
    let mut pairs = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for s in 0..k {
            let next = (a.step(p, s), b.step(q, s));
            let id = *index.entry(next).or_insert_with(|| {
                pairs.push(next);
                pairs.len() - 1
            });
            delta.push(id);
        }
        i += 1;
    }
    let accepting = pairs.iter().map(|&(p, q)| a.is_accepting(p) && b.is_accepting(q)).collect();
    let error = match (a.error(), b.error()) {
        (Some(ea), Some(eb)) => index.get(&(ea, eb)).copied(),
        _ => None,
    };
    Dfa::new(a.alphabet().clone(), delta, 0, accepting, error)
}

/// Complement with respect to Σ*. The error designation is dropped.
pub fn complement(a: &Dfa) -> Dfa {
    let accepting = a.accepting().iter().map(|&x| !x).collect();
    Dfa::new(a.alphabet().clone(), a.delta().to_vec(), a.initial(), accepting, None)
        .expect("complement of a valid DFA is valid")
}

pub fn reachable_states(a: &Dfa) -> BTreeSet<StateId> {
    a.bfs_order().into_iter().collect()
}

pub fn is_empty(a: &Dfa) -> bool {
    a.bfs_order().into_iter().all(|q| !a.is_accepting(q))
}

/// Whether `L(b) ⊆ L(a)`, i.e. `L(complement(a)) ∩ L(b) = ∅`. Explores the
/// product on the fly and stops at the first witness.
pub fn includes(a: &Dfa, b: &Dfa) -> Result<bool> {
    a.alphabet().check_same(b.alphabet())?;
    let start = (a.initial(), b.initial());
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if b.is_accepting(q) && !a.is_accepting(p) {
            return Ok(false);
        }
        for s in a.alphabet().ids() {
            let next = (a.step(p, s), b.step(q, s));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(true)
}

/// `{q' | ∃x ∈ L(lang): from --x--> q'}`, by reachability in the product
/// of `automaton` and `lang`.
pub fn states_reachable_via<T: TransitionSystem + ?Sized>(
    automaton: &T,
    from: StateId,
    lang: &Nfa,
) -> Result<BTreeSet<StateId>> {
    automaton.alphabet().check_same(lang.alphabet())?;
    let n = automaton.num_states();
    let m = lang.num_states();
    let mut seen = vec![false; n * m];
    let start = (from, lang.initial());
    seen[from * m + lang.initial()] = true;
    let mut stack = vec![start];
    let mut out = BTreeSet::new();
    let mut succ = Vec::new();
    while let Some((q, p)) = stack.pop() {
        if lang.is_accepting(p) {
            out.insert(q);
        }
        for a in lang.alphabet().ids() {
            let lang_next = lang.successors(p, a);
            if lang_next.is_empty() {
                continue;
            }
            succ.clear();
            automaton.extend_successors(q, a, &mut succ);
            for &q2 in &succ {
                for &p2 in lang_next {
                    if !seen[q2 * m + p2] {
                        seen[q2 * m + p2] = true;
                        stack.push((q2, p2));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{compile_regex, determinize, Alphabet};
    use crate::bundled::{safeiter, Q0, Q1, Q2, QERR};

    fn lang(pattern: &str, sigma: &Alphabet) -> Dfa {
        determinize(&compile_regex(pattern, sigma).unwrap()).unwrap().dfa
    }

    #[test]
    fn inclusion_and_intersection() {
        let sigma = Alphabet::new(["a", "b"]).unwrap();
        let a = lang("a a*", &sigma);
        let aa = lang("a a", &sigma);
        assert!(includes(&a, &aa).unwrap());
        assert!(!includes(&aa, &a).unwrap());
        assert!(includes(&a, &a).unwrap());
        assert!(is_empty(&intersect(&lang("a b", &sigma), &lang("b a", &sigma)).unwrap()));
        assert!(!is_empty(&intersect(&a, &aa).unwrap()));
        assert!(is_empty(&intersect(&a, &complement(&a)).unwrap()));
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let a = lang("a", &Alphabet::new(["a"]).unwrap());
        let b = lang("a", &Alphabet::new(["a", "b"]).unwrap());
        assert!(includes(&a, &b).is_err());
        assert!(intersect(&a, &b).is_err());
    }

    /// Brute force: run every word of `words` from `from`.
    fn brute(dfa: &Dfa, from: StateId, words: impl Iterator<Item = Vec<usize>>) -> BTreeSet<StateId> {
        words.map(|w| dfa.run_from(from, &w)).collect()
    }

    #[test]
    fn reach_via_two_symbols_matches_enumeration() {
        let p = safeiter();
        let sigma = p.alphabet().clone();
        let two = compile_regex("(c|n|u) (c|n|u)", &sigma).unwrap();
        let words = (0..9).map(|i| vec![i / 3, i % 3]);
        let expected = brute(&p, Q0, words);
        assert_eq!(expected, BTreeSet::from([Q1, Q2, QERR]));
        assert_eq!(states_reachable_via(&p, Q0, &two).unwrap(), expected);
    }

    #[test]
    fn reach_via_from_trap() {
        let p = safeiter();
        let any = compile_regex("n u*", p.alphabet()).unwrap();
        assert_eq!(states_reachable_via(&p, QERR, &any).unwrap(), BTreeSet::from([QERR]));
    }

    #[test]
    fn reach_via_silent_prefix() {
        let p = safeiter();
        let lang = compile_regex("n* u", p.alphabet()).unwrap();
        let words = (0..=p.num_states()).map(|k| {
            let mut w = vec![1; k];
            w.push(2);
            w
        });
        let expected = brute(&p, Q1, words);
        assert_eq!(expected, BTreeSet::from([Q2]));
        assert_eq!(states_reachable_via(&p, Q1, &lang).unwrap(), expected);
    }
}
