use std::collections::{HashMap, VecDeque};

use crate::automata::{Dfa, StateId};

/// Partition of the input states produced by minimization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeClasses {
    class_of: Vec<Option<StateId>>,
    classes: Vec<Vec<StateId>>,
}

impl MergeClasses {
    /// Output state of an input state, `None` if it was unreachable.
    pub fn class_of(&self, q: StateId) -> Option<StateId> {
        self.class_of[q]
    }

    /// Members of each output state, indexed by output state id.
    pub fn classes(&self) -> &[Vec<StateId>] {
        &self.classes
    }

    pub fn same_class(&self, p: StateId, q: StateId) -> bool {
        matches!((self.class_of[p], self.class_of[q]), (Some(a), Some(b)) if a == b)
    }
}

impl Dfa {
    /// Hopcroft minimization of the reachable part. Output states are
    /// numbered in breadth-first order from the initial state.
    pub fn minimize(&self) -> (Dfa, MergeClasses) {
        let k = self.alphabet().len();
        let reach = self.bfs_order();
        let n = reach.len();
        let mut local = vec![usize::MAX; self.num_states()];
        for (i, &q) in reach.iter().enumerate() {
            local[q] = i;
        }
        let step = |i: usize, a: usize| local[self.step(reach[i], a)];

        let mut inverse = vec![vec![Vec::new(); n]; k];
        for i in 0..n {
            for (a, inv) in inverse.iter_mut().enumerate() {
                inv[step(i, a)].push(i);
            }
        }

        let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| self.is_accepting(reach[i]));
        let mut blocks: Vec<Vec<usize>> = [acc, rej].into_iter().filter(|b| !b.is_empty()).collect();
        let mut block_of = vec![0; n];
        for (b, members) in blocks.iter().enumerate() {
            for &i in members {
                block_of[i] = b;
            }
        }

        let mut pending: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
        let mut worklist = Vec::new();
        let seed = if blocks.len() == 2 && blocks[1].len() < blocks[0].len() { 1 } else { 0 };
        for a in 0..k {
            worklist.push((seed, a));
            pending[seed][a] = true;
        }

        let mut marked = vec![false; n];
        while let Some((b, a)) = worklist.pop() {
            pending[b][a] = false;
            let mut touched: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut hits = Vec::new();
            for &q in &blocks[b] {
                for &p in &inverse[a][q] {
                    if !marked[p] {
                        marked[p] = true;
                        hits.push(p);
                        touched.entry(block_of[p]).or_default().push(p);
                    }
                }
            }
            let mut touched: Vec<_> = touched.into_iter().collect();
            touched.sort_unstable_by_key(|(y, _)| *y);
            for (y, moved) in touched {
                if moved.len() < blocks[y].len() {
                    blocks[y].retain(|&s| !marked[s]);
                    let z = blocks.len();
                    for &s in &moved {
                        block_of[s] = z;
                    }
                    blocks.push(moved);
                    pending.push(vec![false; k]);
                    for c in 0..k {
                        let target = if pending[y][c] || blocks[z].len() <= blocks[y].len() { z } else { y };
                        if !pending[target][c] {
                            pending[target][c] = true;
                            worklist.push((target, c));
                        }
                    }
                }
            }
            for p in hits {
                marked[p] = false;
            }
        }

        // number blocks breadth-first from the initial block
        let mut new_id = vec![usize::MAX; blocks.len()];
        let start = block_of[0];
        new_id[start] = 0;
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(b) = queue.pop_front() {
            let rep = blocks[b][0];
            for a in 0..k {
                let t = block_of[step(rep, a)];
                if new_id[t] == usize::MAX {
                    new_id[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }

        let mut delta = Vec::with_capacity(order.len() * k);
        let mut accepting = Vec::with_capacity(order.len());
        let mut classes = Vec::with_capacity(order.len());
        for &b in &order {
            let rep = blocks[b][0];
            for a in 0..k {
                delta.push(new_id[block_of[step(rep, a)]]);
            }
            accepting.push(self.is_accepting(reach[rep]));
            let mut members: Vec<StateId> = blocks[b].iter().map(|&i| reach[i]).collect();
            members.sort_unstable();
            classes.push(members);
        }
        let mut class_of = vec![None; self.num_states()];
        for (id, members) in classes.iter().enumerate() {
            for &q in members {
                class_of[q] = Some(id);
            }
        }
        let error = self.error().and_then(|e| class_of[e]);
        let dfa = Dfa::new(self.alphabet().clone(), delta, 0, accepting, error)
            .expect("quotient of a valid DFA is valid");
        (dfa, MergeClasses { class_of, classes })
    }
}
