//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::automata::{Alphabet, Dfa, Nfa, StateId, SubsetLabel};

fn render(
    name: &str,
    alphabet: &Alphabet,
    num_states: usize,
    initial: StateId,
    accepting: impl Fn(StateId) -> bool,
    error: Option<StateId>,
    edges: impl Iterator<Item = (StateId, usize, StateId)>,
    state_name: impl Fn(StateId) -> String,
) -> String {
    let mut grouped: BTreeMap<(StateId, StateId), Vec<&str>> = BTreeMap::new();
    for (p, a, q) in edges {
        grouped.entry((p, q)).or_default().push(alphabet.name(a));
    }
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    for q in 0..num_states {
        let shape = if accepting(q) { "doublecircle" } else { "circle" };
        let style = if Some(q) == error { ", style=dashed" } else { "" };
        writeln!(out, "  s{q} [label=\"{}\", shape={shape}{style}];", escape(&state_name(q))).unwrap();
    }
    writeln!(out, "  __start -> s{initial};").unwrap();
    for ((p, q), symbols) in grouped {
        writeln!(out, "  s{p} -> s{q} [label=\"{}\"];", escape(&symbols.join(","))).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn dfa_to_dot(name: &str, dfa: &Dfa, labels: Option<&[SubsetLabel]>) -> String {
    let k = dfa.alphabet().len();
    let edges = (0..dfa.num_states()).flat_map(|q| (0..k).map(move |a| (q, a, dfa.step(q, a))));
    render(
        name,
        dfa.alphabet(),
        dfa.num_states(),
        dfa.initial(),
        |q| dfa.is_accepting(q),
        dfa.error(),
        edges,
        |q| labels.map_or_else(|| q.to_string(), |l| l[q].to_string()),
    )
}

pub fn nfa_to_dot(name: &str, nfa: &Nfa) -> String {
    render(
        name,
        nfa.alphabet(),
        nfa.num_states(),
        nfa.initial(),
        |q| nfa.is_accepting(q),
        nfa.error(),
        nfa.transitions(),
        |q| q.to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_parallel_edges() {
        let dot = dfa_to_dot("SafeIter", &crate::bundled::safeiter(), None);
        assert!(dot.starts_with("digraph \"SafeIter\""));
        assert!(dot.contains("s3 -> s3 [label=\"c,n,u\"]"));
        assert!(dot.contains("s3 [label=\"3\", shape=circle, style=dashed]"));
    }
}
