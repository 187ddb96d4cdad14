use lossmon_core::automata::json::AutomatonDoc;
use lossmon_core::bundled::{artificial_nfa, safeiter};
use lossmon_core::synthesis::{synthesize_optimal, MonitorDoc};
use lossmon_core::{LossModel, Monitor};

#[test]
fn monitor_documents_round_trip() {
    let p = safeiter();
    let model = LossModel::dropped_count(p.alphabet(), 3).unwrap();
    let m = synthesize_optimal(&p, &model).unwrap();
    let text = serde_json::to_string_pretty(&m.to_doc()).unwrap();
    let doc: MonitorDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(doc, m.to_doc());
    let back = doc.automaton.to_labeled_dfa().unwrap();
    assert_eq!(back.dfa, m.minimal.dfa);
    assert_eq!(back.labels, m.minimal.labels);
    let run = Monitor::from_labeled(&back).run_tokens(["c", "3", "u", "n"]).unwrap();
    assert_eq!(run.verdict, Monitor::from_alternate(&m).run_tokens(["c", "3", "u", "n"]).unwrap().verdict);
}

#[test]
fn nfa_documents_round_trip() {
    let n = artificial_nfa();
    let doc = AutomatonDoc::from_nfa(&n);
    let back: AutomatonDoc = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    let m = back.to_nfa().unwrap();
    assert_eq!(m.transitions().collect::<Vec<_>>(), n.transitions().collect::<Vec<_>>());
    assert_eq!(m.error(), n.error());
}

#[test]
fn missing_transitions_are_reported() {
    let err = serde_json::from_str::<AutomatonDoc>(
        r#"{"alphabet":["a","b"],"states":2,"initial":0,"error":1,"delta":[[0,"a",0],[1,"a",1],[1,"b",1]]}"#,
    )
    .unwrap()
    .to_dfa()
    .unwrap_err()
    .to_string();
    assert!(err.contains("missing transition"), "{err}");
}
