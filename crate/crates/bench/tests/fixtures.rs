use lossmon_bench::{safeiter_dropped, safeiter_trace};

#[test]
fn fixtures_are_stable() {
    let (p, m) = safeiter_dropped(5);
    assert_eq!(m.gamma().len(), p.alphabet().len() + 5);
    let t = safeiter_trace(100, 7);
    assert_eq!(t, safeiter_trace(100, 7));
    assert_eq!(t[0], 0);
}
