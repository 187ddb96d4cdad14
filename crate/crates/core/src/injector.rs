//! Loss injection into concrete traces.
//!
//! The dropped-count injector walks the trace after its creation prefix. At
//! each position it disables monitoring with probability ρ; a disabled
//! stretch skips `m = ⌈l⌉` events with `l ~ Exp(mean η)`, clamped to the rest
//! of the trace, and emits `m mod n` (when non-zero) followed by `⌊m / n⌋`
//! copies of `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, SymbolId};
use crate::lossmodel::LossModel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub rho: f64,
    pub eta: f64,
    pub bound_n: u32,
    pub seed: u64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { rho: 0.1, eta: 3.0, bound_n: 5, seed: 0 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must be in [0, 1], got {}", self.rho)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if self.bound_n == 0 {
            return Err(Error::Config("bound_n must be at least 1".into()));
        }
        Ok(())
    }
}

/// Source of the injector's random decisions.
pub trait LossDraws {
    /// Bernoulli(ρ).
    fn disable(&mut self, rho: f64) -> bool;
    /// Exponential with mean η.
    fn skip_length(&mut self, eta: f64) -> f64;
}

/// Draws from an RNG: a uniform `u ∈ [0, 1)` per decision, with the
/// exponential obtained as `-η ln(1 - u)`.
pub struct RngDraws<R>(pub R);

impl<R: Rng> LossDraws for RngDraws<R> {
    fn disable(&mut self, rho: f64) -> bool {
        self.0.gen::<f64>() < rho
    }

    fn skip_length(&mut self, eta: f64) -> f64 {
        let u: f64 = self.0.gen();
        -eta * (1.0 - u).ln()
    }
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `index` derived from a base seed.
pub fn subseed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Count symbols emitted for a skip of `m` events.
pub fn skip_symbols(m: usize, bound_n: u32) -> Vec<u32> {
    let n = bound_n as usize;
    let mut out = Vec::with_capacity(1 + m / n);
    if !m.is_multiple_of(n) {
        out.push((m % n) as u32);
    }
    out.extend(std::iter::repeat_n(bound_n, m / n));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LossySymbol {
    Kept(SymbolId),
    /// Stands for this many skipped events.
    Count(u32),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InjectStats {
    pub creation: usize,
    pub kept: usize,
    pub skipped: usize,
    pub count_symbols: usize,
}

impl InjectStats {
    /// Fraction of the trace seen verbatim, creation events included.
    pub fn kept_fraction(&self) -> f64 {
        let total = self.creation + self.kept + self.skipped;
        if total == 0 {
            1.0
        } else {
            (self.creation + self.kept) as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injected {
    pub symbols: Vec<LossySymbol>,
    pub stats: InjectStats,
}

impl Injected {
    /// Ids in the lossy alphabet of `LossModel::dropped_count(Σ, n)`, where
    /// count `k` is `|Σ| + k - 1`.
    pub fn to_gamma(&self, sigma_len: usize) -> Vec<SymbolId> {
        self.symbols
            .iter()
            .map(|s| match *s {
                LossySymbol::Kept(a) => a,
                LossySymbol::Count(k) => sigma_len + k as usize - 1,
            })
            .collect()
    }

    pub fn to_names(&self, sigma: &Alphabet) -> Vec<String> {
        self.symbols
            .iter()
            .map(|s| match *s {
                LossySymbol::Kept(a) => sigma.name(a).to_string(),
                LossySymbol::Count(k) => k.to_string(),
            })
            .collect()
    }
}

pub fn inject_with<D: LossDraws + ?Sized>(
    trace: &[SymbolId],
    creation_prefix_len: usize,
    rho: f64,
    eta: f64,
    bound_n: u32,
    draws: &mut D,
) -> Injected {
    let prefix = creation_prefix_len.min(trace.len());
    let mut symbols: Vec<LossySymbol> = trace[..prefix].iter().map(|&a| LossySymbol::Kept(a)).collect();
    let mut stats = InjectStats { creation: prefix, ..InjectStats::default() };
    let mut i = prefix;
    while i < trace.len() {
        if draws.disable(rho) {
            let l = draws.skip_length(eta);
            let m = (l.ceil().max(1.0) as usize).min(trace.len() - i);
            let counts = skip_symbols(m, bound_n);
            stats.skipped += m;
            stats.count_symbols += counts.len();
            symbols.extend(counts.into_iter().map(LossySymbol::Count));
            i += m;
        } else {
            symbols.push(LossySymbol::Kept(trace[i]));
            stats.kept += 1;
            i += 1;
        }
    }
    Injected { symbols, stats }
}

/// Dropped-count injection driven by ChaCha8 seeded with `cfg.seed`.
pub fn inject_dropped_count(trace: &[SymbolId], creation_prefix_len: usize, cfg: &LossConfig) -> Result<Injected> {
    cfg.validate()?;
    let mut draws = RngDraws(rng_for(cfg.seed));
    Ok(inject_with(trace, creation_prefix_len, cfg.rho, cfg.eta, cfg.bound_n, &mut draws))
}

/// Replaces consecutive segments of `trace` by their chosen lossy symbols.
/// `segmentation` lists `(segment length, γ)` pairs covering the trace.
pub fn apply_filter(model: &LossModel, trace: &[SymbolId], segmentation: &[(usize, SymbolId)]) -> Result<Vec<SymbolId>> {
    let total: usize = segmentation.iter().map(|(len, _)| len).sum();
    if total != trace.len() {
        return Err(Error::Config(format!(
            "segmentation covers {total} events but the trace has {}",
            trace.len()
        )));
    }
    let mut out = Vec::with_capacity(segmentation.len());
    let mut start = 0;
    for (index, &(len, gamma)) in segmentation.iter().enumerate() {
        if gamma >= model.gamma().len() {
            return Err(Error::UnknownSymbol(format!("#{gamma}")));
        }
        let segment = &trace[start..start + len];
        if !model.segment_matches(gamma, segment)? {
            return Err(Error::InvalidSegment { index, gamma: model.gamma().name(gamma).to_string() });
        }
        out.push(gamma);
        start += len;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::safeiter;

    struct Fixed {
        disable: bool,
        len: f64,
    }

    impl LossDraws for Fixed {
        fn disable(&mut self, _: f64) -> bool {
            self.disable
        }
        fn skip_length(&mut self, _: f64) -> f64 {
            self.len
        }
    }

    #[test]
    fn chunking() {
        assert_eq!(skip_symbols(7, 5), vec![2, 5]);
        assert_eq!(skip_symbols(10, 5), vec![5, 5]);
        assert_eq!(skip_symbols(3, 5), vec![3]);
        assert_eq!(skip_symbols(4, 1), vec![1, 1, 1, 1]);
    }

    #[test]
    fn forced_skips_of_two() {
        let p = safeiter();
        let trace = p.alphabet().encode("cnnunnun".chars().map(String::from)).unwrap();
        let out = inject_with(&trace, 1, 1.0, 1.0, 5, &mut Fixed { disable: true, len: 1.5 });
        assert_eq!(
            out.symbols,
            vec![
                LossySymbol::Kept(0),
                LossySymbol::Count(2),
                LossySymbol::Count(2),
                LossySymbol::Count(2),
                LossySymbol::Count(1)
            ]
        );
        assert_eq!(out.stats.kept_fraction(), 1.0 / 8.0);
        assert_eq!(out.to_names(p.alphabet()), ["c", "2", "2", "2", "1"]);
    }

    #[test]
    fn rho_zero_is_identity() {
        let trace: Vec<usize> = (0..50).map(|i| i % 3).collect();
        let cfg = LossConfig { rho: 0.0, seed: 9, ..LossConfig::default() };
        let out = inject_dropped_count(&trace, 0, &cfg).unwrap();
        assert_eq!(out.to_gamma(3), trace);
        assert_eq!(out.stats.skipped, 0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let trace: Vec<usize> = (0..200).map(|i| i % 3).collect();
        let cfg = LossConfig { rho: 0.3, eta: 6.0, bound_n: 5, seed: 77 };
        let a = inject_dropped_count(&trace, 1, &cfg).unwrap();
        let b = inject_dropped_count(&trace, 1, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stats.kept + a.stats.skipped, trace.len() - 1);
        assert_ne!(subseed(1, 0), subseed(1, 1));
    }

    #[test]
    fn filter_application() {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let trace = p.alphabet().encode("cnnuu".chars().map(String::from)).unwrap();
        let y = apply_filter(&model, &trace, &[(2, 4), (1, 1), (2, 4)]).unwrap();
        assert_eq!(model.gamma().decode(&y), ["2", "n", "2"]);
        let err = apply_filter(&model, &trace, &[(2, 4), (1, 0), (2, 4)]).unwrap_err();
        assert!(matches!(err, Error::InvalidSegment { index: 1, .. }));
        let id = LossModel::identity(p.alphabet());
        let segs: Vec<_> = trace.iter().map(|&a| (1, a)).collect();
        assert_eq!(apply_filter(&id, &trace, &segs).unwrap(), trace);
    }
}
