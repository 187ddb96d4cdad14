//! Loss models: for every symbol γ of the lossy stream, the set R⁻¹(γ) of
//! original segments it may replace.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::{compile_regex, states_reachable_via, Alphabet, Nfa, StateId, SymbolId, TransitionSystem};
use crate::{Error, Result};

/// Largest lossy alphabet a builtin model may generate.
pub const GAMMA_CAP: usize = 4096;

/// R⁻¹(γ) for one lossy symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InverseSpec {
    /// The single original symbol σ.
    Singleton(SymbolId),
    /// A regular language over Σ.
    Regular(Nfa),
    /// Direct successor sets per property state, bypassing R⁻¹. `asserted`
    /// marks maps supplied by the user rather than derived.
    StateMap { map: Vec<Vec<StateId>>, asserted: bool },
    /// All interleavings with exactly these per-symbol counts, in Σ order.
    CountVector(Vec<u32>),
}

impl InverseSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            InverseSpec::Singleton(_) => "singleton",
            InverseSpec::Regular(_) => "regular",
            InverseSpec::StateMap { .. } => "state_map",
            InverseSpec::CountVector(_) => "count_vector",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossModel {
    sigma: Alphabet,
    gamma: Alphabet,
    inverse: Vec<InverseSpec>,
    descriptor: String,
}

impl LossModel {
    pub fn new(sigma: Alphabet, gamma: Alphabet, inverse: Vec<InverseSpec>, descriptor: impl Into<String>) -> Result<Self> {
        if gamma.len() != inverse.len() {
            return Err(Error::InvalidLossModel(format!(
                "{} lossy symbols but {} inverse specs",
                gamma.len(),
                inverse.len()
            )));
        }
        if gamma.is_empty() {
            return Err(Error::InvalidLossModel("empty lossy alphabet".into()));
        }
        for (g, spec) in inverse.iter().enumerate() {
            let name = gamma.name(g);
            match spec {
                InverseSpec::Singleton(s) if *s >= sigma.len() => {
                    return Err(Error::InvalidLossModel(format!("`{name}` maps to unknown symbol {s}")));
                }
                InverseSpec::Regular(nfa) => {
                    sigma.check_same(nfa.alphabet())?;
                    if nfa.is_language_empty() {
                        return Err(Error::InvalidLossModel(format!("R^-1(`{name}`) is empty")));
                    }
                }
                InverseSpec::CountVector(c) => {
                    if c.len() != sigma.len() {
                        return Err(Error::InvalidLossModel(format!("count vector `{name}` has wrong arity")));
                    }
                    if c.iter().all(|&x| x == 0) {
                        return Err(Error::InvalidLossModel(format!("count vector `{name}` is all zero")));
                    }
                }
                InverseSpec::StateMap { map, .. }
                    if map.iter().any(|s| s.is_empty()) => {
                        return Err(Error::InvalidLossModel(format!("state map `{name}` has an empty image")));
                    }
                _ => {}
            }
        }
        Ok(LossModel { sigma, gamma, inverse, descriptor: descriptor.into() })
    }

    /// Lossless: Γ = Σ and R⁻¹(σ) = {σ}.
    pub fn identity(sigma: &Alphabet) -> Self {
        let inverse = sigma.ids().map(InverseSpec::Singleton).collect();
        LossModel::new(sigma.clone(), sigma.clone(), inverse, "identity").expect("identity model is valid")
    }

    /// Γ = Σ ∪ {1..n} with R⁻¹(k) = Σ^k. Count symbol `k` has id `|Σ| + k - 1`.
    pub fn dropped_count(sigma: &Alphabet, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLossModel("dropped_count needs n >= 1".into()));
        }
        let mut gamma = sigma.clone();
        let mut inverse: Vec<_> = sigma.ids().map(InverseSpec::Singleton).collect();
        for k in 1..=n as usize {
            gamma.push(k.to_string())?;
            let mut nfa = Nfa::new(sigma.clone(), k + 1, 0);
            for i in 0..k {
                for a in sigma.ids() {
                    nfa.add_transition(i, a, i + 1);
                }
            }
            nfa.set_accepting(k, true);
            inverse.push(InverseSpec::Regular(nfa));
        }
        LossModel::new(sigma.clone(), gamma, inverse, format!("dropped_count:{n}"))
    }

    /// Γ = {σ′}; R⁻¹(b′) = Δ*·b.
    pub fn silent_drop<S: AsRef<str>>(sigma: &Alphabet, delta: &[S]) -> Result<Self> {
        let delta: Vec<SymbolId> = delta.iter().map(|d| sigma.require(d.as_ref())).collect::<Result<_>>()?;
        let gamma = Alphabet::new(sigma.names().iter().map(|s| format!("{s}'")))?;
        let inverse = sigma
            .ids()
            .map(|b| {
                let mut nfa = Nfa::new(sigma.clone(), 2, 0);
                for &d in &delta {
                    nfa.add_transition(0, d, 0);
                }
                nfa.add_transition(0, b, 1);
                nfa.set_accepting(1, true);
                InverseSpec::Regular(nfa)
            })
            .collect();
        let names: Vec<&str> = delta.iter().map(|&d| sigma.name(d)).collect();
        LossModel::new(sigma.clone(), gamma, inverse, format!("silent_drop:{}", names.join(",")))
    }

    /// Γ = Σ ∪ {(c1,..,c|Σ|) | 0 < Σc ≤ n}, ordered by total then lexicographically.
    pub fn frequency_count(sigma: &Alphabet, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLossModel("frequency_count needs n >= 1".into()));
        }
        let mut vectors = Vec::new();
        let mut current = vec![0u32; sigma.len()];
        count_vectors(&mut current, 0, n, &mut vectors, GAMMA_CAP)?;
        vectors.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
        let mut gamma = sigma.clone();
        let mut inverse: Vec<_> = sigma.ids().map(InverseSpec::Singleton).collect();
        for v in vectors {
            gamma.push(vector_name(&v))?;
            inverse.push(InverseSpec::CountVector(v));
        }
        if gamma.len() > GAMMA_CAP {
            return Err(Error::InvalidLossModel(format!("{} lossy symbols exceed the cap of {GAMMA_CAP}", gamma.len())));
        }
        LossModel::new(sigma.clone(), gamma, inverse, format!("frequency_count:{n}"))
    }

    /// Σ symbols named `e<o>` with `e` parametric and `1 <= o <= objects`
    /// are merged into `e`; all other symbols pass through.
    pub fn merged_objects<S: AsRef<str>>(sigma: &Alphabet, parametric: &[S], objects: u32) -> Result<Self> {
        if objects == 0 {
            return Err(Error::InvalidLossModel("merged_objects needs at least one object".into()));
        }
        let mut gamma = Alphabet::default();
        let mut members: Vec<Vec<SymbolId>> = Vec::new();
        for s in sigma.ids() {
            let name = sigma.name(s);
            let base = parametric
                .iter()
                .map(AsRef::as_ref)
                .find(|e| {
                    name.strip_prefix(e)
                        .and_then(|rest| rest.parse::<u32>().ok().filter(|_| !rest.starts_with('+')))
                        .is_some_and(|o| (1..=objects).contains(&o))
                })
                .unwrap_or(name);
            let g = match gamma.id(base) {
                Some(g) => g,
                None => {
                    members.push(Vec::new());
                    gamma.push(base)?
                }
            };
            members[g].push(s);
        }
        let inverse = members
            .into_iter()
            .map(|m| match m.as_slice() {
                [s] => InverseSpec::Singleton(*s),
                _ => {
                    let mut nfa = Nfa::new(sigma.clone(), 2, 0);
                    for &s in &m {
                        nfa.add_transition(0, s, 1);
                    }
                    nfa.set_accepting(1, true);
                    InverseSpec::Regular(nfa)
                }
            })
            .collect();
        let names: Vec<&str> = parametric.iter().map(AsRef::as_ref).collect();
        LossModel::new(sigma.clone(), gamma, inverse, format!("merged_objects:{objects}:{}", names.join(",")))
    }

    /// Σ passes through and `symbol` jumps by `region_map`.
    pub fn loop_summary<T: TransitionSystem + ?Sized>(
        property: &T,
        symbol: &str,
        region_map: Vec<Vec<StateId>>,
    ) -> Result<Self> {
        let sigma = property.alphabet().clone();
        let mut gamma = sigma.clone();
        gamma.push(symbol)?;
        let mut inverse: Vec<_> = sigma.ids().map(InverseSpec::Singleton).collect();
        inverse.push(InverseSpec::StateMap { map: region_map, asserted: true });
        let model = LossModel::new(sigma, gamma, inverse, format!("loop_summary:{symbol}"))?;
        model.check_state_maps(property)?;
        Ok(model)
    }

    pub fn sigma(&self) -> &Alphabet {
        &self.sigma
    }

    pub fn gamma(&self) -> &Alphabet {
        &self.gamma
    }

    pub fn inverse(&self, gamma: SymbolId) -> &InverseSpec {
        &self.inverse[gamma]
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Lossy symbols whose inverse is a user-asserted state map.
    pub fn asserted_symbols(&self) -> Vec<&str> {
        self.gamma
            .ids()
            .filter(|&g| matches!(self.inverse[g], InverseSpec::StateMap { asserted: true, .. }))
            .map(|g| self.gamma.name(g))
            .collect()
    }

    pub fn has_state_maps(&self) -> bool {
        self.inverse.iter().any(|s| matches!(s, InverseSpec::StateMap { .. }))
    }

    /// Checks that the model fits `property`: same Σ, and every state map is
    /// total, in range, and fixes the error state.
    pub fn check_state_maps<T: TransitionSystem + ?Sized>(&self, property: &T) -> Result<()> {
        self.sigma.check_same(property.alphabet())?;
        let n = property.num_states();
        for g in self.gamma.ids() {
            if let InverseSpec::StateMap { map, .. } = &self.inverse[g] {
                let name = self.gamma.name(g);
                if map.len() != n {
                    return Err(Error::InvalidLossModel(format!(
                        "state map `{name}` covers {} states, property has {n}",
                        map.len()
                    )));
                }
                if map.iter().flatten().any(|&t| t >= n) {
                    return Err(Error::InvalidLossModel(format!("state map `{name}` has a target out of range")));
                }
                if let Some(e) = property.error() {
                    if map[e] != [e] {
                        return Err(Error::InvalidLossModel(format!("state map `{name}` must send the error state to itself")));
                    }
                }
            }
        }
        Ok(())
    }

    /// δ(q, R⁻¹(γ)), sorted.
    pub fn inverse_reach<T: TransitionSystem + ?Sized>(&self, property: &T, q: StateId, gamma: SymbolId) -> Result<Vec<StateId>> {
        let spec = self.inverse.get(gamma).ok_or_else(|| Error::UnknownSymbol(gamma.to_string()))?;
        Ok(match spec {
            InverseSpec::Singleton(s) => property.step_set(&[q], *s),
            InverseSpec::Regular(nfa) => states_reachable_via(property, q, nfa)?.into_iter().collect(),
            InverseSpec::StateMap { map, .. } => {
                let mut out = map.get(q).cloned().ok_or_else(|| Error::InvalidLossModel(format!("state {q} not in state map")))?;
                out.sort_unstable();
                out.dedup();
                out
            }
            InverseSpec::CountVector(counts) => count_reach(property, q, counts),
        })
    }

    /// `table[q][γ] = δ(q, R⁻¹(γ))` for every property state and lossy symbol.
    pub fn reach_table<T: TransitionSystem + ?Sized>(&self, property: &T) -> Result<Vec<Vec<Vec<StateId>>>> {
        self.check_state_maps(property)?;
        (0..property.num_states())
            .map(|q| self.gamma.ids().map(|g| self.inverse_reach(property, q, g)).collect())
            .collect()
    }

    /// Whether `segment ∈ R⁻¹(γ)`.
    pub fn segment_matches(&self, gamma: SymbolId, segment: &[SymbolId]) -> Result<bool> {
        Ok(match &self.inverse[gamma] {
            InverseSpec::Singleton(s) => segment == [*s],
            InverseSpec::Regular(nfa) => nfa.accepts(segment),
            InverseSpec::CountVector(counts) => {
                let mut seen = vec![0u32; counts.len()];
                for &s in segment {
                    seen[s] += 1;
                }
                &seen == counts
            }
            InverseSpec::StateMap { .. } => {
                return Err(Error::OracleUnsupported(format!("`{}` is a state map", self.gamma.name(gamma))))
            }
        })
    }

    /// Every word of R⁻¹(γ) of length at most `max_len`, in length-lexicographic order.
    pub fn factor_words(&self, gamma: SymbolId, max_len: usize, cap: usize) -> Result<Vec<Vec<SymbolId>>> {
        let mut out = Vec::new();
        match &self.inverse[gamma] {
            InverseSpec::Singleton(s) => out.push(vec![*s]),
            InverseSpec::Regular(nfa) => {
                let mut layer: Vec<(Vec<SymbolId>, Vec<StateId>)> = vec![(Vec::new(), vec![nfa.initial()])];
                for len in 0..=max_len {
                    let mut next = Vec::new();
                    for (w, set) in layer {
                        if set.iter().any(|&q| nfa.is_accepting(q)) {
                            out.push(w.clone());
                            if out.len() > cap {
                                return Err(Error::EnumerationCap { what: "factor words", cap });
                            }
                        }
                        if len == max_len {
                            continue;
                        }
                        for a in self.sigma.ids() {
                            let s2 = nfa.step_set(&set, a);
                            if !s2.is_empty() {
                                let mut w2 = w.clone();
                                w2.push(a);
                                next.push((w2, s2));
                            }
                        }
                    }
                    layer = next;
                    if layer.is_empty() {
                        break;
                    }
                }
            }
            InverseSpec::CountVector(counts) => {
                let total: u32 = counts.iter().sum();
                if total as usize <= max_len {
                    let mut remaining = counts.clone();
                    permutations(&mut remaining, &mut Vec::new(), &mut out, cap)?;
                }
            }
            InverseSpec::StateMap { .. } => {
                return Err(Error::OracleUnsupported(format!("`{}` is a state map", self.gamma.name(gamma))))
            }
        }
        Ok(out)
    }

    /// Whether R⁻¹(γ) is a finite language.
    pub fn is_finite(&self, gamma: SymbolId) -> bool {
        match &self.inverse[gamma] {
            InverseSpec::Regular(nfa) => !has_live_cycle(&nfa.trim()),
            _ => true,
        }
    }
}

impl fmt::Display for LossModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor)
    }
}

/// Free-function form of [`LossModel::inverse_reach`].
pub fn inverse_reach<T: TransitionSystem + ?Sized>(
    model: &LossModel,
    property: &T,
    q: StateId,
    gamma: SymbolId,
) -> Result<Vec<StateId>> {
    model.inverse_reach(property, q, gamma)
}

pub fn vector_name(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

fn count_vectors(current: &mut Vec<u32>, i: usize, budget: u32, out: &mut Vec<Vec<u32>>, cap: usize) -> Result<()> {
    if i == current.len() {
        if current.iter().any(|&c| c > 0) {
            out.push(current.clone());
            if out.len() > cap {
                return Err(Error::InvalidLossModel(format!("more than {cap} count vectors")));
            }
        }
        return Ok(());
    }
    for c in 0..=budget {
        current[i] = c;
        count_vectors(current, i + 1, budget - c, out, cap)?;
    }
    current[i] = 0;
    Ok(())
}

fn permutations(remaining: &mut [u32], prefix: &mut Vec<SymbolId>, out: &mut Vec<Vec<SymbolId>>, cap: usize) -> Result<()> {
    if remaining.iter().all(|&c| c == 0) {
        out.push(prefix.clone());
        if out.len() > cap {
            return Err(Error::EnumerationCap { what: "factor words", cap });
        }
        return Ok(());
    }
    for s in 0..remaining.len() {
        if remaining[s] > 0 {
            remaining[s] -= 1;
            prefix.push(s);
            permutations(remaining, prefix, out, cap)?;
            prefix.pop();
            remaining[s] += 1;
        }
    }
    Ok(())
}

/// States reachable from `q` on some word with exactly `counts[i]` copies of
/// symbol `i`, by dynamic programming over sub-vectors.
fn count_reach<T: TransitionSystem + ?Sized>(property: &T, q: StateId, counts: &[u32]) -> Vec<StateId> {
    let radix: Vec<usize> = counts.iter().map(|&c| c as usize + 1).collect();
    let total: usize = radix.iter().product();
    let mut stride = vec![1usize; radix.len()];
    for i in 1..radix.len() {
        stride[i] = stride[i - 1] * radix[i - 1];
    }
    let mut reach: Vec<Vec<StateId>> = vec![Vec::new(); total];
    reach[0] = vec![q];
    for idx in 1..total {
        let mut acc = BTreeSet::new();
        for i in 0..radix.len() {
            if !(idx / stride[i]).is_multiple_of(radix[i]) {
                acc.extend(property.step_set(&reach[idx - stride[i]], i));
            }
        }
        reach[idx] = acc.into_iter().collect();
    }
    reach.pop().unwrap_or_default()
}

fn has_live_cycle(nfa: &Nfa) -> bool {
    // iterative DFS with colors over the trimmed NFA
    let n = nfa.num_states();
    let k = nfa.alphabet().len();
    let mut color = vec![0u8; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (q, ref mut i)) = stack.last_mut() {
            let succ: Vec<StateId> = (0..k).flat_map(|a| nfa.successors(q, a).iter().copied()).collect();
            if *i < succ.len() {
                let t = succ[*i];
                *i += 1;
                match color[t] {
                    0 => {
                        color[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[q] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// One entry of a custom model's `gamma` map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<HashMap<String, Vec<StateId>>>,
}

/// Serializable description of a loss model, instantiated against a property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    Identity,
    DroppedCount { n: u32 },
    SilentDrop { delta: Vec<String> },
    FrequencyCount { n: u32 },
    MergedObjects { objects: u32, parametric: Vec<String> },
    Custom {
        gamma: serde_json::Map<String, serde_json::Value>,
        #[serde(default)]
        passthrough: Vec<String>,
    },
    CustomStatemap {
        gamma: serde_json::Map<String, serde_json::Value>,
        #[serde(default)]
        passthrough: Vec<String>,
    },
}

impl LossSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::InvalidLossModel(format!("at `{}`: {}", e.path(), e.inner())))
    }

    pub fn build<T: TransitionSystem + ?Sized>(&self, property: &T) -> Result<LossModel> {
        let sigma = property.alphabet();
        let model = match self {
            LossSpec::Identity => LossModel::identity(sigma),
            LossSpec::DroppedCount { n } => LossModel::dropped_count(sigma, *n)?,
            LossSpec::SilentDrop { delta } => LossModel::silent_drop(sigma, delta)?,
            LossSpec::FrequencyCount { n } => LossModel::frequency_count(sigma, *n)?,
            LossSpec::MergedObjects { objects, parametric } => LossModel::merged_objects(sigma, parametric, *objects)?,
            LossSpec::Custom { gamma, passthrough } | LossSpec::CustomStatemap { gamma, passthrough } => {
                build_custom(property, gamma, passthrough)?
            }
        };
        model.check_state_maps(property)?;
        Ok(model)
    }
}

fn build_custom<T: TransitionSystem + ?Sized>(
    property: &T,
    entries: &serde_json::Map<String, serde_json::Value>,
    passthrough: &[String],
) -> Result<LossModel> {
    let sigma = property.alphabet();
    let mut gamma = Alphabet::default();
    let mut inverse = Vec::new();
    for name in passthrough {
        let s = sigma.require(name)?;
        gamma.push(name.as_str())?;
        inverse.push(InverseSpec::Singleton(s));
    }
    for (name, value) in entries {
        let entry: GammaEntry = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidLossModel(format!("at `gamma.{name}`: {e}")))?;
        let spec = match (&entry.regex, &entry.symbol, &entry.map) {
            (Some(re), None, None) => InverseSpec::Regular(compile_regex(re, sigma)?),
            (None, Some(s), None) => InverseSpec::Singleton(sigma.require(s)?),
            (None, None, Some(m)) => {
                let mut map = vec![Vec::new(); property.num_states()];
                for (k, v) in m {
                    let q: StateId = k
                        .parse()
                        .ok()
                        .filter(|&q| q < map.len())
                        .ok_or_else(|| Error::InvalidLossModel(format!("at `gamma.{name}.map`: bad state `{k}`")))?;
                    map[q] = v.clone();
                }
                // states not listed are dead ends and stay at the error state
                if let Some(e) = property.error() {
                    for slot in map.iter_mut().filter(|s| s.is_empty()) {
                        *slot = vec![e];
                    }
                }
                InverseSpec::StateMap { map, asserted: true }
            }
            _ => {
                return Err(Error::InvalidLossModel(format!(
                    "at `gamma.{name}`: exactly one of `regex`, `symbol`, `map` is required"
                )))
            }
        };
        gamma.push(name.as_str())?;
        inverse.push(spec);
    }
    LossModel::new(sigma.clone(), gamma, inverse, "custom")
}

impl FromStr for LossSpec {
    type Err = Error;

    /// Shorthands: `identity`, `dropped_count:N`, `silent_drop:a,b`,
    /// `frequency_count:N`, `merged_objects:OBJECTS:e1,e2`, or inline JSON.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return LossSpec::from_json(s);
        }
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let list = |r: &str| -> Vec<String> { r.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect() };
        let number = |r: &str| -> Result<u32> {
            r.trim().parse().map_err(|_| Error::InvalidLossModel(format!("`{s}`: expected a number after `{kind}:`")))
        };
        match kind {
            "identity" => Ok(LossSpec::Identity),
            "dropped_count" => Ok(LossSpec::DroppedCount { n: number(rest)? }),
            "silent_drop" => Ok(LossSpec::SilentDrop { delta: list(rest) }),
            "frequency_count" => Ok(LossSpec::FrequencyCount { n: number(rest)? }),
            "merged_objects" => {
                let (objects, parametric) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidLossModel("use merged_objects:OBJECTS:e1,e2".into()))?;
                Ok(LossSpec::MergedObjects { objects: number(objects)?, parametric: list(parametric) })
            }
            _ => Err(Error::InvalidLossModel(format!("unknown loss model `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{safeiter, Q0, Q1, Q2, QERR};

    #[test]
    fn dropped_count_layout() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        assert_eq!(m.gamma().names(), ["c", "n", "u", "1", "2"]);
        assert_eq!(m.factor_words(4, 6, 100).unwrap().len(), 9);
        assert_eq!(m.factor_words(3, 6, 100).unwrap().len(), 3);
        assert!(LossModel::dropped_count(p.alphabet(), 0).is_err());
    }

    #[test]
    fn inverse_reach_examples() {
        let p = safeiter();
        let m = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        assert_eq!(m.inverse_reach(&p, Q1, 4).unwrap(), vec![Q1, Q2, QERR]);
        for g in m.gamma().ids() {
            assert_eq!(m.inverse_reach(&p, QERR, g).unwrap(), vec![QERR]);
        }
        let s = LossModel::silent_drop(p.alphabet(), &["n"]).unwrap();
        let u = s.gamma().require("u'").unwrap();
        assert_eq!(s.inverse_reach(&p, Q1, u).unwrap(), vec![Q2]);
        assert_eq!(s.inverse_reach(&p, Q0, u).unwrap(), vec![QERR]);
    }

    #[test]
    fn frequency_count_vectors() {
        let sigma = Alphabet::new(["n", "u"]).unwrap();
        let m = LossModel::frequency_count(&sigma, 2).unwrap();
        assert_eq!(m.gamma().names(), ["n", "u", "(0,1)", "(1,0)", "(0,2)", "(1,1)", "(2,0)"]);
        let g = m.gamma().require("(1,1)").unwrap();
        assert_eq!(m.factor_words(g, 6, 10).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let g = m.gamma().require("(2,0)").unwrap();
        assert_eq!(m.factor_words(g, 6, 10).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn count_reach_from_q1() {
        let p = safeiter();
        let m = LossModel::frequency_count(p.alphabet(), 2).unwrap();
        let g = m.gamma().require("(0,1,1)").unwrap();
        assert_eq!(m.inverse_reach(&p, Q1, g).unwrap(), vec![Q2, QERR]);
    }

    #[test]
    fn merged_objects_groups_indexed_events() {
        let sigma = Alphabet::new(["c1", "n1", "c2", "n2", "u"]).unwrap();
        let m = LossModel::merged_objects(&sigma, &["c", "n"], 2).unwrap();
        assert_eq!(m.gamma().names(), ["c", "n", "u"]);
        let n = m.gamma().require("n").unwrap();
        assert_eq!(m.factor_words(n, 3, 10).unwrap(), vec![vec![1], vec![3]]);
        assert!(matches!(m.inverse(2), InverseSpec::Singleton(4)));
    }

    #[test]
    fn shorthand_parsing() {
        assert_eq!("dropped_count:2".parse::<LossSpec>().unwrap(), LossSpec::DroppedCount { n: 2 });
        assert_eq!(
            "silent_drop:n,u".parse::<LossSpec>().unwrap(),
            LossSpec::SilentDrop { delta: vec!["n".into(), "u".into()] }
        );
        assert_eq!("silent_drop:".parse::<LossSpec>().unwrap(), LossSpec::SilentDrop { delta: vec![] });
        assert_eq!(
            "merged_objects:2:c,n".parse::<LossSpec>().unwrap(),
            LossSpec::MergedObjects { objects: 2, parametric: vec!["c".into(), "n".into()] }
        );
        assert!("bogus".parse::<LossSpec>().is_err());
        assert!("dropped_count:x".parse::<LossSpec>().is_err());
    }

    #[test]
    fn custom_json_models() {
        let p = safeiter();
        let spec = LossSpec::from_json(r#"{"type":"custom","passthrough":["c","n","u"],"gamma":{"k":{"regex":"u n* u"}}}"#)
            .unwrap();
        let m = spec.build(&p).unwrap();
        let k = m.gamma().require("k").unwrap();
        assert_eq!(m.inverse_reach(&p, Q1, k).unwrap(), vec![Q2, QERR]);
        let spec = LossSpec::from_json(r#"{"type":"custom_statemap","gamma":{"k":{"map":{"0":[1,2]}}}}"#).unwrap();
        let m = spec.build(&p).unwrap();
        assert_eq!(m.inverse_reach(&p, Q0, 0).unwrap(), vec![Q1, Q2]);
        assert_eq!(m.inverse_reach(&p, Q2, 0).unwrap(), vec![QERR]);
        assert_eq!(m.asserted_symbols(), ["k"]);
        let err = LossSpec::from_json(r#"{"type":"dropped_count","m":2}"#).unwrap_err().to_string();
        assert!(err.contains("unknown field"), "{err}");
    }

    #[test]
    fn empty_inverse_is_rejected() {
        let sigma = Alphabet::new(["a"]).unwrap();
        let empty = Nfa::new(sigma.clone(), 1, 0);
        let gamma = Alphabet::new(["g"]).unwrap();
        assert!(LossModel::new(sigma, gamma, vec![InverseSpec::Regular(empty)], "x").is_err());
    }

    #[test]
    fn finiteness() {
        let p = safeiter();
        assert!(LossModel::dropped_count(p.alphabet(), 3).unwrap().is_finite(5));
        let s = LossModel::silent_drop(p.alphabet(), &["n"]).unwrap();
        assert!(!s.is_finite(0));
        assert!(LossModel::silent_drop(p.alphabet(), &[] as &[&str]).unwrap().is_finite(0));
    }
}
