//! Population dynamics for the higher-level equation on `P({0,1}) ≅ [0,1]`.
//!
//! A measure `ρ` on `[0,1]` is represented by a pool of `M` samples. One sweep
//! replaces every sample by `ĝ(η_1, …, η_k)` with `g` drawn from the family and
//! the `η_j` drawn with replacement from the previous pool.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::meanfield::coop_roots;
use crate::model::{Dist, LocalMap, MapFamily, Preset};
use crate::rng::CounterRng;

const POOL_STREAM: u64 = 0x706f_6f6c;
const CHUNK: usize = 4096;

/// Multilinear extension `ĝ(η) = P[g(X) = 1]` for independent `X_i ~ Bernoulli(η_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HigherMap {
    name: String,
    arity: usize,
    // (set of coordinates as a bit mask, coefficient), bit i is coordinate i
    terms: Vec<(u32, f64)>,
    // inputs x with g(x) = 1 and g(x) = 0, same bit convention
    ones: Vec<u32>,
    zeros: Vec<u32>,
}

impl HigherMap {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Nonzero coefficients of `Π_{i ∈ S} η_i`, keyed by the bit mask of `S`.
    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    #[inline]
    pub fn apply(&self, eta: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(mask, c) in &self.terms {
            let mut prod = c;
            let mut m = mask;
            while m != 0 {
                prod *= eta[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            acc += prod;
        }
        acc.clamp(0.0, 1.0)
    }

    /// `(ĝ(η), 1 - ĝ(η))` from inputs `η` and their complements `q = 1 - η`.
    ///
    /// Both outputs are sums of products of inputs, normalized to add up to 1,
    /// so neither loses precision near 0 and an output is exactly 0 only when
    /// forced to be.
    #[inline]
    pub fn apply_pair(&self, eta: &[f64], q: &[f64]) -> (f64, f64) {
        let weight = |x: u32| (0..self.arity).map(|i| if x >> i & 1 == 1 { eta[i] } else { q[i] }).product::<f64>();
        let one: f64 = self.ones.iter().map(|&x| weight(x)).sum();
        let zero: f64 = self.zeros.iter().map(|&x| weight(x)).sum();
        // rounding errors would otherwise add up from one generation to the next
        let total = one + zero;
        (one / total, zero / total)
    }
}

/// Möbius coefficients of `g` on `{0,1}`.
pub fn hat_map(g: &LocalMap) -> Result<HigherMap> {
    if g.n_states() != 2 {
        return Err(Error::Unsupported(format!("`{}` is not a map on {{0, 1}}", g.name())));
    }
    let k = g.arity();
    if k > 16 {
        return Err(Error::Unsupported(format!("arity {k} is too large for a multilinear expansion")));
    }
    let value = |set: u32| -> f64 {
        let idx = (0..k).filter(|&i| set >> i & 1 == 1).map(|i| 1usize << (k - 1 - i)).sum::<usize>();
        g.table()[idx] as f64
    };
    let (ones, zeros) = (0..1u32 << k).partition(|&x| value(x) == 1.0);
    let mut terms = Vec::new();
    for s in 0..(1u32 << k) {
        let mut c = 0.0;
        let mut t = s;
        loop {
            let sign = if (s.count_ones() - t.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            c += sign * value(t);
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        if c != 0.0 {
            terms.push((s, c));
        }
    }
    Ok(HigherMap { name: g.name().to_string(), arity: k, terms, ones, zeros })
}

/// Family of lifted maps sharing the rates of a [`MapFamily`] on `{0,1}`.
#[derive(Clone, Debug)]
pub struct HigherFamily {
    family: MapFamily,
    maps: Vec<HigherMap>,
}

impl HigherFamily {
    pub fn new(family: &MapFamily) -> Result<Self> {
        let maps = family.entries().iter().map(|e| hat_map(&e.map)).collect::<Result<_>>()?;
        Ok(Self { family: family.clone(), maps })
    }

    pub fn maps(&self) -> &[HigherMap] {
        &self.maps
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePool {
    values: Vec<f64>,
    // 1 - values, kept separately so values near 1 stay distinguishable from 1
    comps: Vec<f64>,
    generation: u64,
    seed: u64,
}

impl SamplePool {
    pub fn new(values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("pool must not be empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("pool value {v} is outside [0, 1]")));
        }
        let comps = values.iter().map(|v| 1.0 - v).collect();
        Ok(Self { values, comps, generation: 0, seed })
    }

    /// `M` copies of `z`, representing `δ_{Bernoulli(z)}`.
    pub fn constant(m: usize, z: f64, seed: u64) -> Result<Self> {
        Self::new(vec![z; m], seed)
    }

    /// `M` i.i.d. Bernoulli(`p`) values in `{0, 1}`, representing the law `ν̄` of a point mass.
    pub fn bernoulli(m: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} is outside [0, 1]")));
        }
        let values = (0..m as u64)
            .map(|i| f64::from(CounterRng::from_coords(seed, &[POOL_STREAM, u64::MAX, i]).open01() < p))
            .collect();
        Self::new(values, seed)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `1 - η` for every sample, carried at full relative precision.
    pub fn complements(&self) -> &[f64] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mean(&self) -> f64 {
        chunked_sum(self, |v, _| v) / self.len() as f64
    }
}

// Sum of f(η, 1 - η) with a fixed chunking so results do not depend on the thread count.
fn chunked_sum(pool: &SamplePool, f: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    pool.values
        .par_chunks(CHUNK)
        .zip(pool.comps.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(&v, &q)| f(v, q)).sum::<f64>())
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// One application of `Ť` to the empirical measure of the pool.
pub fn pool_sweep(pool: &SamplePool, family: &HigherFamily) -> SamplePool {
    let m = pool.len();
    let generation = pool.generation + 1;
    let mut values = vec![0.0; m];
    let mut comps = vec![0.0; m];
    values
        .par_chunks_mut(CHUNK)
        .zip(comps.par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(c, (vals, qs))| {
            let mut eta = Vec::with_capacity(family.family.max_arity());
            let mut q = Vec::with_capacity(family.family.max_arity());
            for (off, (v_out, q_out)) in vals.iter_mut().zip(qs.iter_mut()).enumerate() {
                let i = (c * CHUNK + off) as u64;
                let mut rng = CounterRng::from_coords(pool.seed, &[POOL_STREAM, generation, i]);
                let map = &family.maps[family.family.choose(rng.open01())];
                eta.clear();
                q.clear();
                for _ in 0..map.arity {
                    let j = rng.index(m);
                    eta.push(pool.values[j]);
                    q.push(pool.comps[j]);
                }
                (*v_out, *q_out) = map.apply_pair(&eta, &q);
            }
        });
    SamplePool { values, comps, generation, seed: pool.seed }
}

/// Rescales the pool by `η ↦ η^c` so that its mean equals `target`.
///
/// Values `0` and `1` are left unchanged. Returns the exponent used.
pub fn pin_mean(pool: &mut SamplePool, target: f64) -> Result<f64> {
    let m = pool.len() as f64;
    let ones = pool.comps.iter().filter(|&&q| q == 0.0).count() as f64 / m;
    let has_interior = pool.values.iter().zip(&pool.comps).any(|(&v, &q)| v > 0.0 && q > 0.0);
    if !has_interior || target <= ones || !(target < 1.0) {
        return Err(Error::NotConverged(format!("cannot pin pool mean to {target}")));
    }
    let f = |c: f64| chunked_sum(pool, |v, q| if v > 0.0 && q > 0.0 { (c * log_eta(v, q)).exp() } else { v }) / m - target;
    let df = |c: f64| {
        chunked_sum(pool, |v, q| {
            if v > 0.0 && q > 0.0 {
                let l = log_eta(v, q);
                (c * l).exp() * l
            } else {
                0.0
            }
        }) / m
    };
    let mut c = 1.0;
    let mut fc = f(c);
    for _ in 0..60 {
        if fc.abs() < 1e-15 {
            break;
        }
        let step = fc / df(c);
        let next = c - step;
        c = if next > 0.0 { next } else { c / 2.0 };
        fc = f(c);
    }
    if fc.abs() > 1e-12 {
        return Err(Error::NotConverged(format!("mean pinning stalled at residual {fc:e}")));
    }
    if c != 1.0 {
        pool.values.par_iter_mut().zip(pool.comps.par_iter_mut()).for_each(|(v, q)| {
            if *v > 0.0 && *q > 0.0 {
                let l = c * log_eta(*v, *q);
                *v = l.exp();
                *q = -l.exp_m1();
            }
        });
    }
    Ok(c)
}

// ln η, accurate also when η is close to 1
fn log_eta(v: f64, q: f64) -> f64 {
    if q < 0.5 {
        (-q).ln_1p()
    } else {
        v.ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HlSolution {
    pub pool: SamplePool,
    pub alpha: f64,
    pub sweeps: usize,
    /// `(mean, m2, atom0)` stayed within `2/√M` over the last 10 sweeps.
    pub converged: bool,
}

impl HlSolution {
    pub fn into_result(self) -> Result<SamplePool> {
        if self.converged {
            Ok(self.pool)
        } else {
            Err(Error::NotConverged(format!("pool not stable after {} sweeps", self.sweeps)))
        }
    }
}

/// Iterates `Ť` for `coop(α)` from `δ_{ν_mid}` towards `ν̲_mid`.
///
/// The mean direction of the empirical iteration is linearly unstable at
/// `ν̲_mid`, so after every sweep the pool is pinned back to mean `z_mid`
/// with [`pin_mean`].
pub fn solve_hl_rde(alpha: f64, m: usize, sweeps: usize, seed: u64) -> Result<HlSolution> {
    let Some((z_mid, _)) = coop_roots(alpha).filter(|_| alpha > 4.0) else {
        return Err(Error::InvalidParameter(format!("the mid fixed point needs alpha > 4, got {alpha}")));
    };
    if m < 10_000 {
        return Err(Error::InvalidParameter(format!("pool size must be at least 10^4, got {m}")));
    }
    let family = HigherFamily::new(&MapFamily::preset(Preset::Coop { alpha })?)?;
    let mut pool = SamplePool::constant(m, z_mid, seed)?;
    let tol = 2.0 / (m as f64).sqrt();
    let mut history: Vec<[f64; 3]> = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        pool = pool_sweep(&pool, &family);
        pin_mean(&mut pool, z_mid)?;
        let s = pool_stats(&pool);
        history.push([s.mean, s.m2, s.atom0]);
    }
    let converged = history.len() >= 10 && {
        let tail = &history[history.len() - 10..];
        (0..3).all(|j| {
            let (lo, hi) = tail
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), h| (lo.min(h[j]), hi.max(h[j])));
            hi - lo <= tol
        })
    };
    Ok(HlSolution { pool, alpha, sweeps, converged })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolStats {
    pub mean: f64,
    pub m2: f64,
    pub atom0: f64,
    pub atom1: f64,
    /// `(η_j, F(η_j))` on the grid `η_j = j/1000`.
    pub cdf: Vec<(f64, f64)>,
}

pub const CDF_POINTS: usize = 1001;

pub fn pool_stats(pool: &SamplePool) -> PoolStats {
    let m = pool.len() as f64;
    let mut sorted = pool.values.clone();
    sorted.par_sort_unstable_by(f64::total_cmp);
    let cdf = (0..CDF_POINTS)
        .map(|j| {
            let eta = j as f64 / (CDF_POINTS - 1) as f64;
            (eta, sorted.partition_point(|&v| v <= eta) as f64 / m)
        })
        .collect();
    PoolStats {
        mean: pool.mean(),
        m2: chunked_sum(pool, |v, _| v * v) / m,
        atom0: sorted.partition_point(|&v| v <= 0.0) as f64 / m,
        atom1: pool.comps.iter().filter(|&&q| q == 0.0).count() as f64 / m,
        cdf,
    }
}

impl PoolStats {
    /// CSV with header `eta,F`, one row per grid point.
    pub fn write_cdf_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eta,F")?;
        for &(eta, f) in &self.cdf {
            writeln!(w, "{},{}", fmt17(eta), fmt17(f))?;
        }
        Ok(())
    }
}

/// Summary written next to the CDF.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HlSummary {
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub sweeps: usize,
    pub mean: f64,
    pub m2: f64,
    pub atom0: f64,
    pub atom1: f64,
}

impl HlSummary {
    pub fn new(solution: &HlSolution, stats: &PoolStats) -> Self {
        Self {
            alpha: solution.alpha,
            m: solution.pool.len(),
            sweeps: solution.sweeps,
            mean: stats.mean,
            m2: stats.m2,
            atom0: stats.atom0,
            atom1: stats.atom1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric struct")
    }
}

/// `n`-th moment measure `ρ^{(n)}[x] = E[Π_i η^{x_i} (1-η)^{1-x_i}]` on `{0,1}^n`.
pub fn moment_measure(pool: &SamplePool, n: usize) -> Result<Dist> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!("moment order must be 1..=4, got {n}")));
    }
    let m = pool.len() as f64;
    // law of x depends only on the number of ones
    let by_ones: Vec<f64> = (0..=n)
        .map(|j| chunked_sum(pool, |v, q| v.powi(j as i32) * q.powi((n - j) as i32)) / m)
        .collect();
    let weights = (0..1usize << n).map(|x| by_ones[x.count_ones() as usize]).collect();
    Dist::new(weights)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexOrderCheck {
    /// No test function exceeded three standard errors.
    pub leq: bool,
    /// Largest `E[φ(η_A)] - E[φ(η_B)]` over the test functions.
    pub max_violation: f64,
    /// Standard error of that difference.
    pub se_at_max: f64,
    /// Largest difference measured in standard errors.
    pub max_z: f64,
}

/// Checks `E[φ(η_A)] ≤ E[φ(η_B)] + 3 se` for hinges `(η-c)^+`, `(c-η)^+` on a
/// grid of `n_hinges` points and for `±η`.
///
/// Passing is necessary for `A ≤_cv B`; it is not a proof.
pub fn convex_order_compare(a: &SamplePool, b: &SamplePool, n_hinges: usize) -> ConvexOrderCheck {
    let mut phis: Vec<Box<dyn Fn(f64) -> f64 + Sync>> = vec![Box::new(|v| v), Box::new(|v| -v)];
    let n = n_hinges.max(2);
    for j in 0..n {
        let c = j as f64 / (n - 1) as f64;
        phis.push(Box::new(move |v| (v - c).max(0.0)));
        phis.push(Box::new(move |v| (c - v).max(0.0)));
    }
    let moments = |pool: &SamplePool, phi: &(dyn Fn(f64) -> f64 + Sync)| {
        let m = pool.len() as f64;
        let mean = chunked_sum(pool, |v, _| phi(v)) / m;
        let var = (chunked_sum(pool, |v, _| phi(v) * phi(v)) / m - mean * mean).max(0.0);
        (mean, var / m)
    };
    let mut out = ConvexOrderCheck { leq: true, max_violation: f64::NEG_INFINITY, se_at_max: 0.0, max_z: f64::NEG_INFINITY };
    for phi in &phis {
        let (ma, va) = moments(a, phi.as_ref());
        let (mb, vb) = moments(b, phi.as_ref());
        let diff = ma - mb;
        let se = (va + vb).sqrt();
        if diff > 3.0 * se + 1e-12 {
            out.leq = false;
        }
        if diff > out.max_violation {
            out.max_violation = diff;
            out.se_at_max = se;
        }
        let z = if se > 0.0 { diff / se } else if diff > 1e-12 { f64::INFINITY } else { 0.0 };
        out.max_z = out.max_z.max(z);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::apply_t;
    use crate::model::decode_into;
    use proptest::prelude::*;

    fn coop_hl(alpha: f64) -> HigherFamily {
        HigherFamily::new(&MapFamily::preset(Preset::Coop { alpha }).unwrap()).unwrap()
    }

    #[test]
    fn builtin_hat_maps() {
        let cob = hat_map(&LocalMap::cob()).unwrap();
        for eta in [[0.2, 0.5, 0.7], [0.9, 0.1, 0.3]] {
            let expect = eta[0] + (1.0 - eta[0]) * eta[1] * eta[2];
            assert!((cob.apply(&eta) - expect).abs() < 1e-15);
        }
        assert_eq!(hat_map(&LocalMap::dth()).unwrap().apply(&[]), 0.0);
        assert_eq!(hat_map(&LocalMap::bth()).unwrap().apply(&[]), 1.0);
        let bra = hat_map(&LocalMap::bra()).unwrap();
        assert!((bra.apply(&[0.3, 0.6]) - (0.3 + 0.6 - 0.18)).abs() < 1e-15);
        assert!(hat_map(&LocalMap::identity(3)).is_err());
        let eta = [1.0 - 1e-18, 0.5, 0.5];
        let q = [1e-18, 0.5, 0.5];
        let (one, zero) = cob.apply_pair(&eta, &q);
        assert!(one <= 1.0 && zero > 0.0);
        assert!((zero - 0.75e-18).abs() < 1e-30);
    }

    proptest! {
        #[test]
        fn hat_map_restricts_to_base_map(table in proptest::collection::vec(0u32..2, 16)) {
            let g = LocalMap::new("g", 2, 4, table).unwrap();
            let h = hat_map(&g).unwrap();
            let mut x = [0u32; 4];
            for i in 0..16 {
                decode_into(i, 2, &mut x);
                let eta: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                prop_assert_eq!(h.apply(&eta), g.apply(&x) as f64);
                let q: Vec<f64> = eta.iter().map(|e| 1.0 - e).collect();
                prop_assert_eq!(h.apply_pair(&eta, &q), (g.apply(&x) as f64, 1.0 - g.apply(&x) as f64));
            }
        }

        #[test]
        fn hat_map_is_probability(table in proptest::collection::vec(0u32..2, 8), eta in proptest::array::uniform3(0.0f64..=1.0)) {
            let g = LocalMap::new("g", 2, 3, table).unwrap();
            let h = hat_map(&g).unwrap();
            // direct sum over x with g(x) = 1
            let mut x = [0u32; 3];
            let mut direct = 0.0;
            for i in 0..8 {
                decode_into(i, 2, &mut x);
                if g.apply(&x) == 1 {
                    direct += x.iter().zip(&eta).map(|(&xi, &e)| if xi == 1 { e } else { 1.0 - e }).product::<f64>();
                }
            }
            prop_assert!((h.apply(&eta) - direct).abs() < 1e-12);
            let q: Vec<f64> = eta.iter().map(|e| 1.0 - e).collect();
            let (one, zero) = h.apply_pair(&eta, &q);
            prop_assert!((one - direct).abs() < 1e-12);
            prop_assert!((one + zero - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pool_is_fixed() {
        let pool = SamplePool::constant(1000, 0.0, 1).unwrap();
        let next = pool_sweep(&pool, &coop_hl(4.5));
        assert!(next.values().iter().all(|&v| v == 0.0));
        assert_eq!(next.generation(), 1);
    }

    #[test]
    fn one_pool_becomes_bernoulli() {
        let m = 100_000;
        let alpha: f64 = 4.5;
        let next = pool_sweep(&SamplePool::constant(m, 1.0, 2).unwrap(), &coop_hl(alpha));
        assert!(next.values().iter().all(|&v| v == 0.0 || v == 1.0));
        let p = alpha / (alpha + 1.0);
        assert!((next.mean() - p).abs() < 3.0 * (p * (1.0 - p) / m as f64).sqrt());
    }

    #[test]
    fn binary_pool_matches_meanfield_map() {
        let m = 100_000;
        let fam = MapFamily::preset(Preset::CoopBirth { alpha: 2.0, beta: 0.5 }).unwrap();
        let hl = HigherFamily::new(&fam).unwrap();
        let pool = SamplePool::bernoulli(m, 0.4, 3).unwrap();
        let law = Dist::bernoulli(pool.mean()).unwrap();
        let expect = apply_t(&fam, &law).unwrap().prob(1);
        let next = pool_sweep(&pool, &hl);
        assert!((next.mean() - expect).abs() < 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn mean_of_constant_mid_pool_is_preserved() {
        let alpha = 4.5;
        let (z, _) = coop_roots(alpha).unwrap();
        let m = 200_000;
        let next = pool_sweep(&SamplePool::constant(m, z, 4).unwrap(), &coop_hl(alpha));
        assert!((next.mean() - z).abs() < 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn sweeps_are_reproducible() {
        let hl = coop_hl(4.5);
        let pool = SamplePool::constant(20_000, 0.4, 9).unwrap();
        assert_eq!(pool_sweep(&pool, &hl), pool_sweep(&pool, &hl));
    }

    #[test]
    fn pinning_keeps_atoms() {
        let mut pool = SamplePool::new(vec![0.0, 0.2, 0.5, 0.9, 1.0], 0).unwrap();
        let c = pin_mean(&mut pool, 0.45).unwrap();
        assert!(c > 1.0);
        assert!((pool.mean() - 0.45).abs() < 1e-14);
        assert_eq!(pool.values()[0], 0.0);
        assert_eq!(pool.values()[4], 1.0);
        assert!(pin_mean(&mut SamplePool::constant(10, 0.0, 0).unwrap(), 0.3).is_err());
    }

    #[test]
    fn stats_of_constant_pool() {
        let s = pool_stats(&SamplePool::constant(100, 0.25, 0).unwrap());
        assert_eq!((s.mean, s.m2, s.atom0, s.atom1), (0.25, 0.0625, 0.0, 0.0));
        assert_eq!(s.cdf.len(), CDF_POINTS);
        assert_eq!(s.cdf[249].1, 0.0);
        assert_eq!(s.cdf[250].1, 1.0);
        let mut buf = Vec::new();
        s.write_cdf_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + CDF_POINTS);
    }

    #[test]
    fn moment_measures_of_simple_pools() {
        let pool = SamplePool::new(vec![0.2, 0.6], 0).unwrap();
        let m1 = moment_measure(&pool, 1).unwrap();
        assert!((m1.prob(1) - 0.4).abs() < 1e-15);
        let ones = SamplePool::constant(10, 1.0, 0).unwrap();
        let m3 = moment_measure(&ones, 3).unwrap();
        assert_eq!(m3.prob(7), 1.0);
        assert!(moment_measure(&pool, 5).is_err());
    }

    #[test]
    fn convex_order_diagnostic_on_simple_pools() {
        let point = SamplePool::constant(20_000, 0.5, 0).unwrap();
        let spread = SamplePool::bernoulli(20_000, 0.5, 1).unwrap();
        let fwd = convex_order_compare(&point, &spread, 51);
        assert!(fwd.leq);
        let back = convex_order_compare(&spread, &point, 51);
        assert!(!back.leq && back.max_violation > 3.0 * back.se_at_max);
        let same = convex_order_compare(&spread, &spread, 51);
        assert!(same.leq && same.max_violation <= 3.0 * same.se_at_max + 1e-15);
    }

    #[test]
    fn solver_rejects_bad_parameters() {
        assert!(solve_hl_rde(3.0, 10_000, 10, 0).is_err());
        assert!(solve_hl_rde(4.5, 100, 10, 0).is_err());
    }

    #[test]
    fn solved_pool_has_known_moments_at_small_size() {
        let alpha = 4.5;
        let sol = solve_hl_rde(alpha, 20_000, 150, 5).unwrap();
        let s = pool_stats(&sol.pool);
        let z = 1.0 / 3.0;
        let m2 = 0.5 * z - 0.5 + 0.5 * (13.0 * z * z - 6.0 * z + 1.0 + 4.0 / alpha).sqrt();
        assert!((s.mean - z).abs() < 1e-12);
        assert!((s.m2 - m2).abs() < 0.01, "m2 {}", s.m2);
        assert!((s.atom0 - z).abs() < 0.015, "atom0 {}", s.atom0);
        assert_eq!(s.atom1, 0.0);
        let drift = sol
            .pool
            .values()
            .iter()
            .zip(sol.pool.complements())
            .map(|(v, q)| (v + q - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-14, "values and complements drifted apart by {drift:e}");
    }
}
