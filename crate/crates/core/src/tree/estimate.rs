use std::io::Write;

use rayon::prelude::*;

use super::lazy::{block_tables, LazyEval};
use super::{evaluate, is_root_determining, LeafAssignment, MarkedTree, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::model::{Dist, MapFamily};

/// Empirical law of the root value with per-state binomial standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub dist: Dist,
    pub stderr: Vec<f64>,
    pub n_samples: usize,
}

impl Estimate {
    fn from_counts(counts: &[u64]) -> Self {
        let n: u64 = counts.iter().sum();
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let stderr = probs.iter().map(|&p| binomial_se(p, n as usize)).collect();
        Self { dist: Dist::from_raw(probs), stderr, n_samples: n as usize }
    }

    /// CSV with header `state,probability,stderr`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "state,probability,stderr")?;
        for (s, (&p, &se)) in self.dist.weights().iter().zip(&self.stderr).enumerate() {
            writeln!(w, "{s},{},{}", fmt17(p), fmt17(se))?;
        }
        Ok(())
    }
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn check_samples(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Monte Carlo estimate of `T_t(μ0)`: sample trees, fill the boundary with
/// i.i.d. draws from `μ0` and record the root value.
pub fn mc_estimate_tt(family: &MapFamily, mu0: &Dist, t: f64, n_samples: usize, seed: u64) -> Result<Estimate> {
    mc_estimate_tt_with(family, mu0, t, n_samples, seed, DEFAULT_NODE_BUDGET)
}

pub fn mc_estimate_tt_with(
    family: &MapFamily,
    mu0: &Dist,
    t: f64,
    n_samples: usize,
    seed: u64,
    budget: usize,
) -> Result<Estimate> {
    check_samples(n_samples)?;
    check_horizon(t)?;
    let n = family.space().size();
    if mu0.len() != n {
        return Err(Error::InvalidDist(format!("initial law has {} states, family has {n}", mu0.len())));
    }
    let counts = (0..n_samples as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u64; n],
            |mut acc, i| {
                let tree = MarkedTree::sample_replica(family, t, seed, i, budget)?;
                acc[evaluate(&tree, family, &LeafAssignment::iid(&tree, mu0)) as usize] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(|| vec![0u64; n], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
    Ok(Estimate::from_counts(&counts))
}

/// Sample mean of `|∇S_t|` next to its expectation `e^{Kt}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    pub n_samples: usize,
}

impl GrowthEstimate {
    /// Distance from the expectation in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected) / self.stderr.max(f64::MIN_POSITIVE)
    }
}

pub fn boundary_growth(family: &MapFamily, t: f64, n_samples: usize, seed: u64) -> Result<GrowthEstimate> {
    check_samples(n_samples)?;
    check_horizon(t)?;
    let sizes = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| MarkedTree::sample_replica(family, t, seed, i, DEFAULT_NODE_BUDGET).map(|tr| tr.leaves().len() as f64))
        .collect::<Result<Vec<f64>>>()?;
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<f64>() / n;
    let var = if sizes.len() > 1 { sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(GrowthEstimate {
        mean,
        stderr: (var / n).sqrt(),
        expected: (family.constants().k * t).exp(),
        n_samples,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub t: f64,
    pub fraction: f64,
    pub stderr: f64,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    for &t in t_grid {
        check_horizon(t)?;
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be increasing".into()));
    }
    Ok(())
}

/// Fraction of replicas whose `G_t` is constant, for each `t` in the grid.
///
/// Replica `i` is the same infinite tree at every horizon, so once `G_t` is
/// constant it stays constant at later horizons and is not re-evaluated.
/// Monotone families on a bounded order are evaluated lazily at the all-min
/// and all-max boundaries; other families build the truncation and enumerate.
pub fn uniqueness_scan(family: &MapFamily, t_grid: &[f64], n_samples: usize, seed: u64) -> Result<Vec<ScanPoint>> {
    uniqueness_scan_with(family, t_grid, n_samples, seed, DEFAULT_NODE_BUDGET)
}

/// [`uniqueness_scan`] with an explicit per-tree node budget.
pub fn uniqueness_scan_with(
    family: &MapFamily,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<ScanPoint>> {
    check_samples(n_samples)?;
    check_grid(t_grid)?;
    let monotone = family.space().is_bounded() && family.is_monotone();
    let top = (family.space().size() - 1) as u32;
    let blocks = block_tables(family);
    let counts = (0..n_samples as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u64; t_grid.len()],
            |mut acc, i| {
                let mut constant = false;
                for (slot, &t) in acc.iter_mut().zip(t_grid) {
                    if !constant {
                        constant = if monotone {
                            let mut lazy = LazyEval::new(family, &blocks, seed, i, t, budget);
                            lazy.root_value(0)? == lazy.root_value(top)?
                        } else {
                            let tree = MarkedTree::sample_replica(family, t, seed, i, budget)?;
                            is_root_determining(&tree, family)?
                        };
                    }
                    *slot += u64::from(constant);
                }
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(|| vec![0u64; t_grid.len()], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
    Ok(t_grid
        .iter()
        .zip(&counts)
        .map(|(&t, &c)| {
            let fraction = c as f64 / n_samples as f64;
            ScanPoint { t, fraction, stderr: binomial_se(fraction, n_samples) }
        })
        .collect())
}

/// Monte Carlo probabilities that the tree truncated at `t` has an open
/// subtree (`upper`) and a finite one (`lower`).
///
/// `upper` is nonincreasing in `t` towards `ν_upp({1})`, `lower` is
/// nondecreasing towards `ν_low({1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityEstimate {
    pub t: f64,
    pub upper: f64,
    pub upper_se: f64,
    pub lower: f64,
    pub lower_se: f64,
    pub n_samples: usize,
}

pub fn duality_estimate(family: &MapFamily, t: f64, n_samples: usize, seed: u64) -> Result<DualityEstimate> {
    Ok(duality_scan(family, &[t], n_samples, seed)?.remove(0))
}

pub fn duality_scan(family: &MapFamily, t_grid: &[f64], n_samples: usize, seed: u64) -> Result<Vec<DualityEstimate>> {
    check_samples(n_samples)?;
    check_grid(t_grid)?;
    if family.space().size() != 2 || !family.space().is_bounded() || !family.is_monotone() {
        return Err(Error::Unsupported("duality needs a monotone family on ordered {0, 1}".into()));
    }
    let blocks = block_tables(family);
    let m = t_grid.len();
    let counts = (0..n_samples as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u64; 2 * m],
            |mut acc, i| {
                for (j, &t) in t_grid.iter().enumerate() {
                    let mut lazy = LazyEval::new(family, &blocks, seed, i, t, DEFAULT_NODE_BUDGET);
                    acc[j] += u64::from(lazy.root_value(1)? == 1);
                    acc[m + j] += u64::from(lazy.root_value(0)? == 1);
                }
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(|| vec![0u64; 2 * m], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
    let frac = |c: u64| c as f64 / n_samples as f64;
    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let (upper, lower) = (frac(counts[j]), frac(counts[m + j]));
            DualityEstimate {
                t,
                upper,
                upper_se: binomial_se(upper, n_samples),
                lower,
                lower_se: binomial_se(lower, n_samples),
                n_samples,
            }
        })
        .collect())
}
