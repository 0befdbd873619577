//! n-variate lifting of maps, the exact bivariate operator on `{0,1}²`, and
//! the `(p, r)` equation of cooperative branching with its fixed points.
//!
//! A symmetric law `μ²` on `{0,1}²` is parametrized by `p = μ²(1,·)` and
//! `r = 1 − μ²(0,0)`; the map is a bijection onto
//! `D = {0 ≤ p ≤ 1, p ≤ r ≤ min(1, 2p)}` and `μ²` sits on the diagonal iff `p = r`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::meanfield::{self, coop_roots};
use crate::model::{decode_into, table_size, Dist, LocalMap, MapFamily, StateSpace, DEFAULT_ENUMERATION_CAP};
use crate::ode::{step_count, Rk4};

/// Tolerance used when checking membership of `D`.
const DOMAIN_SLACK: f64 = 1e-6;

/// Law on `{0,1}²`, weights ordered `(0,0), (0,1), (1,0), (1,1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDist {
    weights: [f64; 4],
}

impl PairDist {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let d = Dist::new(weights.to_vec())?;
        let w = d.weights();
        Ok(Self { weights: [w[0], w[1], w[2], w[3]] })
    }

    /// Like [`new`](Self::new), additionally requiring `μ(0,1) = μ(1,0)` within `1e-12`.
    pub fn symmetric(weights: [f64; 4]) -> Result<Self> {
        let d = Self::new(weights)?;
        if !d.is_symmetric(1e-12) {
            return Err(Error::InvalidDist(format!("{weights:?} is not symmetric")));
        }
        Ok(d)
    }

    /// `μ ⊗ ν`.
    pub fn product(mu: &Dist, nu: &Dist) -> Result<Self> {
        if mu.len() != 2 || nu.len() != 2 {
            return Err(Error::Unsupported("pair laws are over {0,1}".into()));
        }
        let (a, b) = (mu.weights(), nu.weights());
        Self::new([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// Law of `(X, X)` with `P[X = 1] = p`.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new([1.0 - p, 0.0, 0.0, p])
    }

    pub fn from_pr(pr: PrPoint) -> Self {
        let PrPoint { p, r } = pr;
        Self { weights: [1.0 - r, r - p, r - p, 2.0 * p - r] }
    }

    pub fn to_pr(&self) -> PrPoint {
        let w = &self.weights;
        PrPoint { p: w[2] + w[3], r: w[1] + w[2] + w[3] }
    }

    pub fn from_dist(d: &Dist) -> Result<Self> {
        match d.weights() {
            &[a, b, c, e] => Self::new([a, b, c, e]),
            _ => Err(Error::InvalidDist("pair law needs four weights".into())),
        }
    }

    pub fn to_dist(&self) -> Dist {
        Dist::from_raw(self.weights.to_vec())
    }

    pub fn weights(&self) -> &[f64; 4] {
        &self.weights
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.weights[1] - self.weights[2]).abs() <= tol
    }

    pub fn first_marginal(&self) -> Dist {
        let w = &self.weights;
        Dist::from_raw(vec![w[0] + w[1], w[2] + w[3]])
    }

    pub fn second_marginal(&self) -> Dist {
        let w = &self.weights;
        Dist::from_raw(vec![w[0] + w[2], w[1] + w[3]])
    }
}

/// Point `(p, r)` of the domain `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrPoint {
    pub p: f64,
    pub r: f64,
}

impl PrPoint {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        let pt = Self { p, r };
        if !pt.in_domain(1e-12) {
            return Err(Error::InvalidParameter(format!("(p, r) = ({p}, {r}) is outside D")));
        }
        Ok(pt)
    }

    /// Distance-free membership test of `D` with slack `tol`.
    pub fn in_domain(&self, tol: f64) -> bool {
        let PrPoint { p, r } = *self;
        p.is_finite()
            && r.is_finite()
            && p >= -tol
            && p <= 1.0 + tol
            && r >= p - tol
            && r <= 1.0f64.min(2.0 * p) + tol
    }

    fn clip(&mut self) {
        self.p = self.p.clamp(0.0, 1.0);
        self.r = self.r.clamp(self.p, 1.0f64.min(2.0 * self.p));
    }

    /// Independent product start `(z, 2z − z²)` of two Bernoulli(`z`) copies.
    pub fn product(z: f64) -> Self {
        Self { p: z, r: 2.0 * z - z * z }
    }
}

/// Diagonal action `g^(n)(x¹, …, xⁿ) = (g(x¹), …, g(xⁿ))` on `S^n`.
///
/// States of `S^n` are encoded with the first copy most significant.
pub fn lift_map(g: &LocalMap, n: usize) -> Result<LocalMap> {
    if n == 0 {
        return Err(Error::InvalidParameter("lift order must be positive".into()));
    }
    let ns = g.n_states();
    let lifted_states = table_size(ns, n, DEFAULT_ENUMERATION_CAP)?;
    table_size(lifted_states, g.arity(), DEFAULT_ENUMERATION_CAP)?;
    let k = g.arity();
    let mut copies = vec![0; n];
    let mut column = vec![0; k];
    // inputs[j][c] = copy c of argument j
    let mut inputs = vec![vec![0; n]; k];
    LocalMap::from_fn(format!("{}^({n})", g.name()), lifted_states, k, |x| {
        for (j, &xj) in x.iter().enumerate() {
            decode_into(xj as usize, ns, &mut inputs[j]);
        }
        for c in 0..n {
            for j in 0..k {
                column[j] = inputs[j][c];
            }
            copies[c] = g.apply(&column);
        }
        copies.iter().fold(0, |acc, &s| acc * ns as u32 + s)
    })
}

/// Family of lifted maps on `S^n` with the same rates.
pub fn lift_family(family: &MapFamily, n: usize) -> Result<MapFamily> {
    let lifted_states = table_size(family.space().size(), n, DEFAULT_ENUMERATION_CAP)?;
    let entries = family
        .entries()
        .iter()
        .map(|e| Ok((lift_map(&e.map, n)?, e.rate)))
        .collect::<Result<Vec<_>>>()?;
    MapFamily::new(StateSpace::new(lifted_states)?, entries)
}

/// Exact `T^(2)(μ²)` for a family over `{0,1}`.
pub fn apply_t2(family: &MapFamily, mu2: &PairDist) -> Result<PairDist> {
    if family.space().size() != 2 {
        return Err(Error::Unsupported("bivariate operator is implemented on {0,1}".into()));
    }
    let lifted = lift_family(family, 2)?;
    PairDist::from_dist(&meanfield::apply_t(&lifted, &mu2.to_dist())?)
}

/// `P_α(p) = α p²(1−p) − p`.
pub fn p_drift(alpha: f64, p: f64) -> f64 {
    meanfield::coop_drift(alpha, p)
}

/// `R_{α,p}(r) = α[r² − 2(r−p)²](1−r) − r`.
pub fn r_drift(alpha: f64, p: f64, r: f64) -> f64 {
    alpha * (r * r - 2.0 * (r - p) * (r - p)) * (1.0 - r) - r
}

/// Trajectory of the `(p, r)` system.
#[derive(Clone, Debug, PartialEq)]
pub struct PrTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<PrPoint>,
}

impl PrTrajectory {
    pub fn last(&self) -> PrPoint {
        *self.points.last().expect("non-empty trajectory")
    }

    /// CSV `t,p,r`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,p,r")?;
        for (t, pt) in self.times.iter().zip(&self.points) {
            writeln!(w, "{},{},{}", fmt17(*t), fmt17(pt.p), fmt17(pt.r))?;
        }
        Ok(())
    }
}

fn domain_check(y: &[f64]) -> Result<()> {
    let (p, r) = (y[0], y[1]);
    let excess = [-p, p - 1.0, p - r, r - 1.0f64.min(2.0 * p)]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if excess > DOMAIN_SLACK {
        return Err(Error::StepTooLarge(excess));
    }
    Ok(())
}

/// RK4 on the `(p, r)` system for cooperative branching; each step is
/// clipped back into `D`.
pub fn bivariate_ode(alpha: f64, start: PrPoint, t_end: f64, dt: f64) -> Result<PrTrajectory> {
    if !start.in_domain(1e-12) {
        return Err(Error::InvalidParameter(format!("start {start:?} is outside D")));
    }
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need t_end >= 0 and dt > 0, got {t_end}, {dt}")));
    }
    let n = step_count(t_end, dt);
    let h = if n > 0 { t_end / n as f64 } else { 0.0 };
    let mut rk = Rk4::new(2);
    let mut y = [start.p, start.r];
    let mut times = vec![0.0];
    let mut points = vec![start];
    for i in 1..=n {
        rk.step(
            &mut y,
            h,
            |x, d| {
                d[0] = p_drift(alpha, x[0]);
                d[1] = r_drift(alpha, x[0], x[1]);
                Ok(())
            },
            domain_check,
        )?;
        let mut pt = PrPoint { p: y[0], r: y[1] };
        pt.clip();
        y = [pt.p, pt.r];
        times.push(i as f64 * h);
        points.push(pt);
    }
    Ok(PrTrajectory { times, points })
}

/// Middle root of `R_{α,z_mid}` for `α > 4`.
///
/// `R_{α,z}(r)` is the cubic `α r³ − α(4z+1) r² + (α(2z²+4z) − 1) r − 2αz²`,
/// which vanishes at `r = z`; after deflating that root the smaller root of
/// the remaining quadratic is the middle one.
pub fn r_mid(alpha: f64) -> Option<f64> {
    let (z, upp) = coop_roots(alpha)?;
    if z == upp {
        return None;
    }
    let c3 = alpha;
    let c2 = -alpha * (4.0 * z + 1.0);
    let c1 = alpha * (2.0 * z * z + 4.0 * z) - 1.0;
    // synthetic division by (r − z)
    let q2 = c3;
    let q1 = c2 + z * q2;
    let q0 = c1 + z * q1;
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc < 0.0 {
        return None;
    }
    // numerically stable pair of roots
    let s = -0.5 * (q1 + q1.signum() * disc.sqrt());
    let (a, b) = (s / q2, q0 / s);
    let root = a.min(b);
    (root > z && root <= 2.0 * z + 1e-12).then_some(root)
}

/// Fixed points of the `(p, r)` system in `D`.
pub fn bivariate_fixed_points(alpha: f64) -> Vec<PrPoint> {
    let diag = |z: f64| PrPoint { p: z, r: z };
    match coop_roots(alpha) {
        None => vec![diag(0.0)],
        Some((mid, upp)) if mid == upp => vec![diag(0.0), diag(mid)],
        Some((mid, upp)) => {
            let mut pts = vec![diag(0.0), diag(mid)];
            if let Some(r) = r_mid(alpha) {
                pts.push(PrPoint { p: mid, r });
            }
            pts.push(diag(upp));
            pts
        }
    }
}

/// Endogeny verdict per fixed point; `None` where the fixed point does not exist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndogenyClass {
    pub low: Option<bool>,
    pub mid: Option<bool>,
    pub upp: Option<bool>,
}

/// Declared diagonal below this distance.
pub const DIAGONAL_TOL: f64 = 1e-6;

/// Integrates the `r` equation with `p` frozen at the fixed point `z` from
/// the product coupling `r = 2z − z²` and reports whether `r → z`.
///
/// The horizon is `200/|P'_α(z)|` (floored at a rate of `1e-3`, which only
/// matters at the degenerate point `α = 4`, `z = 1/2`).
pub fn is_endogenous_at(alpha: f64, z: f64) -> Result<bool> {
    let rate = (alpha * (2.0 * z - 3.0 * z * z) - 1.0).abs().max(1e-3);
    let t_end = 200.0 / rate;
    let dt = 0.1 / (alpha + 1.0);
    let n = step_count(t_end, dt);
    let h = t_end / n as f64;
    let mut rk = Rk4::new(1);
    let mut r = [PrPoint::product(z).r];
    let hi = 1.0f64.min(2.0 * z);
    for _ in 0..n {
        rk.step(
            &mut r,
            h,
            |x, d| {
                d[0] = r_drift(alpha, z, x[0]);
                Ok(())
            },
            |_| Ok(()),
        )?;
        r[0] = r[0].clamp(z, hi);
    }
    Ok((r[0] - z).abs() < DIAGONAL_TOL)
}

pub fn classify_endogeny(alpha: f64) -> Result<EndogenyClass> {
    let low = Some(is_endogenous_at(alpha, 0.0)?);
    Ok(match coop_roots(alpha) {
        None => EndogenyClass { low, mid: None, upp: None },
        Some((mid, upp)) if mid == upp => EndogenyClass { low, mid: None, upp: Some(is_endogenous_at(alpha, upp)?) },
        Some((mid, upp)) => EndogenyClass {
            low,
            mid: Some(is_endogenous_at(alpha, mid)?),
            upp: Some(is_endogenous_at(alpha, upp)?),
        },
    })
}
