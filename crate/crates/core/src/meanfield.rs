//! The mean-field operator `T`, the mean-field ODE `dμ/dt = |r|(T(μ) − μ)`,
//! its fixed points and total-variation contraction.

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::model::{LocalMap, MapFamily, DEFAULT_ENUMERATION_CAP};
use crate::model::Dist;
use crate::ode::{step_count, Rk4};

/// Stage points may leave the simplex by at most this much.
pub const SIMPLEX_SLACK: f64 = 1e-6;

/// Exact push-forward of `μ^{⊗k}` under `g`.
pub fn apply_tg(g: &LocalMap, mu: &Dist) -> Result<Dist> {
    apply_tg_capped(g, mu, DEFAULT_ENUMERATION_CAP)
}

/// [`apply_tg`] with an explicit cap on `n_S^k`.
pub fn apply_tg_capped(g: &LocalMap, mu: &Dist, cap: u128) -> Result<Dist> {
    check_same_space(g.n_states(), mu.len())?;
    crate::model::table_size(g.n_states(), g.arity(), cap)?;
    let mut out = vec![0.0; mu.len()];
    pushforward_into(g, mu.weights(), 1.0, &mut out);
    Ok(Dist::from_raw(out))
}

fn check_same_space(n_map: usize, n_dist: usize) -> Result<()> {
    if n_map != n_dist {
        return Err(Error::InvalidParameter(format!(
            "map over {n_map} states applied to a distribution over {n_dist} states"
        )));
    }
    Ok(())
}

/// `out[g(x)] += scale · Π μ[x_i]` over all `x ∈ S^k` (depth-first over prefixes).
pub(crate) fn pushforward_into(g: &LocalMap, mu: &[f64], scale: f64, out: &mut [f64]) {
    fn rec(g: &LocalMap, mu: &[f64], level: usize, prefix: usize, prod: f64, out: &mut [f64]) {
        if level == g.arity() {
            out[g.table()[prefix] as usize] += prod;
            return;
        }
        let n = mu.len();
        for (s, &w) in mu.iter().enumerate() {
            if w != 0.0 {
                rec(g, mu, level + 1, prefix * n + s, prod * w, out);
            }
        }
    }
    rec(g, mu, 0, 0, scale, out);
}

/// `T(μ) = Σ (rate/|r|) T_g(μ)`.
pub fn apply_t(family: &MapFamily, mu: &Dist) -> Result<Dist> {
    check_same_space(family.space().size(), mu.len())?;
    for e in family.entries() {
        crate::model::table_size(e.map.n_states(), e.map.arity(), DEFAULT_ENUMERATION_CAP)?;
    }
    let mut out = vec![0.0; mu.len()];
    apply_t_raw(family, mu.weights(), &mut out);
    Ok(Dist::from_raw(out))
}

/// `T` on a raw weight vector (no validation, no renormalization).
pub(crate) fn apply_t_raw(family: &MapFamily, mu: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let total = family.total_rate();
    for e in family.entries() {
        pushforward_into(&e.map, mu, e.rate / total, out);
    }
}

/// `|r|(T(μ) − μ)`.
pub(crate) fn drift_raw(family: &MapFamily, mu: &[f64], out: &mut [f64]) {
    apply_t_raw(family, mu, out);
    let total = family.total_rate();
    for (o, &m) in out.iter_mut().zip(mu) {
        *o = total * (*o - m);
    }
}

/// `1e-3 · min(1, 1/|r|)`.
pub fn default_dt(family: &MapFamily) -> f64 {
    1e-3 * (1.0f64).min(1.0 / family.total_rate())
}

/// Solution of the mean-field equation stored at every step.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub dists: Vec<Dist>,
}

impl Trajectory {
    pub fn last(&self) -> &Dist {
        self.dists.last().expect("trajectory has at least the initial state")
    }

    /// CSV with header `t,state_0,…,state_{n-1}`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.dists.first().map_or(0, Dist::len);
        let header: Vec<String> = (0..n).map(|s| format!("state_{s}")).collect();
        writeln!(w, "t,{}", header.join(","))?;
        for (t, d) in self.times.iter().zip(&self.dists) {
            let row: Vec<String> = d.weights().iter().map(|&x| fmt17(x)).collect();
            writeln!(w, "{},{}", fmt17(*t), row.join(","))?;
        }
        Ok(())
    }
}

fn simplex_check(y: &[f64]) -> Result<()> {
    let worst = y
        .iter()
        .map(|&v| (-v).max(v - 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > SIMPLEX_SLACK {
        return Err(Error::StepTooLarge(worst));
    }
    Ok(())
}

fn project_to_simplex(y: &mut [f64]) {
    for v in y.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = y.iter().sum();
    y.iter_mut().for_each(|v| *v /= total);
}

/// Integrates `y` in place over `span` with steps of at most `dt`, calling
/// `record` after every step with the elapsed time.
fn integrate(
    family: &MapFamily,
    y: &mut [f64],
    span: f64,
    dt: f64,
    mut record: impl FnMut(f64, &[f64]),
) -> Result<()> {
    let n = step_count(span, dt);
    if n == 0 {
        return Ok(());
    }
    let h = span / n as f64;
    let mut rk = Rk4::new(y.len());
    for i in 1..=n {
        rk.step(
            y,
            h,
            |x, d| {
                drift_raw(family, x, d);
                Ok(())
            },
            simplex_check,
        )?;
        project_to_simplex(y);
        record(i as f64 * h, y);
    }
    Ok(())
}

/// RK4 solution of the mean-field equation on `[0, t_end]`.
pub fn solve_ode(family: &MapFamily, mu0: &Dist, t_end: f64, dt: f64) -> Result<Trajectory> {
    check_same_space(family.space().size(), mu0.len())?;
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need t_end >= 0 and dt > 0, got {t_end}, {dt}")));
    }
    let mut y = mu0.weights().to_vec();
    let mut times = vec![0.0];
    let mut dists = vec![mu0.clone()];
    integrate(family, &mut y, t_end, dt, |t, y| {
        times.push(t);
        dists.push(Dist::from_raw(y.to_vec()));
    })?;
    Ok(Trajectory { times, dists })
}

/// Solution values at the given increasing times (hitting each exactly).
pub fn evaluate_at(family: &MapFamily, mu0: &Dist, times: &[f64], dt: f64) -> Result<Vec<Dist>> {
    check_same_space(family.space().size(), mu0.len())?;
    let mut y = mu0.weights().to_vec();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return Err(Error::InvalidParameter("evaluation times must be increasing".into()));
        }
        integrate(family, &mut y, t - now, dt, |_, _| {})?;
        now = t;
        out.push(Dist::from_raw(y.clone()));
    }
    Ok(out)
}

/// Fixed points of `dp/dt = α p²(1−p) − p` in `[0, 1]`, increasing.
pub fn coop_fixed_points(alpha: f64) -> Vec<f64> {
    match coop_roots(alpha) {
        None => vec![0.0],
        Some((mid, upp)) if mid == upp => vec![0.0, mid],
        Some((mid, upp)) => vec![0.0, mid, upp],
    }
}

/// `(z_mid, z_upp) = 1/2 ∓ sqrt(1/4 − 1/α)` for `α ≥ 4`.
pub fn coop_roots(alpha: f64) -> Option<(f64, f64)> {
    if !(alpha >= 4.0) {
        return None;
    }
    let disc = (0.25 - 1.0 / alpha).max(0.0).sqrt();
    Some((0.5 - disc, 0.5 + disc))
}

/// `α p²(1−p) − p`.
pub fn coop_drift(alpha: f64, p: f64) -> f64 {
    alpha * p * p * (1.0 - p) - p
}

/// Long-time limit of the mean-field equation.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub dist: Dist,
    pub converged: bool,
    /// Model time at which the run stopped.
    pub time: f64,
}

impl FixedPoint {
    /// `NotConverged` when the flag is false.
    pub fn into_result(self) -> Result<Dist> {
        if self.converged {
            Ok(self.dist)
        } else {
            Err(Error::NotConverged(format!("no fixed point within t = {}", self.time)))
        }
    }
}

/// Integrates from `mu0` in unit-time blocks until the block-to-block TV
/// change drops below `1e-10`, or `t_max = 1000` is passed.
pub fn find_fixed_point(family: &MapFamily, mu0: &Dist) -> Result<FixedPoint> {
    find_fixed_point_with(family, mu0, 1e-10, 1e3)
}

pub fn find_fixed_point_with(family: &MapFamily, mu0: &Dist, tol: f64, t_max: f64) -> Result<FixedPoint> {
    check_same_space(family.space().size(), mu0.len())?;
    let dt = default_dt(family);
    let mut y = mu0.weights().to_vec();
    let mut t = 0.0;
    loop {
        let before = y.clone();
        integrate(family, &mut y, 1.0, dt, |_, _| {})?;
        t += 1.0;
        let change = 0.5 * before.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if change < tol {
            return Ok(FixedPoint { dist: Dist::from_raw(y), converged: true, time: t });
        }
        if t > t_max {
            return Ok(FixedPoint { dist: Dist::from_raw(y), converged: false, time: t });
        }
    }
}

/// `½ Σ |μ[s] − ν[s]|`.
pub fn tv_distance(mu: &Dist, nu: &Dist) -> f64 {
    assert_eq!(mu.len(), nu.len(), "distributions over different spaces");
    0.5 * mu.weights().iter().zip(nu.weights()).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Outcome of a contraction check `‖T_t μ − T_t ν‖ ≤ e^{Kt} ‖μ − ν‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionCheck {
    pub holds: bool,
    pub initial: f64,
    pub evolved: f64,
    /// `e^{Kt}`.
    pub bound_factor: f64,
    /// `evolved / initial`, zero when `μ = ν`.
    pub ratio: f64,
}

pub fn verify_contraction(family: &MapFamily, mu: &Dist, nu: &Dist, t: f64) -> Result<ContractionCheck> {
    let dt = default_dt(family);
    let a = solve_ode(family, mu, t, dt)?;
    let b = solve_ode(family, nu, t, dt)?;
    let initial = tv_distance(mu, nu);
    let evolved = tv_distance(a.last(), b.last());
    let bound_factor = (family.constants().k * t).exp();
    let ratio = if initial > 0.0 { evolved / initial } else { 0.0 };
    Ok(ContractionCheck {
        holds: evolved <= bound_factor * initial + 1e-12,
        initial,
        evolved,
        bound_factor,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Preset, StateSpace};
    use proptest::prelude::*;

    fn coop(alpha: f64) -> MapFamily {
        MapFamily::preset(Preset::Coop { alpha }).unwrap()
    }

    fn p_of(d: &Dist) -> f64 {
        d.prob(1)
    }

    // Brute-force law of g(X1..Xk): independent of the depth-first pushforward.
    fn brute_law(g: &LocalMap, mu: &Dist) -> Vec<f64> {
        let n = mu.len();
        let mut out = vec![0.0; n];
        let mut x = vec![0; g.arity()];
        for i in 0..g.table().len() {
            crate::model::decode_into(i, n, &mut x);
            let w: f64 = x.iter().map(|&s| mu.prob(s)).product();
            out[g.apply(&x) as usize] += w;
        }
        out
    }

    #[test]
    fn tg_examples() {
        let mu = Dist::bernoulli(0.5).unwrap();
        assert!((p_of(&apply_tg(&LocalMap::cob(), &mu).unwrap()) - 0.625).abs() < 1e-15);
        let any = Dist::bernoulli(0.3).unwrap();
        assert_eq!(apply_tg(&LocalMap::dth(), &any).unwrap(), Dist::delta(2, 0));
        let mu3 = Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(apply_tg(&LocalMap::identity(3), &mu3).unwrap(), mu3);
    }

    #[test]
    fn tg_matches_brute_force_on_random_map() {
        let g = LocalMap::from_fn("h", 3, 3, |x| (x[0] * 2 + x[1] * x[2]) % 3).unwrap();
        let mu = Dist::new(vec![0.1, 0.6, 0.3]).unwrap();
        let fast = apply_tg(&g, &mu).unwrap();
        for (a, b) in fast.weights().iter().zip(brute_law(&g, &mu)) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn tg_enumeration_cap() {
        let g = LocalMap::cob();
        let mu = Dist::bernoulli(0.5).unwrap();
        assert!(matches!(apply_tg_capped(&g, &mu, 4), Err(Error::ArityOverflow { size: 8, cap: 4 })));
    }

    #[test]
    fn t_examples() {
        let alpha = 4.5;
        let fam = coop(alpha);
        for p in [0.0, 0.1, 0.5, 0.9] {
            let out = p_of(&apply_t(&fam, &Dist::bernoulli(p).unwrap()).unwrap());
            let want = alpha / (alpha + 1.0) * (p + (1.0 - p) * p * p);
            assert!((out - want).abs() < 1e-15);
        }
        assert_eq!(apply_t(&fam, &Dist::delta(2, 0)).unwrap(), Dist::delta(2, 0));
        let fixed = p_of(&apply_t(&fam, &Dist::bernoulli(1.0 / 3.0).unwrap()).unwrap());
        assert!((fixed - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ode_attractors() {
        let fam = coop(4.5);
        let dt = 1e-3;
        let up = solve_ode(&fam, &Dist::bernoulli(0.5).unwrap(), 20.0, dt).unwrap();
        assert!((p_of(up.last()) - 2.0 / 3.0).abs() < 1e-6);
        let down = solve_ode(&fam, &Dist::bernoulli(0.3).unwrap(), 20.0, dt).unwrap();
        assert!(p_of(down.last()) < 1e-4);
        assert_eq!(up.times.len(), up.dists.len());
        assert_eq!(up.times[0], 0.0);
        assert!(up.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn pure_death_decay() {
        let fam = coop(0.0);
        let traj = solve_ode(&fam, &Dist::bernoulli(0.8).unwrap(), 3.0, default_dt(&fam)).unwrap();
        for (t, d) in traj.times.iter().zip(&traj.dists).step_by(97) {
            assert!((p_of(d) - 0.8 * (-t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn rk4_convergence_order() {
        let fam = coop(4.5);
        let mu0 = Dist::bernoulli(0.5).unwrap();
        let at = |dt: f64| p_of(solve_ode(&fam, &mu0, 2.0, dt).unwrap().last());
        let (a, b, c) = (at(0.04), at(0.02), at(0.01));
        let order = ((a - b).abs() / (b - c).abs()).log2();
        assert!(order >= 3.5, "measured order {order}");
    }

    #[test]
    fn step_too_large_is_reported() {
        let fam = coop(4.5);
        let err = solve_ode(&fam, &Dist::bernoulli(0.9).unwrap(), 10.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge(_)));
    }

    #[test]
    fn fixed_point_values() {
        let pts = coop_fixed_points(4.5);
        assert_eq!(pts.len(), 3);
        for (got, want) in pts.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(coop_fixed_points(4.0), vec![0.0, 0.5]);
        assert_eq!(coop_fixed_points(2.0), vec![0.0]);
        for alpha in [4.0, 4.1, 4.5, 5.0, 10.0, 100.0] {
            for p in coop_fixed_points(alpha) {
                assert!(coop_drift(alpha, p).abs() < 1e-12, "alpha {alpha} p {p}");
            }
        }
    }

    #[test]
    fn find_fixed_point_examples() {
        let up = find_fixed_point(&coop(4.5), &Dist::bernoulli(0.9).unwrap()).unwrap();
        assert!(up.converged);
        assert!((p_of(&up.dist) - 2.0 / 3.0).abs() < 1e-8);
        let low = find_fixed_point(&coop(2.0), &Dist::bernoulli(0.99).unwrap()).unwrap();
        assert!(p_of(&low.dist).abs() < 1e-8);
        let id = MapFamily::new(StateSpace::new(3).unwrap(), vec![(LocalMap::identity(3), 1.0)]).unwrap();
        let mu0 = Dist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let fp = find_fixed_point(&id, &mu0).unwrap();
        assert!(fp.converged);
        assert!(tv_distance(&fp.dist, &mu0) < 1e-15);
        let short = find_fixed_point_with(&coop(4.5), &Dist::bernoulli(0.5).unwrap(), 1e-10, 2.0).unwrap();
        assert!(!short.converged);
        assert!(matches!(short.into_result(), Err(Error::NotConverged(_))));
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&Dist::delta(2, 0), &Dist::delta(2, 1)), 1.0);
        let mu = Dist::bernoulli(0.3).unwrap();
        assert_eq!(tv_distance(&mu, &mu), 0.0);
        let a = Dist::new(vec![0.7, 0.3]).unwrap();
        assert!((tv_distance(&a, &Dist::uniform(2)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn contraction_examples() {
        let fam = coop(0.25);
        let c = verify_contraction(&fam, &Dist::bernoulli(0.9).unwrap(), &Dist::bernoulli(0.1).unwrap(), 2.0).unwrap();
        assert!(c.holds);
        assert!(c.ratio <= (-1.0f64).exp());
        let mu = Dist::bernoulli(0.4).unwrap();
        let same = verify_contraction(&fam, &mu, &mu, 2.0).unwrap();
        assert!(same.holds && same.evolved == 0.0);
        let sup = verify_contraction(&coop(4.5), &Dist::bernoulli(0.3).unwrap(), &Dist::bernoulli(0.4).unwrap(), 5.0)
            .unwrap();
        assert!(sup.holds);
        assert!(sup.ratio > 1.0, "opposite sides of z_mid separate: {}", sup.ratio);
    }

    #[test]
    fn trajectory_csv() {
        let traj = solve_ode(&coop(0.0), &Dist::bernoulli(1.0).unwrap(), 0.002, 1e-3).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,state_0,state_1");
        assert_eq!(lines.len(), 4);
        let cols: Vec<f64> = lines[3].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols[0], 0.002);
        assert!((cols[2] - (-0.002f64).exp()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn t_preserves_simplex(w in proptest::collection::vec(0.0f64..1.0, 3), alpha in 0.0f64..20.0) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let g = LocalMap::from_fn("h", 3, 2, |x| (x[0] + x[1]) % 3).unwrap();
            let fam = MapFamily::new(
                StateSpace::new(3).unwrap(),
                vec![(g, alpha), (LocalMap::identity(3), 1.0), (LocalMap::constant("c", 3, 2), 0.5)],
            ).unwrap();
            let out = apply_t(&fam, &Dist::new(w).unwrap()).unwrap();
            prop_assert!((out.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(out.weights().iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn coop_operator_matches_scalar_formula(p in 0.0f64..=1.0, alpha in 0.0f64..20.0) {
            let out = apply_t(&coop(alpha), &Dist::bernoulli(p).unwrap()).unwrap().prob(1);
            let want = alpha * (p + (1.0 - p) * p * p) / (alpha + 1.0);
            prop_assert!((out - want).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_operator_on_grid() {
        for fam in [coop(4.5), MapFamily::preset(Preset::CoopBirth { alpha: 2.0, beta: 0.7 }).unwrap()] {
            let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
            let image: Vec<f64> = grid
                .iter()
                .map(|&p| apply_t(&fam, &Dist::bernoulli(p).unwrap()).unwrap().prob(1))
                .collect();
            assert!(image.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
