//! Interacting particle system on the complete graph with `N` sites.
//!
//! Events arrive at total rate `|q|` in model time. Each picks an entry `ω`
//! with probability `q(ω)/|q|` and a uniformly random tuple of `λ(ω)`
//! distinct sites, and applies the components `γ_1[ω], …, γ_λ[ω]` to that
//! tuple simultaneously. Times reported to the caller are rescaled by `1/N`.
//!
//! Several replicas can be driven by the same events, which couples them
//! through one stochastic flow.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::meanfield::evaluate_at;
use crate::model::{Dist, State, StructuredFamily};
use crate::rng::{key_of, CounterRng};
use crate::variate::{PairDist, PrPoint};

const EVENT_STREAM: u64 = 0x6576_656e;
const INIT_STREAM: u64 = 0x696e_6974;

#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    sites: Vec<State>,
    /// Unrescaled time.
    model_time: f64,
}

impl SystemState {
    pub fn new(sites: Vec<State>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidParameter("system needs at least one site".into()));
        }
        Ok(Self { sites, model_time: 0.0 })
    }

    /// `N` i.i.d. sites with law `mu`; `stream` separates independent initial states.
    pub fn iid(n: usize, mu: &Dist, seed: u64, stream: u64) -> Result<Self> {
        let sites = (0..n as u64)
            .map(|i| mu.sample_with(CounterRng::from_coords(seed, &[INIT_STREAM, stream, i]).open01()))
            .collect();
        Self::new(sites)
    }

    pub fn sites(&self) -> &[State] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn model_time(&self) -> f64 {
        self.model_time
    }

    /// `μ{x} = (1/N) Σ δ_{x_i}` over `n_states` states.
    pub fn empirical(&self, n_states: usize) -> Vec<f64> {
        let mut w = vec![0.0; n_states];
        for &s in &self.sites {
            w[s as usize] += 1.0;
        }
        let n = self.sites.len() as f64;
        w.iter_mut().for_each(|x| *x /= n);
        w
    }
}

/// One event of the flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowEvent {
    pub entry: usize,
    /// `λ(ω)` distinct sites, empty when `λ(ω) > N`.
    pub sites: Vec<usize>,
    /// Unrescaled time.
    pub time: f64,
}

/// Deterministic event stream for a given family, `N` and seed.
pub struct EventStream<'a> {
    family: &'a StructuredFamily,
    n: usize,
    rng: CounterRng,
    time: f64,
    relabel: Option<Vec<usize>>,
}

impl<'a> EventStream<'a> {
    pub fn new(family: &'a StructuredFamily, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            rng: CounterRng::new(key_of(seed, &[EVENT_STREAM, n as u64])),
            time: 0.0,
            relabel: None,
        }
    }

    // Sends every drawn site i to perm[i]; used to check exchangeability.
    #[cfg(test)]
    fn with_relabel(mut self, perm: Vec<usize>) -> Self {
        self.relabel = Some(perm);
        self
    }

    /// Fills `event` with the next event.
    pub fn next_into(&mut self, event: &mut FlowEvent) {
        self.time += self.rng.exp(self.family.total_rate());
        event.time = self.time;
        event.entry = self.family.choose(self.rng.open01());
        event.sites.clear();
        let lambda = self.family.entries()[event.entry].lambda();
        if lambda > self.n {
            return;
        }
        while event.sites.len() < lambda {
            let i = self.rng.index(self.n);
            if !event.sites.contains(&i) {
                event.sites.push(i);
            }
        }
        if let Some(perm) = &self.relabel {
            event.sites.iter_mut().for_each(|i| *i = perm[*i]);
        }
    }
}

/// Applies one event to a configuration.
pub fn apply_event(family: &StructuredFamily, event: &FlowEvent, sites: &mut [State], scratch: &mut Vec<State>) {
    if event.sites.is_empty() {
        return;
    }
    let entry = &family.entries()[event.entry];
    let args: Vec<State> = event.sites.iter().map(|&i| sites[i]).collect();
    scratch.clear();
    scratch.extend(entry.components.iter().map(|c| c.map().apply(&args)));
    for (&i, &v) in event.sites.iter().zip(scratch.iter()) {
        sites[i] = v;
    }
}

/// Replicas of one system driven by a shared flow.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledStates {
    replicas: Vec<SystemState>,
}

impl CoupledStates {
    pub fn new(replicas: Vec<SystemState>) -> Result<Self> {
        let Some(first) = replicas.first() else {
            return Err(Error::InvalidParameter("need at least one replica".into()));
        };
        if replicas.iter().any(|r| r.len() != first.len()) {
            return Err(Error::InvalidParameter("replicas must have the same number of sites".into()));
        }
        Ok(Self { replicas })
    }

    /// Replica `j` i.i.d. with law `laws[j]`, independently across replicas and sites.
    pub fn iid_product(n: usize, laws: &[Dist], seed: u64) -> Result<Self> {
        let replicas = laws
            .iter()
            .enumerate()
            .map(|(j, mu)| SystemState::iid(n, mu, seed, j as u64))
            .collect::<Result<_>>()?;
        Self::new(replicas)
    }

    pub fn replicas(&self) -> &[SystemState] {
        &self.replicas
    }

    pub fn n_sites(&self) -> usize {
        self.replicas[0].len()
    }

    /// Site-averaged law of the tuple `(x^1_i, …, x^n_i)`, first replica most significant.
    pub fn joint_empirical(&self, n_states: usize) -> Vec<f64> {
        let k = self.replicas.len();
        let mut w = vec![0.0; n_states.pow(k as u32)];
        for i in 0..self.n_sites() {
            let idx = self.replicas.iter().fold(0usize, |acc, r| acc * n_states + r.sites[i] as usize);
            w[idx] += 1.0;
        }
        let n = self.n_sites() as f64;
        w.iter_mut().for_each(|x| *x /= n);
        w
    }
}

/// Observations at rescaled checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleTrajectory {
    /// Rescaled times.
    pub times: Vec<f64>,
    /// Joint site-averaged law of the replicas at each checkpoint.
    pub laws: Vec<Vec<f64>>,
    /// Events generated up to each checkpoint, including no-ops.
    pub events: Vec<u64>,
    /// `Σ λ(ω)` over events applied up to each checkpoint.
    pub touched: Vec<u64>,
    pub n_sites: usize,
    pub n_states: usize,
    pub n_replicas: usize,
}

impl ParticleTrajectory {
    /// `μ({1})` of the single replica at each checkpoint (binary systems).
    pub fn p(&self) -> Vec<f64> {
        self.laws.iter().map(|w| w[1]).collect()
    }

    /// Pair law at each checkpoint of a two-replica binary run.
    pub fn pair_laws(&self) -> Result<Vec<PairDist>> {
        if self.n_states != 2 || self.n_replicas != 2 {
            return Err(Error::Unsupported("pair laws need two binary replicas".into()));
        }
        self.laws.iter().map(|w| PairDist::new([w[0], w[1], w[2], w[3]])).collect()
    }

    /// `(p̂, r̂)` at each checkpoint; `p̂` is averaged over both replicas.
    pub fn pr(&self) -> Result<Vec<PrPoint>> {
        Ok(self
            .pair_laws()?
            .into_iter()
            .map(|d| {
                let w = d.weights();
                PrPoint { p: w[3] + 0.5 * (w[1] + w[2]), r: 1.0 - w[0] }
            })
            .collect())
    }

    /// `t_rescaled,p` for one binary replica, `t_rescaled,p,r` for two, and
    /// `t_rescaled,state_0,…` otherwise.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match (self.n_states, self.n_replicas) {
            (2, 1) => {
                writeln!(w, "t_rescaled,p")?;
                for (t, p) in self.times.iter().zip(self.p()) {
                    writeln!(w, "{},{}", fmt17(*t), fmt17(p))?;
                }
            }
            (2, 2) => {
                writeln!(w, "t_rescaled,p,r")?;
                for (t, pr) in self.times.iter().zip(self.pr()?) {
                    writeln!(w, "{},{},{}", fmt17(*t), fmt17(pr.p), fmt17(pr.r))?;
                }
            }
            _ => {
                let cols: Vec<String> = (0..self.laws[0].len()).map(|s| format!("state_{s}")).collect();
                writeln!(w, "t_rescaled,{}", cols.join(","))?;
                for (t, law) in self.times.iter().zip(&self.laws) {
                    let vals: Vec<String> = law.iter().map(|&x| fmt17(x)).collect();
                    writeln!(w, "{},{}", fmt17(*t), vals.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// Run description written next to a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub rates: Vec<f64>,
    pub event_count: u64,
    pub t_rescaled: f64,
    pub replicas: usize,
}

impl RunManifest {
    pub fn new(family: &StructuredFamily, traj: &ParticleTrajectory, seed: u64, t_rescaled: f64) -> Self {
        Self {
            seed,
            n: traj.n_sites,
            rates: family.entries().iter().map(|e| e.rate).collect(),
            event_count: traj.events.last().copied().unwrap_or(0),
            t_rescaled,
            replicas: traj.n_replicas,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct")
    }
}

fn check_run(family: &StructuredFamily, states: &CoupledStates, t_rescaled: f64, checkpoints: &[f64]) -> Result<()> {
    if !(t_rescaled >= 0.0 && t_rescaled.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be finite and >= 0, got {t_rescaled}")));
    }
    if checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("checkpoints must be nondecreasing".into()));
    }
    if checkpoints.iter().any(|&c| c < 0.0 || c > t_rescaled) {
        return Err(Error::InvalidParameter("checkpoints must lie in [0, t]".into()));
    }
    let n = family.space().size();
    for r in states.replicas() {
        if r.sites.iter().any(|&s| s as usize >= n) {
            return Err(Error::InvalidParameter(format!("initial state outside {{0..{}}}", n - 1)));
        }
    }
    Ok(())
}

fn simulate(
    family: &StructuredFamily,
    states: &mut CoupledStates,
    mut stream: EventStream<'_>,
    t_rescaled: f64,
    checkpoints: &[f64],
) -> ParticleTrajectory {
    let n_states = family.space().size();
    let n = states.n_sites();
    let horizon = n as f64 * t_rescaled;
    let mut traj = ParticleTrajectory {
        times: Vec::with_capacity(checkpoints.len()),
        laws: Vec::with_capacity(checkpoints.len()),
        events: Vec::with_capacity(checkpoints.len()),
        touched: Vec::with_capacity(checkpoints.len()),
        n_sites: n,
        n_states,
        n_replicas: states.replicas.len(),
    };
    let mut event = FlowEvent { entry: 0, sites: Vec::with_capacity(family.max_lambda()), time: 0.0 };
    let mut scratch = Vec::with_capacity(family.max_lambda());
    let (mut count, mut touched) = (0u64, 0u64);
    let mut next_cp = 0;
    loop {
        stream.next_into(&mut event);
        let upto = event.time.min(horizon);
        while next_cp < checkpoints.len() && n as f64 * checkpoints[next_cp] < upto {
            traj.times.push(checkpoints[next_cp]);
            traj.laws.push(states.joint_empirical(n_states));
            traj.events.push(count);
            traj.touched.push(touched);
            next_cp += 1;
        }
        if event.time > horizon {
            break;
        }
        count += 1;
        touched += event.sites.len() as u64;
        for r in states.replicas.iter_mut() {
            apply_event(family, &event, &mut r.sites, &mut scratch);
            r.model_time = event.time;
        }
    }
    while next_cp < checkpoints.len() {
        traj.times.push(checkpoints[next_cp]);
        traj.laws.push(states.joint_empirical(n_states));
        traj.events.push(count);
        traj.touched.push(touched);
        next_cp += 1;
    }
    for r in states.replicas.iter_mut() {
        r.model_time = horizon;
    }
    traj
}

/// Runs one system to rescaled time `t_rescaled`, recording `μ^N` at the checkpoints.
pub fn run(
    family: &StructuredFamily,
    init: &SystemState,
    t_rescaled: f64,
    seed: u64,
    checkpoints: &[f64],
) -> Result<(SystemState, ParticleTrajectory)> {
    let (states, traj) = run_coupled(family, &CoupledStates::new(vec![init.clone()])?, t_rescaled, seed, checkpoints)?;
    Ok((states.replicas.into_iter().next().expect("one replica"), traj))
}

/// Runs all replicas with one shared event stream.
pub fn run_coupled(
    family: &StructuredFamily,
    inits: &CoupledStates,
    t_rescaled: f64,
    seed: u64,
    checkpoints: &[f64],
) -> Result<(CoupledStates, ParticleTrajectory)> {
    check_run(family, inits, t_rescaled, checkpoints)?;
    let mut states = inits.clone();
    let stream = EventStream::new(family, states.n_sites(), seed);
    let traj = simulate(family, &mut states, stream, t_rescaled, checkpoints);
    Ok((states, traj))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    #[doc = "Number of sites."]
    pub n: usize,
    /// `max_k |p̂(t_k) − p(t_k)|` for each seed.
    pub errors: Vec<f64>,
    pub mean_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    /// Mean errors decrease along `N` with at most one inversion.
    pub decreasing: bool,
}

/// Max checkpoint error against the mean-field ODE for each `N` and seed,
/// starting from i.i.d. Bernoulli(`p0`) sites.
pub fn convergence_sweep(
    family: &StructuredFamily,
    p0: f64,
    n_list: &[usize],
    t_rescaled: f64,
    checkpoints: &[f64],
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    if family.space().size() != 2 {
        return Err(Error::Unsupported("convergence sweep is defined for {0, 1}".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("N list must be increasing".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let mu0 = Dist::bernoulli(p0)?;
    let flat = family.flatten_with(true)?;
    let dt = crate::meanfield::default_dt(&flat);
    let oracle: Vec<f64> = evaluate_at(&flat, &mu0, checkpoints, dt)?.iter().map(|d| d.prob(1)).collect();
    let cells: Vec<(usize, u64)> = n_list.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let errors = cells
        .par_iter()
        .map(|&(n, seed)| {
            let init = SystemState::iid(n, &mu0, seed, 0)?;
            let (_, traj) = run(family, &init, t_rescaled, seed, checkpoints)?;
            Ok(traj.p().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<SweepRow> = n_list
        .iter()
        .zip(errors.chunks(seeds.len()))
        .map(|(&n, e)| SweepRow { n, errors: e.to_vec(), mean_error: e.iter().sum::<f64>() / e.len() as f64 })
        .collect();
    let inversions = rows.windows(2).filter(|w| w[1].mean_error > w[0].mean_error).count();
    Ok(ConvergenceReport { rows, decreasing: inversions <= 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::{coop_roots, tv_distance};
    use crate::model::{LocalMap, MapFamily, Preset, StateSpace};
    use proptest::prelude::*;

    fn coop(alpha: f64) -> StructuredFamily {
        StructuredFamily::preset(Preset::Coop { alpha }).unwrap()
    }

    fn death_only() -> StructuredFamily {
        StructuredFamily::from_flat(&MapFamily::new(StateSpace::binary(), vec![(LocalMap::dth(), 1.0)]).unwrap()).unwrap()
    }

    #[test]
    fn death_only_decays_exponentially() {
        let init = SystemState::new(vec![1; 10_000]).unwrap();
        let (_, traj) = run(&death_only(), &init, 3.0, 1, &[3.0]).unwrap();
        assert!((traj.p()[0] - (-3.0f64).exp()).abs() < 0.02);
    }

    #[test]
    fn single_site_only_sees_deaths() {
        let init = SystemState::new(vec![1]).unwrap();
        let fam = coop(4.5);
        let mut stream = EventStream::new(&fam, 1, 3);
        let mut ev = FlowEvent { entry: 0, sites: vec![], time: 0.0 };
        for _ in 0..200 {
            stream.next_into(&mut ev);
            let lambda = fam.entries()[ev.entry].lambda();
            assert_eq!(ev.sites.is_empty(), lambda > 1);
        }
        let (end, _) = run(&fam, &init, 50.0, 3, &[]).unwrap();
        assert_eq!(end.sites(), &[0]);
    }

    #[test]
    fn event_count_is_poisson() {
        let fam = coop(4.5);
        let n = 2000;
        let t = 3.0;
        let init = SystemState::iid(n, &Dist::bernoulli(0.5).unwrap(), 4, 0).unwrap();
        let (_, traj) = run(&fam, &init, t, 4, &[t]).unwrap();
        let mean = fam.total_rate() * n as f64 * t;
        assert!((traj.events[0] as f64 - mean).abs() < 4.0 * mean.sqrt());
    }

    #[test]
    fn path_regularity_bound_holds_exactly() {
        let fam = coop(4.5);
        let n = 500;
        let init = SystemState::iid(n, &Dist::bernoulli(0.5).unwrap(), 5, 0).unwrap();
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.02).collect();
        let (_, traj) = run(&fam, &init, 2.0, 5, &grid).unwrap();
        for k in 1..traj.times.len() {
            let a = Dist::new(traj.laws[k - 1].clone()).unwrap();
            let b = Dist::new(traj.laws[k].clone()).unwrap();
            let touched = (traj.touched[k] - traj.touched[k - 1]) as f64;
            let events = (traj.events[k] - traj.events[k - 1]) as f64;
            let tv = tv_distance(&a, &b);
            assert!(tv <= touched / n as f64 + 1e-15);
            assert!(tv <= fam.mean_lambda() * events / n as f64 + 1e-15);
        }
        assert!((fam.mean_lambda() - (3.0 * 4.5 + 1.0) / 5.5).abs() < 1e-12);
    }

    #[test]
    fn exchangeability_under_relabelling() {
        let fam = coop(3.0);
        let n = 300;
        let init = SystemState::iid(n, &Dist::bernoulli(0.6).unwrap(), 6, 0).unwrap();
        // fixed permutation i -> 7i + 3 mod n (gcd(7, 300) = 1)
        let perm: Vec<usize> = (0..n).map(|i| (7 * i + 3) % n).collect();
        let mut permuted = vec![0; n];
        for (i, &j) in perm.iter().enumerate() {
            permuted[j] = init.sites()[i];
        }
        let mut a = CoupledStates::new(vec![init.clone()]).unwrap();
        let ta = simulate(&fam, &mut a, EventStream::new(&fam, n, 6), 1.5, &[1.5]);
        let mut b = CoupledStates::new(vec![SystemState::new(permuted).unwrap()]).unwrap();
        let tb = simulate(&fam, &mut b, EventStream::new(&fam, n, 6).with_relabel(perm.clone()), 1.5, &[1.5]);
        for (i, &j) in perm.iter().enumerate() {
            assert_eq!(a.replicas()[0].sites()[i], b.replicas()[0].sites()[j]);
        }
        assert_eq!(ta.laws, tb.laws);
    }

    #[test]
    fn identical_replicas_stay_identical() {
        let fam = coop(4.5);
        let init = SystemState::iid(1000, &Dist::bernoulli(0.5).unwrap(), 7, 0).unwrap();
        let states = CoupledStates::new(vec![init.clone(), init]).unwrap();
        let (end, traj) = run_coupled(&fam, &states, 2.0, 7, &[1.0, 2.0]).unwrap();
        assert_eq!(end.replicas()[0], end.replicas()[1]);
        for pair in traj.pair_laws().unwrap() {
            let w = pair.weights();
            assert_eq!(w[1] + w[2], 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ordered_replicas_stay_ordered(seed in 0u64..1000, p in 0.1f64..0.9, t in 0.2f64..2.0) {
            let fam = coop(4.5);
            let n = 400;
            let low = SystemState::iid(n, &Dist::bernoulli(p * 0.5).unwrap(), seed, 0).unwrap();
            let high_sites: Vec<State> = low
                .sites()
                .iter()
                .enumerate()
                .map(|(i, &x)| x.max(u32::from(CounterRng::from_coords(seed, &[99, i as u64]).open01() < p)))
                .collect();
            let states = CoupledStates::new(vec![low, SystemState::new(high_sites).unwrap()]).unwrap();
            let (end, _) = run_coupled(&fam, &states, t, seed, &[]).unwrap();
            let (a, b) = (end.replicas()[0].sites(), end.replicas()[1].sites());
            prop_assert!(a.iter().zip(b).all(|(x, y)| x <= y));
        }
    }

    #[test]
    fn absorbing_start_has_no_error() {
        let rep = convergence_sweep(&coop(4.5), 0.0, &[100, 1000], 1.0, &[0.5, 1.0], &[1, 2]).unwrap();
        assert!(rep.rows.iter().all(|r| r.mean_error == 0.0));
    }

    #[test]
    fn identity_dynamics_keep_the_initial_law() {
        let fam = StructuredFamily::from_flat(
            &MapFamily::new(StateSpace::binary(), vec![(LocalMap::identity(2), 1.0)]).unwrap(),
        )
        .unwrap();
        let init = SystemState::iid(4000, &Dist::bernoulli(0.3).unwrap(), 8, 0).unwrap();
        let (end, traj) = run(&fam, &init, 2.0, 8, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(end.sites(), init.sites());
        assert!(traj.p().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn coupled_mid_start_is_near_the_product_law() {
        let (z, _) = coop_roots(4.5).unwrap();
        let mu = Dist::bernoulli(z).unwrap();
        let states = CoupledStates::iid_product(5000, &[mu.clone(), mu], 9).unwrap();
        let (_, traj) = run_coupled(&coop(4.5), &states, 0.0, 9, &[0.0]).unwrap();
        let pr = traj.pr().unwrap()[0];
        assert!((pr.p - z).abs() < 0.03);
        assert!((pr.r - (2.0 * z - z * z)).abs() < 0.03);
    }

    #[test]
    fn csv_and_manifest() {
        let fam = coop(2.0);
        let init = SystemState::iid(100, &Dist::bernoulli(0.5).unwrap(), 1, 0).unwrap();
        let (_, traj) = run(&fam, &init, 1.0, 1, &[0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t_rescaled,p\n"));
        assert_eq!(text.lines().count(), 4);
        let json = RunManifest::new(&fam, &traj, 1, 1.0).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["N"], 100);
        assert_eq!(v["seed"], 1);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let fam = coop(2.0);
        let init = SystemState::new(vec![0, 1, 2]).unwrap();
        assert!(run(&fam, &init, 1.0, 1, &[]).is_err());
        let ok = SystemState::new(vec![0, 1]).unwrap();
        assert!(run(&fam, &ok, 1.0, 1, &[2.0]).is_err());
        assert!(run(&fam, &ok, -1.0, 1, &[]).is_err());
        assert!(CoupledStates::new(vec![ok, SystemState::new(vec![0]).unwrap()]).is_err());
    }
}
