//! Two replicas of the particle system driven by one stochastic flow.
//!
//! Started from independent Bernoulli(z)⊗Bernoulli(z) sites, the replicas stay
//! apart when `z` is the middle fixed point and merge when it is the upper one.
//! `r̂ − p̂` measures how far the pair law is from the diagonal.
//!
//! ```bash
//! cargo run --release --example coupled_endogeny
//! cargo run --release --example coupled_endogeny -- 10000
//! ```

use rtp_meanfield::meanfield::coop_roots;
use rtp_meanfield::particle::{run_coupled, CoupledStates};
use rtp_meanfield::variate::r_mid;
use rtp_meanfield::{Dist, Preset, StructuredFamily};

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(2000)
}

fn run(n: usize) -> rtp_meanfield::Result<()> {
    let alpha = 4.5;
    let family = StructuredFamily::preset(Preset::Coop { alpha })?;
    let (z_mid, z_upp) = coop_roots(alpha).expect("alpha > 4");
    for (label, z, t) in [("mid", z_mid, 2.0), ("upp", z_upp, 4.0)] {
        let mu = Dist::bernoulli(z)?;
        let inits = CoupledStates::iid_product(n, &[mu.clone(), mu], 11)?;
        let checkpoints: Vec<f64> = (0..=4).map(|k| t * k as f64 / 4.0).collect();
        let (_, traj) = run_coupled(&family, &inits, t, 11, &checkpoints)?;
        println!("start at z_{label} = {z:.6}");
        for (time, pr) in traj.times.iter().zip(traj.pr()?) {
            println!("  t = {time:4.2}   p = {:.4}   r = {:.4}   r - p = {:.4}", pr.p, pr.r, pr.r - pr.p);
        }
    }
    println!("r_mid from the bivariate equation: {:.7}", r_mid(alpha).unwrap_or(f64::NAN));
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    run(n)
}
