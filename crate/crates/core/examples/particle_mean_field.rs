//! Finite-N cooperative branching on the complete graph against the mean-field ODE.
//!
//! Runs the particle system from i.i.d. Bernoulli(1/2) sites for several `N`
//! and seeds, and prints the largest checkpoint error of `p̂` per `N`.
//!
//! ```bash
//! cargo run --release --example particle_mean_field
//! cargo run --release --example particle_mean_field -- 100,1000,10000 5
//! ```

use rtp_meanfield::particle::convergence_sweep;
use rtp_meanfield::{Preset, StructuredFamily};

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(&[100, 1000], 2)
}

fn run(n_list: &[usize], n_seeds: u64) -> rtp_meanfield::Result<()> {
    let family = StructuredFamily::preset(Preset::Coop { alpha: 4.5 })?;
    let seeds: Vec<u64> = (1..=n_seeds).collect();
    let report = convergence_sweep(&family, 0.5, n_list, 2.0, &[0.5, 1.0, 2.0], &seeds)?;
    println!("{:>8}  {:>10}  per-seed", "N", "mean err");
    for row in &report.rows {
        let per_seed: Vec<String> = row.errors.iter().map(|e| format!("{e:.4}")).collect();
        println!("{:>8}  {:>10.5}  {}", row.n, row.mean_error, per_seed.join(" "));
    }
    println!("errors decrease with N: {}", report.decreasing);
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return run_example();
    }
    let n_list: Vec<usize> = args[0].split(',').filter_map(|s| s.trim().parse().ok()).collect();
    let seeds = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    run(&n_list, seeds)
}
