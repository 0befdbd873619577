//! Population dynamics for the higher-level equation of cooperative branching.
//!
//! Starts from the pool `δ_{ν_mid}` and iterates the lifted map until the pool
//! represents `ν̲_mid`, then prints its moments and the size of the atom at 0.
//!
//! ```bash
//! cargo run --release --example higher_level_rde
//! cargo run --release --example higher_level_rde -- 10 200000 300
//! ```

use rtp_meanfield::higher::{moment_measure, pool_stats, solve_hl_rde, HlSummary};
use rtp_meanfield::meanfield::coop_roots;
use rtp_meanfield::variate::r_mid;

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(4.5, 20_000, 100)
}

fn run(alpha: f64, m: usize, sweeps: usize) -> rtp_meanfield::Result<()> {
    let (z_mid, _) = coop_roots(alpha).expect("alpha > 4");
    let solution = solve_hl_rde(alpha, m, sweeps, 2024)?;
    let stats = pool_stats(&solution.pool);
    println!("{}", HlSummary::new(&solution, &stats).to_json());
    println!("converged          {}", solution.converged);
    println!("z_mid              {z_mid:.7}");
    println!("2 z_mid - m2       {:.7}", 2.0 * z_mid - stats.m2);
    println!("r_mid (bivariate)  {:.7}", r_mid(alpha).unwrap_or(f64::NAN));
    let pair = moment_measure(&solution.pool, 2)?;
    println!("second moment measure {:?}", pair.weights());
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return run_example();
    }
    let parse = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    run(parse(0, 4.5), parse(1, 200_000.0) as usize, parse(2, 300.0) as usize)
}
