//! The semigroup of the mean-field equation as a random tree.
//!
//! `T_t(μ)` is the law of the root value of a branching tree grown for time
//! `t`, with i.i.d. `μ` values on its boundary. This compares a Monte Carlo
//! estimate of that law against the ODE and checks the mean boundary size
//! `e^{(2α−1)t}`.
//!
//! ```bash
//! cargo run --release --example tree_estimate -- 100000
//! ```

use rtp_meanfield::meanfield::{default_dt, solve_ode};
use rtp_meanfield::tree::{boundary_growth, mc_estimate_tt, MarkedTree};
use rtp_meanfield::{Dist, MapFamily, Preset};

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(20_000)
}

fn run(samples: usize) -> rtp_meanfield::Result<()> {
    let family = MapFamily::preset(Preset::Coop { alpha: 4.5 })?;
    let mu0 = Dist::bernoulli(0.5)?;
    for t in [0.2, 0.4] {
        let est = mc_estimate_tt(&family, &mu0, t, samples, 1)?;
        let ode = solve_ode(&family, &mu0, t, default_dt(&family))?.last().prob(1);
        println!("t = {t}: tree {:.5} ± {:.5}, ODE {ode:.5}", est.dist.prob(1), est.stderr[1]);
    }
    let g = boundary_growth(&family, 0.3, samples / 2, 2)?;
    println!("mean boundary size at t = 0.3: {:.3} ± {:.3} (expected {:.3})", g.mean, g.stderr, g.expected);

    let tree = MarkedTree::sample(&family, 0.3, 7)?;
    println!("one tree at t = 0.3: {} nodes, {} leaves", tree.len(), tree.leaves().len());
    let mut dump = Vec::new();
    tree.write_dump(&family, &mut dump)?;
    for line in String::from_utf8_lossy(&dump).lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    run(samples)
}
