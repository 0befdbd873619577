//! How often the root value of the tree does not depend on its boundary.
//!
//! Below `α = 4` the fraction tends to one. Above it, a positive fraction of
//! trees keeps remembering the boundary forever.
//!
//! ```bash
//! cargo run --release --example uniqueness_scan -- 10000
//! ```

use rtp_meanfield::tree::uniqueness_scan;
use rtp_meanfield::{MapFamily, Preset};

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(1000)
}

fn run(samples: usize) -> rtp_meanfield::Result<()> {
    let grid = [0.5, 1.0, 2.0, 4.0];
    for alpha in [2.0, 5.0] {
        let scan = uniqueness_scan(&MapFamily::preset(Preset::Coop { alpha })?, &grid, samples, 3)?;
        let row: Vec<String> = scan.iter().map(|p| format!("t={}: {:.3}±{:.3}", p.t, p.fraction, p.stderr)).collect();
        println!("alpha = {alpha}:  {}", row.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    run(samples)
}
