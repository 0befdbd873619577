//! The mean-field equation of cooperative branching with deaths.
//!
//! For `α > 4` the scalar equation `dp/dt = α p²(1−p) − p` has three fixed
//! points. Trajectories started on either side of the middle one separate.
//!
//! ```bash
//! cargo run --release --example meanfield_ode
//! cargo run --release --example meanfield_ode -- 4.5 traj.csv
//! ```

use std::fs::File;

use rtp_meanfield::meanfield::{coop_fixed_points, default_dt, solve_ode};
use rtp_meanfield::{Dist, MapFamily, Preset};

pub fn run_example() -> rtp_meanfield::Result<()> {
    run(4.5, None)
}

fn run(alpha: f64, csv: Option<&str>) -> rtp_meanfield::Result<()> {
    let family = MapFamily::preset(Preset::Coop { alpha })?;
    println!("fixed points at alpha = {alpha}: {:?}", coop_fixed_points(alpha));
    let dt = default_dt(&family);
    for p0 in [0.3, 0.34, 0.5, 0.9] {
        let traj = solve_ode(&family, &Dist::bernoulli(p0)?, 10.0, dt)?;
        let at = |t: f64| traj.dists[(t / 10.0 * (traj.times.len() - 1) as f64).round() as usize].prob(1);
        println!("p0 = {p0:.2}:  p(1) = {:.5}  p(2) = {:.5}  p(10) = {:.5}", at(1.0), at(2.0), at(10.0));
    }
    if let Some(path) = csv {
        solve_ode(&family, &Dist::bernoulli(0.5)?, 2.0, dt)?.write_csv(File::create(path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha = args.first().and_then(|s| s.parse().ok()).unwrap_or(4.5);
    run(alpha, args.get(1).map(String::as_str))
}
