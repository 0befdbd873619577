//! Endogeny of cooperative branching through the bivariate equation.
//!
//! Two copies of the process driven by the same maps are described by
//! `(p, r) = (P[X = 1], P[X ∨ Y = 1])`. Starting from independent copies, the
//! pair merges (`r → p`) at an endogenous fixed point and stays apart at the
//! middle one.

use rtp_meanfield::meanfield::coop_roots;
use rtp_meanfield::variate::{bivariate_fixed_points, bivariate_ode, classify_endogeny, r_mid, PrPoint};

pub fn run_example() -> rtp_meanfield::Result<()> {
    let alpha = 4.5;
    let (z_mid, z_upp) = coop_roots(alpha).expect("alpha > 4");
    for z in [z_mid, z_upp] {
        let start = PrPoint::product(z);
        let traj = bivariate_ode(alpha, start, 40.0, 0.01)?;
        let end = traj.last();
        println!("from ({:.6}, {:.6}):  (p, r)(40) = ({:.7}, {:.7})", start.p, start.r, end.p, end.r);
    }
    println!("r_mid = {:.10}", r_mid(alpha).unwrap_or(f64::NAN));
    println!("fixed points of the (p, r) system: {:?}", bivariate_fixed_points(alpha));
    for a in [3.0, 4.0, 4.5, 10.0] {
        println!("alpha = {a:>4}: {:?}", classify_endogeny(a)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    run_example()
}
