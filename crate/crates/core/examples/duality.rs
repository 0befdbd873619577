//! Open-subtree estimates of the extremal fixed points.
//!
//! The probability that the tree grown for time `t` contains an open subtree
//! decreases to the upper fixed point `z_upp`. Without births no finite open
//! subtree exists, so the lower estimate stays at zero.

use rtp_meanfield::meanfield::coop_roots;
use rtp_meanfield::tree::duality_scan;
use rtp_meanfield::{MapFamily, Preset};

pub fn run_example() -> rtp_meanfield::Result<()> {
    let alpha = 4.5;
    let (_, z_upp) = coop_roots(alpha).expect("alpha > 4");
    let family = MapFamily::preset(Preset::Coop { alpha })?;
    for d in duality_scan(&family, &[0.25, 0.5, 1.0, 2.0, 3.0], 4000, 10)? {
        println!("t = {:4}: upper {:.4} ± {:.4}   lower {:.4}", d.t, d.upper, d.upper_se, d.lower);
    }
    println!("z_upp = {z_upp:.4}");
    let births = MapFamily::preset(Preset::CoopBirth { alpha, beta: 0.2 })?;
    for d in duality_scan(&births, &[1.0, 3.0], 4000, 10)? {
        println!("with births, t = {}: upper {:.4}   lower {:.4} ± {:.4}", d.t, d.upper, d.lower, d.lower_se);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    run_example()
}
