// Each example is compiled as a module of this test and its default run is executed.

#[path = "../examples/meanfield_ode.rs"]
mod meanfield_ode;
#[path = "../examples/bivariate_endogeny.rs"]
mod bivariate_endogeny;
#[path = "../examples/tree_estimate.rs"]
mod tree_estimate;
#[path = "../examples/subtrees.rs"]
mod subtrees;
#[path = "../examples/uniqueness_scan.rs"]
mod uniqueness_scan;
#[path = "../examples/duality.rs"]
mod duality;
#[path = "../examples/higher_level_rde.rs"]
mod higher_level_rde;
#[path = "../examples/particle_mean_field.rs"]
mod particle_mean_field;
#[path = "../examples/coupled_endogeny.rs"]
mod coupled_endogeny;

#[test]
fn meanfield_ode_runs() {
    meanfield_ode::run_example().unwrap();
}

#[test]
fn bivariate_endogeny_runs() {
    bivariate_endogeny::run_example().unwrap();
}

#[test]
fn tree_estimate_runs() {
    tree_estimate::run_example().unwrap();
}

#[test]
fn subtrees_runs() {
    subtrees::run_example().unwrap();
}

#[test]
fn uniqueness_scan_runs() {
    uniqueness_scan::run_example().unwrap();
}

#[test]
fn duality_runs() {
    duality::run_example().unwrap();
}

#[test]
fn higher_level_rde_runs() {
    higher_level_rde::run_example().unwrap();
}

#[test]
fn particle_mean_field_runs() {
    particle_mean_field::run_example().unwrap();
}

#[test]
fn coupled_endogeny_runs() {
    coupled_endogeny::run_example().unwrap();
}
