//! Every example runs to completion.

#[path = "../examples/bcl_invariants.rs"]
mod bcl_invariants;
#[path = "../examples/direct_integral.rs"]
mod direct_integral;
#[path = "../examples/doubly_commuting.rs"]
mod doubly_commuting;
#[path = "../examples/functional_model.rs"]
mod functional_model;
#[path = "../examples/reports.rs"]
mod reports;
#[path = "../examples/shifted_example.rs"]
mod shifted_example;
#[path = "../examples/staircases.rs"]
mod staircases;
#[path = "../examples/symbols.rs"]
mod symbols;
#[path = "../examples/wold_decomposition.rs"]
mod wold_decomposition;

#[test]
fn bcl_invariants_runs() {
    bcl_invariants::run().unwrap();
}

#[test]
fn direct_integral_runs() {
    direct_integral::run().unwrap();
}

#[test]
fn doubly_commuting_runs() {
    doubly_commuting::run().unwrap();
}

#[test]
fn functional_model_runs() {
    functional_model::run().unwrap();
}

#[test]
fn reports_runs() {
    reports::run().unwrap();
}

#[test]
fn shifted_example_runs() {
    shifted_example::run().unwrap();
}

#[test]
fn staircases_runs() {
    staircases::run().unwrap();
}

#[test]
fn symbols_runs() {
    symbols::run().unwrap();
}

#[test]
fn wold_decomposition_runs() {
    wold_decomposition::run().unwrap();
}
