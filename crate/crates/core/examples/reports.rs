//! Driving the command line front end in-process and reading its reports.

use biiso::cli::{main_with_args, parse_config, run as run_cli};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");

pub fn run() -> biiso::Result<()> {
    let symbol = format!("{DATA}/diag_mixed.json");
    let cfg = parse_config(["biiso", "--n", "8", "model", "--symbol", &symbol]).expect("valid arguments");
    let out = run_cli(&cfg);
    let doc: serde_json::Value = serde_json::from_str(&out.report)?;
    println!("model: status {} ({}), verdicts {}", doc["status"], out.status, doc["results"]["verdicts"]);

    let a = format!("{DATA}/even.json");
    let b = format!("{DATA}/even_shifted.json");
    let cfg = parse_config(["biiso", "lattice", "classify", "--zset", &a, "--zset", &b]).expect("valid arguments");
    let doc: serde_json::Value = serde_json::from_str(&run_cli(&cfg).report)?;
    println!("classify: equivalent {}, shift {}", doc["results"]["equivalent"], doc["results"]["shift"]);

    println!("--n 3 exits with {}", main_with_args(["biiso", "--n", "3", "paper-examples"]));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("reports example");
}
