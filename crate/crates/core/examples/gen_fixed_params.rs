//! Regenerates `data/fixed_params.json` from scratch.
//!
//! Usage: `cargo run --release --example gen_fixed_params [> data/fixed_params.json]`
//!
//! Averages exactly optimized parameters over 20 random desk-scale
//! instances per (family, p); see `protocol::generate_concentration_table`.

use shotqaoa::protocol::{generate_concentration_table, FixedParameterTable, ProblemFamily};

fn main() {
    let mut table = FixedParameterTable::from_json_str(
        "{\"schema_version\":1,\"entries\":[]}",
    )
    .expect("empty table parses");
    for family in [ProblemFamily::MaxCut3Regular, ProblemFamily::SkModelPo] {
        eprintln!("generating {family} entries...");
        let entries = generate_concentration_table(family, 7, 20, 20_240_601)
            .expect("table generation succeeds");
        for (p, params) in entries {
            eprintln!(
                "  p={p}: gamma={:?} beta={:?}",
                params.gamma, params.beta
            );
            table.insert(family, params);
        }
    }
    println!("{}", table.to_json_string());
}
