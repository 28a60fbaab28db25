//! Plans the three-bus network with and without SSSCs and writes the report
//! files of the SSSC plan.
//!
//! cargo run --example plan_and_report -- [OUT_DIR]

use std::path::PathBuf;

use sssc_expansion::prelude::*;
use sssc_expansion::report::{emit_report, ReportOptions};

fn main() -> Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let net = load_network(format!("{dir}/data/triangle-3bus.json"))?;
    let sc = load_scenario(format!("{dir}/data/scenario-sssc.json"))?;
    let config = ConvergenceConfig::default();

    let without = plan(&net, &sc.without_sssc(), &config, &MicroLp)?;
    let with = plan(&net, &sc, &config, &MicroLp)?;
    println!("cost without SSSC {:>14.2} $/yr", without.objective());
    println!("cost with SSSC    {:>14.2} $/yr", with.objective());
    for (line, q) in net.ac_lines.iter().zip(with.solution.sssc_capacity()) {
        if q > 0.0 {
            println!("  {} gets {q:.1} MVAr", line.id);
        }
    }

    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sssc-plan-example"));
    for p in emit_report(&out, &net, &with, ReportOptions::default())? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
