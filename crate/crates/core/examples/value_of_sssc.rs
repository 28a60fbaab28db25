//! Saving, benefit-cost ratio and avoided transmission for several demand
//! levels, run in parallel.

use sssc_expansion::analysis::run_scenarios;
use sssc_expansion::fixtures::triangle;
use sssc_expansion::prelude::*;

fn main() -> Result<()> {
    let net = triangle();
    let scenarios: Vec<Scenario> = [1.0, 1.25, 1.5]
        .iter()
        .map(|&k| Scenario {
            demand_scale: k,
            sssc: SsscPolicy::Allowed {
                c_sssc: 10.0,
                q_total_cap: None,
            },
            ..Scenario::named(format!("demand x{k:.2}"))
        })
        .collect();
    for (name, rep) in run_scenarios(&net, &scenarios, &ConvergenceConfig::default(), &MicroLp) {
        let rep = rep?;
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.2}"));
        println!(
            "{name}: saving {} $/yr, BCR {}, SSSC {} GVAr, avoided {:?}",
            fmt(rep.cost_saving),
            fmt(rep.benefit_cost_ratio),
            fmt(rep.installed_q_total_gvar),
            rep.avoided_transmission
        );
    }
    Ok(())
}
