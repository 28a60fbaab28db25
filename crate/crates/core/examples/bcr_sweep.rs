//! Interval benefit-cost ratios as the cap on total SSSC capacity rises.

use sssc_expansion::analysis::sweep_sssc_caps;
use sssc_expansion::fixtures::triangle;
use sssc_expansion::prelude::*;

fn main() -> Result<()> {
    let net = triangle();
    let sc = Scenario {
        sssc: SsscPolicy::Allowed {
            c_sssc: 10.0,
            q_total_cap: None,
        },
        ..Scenario::named("sweep")
    };
    let caps = [0.0, 0.005, 0.01, 0.02, 0.05, f64::INFINITY];
    let curve = sweep_sssc_caps(&net, &sc, &caps, &ConvergenceConfig::default(), &MicroLp)?;
    println!("cost without SSSC {:.2} $/yr", curve.cost_no_sssc);
    for p in &curve.points {
        println!(
            "cap {:>6} GVAr  installed {:.4}  saving {:>12.2}  interval BCR {}",
            p.cap_gvar,
            p.installed_gvar,
            p.saving,
            p.interval_bcr.map_or("-".to_string(), |b| format!("{b:.2}"))
        );
    }
    Ok(())
}
