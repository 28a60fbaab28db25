//! A two-bus system whose capacity iteration oscillates, and the damped
//! update that settles it.

use sssc_expansion::fixtures::oscillating_two_bus;
use sssc_expansion::prelude::*;

fn main() -> Result<()> {
    let net = oscillating_two_bus();
    let sc = Scenario::named("osc");
    for damping in [1.0, 0.5] {
        let config = ConvergenceConfig {
            damping,
            loss_segments: 2,
            max_iterations: 12,
            ..Default::default()
        };
        let out = plan(&net, &sc, &config, &MicroLp)?;
        println!("damping {damping}: converged = {}", out.converged);
        for r in &out.state.history {
            println!(
                "  n={:<2} F_fix {:>8.2}  F* {:>8.2}  delta {:>8.2}",
                r.n, r.f_fix[0], r.f_star[0], r.delta
            );
        }
    }
    Ok(())
}
