//! Cycle basis of a random meshed network, checked against an angle-based
//! power flow.

use sssc_expansion::cycles::{build_cycle_basis, cycle_is_closed, solve_btheta_flows};
use sssc_expansion::fixtures::{random_network, RandomNetworkOptions};

fn main() -> sssc_expansion::Result<()> {
    let opts = RandomNetworkOptions {
        buses: 10,
        extra_lines: 5,
        components: 2,
        snapshots: 1,
        ..Default::default()
    };
    let net = random_network(7, &opts);
    let basis = build_cycle_basis(&net);
    println!("{} buses, {} lines, {} cycles", net.buses.len(), net.ac_lines.len(), basis.len());
    for (cycle, edges) in basis.cycles.iter().zip(basis.describe(&net)) {
        let closed = if cycle_is_closed(&net, cycle) { "closed" } else { "OPEN" };
        let path: Vec<String> = edges
            .iter()
            .map(|(id, s)| format!("{}{id}", if *s > 0 { '+' } else { '-' }))
            .collect();
        println!("  [{}] {closed}: {}", cycle.component, path.join(" "));
    }

    // one unit in at the first bus of each component, out at the last
    let mut inj = vec![0.0; net.buses.len()];
    for comp in net.components() {
        inj[comp.buses[0]] += 1.0;
        inj[*comp.buses.last().unwrap()] -= 1.0;
    }
    let x: Vec<f64> = net.ac_lines.iter().map(|l| l.x0_pu).collect();
    let sol = solve_btheta_flows(&net, &[inj], &x)?;
    let worst = basis
        .cycles
        .iter()
        .map(|c| {
            c.edges
                .iter()
                .map(|e| e.sign as f64 * x[e.line] * sol.flows[0][e.line])
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);
    println!("largest voltage-drop sum around a cycle: {worst:.2e}");
    Ok(())
}
