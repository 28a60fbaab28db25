//! Loads a network file and prints its AC components.
//!
//! cargo run --example network_summary -- data/two-area.json

use sssc_expansion::cycles::build_cycle_basis;
use sssc_expansion::network::{load_network, validate_connectivity};

fn main() -> sssc_expansion::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/two-area.json").to_string());
    let net = load_network(&path)?;
    println!(
        "{}: {} buses, {} AC lines, {} DC links, {} snapshots",
        path,
        net.buses.len(),
        net.ac_lines.len(),
        net.dc_links.len(),
        net.n_snapshots()
    );
    for c in validate_connectivity(&net)? {
        println!(
            "  component {}: {} buses, {} lines, {} independent cycles",
            c.label, c.bus_count, c.ac_line_count, c.expected_cycles
        );
    }
    println!("cycle basis size {}", build_cycle_basis(&net).len());
    let vol = net.max_expansion_volume() / 1e6;
    println!("largest possible expansion {vol:.4} TW-mile");
    Ok(())
}
