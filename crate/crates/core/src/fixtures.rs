//! Small ready-made networks for examples, tests and benchmarks.
//!
//! All fixtures use a 100 MVA base so that 1 pu of flow is 100 MW.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{AcLine, Bus, DcLink, Generator, Network, Profile, TimeStructure, HOURS_PER_YEAR};

pub const BASE_MVA: f64 = 100.0;

fn bus(id: &str, label: &str, demand: Option<&str>) -> Bus {
    Bus {
        id: id.into(),
        component_label: label.into(),
        coordinates: None,
        demand_profile_ref: demand.map(Into::into),
    }
}

/// AC line with `F0 = F_max = cap` (not expandable).
fn fixed_line(id: &str, from: &str, to: &str, cap: f64, x_pu: f64) -> AcLine {
    AcLine {
        id: id.into(),
        from_bus: from.into(),
        to_bus: to.into(),
        length: 100.0,
        f0: cap,
        f_max: cap,
        r0_pu: 0.0,
        x0_pu: x_pu,
        cost: 1000.0,
        sssc_allowed: false,
        base_mva: BASE_MVA,
    }
}

fn generator(id: &str, bus: &str, c_fix: f64, c_var: f64) -> Generator {
    Generator {
        id: id.into(),
        bus: bus.into(),
        c_fix,
        c_var,
        p_max: None,
        p0: None,
        availability_profile: None,
        is_electrolyzer: false,
        zero_carbon: false,
        tech_tag: String::new(),
    }
}

fn flat(id: &str, value: f64, n: usize) -> Profile {
    Profile {
        id: id.into(),
        values: vec![value; n],
    }
}

/// Three-bus ring with a thin direct corridor.
///
/// Lines `L12` (b1→b2), `L23` (b2→b3) and `L13` (b1→b3) all have
/// `x = 1 pu`, no resistance and fixed capacities of 1.0, 1.0 and 0.5 pu.
/// A cheap generator `g1` (10 $/MWh) sits at b1, an expensive one `g3`
/// (50 $/MWh) next to the 100 MW load at b3. Only `L13` may host an SSSC.
/// One snapshot stands for the whole year.
pub fn triangle() -> Network {
    triangle_with_demand(100.0)
}

/// [`triangle`] with a different load at b3, in MW.
pub fn triangle_with_demand(demand_mw: f64) -> Network {
    let mut l13 = fixed_line("L13", "b1", "b3", 50.0, 1.0);
    l13.sssc_allowed = true;
    Network::new(
        vec![bus("b1", "A", None), bus("b2", "A", None), bus("b3", "A", Some("d3"))],
        vec![
            fixed_line("L12", "b1", "b2", 100.0, 1.0),
            fixed_line("L23", "b2", "b3", 100.0, 1.0),
            l13,
        ],
        vec![],
        vec![generator("g1", "b1", 0.0, 10.0), generator("g3", "b3", 0.0, 50.0)],
        vec![],
        vec![flat("d3", demand_mw, 1)],
        TimeStructure::uniform(1),
    )
    .expect("triangle fixture is valid")
}

/// Two triangles in separate AC components joined by a DC corridor.
pub fn two_triangles() -> Network {
    let mut lines = Vec::new();
    let mut buses = Vec::new();
    for (label, p) in [("A", "a"), ("B", "c")] {
        for k in 1..=3 {
            let demand = (k == 3).then_some("d");
            buses.push(bus(&format!("{p}{k}"), label, demand));
        }
        lines.push(fixed_line(&format!("{p}12"), &format!("{p}1"), &format!("{p}2"), 100.0, 1.0));
        lines.push(fixed_line(&format!("{p}23"), &format!("{p}2"), &format!("{p}3"), 100.0, 1.0));
        lines.push(fixed_line(&format!("{p}13"), &format!("{p}1"), &format!("{p}3"), 100.0, 1.0));
    }
    let dc = |id: &str, from: &str, to: &str, partner: &str| DcLink {
        id: id.into(),
        from_bus: from.into(),
        to_bus: to.into(),
        reverse_partner_id: partner.into(),
        f0: 50.0,
        f_max: 200.0,
        efficiency: 0.97,
        length: 300.0,
        cost: 2000.0,
    };
    Network::new(
        buses,
        lines,
        vec![dc("dc_ac", "a1", "c1", "dc_ca"), dc("dc_ca", "c1", "a1", "dc_ac")],
        vec![generator("ga", "a1", 0.0, 10.0), generator("gc", "c1", 0.0, 30.0)],
        vec![],
        vec![flat("d", 60.0, 1)],
        TimeStructure::uniform(1),
    )
    .expect("two-triangle fixture is valid")
}

/// `n` buses in a line, generator at the first bus, load at the last.
pub fn path_network(n: usize) -> Network {
    assert!(n >= 2);
    let buses = (1..=n)
        .map(|k| bus(&format!("p{k}"), "A", (k == n).then_some("d")))
        .collect();
    let lines = (1..n)
        .map(|k| fixed_line(&format!("P{k}"), &format!("p{k}"), &format!("p{}", k + 1), 100.0, 0.1))
        .collect();
    Network::new(
        buses,
        lines,
        vec![],
        vec![generator("g", "p1", 0.0, 10.0)],
        vec![],
        vec![flat("d", 50.0, 1)],
        TimeStructure::uniform(1),
    )
    .expect("path fixture is valid")
}

/// One bus, one generator and a flat load; no network at all.
pub fn single_bus(demand_mw: f64, c_fix: f64) -> Network {
    Network::new(
        vec![bus("b", "A", Some("d"))],
        vec![],
        vec![],
        vec![generator("g", "b", c_fix, 0.0)],
        vec![],
        vec![flat("d", demand_mw, 1)],
        TimeStructure::uniform(1),
    )
    .expect("single-bus fixture is valid")
}

/// Remote cheap supply behind one expandable line.
///
/// `L` runs from `remote` (generator at 10 $/MWh) to `city` (300 MW load and
/// a 50 $/MWh generator). `F0 = 100 MW`, `F_max = 400 MW`, `r0 = 0.02 pu`,
/// `x0 = 0.1 pu`, 50 000 $/MW-yr.
pub fn two_bus_expansion() -> Network {
    let line = AcLine {
        id: "L".into(),
        from_bus: "remote".into(),
        to_bus: "city".into(),
        length: 200.0,
        f0: 100.0,
        f_max: 400.0,
        r0_pu: 0.02,
        x0_pu: 0.1,
        cost: 50_000.0,
        sssc_allowed: false,
        base_mva: BASE_MVA,
    };
    Network::new(
        vec![bus("city", "A", Some("load")), bus("remote", "A", None)],
        vec![line],
        vec![],
        vec![
            generator("cheap", "remote", 1000.0, 10.0),
            generator("local", "city", 1000.0, 50.0),
        ],
        vec![],
        vec![flat("load", 300.0, 1)],
        TimeStructure::uniform(1),
    )
    .expect("two-bus fixture is valid")
}

/// [`triangle`] with every line expandable to 400 MW at a prohibitive
/// 1 M$/MW-yr, so building lines never beats expensive local generation.
pub fn costly_expansion_triangle() -> Network {
    let mut net = triangle();
    for l in &mut net.ac_lines {
        l.f_max = 400.0;
        l.cost = 1e6;
    }
    net.validate().expect("costly-expansion fixture is valid");
    net
}

/// Wind at a remote bus feeding a 200 MW city over a loop.
///
/// Same topology as [`triangle`] (`w`→`m`→`c` at 100 MW and a direct
/// `w`→`c` line at 50 MW, all `x = 1 pu`, lossless) but every line can grow
/// to 300 MW at 20 000 $/MW-yr. The city also has gas; requiring fully
/// zero-carbon generation forces all energy over the loop.
pub fn remote_wind_triangle() -> Network {
    let line = |id: &str, from: &str, to: &str, cap: f64| AcLine {
        f_max: 300.0,
        cost: 20_000.0,
        sssc_allowed: true,
        ..fixed_line(id, from, to, cap, 1.0)
    };
    let mut wind = generator("wind", "w", 20_000.0, 0.0);
    wind.zero_carbon = true;
    wind.tech_tag = "wind".into();
    let mut gas = generator("gas", "c", 10_000.0, 50.0);
    gas.tech_tag = "gas".into();
    Network::new(
        vec![bus("w", "A", None), bus("m", "A", None), bus("c", "A", Some("load"))],
        vec![line("Lwm", "w", "m", 100.0), line("Lmc", "m", "c", 100.0), line("Lwc", "w", "c", 50.0)],
        vec![],
        vec![wind, gas],
        vec![],
        vec![flat("load", 200.0, 1)],
        TimeStructure::uniform(1),
    )
    .expect("remote-wind fixture is valid")
}

/// Two-bus system whose undamped capacity iteration cycles.
///
/// The single line has an absurdly high resistance (1.5 pu at 100 MW). With
/// a two-segment loss envelope the linearized losses fall by 0.25 MW per MW
/// of assumed capacity, so the capacity the LP asks for moves against the
/// linearization point by 1.5 MW per MW: from 100 MW it jumps to 850 MW and
/// back. The consistent capacity is 400 MW.
pub fn oscillating_two_bus() -> Network {
    let line = AcLine {
        id: "L".into(),
        from_bus: "src".into(),
        to_bus: "sink".into(),
        length: 1.0,
        f0: 100.0,
        f_max: 2000.0,
        r0_pu: 1.5,
        x0_pu: 0.1,
        cost: 1.0,
        sssc_allowed: false,
        base_mva: BASE_MVA,
    };
    Network::new(
        vec![bus("sink", "A", Some("load")), bus("src", "A", None)],
        vec![line],
        vec![],
        vec![generator("g", "src", 0.0, 1.0)],
        vec![],
        vec![flat("load", 100.0, 1)],
        TimeStructure::uniform(1),
    )
    .expect("oscillating fixture is valid")
}

/// Options for [`random_network`].
#[derive(Debug, Clone)]
pub struct RandomNetworkOptions {
    pub buses: usize,
    /// Lines added on top of the spanning tree.
    pub extra_lines: usize,
    /// Number of AC components the buses are split into.
    pub components: usize,
    pub snapshots: usize,
    /// Zero resistance on every line.
    pub lossless: bool,
    /// Lines that lie on a cycle may be expanded. Bridges and DC corridors
    /// are always expandable.
    pub expandable_meshed: bool,
    /// Fraction of meshed lines that may host an SSSC.
    pub sssc_share: f64,
}

impl Default for RandomNetworkOptions {
    fn default() -> Self {
        RandomNetworkOptions {
            buses: 8,
            extra_lines: 4,
            components: 1,
            snapshots: 3,
            lossless: true,
            expandable_meshed: false,
            sssc_share: 0.5,
        }
    }
}

/// Random but always feasible network: every load bus has a local, expensive
/// generator; cheap generators sit elsewhere. Components beyond the first are
/// tied back with DC corridors.
pub fn random_network(seed: u64, opts: &RandomNetworkOptions) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = opts.buses.max(opts.components.max(1) * 2);
    let n_comp = opts.components.max(1);
    let n_t = opts.snapshots.max(1);

    // split buses into components of at least two buses
    let mut comp_of = Vec::with_capacity(n);
    for b in 0..n {
        comp_of.push(if b < 2 * n_comp { b / 2 } else { rng.gen_range(0..n_comp) });
    }
    comp_of.sort_unstable();
    let label = |c: usize| format!("C{c}");
    let bus_id = |b: usize| format!("n{b:02}");

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for c in 0..n_comp {
        let members: Vec<usize> = (0..n).filter(|&b| comp_of[b] == c).collect();
        for k in 1..members.len() {
            let parent = members[rng.gen_range(0..k)];
            edges.push((parent, members[k]));
        }
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < opts.extra_lines && attempts < 50 * (opts.extra_lines + 1) {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || comp_of[a] != comp_of[b] {
            continue;
        }
        if edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a)) {
            continue;
        }
        edges.push((a, b));
        added += 1;
    }
    let meshed = meshed_edges(n, &edges);

    let mut profiles = Vec::new();
    let mut buses = Vec::new();
    let mut generators = Vec::new();
    for b in 0..n {
        let has_load = rng.gen_bool(0.6) || b == n - 1;
        let demand = if has_load {
            let id = format!("d_{}", bus_id(b));
            let base = rng.gen_range(20.0..80.0);
            profiles.push(Profile {
                id: id.clone(),
                values: (0..n_t).map(|_| base * rng.gen_range(0.7..1.3)).collect(),
            });
            generators.push(generator(
                &format!("peak_{}", bus_id(b)),
                &bus_id(b),
                rng.gen_range(5_000.0..20_000.0),
                rng.gen_range(60.0..120.0),
            ));
            Some(id)
        } else {
            None
        };
        if !has_load || rng.gen_bool(0.3) {
            let mut g = generator(
                &format!("base_{}", bus_id(b)),
                &bus_id(b),
                rng.gen_range(20_000.0..60_000.0),
                rng.gen_range(5.0..30.0),
            );
            if rng.gen_bool(0.5) {
                let pid = format!("cf_{}", bus_id(b));
                profiles.push(Profile {
                    id: pid.clone(),
                    values: (0..n_t).map(|_| rng.gen_range(0.2..1.0)).collect(),
                });
                g.availability_profile = Some(pid);
                g.zero_carbon = true;
                g.tech_tag = "wind".into();
            } else {
                g.tech_tag = "gas".into();
            }
            generators.push(g);
        }
        buses.push(Bus {
            id: bus_id(b),
            component_label: label(comp_of[b]),
            coordinates: Some((-100.0 + rng.gen_range(0.0..10.0), 35.0 + rng.gen_range(0.0..10.0))),
            demand_profile_ref: demand,
        });
    }

    let ac_lines = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let f0 = rng.gen_range(20.0..120.0);
            let expandable = !meshed[k] || opts.expandable_meshed;
            AcLine {
                id: format!("L{k:03}"),
                from_bus: bus_id(a),
                to_bus: bus_id(b),
                length: rng.gen_range(20.0..200.0),
                f0,
                f_max: if expandable { f0 * rng.gen_range(1.5..4.0) } else { f0 },
                r0_pu: if opts.lossless { 0.0 } else { rng.gen_range(0.005..0.03) },
                x0_pu: rng.gen_range(0.05..0.5),
                cost: rng.gen_range(500.0..5_000.0),
                sssc_allowed: meshed[k] && rng.gen_bool(opts.sssc_share.clamp(0.0, 1.0)),
                base_mva: BASE_MVA,
            }
        })
        .collect();

    let mut dc_links = Vec::new();
    for c in 1..n_comp {
        let pick = |rng: &mut ChaCha8Rng, comp: usize| {
            let members: Vec<usize> = (0..n).filter(|&b| comp_of[b] == comp).collect();
            *members.choose(rng).expect("component has buses")
        };
        let a = pick(&mut rng, c - 1);
        let b = pick(&mut rng, c);
        let f0 = rng.gen_range(10.0..60.0);
        let f_max = f0 * rng.gen_range(1.5..3.0);
        let length = rng.gen_range(100.0..500.0);
        let cost = rng.gen_range(1_000.0..4_000.0);
        let eff = rng.gen_range(0.95..0.99);
        for (id, from, to, partner) in [
            (format!("DC{c}f"), a, b, format!("DC{c}r")),
            (format!("DC{c}r"), b, a, format!("DC{c}f")),
        ] {
            dc_links.push(DcLink {
                id,
                from_bus: bus_id(from),
                to_bus: bus_id(to),
                reverse_partner_id: partner,
                f0,
                f_max,
                efficiency: eff,
                length,
                cost,
            });
        }
    }

    let weight = HOURS_PER_YEAR / n_t as f64;
    let time = TimeStructure {
        periods: vec![crate::network::Period {
            id: "p0".into(),
            weights: vec![weight; n_t],
        }],
    };
    Network::new(buses, ac_lines, dc_links, generators, vec![], profiles, time)
        .expect("random fixture is valid")
}

/// Marks edges that lie on at least one cycle (non-bridges).
fn meshed_edges(n: usize, edges: &[(usize, usize)]) -> Vec<bool> {
    (0..edges.len())
        .map(|skip| {
            // an edge is a bridge iff its ends are disconnected without it
            let (s, t) = edges[skip];
            let mut adj = vec![Vec::new(); n];
            for (k, &(a, b)) in edges.iter().enumerate() {
                if k != skip {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen[t]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        assert_eq!(triangle().ac_lines.len(), 3);
        assert_eq!(two_triangles().components().len(), 2);
        assert_eq!(path_network(4).ac_lines.len(), 3);
        single_bus(100.0, 10.0);
        two_bus_expansion();
        oscillating_two_bus();
    }

    #[test]
    fn random_network_is_deterministic() {
        let opts = RandomNetworkOptions {
            components: 2,
            ..Default::default()
        };
        assert_eq!(random_network(7, &opts), random_network(7, &opts));
        assert_eq!(random_network(7, &opts).components().len(), 2);
    }

    #[test]
    fn bridges_are_not_meshed() {
        // triangle plus a pendant edge
        let m = meshed_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(m, vec![true, true, true, false]);
    }
}
