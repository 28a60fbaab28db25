mod common;

use approx::assert_relative_eq;
use sssc_expansion::fixtures::{random_network, triangle, two_bus_expansion, two_triangles, RandomNetworkOptions};
use sssc_expansion::lp::{
    build_lp, check_feasibility, solve, BuildOptions, Family, FlowFormulation, Linearization, MicroLp, SsscMode,
};
use sssc_expansion::network::{Bus, Generator, Network, Period, Profile, StorageUnit, TimeStructure};
use sssc_expansion::scenario::{Scenario, ShareConstraint, ShareKind, SsscPolicy};

fn solve_lossless(net: &Network, sc: &Scenario, mode: SsscMode, formulation: FlowFormulation) -> sssc_expansion::lp::Solution {
    let lin = Linearization::initial(net, 3).unwrap().lossless();
    let model = build_lp(net, sc, &lin, &BuildOptions { sssc: mode, formulation }).unwrap();
    let sol = solve(&model, &MicroLp).unwrap();
    assert!(sol.is_optimal(), "{:?}", sol.status);
    sol
}

#[test]
fn triangle_flows_match_angle_oracle() {
    let net = triangle();
    let sol = solve_lossless(&net, &Scenario::named("t"), SsscMode::Off, FlowFormulation::CycleKvl);
    let flows: Vec<f64> = sol.ac_flows().iter().map(|f| f[0]).collect();
    // cheap g1 pushes until the direct line binds: 75 MW, 2/3 of it direct
    assert_relative_eq!(sol.dispatch()[0][0], 75.0, max_relative = 1e-9);
    assert_relative_eq!(flows[2], 50.0, max_relative = 1e-9);
    let inj: Vec<f64> = common::divergence(&net, &flows).iter().map(|v| v / 100.0).collect();
    let oracle = common::btheta_oracle(&net, &inj, &[1.0, 1.0, 1.0]);
    for (f, o) in flows.iter().zip(oracle) {
        assert!((f / 100.0 - o).abs() < 1e-9);
    }
}

#[test]
fn fixed_quarter_pu_sssc_delivers_full_load() {
    let net = triangle();
    let sc = Scenario::named("t");
    let sol = solve_lossless(&net, &sc, SsscMode::Fixed(vec![0.0, 0.0, 0.25]), FlowFormulation::CycleKvl);
    assert_relative_eq!(sol.dispatch()[0][0], 100.0, max_relative = 1e-9);
    assert!(sol.dispatch()[1][0].abs() < 1e-6);
    assert_relative_eq!(sol.q_tilde()[2][0], -25.0, max_relative = 1e-9);
}

#[test]
fn angle_formulation_gives_same_objective() {
    let opts = RandomNetworkOptions {
        buses: 12,
        extra_lines: 6,
        components: 2,
        lossless: false,
        ..Default::default()
    };
    for seed in 0..5 {
        let net = random_network(seed, &opts);
        let sc = Scenario {
            sssc: SsscPolicy::Allowed {
                c_sssc: 5.0,
                q_total_cap: None,
            },
            ..Scenario::named("r")
        };
        let lin = Linearization::initial(&net, 3).unwrap();
        let objective = |formulation| {
            let opts = BuildOptions {
                sssc: SsscMode::Invest,
                formulation,
            };
            solve(&build_lp(&net, &sc, &lin, &opts).unwrap(), &MicroLp).unwrap().objective
        };
        assert_relative_eq!(
            objective(FlowFormulation::CycleKvl),
            objective(FlowFormulation::AngleBased),
            max_relative = 1e-6
        );
    }
}

#[test]
fn feasibility_check_names_broken_families() {
    let net = triangle();
    let lin = Linearization::initial(&net, 3).unwrap();
    let model = build_lp(&net, &Scenario::named("t"), &lin, &BuildOptions::default()).unwrap();
    let sol = solve(&model, &MicroLp).unwrap();
    assert!(sol.feasibility.as_ref().unwrap().passes());

    let mut bad = sol.primal.clone();
    bad[sol.catalog.ac_flow[0][0].0] += 1e-3 * 100.0;
    let rep = check_feasibility(&model.lp, &bad, 1e-6);
    assert!(rep.failing_families().contains(&Family::Kvl));

    let zero = vec![0.0; model.lp.n_cols()];
    let rep = check_feasibility(&model.lp, &zero, 1e-6);
    assert!(rep.failing_families().contains(&Family::Balance));
}

fn storage_bus(with_storage: bool) -> Network {
    let gen = |id: &str, c_fix: f64, c_var: f64, avail: Option<&str>| Generator {
        id: id.into(),
        bus: "b".into(),
        c_fix,
        c_var,
        p_max: None,
        p0: None,
        availability_profile: avail.map(Into::into),
        is_electrolyzer: false,
        zero_carbon: false,
        tech_tag: String::new(),
    };
    let storage = StorageUnit {
        id: "bat".into(),
        bus: "b".into(),
        c_char: 100.0,
        c_dis: 100.0,
        c_sto: 10.0,
        eta_char: 0.9,
        eta_dis: 0.9,
        eta_idle: 1.0,
        p0_char: None,
        p0_dis: None,
        e0: None,
    };
    Network::new(
        vec![Bus {
            id: "b".into(),
            component_label: "A".into(),
            coordinates: None,
            demand_profile_ref: Some("load".into()),
        }],
        vec![],
        vec![],
        vec![gen("solar", 1000.0, 0.0, Some("sun")), gen("peak", 0.0, 100.0, None)],
        if with_storage { vec![storage] } else { vec![] },
        vec![
            Profile {
                id: "load".into(),
                values: vec![100.0, 100.0],
            },
            Profile {
                id: "sun".into(),
                values: vec![1.0, 0.0],
            },
        ],
        TimeStructure {
            periods: vec![Period {
                id: "day".into(),
                weights: vec![4380.0, 4380.0],
            }],
        },
    )
    .unwrap()
}

#[test]
fn storage_shifts_energy_and_closes_its_cycle() {
    let sc = Scenario::named("s");
    let plain = solve_lossless(&storage_bus(false), &sc, SsscMode::Off, FlowFormulation::CycleKvl);
    let with = solve_lossless(&storage_bus(true), &sc, SsscMode::Off, FlowFormulation::CycleKvl);
    assert!(with.objective < plain.objective);

    let soc = &with.soc()[0];
    let ch = &with.charge()[0];
    let dis = &with.discharge()[0];
    assert!(dis[1] > 1.0, "storage should discharge at night");
    let start = with.value(with.catalog.soc_start[0][0]);
    let mut e = start;
    for t in 0..2 {
        e += 4380.0 * (0.9 * ch[t] - dis[t] / 0.9);
        assert!((e - soc[t]).abs() < 1e-6 * e.abs().max(1.0));
    }
    assert!((soc[1] - start).abs() < 1e-6 * start.abs().max(1.0));
    assert!(with.feasibility.as_ref().unwrap().passes());
}

#[test]
fn gas_cap_limits_generation_share() {
    let opts = RandomNetworkOptions {
        buses: 10,
        extra_lines: 3,
        ..Default::default()
    };
    let net = random_network(3, &opts);
    assert!(net.generators.iter().any(|g| g.tech_tag == "gas"));
    let sc = Scenario {
        share_constraints: vec![ShareConstraint {
            tech_tags: vec!["gas".into()],
            kind: ShareKind::MaxShare,
            fraction: 0.1,
        }],
        ..Scenario::named("cap")
    };
    let sol = solve_lossless(&net, &sc, SsscMode::Off, FlowFormulation::CycleKvl);
    let w = net.time.weights();
    let energy = |pred: &dyn Fn(&Generator) -> bool| -> f64 {
        sol.dispatch()
            .iter()
            .zip(&net.generators)
            .filter(|(_, g)| pred(g))
            .map(|(p, _)| p.iter().zip(&w).map(|(p, w)| p * w).sum::<f64>())
            .sum()
    };
    let gas = energy(&|g| g.tech_tag == "gas");
    let total = energy(&|_| true);
    assert!(gas <= 0.1 * total * (1.0 + 1e-9));
}

#[test]
fn electrolyzers_meet_hydrogen_demand() {
    let mut net = two_bus_expansion();
    net.generators.push(Generator {
        id: "h2".into(),
        bus: "remote".into(),
        c_fix: 500.0,
        c_var: 0.0,
        p_max: None,
        p0: None,
        availability_profile: None,
        is_electrolyzer: true,
        zero_carbon: false,
        tech_tag: "electrolyzer".into(),
    });
    net.validate().unwrap();
    let sc = Scenario {
        d_electro: 0.5,
        ..Scenario::named("h2")
    };
    let sol = solve_lossless(&net, &sc, SsscMode::Off, FlowFormulation::CycleKvl);
    let w = net.time.weights();
    let consumed: f64 = sol.dispatch()[2].iter().zip(&w).map(|(p, w)| -p * w).sum();
    assert_relative_eq!(consumed, 0.5e6, max_relative = 1e-9);
}

#[test]
fn dc_pair_shares_one_capacity() {
    let net = two_triangles();
    let sol = solve_lossless(&net, &Scenario::named("dc"), SsscMode::Off, FlowFormulation::CycleKvl);
    let dc = sol.dc_capacity();
    assert_relative_eq!(dc[0], dc[1], max_relative = 1e-12);
    // the cheap side exports over the corridor, paying the conversion loss
    let flows = sol.dc_flows();
    assert!(flows[0][0] > 0.0);
    assert!(sol.feasibility.as_ref().unwrap().passes());
}

#[test]
fn budget_caps_expansion_volume() {
    let net = two_bus_expansion();
    for budget in [0.0, 0.005, 0.01] {
        let sc = Scenario::named("b").with_budget(Some(budget));
        let sol = solve_lossless(&net, &sc, SsscMode::Off, FlowFormulation::CycleKvl);
        let vol = net.expansion_volume(&sol.ac_capacity(), &sol.dc_capacity()) / 1e6;
        assert!(vol <= budget + 1e-9, "{vol} > {budget}");
    }
}

#[test]
fn lp_text_export_lists_every_column() {
    let net = triangle();
    let lin = Linearization::initial(&net, 3).unwrap();
    let model = build_lp(&net, &Scenario::named("t"), &lin, &BuildOptions::default()).unwrap();
    let mut buf = Vec::new();
    model.lp.write_lp_format(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("f_L13@t0_"));
    assert!(text.to_lowercase().contains("subject to"));
}
