use sssc_expansion::analysis::{
    avoided_transmission, run_pair, run_scenarios, sweep_sssc_caps, AvoidedTransmission,
};
use sssc_expansion::fixtures::{costly_expansion_triangle, remote_wind_triangle, triangle, two_bus_expansion};
use sssc_expansion::lp::MicroLp;
use sssc_expansion::network::Network;
use sssc_expansion::planner::{plan, ConvergenceConfig};
use sssc_expansion::scenario::{Scenario, SsscPolicy};

fn allowed(name: &str, c_sssc: f64) -> Scenario {
    Scenario {
        sssc: SsscPolicy::Allowed {
            c_sssc,
            q_total_cap: None,
        },
        ..Scenario::named(name)
    }
}

fn cost(net: &Network, sc: &Scenario) -> f64 {
    match plan(net, sc, &ConvergenceConfig::default(), &MicroLp) {
        Ok(out) => out.objective(),
        Err(sssc_expansion::Error::InfeasibleScenario(_)) => f64::INFINITY,
        Err(e) => panic!("{e}"),
    }
}

/// Smallest of 50 evenly spaced no-SSSC budgets whose cost reaches `target`.
fn grid_required_budget(net: &Network, sc: &Scenario, target: f64) -> (f64, f64) {
    let u_max = net.max_expansion_volume() / 1e6;
    let step = u_max / 49.0;
    let base = sc.without_sssc();
    let u = (0..50)
        .map(|k| k as f64 * step)
        .find(|&u| cost(net, &base.with_budget(Some(u))) <= target * (1.0 + 1e-6))
        .expect("target reachable on the grid");
    (u, step)
}

#[test]
fn prohibitive_sssc_price_changes_nothing() {
    let rep = run_pair(&triangle(), &allowed("pricey", 1e9), &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert!(rep.installed_q_total_gvar.unwrap() < 1e-9);
    assert!(rep.cost_saving.unwrap().abs() < 1e-6 * rep.cost_no_sssc.unwrap());
    assert_eq!(rep.benefit_cost_ratio, None);
}

#[test]
fn remote_wind_toy_saves_money_and_transmission() {
    let net = remote_wind_triangle();
    let sc = Scenario {
        zero_carbon_min: Some(0.8),
        ..allowed("deep", 10.0)
    }
    .with_budget(Some(0.009));
    let rep = run_pair(&net, &sc, &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert!(rep.cost_saving.unwrap() > 0.0);
    assert!(rep.benefit_cost_ratio.unwrap() > 1.0);
    let Some(AvoidedTransmission::Avoided {
        required_tw_mile,
        avoided_tw_mile,
        monotone,
        ..
    }) = rep.avoided_transmission
    else {
        panic!("expected an avoided volume, got {:?}", rep.avoided_transmission);
    };
    assert!(monotone);
    assert!(avoided_tw_mile > 0.0);

    let (grid_u, step) = grid_required_budget(&net, &sc, rep.cost_with_sssc.unwrap());
    assert!((required_tw_mile - grid_u).abs() <= step, "{required_tw_mile} vs grid {grid_u}");
}

#[test]
fn operational_supplement_is_unattainable() {
    let rep = run_pair(
        &costly_expansion_triangle(),
        &allowed("op", 10.0),
        &ConvergenceConfig::default(),
        &MicroLp,
    )
    .unwrap();
    assert!(rep.cost_saving.unwrap() > 0.0);
    assert!(matches!(
        rep.avoided_transmission,
        Some(AvoidedTransmission::Unattainable { .. })
    ));
}

#[test]
fn two_bus_bisection_matches_budget_grid() {
    let net = two_bus_expansion();
    let sc = Scenario::named("2bus");
    let cfg = ConvergenceConfig::default();
    let c0 = cost(&net, &sc.with_budget(Some(0.0)));
    let c_inf = cost(&net, &sc);
    let target = 0.5 * (c0 + c_inf);
    let res = avoided_transmission(&net, &sc, target, 0.0, &cfg, &MicroLp).unwrap();
    let AvoidedTransmission::Avoided { required_tw_mile, .. } = res else {
        panic!("target between the curve ends must be attainable");
    };
    let (grid_u, step) = grid_required_budget(&net, &sc, target);
    assert!(required_tw_mile <= grid_u + 1e-12);
    assert!(grid_u - required_tw_mile <= step);
}

#[test]
fn target_at_unlimited_cost_needs_the_unconstrained_build() {
    let net = two_bus_expansion();
    let sc = Scenario::named("2bus");
    let cfg = ConvergenceConfig::default();
    let out = plan(&net, &sc, &cfg, &MicroLp).unwrap();
    let used = net.expansion_volume(&out.solution.ac_capacity(), &out.solution.dc_capacity()) / 1e6;
    let target = out.objective() * (1.0 - 1e-9);
    let res = avoided_transmission(&net, &sc, target, 0.0, &cfg, &MicroLp).unwrap();
    let AvoidedTransmission::Avoided { required_tw_mile, .. } = res else {
        panic!("unexpected {res:?}");
    };
    let tol = 1e-3 * net.max_expansion_volume() / 1e6;
    assert!((required_tw_mile - used).abs() <= 2.0 * tol, "{required_tw_mile} vs {used}");
}

#[test]
fn single_zero_cap_sweep() {
    let curve = sweep_sssc_caps(&triangle(), &allowed("z", 10.0), &[0.0], &ConvergenceConfig::default(), &MicroLp)
        .unwrap();
    assert_eq!(curve.points.len(), 1);
    assert!(curve.points[0].saving.abs() < 1e-6 * curve.cost_no_sssc);
}

#[test]
fn sweep_rejects_unsorted_caps_and_forbidden_scenarios() {
    let cfg = ConvergenceConfig::default();
    assert!(sweep_sssc_caps(&triangle(), &allowed("u", 10.0), &[1.0, 0.0], &cfg, &MicroLp).is_err());
    assert!(sweep_sssc_caps(&triangle(), &Scenario::named("f"), &[0.0], &cfg, &MicroLp).is_err());
}

#[test]
fn saving_grows_with_demand() {
    let savings: Vec<f64> = [1.0, 1.25, 1.5]
        .iter()
        .map(|&k| {
            let sc = Scenario {
                demand_scale: k,
                ..allowed("d", 10.0)
            };
            run_pair(&triangle(), &sc, &ConvergenceConfig::default(), &MicroLp)
                .unwrap()
                .cost_saving
                .unwrap()
        })
        .collect();
    assert!(savings.windows(2).all(|w| w[1] >= w[0]), "{savings:?}");
}

#[test]
fn scenario_batch_is_sorted_by_name() {
    let scs = vec![allowed("zeta", 10.0), allowed("alpha", 10.0), allowed("mid", 1e9)];
    let out = run_scenarios(&triangle(), &scs, &ConvergenceConfig::default(), &MicroLp);
    let names: Vec<&str> = out.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["alpha", "mid", "zeta"]);
    assert!(out.iter().all(|(_, r)| r.is_ok()));
}

#[test]
fn infeasible_side_is_flagged() {
    let mut net = triangle();
    net.generators.retain(|g| g.id == "g1");
    net.validate().unwrap();
    let rep = run_pair(&net, &allowed("tight", 10.0), &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert_eq!(rep.infeasible, vec!["without_sssc".to_string()]);
    assert!(rep.cost_with_sssc.is_some());
    assert_eq!(rep.cost_saving, None);
}
