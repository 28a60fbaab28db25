use sssc_expansion::fixtures::{oscillating_two_bus, remote_wind_triangle, two_bus_expansion};
use sssc_expansion::lp::MicroLp;
use sssc_expansion::network::Network;
use sssc_expansion::planner::{plan, ConvergenceConfig, Norm};
use sssc_expansion::scenario::Scenario;
use sssc_expansion::Error;

/// Cost of the two-bus system with the line built to exactly `f` MW and its
/// impedance consistent with that size.
fn cost_at_fixed_capacity(base: &Network, f: f64) -> f64 {
    let mut net = base.clone();
    let l = &mut net.ac_lines[0];
    let ratio = l.f0 / f;
    l.r0_pu *= ratio;
    l.x0_pu *= ratio;
    l.f0 = f;
    l.f_max = f;
    net.validate().unwrap();
    let out = plan(&net, &Scenario::named("grid"), &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert_eq!(out.state.iterations(), 1);
    out.objective()
}

/// Grid search over capacity in 1 MW steps.
pub fn brute_force_capacity(net: &Network) -> (f64, f64) {
    let line = &net.ac_lines[0];
    let (lo, hi) = (line.f0 as usize, line.f_max as usize);
    (lo..=hi)
        .map(|f| (f as f64, cost_at_fixed_capacity(net, f as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[test]
fn two_bus_matches_brute_force() {
    let net = two_bus_expansion();
    let out = plan(&net, &Scenario::named("2bus"), &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert!(out.converged);
    let f_star = out.solution.ac_capacity()[0];
    let (f_grid, c_grid) = brute_force_capacity(&net);
    assert!((f_star - f_grid).abs() <= 1.0, "planner {f_star} vs grid {f_grid}");
    assert!((out.objective() - c_grid).abs() <= 1e-3 * c_grid);
    assert!(out.self_check.unwrap().passes);
}

#[test]
fn zero_budget_stops_after_one_round() {
    let net = two_bus_expansion();
    let sc = Scenario::named("frozen").with_budget(Some(0.0));
    let out = plan(&net, &sc, &ConvergenceConfig::default(), &MicroLp).unwrap();
    assert!(out.converged);
    assert_eq!(out.state.iterations(), 1);
    assert_eq!(out.solution.ac_capacity()[0], 100.0);
    let check = out.self_check.unwrap();
    assert!(check.delta < 1e-9);
}

#[test]
fn damping_settles_the_oscillating_case() {
    let net = oscillating_two_bus();
    let sc = Scenario::named("osc");
    let base = ConvergenceConfig {
        loss_segments: 2,
        ..Default::default()
    };
    let undamped = plan(&net, &sc, &base, &MicroLp).unwrap();
    assert!(!undamped.converged);
    assert_eq!(undamped.state.iterations(), 25);
    assert!(matches!(undamped.clone().require_converged(), Err(Error::NotConverged { .. })));

    let damped = plan(&net, &sc, &ConvergenceConfig { damping: 0.5, ..base }, &MicroLp).unwrap();
    assert!(damped.converged);
    assert!(damped.state.iterations() <= 25);
    assert!((damped.solution.ac_capacity()[0] - 400.0).abs() < 0.5);
    assert!(damped.self_check.unwrap().passes);
}

#[test]
fn max_norm_also_converges() {
    let net = remote_wind_triangle();
    let sc = Scenario {
        zero_carbon_min: Some(1.0),
        ..Scenario::named("wind")
    };
    for norm in [Norm::L2, Norm::Linf] {
        let out = plan(&net, &sc, &ConvergenceConfig { norm, ..Default::default() }, &MicroLp).unwrap();
        assert!(out.converged);
        assert!(out.self_check.unwrap().passes);
    }
}

#[test]
fn iteration_trace_csv_is_deterministic_without_timings() {
    let net = two_bus_expansion();
    let out = plan(&net, &Scenario::named("2bus"), &ConvergenceConfig::default(), &MicroLp).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    out.state.write_csv(&mut a, false).unwrap();
    out.state.write_csv(&mut b, false).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,norm_delta,objective,wall_seconds");
    assert_eq!(text.lines().count(), out.state.iterations() + 1);
}

#[test]
fn infeasible_scenario_is_reported() {
    let mut net = two_bus_expansion();
    net.generators.retain(|g| g.id == "cheap");
    net.ac_lines[0].f_max = 150.0;
    net.validate().unwrap();
    let err = plan(&net, &Scenario::named("short"), &ConvergenceConfig::default(), &MicroLp).unwrap_err();
    assert!(matches!(err, Error::InfeasibleScenario(_)));
}
