//! With/without-SSSC comparisons, avoided transmission and capped sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{CostBreakdown, Solution, SolverBackend};
use crate::network::{Network, HOURS_PER_YEAR, MW_MILE_PER_TW_MILE};
use crate::planner::{plan, ConvergenceConfig, PlanOutcome};
use crate::scenario::Scenario;

/// Relative slack used when comparing system costs.
pub const COST_RTOL: f64 = 1e-6;

/// Fleet AC capacity factor: `sum_l sum_t w_t |f_lt| / (8760 sum_l F_l)`.
pub fn fleet_capacity_factor(net: &Network, sol: &Solution) -> f64 {
    let w = net.time.weights();
    let flows = sol.ac_flows();
    let energy: f64 = flows
        .iter()
        .map(|f| f.iter().zip(&w).map(|(f, w)| w * f.abs()).sum::<f64>())
        .sum();
    let cap: f64 = sol.ac_capacity().iter().sum();
    if cap > 0.0 {
        energy / (HOURS_PER_YEAR * cap)
    } else {
        0.0
    }
}

/// Headline numbers of one plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSummary {
    pub objective: f64,
    pub costs: CostBreakdown,
    pub converged: bool,
    pub iterations: usize,
    pub ac_capacity: Vec<f64>,
    pub dc_capacity: Vec<f64>,
    /// Installed SSSC rating per AC line, MVAr.
    pub sssc_mvar: Vec<f64>,
    pub expansion_tw_mile: f64,
    pub ac_capacity_factor: f64,
}

impl PlanSummary {
    pub fn from_outcome(net: &Network, out: &PlanOutcome) -> Self {
        let sol = &out.solution;
        let ac = sol.ac_capacity();
        let dc = sol.dc_capacity();
        PlanSummary {
            objective: sol.objective,
            costs: sol.costs,
            converged: out.converged,
            iterations: out.state.iterations(),
            expansion_tw_mile: net.expansion_volume(&ac, &dc) / MW_MILE_PER_TW_MILE,
            ac_capacity: ac,
            dc_capacity: dc,
            sssc_mvar: sol.sssc_capacity(),
            ac_capacity_factor: fleet_capacity_factor(net, sol),
        }
    }

    pub fn sssc_gvar(&self) -> f64 {
        self.sssc_mvar.iter().sum::<f64>() / 1e3
    }
}

/// Transmission the no-SSSC system needs to match a target cost, minus what
/// the SSSC plan used.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AvoidedTransmission {
    Avoided {
        /// Smallest no-SSSC budget reaching the target, TW-mile.
        required_tw_mile: f64,
        /// Expansion used by the SSSC plan, TW-mile.
        used_with_sssc_tw_mile: f64,
        avoided_tw_mile: f64,
        /// Whether every probed cost was non-increasing in the budget.
        monotone: bool,
    },
    /// Even unlimited expansion without SSSCs stays above the target: the
    /// SSSC saving is purely operational.
    Unattainable { best_cost_without_sssc: f64 },
}

impl AvoidedTransmission {
    pub fn avoided_tw_mile(&self) -> Option<f64> {
        match self {
            AvoidedTransmission::Avoided { avoided_tw_mile, .. } => Some(*avoided_tw_mile),
            AvoidedTransmission::Unattainable { .. } => None,
        }
    }
}

fn within(cost: f64, target: f64) -> bool {
    cost <= target + COST_RTOL * target.abs().max(1.0)
}

/// Bisection over the no-SSSC budget for the cheapest plan at or below
/// `target_cost`.
///
/// The search runs over `[0, max expansion volume]` and stops once the
/// bracket is narrower than 0.1% of that range.
pub fn avoided_transmission(
    net: &Network,
    scenario: &Scenario,
    target_cost: f64,
    used_with_sssc_tw_mile: f64,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<AvoidedTransmission> {
    let base = scenario.without_sssc();
    // budgets too small to serve demand count as infinitely expensive
    let cost_at = |u: Option<f64>| -> Result<f64> {
        match plan(net, &base.with_budget(u), config, backend) {
            Ok(out) => Ok(out.objective()),
            Err(Error::InfeasibleScenario(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let u_max = net.max_expansion_volume() / MW_MILE_PER_TW_MILE;

    let unlimited = cost_at(None)?;
    if !unlimited.is_finite() || !within(unlimited, target_cost) {
        return Ok(AvoidedTransmission::Unattainable {
            best_cost_without_sssc: unlimited,
        });
    }
    let mut probes: Vec<(f64, f64)> = vec![(u_max, unlimited)];
    let zero = cost_at(Some(0.0))?;
    probes.push((0.0, zero));
    let required = if within(zero, target_cost) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, u_max);
        let tol = 1e-3 * u_max;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let c = cost_at(Some(mid))?;
            probes.push((mid, c));
            if within(c, target_cost) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    probes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = probes
        .windows(2)
        .all(|p| p[0].1.is_infinite() || p[1].1 <= p[0].1 + COST_RTOL * p[0].1.abs().max(1.0));
    if !monotone {
        log::warn!("cost is not monotone in the transmission budget for `{}`", scenario.name);
    }
    Ok(AvoidedTransmission::Avoided {
        required_tw_mile: required,
        used_with_sssc_tw_mile,
        avoided_tw_mile: required - used_with_sssc_tw_mile,
        monotone,
    })
}

/// Value of SSSC deployment in one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueReport {
    pub scenario: String,
    pub without_sssc: Option<PlanSummary>,
    pub with_sssc: Option<PlanSummary>,
    /// Sides whose LP was infeasible.
    pub infeasible: Vec<String>,
    pub cost_no_sssc: Option<f64>,
    pub cost_with_sssc: Option<f64>,
    /// `cost_no_sssc - cost_with_sssc`, net of SSSC investment.
    pub cost_saving: Option<f64>,
    pub sssc_invest_cost: Option<f64>,
    /// `(saving + invest) / invest`; `None` without SSSC investment.
    pub benefit_cost_ratio: Option<f64>,
    pub avoided_transmission: Option<AvoidedTransmission>,
    /// Change in fleet AC capacity factor, percentage points.
    pub ac_capacity_factor_delta: Option<f64>,
    pub installed_q_total_gvar: Option<f64>,
    /// `with - without` per cost family.
    pub cost_deltas: Option<CostBreakdown>,
}

/// Both plans behind a [`ValueReport`].
#[derive(Debug, Clone)]
pub struct PairRun {
    pub report: ValueReport,
    pub without_sssc: Option<PlanOutcome>,
    pub with_sssc: Option<PlanOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOptions {
    /// Run the budget bisection for avoided transmission.
    pub avoided_transmission: bool,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            avoided_transmission: true,
        }
    }
}

fn plan_or_infeasible(
    net: &Network,
    sc: &Scenario,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<Option<PlanOutcome>> {
    match plan(net, sc, config, backend) {
        Ok(out) => Ok(Some(out)),
        Err(Error::InfeasibleScenario(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Plans `scenario` with SSSCs forbidden and as given, and compares them.
pub fn run_pair(
    net: &Network,
    scenario: &Scenario,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<ValueReport> {
    Ok(run_pair_detailed(net, scenario, config, backend, PairOptions::default())?.report)
}

pub fn run_pair_detailed(
    net: &Network,
    scenario: &Scenario,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
    opts: PairOptions,
) -> Result<PairRun> {
    let without = plan_or_infeasible(net, &scenario.without_sssc(), config, backend)?;
    let with = plan_or_infeasible(net, scenario, config, backend)?;
    let s_without = without.as_ref().map(|o| PlanSummary::from_outcome(net, o));
    let s_with = with.as_ref().map(|o| PlanSummary::from_outcome(net, o));

    let mut infeasible = Vec::new();
    if s_without.is_none() {
        infeasible.push("without_sssc".to_string());
    }
    if s_with.is_none() {
        infeasible.push("with_sssc".to_string());
    }

    let mut report = ValueReport {
        scenario: scenario.name.clone(),
        cost_no_sssc: s_without.as_ref().map(|s| s.objective),
        cost_with_sssc: s_with.as_ref().map(|s| s.objective),
        sssc_invest_cost: s_with.as_ref().map(|s| s.costs.sssc),
        installed_q_total_gvar: s_with.as_ref().map(PlanSummary::sssc_gvar),
        without_sssc: None,
        with_sssc: None,
        infeasible,
        cost_saving: None,
        benefit_cost_ratio: None,
        avoided_transmission: None,
        ac_capacity_factor_delta: None,
        cost_deltas: None,
    };
    if let (Some(a), Some(b)) = (&s_without, &s_with) {
        let saving = a.objective - b.objective;
        let invest = b.costs.sssc;
        report.cost_saving = Some(saving);
        report.benefit_cost_ratio = (invest > 0.0).then(|| (saving + invest) / invest);
        report.ac_capacity_factor_delta = Some(100.0 * (b.ac_capacity_factor - a.ac_capacity_factor));
        report.cost_deltas = Some(b.costs.minus(&a.costs));
        if opts.avoided_transmission {
            report.avoided_transmission = Some(avoided_transmission(
                net,
                scenario,
                b.objective,
                b.expansion_tw_mile,
                config,
                backend,
            )?);
        }
    }
    report.without_sssc = s_without;
    report.with_sssc = s_with;
    Ok(PairRun {
        report,
        without_sssc: without,
        with_sssc: with,
    })
}

/// Runs [`run_pair`] for many scenarios in parallel; results are ordered by
/// scenario name.
pub fn run_scenarios(
    net: &Network,
    scenarios: &[Scenario],
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Vec<(String, Result<ValueReport>)> {
    let mut out: Vec<(String, Result<ValueReport>)> = scenarios
        .par_iter()
        .map(|sc| (sc.name.clone(), run_pair(net, sc, config, backend)))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// One cap of an SSSC sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcrPoint {
    /// Cap on total SSSC capacity, GVAr (infinite for no cap).
    pub cap_gvar: f64,
    pub cost: f64,
    /// Saving against the no-SSSC plan, net of SSSC investment.
    pub saving: f64,
    pub sssc_invest_cost: f64,
    pub installed_gvar: f64,
    /// `(d saving + d invest) / d invest` against the previous point (the
    /// no-SSSC plan for the first one); `None` when investment did not grow.
    pub interval_bcr: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcrCurve {
    pub scenario: String,
    pub cost_no_sssc: f64,
    pub points: Vec<BcrPoint>,
}

impl BcrCurve {
    /// Gross saving `saving + invest` is non-decreasing along the caps.
    pub fn gross_saving_non_decreasing(&self, rtol: f64) -> bool {
        let scale = self.cost_no_sssc.abs().max(1.0);
        self.points
            .windows(2)
            .all(|p| p[1].saving + p[1].sssc_invest_cost >= p[0].saving + p[0].sssc_invest_cost - rtol * scale)
    }

    /// Interval BCRs (where defined) never increase from one cap to the next.
    pub fn interval_bcr_non_increasing(&self, rtol: f64) -> bool {
        let defined: Vec<f64> = self.points.iter().filter_map(|p| p.interval_bcr).collect();
        defined.windows(2).all(|w| w[1] <= w[0] * (1.0 + rtol) + rtol)
    }
}

/// Investment below this many dollars counts as no change when forming
/// interval ratios.
const MIN_INVEST_STEP: f64 = 1e-6;

/// Plans the scenario once per cap (in parallel) and forms the interval BCR
/// curve.
pub fn sweep_sssc_caps(
    net: &Network,
    scenario: &Scenario,
    caps_gvar: &[f64],
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<BcrCurve> {
    if !scenario.sssc_allowed() {
        return Err(Error::Domain(format!(
            "scenario `{}` forbids SSSCs; nothing to sweep",
            scenario.name
        )));
    }
    if caps_gvar.windows(2).any(|w| !(w[0] <= w[1])) || caps_gvar.iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::Domain("caps must be non-negative and sorted ascending".into()));
    }
    let mut jobs: Vec<Scenario> = vec![scenario.without_sssc()];
    jobs.extend(
        caps_gvar
            .iter()
            .map(|&c| scenario.with_sssc_cap(if c.is_finite() { Some(c) } else { None })),
    );
    let runs: Vec<Result<PlanOutcome>> = jobs.par_iter().map(|sc| plan(net, sc, config, backend)).collect();
    let mut runs = runs.into_iter();
    let base = runs.next().expect("baseline job")?;
    let cost_no = base.objective();

    let mut points: Vec<BcrPoint> = Vec::with_capacity(caps_gvar.len());
    let (mut prev_saving, mut prev_invest) = (0.0, 0.0);
    for (&cap, run) in caps_gvar.iter().zip(runs) {
        let out = run?;
        let invest = out.solution.costs.sssc;
        let saving = cost_no - out.objective();
        let d_invest = invest - prev_invest;
        let interval_bcr = (d_invest > MIN_INVEST_STEP).then(|| (saving - prev_saving + d_invest) / d_invest);
        points.push(BcrPoint {
            cap_gvar: cap,
            cost: out.objective(),
            saving,
            sssc_invest_cost: invest,
            installed_gvar: out.solution.total_sssc_gvar(),
            interval_bcr,
            converged: out.converged,
        });
        prev_saving = saving;
        prev_invest = invest;
    }
    Ok(BcrCurve {
        scenario: scenario.name.clone(),
        cost_no_sssc: cost_no,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::triangle;
    use crate::lp::MicroLp;
    use crate::scenario::SsscPolicy;
    use approx::assert_relative_eq;

    fn allowed(c_sssc: f64) -> Scenario {
        Scenario {
            sssc: SsscPolicy::Allowed {
                c_sssc,
                q_total_cap: None,
            },
            ..Scenario::named("tri")
        }
    }

    #[test]
    fn triangle_saving_matches_dispatch_delta() {
        let net = triangle();
        let rep = run_pair(&net, &allowed(10.0), &ConvergenceConfig::default(), &MicroLp).unwrap();
        // 25 MW shift from 50 to 10 $/MWh all year, minus 25 MVAr at 10 $/kVAr-yr
        let gross = 25.0 * 40.0 * HOURS_PER_YEAR;
        let invest = 25.0 * 1e3 * 10.0;
        assert_relative_eq!(rep.sssc_invest_cost.unwrap(), invest, max_relative = 1e-6);
        assert_relative_eq!(rep.cost_saving.unwrap(), gross - invest, max_relative = 1e-6);
        assert_relative_eq!(rep.benefit_cost_ratio.unwrap(), gross / invest, max_relative = 1e-6);
        assert!(matches!(
            rep.avoided_transmission,
            Some(AvoidedTransmission::Unattainable { .. })
        ));
    }

    #[test]
    fn zero_cap_gives_zero_saving() {
        let net = triangle();
        let sc = allowed(10.0).with_sssc_cap(Some(0.0));
        let rep = run_pair(&net, &sc, &ConvergenceConfig::default(), &MicroLp).unwrap();
        assert!(rep.cost_saving.unwrap().abs() < 1e-6 * rep.cost_no_sssc.unwrap());
        assert_eq!(rep.benefit_cost_ratio, None);
    }

    #[test]
    fn sweep_endpoints() {
        let net = triangle();
        let sc = allowed(10.0);
        let cfg = ConvergenceConfig::default();
        let curve = sweep_sssc_caps(&net, &sc, &[0.0, 0.01, f64::INFINITY], &cfg, &MicroLp).unwrap();
        assert!(curve.points[0].saving.abs() < 1e-6 * curve.cost_no_sssc);
        let pair = run_pair_detailed(&net, &sc, &cfg, &MicroLp, PairOptions { avoided_transmission: false }).unwrap();
        assert_relative_eq!(
            curve.points[2].saving,
            pair.report.cost_saving.unwrap(),
            max_relative = 1e-9
        );
        assert!(curve.interval_bcr_non_increasing(1e-6));
    }
}
