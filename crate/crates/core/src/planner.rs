//! Capacity iteration that resolves the dependence of line impedance on
//! line capacity.
//!
//! Each round linearizes the LP at the current AC capacities (impedances
//! scaled by `F0 / F`, loss envelopes refitted, SSSC terms divided by `F`),
//! solves it, and moves the linearization point to the new optimum. The loop
//! stops once two consecutive optima differ by at most `eps * |F0|`.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::DEFAULT_SEGMENTS;
use crate::lp::{
    build_lp, solve, BuildOptions, FlowFormulation, Linearization, PlanningModel, Solution, SolveStatus,
    SolverBackend, SsscMode,
};
use crate::network::{AcLine, Network};
use crate::scenario::Scenario;

/// Impedance of `line` rebuilt at capacity `f_new` MW: `(r_pu, x_pu)`.
pub fn update_impedance(line: &AcLine, f_new: f64) -> Result<(f64, f64)> {
    if !(f_new > 0.0) {
        return Err(Error::Domain(format!(
            "capacity of `{}` must be positive, got {f_new}",
            line.id
        )));
    }
    let ratio = line.f0 / f_new;
    Ok((line.r0_pu * ratio, line.x0_pu * ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    L2,
    Linf,
}

impl Norm {
    pub fn of(self, v: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Norm::L2 => v.into_iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.into_iter().map(f64::abs).fold(0.0, f64::max),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.of(a.iter().zip(b).map(|(x, y)| x - y))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    /// Relative tolerance on consecutive capacity optima.
    pub eps: f64,
    pub max_iterations: usize,
    pub norm: Norm,
    /// Step length `lambda` in `F_fix <- lambda F* + (1 - lambda) F_fix`.
    pub damping: f64,
    pub loss_segments: usize,
    /// Drop line losses from the model.
    pub lossless: bool,
    pub formulation: FlowFormulation,
    /// Re-solve once at the converged capacities to confirm consistency.
    pub verify: bool,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            eps: 1e-3,
            max_iterations: 25,
            norm: Norm::L2,
            damping: 1.0,
            loss_segments: DEFAULT_SEGMENTS,
            lossless: false,
            formulation: FlowFormulation::CycleKvl,
            verify: true,
        }
    }
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::Domain(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Domain(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        if self.loss_segments == 0 {
            return Err(Error::Domain("at least one loss segment is required".into()));
        }
        Ok(())
    }
}

/// One round of the capacity iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub n: usize,
    pub f_fix: Vec<f64>,
    pub f_star: Vec<f64>,
    pub objective: f64,
    /// `|F*_n - F*_{n-1}|`, with `F*_0 = F0`.
    pub delta: f64,
    /// `|F*_n - F_fix_n|`: how far the optimum lies from its own
    /// linearization point.
    pub self_gap: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IterationState {
    pub f0: Vec<f64>,
    /// `eps * |F0|`, the stopping threshold in MW.
    pub threshold: f64,
    pub history: Vec<IterationRecord>,
}

impl IterationState {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.history.last()
    }

    /// Writes `n, norm_delta, objective, wall_seconds`. Timings are left
    /// blank unless requested so that repeated runs produce identical files.
    pub fn write_csv<W: Write>(&self, w: W, with_timings: bool) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Backend(format!("writing iteration trace: {e}"));
        wr.write_record(["n", "norm_delta", "objective", "wall_seconds"]).map_err(io)?;
        for r in &self.history {
            let secs = if with_timings { format!("{:.6}", r.wall_seconds) } else { String::new() };
            wr.write_record([r.n.to_string(), fmt_f(r.delta), fmt_f(r.objective), secs])
                .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Backend(format!("writing iteration trace: {e}")))?;
        Ok(())
    }
}

pub(crate) fn fmt_f(v: f64) -> String {
    let s = format!("{v:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Outcome of a generic capacity iteration, see [`run_fixed_point`].
#[derive(Debug, Clone)]
pub struct FixedPointRun<T> {
    pub state: IterationState,
    pub converged: bool,
    /// Iteration (1-based) whose payload is returned.
    pub selected: usize,
    pub payload: T,
}

/// Drives the damped fixed-point loop for any capacity response map.
///
/// `step` receives the linearization point and returns the optimal
/// capacities, the objective and a payload. On convergence the last payload
/// is returned. Otherwise the payload of the cheapest iterate whose optimum
/// matched its own linearization point is returned, or the last one if no
/// iterate did.
pub fn run_fixed_point<T>(
    f0: &[f64],
    config: &ConvergenceConfig,
    mut step: impl FnMut(usize, &[f64]) -> Result<(Vec<f64>, f64, T)>,
) -> Result<FixedPointRun<T>> {
    config.validate()?;
    let threshold = config.eps * config.norm.of(f0.iter().copied());
    let mut state = IterationState {
        f0: f0.to_vec(),
        threshold,
        history: Vec::new(),
    };
    let mut f_fix = f0.to_vec();
    let mut prev_star = f0.to_vec();
    let mut best: Option<(usize, f64, T)> = None;
    let mut last: Option<(usize, T)> = None;

    for n in 1..=config.max_iterations {
        let start = Instant::now();
        let (f_star, objective, payload) = step(n, &f_fix)?;
        let delta = config.norm.distance(&f_star, &prev_star);
        let self_gap = config.norm.distance(&f_star, &f_fix);
        state.history.push(IterationRecord {
            n,
            f_fix: f_fix.clone(),
            f_star: f_star.clone(),
            objective,
            delta,
            self_gap,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        log::debug!("iteration {n}: delta {delta:.3e}, objective {objective:.6e}");
        if delta <= threshold {
            return Ok(FixedPointRun {
                state,
                converged: true,
                selected: n,
                payload,
            });
        }
        let next: Vec<f64> = f_star
            .iter()
            .zip(&f_fix)
            .map(|(s, x)| config.damping * s + (1.0 - config.damping) * x)
            .collect();
        if self_gap <= threshold && best.as_ref().map_or(true, |b| objective < b.1) {
            best = Some((n, objective, payload));
        } else {
            last = Some((n, payload));
        }
        f_fix = next;
        prev_star = f_star;
    }

    let (selected, payload) = match (best, last) {
        (Some((n, _, p)), _) => (n, p),
        (None, Some(l)) => l,
        (None, None) => unreachable!("at least one iteration runs"),
    };
    log::warn!(
        "capacity iteration stopped after {} rounds without converging",
        config.max_iterations
    );
    Ok(FixedPointRun {
        state,
        converged: false,
        selected,
        payload,
    })
}

/// Result of the post-convergence re-solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfCheck {
    /// `|F*(F*) - F*|` in MW.
    pub delta: f64,
    pub threshold: f64,
    pub passes: bool,
}

/// A finished plan.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub solution: Solution,
    pub model: PlanningModel,
    pub state: IterationState,
    pub converged: bool,
    /// Iteration the solution comes from.
    pub selected_iteration: usize,
    pub self_check: Option<SelfCheck>,
}

impl PlanOutcome {
    /// Turns a non-converged outcome into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<PlanOutcome> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.state.iterations(),
                last_delta: self.state.last().map_or(f64::NAN, |r| r.delta),
            })
        }
    }

    pub fn objective(&self) -> f64 {
        self.solution.objective
    }
}

/// Solves one LP linearized at `f_fix` and insists on an optimum.
pub fn solve_at(
    net: &Network,
    scenario: &Scenario,
    mode: &SsscMode,
    f_fix: &[f64],
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<(PlanningModel, Solution)> {
    let mut lin = Linearization::at(net, f_fix, config.loss_segments)?;
    if config.lossless {
        lin = lin.lossless();
    }
    let opts = BuildOptions {
        sssc: mode.clone(),
        formulation: config.formulation,
    };
    let model = build_lp(net, scenario, &lin, &opts)?;
    let sol = solve(&model, backend)?;
    match sol.status {
        SolveStatus::Optimal => Ok((model, sol)),
        SolveStatus::Infeasible => Err(Error::InfeasibleScenario(scenario.name.clone())),
        SolveStatus::Unbounded => Err(Error::Unbounded(scenario.name.clone())),
        SolveStatus::Numerical => Err(Error::Backend(format!(
            "{} could not solve scenario `{}`",
            backend.name(),
            scenario.name
        ))),
    }
}

/// Plans `scenario` with the SSSC treatment its policy implies.
pub fn plan(
    net: &Network,
    scenario: &Scenario,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<PlanOutcome> {
    plan_with_mode(net, scenario, &SsscMode::from_scenario(scenario), config, backend)
}

/// Runs the capacity iteration with an explicit SSSC mode.
pub fn plan_with_mode(
    net: &Network,
    scenario: &Scenario,
    mode: &SsscMode,
    config: &ConvergenceConfig,
    backend: &dyn SolverBackend,
) -> Result<PlanOutcome> {
    let f0 = net.ac_initial_capacity();
    let run = run_fixed_point(&f0, config, |_, f_fix| {
        let (model, sol) = solve_at(net, scenario, mode, f_fix, config, backend)?;
        Ok((sol.ac_capacity(), sol.objective, (model, sol)))
    })?;
    let (model, solution) = run.payload;

    let self_check = if config.verify && run.converged {
        let f_star = solution.ac_capacity();
        let (_, again) = solve_at(net, scenario, mode, &f_star, config, backend)?;
        let delta = config.norm.distance(&again.ac_capacity(), &f_star);
        Some(SelfCheck {
            delta,
            threshold: run.state.threshold,
            passes: delta <= run.state.threshold,
        })
    } else {
        None
    };

    Ok(PlanOutcome {
        solution,
        model,
        state: run.state,
        converged: run.converged,
        selected_iteration: run.selected,
        self_check,
    })
}
