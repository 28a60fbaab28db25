use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::backend::{SolveStatus, SolverBackend};
use crate::lp::build::{PlanningModel, VariableCatalog};
use crate::lp::model::{check_feasibility, Col, FeasibilityReport};

/// Scaled violation every optimal solution must stay under.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Objective split by cost family, $/yr.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub generation_fixed: f64,
    pub generation_variable: f64,
    pub ac_transmission: f64,
    pub dc_transmission: f64,
    pub storage_charge: f64,
    pub storage_discharge: f64,
    pub storage_energy: f64,
    pub sssc: f64,
}

impl CostBreakdown {
    pub const NAMES: [&'static str; 8] = [
        "generation_fixed",
        "generation_variable",
        "ac_transmission",
        "dc_transmission",
        "storage_charge",
        "storage_discharge",
        "storage_energy",
        "sssc",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.generation_fixed,
            self.generation_variable,
            self.ac_transmission,
            self.dc_transmission,
            self.storage_charge,
            self.storage_discharge,
            self.storage_energy,
            self.sssc,
        ]
    }

    pub fn total(&self) -> f64 {
        self.values().iter().sum()
    }

    /// Total without the SSSC investment.
    pub fn base_total(&self) -> f64 {
        self.total() - self.sssc
    }

    /// Componentwise `self - other`.
    pub fn minus(&self, other: &CostBreakdown) -> CostBreakdown {
        let a = self.values();
        let b = other.values();
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        CostBreakdown {
            generation_fixed: d[0],
            generation_variable: d[1],
            ac_transmission: d[2],
            dc_transmission: d[3],
            storage_charge: d[4],
            storage_discharge: d[5],
            storage_energy: d[6],
            sssc: d[7],
        }
    }
}

/// Result of one LP solve, keyed by the model's variable catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub duals: Option<Vec<f64>>,
    pub catalog: VariableCatalog,
    pub costs: CostBreakdown,
    /// Independent check of the primal against every row and bound.
    pub feasibility: Option<FeasibilityReport>,
    /// Fixed SSSC ratings (MVAr) when the model did not optimize them.
    fixed_sssc_mvar: Option<Vec<f64>>,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, c: Col) -> f64 {
        self.primal[c.0]
    }

    fn values(&self, cols: &[Col]) -> Vec<f64> {
        cols.iter().map(|&c| self.value(c)).collect()
    }

    fn series(&self, cols: &[Vec<Col>]) -> Vec<Vec<f64>> {
        cols.iter().map(|v| self.values(v)).collect()
    }

    pub fn gen_capacity(&self) -> Vec<f64> {
        self.values(&self.catalog.gen_cap)
    }

    /// AC capacities `F*` in MW.
    pub fn ac_capacity(&self) -> Vec<f64> {
        self.values(&self.catalog.ac_cap)
    }

    pub fn dc_capacity(&self) -> Vec<f64> {
        self.values(&self.catalog.dc_cap)
    }

    pub fn storage_capacity(&self) -> Vec<(f64, f64, f64)> {
        (0..self.catalog.energy_cap.len())
            .map(|s| {
                (
                    self.value(self.catalog.charge_cap[s]),
                    self.value(self.catalog.discharge_cap[s]),
                    self.value(self.catalog.energy_cap[s]),
                )
            })
            .collect()
    }

    pub fn dispatch(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.dispatch)
    }

    /// AC flows `[l][t]` in MW.
    pub fn ac_flows(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.ac_flow)
    }

    pub fn dc_flows(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.dc_flow)
    }

    /// Losses `[l][t]` in MW; empty in lossless models.
    pub fn losses(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.loss)
    }

    pub fn soc(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.soc)
    }

    pub fn charge(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.charge)
    }

    pub fn discharge(&self) -> Vec<Vec<f64>> {
        self.series(&self.catalog.discharge)
    }

    /// `q_tilde` `[l][t]` in MVAr, zero on lines without an SSSC column.
    pub fn q_tilde(&self) -> Vec<Vec<f64>> {
        let n_t = self.catalog.ac_flow.first().map_or(0, Vec::len);
        self.catalog
            .q_tilde
            .iter()
            .map(|c| c.as_ref().map_or(vec![0.0; n_t], |v| self.values(v)))
            .collect()
    }

    /// Installed SSSC rating per AC line, MVAr.
    pub fn sssc_capacity(&self) -> Vec<f64> {
        if let Some(q) = &self.fixed_sssc_mvar {
            return q.clone();
        }
        self.catalog
            .sssc_cap
            .iter()
            .map(|c| c.map_or(0.0, |c| self.value(c).max(0.0)))
            .collect()
    }

    pub fn total_sssc_gvar(&self) -> f64 {
        self.sssc_capacity().iter().sum::<f64>() / 1e3
    }
}

/// Solves a built model and checks the answer independently.
///
/// Infeasible, unbounded and numerically failed solves come back as a
/// `Solution` with the matching status and no primal values; only failures
/// of the backend itself are errors.
pub fn solve(model: &PlanningModel, backend: &dyn SolverBackend) -> Result<Solution> {
    let res = backend.solve(&model.lp)?;
    let mut sol = Solution {
        status: res.status,
        objective: res.objective,
        primal: res.primal,
        duals: res.duals,
        catalog: model.catalog.clone(),
        costs: CostBreakdown::default(),
        feasibility: None,
        fixed_sssc_mvar: model.fixed_sssc_mvar.clone(),
    };
    if sol.status != SolveStatus::Optimal {
        return Ok(sol);
    }
    if sol.primal.len() != model.lp.n_cols() {
        return Err(Error::Backend(format!(
            "backend returned {} values for {} columns",
            sol.primal.len(),
            model.lp.n_cols()
        )));
    }
    sol.costs = decompose(model, &sol.primal);
    sol.objective = model.lp.objective_value(&sol.primal);
    sol.feasibility = Some(check_feasibility(&model.lp, &sol.primal, FEASIBILITY_TOL));
    Ok(sol)
}

fn decompose(model: &PlanningModel, x: &[f64]) -> CostBreakdown {
    let lp = &model.lp;
    let cat = &model.catalog;
    let sum = |cols: &mut dyn Iterator<Item = &Col>| -> f64 { cols.map(|c| lp.columns[c.0].cost * x[c.0]).sum() };
    CostBreakdown {
        generation_fixed: sum(&mut cat.gen_cap.iter()),
        generation_variable: sum(&mut cat.dispatch.iter().flatten()),
        ac_transmission: sum(&mut cat.ac_cap.iter()),
        dc_transmission: sum(&mut cat.dc_cap.iter()),
        storage_charge: sum(&mut cat.charge_cap.iter()),
        storage_discharge: sum(&mut cat.discharge_cap.iter()),
        storage_energy: sum(&mut cat.energy_cap.iter()),
        sssc: sum(&mut cat.sssc_cap.iter().flatten()) + lp.objective_offset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::single_bus;
    use crate::lp::backend::MicroLp;
    use crate::lp::build::{build_lp, BuildOptions, Linearization};
    use crate::scenario::Scenario;
    use approx::assert_relative_eq;

    fn model(net: &crate::network::Network, eps: f64) -> PlanningModel {
        let sc = Scenario {
            eps_reserve: eps,
            ..Scenario::named("one-bus")
        };
        let lin = Linearization::initial(net, 3).unwrap();
        build_lp(net, &sc, &lin, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn reserve_margin_sets_capacity() {
        let net = single_bus(100.0, 10.0);
        let sol = solve(&model(&net, 0.1), &MicroLp).unwrap();
        assert!(sol.is_optimal());
        assert_relative_eq!(sol.gen_capacity()[0], 110.0, max_relative = 1e-9);
        assert_relative_eq!(sol.objective, 1100.0, max_relative = 1e-9);
        assert_relative_eq!(sol.costs.total(), sol.objective, max_relative = 1e-12);
        assert!(sol.feasibility.as_ref().unwrap().passes());
    }

    #[test]
    fn demand_above_ceiling_is_infeasible() {
        let mut net = single_bus(100.0, 10.0);
        net.generators[0].p_max = Some(50.0);
        net.validate().unwrap();
        let sol = solve(&model(&net, 0.0), &MicroLp).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn negative_fixed_cost_is_unbounded() {
        let net = single_bus(100.0, -10.0);
        let sol = solve(&model(&net, 0.0), &MicroLp).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }
}
