//! Pluggable LP solver backends.

use crate::error::{Error, Result};
use crate::lp::model::{PlanningLP, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The backend stopped without a usable answer (numerical trouble,
    /// iteration limits).
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: SolveStatus,
    /// Column values; empty unless `status` is optimal.
    pub primal: Vec<f64>,
    pub objective: f64,
    /// Row duals when the backend provides them.
    pub duals: Option<Vec<f64>>,
}

impl LpResult {
    pub fn without_solution(status: SolveStatus) -> Self {
        LpResult {
            status,
            primal: Vec::new(),
            objective: f64::NAN,
            duals: None,
        }
    }
}

/// A linear programming solver.
///
/// Implementations must be usable from several scenario workers at once;
/// each call to `solve` is independent.
pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Solves `lp`. Infeasible and unbounded models are reported through
    /// [`SolveStatus`]; `Err` is reserved for failures of the solver itself.
    fn solve(&self, lp: &PlanningLP) -> Result<LpResult>;
}

/// Pure-Rust simplex backend built on `microlp`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MicroLp;

impl SolverBackend for MicroLp {
    fn name(&self) -> &'static str {
        "microlp"
    }

    fn solve(&self, lp: &PlanningLP) -> Result<LpResult> {
        use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

        if !lp.is_well_formed() {
            return Err(Error::Backend("malformed LP".into()));
        }
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = lp
            .columns
            .iter()
            .map(|c| problem.add_var(c.cost, (c.lower, c.upper)))
            .collect();
        for r in &lp.rows {
            let op = match r.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(r.terms.iter().map(|&(c, a)| (vars[c.0], a)), op, r.rhs);
        }
        match problem.solve() {
            Ok(SolveOutcome::Solution(sol)) => {
                let primal: Vec<f64> = vars.iter().map(|&v| sol.var_value_raw(v)).collect();
                Ok(LpResult {
                    status: SolveStatus::Optimal,
                    objective: lp.objective_value(&primal),
                    primal,
                    duals: None,
                })
            }
            Ok(SolveOutcome::Interrupted(_)) => Ok(LpResult::without_solution(SolveStatus::Numerical)),
            Err(microlp::Error::Infeasible) => Ok(LpResult::without_solution(SolveStatus::Infeasible)),
            Err(microlp::Error::Unbounded) => Ok(LpResult::without_solution(SolveStatus::Unbounded)),
            Err(microlp::Error::InternalError(msg)) => {
                log::warn!("microlp internal error: {msg}");
                Ok(LpResult::without_solution(SolveStatus::Numerical))
            }
            Err(e) => Err(Error::Backend(e.to_string())),
        }
    }
}

#[cfg(feature = "highs")]
pub use self::highs_backend::Highs;

#[cfg(feature = "highs")]
mod highs_backend {
    use std::ffi::CString;
    use std::os::raw::c_void;

    use highs_sys::*;

    use super::{LpResult, SolveStatus, SolverBackend};
    use crate::error::{Error, Result};
    use crate::lp::model::{PlanningLP, Sense};

    /// HiGHS dual simplex / IPM through the C API.
    #[derive(Debug, Clone, Copy, Default)]
    pub struct Highs;

    struct Handle(*mut c_void);

    impl Drop for Handle {
        fn drop(&mut self) {
            unsafe { Highs_destroy(self.0) }
        }
    }

    fn set_bool(h: &Handle, name: &str, value: bool) {
        let opt = CString::new(name).expect("option name");
        unsafe {
            Highs_setBoolOptionValue(h.0, opt.as_ptr(), value as HighsInt);
        }
    }

    fn set_string(h: &Handle, name: &str, value: &str) {
        let opt = CString::new(name).expect("option name");
        let val = CString::new(value).expect("option value");
        unsafe {
            Highs_setStringOptionValue(h.0, opt.as_ptr(), val.as_ptr());
        }
    }

    impl Highs {
        fn run(&self, lp: &PlanningLP, presolve: bool) -> Result<(HighsInt, Handle)> {
            let n = lp.n_cols();
            let m = lp.n_rows();
            let cost: Vec<f64> = lp.columns.iter().map(|c| c.cost).collect();
            let lower: Vec<f64> = lp.columns.iter().map(|c| c.lower).collect();
            let upper: Vec<f64> = lp.columns.iter().map(|c| c.upper).collect();
            let mut row_lo = Vec::with_capacity(m);
            let mut row_hi = Vec::with_capacity(m);
            let mut start = Vec::with_capacity(m + 1);
            let mut index = Vec::new();
            let mut value = Vec::new();
            for r in &lp.rows {
                let (lo, hi) = match r.sense {
                    Sense::Le => (f64::NEG_INFINITY, r.rhs),
                    Sense::Ge => (r.rhs, f64::INFINITY),
                    Sense::Eq => (r.rhs, r.rhs),
                };
                row_lo.push(lo);
                row_hi.push(hi);
                start.push(index.len() as HighsInt);
                for &(c, a) in &r.terms {
                    index.push(c.0 as HighsInt);
                    value.push(a);
                }
            }
            start.push(index.len() as HighsInt);

            let h = Handle(unsafe { Highs_create() });
            set_bool(&h, "output_flag", false);
            if !presolve {
                set_string(&h, "presolve", "off");
            }
            let status = unsafe {
                Highs_passLp(
                    h.0,
                    n as HighsInt,
                    m as HighsInt,
                    index.len() as HighsInt,
                    kHighsMatrixFormatRowwise,
                    kHighsObjSenseMinimize,
                    lp.objective_offset,
                    cost.as_ptr(),
                    lower.as_ptr(),
                    upper.as_ptr(),
                    row_lo.as_ptr(),
                    row_hi.as_ptr(),
                    start.as_ptr(),
                    index.as_ptr(),
                    value.as_ptr(),
                )
            };
            if status == kHighsStatusError {
                return Err(Error::Backend("HiGHS rejected the model".into()));
            }
            if unsafe { Highs_run(h.0) } == kHighsStatusError {
                return Err(Error::Backend("HiGHS run failed".into()));
            }
            Ok((unsafe { Highs_getModelStatus(h.0) }, h))
        }
    }

    impl SolverBackend for Highs {
        fn name(&self) -> &'static str {
            "highs"
        }

        fn solve(&self, lp: &PlanningLP) -> Result<LpResult> {
            if !lp.is_well_formed() {
                return Err(Error::Backend("malformed LP".into()));
            }
            let (mut status, mut h) = self.run(lp, true)?;
            if status == MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE {
                (status, h) = self.run(lp, false)?;
            }
            match status {
                MODEL_STATUS_OPTIMAL | MODEL_STATUS_MODEL_EMPTY => {
                    let mut primal = vec![0.0; lp.n_cols()];
                    let mut col_dual = vec![0.0; lp.n_cols()];
                    let mut row_value = vec![0.0; lp.n_rows()];
                    let mut row_dual = vec![0.0; lp.n_rows()];
                    unsafe {
                        Highs_getSolution(
                            h.0,
                            primal.as_mut_ptr(),
                            col_dual.as_mut_ptr(),
                            row_value.as_mut_ptr(),
                            row_dual.as_mut_ptr(),
                        );
                    }
                    Ok(LpResult {
                        status: SolveStatus::Optimal,
                        objective: lp.objective_value(&primal),
                        primal,
                        duals: Some(row_dual),
                    })
                }
                MODEL_STATUS_INFEASIBLE => Ok(LpResult::without_solution(SolveStatus::Infeasible)),
                MODEL_STATUS_UNBOUNDED | MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE => {
                    Ok(LpResult::without_solution(SolveStatus::Unbounded))
                }
                MODEL_STATUS_LOAD_ERROR | MODEL_STATUS_MODEL_ERROR => {
                    Err(Error::Backend(format!("HiGHS model status {status}")))
                }
                _ => Ok(LpResult::without_solution(SolveStatus::Numerical)),
            }
        }
    }
}

/// Looks up a backend by name (`microlp`, or `highs` when compiled in).
pub fn backend_by_name(name: &str) -> Result<Box<dyn SolverBackend>> {
    match name {
        "microlp" | "default" => Ok(Box::new(MicroLp)),
        #[cfg(feature = "highs")]
        "highs" => Ok(Box::new(Highs)),
        other => Err(Error::Backend(format!("unknown backend `{other}`"))),
    }
}

pub fn available_backends() -> Vec<&'static str> {
    let mut names = vec!["microlp"];
    if cfg!(feature = "highs") {
        names.push("highs");
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::model::Family;

    #[test]
    fn tiny_lp_statuses() {
        let mut lp = PlanningLP::new();
        let x = lp.add_col("x", 0.0, 10.0, 1.0);
        let y = lp.add_col("y", 0.0, f64::INFINITY, 2.0);
        lp.add_row(Family::Aux, "demand", [(x, 1.0), (y, 1.0)], Sense::Ge, 12.0);
        let res = MicroLp.solve(&lp).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective - 14.0).abs() < 1e-9);

        let mut bad = lp.clone();
        bad.add_row(Family::Aux, "cap", [(y, 1.0)], Sense::Le, 1.0);
        assert_eq!(MicroLp.solve(&bad).unwrap().status, SolveStatus::Infeasible);

        let mut unb = PlanningLP::new();
        unb.add_col("z", 0.0, f64::INFINITY, -1.0);
        assert_eq!(MicroLp.solve(&unb).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn unknown_backend_is_an_error() {
        assert!(backend_by_name("cplex").is_err());
        assert_eq!(backend_by_name("microlp").unwrap().name(), "microlp");
    }
}
