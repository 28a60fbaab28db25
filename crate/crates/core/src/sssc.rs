//! Series compensation (SSSC) model.
//!
//! An SSSC on line `l` injects reactive power `q` in series with the line,
//! changing its effective reactance to `x_hat - q / f^2`. The LP never sees
//! `q` directly; it works with the control `q_tilde = q F / f`, which enters
//! the cycle equations linearly as `-q_tilde / F` and is bounded by the
//! installed rating, `|q_tilde| <= Q`.

use crate::cycles::CycleBasis;
use crate::error::{Error, Result};
use crate::lp::{Family, PlanningLP, Sense, SolveStatus, SolverBackend};
use crate::network::Network;

/// Flows below this magnitude (pu) are treated as zero when recovering
/// physical quantities.
pub const ZERO_FLOW_PU: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsscRating {
    pub line: usize,
    /// Three-phase reactive capacity in pu on the line's base.
    pub q_pu: f64,
    pub base_mva: f64,
    /// Annualized cost, $/kVAr-yr.
    pub cost_per_kvar_yr: f64,
}

impl SsscRating {
    pub fn new(line: usize, q_pu: f64, base_mva: f64, cost_per_kvar_yr: f64) -> Result<Self> {
        if !(q_pu >= 0.0) {
            return Err(Error::Domain(format!("SSSC rating must be >= 0, got {q_pu}")));
        }
        Ok(SsscRating {
            line,
            q_pu,
            base_mva,
            cost_per_kvar_yr,
        })
    }

    pub fn q_mvar(&self) -> f64 {
        self.q_pu * self.base_mva
    }

    /// Annualized investment, $/yr.
    pub fn annual_cost(&self) -> f64 {
        self.q_mvar() * 1e3 * self.cost_per_kvar_yr
    }

    /// Largest series voltage the device can inject on a line rated
    /// `f_cap_pu`, assuming 1 pu voltage so that current equals flow.
    pub fn max_injected_voltage_pu(&self, f_cap_pu: f64) -> f64 {
        self.q_pu / (3f64.sqrt() * f_cap_pu)
    }
}

/// Symmetric per-snapshot bounds on `q_tilde` for a fixed rating.
pub fn q_tilde_bounds(rating: &SsscRating) -> (f64, f64) {
    (-rating.q_pu, rating.q_pu)
}

/// Physical state of an SSSC recovered from an LP solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsscOperatingPoint {
    pub q_tilde_pu: f64,
    pub q_pu: f64,
    /// `None` at zero flow, where the compensating reactance is undefined.
    pub x_sssc_pu: Option<f64>,
    pub effective_x_pu: Option<f64>,
}

/// Maps the LP control back to injected reactive power and reactance.
pub fn recover_physical(q_tilde: f64, f: f64, f_cap: f64, x_hat: f64) -> SsscOperatingPoint {
    debug_assert!(f_cap > 0.0);
    if f.abs() <= ZERO_FLOW_PU {
        return SsscOperatingPoint {
            q_tilde_pu: q_tilde,
            q_pu: 0.0,
            x_sssc_pu: None,
            effective_x_pu: None,
        };
    }
    let q = q_tilde * f / f_cap;
    let x_sssc = q / (f * f);
    SsscOperatingPoint {
        q_tilde_pu: q_tilde,
        q_pu: q,
        x_sssc_pu: Some(x_sssc),
        effective_x_pu: Some(x_hat - x_sssc),
    }
}

/// One cycle equation `sum flow_terms * f + sum q_terms * q_tilde = 0` in pu.
#[derive(Debug, Clone, PartialEq)]
pub struct KvlTemplate {
    pub cycle: usize,
    /// `(line, C * x_hat)`.
    pub flow_terms: Vec<(usize, f64)>,
    /// `(line, -C / F)`, only for lines that carry an SSSC.
    pub q_terms: Vec<(usize, f64)>,
}

/// Builds the SSSC-aware cycle equations.
///
/// `x_hat` and `f_cap` are per line, in pu; `has_sssc[l]` selects the lines
/// that get a `q_tilde` term.
pub fn sssc_kvl_terms(basis: &CycleBasis, x_hat: &[f64], f_cap: &[f64], has_sssc: &[bool]) -> Vec<KvlTemplate> {
    basis
        .cycles
        .iter()
        .enumerate()
        .map(|(c, cycle)| {
            let mut flow_terms = Vec::with_capacity(cycle.edges.len());
            let mut q_terms = Vec::new();
            for e in &cycle.edges {
                let sign = e.sign as f64;
                flow_terms.push((e.line, sign * x_hat[e.line]));
                if has_sssc[e.line] {
                    q_terms.push((e.line, -sign / f_cap[e.line]));
                }
            }
            KvlTemplate {
                cycle: c,
                flow_terms,
                q_terms,
            }
        })
        .collect()
}

/// Result of [`max_transfer_with_sssc`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub p_max_pu: f64,
    /// Line flows at the optimum, pu.
    pub flows_pu: Vec<f64>,
    /// `q_tilde` per line at the optimum, pu (zero where no SSSC).
    pub q_tilde_pu: Vec<f64>,
}

/// Largest lossless transfer from `source` to `sink` under thermal limits
/// `F0` and cycle equations with SSSC ratings `q_pu` (pu, per line).
///
/// `cap_pu` optionally bounds the transfer, e.g. by the sink's load.
pub fn max_transfer_with_sssc(
    net: &Network,
    source: &str,
    sink: &str,
    q_pu: &[f64],
    cap_pu: Option<f64>,
    backend: &dyn SolverBackend,
) -> Result<TransferResult> {
    let n_l = net.ac_lines.len();
    if q_pu.len() != n_l {
        return Err(Error::Domain(format!("expected {n_l} SSSC ratings, got {}", q_pu.len())));
    }
    let s = net
        .bus_index(source)
        .ok_or_else(|| Error::Domain(format!("unknown bus `{source}`")))?;
    let d = net
        .bus_index(sink)
        .ok_or_else(|| Error::Domain(format!("unknown bus `{sink}`")))?;
    if net.component_of_bus(s) != net.component_of_bus(d) {
        return Err(Error::Domain("source and sink are in different AC components".into()));
    }
    let f_cap: Vec<f64> = net.ac_lines.iter().map(|l| l.f0 / l.base_mva).collect();
    let x_hat: Vec<f64> = net.ac_lines.iter().map(|l| l.x0_pu).collect();
    let has_sssc: Vec<bool> = q_pu.iter().map(|&q| q > 0.0).collect();

    let mut lp = PlanningLP::new();
    let p = lp.add_col("P", 0.0, cap_pu.unwrap_or(f64::INFINITY), -1.0);
    let f: Vec<_> = (0..n_l)
        .map(|l| lp.add_col(format!("f[{}]", net.ac_lines[l].id), -f_cap[l], f_cap[l], 0.0))
        .collect();
    let q: Vec<_> = (0..n_l)
        .map(|l| {
            has_sssc[l].then(|| lp.add_col(format!("qt[{}]", net.ac_lines[l].id), -q_pu[l], q_pu[l], 0.0))
        })
        .collect();
    for (b, bus) in net.buses.iter().enumerate() {
        let mut terms = Vec::new();
        for l in 0..n_l {
            let (from, to) = net.ac_ends(l);
            if from == b {
                terms.push((f[l], -1.0));
            }
            if to == b {
                terms.push((f[l], 1.0));
            }
        }
        if b == s {
            terms.push((p, 1.0));
        }
        if b == d {
            terms.push((p, -1.0));
        }
        lp.add_row(Family::Balance, &bus.id, terms, Sense::Eq, 0.0);
    }
    let basis = crate::cycles::build_cycle_basis(net);
    for tpl in sssc_kvl_terms(&basis, &x_hat, &f_cap, &has_sssc) {
        let terms = tpl
            .flow_terms
            .iter()
            .map(|&(l, a)| (f[l], a))
            .chain(tpl.q_terms.iter().map(|&(l, a)| (q[l].expect("sssc column"), a)));
        lp.add_row(Family::Kvl, format!("c{}", tpl.cycle), terms, Sense::Eq, 0.0);
    }

    let res = backend.solve(&lp)?;
    match res.status {
        SolveStatus::Optimal => Ok(TransferResult {
            p_max_pu: res.primal[p.0],
            flows_pu: f.iter().map(|c| res.primal[c.0]).collect(),
            q_tilde_pu: q.iter().map(|c| c.map_or(0.0, |c| res.primal[c.0])).collect(),
        }),
        SolveStatus::Infeasible => Err(Error::InfeasibleBase),
        other => Err(Error::Backend(format!("transfer LP ended with status {other:?}"))),
    }
}
