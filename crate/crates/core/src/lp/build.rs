//! Assembly of the planning LP for one linearization point.
//!
//! Units: capacities, dispatch, flows and losses are MW columns; storage
//! energy is MWh; SSSC ratings and `q_tilde` are MVAr. Cycle rows are written
//! in radians, so a flow column enters with `C * x_hat / base_mva`.

use crate::cycles::{build_cycle_basis, CycleBasis};
use crate::error::{Error, Result};
use crate::losses::{fit_segments, LossEnvelope};
use crate::lp::model::{Col, Family, PlanningLP, Sense};
use crate::network::Network;
use crate::planner::update_impedance;
use crate::scenario::{ShareKind, SsscPolicy, Scenario, MVAR_PER_GVAR};
use crate::sssc::sssc_kvl_terms;

/// How Kirchhoff's voltage law is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowFormulation {
    /// One row per basis cycle and snapshot.
    #[default]
    CycleKvl,
    /// Bus angle columns and one row per line and snapshot.
    AngleBased,
}

/// SSSC treatment in a single LP.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SsscMode {
    #[default]
    Off,
    /// Ratings are decision variables priced by the scenario.
    Invest,
    /// As `Invest`, with total installed capacity at most this many GVAr.
    Capped(f64),
    /// Ratings given per AC line in pu of the line base; lines without
    /// `sssc_allowed` must be zero.
    Fixed(Vec<f64>),
}

impl SsscMode {
    /// Mode implied by a scenario's SSSC policy.
    pub fn from_scenario(sc: &Scenario) -> SsscMode {
        match sc.sssc {
            SsscPolicy::Forbidden => SsscMode::Off,
            SsscPolicy::Allowed { q_total_cap: None, .. } => SsscMode::Invest,
            SsscPolicy::Allowed {
                q_total_cap: Some(cap), ..
            } => SsscMode::Capped(cap),
        }
    }
}

/// Parameters held fixed while the LP is solved.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    /// Capacity each AC line is linearized at, MW.
    pub f_fix: Vec<f64>,
    /// Series reactance at `f_fix`, pu.
    pub x_hat: Vec<f64>,
    /// Loss envelopes in pu, fitted on `[-f_fix, f_fix]`; `None` drops the
    /// loss variables altogether.
    pub envelopes: Option<Vec<LossEnvelope>>,
}

impl Linearization {
    /// Impedances and loss envelopes consistent with AC capacities `f_fix`.
    pub fn at(net: &Network, f_fix: &[f64], segments: usize) -> Result<Self> {
        if f_fix.len() != net.ac_lines.len() {
            return Err(Error::ModelBuild(format!(
                "linearization has {} capacities for {} AC lines",
                f_fix.len(),
                net.ac_lines.len()
            )));
        }
        let mut x_hat = Vec::with_capacity(f_fix.len());
        let mut envelopes = Vec::with_capacity(f_fix.len());
        for (line, &f) in net.ac_lines.iter().zip(f_fix) {
            let (r, x) = update_impedance(line, f)?;
            x_hat.push(x);
            envelopes.push(fit_segments(r, f / line.base_mva, segments, None)?);
        }
        Ok(Linearization {
            f_fix: f_fix.to_vec(),
            x_hat,
            envelopes: Some(envelopes),
        })
    }

    /// Linearization at the existing fleet.
    pub fn initial(net: &Network, segments: usize) -> Result<Self> {
        Self::at(net, &net.ac_initial_capacity(), segments)
    }

    pub fn lossless(mut self) -> Self {
        self.envelopes = None;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildOptions {
    pub sssc: SsscMode,
    pub formulation: FlowFormulation,
}

/// Column handles of every decision variable. Per-snapshot families are
/// indexed `[entity][t]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariableCatalog {
    pub gen_cap: Vec<Col>,
    pub ac_cap: Vec<Col>,
    pub dc_cap: Vec<Col>,
    pub charge_cap: Vec<Col>,
    pub discharge_cap: Vec<Col>,
    pub energy_cap: Vec<Col>,
    pub dispatch: Vec<Vec<Col>>,
    pub charge: Vec<Vec<Col>>,
    pub discharge: Vec<Vec<Col>>,
    pub soc: Vec<Vec<Col>>,
    /// State of charge before the first snapshot of each period, `[s][k]`.
    pub soc_start: Vec<Vec<Col>>,
    pub ac_flow: Vec<Vec<Col>>,
    pub dc_flow: Vec<Vec<Col>>,
    /// Empty when losses are off.
    pub loss: Vec<Vec<Col>>,
    pub reserve_storage: Vec<Vec<Col>>,
    pub reserve_ac: Vec<Vec<Col>>,
    pub reserve_dc: Vec<Vec<Col>>,
    /// `q_tilde` per line, present only on lines that may carry an SSSC.
    pub q_tilde: Vec<Option<Vec<Col>>>,
    /// SSSC rating column (MVAr) in invest/capped mode.
    pub sssc_cap: Vec<Option<Col>>,
    /// Bus angles `[t][b]` in the angle-based formulation.
    pub theta: Vec<Vec<Col>>,
}

/// A built LP together with what is needed to read its solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningModel {
    pub lp: PlanningLP,
    pub catalog: VariableCatalog,
    pub linearization: Linearization,
    pub n_cycles: usize,
    /// SSSC cost per MVAr-yr used in the objective.
    pub sssc_cost_per_mvar: f64,
    /// Fixed SSSC ratings in MVAr, when the mode fixes them.
    pub fixed_sssc_mvar: Option<Vec<f64>>,
}

/// Builds the planning LP for `scenario` with AC parameters frozen at `lin`.
pub fn build_lp(net: &Network, scenario: &Scenario, lin: &Linearization, opts: &BuildOptions) -> Result<PlanningModel> {
    let n_b = net.buses.len();
    let n_l = net.ac_lines.len();
    let n_i = net.dc_links.len();
    let n_g = net.generators.len();
    let n_t = net.n_snapshots();
    let w = net.time.weights();

    check_dimensions(net, lin, &opts.sssc)?;
    scenario.validate()?;
    scenario.check_against(net)?;
    let sssc_cost = scenario.sssc_cost_per_mvar();
    if matches!(opts.sssc, SsscMode::Invest | SsscMode::Capped(_)) && !scenario.sssc_allowed() {
        return Err(Error::ModelBuild(format!(
            "scenario `{}` forbids SSSC investment",
            scenario.name
        )));
    }

    let mut lp = PlanningLP::new();
    let mut cat = VariableCatalog::default();
    let inf = f64::INFINITY;
    let t_name = |t: usize| format!("t{t}");

    // ---- investment columns
    for g in &net.generators {
        let lo = g.p0.unwrap_or(0.0);
        let hi = g.p_max.unwrap_or(inf);
        cat.gen_cap.push(lp.add_col(format!("P[{}]", g.id), lo, hi, g.c_fix));
    }
    for l in &net.ac_lines {
        cat.ac_cap.push(lp.add_col(format!("F[{}]", l.id), l.f0, l.f_max, l.cost));
    }
    for i in &net.dc_links {
        cat.dc_cap.push(lp.add_col(format!("F[{}]", i.id), i.f0, i.f_max, i.cost));
    }
    for s in &net.storage {
        cat.charge_cap
            .push(lp.add_col(format!("Pc[{}]", s.id), s.p0_char.unwrap_or(0.0), inf, s.c_char));
        cat.discharge_cap
            .push(lp.add_col(format!("Pd[{}]", s.id), s.p0_dis.unwrap_or(0.0), inf, s.c_dis));
        cat.energy_cap
            .push(lp.add_col(format!("E[{}]", s.id), s.e0.unwrap_or(0.0), inf, s.c_sto));
    }

    // ---- operational columns
    for g in &net.generators {
        let (lo, hi) = if g.is_electrolyzer { (-inf, 0.0) } else { (0.0, inf) };
        cat.dispatch.push(
            (0..n_t)
                .map(|t| lp.add_col(format!("p[{}@{}]", g.id, t_name(t)), lo, hi, g.c_var * w[t]))
                .collect(),
        );
    }
    for s in &net.storage {
        let mk = |lp: &mut PlanningLP, tag: &str, lo: f64| -> Vec<Col> {
            (0..n_t)
                .map(|t| lp.add_col(format!("{tag}[{}@{}]", s.id, t_name(t)), lo, inf, 0.0))
                .collect()
        };
        cat.charge.push(mk(&mut lp, "pc", 0.0));
        cat.discharge.push(mk(&mut lp, "pd", 0.0));
        cat.soc.push(mk(&mut lp, "e", 0.0));
        cat.reserve_storage.push(mk(&mut lp, "Rs", -inf));
        cat.soc_start.push(
            net.time
                .periods
                .iter()
                .map(|p| lp.add_col(format!("e0[{}@{}]", s.id, p.id), 0.0, inf, 0.0))
                .collect(),
        );
    }
    for l in &net.ac_lines {
        cat.ac_flow.push(
            (0..n_t)
                .map(|t| lp.add_col(format!("f[{}@{}]", l.id, t_name(t)), -inf, inf, 0.0))
                .collect(),
        );
        cat.reserve_ac.push(
            (0..n_t)
                .map(|t| lp.add_col(format!("Rl[{}@{}]", l.id, t_name(t)), -inf, inf, 0.0))
                .collect(),
        );
        if lin.envelopes.is_some() {
            cat.loss.push(
                (0..n_t)
                    .map(|t| lp.add_col(format!("l[{}@{}]", l.id, t_name(t)), 0.0, inf, 0.0))
                    .collect(),
            );
        }
    }
    for i in &net.dc_links {
        cat.dc_flow.push(
            (0..n_t)
                .map(|t| lp.add_col(format!("f[{}@{}]", i.id, t_name(t)), 0.0, inf, 0.0))
                .collect(),
        );
        cat.reserve_dc.push(
            (0..n_t)
                .map(|t| lp.add_col(format!("Ri[{}@{}]", i.id, t_name(t)), 0.0, inf, 0.0))
                .collect(),
        );
    }

    // ---- SSSC columns
    let fixed_mvar: Option<Vec<f64>> = match &opts.sssc {
        SsscMode::Fixed(q) => Some(q.iter().zip(&net.ac_lines).map(|(q, l)| q * l.base_mva).collect()),
        _ => None,
    };
    for (li, l) in net.ac_lines.iter().enumerate() {
        let (col_q, cols_qt) = match &opts.sssc {
            SsscMode::Off => (None, None),
            SsscMode::Invest | SsscMode::Capped(_) if l.sssc_allowed => {
                let q = lp.add_col(format!("Q[{}]", l.id), 0.0, inf, sssc_cost);
                let qt = (0..n_t)
                    .map(|t| lp.add_col(format!("qt[{}@{}]", l.id, t_name(t)), -inf, inf, 0.0))
                    .collect();
                (Some(q), Some(qt))
            }
            SsscMode::Fixed(_) => {
                let q = fixed_mvar.as_ref().expect("fixed ratings")[li];
                if q > 0.0 {
                    let qt = (0..n_t)
                        .map(|t| lp.add_col(format!("qt[{}@{}]", l.id, t_name(t)), -q, q, 0.0))
                        .collect();
                    (None, Some(qt))
                } else {
                    (None, None)
                }
            }
            _ => (None, None),
        };
        cat.sssc_cap.push(col_q);
        cat.q_tilde.push(cols_qt);
    }
    if fixed_mvar.is_some() {
        let investment: f64 = fixed_mvar.iter().flatten().sum::<f64>() * sssc_cost;
        lp.objective_offset += investment;
    }

    if opts.formulation == FlowFormulation::AngleBased {
        for t in 0..n_t {
            cat.theta.push(
                net.buses
                    .iter()
                    .enumerate()
                    .map(|(b, bus)| {
                        let is_ref = net.components()[net.component_of_bus(b)].buses[0] == b;
                        let (lo, hi) = if is_ref { (0.0, 0.0) } else { (-inf, inf) };
                        lp.add_col(format!("theta[{}@{}]", bus.id, t_name(t)), lo, hi, 0.0)
                    })
                    .collect(),
            );
        }
    }

    // ---- incidence lists
    let mut ac_at: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_b];
    for l in 0..n_l {
        let (a, b) = net.ac_ends(l);
        ac_at[a].push((l, -1.0));
        ac_at[b].push((l, 1.0));
    }
    let mut dc_at: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_b];
    for i in 0..n_i {
        let (a, b) = net.dc_ends(i);
        dc_at[a].push((i, -1.0));
        dc_at[b].push((i, net.dc_links[i].efficiency));
    }
    let mut gens_at: Vec<Vec<usize>> = vec![Vec::new(); n_b];
    for (g, gen) in net.generators.iter().enumerate() {
        gens_at[net.bus_idx(&gen.bus)].push(g);
    }
    let mut sto_at: Vec<Vec<usize>> = vec![Vec::new(); n_b];
    for (s, st) in net.storage.iter().enumerate() {
        sto_at[net.bus_idx(&st.bus)].push(s);
    }
    let demand = |b: usize, t: usize| net.demand(b, t) * scenario.demand_scale;

    // ---- nodal balance
    for b in 0..n_b {
        for t in 0..n_t {
            let mut terms = Vec::new();
            terms.extend(gens_at[b].iter().map(|&g| (cat.dispatch[g][t], 1.0)));
            for &(l, a) in &ac_at[b] {
                terms.push((cat.ac_flow[l][t], a));
                if !cat.loss.is_empty() {
                    terms.push((cat.loss[l][t], -0.5));
                }
            }
            terms.extend(dc_at[b].iter().map(|&(i, a)| (cat.dc_flow[i][t], a)));
            for &s in &sto_at[b] {
                terms.push((cat.discharge[s][t], 1.0));
                terms.push((cat.charge[s][t], -1.0));
            }
            lp.add_row(
                Family::Balance,
                format!("{}@{}", net.buses[b].id, t_name(t)),
                terms,
                Sense::Eq,
                demand(b, t),
            );
        }
    }

    // ---- annual electrolysis energy
    let electro: Vec<usize> = (0..n_g).filter(|&g| net.generators[g].is_electrolyzer).collect();
    if !electro.is_empty() {
        let terms: Vec<_> = electro
            .iter()
            .flat_map(|&g| (0..n_t).map(move |t| (g, t)))
            .map(|(g, t)| (cat.dispatch[g][t], -w[t]))
            .collect();
        lp.add_row(Family::H2, "electrolysis", terms, Sense::Eq, scenario.d_electro_mwh());
    }

    // ---- transmission budget
    if let Some(budget) = scenario.budget_mw_mile() {
        let mut terms = Vec::new();
        let mut existing = 0.0;
        for (l, line) in net.ac_lines.iter().enumerate() {
            terms.push((cat.ac_cap[l], line.length));
            existing += line.length * line.f0;
        }
        for (i, link) in net.dc_links.iter().enumerate() {
            terms.push((cat.dc_cap[i], 0.5 * link.length));
            existing += 0.5 * link.length * link.f0;
        }
        lp.add_row(Family::Budget, "total", terms, Sense::Le, budget + existing);
    }

    // ---- DC corridor symmetry, once per pair
    for i in 0..n_i {
        let j = net.dc_partner(i);
        if i < j {
            lp.add_row(
                Family::DcSymmetry,
                &net.dc_links[i].id,
                [(cat.dc_cap[i], 1.0), (cat.dc_cap[j], -1.0)],
                Sense::Eq,
                0.0,
            );
        }
    }

    // ---- dispatch limits
    for (g, gen) in net.generators.iter().enumerate() {
        for t in 0..n_t {
            let label = format!("{}@{}", gen.id, t_name(t));
            if gen.is_electrolyzer {
                lp.add_row(
                    Family::Dispatch,
                    label,
                    [(cat.dispatch[g][t], 1.0), (cat.gen_cap[g], 1.0)],
                    Sense::Ge,
                    0.0,
                );
            } else {
                lp.add_row(
                    Family::Dispatch,
                    label,
                    [(cat.dispatch[g][t], 1.0), (cat.gen_cap[g], -net.availability(g, t))],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    for (s, st) in net.storage.iter().enumerate() {
        for t in 0..n_t {
            lp.add_row(
                Family::Dispatch,
                format!("{}:char@{}", st.id, t_name(t)),
                [(cat.charge[s][t], 1.0), (cat.charge_cap[s], -1.0)],
                Sense::Le,
                0.0,
            );
            lp.add_row(
                Family::Dispatch,
                format!("{}:dis@{}", st.id, t_name(t)),
                [(cat.discharge[s][t], 1.0), (cat.discharge_cap[s], -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
    for (i, link) in net.dc_links.iter().enumerate() {
        for t in 0..n_t {
            lp.add_row(
                Family::Dispatch,
                format!("{}@{}", link.id, t_name(t)),
                [(cat.dc_flow[i][t], 1.0), (cat.dc_cap[i], -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }

    // ---- storage state of charge
    let ranges = net.time.period_ranges();
    for (s, st) in net.storage.iter().enumerate() {
        for (k, range) in ranges.iter().enumerate() {
            let mut prev = cat.soc_start[s][k];
            for t in range.clone() {
                lp.add_row(
                    Family::Soc,
                    format!("{}@{}", st.id, t_name(t)),
                    [
                        (cat.soc[s][t], 1.0),
                        (prev, -st.eta_idle.powf(w[t])),
                        (cat.charge[s][t], -w[t] * st.eta_char),
                        (cat.discharge[s][t], w[t] / st.eta_dis),
                    ],
                    Sense::Eq,
                    0.0,
                );
                lp.add_row(
                    Family::SocLimit,
                    format!("{}@{}", st.id, t_name(t)),
                    [(cat.soc[s][t], 1.0), (cat.energy_cap[s], -1.0)],
                    Sense::Le,
                    0.0,
                );
                prev = cat.soc[s][t];
            }
            lp.add_row(
                Family::Cyclic,
                format!("{}@{}", st.id, net.time.periods[k].id),
                [(cat.soc_start[s][k], 1.0), (prev, -1.0)],
                Sense::Eq,
                0.0,
            );
        }
    }

    // ---- losses and thermal limits
    for (l, line) in net.ac_lines.iter().enumerate() {
        for t in 0..n_t {
            let label = format!("{}@{}", line.id, t_name(t));
            let f = cat.ac_flow[l][t];
            if let Some(envs) = &lin.envelopes {
                let loss = cat.loss[l][t];
                for (m, seg) in envs[l].segments.iter().enumerate() {
                    lp.add_row(
                        Family::Loss,
                        format!("{label}#{m}"),
                        [(loss, 1.0), (f, -seg.alpha)],
                        Sense::Ge,
                        seg.beta * line.base_mva,
                    );
                }
                lp.add_row(
                    Family::Thermal,
                    format!("{label}+"),
                    [(f, 1.0), (loss, 1.0), (cat.ac_cap[l], -1.0)],
                    Sense::Le,
                    0.0,
                );
                lp.add_row(
                    Family::Thermal,
                    format!("{label}-"),
                    [(f, -1.0), (loss, 1.0), (cat.ac_cap[l], -1.0)],
                    Sense::Le,
                    0.0,
                );
            } else {
                lp.add_row(
                    Family::Thermal,
                    format!("{label}+"),
                    [(f, 1.0), (cat.ac_cap[l], -1.0)],
                    Sense::Le,
                    0.0,
                );
                lp.add_row(
                    Family::Thermal,
                    format!("{label}-"),
                    [(f, -1.0), (cat.ac_cap[l], -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }

    // ---- SSSC rating bounds
    for (l, line) in net.ac_lines.iter().enumerate() {
        if let (Some(q), Some(qt)) = (cat.sssc_cap[l], &cat.q_tilde[l]) {
            for (t, &c) in qt.iter().enumerate() {
                let label = format!("{}@{}", line.id, t_name(t));
                lp.add_row(Family::SsscBound, format!("{label}+"), [(c, 1.0), (q, -1.0)], Sense::Le, 0.0);
                lp.add_row(Family::SsscBound, format!("{label}-"), [(c, -1.0), (q, -1.0)], Sense::Le, 0.0);
            }
        }
    }
    if let SsscMode::Capped(cap) = opts.sssc {
        let terms: Vec<_> = cat.sssc_cap.iter().flatten().map(|&c| (c, 1.0)).collect();
        lp.add_row(Family::SsscCap, "total", terms, Sense::Le, cap * MVAR_PER_GVAR);
    }

    // ---- Kirchhoff's voltage law
    let mut n_cycles = 0;
    let f_cap_pu: Vec<f64> = net
        .ac_lines
        .iter()
        .zip(&lin.f_fix)
        .map(|(l, f)| f / l.base_mva)
        .collect();
    let has_qt: Vec<bool> = cat.q_tilde.iter().map(Option::is_some).collect();
    match opts.formulation {
        FlowFormulation::CycleKvl => {
            let basis: CycleBasis = build_cycle_basis(net);
            n_cycles = basis.len();
            let templates = sssc_kvl_terms(&basis, &lin.x_hat, &f_cap_pu, &has_qt);
            for tpl in &templates {
                for t in 0..n_t {
                    // pu coefficients divided by the line base act on MW/MVAr columns
                    let terms = tpl
                        .flow_terms
                        .iter()
                        .map(|&(l, a)| (cat.ac_flow[l][t], a / net.ac_lines[l].base_mva))
                        .chain(tpl.q_terms.iter().map(|&(l, a)| {
                            let qt = cat.q_tilde[l].as_ref().expect("q_tilde column");
                            (qt[t], a / net.ac_lines[l].base_mva)
                        }));
                    lp.add_row(
                        Family::Kvl,
                        format!("c{}@{}", tpl.cycle, t_name(t)),
                        terms,
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }
        FlowFormulation::AngleBased => {
            for (l, line) in net.ac_lines.iter().enumerate() {
                let (a, b) = net.ac_ends(l);
                for t in 0..n_t {
                    let mut terms = vec![
                        (cat.ac_flow[l][t], lin.x_hat[l] / line.base_mva),
                        (cat.theta[t][a], -1.0),
                        (cat.theta[t][b], 1.0),
                    ];
                    if let Some(qt) = &cat.q_tilde[l] {
                        terms.push((qt[t], -1.0 / lin.f_fix[l]));
                    }
                    lp.add_row(
                        Family::Kvl,
                        format!("{}@{}", line.id, t_name(t)),
                        terms,
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    // ---- reserve margin
    for b in 0..n_b {
        for t in 0..n_t {
            let mut terms = Vec::new();
            for &g in &gens_at[b] {
                if !net.generators[g].is_electrolyzer {
                    terms.push((cat.gen_cap[g], net.availability(g, t)));
                }
            }
            terms.extend(sto_at[b].iter().map(|&s| (cat.reserve_storage[s][t], 1.0)));
            terms.extend(ac_at[b].iter().map(|&(l, a)| (cat.reserve_ac[l][t], a)));
            terms.extend(dc_at[b].iter().map(|&(i, a)| (cat.reserve_dc[i][t], a)));
            lp.add_row(
                Family::Reserve,
                format!("{}@{}", net.buses[b].id, t_name(t)),
                terms,
                Sense::Ge,
                (1.0 + scenario.eps_reserve) * demand(b, t),
            );
        }
    }
    for (s, st) in net.storage.iter().enumerate() {
        for t in 0..n_t {
            let r = cat.reserve_storage[s][t];
            lp.add_row(
                Family::ReserveLimit,
                format!("{}:power@{}", st.id, t_name(t)),
                [(r, 1.0), (cat.discharge_cap[s], -1.0)],
                Sense::Le,
                0.0,
            );
            lp.add_row(
                Family::ReserveLimit,
                format!("{}:energy@{}", st.id, t_name(t)),
                [(r, 1.0), (cat.soc[s][t], -st.eta_dis / w[t])],
                Sense::Le,
                0.0,
            );
        }
    }
    for (l, line) in net.ac_lines.iter().enumerate() {
        for t in 0..n_t {
            let r = cat.reserve_ac[l][t];
            let label = format!("{}@{}", line.id, t_name(t));
            lp.add_row(
                Family::ReserveLimit,
                format!("{label}+"),
                [(r, 1.0), (cat.ac_cap[l], -1.0)],
                Sense::Le,
                0.0,
            );
            lp.add_row(
                Family::ReserveLimit,
                format!("{label}-"),
                [(r, -1.0), (cat.ac_cap[l], -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
    for (i, link) in net.dc_links.iter().enumerate() {
        for t in 0..n_t {
            lp.add_row(
                Family::ReserveLimit,
                format!("{}@{}", link.id, t_name(t)),
                [(cat.reserve_dc[i][t], 1.0), (cat.dc_cap[i], -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }

    // ---- generation shares
    let producers: Vec<usize> = (0..n_g).filter(|&g| !net.generators[g].is_electrolyzer).collect();
    let share_row = |lp: &mut PlanningLP, label: String, members: &dyn Fn(usize) -> bool, kind: ShareKind, phi: f64| {
        let mut terms = Vec::new();
        for &g in &producers {
            let inside = if members(g) { 1.0 } else { 0.0 };
            for t in 0..n_t {
                terms.push((cat.dispatch[g][t], (inside - phi) * w[t]));
            }
        }
        let sense = match kind {
            ShareKind::MinShare => Sense::Ge,
            ShareKind::MaxShare => Sense::Le,
        };
        lp.add_row(Family::Share, label, terms, sense, 0.0);
    };
    for (k, sc) in scenario.share_constraints.iter().enumerate() {
        let tags = &sc.tech_tags;
        share_row(
            &mut lp,
            format!("share{k}:{}", tags.join("+")),
            &|g| tags.contains(&net.generators[g].tech_tag),
            sc.kind,
            sc.fraction,
        );
    }
    if let Some(phi) = scenario.zero_carbon_min {
        share_row(
            &mut lp,
            "zero_carbon".into(),
            &|g| net.generators[g].zero_carbon,
            ShareKind::MinShare,
            phi,
        );
    }

    Ok(PlanningModel {
        lp,
        catalog: cat,
        linearization: lin.clone(),
        n_cycles,
        sssc_cost_per_mvar: sssc_cost,
        fixed_sssc_mvar: fixed_mvar,
    })
}

fn check_dimensions(net: &Network, lin: &Linearization, sssc: &SsscMode) -> Result<()> {
    let n_l = net.ac_lines.len();
    let dim = |what: &str, got: usize| -> Result<()> {
        if got != n_l {
            Err(Error::ModelBuild(format!("{what}: expected {n_l} entries, got {got}")))
        } else {
            Ok(())
        }
    };
    dim("F_fix", lin.f_fix.len())?;
    dim("x_hat", lin.x_hat.len())?;
    if let Some(envs) = &lin.envelopes {
        dim("loss envelopes", envs.len())?;
        if envs.iter().any(|e| e.segments.is_empty()) {
            return Err(Error::ModelBuild("loss envelope without segments".into()));
        }
    }
    if let Some(l) = lin.f_fix.iter().position(|f| !(*f > 0.0)) {
        return Err(Error::ModelBuild(format!("F_fix of `{}` must be positive", net.ac_lines[l].id)));
    }
    if let Some(l) = lin.x_hat.iter().position(|x| !(*x > 0.0)) {
        return Err(Error::ModelBuild(format!("x_hat of `{}` must be positive", net.ac_lines[l].id)));
    }
    if let SsscMode::Fixed(q) = sssc {
        dim("fixed SSSC ratings", q.len())?;
        for (l, &v) in q.iter().enumerate() {
            if !(v >= 0.0) {
                return Err(Error::ModelBuild(format!("SSSC rating of `{}` must be >= 0", net.ac_lines[l].id)));
            }
            if v > 0.0 && !net.ac_lines[l].sssc_allowed {
                return Err(Error::ModelBuild(format!("`{}` may not carry an SSSC", net.ac_lines[l].id)));
            }
        }
    }
    if let SsscMode::Capped(cap) = sssc {
        if !(*cap >= 0.0) {
            return Err(Error::ModelBuild("SSSC cap must be >= 0".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{single_bus, triangle};

    #[test]
    fn family_row_counts_match_cardinalities() {
        let net = triangle();
        let sc = Scenario::named("t");
        let lin = Linearization::initial(&net, 3).unwrap();
        let m = build_lp(&net, &sc, &lin, &BuildOptions::default()).unwrap();
        let n_t = net.n_snapshots();
        assert_eq!(m.lp.row_count(Family::Kvl), m.n_cycles * n_t);
        assert_eq!(m.lp.row_count(Family::Balance), 3 * n_t);
        assert_eq!(m.lp.row_count(Family::Reserve), 3 * n_t);
        assert_eq!(m.lp.row_count(Family::Loss), 3 * 3 * n_t);
        assert_eq!(m.lp.row_count(Family::Thermal), 2 * 3 * n_t);
        assert_eq!(m.lp.row_count(Family::Budget), 0);
        assert!(m.lp.is_well_formed());
    }

    #[test]
    fn lossless_drops_loss_columns() {
        let net = triangle();
        let lin = Linearization::initial(&net, 3).unwrap().lossless();
        let m = build_lp(&net, &Scenario::named("t"), &lin, &BuildOptions::default()).unwrap();
        assert!(m.catalog.loss.is_empty());
        assert_eq!(m.lp.row_count(Family::Loss), 0);
    }

    #[test]
    fn sssc_kvl_row_on_triangle() {
        let net = triangle();
        let lin = Linearization::initial(&net, 3).unwrap();
        let opts = BuildOptions {
            sssc: SsscMode::Fixed(vec![0.0, 0.0, 0.25]),
            ..Default::default()
        };
        let m = build_lp(&net, &Scenario::named("t"), &lin, &opts).unwrap();
        let row = m.lp.rows_of(Family::Kvl).next().unwrap();
        let qt = m.catalog.q_tilde[2].as_ref().unwrap()[0];
        // scaled by 1/100 MVA: q_tilde / 0.5 pu becomes q_tilde[MVAr] / 50 MW
        let a = row.terms.iter().find(|(c, _)| *c == qt).unwrap().1;
        assert!((a - 1.0 / 50.0).abs() < 1e-15);
        assert_eq!(m.lp.columns[qt.0].lower, -25.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let net = triangle();
        let mut lin = Linearization::initial(&net, 3).unwrap();
        lin.x_hat.pop();
        let err = build_lp(&net, &Scenario::named("t"), &lin, &BuildOptions::default()).unwrap_err();
        assert!(err.to_string().contains("x_hat"));
    }

    #[test]
    fn invest_mode_needs_permission() {
        let net = single_bus(100.0, 10.0);
        let lin = Linearization::initial(&net, 3).unwrap();
        let opts = BuildOptions {
            sssc: SsscMode::Invest,
            ..Default::default()
        };
        assert!(build_lp(&net, &Scenario::named("t"), &lin, &opts).is_err());
    }
}
