//! Solver-independent sparse LP container with tagged rows.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, Write};

/// Column handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Col(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Balance,
    H2,
    Budget,
    DcSymmetry,
    Dispatch,
    Soc,
    SocLimit,
    Cyclic,
    Loss,
    Thermal,
    Kvl,
    Reserve,
    ReserveLimit,
    SsscBound,
    SsscCap,
    Share,
    /// Rows of auxiliary models such as the transfer-capability LP.
    Aux,
    /// Variable bounds; only used in feasibility reports.
    Bounds,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Balance => "balance",
            Family::H2 => "h2",
            Family::Budget => "budget",
            Family::DcSymmetry => "dc_symmetry",
            Family::Dispatch => "dispatch",
            Family::Soc => "soc",
            Family::SocLimit => "soc_limit",
            Family::Cyclic => "cyclic",
            Family::Loss => "loss",
            Family::Thermal => "thermal",
            Family::Kvl => "kvl",
            Family::Reserve => "reserve",
            Family::ReserveLimit => "reserve_limit",
            Family::SsscBound => "sssc_bound",
            Family::SsscCap => "sssc_cap",
            Family::Share => "share",
            Family::Aux => "aux",
            Family::Bounds => "bounds",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub family: Family,
    /// Entity and snapshot the row refers to, e.g. `b3@t0`.
    pub label: String,
    pub terms: Vec<(Col, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(c, a)| a * x[c.0]).sum()
    }

    /// Amount by which `x` violates the row, scaled by the row's magnitude
    /// `max(1, |rhs|, max_j |a_j x_j|)`.
    pub fn scaled_violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        let raw = match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        };
        let scale = self
            .terms
            .iter()
            .map(|&(c, a)| (a * x[c.0]).abs())
            .fold(self.rhs.abs().max(1.0), f64::max);
        raw / scale
    }
}

/// Minimization LP: `min c'x + offset` subject to tagged rows and bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanningLP {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub objective_offset: f64,
}

impl PlanningLP {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> Col {
        self.columns.push(Column {
            name: name.into(),
            lower,
            upper,
            cost,
        });
        Col(self.columns.len() - 1)
    }

    /// Adds a row. Repeated columns are merged and zero coefficients dropped.
    pub fn add_row(
        &mut self,
        family: Family,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (Col, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let mut merged: BTreeMap<Col, f64> = BTreeMap::new();
        for (c, a) in terms {
            debug_assert!(c.0 < self.columns.len(), "row references unknown column");
            *merged.entry(c).or_insert(0.0) += a;
        }
        self.rows.push(Row {
            family,
            label: label.into(),
            terms: merged.into_iter().filter(|&(_, a)| a != 0.0).collect(),
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_count(&self, family: Family) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    pub fn rows_of(&self, family: Family) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.family == family)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .columns
                .iter()
                .zip(x)
                .map(|(c, v)| c.cost * v)
                .sum::<f64>()
    }

    /// Checks that row and column references are in range.
    pub fn is_well_formed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.terms.iter().all(|(c, a)| c.0 < self.columns.len() && a.is_finite()) && r.rhs.is_finite())
            && self.columns.iter().all(|c| c.lower <= c.upper && c.cost.is_finite())
    }

    /// Writes the model in CPLEX LP text format.
    ///
    /// Names are derived from column names and row family/label, with
    /// characters outside the format's alphabet replaced by `_` and
    /// duplicates disambiguated by a numeric suffix.
    pub fn write_lp_format<W: Write>(&self, mut w: W) -> io::Result<()> {
        let col_names = unique_names(self.columns.iter().map(|c| sanitize(&c.name)));
        let row_names = unique_names(
            self.rows
                .iter()
                .map(|r| sanitize(&format!("{}_{}", r.family.name(), r.label))),
        );

        writeln!(w, "\\ capacity expansion planning LP")?;
        if self.objective_offset != 0.0 {
            writeln!(w, "\\ objective offset {}", fmt_num(self.objective_offset))?;
        }
        writeln!(w, "Minimize")?;
        write!(w, " obj:")?;
        let obj: Vec<(usize, f64)> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cost != 0.0)
            .map(|(i, c)| (i, c.cost))
            .collect();
        write_terms(&mut w, &obj, &col_names)?;
        writeln!(w)?;

        writeln!(w, "Subject To")?;
        for (r, name) in self.rows.iter().zip(&row_names) {
            write!(w, " {name}:")?;
            let terms: Vec<(usize, f64)> = r.terms.iter().map(|&(c, a)| (c.0, a)).collect();
            write_terms(&mut w, &terms, &col_names)?;
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            writeln!(w, " {op} {}", fmt_num(r.rhs))?;
        }

        writeln!(w, "Bounds")?;
        for (c, name) in self.columns.iter().zip(&col_names) {
            match (c.lower.is_finite(), c.upper.is_finite()) {
                (false, false) => writeln!(w, " {name} free")?,
                (true, false) => writeln!(w, " {name} >= {}", fmt_num(c.lower))?,
                (false, true) => writeln!(w, " -inf <= {name} <= {}", fmt_num(c.upper))?,
                (true, true) if c.lower == c.upper => writeln!(w, " {name} = {}", fmt_num(c.lower))?,
                (true, true) => writeln!(
                    w,
                    " {} <= {name} <= {}",
                    fmt_num(c.lower),
                    fmt_num(c.upper)
                )?,
            }
        }
        writeln!(w, "End")
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn write_terms<W: Write>(w: &mut W, terms: &[(usize, f64)], names: &[String]) -> io::Result<()> {
    if terms.is_empty() {
        return write!(w, " 0 {}", names.first().map_or("x", String::as_str));
    }
    for (k, &(c, a)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            write!(w, "\n   ")?;
        }
        let sign = if a < 0.0 { '-' } else { '+' };
        write!(w, " {sign} {} {}", fmt_num(a.abs()), names[c])?;
    }
    Ok(())
}

fn sanitize(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|ch| {
            if ch.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(ch) {
                ch
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        out.insert(0, '_');
    }
    out.truncate(200);
    out
}

fn unique_names(names: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    names
        .map(|n| {
            if seen.insert(n.clone()) {
                return n;
            }
            let mut k = 1;
            loop {
                let cand = format!("{n}_{k}");
                if seen.insert(cand.clone()) {
                    return cand;
                }
                k += 1;
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: Family,
    /// Scaled violation (see [`Row::scaled_violation`]).
    pub amount: f64,
    pub label: String,
}

/// Worst violation per constraint family.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub tolerance: f64,
    pub worst: BTreeMap<Family, Violation>,
}

impl FeasibilityReport {
    pub fn passes(&self) -> bool {
        self.worst.values().all(|v| v.amount <= self.tolerance)
    }

    pub fn failing_families(&self) -> Vec<Family> {
        self.worst
            .values()
            .filter(|v| v.amount > self.tolerance)
            .map(|v| v.family)
            .collect()
    }

    pub fn max_violation(&self) -> f64 {
        self.worst.values().map(|v| v.amount).fold(0.0, f64::max)
    }
}

/// Evaluates every row and column bound of `lp` at `primal`.
pub fn check_feasibility(lp: &PlanningLP, primal: &[f64], tol: f64) -> FeasibilityReport {
    assert_eq!(primal.len(), lp.n_cols(), "primal length mismatch");
    let mut worst: BTreeMap<Family, Violation> = BTreeMap::new();
    let mut record = |family: Family, amount: f64, label: &str| {
        let e = worst.entry(family).or_insert_with(|| Violation {
            family,
            amount: 0.0,
            label: String::new(),
        });
        if amount > e.amount || (e.label.is_empty() && amount >= e.amount) {
            e.amount = amount;
            e.label = label.to_string();
        }
    };
    for r in &lp.rows {
        record(r.family, r.scaled_violation(primal), &r.label);
    }
    for (c, &v) in lp.columns.iter().zip(primal) {
        let raw = (c.lower - v).max(0.0).max(v - c.upper);
        let scale = v.abs().max(1.0);
        record(Family::Bounds, if raw.is_nan() { f64::INFINITY } else { raw / scale }, &c.name);
    }
    FeasibilityReport {
        tolerance: tol,
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PlanningLP {
        let mut lp = PlanningLP::new();
        let x = lp.add_col("x[a]", 0.0, f64::INFINITY, 1.0);
        let y = lp.add_col("y", f64::NEG_INFINITY, f64::INFINITY, 2.0);
        lp.add_row(Family::Balance, "b1@t0", [(x, 1.0), (y, 1.0), (x, 1.0)], Sense::Ge, 2.0);
        lp.add_row(Family::Kvl, "c0@t0", [(x, 1.0), (y, -1.0)], Sense::Eq, 0.0);
        lp
    }

    #[test]
    fn duplicate_terms_are_merged() {
        let lp = small();
        assert_eq!(lp.rows[0].terms, vec![(Col(0), 2.0), (Col(1), 1.0)]);
        assert!(lp.is_well_formed());
    }

    #[test]
    fn feasibility_report_names_violated_family() {
        let lp = small();
        let rep = check_feasibility(&lp, &[2.0 / 3.0, 2.0 / 3.0], 1e-9);
        assert!(rep.passes());
        let rep = check_feasibility(&lp, &[0.7, 0.6], 1e-6);
        assert_eq!(rep.failing_families(), vec![Family::Kvl]);
        let rep = check_feasibility(&lp, &[-1.0, -1.0], 1e-6);
        assert!(rep.failing_families().contains(&Family::Bounds));
        assert!(rep.failing_families().contains(&Family::Balance));
    }

    #[test]
    fn lp_format_output() {
        let mut out = Vec::new();
        small().write_lp_format(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("Minimize\n obj: + 1.0 x_a_ + 2.0 y\n"));
        assert!(text.contains(" balance_b1@t0: + 2.0 x_a_ + 1.0 y >= 2.0\n"));
        assert!(text.contains(" kvl_c0@t0: + 1.0 x_a_ - 1.0 y = 0.0\n"));
        assert!(text.contains(" y free\n"));
        assert!(text.ends_with("End\n"));
    }
}
