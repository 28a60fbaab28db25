//! Scenario definitions: budgets, reserve margin, policy shares and SSSC terms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, MW_MILE_PER_TW_MILE};

/// MWh per TWh.
pub const MWH_PER_TWH: f64 = 1e6;
/// MVAr per GVAr.
pub const MVAR_PER_GVAR: f64 = 1e3;
/// kVAr per MVAr, to turn $/kVAr-yr into $/MVAr-yr.
pub const KVAR_PER_MVAR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareKind {
    MinShare,
    MaxShare,
}

/// Bound on the share of annual generation from a set of technologies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareConstraint {
    pub tech_tags: Vec<String>,
    pub kind: ShareKind,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SsscPolicy {
    #[default]
    Forbidden,
    Allowed {
        /// Annualized cost, $/kVAr-yr.
        c_sssc: f64,
        /// Cap on total installed SSSC capacity, GVAr.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_total_cap: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Multiplier on every demand profile.
    #[serde(default = "one")]
    pub demand_scale: f64,
    /// Annual electrolysis energy, TWh.
    #[serde(rename = "D_electro", default)]
    pub d_electro: f64,
    /// Transmission expansion budget in TW-mile; absent means unlimited.
    #[serde(rename = "U_bar", default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default)]
    pub eps_reserve: f64,
    #[serde(default)]
    pub sssc: SsscPolicy,
    #[serde(default)]
    pub share_constraints: Vec<ShareConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_carbon_min: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "base".into(),
            demand_scale: 1.0,
            d_electro: 0.0,
            budget: None,
            eps_reserve: 0.0,
            sssc: SsscPolicy::Forbidden,
            share_constraints: Vec::new(),
            zero_carbon_min: None,
        }
    }
}

impl Scenario {
    pub fn named(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s).map_err(|e| Error::Parse {
            what: "scenario".into(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        let frac = |v: f64, what: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::validation(&self.name, format!("{what} must lie in [0, 1], got {v}")))
            }
        };
        if !(self.demand_scale >= 0.0 && self.demand_scale.is_finite()) {
            return Err(Error::validation(&self.name, "demand_scale must be >= 0"));
        }
        if !(self.d_electro >= 0.0 && self.d_electro.is_finite()) {
            return Err(Error::validation(&self.name, "D_electro must be >= 0"));
        }
        if let Some(u) = self.budget {
            if !(u >= 0.0) {
                return Err(Error::validation(&self.name, "budget must be >= 0"));
            }
        }
        frac(self.eps_reserve, "eps_reserve")?;
        if let Some(z) = self.zero_carbon_min {
            frac(z, "zero_carbon_min")?;
        }
        for s in &self.share_constraints {
            frac(s.fraction, "share fraction")?;
            if s.tech_tags.is_empty() {
                return Err(Error::validation(&self.name, "share constraint without tech tags"));
            }
        }
        if let SsscPolicy::Allowed { c_sssc, q_total_cap } = self.sssc {
            if !(c_sssc >= 0.0) {
                return Err(Error::validation(&self.name, "c_sssc must be >= 0"));
            }
            if q_total_cap.is_some_and(|q| !(q >= 0.0)) {
                return Err(Error::validation(&self.name, "q_total_cap must be >= 0"));
            }
        }
        Ok(())
    }

    /// Budget in MW-mile, `None` when unlimited.
    pub fn budget_mw_mile(&self) -> Option<f64> {
        self.budget.map(|u| u * MW_MILE_PER_TW_MILE)
    }

    pub fn d_electro_mwh(&self) -> f64 {
        self.d_electro * MWH_PER_TWH
    }

    pub fn sssc_allowed(&self) -> bool {
        matches!(self.sssc, SsscPolicy::Allowed { .. })
    }

    /// Annualized SSSC cost per MVAr, zero when SSSCs are forbidden.
    pub fn sssc_cost_per_mvar(&self) -> f64 {
        match self.sssc {
            SsscPolicy::Allowed { c_sssc, .. } => c_sssc * KVAR_PER_MVAR,
            SsscPolicy::Forbidden => 0.0,
        }
    }

    /// Copy with SSSCs forbidden.
    pub fn without_sssc(&self) -> Scenario {
        Scenario {
            sssc: SsscPolicy::Forbidden,
            ..self.clone()
        }
    }

    /// Copy with the given total SSSC cap in GVAr (`None` removes the cap).
    /// SSSC costs are kept; a forbidden scenario stays forbidden.
    pub fn with_sssc_cap(&self, cap: Option<f64>) -> Scenario {
        let mut sc = self.clone();
        if let SsscPolicy::Allowed { q_total_cap, .. } = &mut sc.sssc {
            *q_total_cap = cap;
        }
        sc
    }

    pub fn with_budget(&self, budget: Option<f64>) -> Scenario {
        Scenario {
            budget,
            ..self.clone()
        }
    }

    /// Checks that every referenced tech tag exists in `net`.
    pub fn check_against(&self, net: &Network) -> Result<()> {
        for s in &self.share_constraints {
            for tag in &s.tech_tags {
                if !net.generators.iter().any(|g| &g.tech_tag == tag) {
                    return Err(Error::validation(&self.name, format!("no generator has tech tag `{tag}`")));
                }
            }
        }
        let has_electro = net.generators.iter().any(|g| g.is_electrolyzer);
        if self.d_electro > 0.0 && !has_electro {
            return Err(Error::validation(&self.name, "D_electro > 0 but the network has no electrolyzer"));
        }
        Ok(())
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_document() {
        let sc = Scenario::from_json_str(
            r#"{
                "name": "deep",
                "demand_scale": 1.5,
                "D_electro": 0.2,
                "U_bar": 3.0,
                "eps_reserve": 0.15,
                "sssc": {"mode": "allowed", "c_sssc": 12.0, "q_total_cap": 1.0},
                "share_constraints": [{"tech_tags": ["gas_ccs"], "kind": "max_share", "fraction": 0.1}],
                "zero_carbon_min": 0.9
            }"#,
        )
        .unwrap();
        assert_eq!(sc.budget_mw_mile(), Some(3.0e6));
        assert_eq!(sc.d_electro_mwh(), 2.0e5);
        assert_eq!(sc.sssc_cost_per_mvar(), 12_000.0);
        assert_eq!(sc.share_constraints[0].kind, ShareKind::MaxShare);
        let back = Scenario::from_json_str(&serde_json::to_string(&sc).unwrap()).unwrap();
        assert_eq!(back, sc);
    }

    #[test]
    fn defaults_are_unlimited_and_forbidden() {
        let sc = Scenario::from_json_str(r#"{"name": "x"}"#).unwrap();
        assert_eq!(sc.budget, None);
        assert!(!sc.sssc_allowed());
        assert_eq!(sc.demand_scale, 1.0);
    }

    #[test]
    fn rejects_bad_fractions() {
        assert!(Scenario::from_json_str(r#"{"name": "x", "eps_reserve": 1.5}"#).is_err());
        assert!(Scenario::from_json_str(r#"{"name": "x", "U_bar": -1}"#).is_err());
    }
}
