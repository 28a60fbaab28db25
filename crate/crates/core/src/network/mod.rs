//! Physical and economic data model of the planning network.
//!
//! A [`Network`] is parsed from a single JSON document (see [`load_network`])
//! and validated before use. After validation it is immutable and carries a
//! private index (bus lookup, AC components) that every downstream stage uses.

mod io;
mod validate;

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use io::{load_network, load_profiles_csv, read_profiles_csv};
pub use validate::{validate_connectivity, ComponentSummary};

use crate::error::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Relative slack on `sum(w_t)` against a full year before a warning is logged.
pub const DEFAULT_HOURS_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    /// AC interconnect the bus belongs to.
    pub component_label: String,
    /// (lon, lat) in degrees, used only for reporting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand_profile_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcLine {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Corridor length in miles.
    pub length: f64,
    /// Existing capacity in MW; the impedances below are valid at this rating.
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "F_max")]
    pub f_max: f64,
    pub r0_pu: f64,
    pub x0_pu: f64,
    /// Annualized capacity cost, $/MW-yr.
    pub cost: f64,
    #[serde(default)]
    pub sssc_allowed: bool,
    #[serde(default = "default_base_mva")]
    pub base_mva: f64,
}

fn default_base_mva() -> f64 {
    100.0
}

impl AcLine {
    pub fn is_expandable(&self) -> bool {
        self.f_max > self.f0
    }
}

/// One direction of a DC corridor. Corridors are stored as two links that
/// name each other through `reverse_partner_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcLink {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    pub reverse_partner_id: String,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "F_max")]
    pub f_max: f64,
    pub efficiency: f64,
    pub length: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    /// $/MW-yr.
    pub c_fix: f64,
    /// $/MWh. For electrolyzers this multiplies the (non-positive) dispatch.
    #[serde(default)]
    pub c_var: f64,
    /// Buildable ceiling in MW; `None` leaves capacity unbounded.
    #[serde(rename = "P_max", default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    /// Capacity already in place, in MW. Acts as a lower bound on `P_g`.
    #[serde(rename = "P0", default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    /// Availability profile id; a missing profile means full availability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub availability_profile: Option<String>,
    #[serde(default)]
    pub is_electrolyzer: bool,
    #[serde(default)]
    pub zero_carbon: bool,
    #[serde(default)]
    pub tech_tag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageUnit {
    pub id: String,
    pub bus: String,
    pub c_char: f64,
    pub c_dis: f64,
    pub c_sto: f64,
    pub eta_char: f64,
    pub eta_dis: f64,
    /// Per-hour retention fraction.
    #[serde(default = "one")]
    pub eta_idle: f64,
    #[serde(rename = "P0_char", default, skip_serializing_if = "Option::is_none")]
    pub p0_char: Option<f64>,
    #[serde(rename = "P0_dis", default, skip_serializing_if = "Option::is_none")]
    pub p0_dis: Option<f64>,
    #[serde(rename = "E0", default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// A representative period: an ordered run of snapshots with weights in hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub id: String,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeStructure {
    pub periods: Vec<Period>,
}

impl TimeStructure {
    /// A single period of `n` equally weighted snapshots covering one year.
    pub fn uniform(n: usize) -> Self {
        TimeStructure {
            periods: vec![Period {
                id: "year".into(),
                weights: vec![HOURS_PER_YEAR / n as f64; n],
            }],
        }
    }

    pub fn n_snapshots(&self) -> usize {
        self.periods.iter().map(|p| p.weights.len()).sum()
    }

    /// Snapshot weights in global order.
    pub fn weights(&self) -> Vec<f64> {
        self.periods
            .iter()
            .flat_map(|p| p.weights.iter().copied())
            .collect()
    }

    /// Global snapshot ranges, one per period.
    pub fn period_ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.periods
            .iter()
            .map(|p| {
                let r = start..start + p.weights.len();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn total_hours(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// Relative deviation of the modelled hours from a full year.
    pub fn year_coverage_gap(&self) -> f64 {
        (self.total_hours() - HOURS_PER_YEAR).abs() / HOURS_PER_YEAR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub id: String,
    /// One value per global snapshot.
    pub values: Vec<f64>,
}

/// Lookup tables built during validation.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct NetworkIndex {
    pub(crate) bus: HashMap<String, usize>,
    pub(crate) profile: HashMap<String, usize>,
    pub(crate) dc_link: HashMap<String, usize>,
    pub(crate) components: Vec<AcComponent>,
    pub(crate) bus_component: Vec<usize>,
}

/// A connected AC sub-network.
#[derive(Debug, Clone, PartialEq)]
pub struct AcComponent {
    pub label: String,
    /// Bus indices sorted by bus id.
    pub buses: Vec<usize>,
    /// AC line indices in input order.
    pub lines: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub ac_lines: Vec<AcLine>,
    #[serde(default)]
    pub dc_links: Vec<DcLink>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub storage: Vec<StorageUnit>,
    #[serde(default)]
    pub profiles: Vec<Profile>,
    pub time: TimeStructure,
    #[serde(skip)]
    pub(crate) index: NetworkIndex,
}

impl Network {
    /// Assembles and validates a network from its parts.
    pub fn new(
        buses: Vec<Bus>,
        ac_lines: Vec<AcLine>,
        dc_links: Vec<DcLink>,
        generators: Vec<Generator>,
        storage: Vec<StorageUnit>,
        profiles: Vec<Profile>,
        time: TimeStructure,
    ) -> Result<Self> {
        let mut net = Network {
            buses,
            ac_lines,
            dc_links,
            generators,
            storage,
            profiles,
            time,
            index: NetworkIndex::default(),
        };
        net.validate()?;
        Ok(net)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let mut net: Network = serde_json::from_str(s).map_err(|e| Error::Parse {
            what: "network".into(),
            message: e.to_string(),
        })?;
        net.validate()?;
        Ok(net)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    /// Runs every structural check and rebuilds the lookup index.
    pub fn validate(&mut self) -> Result<()> {
        self.index = validate::validate(self)?;
        Ok(())
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.index.bus.get(id).copied()
    }

    pub(crate) fn bus_idx(&self, id: &str) -> usize {
        self.index.bus[id]
    }

    pub fn dc_link_index(&self, id: &str) -> Option<usize> {
        self.index.dc_link.get(id).copied()
    }

    pub fn profile(&self, id: &str) -> Option<&Profile> {
        self.index.profile.get(id).map(|&i| &self.profiles[i])
    }

    /// AC components ordered by label.
    pub fn components(&self) -> &[AcComponent] {
        &self.index.components
    }

    pub fn component_of_bus(&self, bus: usize) -> usize {
        self.index.bus_component[bus]
    }

    pub fn n_snapshots(&self) -> usize {
        self.time.n_snapshots()
    }

    /// Demand in MW at bus `b`, global snapshot `t`.
    pub fn demand(&self, b: usize, t: usize) -> f64 {
        self.buses[b]
            .demand_profile_ref
            .as_deref()
            .and_then(|p| self.profile(p))
            .map_or(0.0, |p| p.values[t])
    }

    /// Availability fraction of generator `g` at snapshot `t`.
    pub fn availability(&self, g: usize, t: usize) -> f64 {
        self.generators[g]
            .availability_profile
            .as_deref()
            .and_then(|p| self.profile(p))
            .map_or(1.0, |p| p.values[t])
    }

    /// (from, to) bus indices of AC line `l`.
    pub fn ac_ends(&self, l: usize) -> (usize, usize) {
        let line = &self.ac_lines[l];
        (self.bus_idx(&line.from_bus), self.bus_idx(&line.to_bus))
    }

    pub fn dc_ends(&self, i: usize) -> (usize, usize) {
        let link = &self.dc_links[i];
        (self.bus_idx(&link.from_bus), self.bus_idx(&link.to_bus))
    }

    pub fn dc_partner(&self, i: usize) -> usize {
        self.index.dc_link[&self.dc_links[i].reverse_partner_id]
    }

    /// Existing AC capacity vector in MW.
    pub fn ac_initial_capacity(&self) -> Vec<f64> {
        self.ac_lines.iter().map(|l| l.f0).collect()
    }

    /// Transmission volume in MW-mile of a capacity plan above the existing
    /// fleet, counting DC corridors at half since each is stored as two links.
    pub fn expansion_volume(&self, ac: &[f64], dc: &[f64]) -> f64 {
        let ac_vol: f64 = self
            .ac_lines
            .iter()
            .zip(ac)
            .map(|(l, f)| l.length * (f - l.f0))
            .sum();
        let dc_vol: f64 = self
            .dc_links
            .iter()
            .zip(dc)
            .map(|(l, f)| 0.5 * l.length * (f - l.f0))
            .sum();
        ac_vol + dc_vol
    }

    /// Largest expansion volume any plan can use, in MW-mile.
    pub fn max_expansion_volume(&self) -> f64 {
        let ac: Vec<f64> = self.ac_lines.iter().map(|l| l.f_max).collect();
        let dc: Vec<f64> = self.dc_links.iter().map(|l| l.f_max).collect();
        self.expansion_volume(&ac, &dc)
    }

    /// Copy of the network with every demand profile multiplied by `scale`.
    pub fn with_demand_scale(&self, scale: f64) -> Network {
        let mut net = self.clone();
        if scale == 1.0 {
            return net;
        }
        let demand_refs: std::collections::HashSet<&str> = self
            .buses
            .iter()
            .filter_map(|b| b.demand_profile_ref.as_deref())
            .collect();
        for p in net.profiles.iter_mut() {
            if demand_refs.contains(p.id.as_str()) {
                p.values.iter_mut().for_each(|v| *v *= scale);
            }
        }
        net
    }
}

/// MW-mile to TW-mile.
pub const MW_MILE_PER_TW_MILE: f64 = 1e6;
