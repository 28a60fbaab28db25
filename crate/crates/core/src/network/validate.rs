use std::collections::{BTreeMap, HashMap, HashSet};

use log::warn;

use super::{AcComponent, Network, NetworkIndex, DEFAULT_HOURS_TOLERANCE};
use crate::error::{Error, Result};

fn unique_ids<'a>(kind: &str, ids: impl Iterator<Item = &'a str>) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.to_string(), i).is_some() {
            return Err(Error::validation(id, format!("duplicate {kind} id")));
        }
    }
    Ok(map)
}

fn require_bus(buses: &HashMap<String, usize>, owner: &str, bus: &str) -> Result<()> {
    if buses.contains_key(bus) {
        Ok(())
    } else {
        Err(Error::validation(owner, format!("unknown bus `{bus}`")))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

pub(super) fn validate(net: &Network) -> Result<NetworkIndex> {
    let bus = unique_ids("bus", net.buses.iter().map(|b| b.id.as_str()))?;
    unique_ids("ac line", net.ac_lines.iter().map(|l| l.id.as_str()))?;
    let dc_link = unique_ids("dc link", net.dc_links.iter().map(|l| l.id.as_str()))?;
    unique_ids("generator", net.generators.iter().map(|g| g.id.as_str()))?;
    unique_ids("storage", net.storage.iter().map(|s| s.id.as_str()))?;
    let profile = unique_ids("profile", net.profiles.iter().map(|p| p.id.as_str()))?;
    unique_ids("period", net.time.periods.iter().map(|p| p.id.as_str()))?;

    // time structure
    if net.time.periods.is_empty() {
        return Err(Error::validation("time", "no periods"));
    }
    for p in &net.time.periods {
        if p.weights.is_empty() {
            return Err(Error::validation(&p.id, "period has no snapshots"));
        }
        if p.weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::validation(&p.id, "snapshot weight must be positive"));
        }
    }
    if net.time.year_coverage_gap() > DEFAULT_HOURS_TOLERANCE {
        warn!(
            "snapshot weights cover {:.1} h, not a full year",
            net.time.total_hours()
        );
    }
    let n_t = net.time.n_snapshots();

    // profiles
    for p in &net.profiles {
        if p.values.len() != n_t {
            return Err(Error::validation(
                &p.id,
                format!("profile has {} values, expected {n_t}", p.values.len()),
            ));
        }
        if p.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(&p.id, "non-finite profile value"));
        }
    }
    let lookup_profile = |owner: &str, id: &str| -> Result<usize> {
        profile
            .get(id)
            .copied()
            .ok_or_else(|| Error::validation(owner, format!("unknown profile `{id}`")))
    };

    let mut demand_profiles = HashSet::new();
    for b in &net.buses {
        if let Some(p) = &b.demand_profile_ref {
            let pi = lookup_profile(&b.id, p)?;
            if net.profiles[pi].values.iter().any(|v| *v < 0.0) {
                return Err(Error::validation(p, "negative demand"));
            }
            demand_profiles.insert(pi);
        }
    }

    // AC lines
    for l in &net.ac_lines {
        require_bus(&bus, &l.id, &l.from_bus)?;
        require_bus(&bus, &l.id, &l.to_bus)?;
        if l.from_bus == l.to_bus {
            return Err(Error::validation(&l.id, "line joins a bus to itself"));
        }
        if !(l.f0 > 0.0) || l.f0 > l.f_max {
            return Err(Error::validation(&l.id, "capacity must satisfy 0 < F0 <= F_max"));
        }
        if !(l.r0_pu >= 0.0) {
            return Err(Error::validation(&l.id, "negative resistance"));
        }
        if !(l.x0_pu > 0.0) {
            return Err(Error::validation(&l.id, "reactance must be positive"));
        }
        if !(l.length > 0.0) {
            return Err(Error::validation(&l.id, "length must be positive"));
        }
        if !(l.base_mva > 0.0) {
            return Err(Error::validation(&l.id, "base_mva must be positive"));
        }
        let (from, to) = (&net.buses[bus[&l.from_bus]], &net.buses[bus[&l.to_bus]]);
        if from.component_label != to.component_label {
            return Err(Error::validation(&l.id, "cross-component AC line"));
        }
    }

    // DC links
    for l in &net.dc_links {
        require_bus(&bus, &l.id, &l.from_bus)?;
        require_bus(&bus, &l.id, &l.to_bus)?;
        if l.from_bus == l.to_bus {
            return Err(Error::validation(&l.id, "link joins a bus to itself"));
        }
        if !(l.efficiency > 0.0 && l.efficiency <= 1.0) {
            return Err(Error::validation(&l.id, "efficiency out of range"));
        }
        if !(l.f0 >= 0.0) || l.f0 > l.f_max {
            return Err(Error::validation(&l.id, "capacity must satisfy 0 <= F0 <= F_max"));
        }
        if !(l.length > 0.0) {
            return Err(Error::validation(&l.id, "length must be positive"));
        }
        let partner = dc_link
            .get(&l.reverse_partner_id)
            .map(|&i| &net.dc_links[i])
            .ok_or_else(|| Error::validation(&l.id, "missing reverse partner"))?;
        if partner.reverse_partner_id != l.id || partner.id == l.id {
            return Err(Error::validation(&l.id, "reverse partner does not point back"));
        }
        if partner.from_bus != l.to_bus || partner.to_bus != l.from_bus {
            return Err(Error::validation(&l.id, "reverse partner is not reversed"));
        }
        if partner.f0 != l.f0 || partner.f_max != l.f_max || partner.length != l.length {
            return Err(Error::validation(
                &l.id,
                "reverse partner differs in F0, F_max or length",
            ));
        }
    }

    // generators
    let mut availability_profiles = HashSet::new();
    for g in &net.generators {
        require_bus(&bus, &g.id, &g.bus)?;
        if let Some(p) = g.p_max {
            if !(p >= 0.0) {
                return Err(Error::validation(&g.id, "negative P_max"));
            }
        }
        if let Some(p0) = g.p0 {
            if !(p0 >= 0.0) || g.p_max.is_some_and(|m| p0 > m) {
                return Err(Error::validation(&g.id, "P0 must satisfy 0 <= P0 <= P_max"));
            }
        }
        if let Some(p) = &g.availability_profile {
            let pi = lookup_profile(&g.id, p)?;
            if net.profiles[pi].values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::validation(p, "availability outside [0, 1]"));
            }
            availability_profiles.insert(pi);
        }
    }
    if let Some(&pi) = demand_profiles.intersection(&availability_profiles).next() {
        return Err(Error::validation(
            &net.profiles[pi].id,
            "profile used both as demand and availability",
        ));
    }

    // storage
    for s in &net.storage {
        require_bus(&bus, &s.id, &s.bus)?;
        for (name, eta) in [
            ("eta_char", s.eta_char),
            ("eta_dis", s.eta_dis),
            ("eta_idle", s.eta_idle),
        ] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::validation(&s.id, format!("{name} out of range")));
            }
        }
        if s.c_char < 0.0 || s.c_dis < 0.0 || s.c_sto < 0.0 {
            return Err(Error::validation(&s.id, "negative storage cost"));
        }
        for v in [s.p0_char, s.p0_dis, s.e0].into_iter().flatten() {
            if !(v >= 0.0) {
                return Err(Error::validation(&s.id, "negative existing capacity"));
            }
        }
    }

    // AC components: union-find over lines, then check against labels
    let mut uf = UnionFind::new(net.buses.len());
    for l in &net.ac_lines {
        uf.union(bus[&l.from_bus], bus[&l.to_bus]);
    }
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, b) in net.buses.iter().enumerate() {
        by_label.entry(b.component_label.as_str()).or_default().push(i);
    }
    let mut components = Vec::with_capacity(by_label.len());
    let mut bus_component = vec![0; net.buses.len()];
    for (ci, (label, mut members)) in by_label.into_iter().enumerate() {
        let root = uf.find(members[0]);
        if let Some(&stray) = members.iter().find(|&&b| uf.find(b) != root) {
            return Err(Error::validation(
                &net.buses[stray].id,
                format!("component `{label}` is not AC-connected"),
            ));
        }
        members.sort_by(|&a, &b| net.buses[a].id.cmp(&net.buses[b].id));
        for &b in &members {
            bus_component[b] = ci;
        }
        components.push(AcComponent {
            label: label.to_string(),
            buses: members,
            lines: Vec::new(),
        });
    }
    for (li, l) in net.ac_lines.iter().enumerate() {
        components[bus_component[bus[&l.from_bus]]].lines.push(li);
    }

    Ok(NetworkIndex {
        bus,
        profile,
        dc_link,
        components,
        bus_component,
    })
}

/// Per-component summary produced by [`validate_connectivity`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub label: String,
    pub bus_count: usize,
    pub ac_line_count: usize,
    /// `|L| - |B| + 1` for the component.
    pub expected_cycles: usize,
    /// Buses of the component without any incident AC line.
    pub isolated_buses: Vec<String>,
}

/// Summarizes the AC components and rejects dead buses, i.e. buses with no
/// incident branch, generator, storage unit or demand.
pub fn validate_connectivity(net: &Network) -> Result<Vec<ComponentSummary>> {
    let n = net.buses.len();
    let mut ac_degree = vec![0usize; n];
    let mut attached = vec![false; n];
    for l in 0..net.ac_lines.len() {
        let (a, b) = net.ac_ends(l);
        ac_degree[a] += 1;
        ac_degree[b] += 1;
    }
    for i in 0..net.dc_links.len() {
        let (a, b) = net.dc_ends(i);
        attached[a] = true;
        attached[b] = true;
    }
    for g in &net.generators {
        attached[net.bus_idx(&g.bus)] = true;
    }
    for s in &net.storage {
        attached[net.bus_idx(&s.bus)] = true;
    }
    for (i, b) in net.buses.iter().enumerate() {
        if b.demand_profile_ref.is_some() {
            attached[i] = true;
        }
        if ac_degree[i] == 0 && !attached[i] {
            return Err(Error::validation(&b.id, "dead bus: nothing attached"));
        }
    }

    Ok(net
        .components()
        .iter()
        .map(|c| ComponentSummary {
            label: c.label.clone(),
            bus_count: c.buses.len(),
            ac_line_count: c.lines.len(),
            expected_cycles: c.lines.len() + 1 - c.buses.len(),
            isolated_buses: c
                .buses
                .iter()
                .filter(|&&b| ac_degree[b] == 0)
                .map(|&b| net.buses[b].id.clone())
                .collect(),
        })
        .collect())
}
