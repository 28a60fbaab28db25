//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use sssc_expansion::network::Network;

/// Connected groups of buses under AC lines, found by breadth-first search.
pub fn ac_islands(net: &Network) -> Vec<Vec<usize>> {
    let n = net.buses.len();
    let idx = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let mut adj = vec![Vec::new(); n];
    for l in &net.ac_lines {
        let (a, b) = (idx(&l.from_bus), idx(&l.to_bus));
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut islands = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        let mut members = Vec::new();
        while let Some(u) = q.pop_front() {
            members.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        members.sort_unstable();
        islands.push(members);
    }
    islands
}

/// `sum over islands of |E| - |V| + 1`.
pub fn expected_cycle_count(net: &Network) -> usize {
    let islands = ac_islands(net);
    net.ac_lines.len() + islands.len() - net.buses.len()
}

/// DC power flow by nodal angles: solves the reduced susceptance system of
/// each island (first bus as reference) and returns line flows in pu.
pub fn btheta_oracle(net: &Network, injection_pu: &[f64], x_pu: &[f64]) -> Vec<f64> {
    let idx = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let ends: Vec<(usize, usize)> = net
        .ac_lines
        .iter()
        .map(|l| (idx(&l.from_bus), idx(&l.to_bus)))
        .collect();
    let mut theta = vec![0.0; net.buses.len()];
    for island in ac_islands(net) {
        if island.len() < 2 {
            continue;
        }
        let pos = |b: usize| island.iter().position(|&m| m == b);
        let m = island.len() - 1;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (l, &(a, b)) in ends.iter().enumerate() {
            let (Some(pa), Some(pb)) = (pos(a), pos(b)) else { continue };
            let y = 1.0 / x_pu[l];
            for (p, q) in [(pa, pb), (pb, pa)] {
                if p > 0 {
                    bmat[(p - 1, p - 1)] += y;
                    if q > 0 {
                        bmat[(p - 1, q - 1)] -= y;
                    }
                }
            }
        }
        let rhs = DVector::from_iterator(m, island[1..].iter().map(|&b| injection_pu[b]));
        let sol = bmat.lu().solve(&rhs).expect("connected island has a regular reduced matrix");
        for (k, &b) in island[1..].iter().enumerate() {
            theta[b] = sol[k];
        }
    }
    ends.iter()
        .enumerate()
        .map(|(l, &(a, b))| (theta[a] - theta[b]) / x_pu[l])
        .collect()
}

/// Net AC injection per bus implied by a set of line flows.
pub fn divergence(net: &Network, flows: &[f64]) -> Vec<f64> {
    let idx = |id: &str| net.buses.iter().position(|b| b.id == id).unwrap();
    let mut inj = vec![0.0; net.buses.len()];
    for (l, line) in net.ac_lines.iter().enumerate() {
        inj[idx(&line.from_bus)] += flows[l];
        inj[idx(&line.to_bus)] -= flows[l];
    }
    inj
}

/// Least-squares line through `r f^2` on `[a, b]`.
pub fn loss_closed_form(r: f64, a: f64, b: f64) -> (f64, f64) {
    (r * (a + b), -r * (a * a + 4.0 * a * b + b * b) / 6.0)
}

/// Grid search for the largest transfer from b1 to b3 on the triangle
/// fixture (x = 1 on every line, limits 1, 1, 0.5 pu) with an SSSC of rating
/// `q` on the direct line.
///
/// With transfer `p` and series injection `s`, the loop equation gives
/// `f12 = f23 = (p - 2 s) / 3` and `f13 = (2 p + 2 s) / 3`.
pub fn triangle_transfer_grid(q: f64, p_cap: Option<f64>, p_step: f64) -> f64 {
    let p_hi = p_cap.unwrap_or(3.0);
    let n_p = (p_hi / p_step).round() as usize;
    let n_s = 400;
    let mut best: f64 = 0.0;
    for i in 0..=n_p {
        let p = i as f64 * p_step;
        let ok = (0..=n_s).any(|k| {
            let s = if q > 0.0 { -q + 2.0 * q * k as f64 / n_s as f64 } else { 0.0 };
            let side = (p - 2.0 * s) / 3.0;
            let direct = (2.0 * p + 2.0 * s) / 3.0;
            side.abs() <= 1.0 + 1e-12 && direct.abs() <= 0.5 + 1e-12
        });
        if ok {
            best = best.max(p);
        }
    }
    best
}
