//! Fundamental cycle basis of the AC network and the angle-based (B-theta)
//! power flow used to cross-check the cycle formulation.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::Network;

/// One signed line of a cycle. `sign` is +1 when the cycle traverses the
/// line from its `from_bus` to its `to_bus` and -1 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleEdge {
    pub line: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    /// Label of the AC component the cycle lives in.
    pub component: String,
    /// Edges in traversal order, starting with the non-tree edge.
    pub edges: Vec<CycleEdge>,
}

impl Cycle {
    /// Entry of the cycle incidence matrix for `line`.
    pub fn coefficient(&self, line: usize) -> i8 {
        self.edges
            .iter()
            .find(|e| e.line == line)
            .map_or(0, |e| e.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CycleBasis {
    pub cycles: Vec<Cycle>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Signed-edge listing by line id, handy for debugging and reports.
    pub fn describe(&self, net: &Network) -> Vec<Vec<(String, i8)>> {
        self.cycles
            .iter()
            .map(|c| {
                c.edges
                    .iter()
                    .map(|e| (net.ac_lines[e.line].id.clone(), e.sign))
                    .collect()
            })
            .collect()
    }
}

/// Walks `cycle` from the start of its first edge and reports whether the
/// signed edge sequence returns to the starting bus.
pub fn cycle_is_closed(net: &Network, cycle: &Cycle) -> bool {
    let Some(first) = cycle.edges.first() else {
        return false;
    };
    let oriented = |e: &CycleEdge| {
        let (a, b) = net.ac_ends(e.line);
        if e.sign > 0 {
            (a, b)
        } else {
            (b, a)
        }
    };
    let (start, mut at) = oriented(first);
    for e in &cycle.edges[1..] {
        let (a, b) = oriented(e);
        if a != at {
            return false;
        }
        at = b;
    }
    at == start
}

/// Builds a fundamental cycle basis, one block per AC component.
///
/// The spanning tree of each component is grown breadth-first from its
/// lexicographically smallest bus id, visiting incident lines in line-id
/// order. Each non-tree line closes one cycle, oriented so that the non-tree
/// line carries +1; cycles are ordered by component label, then by the id of
/// their non-tree line.
pub fn build_cycle_basis(net: &Network) -> CycleBasis {
    let n = net.buses.len();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for l in 0..net.ac_lines.len() {
        let (a, b) = net.ac_ends(l);
        adjacency[a].push((l, b));
        adjacency[b].push((l, a));
    }
    for adj in adjacency.iter_mut() {
        adj.sort_by(|x, y| net.ac_lines[x.0].id.cmp(&net.ac_lines[y.0].id));
    }

    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut tree_line = vec![false; net.ac_lines.len()];
    let mut cycles = Vec::new();

    for comp in net.components() {
        let root = comp.buses[0];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(l, v) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, l));
                    depth[v] = depth[u] + 1;
                    tree_line[l] = true;
                    queue.push_back(v);
                }
            }
        }

        let mut chords: Vec<usize> = comp.lines.iter().copied().filter(|&l| !tree_line[l]).collect();
        chords.sort_by(|&a, &b| net.ac_lines[a].id.cmp(&net.ac_lines[b].id));

        for chord in chords {
            let (from, to) = net.ac_ends(chord);
            let mut edges = vec![CycleEdge { line: chord, sign: 1 }];

            // climb from both ends to the lowest common ancestor
            let (mut a, mut b) = (to, from);
            let mut up_from_to = Vec::new();
            let mut up_from_from = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let (p, l) = parent[a].expect("non-root has a parent");
                    up_from_to.push((a, p, l));
                    a = p;
                } else {
                    let (p, l) = parent[b].expect("non-root has a parent");
                    up_from_from.push((b, p, l));
                    b = p;
                }
            }
            let sign_for = |l: usize, src: usize| -> i8 {
                if net.ac_ends(l).0 == src {
                    1
                } else {
                    -1
                }
            };
            // `to` -> lca, traversing child -> parent
            for &(child, _, l) in &up_from_to {
                edges.push(CycleEdge { line: l, sign: sign_for(l, child) });
            }
            // lca -> `from`, traversing parent -> child
            for &(_, par, l) in up_from_from.iter().rev() {
                edges.push(CycleEdge { line: l, sign: sign_for(l, par) });
            }
            cycles.push(Cycle {
                component: comp.label.clone(),
                edges,
            });
        }
    }
    CycleBasis { cycles }
}

/// Bus angles and branch flows of a B-theta power flow solve.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSolution {
    /// `theta[t][b]` in radians; each component's smallest bus id is the
    /// zero-angle reference.
    pub theta: Vec<Vec<f64>>,
    /// `flows[t][l]` in per-unit, `(theta_from - theta_to) / x`.
    pub flows: Vec<Vec<f64>>,
}

/// Solves the lossless angle-based power flow for each snapshot.
///
/// `injections[t][b]` are net injections in per-unit and `reactances[l]` the
/// series reactance of each AC line. Each component's injections must sum to
/// zero.
pub fn solve_btheta_flows(
    net: &Network,
    injections: &[Vec<f64>],
    reactances: &[f64],
) -> Result<AngleSolution> {
    if reactances.len() != net.ac_lines.len() {
        return Err(Error::Domain(format!(
            "expected {} reactances, got {}",
            net.ac_lines.len(),
            reactances.len()
        )));
    }
    if let Some((l, x)) = reactances.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(Error::Domain(format!(
            "reactance of `{}` must be positive, got {x}",
            net.ac_lines[l].id
        )));
    }
    let n = net.buses.len();
    let n_t = injections.len();
    let mut theta = vec![vec![0.0; n]; n_t];

    for comp in net.components() {
        let mut local = vec![usize::MAX; n];
        for (k, &b) in comp.buses.iter().enumerate() {
            local[b] = k;
        }
        let m = comp.buses.len() - 1;
        let lu = if m > 0 {
            let mut bmat = DMatrix::<f64>::zeros(m, m);
            for &l in &comp.lines {
                let (a, b) = net.ac_ends(l);
                let y = 1.0 / reactances[l];
                let (ia, ib) = (local[a], local[b]);
                // row/column 0 is the reference bus and is dropped
                if ia > 0 {
                    bmat[(ia - 1, ia - 1)] += y;
                }
                if ib > 0 {
                    bmat[(ib - 1, ib - 1)] += y;
                }
                if ia > 0 && ib > 0 {
                    bmat[(ia - 1, ib - 1)] -= y;
                    bmat[(ib - 1, ia - 1)] -= y;
                }
            }
            Some(bmat.lu())
        } else {
            None
        };

        for (t, inj) in injections.iter().enumerate() {
            if inj.len() != n {
                return Err(Error::Domain(format!(
                    "snapshot {t}: expected {n} injections, got {}",
                    inj.len()
                )));
            }
            let net_inj: f64 = comp.buses.iter().map(|&b| inj[b]).sum();
            let scale: f64 = comp.buses.iter().map(|&b| inj[b].abs()).sum::<f64>().max(1.0);
            if net_inj.abs() > 1e-9 * scale {
                return Err(Error::SingularSystem {
                    component: comp.label.clone(),
                    message: format!("snapshot {t}: net injection {net_inj:e} is not zero"),
                });
            }
            if let Some(lu) = &lu {
                let rhs = DVector::from_iterator(m, comp.buses[1..].iter().map(|&b| inj[b]));
                let sol = lu.solve(&rhs).ok_or_else(|| Error::SingularSystem {
                    component: comp.label.clone(),
                    message: "susceptance matrix is singular".into(),
                })?;
                for (k, &b) in comp.buses[1..].iter().enumerate() {
                    theta[t][b] = sol[k];
                }
            }
        }
    }

    let flows = theta
        .iter()
        .map(|th| {
            (0..net.ac_lines.len())
                .map(|l| {
                    let (a, b) = net.ac_ends(l);
                    (th[a] - th[b]) / reactances[l]
                })
                .collect()
        })
        .collect();
    Ok(AngleSolution { theta, flows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_network, triangle, two_triangles};
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_has_one_cycle_with_expected_signs() {
        let net = triangle();
        let basis = build_cycle_basis(&net);
        assert_eq!(basis.len(), 1);
        let mut desc = basis.describe(&net)[0].clone();
        desc.sort();
        assert_eq!(
            desc,
            vec![("L12".to_string(), 1), ("L13".to_string(), -1), ("L23".to_string(), 1)]
        );
        assert!(cycle_is_closed(&net, &basis.cycles[0]));
        // non-tree edge carries +1
        assert_eq!(basis.cycles[0].edges[0].sign, 1);
    }

    #[test]
    fn disjoint_triangles_give_two_cycles() {
        let net = two_triangles();
        let basis = build_cycle_basis(&net);
        assert_eq!(basis.len(), 2);
        assert_ne!(basis.cycles[0].component, basis.cycles[1].component);
    }

    #[test]
    fn path_graph_has_empty_basis() {
        assert!(build_cycle_basis(&path_network(4)).is_empty());
    }

    #[test]
    fn btheta_triangle_unit_reactances() {
        let net = triangle();
        let inj = vec![vec![1.0, 0.0, -1.0]];
        let sol = solve_btheta_flows(&net, &inj, &[1.0, 1.0, 1.0]).unwrap();
        // line order: L12, L23, L13
        assert_abs_diff_eq!(sol.flows[0][0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.flows[0][1], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.flows[0][2], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn btheta_triangle_heavier_direct_line() {
        let net = triangle();
        let inj = vec![vec![1.0, 0.0, -1.0]];
        let sol = solve_btheta_flows(&net, &inj, &[1.0, 1.0, 2.0]).unwrap();
        for f in &sol.flows[0] {
            assert_abs_diff_eq!(*f, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn btheta_zero_injection_zero_flow() {
        let net = triangle();
        let sol = solve_btheta_flows(&net, &[vec![0.0; 3]], &[1.0, 1.0, 1.0]).unwrap();
        assert!(sol.flows[0].iter().all(|f| *f == 0.0));
    }

    #[test]
    fn btheta_rejects_unbalanced_component() {
        let net = triangle();
        let err = solve_btheta_flows(&net, &[vec![1.0, 0.0, 0.0]], &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }

    #[test]
    fn btheta_flows_satisfy_kvl_on_basis() {
        let net = triangle();
        let x = [0.3, 0.7, 1.1];
        let sol = solve_btheta_flows(&net, &[vec![0.4, 0.5, -0.9]], &x).unwrap();
        for c in &build_cycle_basis(&net).cycles {
            let s: f64 = c.edges.iter().map(|e| e.sign as f64 * x[e.line] * sol.flows[0][e.line]).sum();
            assert!(s.abs() < 1e-12);
        }
    }
}
