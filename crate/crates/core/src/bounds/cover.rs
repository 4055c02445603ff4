use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::BoundsError;
use crate::graph::{Graph, Vertex};
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation, VarId};
use crate::rational::Rational;

pub const MULTIPARTITE_VERTEX_LIMIT: usize = 10;

/// A subgraph used in a fractional cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Subgraph {
    /// Center joined to each leaf.
    Star { center: Vertex, leaves: Vec<Vertex> },
    /// Every pair of vertices in different parts is joined.
    Multipartite { parts: Vec<Vec<Vertex>> },
}

impl Subgraph {
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = match self {
            Subgraph::Star { center, leaves } => std::iter::once(*center).chain(leaves.iter().copied()).collect(),
            Subgraph::Multipartite { parts } => parts.concat(),
        };
        out.sort_unstable();
        out
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        match self {
            Subgraph::Star { center, leaves } => leaves.iter().map(|&l| (l.min(*center), l.max(*center))).collect(),
            Subgraph::Multipartite { parts } => {
                let mut out = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    for q in &parts[i + 1..] {
                        for &u in p {
                            for &v in q {
                                out.push((u.min(v), u.max(v)));
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSubgraph {
    pub subgraph: Subgraph,
    pub weight: Rational,
}

/// A fractional cover of the edges together with the loads it induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub subgraphs: Vec<WeightedSubgraph>,
    pub max_load: Rational,
    /// Covering weight of each edge, in [`Graph::edges`] order.
    pub edge_coverage: Vec<Rational>,
    pub vertex_load: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub edge_coverage: Vec<Rational>,
    pub vertex_load: Vec<Rational>,
    pub max_load: Rational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("edge {0}-{1} is covered with weight {2} < 1")]
    UncoveredEdge(Vertex, Vertex, Rational),
    #[error("claimed max load {claimed}, recomputed {actual}")]
    LoadMismatch { claimed: Rational, actual: Rational },
    #[error("subgraph {0} is not a subgraph of the graph")]
    NotASubgraph(usize),
    #[error("subgraph {0} has negative weight")]
    NegativeWeight(usize),
}

fn loads(g: &Graph, subgraphs: &[WeightedSubgraph]) -> (Vec<Rational>, Vec<Rational>) {
    let mut cov = vec![Rational::zero(); g.m()];
    let mut load = vec![Rational::zero(); g.n()];
    for ws in subgraphs {
        for (u, v) in ws.subgraph.edges() {
            if let Some(i) = g.edge_index(u, v) {
                cov[i] += &ws.weight;
            }
        }
        for v in ws.subgraph.vertices() {
            load[v] += &ws.weight;
        }
    }
    (cov, load)
}

fn max_of(v: &[Rational]) -> Rational {
    v.iter().max().cloned().unwrap_or_default()
}

/// Recomputes coverage and loads from scratch and checks the claimed maximum.
pub fn verify_cover(g: &Graph, c: &CoverSolution) -> Result<CoverReport, CoverError> {
    for (i, ws) in c.subgraphs.iter().enumerate() {
        if ws.weight.is_negative() {
            return Err(CoverError::NegativeWeight(i));
        }
        let verts = ws.subgraph.vertices();
        let distinct = verts.windows(2).all(|w| w[0] != w[1]);
        let parts_ok = match &ws.subgraph {
            Subgraph::Star { .. } => true,
            Subgraph::Multipartite { parts } => parts.len() >= 2 && parts.iter().all(|p| !p.is_empty()),
        };
        if !distinct
            || !parts_ok
            || verts.iter().any(|&v| v >= g.n())
            || ws.subgraph.edges().iter().any(|&(u, v)| !g.has_edge(u, v))
        {
            return Err(CoverError::NotASubgraph(i));
        }
    }
    let (cov, load) = loads(g, &c.subgraphs);
    for (i, w) in cov.iter().enumerate() {
        if w < &Rational::one() {
            let (u, v) = g.edges()[i];
            return Err(CoverError::UncoveredEdge(u, v, w.clone()));
        }
    }
    let actual = max_of(&load);
    if actual != c.max_load {
        return Err(CoverError::LoadMismatch { claimed: c.max_load.clone(), actual });
    }
    Ok(CoverReport { edge_coverage: cov, vertex_load: load, max_load: actual })
}

fn finish(g: &Graph, subgraphs: Vec<WeightedSubgraph>) -> CoverSolution {
    let (edge_coverage, vertex_load) = loads(g, &subgraphs);
    let max_load = max_of(&vertex_load);
    CoverSolution { subgraphs, max_load, edge_coverage, vertex_load }
}

/// Minimum over fractional star covers of the maximum vertex load.
///
/// Solved in the compact form: `y[v,e]` is the weight of stars centered at
/// `v` that contain `e`, `c[v]` the total weight centered at `v`. An explicit
/// star family is rebuilt by nesting each center's edges in decreasing `y`.
pub fn star_cover_minmax(g: &Graph) -> Result<CoverSolution, BoundsError> {
    let one = Rational::one;
    let mut p = LpProblem::new();
    let t = p.add_nonneg("t");
    let c: Vec<VarId> = (0..g.n()).map(|v| p.add_nonneg(format!("c{v}"))).collect();
    // y[(v, edge index)]
    let mut y: BTreeMap<(Vertex, usize), VarId> = BTreeMap::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        y.insert((u, i), p.add_nonneg(format!("y{u}_{u}-{v}")));
        y.insert((v, i), p.add_nonneg(format!("y{v}_{u}-{v}")));
    }
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        p.add_constraint(vec![(y[&(u, i)], one()), (y[&(v, i)], one())], Relation::Ge, one());
    }
    for (&(v, _), &var) in &y {
        p.add_constraint(vec![(c[v], one()), (var, -one())], Relation::Ge, Rational::zero());
    }
    for w in 0..g.n() {
        let mut row = vec![(t, one()), (c[w], -one())];
        for &u in g.neighbors(w) {
            let e = g.edge_index(u, w).expect("neighbor edge exists");
            row.push((y[&(u, e)], -one()));
        }
        p.add_constraint(row, Relation::Ge, Rational::zero());
    }
    p.set_objective(vec![(t, one())]);
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(BoundsError::Solver(format!("{:?}", sol.status)));
    }

    let mut subgraphs = Vec::new();
    for v in 0..g.n() {
        let mut inc: Vec<(Rational, Vertex)> = g
            .neighbors(v)
            .iter()
            .map(|&u| (sol.primal[y[&(v, g.edge_index(u, v).unwrap())]].clone(), u))
            .filter(|(w, _)| w.is_positive())
            .collect();
        inc.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for k in 0..inc.len() {
            let next = inc.get(k + 1).map(|x| x.0.clone()).unwrap_or_default();
            let weight = &inc[k].0 - &next;
            if weight.is_positive() {
                let mut leaves: Vec<Vertex> = inc[..=k].iter().map(|x| x.1).collect();
                leaves.sort_unstable();
                subgraphs.push(WeightedSubgraph { subgraph: Subgraph::Star { center: v, leaves }, weight });
            }
        }
    }
    let out = finish(g, subgraphs);
    debug_assert_eq!(Some(&out.max_load), sol.objective.as_ref());
    Ok(out)
}

/// Parts of the densest complete multipartite subgraph spanning `verts`:
/// the connected components of the complement of the induced subgraph.
fn complement_components(g: &Graph, verts: &[Vertex]) -> Vec<Vec<Vertex>> {
    let k = verts.len();
    let mut comp = vec![usize::MAX; k];
    let mut parts = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = parts.len();
        comp[s] = id;
        let mut stack = vec![s];
        let mut part = Vec::new();
        while let Some(i) = stack.pop() {
            part.push(verts[i]);
            for j in 0..k {
                if comp[j] == usize::MAX && !g.has_edge(verts[i], verts[j]) {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

/// Minimum over fractional covers by complete multipartite subgraphs of the
/// maximum vertex load. Each vertex subset contributes the complete
/// multipartite graph whose parts are the complement components of its
/// induced subgraph; every other complete multipartite subgraph on the same
/// vertex set has a subset of its edges.
pub fn multipartite_cover_minmax(g: &Graph) -> Result<CoverSolution, BoundsError> {
    let n = g.n();
    if n > MULTIPARTITE_VERTEX_LIMIT {
        return Err(BoundsError::SizeLimit { size: n, limit: MULTIPARTITE_VERTEX_LIMIT });
    }
    let one = Rational::one;
    let mut candidates: Vec<Subgraph> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let verts: Vec<Vertex> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let parts = complement_components(g, &verts);
        if parts.len() >= 2 {
            candidates.push(Subgraph::Multipartite { parts });
        }
    }
    let mut p = LpProblem::new();
    let t = p.add_nonneg("t");
    let w: Vec<VarId> = (0..candidates.len()).map(|i| p.add_nonneg(format!("w{i}"))).collect();
    let mut edge_rows: Vec<Vec<(VarId, Rational)>> = vec![Vec::new(); g.m()];
    let mut vertex_rows: Vec<Vec<(VarId, Rational)>> = (0..n).map(|_| vec![(t, one())]).collect();
    for (i, s) in candidates.iter().enumerate() {
        for (u, v) in s.edges() {
            edge_rows[g.edge_index(u, v).expect("cross pairs are edges")].push((w[i], one()));
        }
        for v in s.vertices() {
            vertex_rows[v].push((w[i], -one()));
        }
    }
    for row in edge_rows {
        p.add_constraint(row, Relation::Ge, one());
    }
    for row in vertex_rows {
        p.add_constraint(row, Relation::Ge, Rational::zero());
    }
    p.set_objective(vec![(t, one())]);
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(BoundsError::Solver(format!("{:?}", sol.status)));
    }
    let subgraphs = candidates
        .into_iter()
        .zip(&w)
        .filter(|(_, &var)| sol.primal[var].is_positive())
        .map(|(subgraph, &var)| WeightedSubgraph { subgraph, weight: sol.primal[var].clone() })
        .collect();
    Ok(finish(g, subgraphs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn star_cover_cycle_and_path() {
        let c6 = Graph::cycle(6);
        let s = star_cover_minmax(&c6).unwrap();
        assert_eq!(s.max_load, q(3, 2));
        assert_eq!(verify_cover(&c6, &s).unwrap().max_load, q(3, 2));

        let p5 = Graph::path(5);
        let s = star_cover_minmax(&p5).unwrap();
        assert!(s.max_load <= q(2, 1));
        verify_cover(&p5, &s).unwrap();
    }

    #[test]
    fn multipartite_examples() {
        assert_eq!(multipartite_cover_minmax(&Graph::complete(4)).unwrap().max_load, q(1, 1));
        assert_eq!(multipartite_cover_minmax(&Graph::cycle(4)).unwrap().max_load, q(1, 1));
        let c6 = Graph::cycle(6);
        let s = multipartite_cover_minmax(&c6).unwrap();
        assert_eq!(s.max_load, q(3, 2));
        verify_cover(&c6, &s).unwrap();
        assert!(matches!(multipartite_cover_minmax(&Graph::cycle(11)), Err(BoundsError::SizeLimit { .. })));
    }

    #[test]
    fn verify_cover_examples() {
        let c6 = Graph::cycle(6);
        let half_stars: Vec<WeightedSubgraph> = (0..6)
            .map(|v| WeightedSubgraph {
                subgraph: Subgraph::Star { center: v, leaves: vec![(v + 5) % 6, (v + 1) % 6] },
                weight: q(1, 2),
            })
            .collect();
        let claimed =
            CoverSolution { subgraphs: half_stars, max_load: q(3, 2), edge_coverage: vec![], vertex_load: vec![] };
        let report = verify_cover(&c6, &claimed).unwrap();
        assert!(report.edge_coverage.iter().all(|w| *w == q(1, 1)));
        assert_eq!(report.max_load, q(3, 2));

        let empty = CoverSolution { subgraphs: vec![], max_load: q(0, 1), edge_coverage: vec![], vertex_load: vec![] };
        assert!(matches!(verify_cover(&c6, &empty), Err(CoverError::UncoveredEdge(..))));

        let one_star = CoverSolution {
            subgraphs: vec![WeightedSubgraph {
                subgraph: Subgraph::Star { center: 0, leaves: vec![1, 5] },
                weight: q(1, 1),
            }],
            max_load: q(1, 1),
            edge_coverage: vec![],
            vertex_load: vec![],
        };
        assert!(matches!(verify_cover(&c6, &one_star), Err(CoverError::UncoveredEdge(1, 2, _))));

        let mut wrong = claimed.clone();
        wrong.max_load = q(1, 1);
        assert!(matches!(verify_cover(&c6, &wrong), Err(CoverError::LoadMismatch { .. })));

        let non_edge = CoverSolution {
            subgraphs: vec![WeightedSubgraph {
                subgraph: Subgraph::Star { center: 0, leaves: vec![2] },
                weight: q(1, 1),
            }],
            max_load: q(1, 1),
            edge_coverage: vec![],
            vertex_load: vec![],
        };
        assert_eq!(verify_cover(&c6, &non_edge), Err(CoverError::NotASubgraph(0)));
    }

    #[test]
    fn isolated_vertices_and_empty_graph() {
        let g = Graph::empty(3);
        assert_eq!(star_cover_minmax(&g).unwrap().max_load, q(0, 1));
        assert_eq!(multipartite_cover_minmax(&g).unwrap().max_load, q(0, 1));
    }
}
