//! The recursive family of `d`-regular bipartite graphs, π-graphs, the
//! `H(m, G, π)` product and the large-girth recursion.

mod dyn_graph;
mod large_girth;
mod pi_graph;

pub use large_girth::{
    build_large_girth, grow_factor, guaranteed_sizes, lift_pi, LargeGirth, LargeGirthOptions, LevelReport, SizeBound,
    SizePolicy,
};
pub use pi_graph::{build_pi_graph, build_pi_graph_with, guaranteed_n, PiGraph, PiGraphOptions};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{check_regular_bipartite, verify_one_factor, Bipartition, Graph, GraphError, OneFactor, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("bad size {0}: cycle length must be even and at least 6")]
    BadSize(usize),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("copies have different levels")]
    LevelMismatch,
    #[error("{0} copies given, at least {1} needed")]
    TooFewCopies(usize, usize),
    #[error("not a bijection from A to B: {0}")]
    NotBijection(String),
    #[error("graph carries no recursion metadata")]
    StructureUnknown,
    #[error("retries exhausted after {attempts} attempts: {detail}")]
    RetriesExhausted { attempts: usize, detail: String },
    #[error("infeasible within budget at level {level}: {detail}")]
    InfeasibleAtBudget { level: usize, detail: String },
    #[error("invalid family member: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A bijection `A -> B` given as `(a, π(a))` pairs sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bijection {
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl Bijection {
    pub fn new(mut pairs: Vec<(Vertex, Vertex)>) -> Self {
        pairs.sort_unstable();
        Bijection { pairs }
    }

    /// Dense lookup `a -> π(a)` over `0..n`, checking that the pairs map `A`
    /// onto `B` one-to-one.
    pub fn table(&self, bip: &Bipartition, n: usize) -> Result<Vec<Vertex>, FamilyError> {
        if self.pairs.len() != bip.a.len() || bip.a.len() != bip.b.len() {
            return Err(FamilyError::SizeMismatch(format!(
                "map has {} pairs, sides have {} and {} vertices",
                self.pairs.len(),
                bip.a.len(),
                bip.b.len()
            )));
        }
        let in_a = bip.a_mask(n);
        let mut map = vec![usize::MAX; n];
        let mut hit = vec![false; n];
        for &(a, b) in &self.pairs {
            if a >= n || b >= n || !in_a[a] || in_a[b] {
                return Err(FamilyError::NotBijection(format!("pair ({a}, {b}) does not go from A to B")));
            }
            if map[a] != usize::MAX || hit[b] {
                return Err(FamilyError::NotBijection(format!("pair ({a}, {b}) repeats a vertex")));
            }
            map[a] = b;
            hit[b] = true;
        }
        Ok(map)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.pairs.iter().copied()
    }
}

/// A member of the family with the metadata that witnesses membership.
///
/// Level-`d` members with `d >= 3` consist of `n_d` copies of a level-`(d-1)`
/// member laid out as consecutive vertex ranges, and each copy is laid out
/// the same way, so the structure of every sub-level is recoverable with
/// [`GdGraph::copy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GdGraph {
    pub graph: Graph,
    pub d: usize,
    /// `n_2, ..., n_d`.
    pub part_sizes: Vec<usize>,
    pub bipartition: Bipartition,
    /// Top-level copy ranges `[lo, hi)`; empty for cycles.
    pub copies: Vec<(Vertex, Vertex)>,
    /// `factors[i]` pairs `B^i` with `A^{i+1}` as `(b, a)`.
    pub factors: Vec<OneFactor>,
    /// `false` when some level has fewer than 5 copies.
    pub member: bool,
}

/// JSON sidecar stored next to an edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GdSidecar {
    pub d: usize,
    pub part_sizes: Vec<usize>,
    pub bipartition: Bipartition,
    pub copies: Vec<(Vertex, Vertex)>,
    pub factors: Vec<OneFactor>,
    #[serde(default = "default_true")]
    pub member: bool,
}

fn default_true() -> bool {
    true
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, FamilyError> {
    Err(FamilyError::Invalid(msg.into()))
}

impl GdGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn sidecar(&self) -> GdSidecar {
        GdSidecar {
            d: self.d,
            part_sizes: self.part_sizes.clone(),
            bipartition: self.bipartition.clone(),
            copies: self.copies.clone(),
            factors: self.factors.clone(),
            member: self.member,
        }
    }

    /// Rebuilds a member from an edge list and its sidecar, then validates it.
    pub fn from_sidecar(graph: Graph, s: GdSidecar) -> Result<Self, FamilyError> {
        let g = GdGraph {
            graph,
            d: s.d,
            part_sizes: s.part_sizes,
            bipartition: s.bipartition,
            copies: s.copies,
            factors: s.factors,
            member: s.member,
        };
        g.validate()?;
        Ok(g)
    }

    /// Size of one top-level copy (the whole graph for cycles).
    pub fn copy_size(&self) -> usize {
        self.copies.first().map_or(self.n(), |&(lo, hi)| hi - lo)
    }

    /// Copy index of every vertex at the top level.
    pub fn copy_of(&self, v: Vertex) -> usize {
        v / self.copy_size()
    }

    /// `A^i` and `B^i` of the top-level copy `i`.
    pub fn copy_sides(&self, i: usize) -> (Vec<Vertex>, Vec<Vertex>) {
        let (lo, hi) = self.copies[i];
        let a = self.bipartition.a.iter().copied().filter(|&v| v >= lo && v < hi).collect();
        let b = self.bipartition.b.iter().copied().filter(|&v| v >= lo && v < hi).collect();
        (a, b)
    }

    /// Top-level copy `i` as a standalone member, relabeled to start at 0.
    pub fn copy(&self, i: usize) -> Result<GdGraph, FamilyError> {
        if self.d < 3 || self.copies.is_empty() {
            return Err(FamilyError::StructureUnknown);
        }
        let &(lo, hi) = self.copies.get(i).ok_or_else(|| FamilyError::Invalid(format!("no copy {i}")))?;
        let verts: Vec<Vertex> = (lo..hi).collect();
        let graph = self.graph.induced(&verts);
        let (a, b) = self.copy_sides(i);
        let bipartition = Bipartition::new(a.iter().map(|v| v - lo).collect(), b.iter().map(|v| v - lo).collect());
        let d = self.d - 1;
        let part_sizes = self.part_sizes[..self.part_sizes.len() - 1].to_vec();
        let (copies, factors) = if d >= 3 {
            derive_structure(&graph, &bipartition, *part_sizes.last().expect("d >= 3 has parts"))?
        } else {
            (Vec::new(), Vec::new())
        };
        let member = part_sizes.iter().skip(1).all(|&p| p >= 5);
        Ok(GdGraph { graph, d, part_sizes, bipartition, copies, factors, member })
    }

    /// Checks every membership invariant: regularity, bipartition, vertex
    /// count, the junction 1-factors, and recursively every copy.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let n = self.n();
        if self.d < 2 || self.part_sizes.len() != self.d - 1 {
            return invalid(format!("level {} with part sizes {:?}", self.d, self.part_sizes));
        }
        let product = self.part_sizes.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p));
        if product != Some(n) {
            return invalid(format!("{n} vertices, part sizes {:?}", self.part_sizes));
        }
        let n2 = self.part_sizes[0];
        if n2 % 2 == 1 || n2 < 6 {
            return invalid(format!("cycle length {n2}"));
        }
        check_regular_bipartite(&self.graph, self.d)?;
        if !self.bipartition.is_valid_for(&self.graph) || self.bipartition.a.len() != self.bipartition.b.len() {
            return invalid("bipartition does not fit the graph");
        }
        if self.d == 2 {
            if self.graph.components().len() != 1 {
                return invalid("level-2 member is not a single cycle");
            }
            return Ok(());
        }
        let m = *self.part_sizes.last().expect("nonempty");
        let s = n / m;
        let expected: Vec<(Vertex, Vertex)> = (0..m).map(|i| (i * s, (i + 1) * s)).collect();
        if self.copies != expected {
            return invalid("copy ranges are not consecutive blocks of equal size");
        }
        if self.factors.len() != m {
            return invalid(format!("{} factors for {m} copies", self.factors.len()));
        }
        let mut junction_edges = 0;
        for i in 0..m {
            let (_, b_i) = self.copy_sides(i);
            let (a_next, _) = self.copy_sides((i + 1) % m);
            if let Err(e) = verify_one_factor(&self.graph, &b_i, &a_next, &self.factors[i]) {
                return invalid(format!("junction {i}: {e}"));
            }
            junction_edges += self.factors[i].len();
        }
        let internal = self.graph.edges().iter().filter(|&&(u, v)| u / s == v / s).count();
        if internal + junction_edges != self.graph.m() {
            return invalid("edges outside copies and junction factors");
        }
        for i in 0..m {
            self.copy(i)?.validate()?;
        }
        Ok(())
    }

    /// The vertex map `v ↦ v mod (copy size)` onto one copy.
    pub fn projection(&self) -> Vec<Vertex> {
        let s = self.copy_size();
        (0..self.n()).map(|v| v % s).collect()
    }
}

/// Recovers copy ranges and junction factors of a contiguous layout.
fn derive_structure(
    graph: &Graph,
    bip: &Bipartition,
    m: usize,
) -> Result<(Vec<(Vertex, Vertex)>, Vec<OneFactor>), FamilyError> {
    let n = graph.n();
    if m == 0 || n % m != 0 {
        return invalid(format!("{n} vertices do not split into {m} copies"));
    }
    let s = n / m;
    let in_a = bip.a_mask(n);
    let copies = (0..m).map(|i| (i * s, (i + 1) * s)).collect();
    let mut factors = vec![Vec::new(); m];
    for &(u, v) in graph.edges() {
        let (b, a) = if in_a[u] { (v, u) } else { (u, v) };
        if b / s != a / s && (b / s + 1) % m == a / s {
            factors[b / s].push((b, a));
        }
    }
    let factors = factors
        .into_iter()
        .map(|mut f| {
            f.sort_unstable();
            OneFactor::new(f)
        })
        .collect();
    Ok((copies, factors))
}

/// The cycle `0 - 1 - ... - (n-1) - 0` with `A` the even vertices.
pub fn build_cycle(n: usize) -> Result<GdGraph, FamilyError> {
    if n % 2 == 1 || n < 6 {
        return Err(FamilyError::BadSize(n));
    }
    Ok(GdGraph {
        graph: Graph::cycle(n),
        d: 2,
        part_sizes: vec![n],
        bipartition: Bipartition::new((0..n).step_by(2).collect(), (1..n).step_by(2).collect()),
        copies: Vec::new(),
        factors: Vec::new(),
        member: true,
    })
}

/// How the junction 1-factors of [`extend_family`] are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorChoice {
    /// Independent uniform bijections `B^i -> A^{i+1}` from this seed.
    Random(u64),
    /// Every junction joins `a` in copy `i+1` to `π(a)` in copy `i`.
    Induced(Bijection),
    /// One factor per junction in local ids: `(b in copy i, a in copy i+1)`.
    Explicit(Vec<OneFactor>),
}

/// Joins `m >= 5` equal-size members of the same level into one of the
/// next level, adding a 1-factor between `B^i` and `A^{i+1}` for every `i`.
/// The copies need not be isomorphic.
pub fn extend_family(copies: &[GdGraph], factors: &FactorChoice) -> Result<GdGraph, FamilyError> {
    join(copies, factors, 5)
}

fn join(copies: &[GdGraph], choice: &FactorChoice, min_copies: usize) -> Result<GdGraph, FamilyError> {
    let m = copies.len();
    if m < min_copies {
        return Err(FamilyError::TooFewCopies(m, min_copies));
    }
    let first = &copies[0];
    let s = first.n();
    for c in copies {
        if c.d != first.d {
            return Err(FamilyError::LevelMismatch);
        }
        if c.n() != s || c.part_sizes != first.part_sizes {
            return Err(FamilyError::SizeMismatch(format!("copy sizes {:?} and {:?}", first.part_sizes, c.part_sizes)));
        }
    }

    let local: Vec<Vec<(Vertex, Vertex)>> = match choice {
        FactorChoice::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..m)
                .map(|i| {
                    let mut a = copies[(i + 1) % m].bipartition.a.clone();
                    a.shuffle(&mut rng);
                    copies[i].bipartition.b.iter().copied().zip(a).collect()
                })
                .collect()
        }
        FactorChoice::Induced(pi) => {
            let mut tables = Vec::with_capacity(m);
            for c in copies {
                tables.push(pi.table(&c.bipartition, s)?);
            }
            (0..m)
                .map(|i| {
                    let next = &copies[(i + 1) % m];
                    next.bipartition.a.iter().map(|&a| (tables[i][a], a)).collect()
                })
                .collect()
        }
        FactorChoice::Explicit(fs) => {
            if fs.len() != m {
                return Err(FamilyError::SizeMismatch(format!("{} factors for {m} copies", fs.len())));
            }
            fs.iter().map(|f| f.pairs.clone()).collect()
        }
    };

    let mut edges = Vec::with_capacity(m * first.graph.m() + m * s / 2);
    for (i, c) in copies.iter().enumerate() {
        edges.extend(c.graph.edges().iter().map(|&(u, v)| (i * s + u, i * s + v)));
    }
    let mut factors = Vec::with_capacity(m);
    for (i, pairs) in local.iter().enumerate() {
        let (b_side, a_side) = (&copies[i].bipartition.b, &copies[(i + 1) % m].bipartition.a);
        let mut seen_b = vec![false; s];
        let mut seen_a = vec![false; s];
        for &(b, a) in pairs {
            if b >= s || a >= s || b_side.binary_search(&b).is_err() || a_side.binary_search(&a).is_err() {
                return Err(FamilyError::NotBijection(format!("junction {i}: pair ({b}, {a}) leaves B^i x A^(i+1)")));
            }
            if seen_b[b] || seen_a[a] {
                return Err(FamilyError::NotBijection(format!("junction {i}: pair ({b}, {a}) repeats a vertex")));
            }
            seen_b[b] = true;
            seen_a[a] = true;
        }
        if pairs.len() != b_side.len() {
            return Err(FamilyError::NotBijection(format!(
                "junction {i}: {} pairs for |B| = {}",
                pairs.len(),
                b_side.len()
            )));
        }
        let global: Vec<(Vertex, Vertex)> = pairs.iter().map(|&(b, a)| (i * s + b, ((i + 1) % m) * s + a)).collect();
        edges.extend(global.iter().copied());
        let mut global = global;
        global.sort_unstable();
        factors.push(OneFactor::new(global));
    }
    let graph = Graph::new(m * s, edges)?;
    let mut a = Vec::with_capacity(m * s / 2);
    let mut b = Vec::with_capacity(m * s / 2);
    for (i, c) in copies.iter().enumerate() {
        a.extend(c.bipartition.a.iter().map(|v| i * s + v));
        b.extend(c.bipartition.b.iter().map(|v| i * s + v));
    }
    let mut part_sizes = first.part_sizes.clone();
    part_sizes.push(m);
    Ok(GdGraph {
        graph,
        d: first.d + 1,
        part_sizes,
        bipartition: Bipartition::new(a, b),
        copies: (0..m).map(|i| (i * s, (i + 1) * s)).collect(),
        factors,
        member: m >= 5 && copies.iter().all(|c| c.member),
    })
}

/// Member with the given part sizes `n_2, ..., n_d` and random junctions.
pub fn build_gd(parts: &[usize], seed: u64) -> Result<GdGraph, FamilyError> {
    let (&n2, rest) = parts.split_first().ok_or_else(|| FamilyError::SizeMismatch("no part sizes".into()))?;
    let mut g = build_cycle(n2)?;
    for (level, &m) in rest.iter().enumerate() {
        let copies = vec![g; m];
        g = extend_family(&copies, &FactorChoice::Random(seed.wrapping_add(level as u64)))?;
    }
    Ok(g)
}

/// `H(m, G, π)`: `m` copies of `g` where `a` in copy `j` is joined to `π(a)`
/// in copy `j + 1`. Copy `j` occupies block `m - 1 - j`, which makes every
/// junction run from `B` of one block to `A` of the next, so the result is
/// [`extend_family`] on identical copies with [`FactorChoice::Induced`].
/// Family membership is flagged only for `m >= 5`.
pub fn build_h(m: usize, g: &GdGraph, pi: &Bijection) -> Result<GdGraph, FamilyError> {
    join(&vec![g.clone(); m], &FactorChoice::Induced(pi.clone()), 2)
}

/// Largest circular distance `min(|i-j|, n-|i-j|)` over the edges.
pub fn max_circular_distance(g: &Graph) -> usize {
    let n = g.n();
    g.edges().iter().map(|&(u, v)| (v - u).min(n - (v - u))).max().unwrap_or(0)
}

/// Old-to-new labeling: cycles are walked from their smallest `A` vertex;
/// higher levels relabel each copy recursively in place.
fn canonical_labeling(g: &GdGraph) -> Result<Vec<Vertex>, FamilyError> {
    let n = g.n();
    if g.d == 2 {
        let start = *g.bipartition.a.first().ok_or(FamilyError::StructureUnknown)?;
        let mut perm = vec![usize::MAX; n];
        let (mut prev, mut cur) = (usize::MAX, start);
        for pos in 0..n {
            if perm[cur] != usize::MAX {
                return Err(FamilyError::StructureUnknown);
            }
            perm[cur] = pos;
            let next = g.graph.neighbors(cur).iter().copied().find(|&w| w != prev && perm[w] == usize::MAX);
            prev = cur;
            match next {
                Some(w) => cur = w,
                None if pos + 1 == n => break,
                None => return Err(FamilyError::StructureUnknown),
            }
        }
        return Ok(perm);
    }
    if g.copies.is_empty() {
        return Err(FamilyError::StructureUnknown);
    }
    let mut perm = vec![0; n];
    for (i, &(lo, _)) in g.copies.iter().enumerate() {
        let sub = canonical_labeling(&g.copy(i)?)?;
        for (v, p) in sub.into_iter().enumerate() {
            perm[lo + v] = lo + p;
        }
    }
    Ok(perm)
}

/// Relabels copy by copy so that `A` gets the even labels and every edge
/// joins labels at circular distance at most three copy sizes.
pub fn canonical_relabel(g: &GdGraph) -> Result<GdGraph, FamilyError> {
    let perm = canonical_labeling(g)?;
    let graph = g.graph.relabel(&perm);
    let map = |v: &Vertex| perm[*v];
    let bipartition =
        Bipartition::new(g.bipartition.a.iter().map(map).collect(), g.bipartition.b.iter().map(map).collect());
    if bipartition.a.iter().any(|v| v % 2 == 1) {
        return invalid("A did not land on even labels");
    }
    let bound = if g.d == 2 { 1 } else { 3 * g.copy_size() };
    if max_circular_distance(&graph) > bound {
        return invalid("an edge exceeds the circular distance bound");
    }
    let factors = g
        .factors
        .iter()
        .map(|f| {
            let mut pairs: Vec<(Vertex, Vertex)> = f.pairs.iter().map(|&(b, a)| (perm[b], perm[a])).collect();
            pairs.sort_unstable();
            OneFactor::new(pairs)
        })
        .collect();
    Ok(GdGraph { graph, bipartition, factors, ..g.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_homomorphism, girth, Girth};

    #[test]
    fn cycles() {
        let c6 = build_cycle(6).unwrap();
        assert_eq!(c6.bipartition.a, vec![0, 2, 4]);
        assert_eq!(c6.bipartition.b, vec![1, 3, 5]);
        c6.validate().unwrap();
        assert_eq!(build_cycle(5), Err(FamilyError::BadSize(5)));
        assert_eq!(build_cycle(4), Err(FamilyError::BadSize(4)));
        let c8 = build_cycle(8).unwrap();
        check_regular_bipartite(&c8.graph, 2).unwrap();
    }

    #[test]
    fn extend_five_cycles() {
        let c6 = build_cycle(6).unwrap();
        let g3 = extend_family(&vec![c6.clone(); 5], &FactorChoice::Random(1)).unwrap();
        assert_eq!(g3.n(), 30);
        assert_eq!(g3.graph.m(), 45);
        assert_eq!(g3.d, 3);
        assert_eq!(g3.part_sizes, vec![6, 5]);
        g3.validate().unwrap();
        assert_eq!(check_regular_bipartite(&g3.graph, 3).unwrap().a.len(), 15);
        assert_eq!(extend_family(&vec![c6.clone(); 4], &FactorChoice::Random(1)), Err(FamilyError::TooFewCopies(4, 5)));
        // seeded output is reproducible
        assert_eq!(extend_family(&vec![c6; 5], &FactorChoice::Random(1)).unwrap(), g3);
    }

    #[test]
    fn extend_rejects_mismatches() {
        let c6 = build_cycle(6).unwrap();
        let c8 = build_cycle(8).unwrap();
        let mixed = vec![c6.clone(), c6.clone(), c6.clone(), c6.clone(), c8];
        assert!(matches!(extend_family(&mixed, &FactorChoice::Random(0)), Err(FamilyError::SizeMismatch(_))));
        let g3 = build_gd(&[6, 5], 2).unwrap();
        let levels = vec![c6.clone(), c6.clone(), c6.clone(), c6.clone(), g3];
        assert!(extend_family(&levels, &FactorChoice::Random(0)).is_err());
        // a map on a 7-element side cannot induce junctions between C_6 copies
        let pi = Bijection::new((0..7).map(|i| (2 * i, 2 * i + 1)).collect());
        assert!(matches!(extend_family(&vec![c6; 5], &FactorChoice::Induced(pi)), Err(FamilyError::SizeMismatch(_))));
    }

    #[test]
    fn non_isomorphic_copies() {
        let a = build_gd(&[6, 5], 1).unwrap();
        let b = build_gd(&[6, 5], 2).unwrap();
        assert_ne!(a.graph, b.graph);
        let g4 = extend_family(&[a.clone(), b.clone(), a.clone(), b, a], &FactorChoice::Random(3)).unwrap();
        assert_eq!(g4.n(), 150);
        g4.validate().unwrap();
        check_regular_bipartite(&g4.graph, 4).unwrap();
    }

    #[test]
    fn explicit_factors() {
        let c6 = build_cycle(6).unwrap();
        let f = OneFactor::new(vec![(1, 0), (3, 2), (5, 4)]);
        let g = extend_family(&vec![c6.clone(); 5], &FactorChoice::Explicit(vec![f.clone(); 5])).unwrap();
        g.validate().unwrap();
        let bad = OneFactor::new(vec![(1, 0), (3, 0), (5, 4)]);
        assert!(matches!(
            extend_family(&vec![c6; 5], &FactorChoice::Explicit(vec![bad; 5])),
            Err(FamilyError::NotBijection(_))
        ));
    }

    fn rotate(c: &GdGraph) -> Bijection {
        let n = c.n();
        Bijection::new(c.bipartition.a.iter().map(|&a| (a, (a + 3) % n)).collect())
    }

    #[test]
    fn h_matches_definition_and_projects() {
        let c6 = build_cycle(6).unwrap();
        let pi = rotate(&c6);
        let h = build_h(5, &c6, &pi).unwrap();
        assert_eq!(h.n(), 30);
        check_regular_bipartite(&h.graph, 3).unwrap();
        h.validate().unwrap();
        assert!(h.member);

        // literal definition: a in copy j joins π(a) in copy j+1, copy j at block m-1-j
        let (m, s) = (5, 6);
        let block = |j: usize| (m - 1 - j % m) * s;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for j in 0..m {
            edges.extend(c6.graph.edges().iter().map(|&(u, v)| (block(j) + u, block(j) + v)));
            edges.extend(pi.pairs.iter().map(|&(a, b)| (block(j) + a, block(j + 1) + b)));
        }
        assert_eq!(Graph::new(30, edges).unwrap(), h.graph);

        let star = c6.graph.with_edges(pi.edges()).unwrap();
        assert!(check_homomorphism(&h.graph, &star, &h.projection()).unwrap());
        let gs = girth(&star).finite().unwrap();
        assert!(girth(&h.graph).finite().unwrap() >= gs);
    }

    #[test]
    fn h_small_m_is_flagged() {
        let c6 = build_cycle(6).unwrap();
        let h = build_h(2, &c6, &rotate(&c6)).unwrap();
        assert!(!h.member);
        check_regular_bipartite(&h.graph, 3).unwrap();
        assert_eq!(build_h(1, &c6, &rotate(&c6)), Err(FamilyError::TooFewCopies(1, 2)));
        let not_bij = Bijection::new(vec![(0, 1), (2, 1), (4, 5)]);
        assert!(matches!(build_h(5, &c6, &not_bij), Err(FamilyError::NotBijection(_))));
    }

    #[test]
    fn heawood_h() {
        // C_14 with chords i -> i+5 on even i is the Heawood graph
        let c14 = build_cycle(14).unwrap();
        let pi = Bijection::new(c14.bipartition.a.iter().map(|&a| (a, (a + 5) % 14)).collect());
        let star = c14.graph.with_edges(pi.edges()).unwrap();
        assert_eq!(girth(&star), Girth::Finite(6));
        let h = build_h(3, &c14, &pi).unwrap();
        assert_eq!(h.n(), 42);
        check_regular_bipartite(&h.graph, 3).unwrap();
        assert!(girth(&h.graph).finite().unwrap() >= 6);
    }

    #[test]
    fn copies_recover_structure() {
        let g = build_gd(&[6, 5, 5], 9).unwrap();
        g.validate().unwrap();
        let c = g.copy(2).unwrap();
        assert_eq!(c.d, 3);
        assert_eq!(c.n(), 30);
        c.validate().unwrap();
        assert_eq!(c.copy(0).unwrap().graph, Graph::cycle(6));
    }

    #[test]
    fn sidecar_round_trip() {
        let g = build_gd(&[8, 5], 4).unwrap();
        let json = serde_json::to_string(&g.sidecar()).unwrap();
        let back: GdSidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(GdGraph::from_sidecar(g.graph.clone(), back.clone()).unwrap(), g);
        let mut broken = back;
        broken.factors[0].pairs.swap(0, 1);
        broken.factors[0].pairs[0].1 = broken.factors[0].pairs[1].1;
        assert!(GdGraph::from_sidecar(g.graph, broken).is_err());
    }

    #[test]
    fn canonical_labels() {
        let c6 = build_cycle(6).unwrap();
        let r = canonical_relabel(&c6).unwrap();
        assert_eq!(r, c6);
        assert_eq!(max_circular_distance(&r.graph), 1);

        let g3 = build_gd(&[6, 5], 1).unwrap();
        let r = canonical_relabel(&g3).unwrap();
        assert_eq!(r.graph.m(), 45);
        assert!(r.graph.edges().iter().all(|&(u, v)| (v - u).min(30 - (v - u)) <= 18));
        assert!(r.bipartition.a.iter().all(|v| v % 2 == 0));
        r.validate().unwrap();

        let bare = GdGraph { copies: Vec::new(), factors: Vec::new(), ..g3 };
        assert_eq!(canonical_relabel(&bare), Err(FamilyError::StructureUnknown));
    }
}
