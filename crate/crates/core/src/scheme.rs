//! Secret-sharing schemes built from weighted star decompositions, checked
//! by exhaustive enumeration of their joint distribution.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rational::Rational;

/// Largest joint distribution [`enumerate_joint`] accepts.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

/// Count tables up to this many cells are kept dense.
const DENSE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("vertex {0} is isolated")]
    IsolatedVertex(Vertex),
    #[error("field size {q} is too small for {stars} stars")]
    FieldTooSmall { q: u64, stars: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{states} states exceed the enumeration budget {budget}")]
    BudgetExceeded { states: String, budget: u64 },
    #[error("share of vertex {0} is not uniform on a full product of coordinates")]
    NonuniformShare(Vertex),
    #[error("scheme is not perfect")]
    NotPerfect,
    #[error("invalid scheme: {0}")]
    Invalid(String),
}

/// Arithmetic modulo a prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    q: u64,
}

impl Field {
    pub fn new(q: u64) -> Result<Self, SchemeError> {
        let prime = q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0);
        if !prime || q > u32::MAX as u64 {
            return Err(SchemeError::NotPrime(q));
        }
        Ok(Field { q })
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.q;
        a %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> Option<u64> {
        (a % self.q != 0).then(|| self.pow(a, self.q - 2))
    }

    /// `Σ coeffs[k] x^k`.
    pub fn eval_poly(self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Coefficients of the unique polynomial of degree `< points.len()`
    /// through the given points with distinct abscissae.
    pub fn interpolate(self, points: &[(u64, u64)]) -> Option<Vec<u64>> {
        let k = points.len();
        let mut out = vec![0; k];
        for (i, &(xi, yi)) in points.iter().enumerate() {
            // basis polynomial Π_{j≠i} (x - x_j) / (x_i - x_j)
            let mut basis = vec![1u64];
            let mut denom = 1;
            for (j, &(xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![0; basis.len() + 1];
                for (p, &c) in basis.iter().enumerate() {
                    next[p + 1] = self.add(next[p + 1], c);
                    next[p] = self.sub(next[p], self.mul(c, xj));
                }
                basis = next;
                denom = self.mul(denom, self.sub(xi, xj));
            }
            let scale = self.mul(yi, self.inv(denom)?);
            for (p, &c) in basis.iter().enumerate() {
                out[p] = self.add(out[p], self.mul(c, scale));
            }
        }
        Some(out)
    }
}

/// A full star: the center and all of its neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: Vertex,
    pub leaves: Vec<Vertex>,
    /// Evaluation point of the star's sub-secret.
    pub x: u64,
}

/// Stars covering every edge at least `lambda` times, realized over GF(q)
/// once `q` is set. Star `i` draws its mask from randomness slot
/// `randomness[i]`, which is `i` in an honest scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionScheme {
    #[serde(skip)]
    pub graph: Option<Graph>,
    pub n: usize,
    pub q: Option<u64>,
    pub lambda: usize,
    pub stars: Vec<Star>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub randomness: Vec<usize>,
}

/// One full star per vertex with `λ = 2` and points `x_i = i + 1`.
pub fn make_star_decomposition(g: &Graph) -> Result<DecompositionScheme, SchemeError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return Err(SchemeError::IsolatedVertex(v));
    }
    let stars = (0..g.n()).map(|v| Star { center: v, leaves: g.neighbors(v).to_vec(), x: v as u64 + 1 }).collect();
    Ok(DecompositionScheme { graph: Some(g.clone()), n: g.n(), q: None, lambda: 2, stars, randomness: Vec::new() })
}

impl DecompositionScheme {
    /// Explicit stars; evaluation points are reassigned as `i + 1`.
    pub fn new(g: &Graph, stars: Vec<(Vertex, Vec<Vertex>)>, lambda: usize) -> Result<Self, SchemeError> {
        if lambda == 0 {
            return Err(SchemeError::Invalid("λ must be positive".into()));
        }
        let mut out = Vec::with_capacity(stars.len());
        for (i, (center, mut leaves)) in stars.into_iter().enumerate() {
            leaves.sort_unstable();
            if center >= g.n() || leaves.iter().any(|&l| !g.has_edge(center, l)) {
                return Err(SchemeError::Invalid(format!("star {i} is not a star of the graph")));
            }
            out.push(Star { center, leaves, x: i as u64 + 1 });
        }
        Ok(DecompositionScheme {
            graph: Some(g.clone()),
            n: g.n(),
            q: None,
            lambda,
            stars: out,
            randomness: Vec::new(),
        })
    }

    pub fn graph(&self) -> Result<&Graph, SchemeError> {
        self.graph.as_ref().ok_or_else(|| SchemeError::Invalid("scheme has no graph attached".into()))
    }

    /// Edges covered fewer than `λ` times.
    pub fn coverage_defects(&self) -> Vec<(Vertex, Vertex)> {
        let Some(g) = &self.graph else { return Vec::new() };
        let mut cover: HashMap<(Vertex, Vertex), usize> = HashMap::new();
        for s in &self.stars {
            for &l in &s.leaves {
                *cover.entry((s.center.min(l), s.center.max(l))).or_default() += 1;
            }
        }
        g.edges().iter().copied().filter(|e| cover.get(e).copied().unwrap_or(0) < self.lambda).collect()
    }

    /// Number of share coordinates held by each vertex.
    pub fn coordinates(&self) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for s in &self.stars {
            c[s.center] += 1;
            for &l in &s.leaves {
                c[l] += 1;
            }
        }
        c
    }

    /// `max_v coordinates(v) / λ`, read off the structure alone.
    pub fn structural_ratio(&self) -> Rational {
        let max = self.coordinates().into_iter().max().unwrap_or(0);
        Rational::new(max as i64, self.lambda as i64)
    }

    pub fn without_star(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.stars.remove(i);
        if !s.randomness.is_empty() {
            s.randomness.remove(i);
        }
        s
    }

    /// Makes star `to` reuse the mask of star `from`.
    pub fn with_shared_randomness(&self, from: usize, to: usize) -> Self {
        let mut s = self.clone();
        if s.randomness.is_empty() {
            s.randomness = (0..s.stars.len()).collect();
        }
        s.randomness[to] = s.randomness[from];
        s
    }

    fn mask_slot(&self, i: usize) -> usize {
        self.randomness.get(i).copied().unwrap_or(i)
    }

    /// Per vertex, the coordinate ids `2i` (center of star `i`, holds `r_i`)
    /// and `2i + 1` (leaf of star `i`, holds `c_i + r_i`) in star order.
    fn holdings(&self) -> Vec<Vec<usize>> {
        let mut h = vec![Vec::new(); self.n];
        for (i, s) in self.stars.iter().enumerate() {
            h[s.center].push(2 * i);
            for &l in &s.leaves {
                h[l].push(2 * i + 1);
            }
        }
        h
    }

    /// Shares of every vertex for one secret and one randomness vector.
    pub fn deal(&self, secret: &[u64], r: &[u64]) -> Result<Vec<Vec<u64>>, SchemeError> {
        let f = Field::new(self.q.ok_or_else(|| SchemeError::Invalid("scheme is not realized".into()))?)?;
        let vals = self.coordinate_values(f, secret, r);
        Ok(self.holdings().iter().map(|h| h.iter().map(|&c| vals[c]).collect()).collect())
    }

    fn coordinate_values(&self, f: Field, secret: &[u64], r: &[u64]) -> Vec<u64> {
        let mut vals = vec![0; 2 * self.stars.len()];
        for (i, s) in self.stars.iter().enumerate() {
            let ri = r[self.mask_slot(i)];
            vals[2 * i] = ri;
            vals[2 * i + 1] = f.add(f.eval_poly(secret, s.x), ri);
        }
        vals
    }

    /// Recovers the secret from the shares of the endpoints of an edge.
    pub fn recover(&self, u: Vertex, v: Vertex, share_u: &[u64], share_v: &[u64]) -> Option<Vec<u64>> {
        let f = Field::new(self.q?).ok()?;
        let h = self.holdings();
        let lookup = |w: Vertex, share: &[u64], coord: usize| h[w].iter().position(|&c| c == coord).map(|p| share[p]);
        let mut points = Vec::new();
        for (i, s) in self.stars.iter().enumerate() {
            let (c, l) = if s.center == u && s.leaves.contains(&v) {
                ((u, share_u), (v, share_v))
            } else if s.center == v && s.leaves.contains(&u) {
                ((v, share_v), (u, share_u))
            } else {
                continue;
            };
            let r = lookup(c.0, c.1, 2 * i)?;
            let masked = lookup(l.0, l.1, 2 * i + 1)?;
            points.push((s.x, f.sub(masked, r)));
            if points.len() == self.lambda {
                return f.interpolate(&points);
            }
        }
        None
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Parses a scheme and checks it against `g`.
    pub fn from_json(s: &str, g: &Graph) -> Result<Self, SchemeError> {
        let mut d: DecompositionScheme = serde_json::from_str(s).map_err(|e| SchemeError::Invalid(e.to_string()))?;
        if d.n != g.n() {
            return Err(SchemeError::Invalid(format!("scheme has {} vertices, graph has {}", d.n, g.n())));
        }
        if d.lambda == 0 {
            return Err(SchemeError::Invalid("λ must be positive".into()));
        }
        for (i, s) in d.stars.iter().enumerate() {
            if s.center >= g.n() || s.leaves.iter().any(|&l| !g.has_edge(s.center, l)) {
                return Err(SchemeError::Invalid(format!("star {i} is not a star of the graph")));
            }
        }
        let mut xs: Vec<u64> = d.stars.iter().map(|s| s.x).collect();
        xs.sort_unstable();
        xs.dedup();
        if xs.len() != d.stars.len() || d.q.is_some_and(|q| xs.iter().any(|&x| x % q == 0 || x >= q)) {
            return Err(SchemeError::Invalid("evaluation points must be distinct and nonzero".into()));
        }
        if !d.randomness.is_empty()
            && (d.randomness.len() != d.stars.len() || d.randomness.iter().any(|&r| r >= d.stars.len()))
        {
            return Err(SchemeError::Invalid("randomness slots do not match the stars".into()));
        }
        if let Some(q) = d.q {
            Field::new(q)?;
        }
        d.graph = Some(g.clone());
        Ok(d)
    }
}

/// Fixes the field. Needs a prime `q` larger than the number of stars so the
/// evaluation points `1..=t` are distinct and nonzero.
pub fn realize_scheme(skeleton: &DecompositionScheme, q: u64) -> Result<DecompositionScheme, SchemeError> {
    Field::new(q)?;
    if q <= skeleton.stars.len() as u64 {
        return Err(SchemeError::FieldTooSmall { q, stars: skeleton.stars.len() });
    }
    let mut s = skeleton.clone();
    s.q = Some(q);
    Ok(s)
}

/// Uniform distribution over `(secret, randomness)` pairs of a realized
/// scheme, enumerated lazily in secret-major order.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    pub scheme: DecompositionScheme,
    field: Field,
    pub secrets: u64,
    pub randomness: u64,
    /// Number of independent masks `t`.
    pub slots: usize,
}

impl JointDistribution {
    pub fn states(&self) -> u64 {
        self.secrets * self.randomness
    }
}

fn checked_pow(q: u64, e: usize) -> Option<u64> {
    u32::try_from(e).ok().and_then(|e| q.checked_pow(e))
}

pub fn enumerate_joint(s: &DecompositionScheme) -> Result<JointDistribution, SchemeError> {
    enumerate_joint_with_budget(s, ENUMERATION_BUDGET)
}

pub fn enumerate_joint_with_budget(s: &DecompositionScheme, budget: u64) -> Result<JointDistribution, SchemeError> {
    let q = s.q.ok_or_else(|| SchemeError::Invalid("scheme is not realized".into()))?;
    let field = Field::new(q)?;
    s.graph()?;
    let slots = s.stars.len();
    let too_big = || SchemeError::BudgetExceeded { states: format!("{q}^{}", s.lambda + slots), budget };
    let secrets = checked_pow(q, s.lambda).ok_or_else(too_big)?;
    let randomness = checked_pow(q, slots).ok_or_else(too_big)?;
    match secrets.checked_mul(randomness) {
        Some(states) if states <= budget => {}
        _ => return Err(too_big()),
    }
    Ok(JointDistribution { scheme: s.clone(), field, secrets, randomness, slots })
}

/// Maximal independent sets, by Bron–Kerbosch on the complement.
pub fn maximal_independent_sets(g: &Graph) -> Vec<Vec<Vertex>> {
    fn grow(g: &Graph, r: &mut Vec<Vertex>, p: Vec<Vertex>, x: Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if p.is_empty() && x.is_empty() {
            let mut s = r.clone();
            s.sort_unstable();
            out.push(s);
            return;
        }
        let pivot =
            p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&w| w != u && !g.has_edge(u, w)).count());
        let pivot = pivot.expect("p or x nonempty");
        let candidates: Vec<Vertex> = p.iter().copied().filter(|&v| v == pivot || g.has_edge(pivot, v)).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            let keep = |w: &Vertex| *w != v && !g.has_edge(v, *w);
            r.push(v);
            grow(g, r, p.iter().copied().filter(keep).collect(), x.iter().copied().filter(keep).collect(), out);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    grow(g, &mut Vec::new(), (0..g.n()).collect(), Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub q: u64,
    pub lambda: usize,
    pub states: u64,
    pub perfect: bool,
    pub edges_checked: usize,
    /// Edges whose shares do not determine the secret.
    pub determinism_failures: Vec<(Vertex, Vertex)>,
    pub independent_sets_checked: usize,
    /// Maximal independent sets whose shares depend on the secret.
    pub independence_failures: Vec<Vec<Vertex>>,
    pub coordinates: Vec<usize>,
    pub support_sizes: Vec<u64>,
    /// Share uniform over all `q^coordinates` values.
    pub uniform: Vec<bool>,
    pub ratio: Option<Rational>,
}

enum Counts {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Counts {
    fn new(cells: Option<u64>, fill: u32) -> Counts {
        match cells {
            Some(c) if c <= DENSE_LIMIT => Counts::Dense(vec![fill; c as usize]),
            _ => Counts::Sparse(HashMap::new()),
        }
    }

    fn entry(&mut self, key: u64, fill: u32) -> &mut u32 {
        match self {
            Counts::Dense(v) => &mut v[key as usize],
            Counts::Sparse(m) => m.entry(key).or_insert(fill),
        }
    }

    fn reset(&mut self, fill: u32) {
        match self {
            Counts::Dense(v) => v.iter_mut().for_each(|c| *c = fill),
            Counts::Sparse(m) => m.clear(),
        }
    }

    fn same_counts(&self, other: &Counts) -> bool {
        match (self, other) {
            (Counts::Dense(a), Counts::Dense(b)) => a == b,
            (Counts::Sparse(a), Counts::Sparse(b)) => a.len() == b.len() && a.iter().all(|(k, v)| b.get(k) == Some(v)),
            _ => false,
        }
    }

    fn nonzero(&self) -> Vec<(u64, u32)> {
        match self {
            Counts::Dense(v) => v.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k as u64, c)).collect(),
            Counts::Sparse(m) => m.iter().filter(|(_, &c)| c > 0).map(|(&k, &c)| (k, c)).collect(),
        }
    }
}

/// Coordinate ids a set of vertices holds, deduplicated. The values of
/// these ids encode the set's share tuple injectively.
fn coordinate_ids(holdings: &[Vec<usize>], set: &[Vertex]) -> Vec<usize> {
    let mut ids: Vec<usize> = set.iter().flat_map(|&v| holdings[v].iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

fn encode(ids: &[usize], vals: &[u64], q: u64) -> u64 {
    ids.iter().fold(0, |acc, &c| acc * q + vals[c])
}

struct Partial {
    /// Per edge, share-pair key to secret index; `u32::MAX` is unseen.
    pairs: Vec<Counts>,
    conflicts: Vec<bool>,
    independence: Vec<bool>,
    support: Vec<Counts>,
}

struct Plan<'a> {
    jd: &'a JointDistribution,
    edges: Vec<(Vertex, Vertex)>,
    edge_ids: Vec<Vec<usize>>,
    sets: Vec<Vec<Vertex>>,
    set_ids: Vec<Vec<usize>>,
    vertex_ids: Vec<Vec<usize>>,
}

impl Plan<'_> {
    fn cells(&self, ids: &[usize]) -> Option<u64> {
        checked_pow(self.jd.field.q(), ids.len())
    }

    fn secret(&self, index: u64) -> Vec<u64> {
        let q = self.jd.field.q();
        let mut s = Vec::with_capacity(self.jd.scheme.lambda);
        let mut x = index;
        for _ in 0..self.jd.scheme.lambda {
            s.push(x % q);
            x /= q;
        }
        s
    }

    /// Histograms of every maximal independent set under one secret.
    fn set_histograms(&self, secret: u64, out: &mut [Counts]) {
        for h in out.iter_mut() {
            h.reset(0);
        }
        self.for_each_state(secret, |vals| {
            for (h, ids) in out.iter_mut().zip(&self.set_ids) {
                *h.entry(encode(ids, vals, self.jd.field.q()), 0) += 1;
            }
        });
    }

    fn for_each_state(&self, secret: u64, mut visit: impl FnMut(&[u64])) {
        let jd = self.jd;
        let q = jd.field.q();
        let s = self.secret(secret);
        let mut r = vec![0u64; jd.slots];
        for _ in 0..jd.randomness {
            let vals = jd.scheme.coordinate_values(jd.field, &s, &r);
            visit(&vals);
            for x in r.iter_mut() {
                *x += 1;
                if *x < q {
                    break;
                }
                *x = 0;
            }
        }
    }

    fn run(&self, secrets: std::ops::Range<u64>, reference: &[Counts]) -> Partial {
        let q = self.jd.field.q();
        let mut pairs: Vec<Counts> = self.edge_ids.iter().map(|ids| Counts::new(self.cells(ids), u32::MAX)).collect();
        let mut conflicts = vec![false; self.edges.len()];
        let mut independence = vec![true; self.sets.len()];
        let mut support: Vec<Counts> = self.vertex_ids.iter().map(|ids| Counts::new(self.cells(ids), 0)).collect();
        let mut hist: Vec<Counts> = self.set_ids.iter().map(|ids| Counts::new(self.cells(ids), 0)).collect();
        for secret in secrets {
            let tag = secret as u32;
            for h in hist.iter_mut() {
                h.reset(0);
            }
            self.for_each_state(secret, |vals| {
                for (e, ids) in self.edge_ids.iter().enumerate() {
                    let slot = pairs[e].entry(encode(ids, vals, q), u32::MAX);
                    if *slot == u32::MAX {
                        *slot = tag;
                    } else if *slot != tag {
                        conflicts[e] = true;
                    }
                }
                for (h, ids) in hist.iter_mut().zip(&self.set_ids) {
                    *h.entry(encode(ids, vals, q), 0) += 1;
                }
                for (c, ids) in support.iter_mut().zip(&self.vertex_ids) {
                    *c.entry(encode(ids, vals, q), 0) += 1;
                }
            });
            for (k, h) in hist.iter().enumerate() {
                if !h.same_counts(&reference[k]) {
                    independence[k] = false;
                }
            }
        }
        Partial { pairs, conflicts, independence, support }
    }
}

/// Exhaustive check of both perfectness conditions: every edge determines
/// the secret, and every maximal independent set has the same share
/// histogram under every secret.
pub fn verify_perfect(jd: &JointDistribution, jobs: usize) -> Result<PerfectnessReport, SchemeError> {
    let g = jd.scheme.graph()?;
    let holdings = jd.scheme.holdings();
    let edges: Vec<(Vertex, Vertex)> = g.edges().to_vec();
    let sets = maximal_independent_sets(g);
    let plan = Plan {
        jd,
        edge_ids: edges.iter().map(|&(u, v)| coordinate_ids(&holdings, &[u, v])).collect(),
        set_ids: sets.iter().map(|s| coordinate_ids(&holdings, s)).collect(),
        vertex_ids: (0..g.n()).map(|v| coordinate_ids(&holdings, &[v])).collect(),
        edges,
        sets,
    };
    let mut reference: Vec<Counts> = plan.set_ids.iter().map(|ids| Counts::new(plan.cells(ids), 0)).collect();
    plan.set_histograms(0, &mut reference);

    let jobs = jobs.max(1).min(jd.secrets as usize);
    let chunk = jd.secrets.div_ceil(jobs as u64);
    let ranges: Vec<std::ops::Range<u64>> =
        (0..jobs as u64).map(|j| j * chunk..((j + 1) * chunk).min(jd.secrets)).filter(|r| !r.is_empty()).collect();
    let partials: Vec<Partial> = if ranges.len() == 1 {
        vec![plan.run(ranges[0].clone(), &reference)]
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SchemeError::Invalid(e.to_string()))?;
        pool.install(|| ranges.par_iter().map(|r| plan.run(r.clone(), &reference)).collect())
    };

    let q = jd.field.q();
    let mut determinism_failures = Vec::new();
    for (e, &edge) in plan.edges.iter().enumerate() {
        let mut bad = partials.iter().any(|p| p.conflicts[e]);
        if !bad && partials.len() > 1 {
            let mut owner: HashMap<u64, u32> = HashMap::new();
            'merge: for p in &partials {
                for (key, secret) in p.pairs[e].nonzero().into_iter().filter(|&(_, s)| s != u32::MAX) {
                    if *owner.entry(key).or_insert(secret) != secret {
                        bad = true;
                        break 'merge;
                    }
                }
            }
        }
        if bad {
            determinism_failures.push(edge);
        }
    }
    let independence_failures: Vec<Vec<Vertex>> = plan
        .sets
        .iter()
        .enumerate()
        .filter(|&(k, _)| partials.iter().any(|p| !p.independence[k]))
        .map(|(_, s)| s.clone())
        .collect();

    let coordinates = jd.scheme.coordinates();
    let mut support_sizes = Vec::with_capacity(g.n());
    let mut uniform = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let mut merged: HashMap<u64, u64> = HashMap::new();
        for p in &partials {
            for (k, c) in p.support[v].nonzero() {
                *merged.entry(k).or_default() += c as u64;
            }
        }
        support_sizes.push(merged.len() as u64);
        let full = checked_pow(q, plan.vertex_ids[v].len());
        let first = merged.values().next().copied();
        uniform.push(
            Some(merged.len() as u64) == full
                && plan.vertex_ids[v].len() == coordinates[v]
                && merged.values().all(|&c| Some(c) == first),
        );
    }
    let perfect = determinism_failures.is_empty() && independence_failures.is_empty();
    let ratio = (perfect && uniform.iter().all(|&u| u)).then(|| jd.scheme.structural_ratio());
    Ok(PerfectnessReport {
        q,
        lambda: jd.scheme.lambda,
        states: jd.states(),
        perfect,
        edges_checked: plan.edges.len(),
        determinism_failures,
        independent_sets_checked: plan.sets.len(),
        independence_failures,
        coordinates,
        support_sizes,
        uniform,
        ratio,
    })
}

/// `max_v H(ξ_v) / H(ξ_s)` for a verified scheme with uniform full-product
/// shares, where it equals the largest coordinate count over `λ`.
pub fn measured_ratio(report: &PerfectnessReport) -> Result<Rational, SchemeError> {
    if !report.perfect {
        return Err(SchemeError::NotPerfect);
    }
    if let Some(v) = report.uniform.iter().position(|&u| !u) {
        return Err(SchemeError::NonuniformShare(v));
    }
    let max = report.coordinates.iter().copied().max().unwrap_or(0);
    Ok(Rational::new(max as i64, report.lambda as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{entropy_lp_complexity, EntropyObjective};
    use crate::family::build_gd;

    #[test]
    fn field_arithmetic() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.inv(0), None);
        assert_eq!(f.eval_poly(&[1, 2], 3), 0);
        assert_eq!(f.interpolate(&[(1, 3), (2, 5)]), Some(vec![1, 2]));
        assert_eq!(Field::new(9), Err(SchemeError::NotPrime(9)));
        assert_eq!(Field::new(1), Err(SchemeError::NotPrime(1)));
    }

    #[test]
    fn star_decompositions() {
        let c6 = make_star_decomposition(&Graph::cycle(6)).unwrap();
        assert_eq!(c6.stars.len(), 6);
        assert_eq!(c6.lambda, 2);
        assert_eq!(c6.coordinates(), vec![3; 6]);
        assert!(c6.coverage_defects().is_empty());
        let k13 = make_star_decomposition(&Graph::star(3)).unwrap();
        assert_eq!(k13.stars.len(), 4);
        let mut coords = k13.coordinates();
        coords.sort_unstable();
        assert_eq!(coords, vec![2, 2, 2, 4]);
        let k2 = make_star_decomposition(&Graph::path(2)).unwrap();
        assert_eq!(k2.coordinates(), vec![2, 2]);
        assert_eq!(make_star_decomposition(&Graph::empty(2)), Err(SchemeError::IsolatedVertex(0)));
    }

    #[test]
    fn realization_parameters() {
        let c6 = make_star_decomposition(&Graph::cycle(6)).unwrap();
        let s = realize_scheme(&c6, 7).unwrap();
        assert_eq!(enumerate_joint(&s).unwrap().secrets, 49);
        assert_eq!(realize_scheme(&c6, 5), Err(SchemeError::FieldTooSmall { q: 5, stars: 6 }));
        let big = realize_scheme(&c6, 23).unwrap();
        assert!(matches!(enumerate_joint(&big), Err(SchemeError::BudgetExceeded { .. })));
        let k2 = realize_scheme(&make_star_decomposition(&Graph::path(2)).unwrap(), 3).unwrap();
        let jd = enumerate_joint(&k2).unwrap();
        assert_eq!((jd.secrets, jd.states()), (9, 81));
    }

    #[test]
    fn edges_recover_the_secret() {
        let s = realize_scheme(&make_star_decomposition(&Graph::cycle(6)).unwrap(), 7).unwrap();
        let secret = [4, 6];
        let shares = s.deal(&secret, &[1, 2, 3, 4, 5, 6]).unwrap();
        for &(u, v) in Graph::cycle(6).edges() {
            assert_eq!(s.recover(u, v, &shares[u], &shares[v]), Some(secret.to_vec()));
        }
        assert_eq!(s.recover(0, 2, &shares[0], &shares[2]), None);
    }

    #[test]
    fn k2_is_perfect_with_ratio_one() {
        let s = realize_scheme(&make_star_decomposition(&Graph::path(2)).unwrap(), 3).unwrap();
        let report = verify_perfect(&enumerate_joint(&s).unwrap(), 1).unwrap();
        assert!(report.perfect);
        assert_eq!(report.states, 81);
        assert_eq!(measured_ratio(&report).unwrap(), Rational::one());
    }

    #[test]
    fn basic_star_scheme() {
        let g = Graph::star(2);
        let s = DecompositionScheme::new(&g, vec![(0, vec![1, 2])], 1).unwrap();
        let s = realize_scheme(&s, 2).unwrap();
        let report = verify_perfect(&enumerate_joint(&s).unwrap(), 1).unwrap();
        assert!(report.perfect, "{report:?}");
        assert_eq!(report.independent_sets_checked, 2);
        assert_eq!(measured_ratio(&report).unwrap(), Rational::one());
    }

    #[test]
    fn small_schemes_dominate_the_entropy_bound() {
        for g in [Graph::path(3), Graph::path(4), Graph::star(3), Graph::cycle(4)] {
            let s = realize_scheme(&make_star_decomposition(&g).unwrap(), 5).unwrap();
            let report = verify_perfect(&enumerate_joint(&s).unwrap(), 1).unwrap();
            let ratio = measured_ratio(&report).unwrap();
            let lp = entropy_lp_complexity(&g, EntropyObjective::MinMax).unwrap();
            assert!(ratio >= lp.value, "{ratio} < {}", lp.value);
        }
    }

    #[test]
    fn faults_are_detected() {
        let g = Graph::path(4);
        let s = realize_scheme(&make_star_decomposition(&g).unwrap(), 5).unwrap();
        let shared = s.with_shared_randomness(0, 2);
        let report = verify_perfect(&enumerate_joint(&shared).unwrap(), 1).unwrap();
        assert!(!report.perfect);
        assert!(!report.independence_failures.is_empty());
        assert!(measured_ratio(&report).is_err());

        for i in 0..4 {
            let cut = s.without_star(i);
            assert!(!cut.coverage_defects().is_empty());
            let report = verify_perfect(&enumerate_joint(&cut).unwrap(), 1).unwrap();
            assert!(!report.determinism_failures.is_empty());
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let s = realize_scheme(&make_star_decomposition(&Graph::path(4)).unwrap(), 5).unwrap();
        let jd = enumerate_joint(&s).unwrap();
        assert_eq!(verify_perfect(&jd, 1).unwrap(), verify_perfect(&jd, 3).unwrap());
        let faulty = enumerate_joint(&s.with_shared_randomness(1, 3)).unwrap();
        assert_eq!(verify_perfect(&faulty, 1).unwrap(), verify_perfect(&faulty, 4).unwrap());
    }

    #[test]
    fn structural_ratio_of_regular_graphs() {
        let g3 = build_gd(&[6, 5], 1).unwrap();
        let s = realize_scheme(&make_star_decomposition(&g3.graph).unwrap(), 31).unwrap();
        assert_eq!(s.structural_ratio(), Rational::from(2));
        assert!(matches!(enumerate_joint(&s), Err(SchemeError::BudgetExceeded { .. })));
        let c8 = make_star_decomposition(&Graph::cycle(8)).unwrap();
        assert_eq!(c8.structural_ratio(), Rational::new(3, 2));
    }

    #[test]
    fn maximal_independent_sets_of_c6() {
        let sets = maximal_independent_sets(&Graph::cycle(6));
        assert_eq!(sets, vec![vec![0, 2, 4], vec![0, 3], vec![1, 3, 5], vec![1, 4], vec![2, 5]]);
    }
}
