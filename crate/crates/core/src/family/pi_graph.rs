use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dyn_graph::DynGraph;
use super::{build_cycle, Bijection, FamilyError, GdGraph};
use crate::graph::{check_regular_bipartite, girth, Bipartition, Girth, Graph, Vertex};

/// A 3-regular bipartite graph made of the Hamiltonian cycle
/// `b_0 a_0 b_1 a_1 ... b_{n-1} a_{n-1}` and the matching `a_i - b_{π(i)}`.
///
/// Vertex ids follow the cycle: `a_i = 2i` and `b_i = 2i - 1 (mod 2n)`, so
/// `a_i` is adjacent to `b_i` and `b_{i+1}` and the cycle edges are exactly
/// those of [`Graph::cycle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiGraph {
    pub n: usize,
    pub pi: Vec<usize>,
    pub graph: Graph,
    pub girth: Girth,
    /// Unmatched pairs left by the greedy phase and repaired by surgery.
    pub leftovers: usize,
    pub attempts: usize,
}

#[derive(Serialize, Deserialize)]
struct PiGraphJson {
    n: usize,
    pi: Vec<usize>,
    girth: Girth,
    leftovers: usize,
}

impl PiGraph {
    pub fn a(&self, i: usize) -> Vertex {
        2 * (i % self.n)
    }

    pub fn b(&self, i: usize) -> Vertex {
        (2 * (i % self.n) + 2 * self.n - 1) % (2 * self.n)
    }

    /// Builds the graph from `π` alone.
    pub fn from_pi(pi: Vec<usize>) -> Result<PiGraph, FamilyError> {
        let n = pi.len();
        if n < 3 {
            return Err(FamilyError::SizeMismatch(format!("π-graph needs n >= 3, got {n}")));
        }
        let mut seen = vec![false; n];
        for &p in &pi {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(FamilyError::NotBijection(format!("{pi:?} is not a permutation of 0..{n}")));
            }
        }
        let b = |i: usize| (2 * i + 2 * n - 1) % (2 * n);
        let mut edges: Vec<(Vertex, Vertex)> = (0..2 * n).map(|v| (v, (v + 1) % (2 * n))).collect();
        edges.extend(pi.iter().enumerate().map(|(i, &p)| (2 * i, b(p))));
        let graph = Graph::new(2 * n, edges)?;
        let girth = girth(&graph);
        Ok(PiGraph { n, pi, graph, girth, leftovers: 0, attempts: 0 })
    }

    pub fn bipartition(&self) -> Bipartition {
        Bipartition::new((0..self.n).map(|i| self.a(i)).collect(), (0..self.n).map(|i| self.b(i)).collect())
    }

    /// The matching as a vertex map `a_i -> b_{π(i)}`.
    pub fn bijection(&self) -> Bijection {
        Bijection::new((0..self.n).map(|i| (self.a(i), self.b(self.pi[i]))).collect())
    }

    /// The Hamiltonian cycle as a level-2 member.
    pub fn cycle(&self) -> GdGraph {
        build_cycle(2 * self.n).expect("n >= 3")
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let rebuilt = PiGraph::from_pi(self.pi.clone())?;
        if rebuilt.graph != self.graph {
            return Err(FamilyError::Invalid("edges differ from cycle plus matching".into()));
        }
        let bip = check_regular_bipartite(&self.graph, 3)?;
        if bip != self.bipartition() {
            return Err(FamilyError::Invalid("sides are not {a_i} and {b_i}".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let j = PiGraphJson { n: self.n, pi: self.pi.clone(), girth: self.girth, leftovers: self.leftovers };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<PiGraph, FamilyError> {
        let j: PiGraphJson = serde_json::from_str(s).map_err(|e| FamilyError::Invalid(e.to_string()))?;
        let mut p = PiGraph::from_pi(j.pi)?;
        if p.n != j.n {
            return Err(FamilyError::SizeMismatch(format!("n = {} but π has {} entries", j.n, p.n)));
        }
        p.leftovers = j.leftovers;
        Ok(p)
    }
}

/// `N(g) = 2^(12g + 4)`.
pub fn guaranteed_n(g: usize) -> BigUint {
    BigUint::from(1u8) << (12 * g + 4)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiGraphOptions {
    pub girth: usize,
    pub n: usize,
    pub seed: u64,
    /// Total number of attempts, at least one.
    pub max_retries: usize,
    /// Retry until the measured girth exceeds the target.
    pub strict: bool,
    /// Longest interval tried during surgery; `None` means `2^g + 1`.
    pub max_interval: Option<usize>,
}

impl PiGraphOptions {
    pub fn new(girth: usize, n: usize, seed: u64, max_retries: usize) -> Self {
        PiGraphOptions { girth, n, seed, max_retries, strict: false, max_interval: None }
    }
}

/// Greedy matching at distance at least `g`, then surgery on whatever is
/// left unmatched. The returned graph always passes [`PiGraph::validate`];
/// its girth exceeds `g` whenever the greedy phase matched everything.
pub fn build_pi_graph(g: usize, n: usize, seed: u64, max_retries: usize) -> Result<PiGraph, FamilyError> {
    build_pi_graph_with(&PiGraphOptions::new(g, n, seed, max_retries))
}

pub fn build_pi_graph_with(opts: &PiGraphOptions) -> Result<PiGraph, FamilyError> {
    let (g, n) = (opts.girth, opts.n);
    if g <= 3 {
        return Err(FamilyError::Invalid(format!("girth target {g} must exceed 3")));
    }
    if n < 3 {
        return Err(FamilyError::SizeMismatch(format!("π-graph needs n >= 3, got {n}")));
    }
    let attempts = opts.max_retries.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last = String::new();
    for attempt in 1..=attempts {
        match attempt_once(opts, &mut rng) {
            Ok(mut p) => {
                p.attempts = attempt;
                if !opts.strict || p.girth.exceeds(g) {
                    return Ok(p);
                }
                last = format!("girth {} after surgery on {} leftovers", p.girth, p.leftovers);
            }
            Err(detail) => last = detail,
        }
    }
    Err(FamilyError::RetriesExhausted { attempts, detail: last })
}

struct Surgery {
    u: usize,
    l: usize,
    a_left: Vertex,
    b_left: Vertex,
}

fn attempt_once(opts: &PiGraphOptions, rng: &mut ChaCha8Rng) -> Result<PiGraph, String> {
    let (g, n) = (opts.girth, opts.n);
    let a = |i: usize| 2 * (i % n);
    let b = |i: usize| (2 * (i % n) + 2 * n - 1) % (2 * n);
    let mut dg = DynGraph::new(2 * n);
    for v in 0..2 * n {
        dg.add_edge(v, (v + 1) % (2 * n));
    }

    // greedy matching
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut free_b: Vec<usize> = (0..n).collect();
    let mut mate = vec![usize::MAX; n];
    let mut left_a = Vec::new();
    for &i in &order {
        dg.ball(&[a(i)], g - 1);
        let pick = pick_free(&dg, &free_b, rng, |j| b(j));
        match pick {
            Some(p) => {
                let j = free_b[p];
                dg.add_edge(a(i), b(j));
                mate[i] = j;
                free_b.swap_remove(p);
            }
            None => left_a.push(i),
        }
    }
    left_a.sort_unstable();
    let mut left_b = free_b;
    left_b.sort_unstable();
    let k = left_a.len();

    let mut surgeries = Vec::with_capacity(k);
    if k > 0 {
        let cap = opts.max_interval.unwrap_or(if g >= 20 { usize::MAX } else { (1 << g) + 1 });
        let max_t = cap.saturating_sub(1).min(n.saturating_sub(4));
        let sources: Vec<Vertex> = left_a.iter().map(|&i| a(i)).chain(left_b.iter().map(|&j| b(j))).collect();
        let near_deg2: Vec<bool> = mask(&mut dg, &sources, g - 1);
        let mut near_a = vec![false; 2 * n];
        let mut near_b = vec![false; 2 * n];
        let mut used = vec![false; n];
        let start = rng.gen_range(0..n);
        let ok = |i: usize, near_a: &[bool], near_b: &[bool], used: &[bool]| {
            !used[i] && !near_deg2[a(i)] && !near_deg2[b(i)] && !near_b[a(i)] && !near_a[b(i)]
        };
        for s in 0..k {
            let mut found = None;
            'scan: for off in 0..n {
                let u = (start + off) % n;
                if !ok(u, &near_a, &near_b, &used) {
                    continue;
                }
                dg.ball(&[b(u)], g - 1);
                for t in 1..=max_t {
                    let i = (u + t) % n;
                    if !ok(i, &near_a, &near_b, &used) {
                        continue 'scan;
                    }
                    if t >= 2 && !dg.in_ball(a(i)) {
                        found = Some((u, t));
                        break 'scan;
                    }
                }
            }
            let Some((u, t)) = found else {
                return Err(format!("greedy phase left {k} pairs; no room for interval {}", s + 1));
            };
            let idx: Vec<usize> = (0..=t).map(|x| (u + x) % n).collect();
            for &i in &idx {
                used[i] = true;
            }
            let av: Vec<Vertex> = idx.iter().map(|&i| a(i)).collect();
            let bv: Vec<Vertex> = idx.iter().map(|&i| b(i)).collect();
            for v in mask_list(&mut dg, &av, g - 1) {
                near_a[v] = true;
            }
            for v in mask_list(&mut dg, &bv, g - 1) {
                near_b[v] = true;
            }
            surgeries.push(Surgery { u, l: u + t, a_left: a(left_a[s]), b_left: b(left_b[s]) });
        }
    }

    // cycle successor map, extended by surgery
    let mut succ: Vec<Vertex> = (0..2 * n).map(|v| (v + 1) % (2 * n)).collect();
    let mut matched: Vec<(Vertex, Vertex)> =
        (0..n).filter(|&i| mate[i] != usize::MAX).map(|i| (a(i), b(mate[i]))).collect();
    for s in &surgeries {
        let (u, l) = (s.u, s.l);
        let a_star = dg.add_vertex();
        let b_star = dg.add_vertex();
        succ.push(0);
        succ.push(0);
        dg.add_edge(s.b_left, a_star);
        dg.add_edge(a_star, b(u));
        dg.add_edge(s.a_left, b_star);
        dg.add_edge(b_star, a(l));
        for i in u..=l {
            dg.remove_edge(a(i), b(i));
        }
        dg.add_edge(a_star, b(u + 1));
        dg.add_edge(a(l - 1), b_star);
        for i in u + 1..l {
            dg.add_edge(a(i - 1), b(i + 1));
        }
        succ[b(u)] = a_star;
        succ[a_star] = b(u + 1);
        for i in u + 1..=l {
            succ[b(i)] = a(i - 1);
        }
        for i in u..=l - 2 {
            succ[a(i)] = b(i + 2);
        }
        succ[a(l - 1)] = b_star;
        succ[b_star] = a(l);
        matched.push((a_star, s.b_left));
        matched.push((s.a_left, b_star));
    }

    // walk the cycle from vertex 0 and relabel
    let total = dg.n();
    let mut pos = vec![usize::MAX; total];
    let mut v = 0;
    for p in 0..total {
        if pos[v] != usize::MAX {
            return Err("surgery broke the Hamiltonian cycle".into());
        }
        pos[v] = p;
        v = succ[v];
    }
    if v != 0 {
        return Err("surgery broke the Hamiltonian cycle".into());
    }
    let half = total / 2;
    let mut pi = vec![usize::MAX; half];
    for &(x, y) in &matched {
        let (pa, pb) = if pos[x] % 2 == 0 { (pos[x], pos[y]) } else { (pos[y], pos[x]) };
        pi[pa / 2] = ((pb + 1) / 2) % half;
    }
    let mut out = PiGraph::from_pi(pi).map_err(|e| e.to_string())?;
    let relabeled: Vec<(Vertex, Vertex)> = {
        let mut e: Vec<(Vertex, Vertex)> =
            dg.edges().into_iter().map(|(x, y)| (pos[x].min(pos[y]), pos[x].max(pos[y]))).collect();
        e.sort_unstable();
        e
    };
    if relabeled != out.graph.edges() {
        return Err("surgery output is not cycle plus matching".into());
    }
    out.leftovers = k;
    Ok(out)
}

/// Index into `free` of a vertex outside the last ball: random probes first,
/// then a full scan from a random offset.
fn pick_free(dg: &DynGraph, free: &[usize], rng: &mut ChaCha8Rng, vertex: impl Fn(usize) -> Vertex) -> Option<usize> {
    if free.is_empty() {
        return None;
    }
    for _ in 0..16 {
        let p = rng.gen_range(0..free.len());
        if !dg.in_ball(vertex(free[p])) {
            return Some(p);
        }
    }
    let off = rng.gen_range(0..free.len());
    (0..free.len()).map(|x| (x + off) % free.len()).find(|&p| !dg.in_ball(vertex(free[p])))
}

fn mask(dg: &mut DynGraph, sources: &[Vertex], radius: usize) -> Vec<bool> {
    let mut m = vec![false; dg.n()];
    for v in mask_list(dg, sources, radius) {
        m[v] = true;
    }
    m
}

fn mask_list(dg: &mut DynGraph, sources: &[Vertex], radius: usize) -> Vec<Vertex> {
    if sources.is_empty() {
        return Vec::new();
    }
    dg.ball(sources, radius).to_vec()
}
