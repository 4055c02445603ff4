use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dyn_graph::DynGraph;
use super::pi_graph::{build_pi_graph_with, guaranteed_n, PiGraph, PiGraphOptions};
use super::{build_cycle, build_h, canonical_relabel, Bijection, FamilyError, GdGraph};
use crate::graph::{girth, Girth};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizePolicy {
    Practical(u64),
    PaperBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeGirthOptions {
    pub d: usize,
    pub gamma: usize,
    pub policy: SizePolicy,
    /// Largest vertex count any level may reach.
    pub max_vertices: usize,
    /// Also find `π_d` for the top level.
    pub final_pi: bool,
    pub retries: usize,
}

impl LargeGirthOptions {
    pub fn new(d: usize, gamma: usize, policy: SizePolicy) -> Self {
        LargeGirthOptions { d, gamma, policy, max_vertices: 2_000_000, final_pi: false, retries: 4 }
    }
}

/// Sizes are kept symbolic because they overflow anything storable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SizeBound {
    Exact(BigUint),
    /// `coeff · 2^exponent`.
    Pow2 {
        coeff: BigUint,
        exponent: Box<SizeBound>,
    },
}

impl SizeBound {
    fn scale(&self, k: &BigUint) -> SizeBound {
        match self {
            SizeBound::Exact(x) => SizeBound::Exact(x * k),
            SizeBound::Pow2 { coeff, exponent } => SizeBound::Pow2 { coeff: coeff * k, exponent: exponent.clone() },
        }
    }

    /// The value itself when it has at most `max_bits` bits.
    pub fn to_exact(&self, max_bits: u64) -> Option<BigUint> {
        match self {
            SizeBound::Exact(x) => (x.bits() <= max_bits).then(|| x.clone()),
            SizeBound::Pow2 { coeff, exponent } => {
                let e = exponent.to_exact(64)?;
                let e = u64::try_from(&e).ok()?;
                (e.checked_add(coeff.bits())? <= max_bits).then(|| coeff << e)
            }
        }
    }

    /// Nesting depth of powers of two.
    pub fn height(&self) -> usize {
        match self {
            SizeBound::Exact(_) => 0,
            SizeBound::Pow2 { exponent, .. } => 1 + exponent.height(),
        }
    }
}

impl fmt::Display for SizeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeBound::Exact(x) => write!(f, "{x}"),
            SizeBound::Pow2 { coeff, exponent } => match **exponent {
                SizeBound::Exact(_) => write!(f, "{coeff}*2^{exponent}"),
                _ => write!(f, "{coeff}*2^({exponent})"),
            },
        }
    }
}

/// Estimated sizes `N_2, ..., N_d` of a girth `> g` member:
/// `N_2 ≈ g`, `N_3 ≈ 12·2^(12g+4)`, `N_{k+1} ≈ 12·2^(36·g·N_k)`.
pub fn guaranteed_sizes(d: usize, g: usize) -> Vec<SizeBound> {
    let mut out = Vec::new();
    if d < 2 {
        return out;
    }
    let cycle = (g + 1).max(6).next_multiple_of(2);
    out.push(SizeBound::Exact(BigUint::from(cycle)));
    if d >= 3 {
        let exp = SizeBound::Exact(BigUint::from(12 * g + 4));
        out.push(SizeBound::Pow2 { coeff: BigUint::from(12u8), exponent: Box::new(exp) });
    }
    for _ in 4..=d {
        let prev = out.last().expect("nonempty");
        let exponent = prev.scale(&BigUint::from(36 * g));
        out.push(SizeBound::Pow2 { coeff: BigUint::from(12u8), exponent: Box::new(exponent) });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub vertices: usize,
    /// Copies of the previous level; the π-graph half size at level 2.
    pub copies: usize,
    pub girth: Girth,
    /// Girth of the level with its π edges added, when a π was found.
    pub girth_with_pi: Option<Girth>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LargeGirth {
    Built { graph: GdGraph, pi: Option<Bijection>, girth: Girth, levels: Vec<LevelReport> },
    Sizes { guaranteed_n: BigUint, sizes: Vec<SizeBound> },
}

/// Re-expresses the matching of a π-graph on `g.n()` vertices as a map
/// `A -> B` of a canonically labeled member: label `i` of the π-graph cycle
/// is vertex `i` of `g`.
pub fn lift_pi(g: &GdGraph, p: &PiGraph) -> Result<Bijection, FamilyError> {
    if 2 * p.n != g.n() {
        return Err(FamilyError::SizeMismatch(format!("π-graph on {} vertices, member on {}", 2 * p.n, g.n())));
    }
    if g.bipartition != p.bipartition() {
        return Err(FamilyError::Invalid("member is not canonically labeled".into()));
    }
    Ok(p.bijection())
}

/// Greedily matches `A` to `B` so that each new edge joins vertices at
/// distance at least `gamma`, repairing stalls by exchanging an existing
/// pair. On success the graph plus the matching has girth `> gamma - 1`
/// and more precisely every added edge closes only cycles longer than `gamma`.
pub fn grow_factor(g: &GdGraph, gamma: usize, seed: u64, attempts: usize) -> Option<Bijection> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts.max(1) {
        let mut dg = DynGraph::new(n);
        for &(u, v) in g.graph.edges() {
            dg.add_edge(u, v);
        }
        let mut order = g.bipartition.a.clone();
        order.shuffle(&mut rng);
        let mut free_b = g.bipartition.b.clone();
        let mut mate = vec![usize::MAX; n];
        let mut left = Vec::new();
        for &a in &order {
            dg.ball(&[a], gamma - 1);
            if let Some(p) = pick(&dg, &free_b, &mut rng) {
                let b = free_b.swap_remove(p);
                dg.add_edge(a, b);
                mate[a] = b;
            } else {
                left.push(a);
            }
        }
        let mut stuck = false;
        for a in left {
            if !repair(&mut dg, &mut mate, &mut free_b, a, gamma, &g.bipartition.a, &mut rng) {
                stuck = true;
                break;
            }
        }
        if !stuck {
            return Some(Bijection::new(g.bipartition.a.iter().map(|&a| (a, mate[a])).collect()));
        }
    }
    None
}

fn pick(dg: &DynGraph, free: &[usize], rng: &mut ChaCha8Rng) -> Option<usize> {
    if free.is_empty() {
        return None;
    }
    for _ in 0..16 {
        let p = rng.gen_range(0..free.len());
        if !dg.in_ball(free[p]) {
            return Some(p);
        }
    }
    let off = rng.gen_range(0..free.len());
    (0..free.len()).map(|x| (x + off) % free.len()).find(|&p| !dg.in_ball(free[p]))
}

/// Matches the stuck vertex `a` by trading: drop `a'-b'`, add `a-b'` and
/// `a'-b` for some free `b`, each at distance `>= gamma` when added.
fn repair(
    dg: &mut DynGraph,
    mate: &mut [usize],
    free_b: &mut Vec<usize>,
    a: usize,
    gamma: usize,
    a_side: &[usize],
    rng: &mut ChaCha8Rng,
) -> bool {
    let mut partners: Vec<usize> = a_side.iter().copied().filter(|&x| mate[x] != usize::MAX).collect();
    partners.shuffle(rng);
    partners.truncate(4096);
    for a2 in partners {
        let b2 = mate[a2];
        dg.remove_edge(a2, b2);
        dg.ball(&[a], gamma - 1);
        if dg.in_ball(b2) {
            dg.add_edge(a2, b2);
            continue;
        }
        dg.add_edge(a, b2);
        dg.ball(&[a2], gamma - 1);
        if let Some(p) = free_b.iter().position(|&b| !dg.in_ball(b)) {
            let b = free_b.swap_remove(p);
            dg.add_edge(a2, b);
            mate[a] = b2;
            mate[a2] = b;
            return true;
        }
        dg.remove_edge(a, b2);
        dg.add_edge(a2, b2);
    }
    false
}

fn infeasible(level: usize, detail: impl Into<String>) -> FamilyError {
    FamilyError::InfeasibleAtBudget { level, detail: detail.into() }
}

/// A member of level `d` whose girth exceeds `gamma`, together with the
/// map `π_d` when requested.
///
/// The practical policy searches upward from small sizes and verifies girth
/// directly at each level: the base `π_2` comes from [`build_pi_graph_with`],
/// each higher `π_k` is grown on `G_k` by [`grow_factor`], and
/// `G_{k+1} = H(m, G_k, π_k)` with `m` raised from 5 until the next `π`
/// exists. [`SizePolicy::PaperBound`] only reports the guaranteed sizes.
pub fn build_large_girth(opts: &LargeGirthOptions) -> Result<LargeGirth, FamilyError> {
    let (d, gamma) = (opts.d, opts.gamma);
    if d < 2 || gamma <= 3 {
        return Err(FamilyError::Invalid(format!("need d >= 2 and girth target > 3, got d = {d}, {gamma}")));
    }
    let seed = match opts.policy {
        SizePolicy::PaperBound => {
            return Ok(LargeGirth::Sizes { guaranteed_n: guaranteed_n(gamma), sizes: guaranteed_sizes(d, gamma) });
        }
        SizePolicy::Practical(seed) => seed,
    };
    let mut levels = Vec::new();

    let need_base_pi = d >= 3 || opts.final_pi;
    if !need_base_pi {
        let n = (gamma + 1).max(6).next_multiple_of(2);
        if n > opts.max_vertices {
            return Err(infeasible(2, format!("cycle of length {n} exceeds the budget")));
        }
        let c = build_cycle(n)?;
        let gi = girth(&c.graph);
        levels.push(LevelReport { level: 2, vertices: n, copies: n / 2, girth: gi, girth_with_pi: None });
        return Ok(LargeGirth::Built { graph: c, pi: None, girth: gi, levels });
    }

    let mut half = (gamma / 2 + 2).max(3);
    let base = loop {
        if 2 * half > opts.max_vertices {
            return Err(infeasible(2, format!("no π-graph with girth > {gamma} up to {} vertices", opts.max_vertices)));
        }
        let po = PiGraphOptions { strict: true, ..PiGraphOptions::new(gamma, half, seed ^ half as u64, opts.retries) };
        match build_pi_graph_with(&po) {
            Ok(p) => break p,
            Err(FamilyError::RetriesExhausted { .. }) => half += half.div_ceil(4),
            Err(e) => return Err(e),
        }
    };
    let mut g = base.cycle();
    let mut pi = base.bijection();
    levels.push(LevelReport {
        level: 2,
        vertices: g.n(),
        copies: base.n,
        girth: girth(&g.graph),
        girth_with_pi: Some(base.girth),
    });

    for level in 3..=d {
        let top = level == d;
        let mut m: usize = 5;
        let (next, next_pi) = loop {
            let size = m.checked_mul(g.n()).filter(|&s| s <= opts.max_vertices);
            let Some(_) = size else {
                return Err(infeasible(level, format!("no π for level {level} below {} vertices", opts.max_vertices)));
            };
            let h = canonical_relabel(&build_h(m, &g, &pi)?)?;
            if top && !opts.final_pi {
                break (h, None);
            }
            let s = seed.wrapping_mul(31).wrapping_add((level * 1000 + m) as u64);
            match grow_factor(&h, gamma, s, opts.retries) {
                Some(p) => break (h, Some(p)),
                None => m += 1,
            }
        };
        let gi = girth(&next.graph);
        if !gi.exceeds(gamma) {
            return Err(FamilyError::Invalid(format!("level {level} has girth {gi}, not above {gamma}")));
        }
        let with_pi = next_pi.as_ref().map(|p| girth(&next.graph.with_edges(p.edges()).expect("π edges are new")));
        levels.push(LevelReport { level, vertices: next.n(), copies: m, girth: gi, girth_with_pi: with_pi });
        g = next;
        match next_pi {
            Some(p) => pi = p,
            None => {
                return Ok(LargeGirth::Built { graph: g, pi: None, girth: gi, levels });
            }
        }
    }
    let gi = levels.last().expect("nonempty").girth;
    Ok(LargeGirth::Built { graph: g, pi: Some(pi), girth: gi, levels })
}
