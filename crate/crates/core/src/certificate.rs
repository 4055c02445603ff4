//! Checkable lower-bound certificates for `Σ f(v)` on family members.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{FamilyError, GdGraph};
use crate::graph::{FactorDefect, Graph, OneFactor, Vertex};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("set function has no value for {0:?}")]
    MissingSubset(Vec<Vertex>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("witness failure at level {level}, term {term}: {reason}")]
    WitnessFailure { level: usize, term: String, reason: TermDefect },
    #[error("arithmetic mismatch: {0}")]
    Arithmetic(String),
    #[error("decomposition identity fails on {blocks} blocks")]
    IdentityFailure { blocks: usize, counterexample: Vec<Rational> },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Values on vertex subsets, either tabulated or pseudo-random.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFunction {
    /// Keys are sorted vertex lists.
    Table(HashMap<Vec<Vertex>, Rational>),
    /// A fixed pseudo-random value per subset with `f(∅) = 0`.
    Hashed(u64),
}

impl SetFunction {
    pub fn table<I: IntoIterator<Item = (Vec<Vertex>, Rational)>>(entries: I) -> Self {
        SetFunction::Table(
            entries
                .into_iter()
                .map(|(mut k, v)| {
                    k.sort_unstable();
                    k.dedup();
                    (k, v)
                })
                .collect(),
        )
    }

    /// Tabulates `values[mask]` over the subsets of `0..n`.
    pub fn from_masks(n: usize, values: &[Rational]) -> Self {
        SetFunction::Table(
            values
                .iter()
                .enumerate()
                .map(|(mask, v)| ((0..n).filter(|&i| mask >> i & 1 == 1).collect(), v.clone()))
                .collect(),
        )
    }

    /// Table of `f(S) = g(|S|)` over every subset of `0..n`.
    pub fn by_size(n: usize, g: impl Fn(usize) -> Rational) -> Self {
        let values: Vec<Rational> = (0..1usize << n).map(|m| g(m.count_ones() as usize)).collect();
        SetFunction::from_masks(n, &values)
    }

    /// `f` on a sorted, duplicate-free set.
    pub fn eval(&self, s: &[Vertex]) -> Result<Rational, CertError> {
        match self {
            SetFunction::Table(t) => t.get(s).cloned().ok_or_else(|| CertError::MissingSubset(s.to_vec())),
            SetFunction::Hashed(seed) => {
                if s.is_empty() {
                    return Ok(Rational::zero());
                }
                let mut h = DefaultHasher::new();
                seed.hash(&mut h);
                s.hash(&mut h);
                let x = h.finish();
                Ok(Rational::new((x % 1_000_003) as i64, 1 + (x >> 40) as i64 % 97))
            }
        }
    }
}

fn union(sets: &[&[Vertex]]) -> Vec<Vertex> {
    let mut u: Vec<Vertex> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// `I(A;B‖C) = f(AC) + f(BC) − f(C) − f(ABC)`, which is `I(A;B)` for empty `C`.
pub fn eval_i(f: &SetFunction, a: &[Vertex], b: &[Vertex], c: &[Vertex]) -> Result<Rational, CertError> {
    let ac = union(&[a, c]);
    let bc = union(&[b, c]);
    let cc = union(&[c]);
    let abc = union(&[a, b, c]);
    Ok(f.eval(&ac)? + f.eval(&bc)? - f.eval(&cc)? - f.eval(&abc)?)
}

/// Checks over `trials` random rational functions on `n` abstract blocks that
/// `Σ f(E_i) − f(E_1…E_n)` equals the chained sum of `3 + (n − 4)` terms.
pub fn check_decomposition_identity(n: usize, trials: usize, seed: u64) -> Result<(), CertError> {
    if n < 5 {
        return Err(CertError::Precondition(format!("decomposition needs at least 5 blocks, got {n}")));
    }
    if n > 20 {
        return Err(CertError::Precondition(format!("{n} blocks exceed the tabulation limit of 20")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = (1usize << n) - 1;
    let prefix = |lo: usize, hi: usize| -> usize { (lo..hi).fold(0, |m, i| m | 1 << i) };
    for _ in 0..trials {
        let mut f: Vec<Rational> =
            (0..=full).map(|_| Rational::new(rng.gen_range(-50..=50), rng.gen_range(1..=12))).collect();
        f[0] = Rational::zero();
        let i2 = |x: usize, y: usize| f[x].clone() + &f[y] - &f[x | y];
        let lhs: Rational = (0..n).map(|i| f[1 << i].clone()).sum::<Rational>() - &f[full];
        let mut rhs = i2(prefix(0, 1), prefix(1, 2)) + i2(prefix(0, 2), prefix(2, 3)) + i2(prefix(0, 3), prefix(3, n));
        for k in 4..n {
            rhs += i2(prefix(3, k), prefix(k, k + 1));
        }
        if lhs != rhs {
            return Err(CertError::IdentityFailure { blocks: n, counterexample: f });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    /// `I(A;B‖C) ≥ 0`.
    Shannon,
    /// `I(A;B‖C) ≥ 1` for independent or empty `C` with `AC`, `BC` qualified.
    L1,
    /// `I(A;B) ≥ |B|` for independent `B` with a 1-factor into qualified `A`.
    L2,
    /// `f(A) ≥ |B| + 1` under the premises of `L2`.
    L3,
    /// `I(A;B) ≥ |B′| + 1` for qualified `A`, `B` and independent `B′ ⊆ B`
    /// with a 1-factor into `A`.
    L4,
}

/// One inequality of a certificate with its witness. `factor` pairs run
/// from the witness side (`B` or `B′`) into `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermBound {
    pub kind: TermKind,
    #[serde(rename = "A")]
    pub a: Vec<Vertex>,
    #[serde(rename = "B")]
    pub b: Vec<Vertex>,
    #[serde(rename = "C", default)]
    pub c: Vec<Vertex>,
    #[serde(rename = "B_prime", default)]
    pub b_prime: Vec<Vertex>,
    #[serde(default)]
    pub factor: OneFactor,
    pub bound: Rational,
}

impl TermBound {
    fn new(kind: TermKind, a: Vec<Vertex>, b: Vec<Vertex>, bound: Rational) -> Self {
        TermBound { kind, a, b, c: Vec::new(), b_prime: Vec::new(), factor: OneFactor::default(), bound }
    }

    /// The quantity the term bounds: `f(A)` for `L3`, `I(A;B‖C)` otherwise.
    pub fn value(&self, f: &SetFunction) -> Result<Rational, CertError> {
        match self.kind {
            TermKind::L3 => f.eval(&self.a),
            _ => eval_i(f, &self.a, &self.b, &self.c),
        }
    }

    /// The witness set whose premises the term relies on.
    pub fn witness_set(&self) -> &[Vertex] {
        match self.kind {
            TermKind::Shannon => &[],
            TermKind::L4 => &self.b_prime,
            TermKind::L1 => &self.c,
            _ => &self.b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum TermDefect {
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("set {0} is not sorted and duplicate-free")]
    Unsorted(&'static str),
    #[error("sets {0} and {1} intersect")]
    NotDisjoint(&'static str, &'static str),
    #[error("{0} is not independent (edge {1}-{2})")]
    NotIndependent(&'static str, Vertex, Vertex),
    #[error("{0} is independent")]
    Independent(&'static str),
    #[error("B' is not contained in B")]
    NotSubset,
    #[error("set {0} must be empty for this kind")]
    UnexpectedSet(&'static str),
    #[error("1-factor: {0}")]
    Factor(FactorDefect),
    #[error("claimed bound {claimed} exceeds entitled {entitled}")]
    BoundTooLarge { claimed: Rational, entitled: Rational },
}

fn sorted_in_range(g: &Graph, s: &[Vertex], name: &'static str) -> Result<(), TermDefect> {
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TermDefect::Unsorted(name));
    }
    match s.last() {
        Some(&v) if v >= g.n() => Err(TermDefect::OutOfRange(v)),
        _ => Ok(()),
    }
}

fn disjoint(x: &[Vertex], y: &[Vertex], nx: &'static str, ny: &'static str) -> Result<(), TermDefect> {
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Err(TermDefect::NotDisjoint(nx, ny)),
        }
    }
    Ok(())
}

fn find_edge(g: &Graph, s: &[Vertex]) -> Option<(Vertex, Vertex)> {
    s.iter().find_map(|&v| g.neighbors(v).iter().find(|w| s.binary_search(w).is_ok()).map(|&w| (v, w)))
}

fn independent(g: &Graph, s: &[Vertex], name: &'static str) -> Result<(), TermDefect> {
    match find_edge(g, s) {
        Some((u, v)) => Err(TermDefect::NotIndependent(name, u, v)),
        None => Ok(()),
    }
}

fn qualified(g: &Graph, s: &[Vertex], name: &'static str) -> Result<(), TermDefect> {
    match find_edge(g, s) {
        Some(_) => Ok(()),
        None => Err(TermDefect::Independent(name)),
    }
}

/// Induced 1-factor from the sorted set `from` into the sorted set `into`.
fn check_factor(g: &Graph, from: &[Vertex], into: &[Vertex], f: &OneFactor) -> Result<(), TermDefect> {
    let bad = |d| Err(TermDefect::Factor(d));
    let mut partner: HashMap<Vertex, Vertex> = HashMap::with_capacity(f.len());
    let mut used: HashMap<Vertex, ()> = HashMap::with_capacity(f.len());
    for &(b, a) in &f.pairs {
        if from.binary_search(&b).is_err() || used.insert(b, ()).is_some() {
            return bad(FactorDefect::Unsaturated(b));
        }
        if into.binary_search(&a).is_err() || partner.insert(a, b).is_some() {
            return bad(FactorDefect::BadEndpoint(a));
        }
    }
    if let Some(&b) = from.iter().find(|b| !used.contains_key(b)) {
        return bad(FactorDefect::Unsaturated(b));
    }
    for &(b, a) in &f.pairs {
        if !g.has_edge(b, a) {
            return bad(FactorDefect::MissingEdge(b, a));
        }
        if let Some(&w) = g.neighbors(b).iter().find(|&&w| w != a && partner.contains_key(&w)) {
            return bad(FactorDefect::ForbiddenEdge(b, w));
        }
    }
    Ok(())
}

/// Checks the premises of `t` against `g` and that the claimed bound does
/// not exceed what the premises entitle.
pub fn verify_term(g: &Graph, t: &TermBound) -> Result<(), TermDefect> {
    sorted_in_range(g, &t.a, "A")?;
    sorted_in_range(g, &t.b, "B")?;
    sorted_in_range(g, &t.c, "C")?;
    sorted_in_range(g, &t.b_prime, "B'")?;
    let entitled = match t.kind {
        TermKind::Shannon | TermKind::L1 => {
            disjoint(&t.a, &t.b, "A", "B")?;
            disjoint(&t.a, &t.c, "A", "C")?;
            disjoint(&t.b, &t.c, "B", "C")?;
            if t.kind == TermKind::Shannon {
                Rational::zero()
            } else {
                independent(g, &t.c, "C")?;
                qualified(g, &union(&[&t.a, &t.c]), "AC")?;
                qualified(g, &union(&[&t.b, &t.c]), "BC")?;
                Rational::one()
            }
        }
        TermKind::L2 | TermKind::L3 => {
            if !t.c.is_empty() {
                return Err(TermDefect::UnexpectedSet("C"));
            }
            if t.kind == TermKind::L2 && t.b.is_empty() {
                Rational::zero()
            } else {
                disjoint(&t.a, &t.b, "A", "B")?;
                independent(g, &t.b, "B")?;
                qualified(g, &t.a, "A")?;
                check_factor(g, &t.b, &t.a, &t.factor)?;
                let base = Rational::from(t.b.len());
                if t.kind == TermKind::L3 {
                    base + Rational::one()
                } else {
                    base
                }
            }
        }
        TermKind::L4 => {
            if !t.c.is_empty() {
                return Err(TermDefect::UnexpectedSet("C"));
            }
            disjoint(&t.a, &t.b, "A", "B")?;
            qualified(g, &t.a, "A")?;
            qualified(g, &t.b, "B")?;
            if t.b_prime.iter().any(|v| t.b.binary_search(v).is_err()) {
                return Err(TermDefect::NotSubset);
            }
            independent(g, &t.b_prime, "B'")?;
            check_factor(g, &t.b_prime, &t.a, &t.factor)?;
            Rational::from(t.b_prime.len()) + Rational::one()
        }
    };
    if t.bound > entitled {
        return Err(TermDefect::BoundTooLarge { claimed: t.bound.clone(), entitled });
    }
    Ok(())
}

/// Claims `Σ_{v∈U} f(v) − f(U) ≥ subtotal` for `U` the union of `blocks`,
/// split by the chained decomposition over the blocks plus one child claim
/// per block (none when the blocks are single vertices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaNode {
    pub level: usize,
    pub blocks: Vec<Vec<Vertex>>,
    pub terms: Vec<TermBound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<LemmaNode>,
    pub subtotal: Rational,
}

impl LemmaNode {
    pub fn vertices(&self) -> Vec<Vertex> {
        let refs: Vec<&[Vertex]> = self.blocks.iter().map(|b| b.as_slice()).collect();
        union(&refs)
    }

    fn term_count(&self) -> usize {
        self.terms.len() + self.children.iter().map(|c| c.term_count()).sum::<usize>()
    }
}

/// Claims `Σ_v f(v) ≥ total` over all vertices of the graph: `total` is the
/// sum of the direct `terms` plus the lemma subtotals. At level 2 the lemma
/// for the cycle is kept in `cycle_lemma` and checked but not summed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub level: usize,
    pub n: usize,
    pub terms: Vec<TermBound>,
    pub lemmas: Vec<LemmaNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_lemma: Option<LemmaNode>,
    pub total: Rational,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
            + self.lemmas.iter().map(|l| l.term_count()).sum::<usize>()
            + self.cycle_lemma.as_ref().map_or(0, |l| l.term_count())
    }
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v
}

/// Vertices of the cycle spanned by `lo..hi` in walking order, starting at
/// `lo` towards its smaller neighbor.
fn cycle_order(g: &Graph, lo: Vertex, hi: Vertex) -> Result<Vec<Vertex>, CertError> {
    let inside = |w: &Vertex| (lo..hi).contains(w);
    let mut order = vec![lo];
    let mut prev = usize::MAX;
    let mut cur = lo;
    while order.len() < hi - lo {
        let next = g.neighbors(cur).iter().copied().filter(|w| inside(w) && *w != prev).min();
        match next {
            Some(w) if w != lo => {
                order.push(w);
                prev = cur;
                cur = w;
            }
            _ => return Err(CertError::Precondition(format!("vertices {lo}..{hi} do not form a cycle"))),
        }
    }
    Ok(order)
}

fn cycle_lemma(w: &[Vertex]) -> LemmaNode {
    let n = w.len();
    let set = |r: std::ops::Range<usize>| sorted(w[r].to_vec());
    let one = Rational::one();
    let mut terms = vec![TermBound::new(TermKind::Shannon, vec![w[0]], vec![w[1]], Rational::zero())];
    terms.push(TermBound {
        factor: OneFactor::new(vec![(w[2], w[1])]),
        ..TermBound::new(TermKind::L2, set(0..2), vec![w[2]], one.clone())
    });
    // the independent pair w0 w2 is matched to w_{n-1} w3
    terms.push(TermBound {
        b_prime: sorted(vec![w[0], w[2]]),
        factor: OneFactor::new(vec![(w[0], w[n - 1]), (w[2], w[3])]),
        ..TermBound::new(TermKind::L4, set(3..n), set(0..3), Rational::from(3))
    });
    terms.push(TermBound::new(TermKind::Shannon, vec![w[3]], vec![w[4]], Rational::zero()));
    for k in 5..n {
        terms.push(TermBound {
            factor: OneFactor::new(vec![(w[k], w[k - 1])]),
            ..TermBound::new(TermKind::L2, set(3..k), vec![w[k]], one.clone())
        });
    }
    let subtotal = terms.iter().map(|t| &t.bound).sum();
    LemmaNode { level: 2, blocks: w.iter().map(|&v| vec![v]).collect(), terms, children: Vec::new(), subtotal }
}

/// Global view of a member laid out in contiguous blocks.
struct Layout<'a> {
    g: &'a GdGraph,
    offset: Vertex,
}

impl Layout<'_> {
    fn copies(&self) -> usize {
        self.g.copies.len()
    }

    fn copy_set(&self, i: usize) -> Vec<Vertex> {
        let (lo, hi) = self.g.copies[i];
        (lo + self.offset..hi + self.offset).collect()
    }

    fn sides(&self, i: usize) -> (Vec<Vertex>, Vec<Vertex>) {
        let (a, b) = self.g.copy_sides(i);
        (a.iter().map(|v| v + self.offset).collect(), b.iter().map(|v| v + self.offset).collect())
    }

    /// Junction `i` as global `(b in copy i, a in copy i+1)` pairs.
    fn junction(&self, i: usize) -> Vec<(Vertex, Vertex)> {
        self.g.factors[i].pairs.iter().map(|&(b, a)| (b + self.offset, a + self.offset)).collect()
    }

    fn blocks(&self, r: std::ops::Range<usize>) -> Vec<Vertex> {
        r.flat_map(|i| self.copy_set(i)).collect()
    }
}

fn flip(pairs: Vec<(Vertex, Vertex)>) -> Vec<(Vertex, Vertex)> {
    pairs.into_iter().map(|(b, a)| (a, b)).collect()
}

fn lemma_node(g: &GdGraph, offset: Vertex) -> Result<LemmaNode, CertError> {
    if g.d == 2 {
        return Ok(cycle_lemma(&cycle_order(&g.graph, 0, g.n())?.iter().map(|v| v + offset).collect::<Vec<_>>()));
    }
    let lay = Layout { g, offset };
    let n = lay.copies();
    if n < 5 {
        return Err(CertError::Precondition(format!("level {} has {n} copies, at least 5 needed", g.d)));
    }
    let half = Rational::from(g.copy_size() / 2);
    let one = Rational::one();
    // I(V_0..V_{k-1}; V_k) via A_k matched back into B_{k-1}
    let step = |first: usize, k: usize| -> TermBound {
        let (a_k, _) = lay.sides(k);
        TermBound {
            b_prime: a_k,
            factor: OneFactor::new(sorted(flip(lay.junction(k - 1)))),
            ..TermBound::new(TermKind::L4, lay.blocks(first..k), lay.copy_set(k), half.clone() + &one)
        }
    };
    let mut terms = vec![step(0, 1), step(0, 2)];
    let (a0, _) = lay.sides(0);
    let (_, b2) = lay.sides(2);
    let mut middle = lay.junction(2);
    middle.extend(flip(lay.junction(n - 1)));
    terms.push(TermBound {
        b_prime: sorted(union(&[&a0, &b2])),
        factor: OneFactor::new(sorted(middle)),
        ..TermBound::new(TermKind::L4, lay.blocks(3..n), lay.blocks(0..3), Rational::from(g.copy_size()) + &one)
    });
    for k in 4..n {
        terms.push(step(3, k));
    }
    let mut children = Vec::with_capacity(n);
    for i in 0..n {
        children.push(lemma_node(&g.copy(i)?, offset + g.copies[i].0)?);
    }
    let subtotal = terms.iter().map(|t| &t.bound).chain(children.iter().map(|c| &c.subtotal)).sum();
    Ok(LemmaNode { level: g.d, blocks: (0..n).map(|i| lay.copy_set(i)).collect(), terms, children, subtotal })
}

fn check_node_witnesses(g: &Graph, node: &LemmaNode, path: &str) -> Result<(), CertError> {
    for (i, t) in node.terms.iter().enumerate() {
        verify_term(g, t).map_err(|reason| CertError::WitnessFailure {
            level: node.level,
            term: format!("{path}.terms[{i}]"),
            reason,
        })?;
    }
    for (i, c) in node.children.iter().enumerate() {
        check_node_witnesses(g, c, &format!("{path}.children[{i}]"))?;
    }
    Ok(())
}

/// Builds and checks the full induction bounding `Σ_v f(v)` from below by
/// `(d+1)/2 · |V|`, with every witness read off the construction metadata.
pub fn certify_sum_bound(g: &GdGraph) -> Result<Certificate, CertError> {
    let n = g.n();
    let cert = if g.d == 2 {
        let w = cycle_order(&g.graph, 0, n)?;
        if n % 2 == 1 || n < 6 {
            return Err(CertError::Precondition(format!("cycle length {n}")));
        }
        let mut terms = Vec::with_capacity(n);
        for i in (0..n).step_by(2) {
            let (b, c) = (w[i], w[i + 1]);
            let (a, d) = (w[(i + n - 1) % n], w[(i + 2) % n]);
            terms.push(TermBound::new(TermKind::Shannon, vec![b], vec![c], Rational::zero()));
            terms.push(TermBound {
                factor: OneFactor::new(vec![(a, b), (d, c)]),
                ..TermBound::new(TermKind::L3, sorted(vec![b, c]), sorted(vec![a, d]), Rational::from(3))
            });
        }
        let total = terms.iter().map(|t| &t.bound).sum();
        Certificate { level: 2, n, terms, lemmas: Vec::new(), cycle_lemma: Some(cycle_lemma(&w)), total }
    } else {
        let lay = Layout { g, offset: 0 };
        let m = lay.copies();
        if m < 3 {
            return Err(CertError::Precondition(format!("{m} copies")));
        }
        let mut terms = Vec::with_capacity(m);
        let mut lemmas = Vec::with_capacity(m);
        for i in 0..m {
            let prev = (i + m - 1) % m;
            let next = (i + 1) % m;
            let (_, b_prev) = lay.sides(prev);
            let (a_next, _) = lay.sides(next);
            let mut pairs = lay.junction(prev);
            pairs.extend(flip(lay.junction(i)));
            terms.push(TermBound {
                factor: OneFactor::new(sorted(pairs)),
                ..TermBound::new(
                    TermKind::L3,
                    lay.copy_set(i),
                    sorted(union(&[&b_prev, &a_next])),
                    Rational::from(g.copy_size() + 1),
                )
            });
            lemmas.push(lemma_node(&g.copy(i)?, g.copies[i].0)?);
        }
        let total = terms.iter().map(|t| &t.bound).chain(lemmas.iter().map(|l| &l.subtotal)).sum();
        Certificate { level: g.d, n, terms, lemmas, cycle_lemma: None, total }
    };

    for (i, t) in cert.terms.iter().enumerate() {
        verify_term(&g.graph, t).map_err(|reason| CertError::WitnessFailure {
            level: g.d,
            term: format!("terms[{i}]"),
            reason,
        })?;
    }
    for (i, l) in cert.lemmas.iter().enumerate() {
        check_node_witnesses(&g.graph, l, &format!("lemmas[{i}]"))?;
    }
    if let Some(l) = &cert.cycle_lemma {
        check_node_witnesses(&g.graph, l, "cycle_lemma")?;
        if l.subtotal != Rational::from(n - 1) {
            return Err(CertError::Arithmetic(format!("cycle lemma sums to {}, expected {}", l.subtotal, n - 1)));
        }
    }
    let expected = Rational::new((g.d as i64 + 1) * n as i64, 2);
    if cert.total != expected {
        return Err(CertError::Arithmetic(format!("total {} differs from {expected}", cert.total)));
    }
    Ok(cert)
}

/// Where and why an audit rejected a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {reason}")]
pub struct AuditFailure {
    pub path: String,
    pub reason: String,
}

fn fail<T>(path: &str, reason: impl Into<String>) -> Result<T, AuditFailure> {
    Err(AuditFailure { path: path.to_string(), reason: reason.into() })
}

fn singles(f: &SetFunction, s: &[Vertex]) -> Result<Rational, CertError> {
    let mut total = Rational::zero();
    for &v in s {
        total += f.eval(&[v])?;
    }
    Ok(total)
}

fn audit_node(g: &Graph, node: &LemmaNode, fs: &[SetFunction], path: &str) -> Result<(), AuditFailure> {
    for (i, t) in node.terms.iter().enumerate() {
        if let Err(e) = verify_term(g, t) {
            return fail(&format!("{path}.terms[{i}]"), e.to_string());
        }
    }
    let blocks_total: usize = node.blocks.iter().map(|b| b.len()).sum();
    let all = node.vertices();
    if blocks_total != all.len() {
        return fail(path, "blocks overlap");
    }
    let singleton_blocks = node.blocks.iter().all(|b| b.len() == 1);
    if singleton_blocks != node.children.is_empty() {
        return fail(path, "children must match the non-singleton blocks");
    }
    if !node.children.is_empty() {
        if node.children.len() != node.blocks.len() {
            return fail(path, "one child per block required");
        }
        for (i, (c, b)) in node.children.iter().zip(&node.blocks).enumerate() {
            if c.vertices() != sorted(b.clone()) {
                return fail(&format!("{path}.children[{i}]"), "child does not cover its block");
            }
        }
    }
    let sum: Rational = node.terms.iter().map(|t| &t.bound).chain(node.children.iter().map(|c| &c.subtotal)).sum();
    if sum != node.subtotal {
        return fail(path, format!("parts sum to {sum}, subtotal claims {}", node.subtotal));
    }
    if node.terms.iter().any(|t| t.kind == TermKind::L3) {
        return fail(path, "f(A) bounds cannot appear in a difference identity");
    }
    for (trial, f) in fs.iter().enumerate() {
        let id = (|| -> Result<bool, CertError> {
            let lhs = singles(f, &all)? - f.eval(&all)?;
            let mut rhs = Rational::zero();
            for t in &node.terms {
                rhs += t.value(f)?;
            }
            for c in &node.children {
                let cv = c.vertices();
                rhs += singles(f, &cv)? - f.eval(&cv)?;
            }
            Ok(lhs == rhs)
        })();
        match id {
            Ok(true) => {}
            Ok(false) => return fail(path, format!("decomposition identity fails on trial {trial}")),
            Err(e) => return fail(path, e.to_string()),
        }
    }
    for (i, c) in node.children.iter().enumerate() {
        audit_node(g, c, fs, &format!("{path}.children[{i}]"))?;
    }
    Ok(())
}

/// Independent re-check of a certificate against `g`: every witness, every
/// decomposition identity under `trials` random set functions, and all sums.
pub fn audit_certificate(g: &Graph, c: &Certificate, trials: usize, seed: u64) -> Result<(), AuditFailure> {
    if c.n != g.n() {
        return fail("root", format!("certificate for {} vertices, graph has {}", c.n, g.n()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<SetFunction> = (0..trials.max(1)).map(|_| SetFunction::Hashed(rng.gen())).collect();
    for (i, t) in c.terms.iter().enumerate() {
        if let Err(e) = verify_term(g, t) {
            return fail(&format!("terms[{i}]"), e.to_string());
        }
        if !matches!(t.kind, TermKind::L3 | TermKind::Shannon) {
            return fail(&format!("terms[{i}]"), "top-level terms must be f(A) bounds or Shannon terms");
        }
    }
    for (i, l) in c.lemmas.iter().enumerate() {
        audit_node(g, l, &fs, &format!("lemmas[{i}]"))?;
    }
    if let Some(l) = &c.cycle_lemma {
        audit_node(g, l, &fs, "cycle_lemma")?;
    }
    let sum: Rational = c.terms.iter().map(|t| &t.bound).chain(c.lemmas.iter().map(|l| &l.subtotal)).sum();
    if sum != c.total {
        return fail("root", format!("parts sum to {sum}, total claims {}", c.total));
    }
    // Σ_v f(v) = Σ term values + Σ lemma left-hand sides, for every trial
    let every: Vec<Vertex> = (0..g.n()).collect();
    for (trial, f) in fs.iter().enumerate() {
        let id = (|| -> Result<bool, CertError> {
            let lhs = singles(f, &every)?;
            let mut rhs = Rational::zero();
            for t in &c.terms {
                rhs += t.value(f)?;
            }
            for l in &c.lemmas {
                let lv = l.vertices();
                rhs += singles(f, &lv)? - f.eval(&lv)?;
            }
            Ok(lhs == rhs)
        })();
        match id {
            Ok(true) => {}
            Ok(false) => return fail("root", format!("vertex sum identity fails on trial {trial}")),
            Err(e) => return fail("root", e.to_string()),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{entropy_lp_complexity, EntropyObjective};
    use crate::family::{build_cycle, build_gd};

    #[test]
    fn eval_i_examples() {
        let card = SetFunction::by_size(6, Rational::from);
        assert_eq!(eval_i(&card, &[0], &[1], &[]).unwrap(), Rational::zero());
        assert_eq!(eval_i(&card, &[], &[], &[]).unwrap(), Rational::zero());
        let capped = SetFunction::by_size(4, |k| Rational::from(k.min(2)));
        assert_eq!(eval_i(&capped, &[0], &[1], &[2]).unwrap(), Rational::one());
        let partial = SetFunction::table([(vec![0], Rational::one())]);
        assert_eq!(eval_i(&partial, &[0], &[1], &[]), Err(CertError::MissingSubset(vec![1])));
    }

    #[test]
    fn decomposition_identity() {
        check_decomposition_identity(5, 1000, 1).unwrap();
        check_decomposition_identity(8, 1000, 2).unwrap();
        assert!(matches!(check_decomposition_identity(4, 10, 0), Err(CertError::Precondition(_))));
    }

    #[test]
    fn verify_term_examples() {
        let c6 = Graph::cycle(6);
        let l4 = TermBound {
            b_prime: vec![3, 5],
            factor: OneFactor::new(vec![(3, 2), (5, 0)]),
            ..TermBound::new(TermKind::L4, vec![0, 1, 2], vec![3, 4, 5], Rational::from(3))
        };
        verify_term(&c6, &l4).unwrap();
        let inflated = TermBound { bound: Rational::from(4), ..l4 };
        assert!(matches!(verify_term(&c6, &inflated), Err(TermDefect::BoundTooLarge { .. })));

        let l2 = TermBound {
            factor: OneFactor::new(vec![(1, 0)]),
            ..TermBound::new(TermKind::L2, vec![0, 2], vec![1], Rational::one())
        };
        assert_eq!(verify_term(&c6, &l2), Err(TermDefect::Independent("A")));

        let l1 = TermBound { c: vec![1], ..TermBound::new(TermKind::L1, vec![0], vec![2], Rational::one()) };
        verify_term(&c6, &l1).unwrap();
        let l1_bad = TermBound { c: vec![1, 2], ..TermBound::new(TermKind::L1, vec![0], vec![3], Rational::one()) };
        assert!(matches!(verify_term(&c6, &l1_bad), Err(TermDefect::NotIndependent("C", ..))));

        let empty = TermBound::new(TermKind::L2, vec![0, 2], vec![], Rational::zero());
        verify_term(&c6, &empty).unwrap();

        let l3 = TermBound {
            factor: OneFactor::new(vec![(0, 1), (3, 2)]),
            ..TermBound::new(TermKind::L3, vec![1, 2], vec![0, 3], Rational::from(3))
        };
        verify_term(&c6, &l3).unwrap();
    }

    #[test]
    fn cycle_certificates() {
        for n in [6, 8, 12, 20] {
            let c = certify_sum_bound(&build_cycle(n).unwrap()).unwrap();
            assert_eq!(c.total, Rational::from(3 * n / 2));
            let lemma = c.cycle_lemma.as_ref().unwrap();
            assert_eq!(lemma.terms.len(), n - 1);
            assert_eq!(lemma.subtotal, Rational::from(n - 1));
            audit_certificate(&Graph::cycle(n), &c, 20, 1).unwrap();
        }
        let c6 = certify_sum_bound(&build_cycle(6).unwrap()).unwrap();
        let bounds: Vec<i64> =
            c6.cycle_lemma.unwrap().terms.iter().map(|t| t.bound.numer().try_into().unwrap()).collect();
        assert_eq!(bounds, vec![0, 1, 3, 0, 1]);
    }

    #[test]
    fn family_totals() {
        for (parts, total) in [(vec![6, 5], 60), (vec![6, 5, 5], 375), (vec![6, 5, 5, 5], 2250)] {
            let g = build_gd(&parts, 11).unwrap();
            let c = certify_sum_bound(&g).unwrap();
            assert_eq!(c.total, Rational::from(total));
            audit_certificate(&g.graph, &c, 3, 5).unwrap();
        }
    }

    #[test]
    fn audit_rejects_tampering() {
        let g = build_gd(&[6, 5], 1).unwrap();
        let c = certify_sum_bound(&g).unwrap();
        audit_certificate(&g.graph, &c, 100, 9).unwrap();

        let mut inflated = c.clone();
        inflated.lemmas[2].terms[1].bound += Rational::one();
        assert!(audit_certificate(&g.graph, &inflated, 5, 9).is_err());

        let mut resummed = c.clone();
        resummed.lemmas[2].terms[1].bound += Rational::one();
        resummed.lemmas[2].subtotal += Rational::one();
        resummed.total += Rational::one();
        assert!(audit_certificate(&g.graph, &resummed, 5, 9).is_err());

        let mut wrong_sets = c.clone();
        let t = &mut wrong_sets.lemmas[1].terms[2];
        let moved = t.a.pop().unwrap();
        t.b.push(moved);
        t.b.sort_unstable();
        assert!(audit_certificate(&g.graph, &wrong_sets, 5, 9).is_err());

        let (b, a) = g.factors[0].pairs[0];
        let cut = g.graph.without_edges(&[(b.min(a), b.max(a))]);
        let err = audit_certificate(&cut, &c, 5, 9).unwrap_err();
        assert!(err.reason.contains("1-factor"), "{err}");
    }

    #[test]
    fn broken_metadata_is_a_witness_failure() {
        let mut g = build_gd(&[6, 5], 3).unwrap();
        let (b, a) = g.factors[1].pairs[0];
        g.graph = g.graph.without_edges(&[(b.min(a), b.max(a))]);
        assert!(matches!(certify_sum_bound(&g), Err(CertError::WitnessFailure { .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = build_gd(&[6, 5], 2).unwrap();
        let c = certify_sum_bound(&g).unwrap();
        let json = c.to_json();
        assert!(json.contains("\"B_prime\""));
        assert!(json.contains("\"subtotal\""));
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back, c);
        audit_certificate(&g.graph, &back, 2, 0).unwrap();
    }

    #[test]
    fn perturbed_witnesses_fail() {
        let g = build_gd(&[6, 5], 4).unwrap();
        let c = certify_sum_bound(&g).unwrap();
        let mut all_terms: Vec<TermBound> = c.terms.clone();
        let mut stack: Vec<&LemmaNode> = c.lemmas.iter().collect();
        while let Some(node) = stack.pop() {
            all_terms.extend(node.terms.iter().cloned());
            stack.extend(node.children.iter());
        }
        let mut checked = 0;
        for t in all_terms.iter().filter(|t| !t.witness_set().is_empty()) {
            let w = t.witness_set()[0];
            let extra = g.graph.neighbors(w)[0];
            let mut p = t.clone();
            let target = match p.kind {
                TermKind::L4 => &mut p.b_prime,
                _ => &mut p.b,
            };
            target.push(extra);
            target.sort_unstable();
            target.dedup();
            assert!(verify_term(&g.graph, &p).is_err());
            checked += 1;
        }
        assert_eq!(checked, 20);
    }

    #[test]
    fn terms_hold_for_optimal_entropy_points() {
        for n in [6, 8] {
            let g = build_cycle(n).unwrap();
            let lp = entropy_lp_complexity(&g.graph, EntropyObjective::Sum).unwrap();
            let c = certify_sum_bound(&g).unwrap();
            assert!(c.total <= lp.value);
            if n == 6 {
                assert_eq!(lp.value, Rational::from(9));
            }
            let f = SetFunction::from_masks(n, &lp.f);
            let lemma = c.cycle_lemma.as_ref().unwrap();
            for t in c.terms.iter().chain(&lemma.terms) {
                assert!(t.value(&f).unwrap() >= t.bound, "{t:?}");
            }
        }
    }
}
