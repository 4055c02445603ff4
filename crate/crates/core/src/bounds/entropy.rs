use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::graph::{Graph, Vertex};
use crate::rational::Rational;

pub const ENTROPY_VERTEX_LIMIT: usize = 10;

/// Rows added per round of row generation.
const ROWS_PER_ROUND: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntropyObjective {
    /// Minimize `t` subject to `f(v) <= t` for every vertex.
    MinMax,
    /// Minimize the sum of `f(v)`.
    Sum,
}

/// `f(pos[0]) + f(pos[1]) - f(neg[0]) - f(neg[1]) >= rhs` over vertex-set
/// masks. Mask 0 stands for the empty set, where `f` is 0, so unused slots
/// hold 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub pos: [u32; 2],
    pub neg: [u32; 2],
    pub rhs: u8,
}

impl Inequality {
    fn new(mut pos: [u32; 2], mut neg: [u32; 2], rhs: u8) -> Self {
        pos.sort_unstable();
        neg.sort_unstable();
        Inequality { pos, neg, rhs }
    }

    /// `lhs - rhs` at `f`, indexed by mask.
    pub fn slack(&self, f: &[Rational]) -> Rational {
        let mut s = Rational::from_int(-(self.rhs as i64));
        for &m in &self.pos {
            if m != 0 {
                s += &f[m as usize];
            }
        }
        for &m in &self.neg {
            if m != 0 {
                s -= &f[m as usize];
            }
        }
        s
    }

    /// Nonzero `(mask, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        let p = self.pos.iter().map(|&m| (m, 1));
        let n = self.neg.iter().map(|&m| (m, -1));
        p.chain(n).filter(|&(m, _)| m != 0)
    }
}

fn independent_table(g: &Graph) -> Vec<bool> {
    let n = g.n();
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |a, &u| a | 1 << u)).collect();
    (0..1u32 << n).map(|mask| (0..n).all(|v| mask >> v & 1 == 0 || adj[v] & mask == 0)).collect()
}

fn check_size(g: &Graph) -> Result<(), BoundsError> {
    if g.n() > ENTROPY_VERTEX_LIMIT {
        return Err(BoundsError::SizeLimit { size: g.n(), limit: ENTROPY_VERTEX_LIMIT });
    }
    Ok(())
}

/// Every constraint of the entropy polytope of `g`: elemental Shannon
/// inequalities, strict monotonicity and strict submodularity. Rows with the
/// same left-hand side are merged keeping the largest right-hand side.
pub fn entropy_constraints(g: &Graph) -> Result<Vec<Inequality>, BoundsError> {
    check_size(g)?;
    let n = g.n();
    let full = (1u32 << n) - 1;
    let indep = independent_table(g);
    let mut rows: HashMap<([u32; 2], [u32; 2]), u8> = HashMap::new();
    let mut push = |ineq: Inequality| {
        let e = rows.entry((ineq.pos, ineq.neg)).or_insert(ineq.rhs);
        *e = (*e).max(ineq.rhs);
    };

    for i in 0..n {
        push(Inequality::new([full, 0], [full & !(1 << i), 0], 0));
    }
    for i in 0..n {
        for j in i + 1..n {
            let ij = 1u32 << i | 1 << j;
            let rest = full & !ij;
            let mut k = rest;
            loop {
                push(Inequality::new([k | 1 << i, k | 1 << j], [k | ij, k], 0));
                if k == 0 {
                    break;
                }
                k = (k - 1) & rest;
            }
        }
    }

    // strict monotonicity: A independent, B qualified, A inside B
    for b in 1..=full {
        if indep[b as usize] {
            continue;
        }
        let mut a = b;
        loop {
            a = (a.wrapping_sub(1)) & b;
            if indep[a as usize] {
                push(Inequality::new([b, 0], [a, 0], 1));
            }
            if a == 0 {
                break;
            }
        }
    }

    // strict submodularity: disjoint A, B, C with C independent or empty and
    // AC, BC qualified
    for c in 0..=full {
        if !indep[c as usize] {
            continue;
        }
        let rest = full & !c;
        let free: Vec<u32> = (0..n as u32).filter(|&v| rest >> v & 1 == 1).collect();
        let k = free.len();
        // each free vertex goes to A (1), B (2) or neither (0)
        let total = 3usize.pow(k as u32);
        for code in 0..total {
            let (mut a, mut b, mut x) = (0u32, 0u32, code);
            for &v in &free {
                match x % 3 {
                    1 => a |= 1 << v,
                    2 => b |= 1 << v,
                    _ => {}
                }
                x /= 3;
            }
            if a == 0 || b == 0 || (a & a.wrapping_neg()) > (b & b.wrapping_neg()) {
                continue;
            }
            if indep[(a | c) as usize] || indep[(b | c) as usize] {
                continue;
            }
            push(Inequality::new([a | c, b | c], [a | b | c, c], 1));
        }
    }

    let mut out: Vec<Inequality> = rows.into_iter().map(|((pos, neg), rhs)| Inequality { pos, neg, rhs }).collect();
    out.sort_unstable_by_key(|r| (r.pos, r.neg));
    Ok(out)
}

/// What the entropy LP minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyTarget {
    MinMax,
    Sum,
    /// `f` of the vertex set with this mask.
    Set(u32),
}

/// Optimum of the entropy LP with an exact optimality certificate: `f` is
/// feasible for every constraint, and the multipliers form a dual solution of
/// the same value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyBound {
    pub value: Rational,
    pub target: EntropyTarget,
    /// Optimal `f`, indexed by vertex-set mask.
    pub f: Vec<Rational>,
    /// Positive dual multipliers of polytope constraints.
    pub multipliers: Vec<(Inequality, Rational)>,
    /// Dual multipliers of `f(v) <= t`; empty unless the target is MINMAX.
    pub vertex_multipliers: Vec<Rational>,
    pub pivots: usize,
    pub rounds: usize,
}

fn costs(n: usize, target: EntropyTarget) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); 1 << n];
    match target {
        EntropyTarget::MinMax => c[0] = Rational::one(),
        EntropyTarget::Sum => (0..n).for_each(|v| c[1 << v] = Rational::one()),
        EntropyTarget::Set(0) => {}
        EntropyTarget::Set(s) => c[s as usize] = Rational::one(),
    }
    c
}

impl EntropyBound {
    /// Checks primal feasibility against the full constraint list, dual
    /// feasibility of the multipliers, and that both objectives equal `value`.
    pub fn verify(&self, g: &Graph) -> Result<(), BoundsError> {
        let n = g.n();
        let fail = |msg: String| Err(BoundsError::Certificate(msg));
        if self.f.len() != 1 << n || !self.f[0].is_zero() {
            return fail("f has the wrong shape".into());
        }
        let rows = entropy_constraints(g)?;
        if let Some(r) = rows.par_iter().find_any(|r| r.slack(&self.f).is_negative()) {
            return fail(format!("f violates {r:?}"));
        }
        if self.f.iter().any(Rational::is_negative) {
            return fail("f is negative".into());
        }
        let primal = match self.target {
            EntropyTarget::MinMax => {
                if (0..n).any(|v| self.f[1 << v] > self.value) || self.value.is_negative() {
                    return fail("f(v) exceeds the bound".into());
                }
                self.value.clone()
            }
            EntropyTarget::Sum => (0..n).map(|v| &self.f[1 << v]).sum(),
            EntropyTarget::Set(s) => self.f[s as usize].clone(),
        };
        if primal != self.value {
            return fail(format!("primal objective {primal} differs from {}", self.value));
        }

        // accumulate A^T y per variable; slot 0 is t
        let known: std::collections::HashSet<&Inequality> = rows.iter().collect();
        let mut aty = vec![Rational::zero(); 1 << n];
        let mut dual = Rational::zero();
        for (r, y) in &self.multipliers {
            if !known.contains(r) || y.is_negative() {
                return fail(format!("bad multiplier on {r:?}"));
            }
            for (m, c) in r.terms() {
                aty[m as usize] += y * Rational::from_int(c);
            }
            dual += y * Rational::from_int(r.rhs as i64);
        }
        match self.target {
            EntropyTarget::MinMax => {
                if self.vertex_multipliers.len() != n || self.vertex_multipliers.iter().any(Rational::is_negative) {
                    return fail("bad vertex multipliers".into());
                }
                for (v, y) in self.vertex_multipliers.iter().enumerate() {
                    aty[0] += y;
                    aty[1 << v] -= y;
                }
            }
            _ if !self.vertex_multipliers.is_empty() => return fail("unexpected vertex multipliers".into()),
            _ => {}
        }
        let c = costs(n, self.target);
        if let Some(k) = (0..1 << n).find(|&k| aty[k] > c[k]) {
            return fail(format!("dual constraint of variable {k} violated"));
        }
        if dual != self.value {
            return fail(format!("dual objective {dual} differs from {}", self.value));
        }
        Ok(())
    }
}

/// A primal row `Σ coeff·x[var] >= rhs`, seen as a column of the dual.
/// Variable 0 is `t`; the empty set is never a variable.
#[derive(Debug, Clone, Copy)]
struct Column {
    terms: [(u32, i8); 4],
    len: u8,
    rhs: i8,
}

impl Column {
    fn from_ineq(r: &Inequality) -> Self {
        let mut terms = [(0u32, 0i8); 4];
        let mut len = 0;
        for (m, c) in r.terms() {
            terms[len] = (m, c as i8);
            len += 1;
        }
        Column { terms, len: len as u8, rhs: r.rhs as i8 }
    }

    fn vertex_bound(v: usize) -> Self {
        Column { terms: [(0, 1), (1 << v, -1), (0, 0), (0, 0)], len: 2, rhs: 0 }
    }

    fn terms(&self) -> &[(u32, i8)] {
        &self.terms[..self.len as usize]
    }

    fn reduced_cost(&self, pi: &[Rational]) -> Rational {
        let mut rc = Rational::from_int(self.rhs as i64);
        for &(m, c) in self.terms() {
            if c > 0 {
                rc -= &pi[m as usize];
            } else {
                rc += &pi[m as usize];
            }
        }
        rc
    }
}

/// Revised primal simplex on the dual `max b·y, A^T y + s = c, y, s >= 0`,
/// pricing columns in from the full row list as they become attractive. The
/// slack basis is feasible because `c >= 0`, and adding columns keeps the
/// current basis feasible, so every round warm-starts.
struct DualSolver<'a> {
    m: usize,
    cols: &'a [Column],
    binv: Vec<Vec<Rational>>,
    /// Column id per row: `0..m` are slacks, `m + j` is `cols[j]`.
    basis: Vec<usize>,
    xb: Vec<Rational>,
    /// Simplex multipliers, the current primal point.
    pi: Vec<Rational>,
    /// Reduced costs per column id, kept current for slacks and pooled columns.
    rc: Vec<Rational>,
    /// Devex reference weights per column id; they steer pricing only.
    weights: Vec<f64>,
    pivots: usize,
}

impl<'a> DualSolver<'a> {
    fn new(c: Vec<Rational>, cols: &'a [Column]) -> Self {
        let m = c.len();
        let binv = (0..m)
            .map(|i| {
                let mut row = vec![Rational::zero(); m];
                row[i] = Rational::one();
                row
            })
            .collect();
        let total = m + cols.len();
        DualSolver {
            m,
            cols,
            xb: c,
            binv,
            basis: (0..m).collect(),
            pi: vec![Rational::zero(); m],
            rc: vec![Rational::zero(); total],
            weights: vec![1.0; total],
            pivots: 0,
        }
    }

    /// `row · a` for the column with this id.
    fn dot(&self, row: &[Rational], id: usize) -> Rational {
        if id < self.m {
            return row[id].clone();
        }
        let mut d = Rational::zero();
        for &(k, a) in self.cols[id - self.m].terms() {
            let x = &row[k as usize];
            if x.is_zero() {
                continue;
            }
            if a > 0 {
                d += x;
            } else {
                d -= x;
            }
        }
        d
    }

    /// Lexicographic tie-break of the ratio test on rows of `B^-1`, which
    /// rules out cycling whatever the entering rule.
    fn lex_less(&self, i: usize, di: &Rational, l: usize, dl: &Rational) -> bool {
        for k in 0..self.m {
            let (a, b) = (&self.binv[i][k], &self.binv[l][k]);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let (a, b) = (a / di, b / dl);
            if a != b {
                return a < b;
            }
        }
        false
    }

    fn pivot(&mut self, entering: usize, pool: &[usize]) -> Result<(), BoundsError> {
        let d: Vec<Rational> = self.binv.iter().map(|row| self.dot(row, entering)).collect();
        let mut leave: Option<(usize, Rational)> = None;
        for (i, di) in d.iter().enumerate() {
            if !di.is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / di;
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && self.lex_less(i, di, *l, &d[*l])),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, theta)) = leave else {
            return Err(BoundsError::Solver("entropy LP infeasible".into()));
        };
        let inv = d[r].recip();
        for x in self.binv[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let row_r: Vec<(usize, Rational)> =
            self.binv[r].iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (k, x.clone())).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == r || d[i].is_zero() {
                continue;
            }
            for (k, x) in &row_r {
                row[*k] -= &d[i] * x;
            }
        }
        for (i, di) in d.iter().enumerate() {
            if i != r && !di.is_zero() {
                self.xb[i] -= &theta * di;
            }
        }
        self.xb[r] = theta;

        // pi moves by rc_q times the new row r; reduced costs and Devex
        // weights follow from alpha_j = (new row r) · a_j
        let rq = self.rc[entering].clone();
        let wq = self.weights[entering];
        for (k, x) in &row_r {
            self.pi[*k] += &rq * x;
        }
        let row = std::mem::take(&mut self.binv[r]);
        let leaving = self.basis[r];
        for id in (0..self.m).chain(pool.iter().map(|&j| j + self.m)) {
            if id == entering {
                continue;
            }
            let alpha = self.dot(&row, id);
            if alpha.is_zero() {
                continue;
            }
            self.rc[id] -= &rq * &alpha;
            let a = alpha.to_f64();
            let w = a * a * wq;
            if id != leaving && w > self.weights[id] {
                self.weights[id] = w;
            }
        }
        self.binv[r] = row;
        self.rc[entering] = Rational::zero();
        let dr = d[r].to_f64();
        self.weights[leaving] = (wq / (dr * dr)).max(1.0);
        self.basis[r] = entering;
        self.pivots += 1;
        Ok(())
    }

    fn run(&mut self) -> Result<usize, BoundsError> {
        let mut pool: Vec<usize> = Vec::new();
        let mut in_pool = vec![false; self.cols.len()];
        let mut rounds = 0;
        loop {
            let mut best: Option<(usize, f64)> = None;
            for id in (0..self.m).chain(pool.iter().map(|&j| j + self.m)) {
                let rc = &self.rc[id];
                if !rc.is_positive() {
                    continue;
                }
                let x = rc.to_f64();
                let score = x * x / self.weights[id];
                if best.map_or(true, |b| score > b.1) {
                    best = Some((id, score));
                }
            }
            if let Some((id, _)) = best {
                self.pivot(id, &pool)?;
                continue;
            }
            rounds += 1;
            let pi = &self.pi;
            let mut priced: Vec<(Rational, usize)> = self
                .cols
                .par_iter()
                .enumerate()
                .filter(|(j, _)| !in_pool[*j])
                .filter_map(|(j, col)| {
                    let rc = col.reduced_cost(pi);
                    rc.is_positive().then_some((rc, j))
                })
                .collect();
            if priced.is_empty() {
                return Ok(rounds);
            }
            priced.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            for (rc, j) in priced.into_iter().take(ROWS_PER_ROUND) {
                in_pool[j] = true;
                pool.push(j);
                self.rc[j + self.m] = rc;
            }
            pool.sort_unstable();
        }
    }
}

fn solve(g: &Graph, target: EntropyTarget) -> Result<EntropyBound, BoundsError> {
    let n = g.n();
    let rows = entropy_constraints(g)?;
    let mut cols: Vec<Column> = rows.iter().map(Column::from_ineq).collect();
    let minmax = target == EntropyTarget::MinMax;
    if minmax {
        cols.extend((0..n).map(Column::vertex_bound));
    }
    let mut solver = DualSolver::new(costs(n, target), &cols);
    let rounds = solver.run()?;

    let mut f = solver.pi.clone();
    let t = std::mem::take(&mut f[0]);
    let mut multipliers = Vec::new();
    let mut vertex_multipliers = if minmax { vec![Rational::zero(); n] } else { Vec::new() };
    for (i, &id) in solver.basis.iter().enumerate() {
        if id < solver.m || solver.xb[i].is_zero() {
            continue;
        }
        let j = id - solver.m;
        if j < rows.len() {
            multipliers.push((rows[j], solver.xb[i].clone()));
        } else {
            vertex_multipliers[j - rows.len()] = solver.xb[i].clone();
        }
    }
    multipliers.sort_unstable_by_key(|(r, _)| (r.pos, r.neg));
    let value = match target {
        EntropyTarget::MinMax => t,
        EntropyTarget::Sum => (0..n).map(|v| &f[1 << v]).sum(),
        EntropyTarget::Set(s) => f[s as usize].clone(),
    };
    Ok(EntropyBound { value, target, f, multipliers, vertex_multipliers, pivots: solver.pivots, rounds })
}

/// Entropy-method lower bound on the information ratio of `g` (MINMAX), or
/// the minimum of `Σ f(v)` (SUM).
pub fn entropy_lp_complexity(g: &Graph, objective: EntropyObjective) -> Result<EntropyBound, BoundsError> {
    solve(
        g,
        match objective {
            EntropyObjective::MinMax => EntropyTarget::MinMax,
            EntropyObjective::Sum => EntropyTarget::Sum,
        },
    )
}

/// Minimum of `f(S)` over the entropy polytope of `g`.
pub fn entropy_lp_set_query(g: &Graph, s: &[Vertex]) -> Result<EntropyBound, BoundsError> {
    check_size(g)?;
    let mut mask = 0u32;
    for &v in s {
        if v >= g.n() {
            return Err(BoundsError::VertexOutOfRange(v));
        }
        mask |= 1 << v;
    }
    solve(g, EntropyTarget::Set(mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn cycle_and_complete_minmax() {
        for (g, want) in [(Graph::cycle(6), q(3, 2)), (Graph::complete(4), q(1, 1)), (Graph::cycle(8), q(3, 2))] {
            let start = Instant::now();
            let b = entropy_lp_complexity(&g, EntropyObjective::MinMax).unwrap();
            eprintln!("n={} rounds={} pivots={} {:?}", g.n(), b.rounds, b.pivots, start.elapsed());
            assert_eq!(b.value, want);
            b.verify(&g).unwrap();
        }
    }

    #[test]
    fn cycle_sum_and_set_queries() {
        let c6 = Graph::cycle(6);
        assert_eq!(entropy_lp_complexity(&c6, EntropyObjective::Sum).unwrap().value, q(9, 1));
        assert_eq!(entropy_lp_set_query(&c6, &[2, 3]).unwrap().value, q(3, 1));
        assert_eq!(entropy_lp_set_query(&c6, &[]).unwrap().value, q(0, 1));
        // a star centered at v0 plus stars at v2 and v4 give v0 a share of size 1
        assert_eq!(entropy_lp_set_query(&c6, &[0]).unwrap().value, q(1, 1));
        assert_eq!(entropy_lp_set_query(&c6, &[6]), Err(BoundsError::VertexOutOfRange(6)));
    }

    #[test]
    fn support_rows_reproduce_value_with_generic_solver() {
        use crate::lp::{solve_lp, LpProblem, Relation};
        let g = Graph::cycle(6);
        let b = entropy_lp_complexity(&g, EntropyObjective::MinMax).unwrap();
        let mut p = LpProblem::new();
        let vars: Vec<_> = (0..64).map(|m| p.add_nonneg(format!("x{m}"))).collect();
        for v in 0..6 {
            p.add_constraint(vec![(vars[0], q(1, 1)), (vars[1 << v], q(-1, 1))], Relation::Ge, q(0, 1));
        }
        for (r, _) in &b.multipliers {
            let coeffs = r.terms().map(|(m, c)| (vars[m as usize], Rational::from_int(c))).collect();
            p.add_constraint(coeffs, Relation::Ge, Rational::from_int(r.rhs as i64));
        }
        p.set_objective(vec![(vars[0], q(1, 1))]);
        assert_eq!(solve_lp(&p).unwrap().objective, Some(b.value));
    }

    fn full_lp(g: &Graph, objective: Vec<(u32, i64)>) -> Rational {
        use crate::lp::{solve_lp, LpProblem, Relation};
        let mut p = LpProblem::new();
        let vars: Vec<_> = (0..1u32 << g.n()).map(|m| p.add_nonneg(format!("x{m}"))).collect();
        for r in entropy_constraints(g).unwrap() {
            let coeffs = r.terms().map(|(m, c)| (vars[m as usize], Rational::from_int(c))).collect();
            p.add_constraint(coeffs, Relation::Ge, Rational::from_int(r.rhs as i64));
        }
        p.set_objective(objective.into_iter().map(|(m, c)| (vars[m as usize], Rational::from_int(c))).collect());
        solve_lp(&p).unwrap().objective.unwrap()
    }

    #[test]
    fn matches_full_lp_on_small_graphs() {
        let graphs = [Graph::path(4), Graph::cycle(4), Graph::cycle(5), Graph::star(3)];
        for g in &graphs {
            let n = g.n();
            let sum: Vec<(u32, i64)> = (0..n).map(|v| (1u32 << v, 1)).collect();
            assert_eq!(entropy_lp_complexity(g, EntropyObjective::Sum).unwrap().value, full_lp(g, sum));
            for s in [vec![0], vec![0, 1], vec![1, n - 1]] {
                let mask = s.iter().fold(0u32, |a, &v| a | 1 << v);
                assert_eq!(entropy_lp_set_query(g, &s).unwrap().value, full_lp(g, vec![(mask, 1)]));
            }
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let g = Graph::cycle(6);
        let mut b = entropy_lp_complexity(&g, EntropyObjective::Sum).unwrap();
        b.verify(&g).unwrap();
        b.multipliers[0].1 += q(1, 1);
        assert!(matches!(b.verify(&g), Err(BoundsError::Certificate(_))));
    }

    #[test]
    fn complete_graph_point_is_feasible() {
        // f(A) = min(|A|, 2) meets every constraint of K_4
        let g = Graph::complete(4);
        let f: Vec<Rational> = (0..16u32).map(|m| Rational::from_int(m.count_ones().min(2) as i64)).collect();
        assert!(entropy_constraints(&g).unwrap().iter().all(|r| !r.slack(&f).is_negative()));
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            entropy_lp_complexity(&Graph::cycle(11), EntropyObjective::MinMax),
            Err(BoundsError::SizeLimit { size: 11, limit: 10 })
        ));
    }

    #[test]
    fn constraint_counts_small() {
        // single edge: the elemental rows f(01)-f(0)>=0, f(01)-f(1)>=0 become
        // strict; I(0;1) >= 0 stays elemental
        let g = Graph::path(2);
        let rows = entropy_constraints(&g).unwrap();
        assert!(rows.contains(&Inequality::new([3, 0], [1, 0], 1)));
        assert!(rows.contains(&Inequality::new([3, 0], [2, 0], 1)));
        assert!(rows.contains(&Inequality::new([1, 2], [3, 0], 0)));
        assert!(rows.contains(&Inequality::new([3, 0], [0, 0], 1)));
        assert_eq!(rows.len(), 4);
    }
}
