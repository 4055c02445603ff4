//! Exact linear programming over [`Rational`].
//!
//! A dense two-phase tableau simplex with Bland's rule. Every optimum comes
//! with dual multipliers, and [`LpSolution::certify`] re-checks primal
//! feasibility, dual feasibility and a zero duality gap from scratch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// `None` means unbounded below.
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// `minimize objective · x` subject to the constraints and variable bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpProblem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(VarId, Rational)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint {constraint} references undeclared variable {var}")]
    UnknownVariable { constraint: usize, var: VarId },
    #[error("unknown variable name {0:?}")]
    UnknownName(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("solution is not optimal")]
    NotOptimal,
    #[error("constraint {0} violated by the primal point")]
    PrimalInfeasible(usize),
    #[error("bounds of variable {0} violated")]
    BoundViolated(usize),
    #[error("dual multiplier of constraint {0} has the wrong sign")]
    DualSign(usize),
    #[error("reduced cost of variable {0} is infeasible")]
    ReducedCost(usize),
    #[error("duality gap {0} is not zero")]
    Gap(Rational),
    #[error("objective value does not match the primal point")]
    ObjectiveMismatch,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<Rational>, upper: Option<Rational>) -> VarId {
        self.variables.push(Variable { name: name.into(), lower, upper });
        self.variables.len() - 1
    }

    /// A variable with lower bound 0 and no upper bound.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(VarId, Rational)>, relation: Relation, rhs: Rational) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(VarId, Rational)>) {
        self.objective = coeffs;
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.variables.len();
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&(var, _)) = c.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::UnknownVariable { constraint: i, var });
            }
        }
        if let Some(&(var, _)) = self.objective.iter().find(|(j, _)| *j >= n) {
            return Err(LpError::UnknownVariable { constraint: usize::MAX, var });
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    pub fn to_json(&self) -> LpProblemJson {
        let name = |j: &VarId| self.variables[*j].name.clone();
        LpProblemJson {
            variables: self
                .variables
                .iter()
                .map(|v| VariableJson { name: v.name.clone(), lower: v.lower.clone(), upper: v.upper.clone() })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    coeffs: c.coeffs.iter().map(|(j, a)| (name(j), a.clone())).collect(),
                    relation: c.relation,
                    rhs: c.rhs.clone(),
                })
                .collect(),
            objective: self.objective.iter().map(|(j, a)| (name(j), a.clone())).collect(),
        }
    }

    pub fn from_json(json: &LpProblemJson) -> Result<Self, LpError> {
        let mut p = LpProblem::new();
        let mut index = BTreeMap::new();
        for v in &json.variables {
            if index.insert(v.name.clone(), p.variables.len()).is_some() {
                return Err(LpError::DuplicateName(v.name.clone()));
            }
            p.add_var(v.name.clone(), v.lower.clone(), v.upper.clone());
        }
        let lookup = |m: &BTreeMap<String, Rational>| -> Result<Vec<(VarId, Rational)>, LpError> {
            m.iter()
                .map(|(k, a)| index.get(k).map(|&j| (j, a.clone())).ok_or_else(|| LpError::UnknownName(k.clone())))
                .collect()
        };
        for c in &json.constraints {
            let coeffs = lookup(&c.coeffs)?;
            p.add_constraint(coeffs, c.relation, c.rhs.clone());
        }
        p.objective = lookup(&json.objective)?;
        Ok(p)
    }
}

/// Audit form of an [`LpProblem`]: coefficient maps keyed by variable name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpProblemJson {
    pub variables: Vec<VariableJson>,
    pub constraints: Vec<ConstraintJson>,
    pub objective: BTreeMap<String, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableJson {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub coeffs: BTreeMap<String, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; `None` unless `status` is `Optimal`.
    pub objective: Option<Rational>,
    pub primal: Vec<Rational>,
    /// One multiplier per constraint (`>= 0` on `>=` rows, `<= 0` on `<=` rows).
    pub duals: Vec<Rational>,
    /// Multipliers of the variables' upper bounds (`<= 0`, zero when absent).
    pub upper_duals: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    fn status_only(status: LpStatus, pivots: usize) -> Self {
        LpSolution { status, objective: None, primal: Vec::new(), duals: Vec::new(), upper_duals: Vec::new(), pivots }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self) -> Option<&Rational> {
        self.objective.as_ref()
    }

    /// Exact optimality check against `p`, independent of the simplex path.
    pub fn certify(&self, p: &LpProblem) -> Result<(), CertificateError> {
        let obj = self.objective.as_ref().ok_or(CertificateError::NotOptimal)?;
        let x = &self.primal;
        for (i, c) in p.constraints.iter().enumerate() {
            if !c.is_satisfied(x) {
                return Err(CertificateError::PrimalInfeasible(i));
            }
        }
        for (j, v) in p.variables.iter().enumerate() {
            if v.lower.as_ref().is_some_and(|l| &x[j] < l) || v.upper.as_ref().is_some_and(|u| &x[j] > u) {
                return Err(CertificateError::BoundViolated(j));
            }
        }
        if &p.objective_value(x) != obj {
            return Err(CertificateError::ObjectiveMismatch);
        }
        let mut reduced: Vec<Rational> = vec![Rational::zero(); p.variables.len()];
        for (j, c) in &p.objective {
            reduced[*j] += c;
        }
        let mut dual_obj = Rational::zero();
        for (i, (c, y)) in p.constraints.iter().zip(&self.duals).enumerate() {
            let ok = match c.relation {
                Relation::Ge => !y.is_negative(),
                Relation::Le => !y.is_positive(),
                Relation::Eq => true,
            };
            if !ok {
                return Err(CertificateError::DualSign(i));
            }
            if y.is_zero() {
                continue;
            }
            for (j, a) in &c.coeffs {
                reduced[*j] -= a * y;
            }
            dual_obj += &c.rhs * y;
        }
        for (j, v) in p.variables.iter().enumerate() {
            let w = &self.upper_duals[j];
            if w.is_positive() || (v.upper.is_none() && !w.is_zero()) {
                return Err(CertificateError::ReducedCost(j));
            }
            if let Some(u) = &v.upper {
                reduced[j] -= w;
                dual_obj += u * w;
            }
            match &v.lower {
                Some(l) => {
                    if reduced[j].is_negative() {
                        return Err(CertificateError::ReducedCost(j));
                    }
                    dual_obj += l * &reduced[j];
                }
                None => {
                    if !reduced[j].is_zero() {
                        return Err(CertificateError::ReducedCost(j));
                    }
                }
            }
        }
        if &dual_obj != obj {
            return Err(CertificateError::Gap(obj - &dual_obj));
        }
        Ok(())
    }
}

/// How each original variable maps onto nonnegative tableau columns.
#[derive(Clone)]
enum ColumnMap {
    Shifted { col: usize, lower: Rational },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    cost: Vec<Rational>,
    cost_rhs: Rational,
    /// Columns at or beyond this index are artificial and never enter.
    first_artificial: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.rows[r][c].recip();
        let nz: Vec<usize> = {
            let row = &mut self.rows[r];
            let mut nz = Vec::new();
            for (j, x) in row.iter_mut().enumerate() {
                if !x.is_zero() {
                    *x *= &inv;
                    nz.push(j);
                }
            }
            nz
        };
        self.rhs[r] *= &inv;
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &factor * &prow[j];
            }
            self.rhs[i] -= &factor * &prhs;
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for &j in &nz {
                self.cost[j] -= &factor * &prow[j];
            }
            self.cost_rhs -= &factor * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, ties in the ratio test
    /// broken by lowest basic index.
    fn run(&mut self) -> Outcome {
        loop {
            let entering = (0..self.first_artificial).find(|&j| self.cost[j].is_negative());
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Outcome::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let width = self.cost.len();
        let mut z: Vec<Rational> = (0..width).map(|j| costs.get(j).cloned().unwrap_or_default()).collect();
        let mut zr = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs.get(b).cloned().unwrap_or_default();
            if cb.is_zero() {
                continue;
            }
            for (j, x) in self.rows[i].iter().enumerate() {
                if !x.is_zero() {
                    z[j] -= &cb * x;
                }
            }
            zr -= &cb * &self.rhs[i];
        }
        self.cost = z;
        self.cost_rhs = zr;
    }
}

/// Solves `p` exactly. Infeasible and unbounded problems are reported through
/// [`LpSolution::status`].
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;

    // Columns for the structural variables.
    let mut maps = Vec::with_capacity(p.variables.len());
    let mut ncols = 0usize;
    for v in &p.variables {
        match &v.lower {
            Some(l) => {
                maps.push(ColumnMap::Shifted { col: ncols, lower: l.clone() });
                ncols += 1;
            }
            None => {
                maps.push(ColumnMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    // Rows: the explicit constraints followed by upper-bound rows.
    struct Row {
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    }
    let mut rows_in: Vec<Row> = Vec::new();
    let expand = |coeffs: &[(VarId, Rational)], rhs: &mut Rational| -> Vec<(usize, Rational)> {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, a) in coeffs {
            if a.is_zero() {
                continue;
            }
            match &maps[*j] {
                ColumnMap::Shifted { col, lower } => {
                    *out.entry(*col).or_default() += a;
                    *rhs -= a * lower;
                }
                ColumnMap::Split { pos, neg } => {
                    *out.entry(*pos).or_default() += a;
                    *out.entry(*neg).or_default() -= a;
                }
            }
        }
        out.into_iter().filter(|(_, a)| !a.is_zero()).collect()
    };
    for c in &p.constraints {
        let mut rhs = c.rhs.clone();
        let coeffs = expand(&c.coeffs, &mut rhs);
        rows_in.push(Row { coeffs, relation: c.relation, rhs });
    }
    let mut upper_row = vec![None; p.variables.len()];
    for (j, v) in p.variables.iter().enumerate() {
        if let Some(u) = &v.upper {
            let mut rhs = u.clone();
            let coeffs = expand(&[(j, Rational::one())], &mut rhs);
            upper_row[j] = Some(rows_in.len());
            rows_in.push(Row { coeffs, relation: Relation::Le, rhs });
        }
    }

    // Normalize to nonnegative right-hand sides; rows that end up as `<=`
    // start with their slack basic, the rest need an artificial.
    let m = rows_in.len();
    let mut negated = vec![false; m];
    let mut needs_art = vec![false; m];
    for (i, r) in rows_in.iter_mut().enumerate() {
        let flip = match r.relation {
            Relation::Le => r.rhs.is_negative(),
            Relation::Ge => !r.rhs.is_positive(),
            Relation::Eq => r.rhs.is_negative(),
        };
        if flip {
            negated[i] = true;
            r.rhs = -&r.rhs;
            for (_, a) in r.coeffs.iter_mut() {
                *a = -&*a;
            }
            r.relation = match r.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        needs_art[i] = r.relation != Relation::Le;
    }
    // slack/surplus columns for inequality rows
    let mut slack_col = vec![usize::MAX; m];
    for (i, r) in rows_in.iter().enumerate() {
        if r.relation != Relation::Eq {
            slack_col[i] = ncols;
            ncols += 1;
        }
    }
    let first_artificial = ncols;
    let mut art_col = vec![usize::MAX; m];
    for i in 0..m {
        if needs_art[i] {
            art_col[i] = ncols;
            ncols += 1;
        }
    }

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cost: vec![Rational::zero(); ncols],
        cost_rhs: Rational::zero(),
        first_artificial,
        pivots: 0,
    };
    let mut init_col = vec![0usize; m];
    for (i, r) in rows_in.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        for (j, a) in &r.coeffs {
            row[*j] = a.clone();
        }
        match r.relation {
            Relation::Le => {
                row[slack_col[i]] = Rational::one();
                init_col[i] = slack_col[i];
            }
            Relation::Ge => {
                row[slack_col[i]] = -Rational::one();
                row[art_col[i]] = Rational::one();
                init_col[i] = art_col[i];
            }
            Relation::Eq => {
                row[art_col[i]] = Rational::one();
                init_col[i] = art_col[i];
            }
        }
        tab.rows.push(row);
        tab.rhs.push(r.rhs.clone());
        tab.basis.push(init_col[i]);
    }

    // Phase 1: minimize the sum of artificials.
    if needs_art.iter().any(|&b| b) {
        let mut costs = vec![Rational::zero(); ncols];
        for i in 0..m {
            if needs_art[i] {
                costs[art_col[i]] = Rational::one();
            }
        }
        tab.set_costs(&costs);
        tab.run();
        if !tab.cost_rhs.is_zero() {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, tab.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= first_artificial {
                if let Some(j) = (0..first_artificial).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase 2.
    let mut costs = vec![Rational::zero(); ncols];
    for (j, c) in &p.objective {
        match &maps[*j] {
            ColumnMap::Shifted { col, .. } => costs[*col] += c,
            ColumnMap::Split { pos, neg } => {
                costs[*pos] += c;
                costs[*neg] -= c;
            }
        }
    }
    tab.set_costs(&costs);
    if let Outcome::Unbounded = tab.run() {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, tab.pivots));
    }

    let mut colval = vec![Rational::zero(); structural];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < structural {
            colval[b] = tab.rhs[i].clone();
        }
    }
    let primal: Vec<Rational> = maps
        .iter()
        .map(|mp| match mp {
            ColumnMap::Shifted { col, lower } => lower + &colval[*col],
            ColumnMap::Split { pos, neg } => &colval[*pos] - &colval[*neg],
        })
        .collect();
    let row_dual = |i: usize| -> Rational {
        let y = -&tab.cost[init_col[i]];
        if negated[i] {
            -y
        } else {
            y
        }
    };
    let duals: Vec<Rational> = (0..p.constraints.len()).map(row_dual).collect();
    let upper_duals: Vec<Rational> = upper_row.iter().map(|r| r.map(row_dual).unwrap_or_default()).collect();
    let objective = p.objective_value(&primal);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: Some(objective),
        primal,
        duals,
        upper_duals,
        pivots: tab.pivots,
    })
}
