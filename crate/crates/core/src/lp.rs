//! Dense two-phase simplex over exact rationals.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate programs and the returned vertex is a
//! deterministic function of the input.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub bounds: Vec<VarBound>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<(Vec<Rational>, Direction)>,
}

impl LinearProgram {
    /// `n` non-negative variables named `x0..`.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            names: (0..n).map(|i| format!("x{i}")).collect(),
            bounds: vec![VarBound::NonNegative; n],
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn with_names(names: &[&str]) -> Self {
        let mut lp = Self::new(names.len());
        lp.names = names.iter().map(|s| s.to_string()).collect();
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = VarBound::Free;
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn maximize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some((coeffs, Direction::Maximize));
    }

    pub fn minimize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some((coeffs, Direction::Minimize));
    }

    /// Checks bounds and constraints exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self
                .bounds
                .iter()
                .zip(x)
                .all(|(b, v)| *b == VarBound::Free || !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedLp(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedLp(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
        }
        if let Some((obj, _)) = &self.objective {
            if obj.len() != n {
                return Err(Error::MalformedLp(format!("objective has {} coefficients for {n} variables", obj.len())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Rational>, value: Rational },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs for maximisation; the last entry is minus the current
    /// objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = cost.iter().cloned().chain(std::iter::once(Rational::zero())).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    obj[j] -= &cost[b] * v;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[e].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Maximises the loaded objective over columns `< allowed`.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(e) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let rhs = self.cols;
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[r][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, e);
        }
    }
}

/// Solves `lp` exactly. Without an objective this is a pure feasibility
/// test; the returned point is then the first vertex found and the value 0.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();
    // Structural columns: one per non-negative variable, two per free one.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut structural = 0;
    for b in &lp.bounds {
        match b {
            VarBound::NonNegative => {
                col_of.push((structural, None));
                structural += 1;
            }
            VarBound::Free => {
                col_of.push((structural, Some(structural + 1)));
                structural += 2;
            }
        }
    }
    let m = lp.constraints.len();
    let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    // Rows are normalised to a non-negative right-hand side; a row needs an
    // artificial unless its slack enters with +1.
    let mut flipped = vec![false; m];
    let mut needs_artificial = vec![false; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        flipped[i] = c.rhs.is_negative();
        let rel = match (c.relation, flipped[i]) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        needs_artificial[i] = rel != Relation::Le;
    }
    let art_count = needs_artificial.iter().filter(|&&a| a).count();
    let art_start = structural + slack_count;
    let cols = art_start + art_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (structural, art_start);
    for (i, c) in lp.constraints.iter().enumerate() {
        let sign = if flipped[i] { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); cols + 1];
        for (v, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (pos, neg) = col_of[v];
            row[pos] = a * &sign;
            if let Some(neg) = neg {
                row[neg] = -(a * &sign);
            }
        }
        row[cols] = &c.rhs * &sign;
        if c.relation != Relation::Eq {
            let slack_sign = if c.relation == Relation::Le { Rational::one() } else { -Rational::one() };
            row[next_slack] = slack_sign * &sign;
            if !needs_artificial[i] {
                basis.push(next_slack);
            }
            next_slack += 1;
        }
        if needs_artificial[i] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        cols,
    };

    if art_count > 0 {
        let mut cost = vec![Rational::zero(); cols];
        for c in cost.iter_mut().skip(art_start) {
            *c = -Rational::one();
        }
        tab.set_objective(&cost);
        let bounded = tab.optimize(cols);
        debug_assert!(bounded, "phase one is bounded by construction");
        if !tab.obj[cols].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    if let Some((obj, dir)) = &lp.objective {
        for (v, a) in obj.iter().enumerate() {
            let a = if *dir == Direction::Minimize { -a } else { a.clone() };
            let (pos, neg) = col_of[v];
            if let Some(neg) = neg {
                cost[neg] = -a.clone();
            }
            cost[pos] = a;
        }
    }
    tab.set_objective(&cost);
    if !tab.optimize(art_start) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![Rational::zero(); cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rows[r][cols].clone();
    }
    let point: Vec<Rational> = col_of
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => &values[pos] - &values[neg],
            None => values[pos].clone(),
        })
        .collect();
    let value = match &lp.objective {
        Some((obj, _)) => obj.iter().zip(&point).map(|(a, x)| a * x).sum(),
        None => Rational::zero(),
    };
    debug_assert!(lp.is_feasible_point(&point));
    Ok(LpOutcome::Optimal { point, value })
}
