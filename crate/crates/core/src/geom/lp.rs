//! Exact two-phase simplex over arbitrary-precision rationals.
//!
//! Variables are implicitly nonnegative; constraints compare a linear form
//! with a rational constant. The pivot rule is Bland's smallest-index
//! rule, which both precludes cycling and makes every solve deterministic,
//! so downstream reports are reproducible byte for byte.

use num::rational::BigRational;
use num::{One, Signed, Zero};

type Rat = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub cmp: Cmp,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, cmp: Cmp, rhs: Rat) -> Self {
        Constraint { coeffs, cmp, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, assignment: Vec<Rat> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    // rows[i] = coefficients, one column per variable, then the rhs last.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    cost: Vec<Rat>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let factor = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &factor;
        }
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for j in 0..=self.ncols {
                let d = &self.rows[row][j] * &f;
                self.rows[i][j] -= d;
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for j in 0..=self.ncols {
                let d = &self.rows[row][j] * &f;
                self.cost[j] -= d;
            }
        }
        self.basis[row] = col;
    }

    /// Restate the cost row for a fresh objective, eliminating the basic
    /// columns.
    fn set_cost(&mut self, mut cost: Vec<Rat>) {
        cost.push(Rat::zero());
        self.cost = cost;
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if !self.cost[b].is_zero() {
                let f = self.cost[b].clone();
                for j in 0..=self.ncols {
                    let d = &self.rows[i][j] * &f;
                    self.cost[j] -= d;
                }
            }
        }
    }

    /// Run simplex iterations until optimal or unbounded. Entering column:
    /// smallest index with a negative reduced cost. Leaving row: smallest
    /// ratio, ties broken by smallest basic variable index.
    fn optimize(&mut self) -> bool {
        loop {
            let Some(col) = (0..self.ncols).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / &self.rows[i][col];
                let better = match &leave {
                    None => true,
                    Some((best, r)) => {
                        ratio < *r || (ratio == *r && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn objective_value(&self) -> Rat {
        // cost[ncols] accumulates -(current objective).
        -self.cost[self.ncols].clone()
    }
}

/// Minimize `objective . x` subject to the constraints, all variables
/// nonnegative.
pub fn lp_feasible_min(objective: &[Rat], constraints: &[Constraint]) -> LpOutcome {
    let nvars = objective.len();
    for c in constraints {
        assert_eq!(c.coeffs.len(), nvars, "constraint width mismatch");
    }

    // Normalize to nonnegative right-hand sides.
    let mut rows: Vec<(Vec<Rat>, Cmp, Rat)> = constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.cmp, c.rhs.clone()))
        .collect();
    for (coeffs, cmp, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            for v in coeffs.iter_mut() {
                *v = -v.clone();
            }
            *rhs = -rhs.clone();
            *cmp = match *cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Eq => Cmp::Eq,
                Cmp::Ge => Cmp::Le,
            };
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
    let ncols = nvars + n_slack + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        basis: vec![0; rows.len()],
        cost: vec![Rat::zero(); ncols + 1],
        ncols,
    };
    let mut next_slack = nvars;
    let mut next_art = nvars + n_slack;
    let mut artificials = Vec::new();
    for (i, (coeffs, cmp, rhs)) in rows.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols + 1];
        row[..nvars].clone_from_slice(coeffs);
        row[ncols] = rhs.clone();
        match cmp {
            Cmp::Le => {
                row[next_slack] = Rat::one();
                tab.basis[i] = next_slack;
                next_slack += 1;
            }
            Cmp::Ge => {
                row[next_slack] = -Rat::one();
                next_slack += 1;
                row[next_art] = Rat::one();
                tab.basis[i] = next_art;
                artificials.push(next_art);
                next_art += 1;
            }
            Cmp::Eq => {
                row[next_art] = Rat::one();
                tab.basis[i] = next_art;
                artificials.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    if !artificials.is_empty() {
        let mut phase1 = vec![Rat::zero(); ncols];
        for &a in &artificials {
            phase1[a] = Rat::one();
        }
        tab.set_cost(phase1);
        assert!(tab.optimize(), "phase-1 objective is bounded below by zero");
        if tab.objective_value().is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining artificials out of the basis, dropping rows that
        // turn out redundant.
        let art_start = nvars + n_slack;
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                if let Some(col) = (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, col);
                } else {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        // Forget the artificial columns.
        for row in tab.rows.iter_mut() {
            let rhs = row[ncols].clone();
            row.truncate(art_start);
            row.push(rhs);
        }
        tab.ncols = art_start;
    }

    // Phase 2.
    let mut cost = objective.to_vec();
    cost.resize(tab.ncols, Rat::zero());
    tab.set_cost(cost);
    if !tab.optimize() {
        return LpOutcome::Unbounded;
    }

    let mut assignment = vec![Rat::zero(); nvars];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nvars {
            assignment[b] = tab.rhs(i).clone();
        }
    }
    LpOutcome::Optimal { value: tab.objective_value(), assignment }
}
