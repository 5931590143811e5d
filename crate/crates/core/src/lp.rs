//! Small dense linear programs.
//!
//! Two-phase tableau simplex with Bland's anti-cycling rule. Problem sizes here are a few
//! dozen rows at most (polytope constraints plus a handful of auxiliaries), so a dense
//! tableau is the simplest thing that terminates reliably.

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Vec<f64>, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

/// `minimize c·x` subject to `a·x <= b` rows, `a·x = b` rows, and optional sign
/// constraints `x_i >= 0`. Variables are free unless marked otherwise.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    cost: Vec<f64>,
    le: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
    nonneg: Vec<bool>,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            n,
            cost: vec![0.0; n],
            le: Vec::new(),
            eq: Vec::new(),
            nonneg: vec![false; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn set_objective(&mut self, c: &[f64]) -> &mut Self {
        assert_eq!(c.len(), self.n);
        self.cost.copy_from_slice(c);
        self
    }

    pub fn add_le(&mut self, a: &[f64], b: f64) -> &mut Self {
        assert_eq!(a.len(), self.n);
        self.le.push((a.to_vec(), b));
        self
    }

    pub fn add_eq(&mut self, a: &[f64], b: f64) -> &mut Self {
        assert_eq!(a.len(), self.n);
        self.eq.push((a.to_vec(), b));
        self
    }

    pub fn set_nonneg(&mut self, i: usize) -> &mut Self {
        self.nonneg[i] = true;
        self
    }

    pub fn minimize(&self) -> Result<LpOutcome> {
        Tableau::build(self).solve(self)
    }

    pub fn maximize(&self) -> Result<LpOutcome> {
        let mut neg = self.clone();
        for c in &mut neg.cost {
            *c = -*c;
        }
        Ok(match neg.minimize()? {
            LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
            other => other,
        })
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// column index where each original variable's positive part lives; free variables
    /// also own the following column as their negative part
    var_col: Vec<usize>,
    num_cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut var_col = Vec::with_capacity(lp.n);
        let mut col = 0;
        for i in 0..lp.n {
            var_col.push(col);
            col += if lp.nonneg[i] { 1 } else { 2 };
        }
        let structural = col;
        let num_slack = lp.le.len();
        let first_artificial = structural + num_slack;

        // every row gets an artificial unless its slack can start in the basis
        let needs_art: Vec<bool> = lp
            .le
            .iter()
            .map(|(_, b)| *b < 0.0)
            .chain(lp.eq.iter().map(|_| true))
            .collect();
        let num_art = needs_art.iter().filter(|&&v| v).count();
        let num_cols = first_artificial + num_art;

        let mut rows = Vec::new();
        let mut basis = Vec::new();
        let mut art = first_artificial;
        let all_rows = lp.le.iter().map(|r| (r, true)).chain(lp.eq.iter().map(|r| (r, false)));
        for (k, ((a, b), is_le)) in all_rows.enumerate() {
            let mut row = vec![0.0; num_cols + 1];
            for (i, &aij) in a.iter().enumerate() {
                let c = var_col[i];
                row[c] = aij;
                if !lp.nonneg[i] {
                    row[c + 1] = -aij;
                }
            }
            if is_le {
                row[structural + k] = 1.0;
            }
            row[num_cols] = *b;
            if *b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            if needs_art[k] {
                row[art] = 1.0;
                basis.push(art);
                art += 1;
            } else {
                basis.push(structural + k);
            }
            rows.push(row);
        }

        Tableau {
            rows,
            basis,
            var_col,
            num_cols,
            first_artificial,
        }
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for the given column costs.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut obj = costs.to_vec();
        obj.push(0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = obj[b];
            if cb != 0.0 {
                for (v, rv) in obj.iter_mut().zip(&self.rows[r]) {
                    *v -= cb * rv;
                }
            }
        }
        obj
    }

    /// Runs simplex iterations on the columns `< col_limit`. Returns false on unboundedness.
    fn iterate(&mut self, obj: &mut [f64], col_limit: usize) -> Result<bool> {
        let rhs = self.num_cols;
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column
            let Some(enter) = (0..col_limit).find(|&j| obj[j] < -PIVOT_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_TOL {
                    let ratio = row[rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(obj, r, enter),
            }
        }
        Err(Error::Lp("pivot limit exceeded".into()))
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpOutcome> {
        let rhs = self.num_cols;
        let scale = 1.0
            + self
                .rows
                .iter()
                .map(|r| r[rhs].abs())
                .fold(0.0f64, f64::max);

        if self.first_artificial < self.num_cols {
            let mut costs = vec![0.0; self.num_cols];
            for c in costs.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            let mut obj = self.reduced_costs(&costs);
            self.iterate(&mut obj, self.num_cols)?;
            let infeasibility = -obj[rhs];
            if infeasibility > 1e-9 * scale {
                return Ok(LpOutcome::Infeasible);
            }
            // drive remaining artificials out of the basis, dropping redundant rows
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    let col = (0..self.first_artificial)
                        .filter(|&j| self.rows[r][j].abs() > 1e-9)
                        .max_by(|&a, &b| {
                            self.rows[r][a].abs().total_cmp(&self.rows[r][b].abs())
                        });
                    match col {
                        Some(c) => self.pivot(&mut obj, r, c),
                        None => {
                            self.rows.remove(r);
                            self.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }

        let mut costs = vec![0.0; self.num_cols];
        for (i, &c) in self.var_col.iter().enumerate() {
            costs[c] = lp.cost[i];
            if !lp.nonneg[i] {
                costs[c + 1] = -lp.cost[i];
            }
        }
        let mut obj = self.reduced_costs(&costs);
        if !self.iterate(&mut obj, self.first_artificial)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut col_value = vec![0.0; self.num_cols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_value[b] = self.rows[r][rhs];
        }
        let x: Vec<f64> = self
            .var_col
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if lp.nonneg[i] {
                    col_value[c]
                } else {
                    col_value[c] - col_value[c + 1]
                }
            })
            .collect();
        let value = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}
