//! Exact rational linear programming: two-phase simplex with Bland's rule.

use crate::linalg::{Rat, RatMatrix};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

/// Linear program over ℚ with mixed constraint types and optional free
/// variables. The objective is minimized.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    nvars: usize,
    free: Vec<bool>,
    rows: Vec<(Vec<Rat>, Relation, Rat)>,
    objective: Vec<Rat>,
}

impl LinearProgram {
    /// All variables nonnegative, zero objective.
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            nvars,
            free: vec![false; nvars],
            rows: Vec::new(),
            objective: vec![Rat::zero(); nvars],
        }
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn all_free(mut self) -> Self {
        self.free = vec![true; self.nvars];
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> &mut Self {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push((coeffs, rel, rhs));
        self
    }

    pub fn minimize(&mut self, objective: Vec<Rat>) -> &mut Self {
        assert_eq!(objective.len(), self.nvars);
        self.objective = objective;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: for each original var, one column (or two if free),
        // then one slack per inequality.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.nvars);
        let mut ncols = 0;
        for j in 0..self.nvars {
            if self.free[j] {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let nslack = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let total = ncols + nslack;
        let mut a: RatMatrix = Vec::with_capacity(self.rows.len());
        let mut b: Vec<Rat> = Vec::with_capacity(self.rows.len());
        let mut slack = ncols;
        for (coeffs, rel, rhs) in &self.rows {
            let mut row = vec![Rat::zero(); total];
            for (j, cj) in coeffs.iter().enumerate() {
                let (p, n) = col_of[j];
                row[p] = cj.clone();
                if let Some(n) = n {
                    row[n] = -cj.clone();
                }
            }
            match rel {
                Relation::Eq => {}
                Relation::Ge => {
                    row[slack] = -Rat::one();
                    slack += 1;
                }
                Relation::Le => {
                    row[slack] = Rat::one();
                    slack += 1;
                }
            }
            a.push(row);
            b.push(rhs.clone());
        }
        let mut c = vec![Rat::zero(); total];
        for (j, cj) in self.objective.iter().enumerate() {
            let (p, n) = col_of[j];
            c[p] = cj.clone();
            if let Some(n) = n {
                c[n] = -cj.clone();
            }
        }
        match solve_standard(&a, &b, &c, total) {
            LpOutcome::Optimal { x, value } => {
                let orig = col_of
                    .iter()
                    .map(|&(p, n)| match n {
                        Some(n) => &x[p] - &x[n],
                        None => x[p].clone(),
                    })
                    .collect();
                LpOutcome::Optimal { x: orig, value }
            }
            other => other,
        }
    }
}

struct Tableau {
    /// rows x (cols + 1); last column is the right-hand side.
    t: RatMatrix,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.t.len() {
            if i != r && !self.t[i][c].is_zero() {
                let f = self.t[i][c].clone();
                for (x, p) in self.t[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &f * p;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> Vec<Option<Rat>> {
        (0..self.cols)
            .map(|j| {
                if !allowed(j) || self.basis.contains(&j) {
                    return None;
                }
                let mut rc = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    rc -= &cost[bv] * &self.t[i][j];
                }
                Some(rc)
            })
            .collect()
    }

    /// Runs simplex iterations; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let rc = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..self.cols).find(|&j| rc[j].as_ref().is_some_and(|v| v.is_negative()))
            else {
                return true;
            };
            let rhs = self.cols;
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                let aij = &self.t[i][enter];
                if aij.is_positive() {
                    let ratio = &self.t[i][rhs] / aij;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn objective(&self, cost: &[Rat]) -> Rat {
        self.basis
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (i, &bv)| acc + &cost[bv] * &self.t[i][self.cols])
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn solve_standard(a: &RatMatrix, b: &[Rat], c: &[Rat], n: usize) -> LpOutcome {
    let m = a.len();
    let cols = n + m;
    let mut t: RatMatrix = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let neg = b[i].is_negative();
        let mut r: Vec<Rat> = row.iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        r.push(if neg { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols };
    let phase1: Vec<Rat> = (0..cols).map(|j| if j >= n { Rat::one() } else { Rat::zero() }).collect();
    tab.optimize(&phase1, &|_| true);
    if !tab.objective(&phase1).is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rat::zero()));
    if !tab.optimize(&cost, &|j| j < n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.t[i][cols].clone();
        }
    }
    let value = x.iter().zip(c).fold(Rat::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}

/// Finds `λ ≥ 0` with `Σ λ_j g_j = target`, if one exists.
pub fn nonnegative_combination(generators: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let dim = target.len();
    let mut lp = LinearProgram::new(generators.len());
    for k in 0..dim {
        lp.constrain(generators.iter().map(|g| g[k].clone()).collect(), Relation::Eq, target[k].clone());
    }
    lp.solve().point().map(<[Rat]>::to_vec)
}
