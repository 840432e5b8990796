//! Dense two-phase primal simplex for small linear programs of the form
//! `min cᵀx  s.t.  A x ≤ b,  x ≥ 0`.
//!
//! Dantzig pricing, switching to Bland's rule after a run of degenerate
//! pivots so the method cannot cycle.

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
    IterationLimit,
}

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_STREAK: usize = 50;

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    cost_rhs: f64,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, &pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * pivot_rhs;
                self.rows[i][c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, &pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost_rhs -= f * pivot_rhs;
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Sets the reduced-cost row for objective `c` given the current basis.
    fn price(&mut self, c: &[f64]) {
        self.cost = c.to_vec();
        self.cost_rhs = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for (v, &t) in self.cost.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * t;
                }
                self.cost_rhs -= cb * self.rhs[i];
            }
        }
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false` on an
    /// unbounded ray.
    fn optimize(&mut self, allowed: usize, max_pivots: &mut usize) -> Option<bool> {
        let mut streak = 0;
        loop {
            if *max_pivots == 0 {
                return None;
            }
            let entering = if streak < DEGENERATE_STREAK {
                let mut best = None;
                let mut best_val = -COST_TOL;
                for j in 0..allowed {
                    if self.cost[j] < best_val {
                        best_val = self.cost[j];
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..allowed).find(|&j| self.cost[j] < -COST_TOL)
            };
            let Some(c) = entering else {
                return Some(true);
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Some(false);
            };
            streak = if best_ratio <= 1e-12 { streak + 1 } else { 0 };
            self.pivot(r, c);
            *max_pivots -= 1;
        }
    }
}

/// Solves `min cᵀx s.t. A x ≤ b, x ≥ 0` with `A` given row-major.
pub fn solve_lp(c: &[f64], a: &[Vec<f64>], b: &[f64], max_pivots: usize) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let width = n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n + m;
    for i in 0..m {
        let mut row = vec![0.0; width];
        if b[i] >= 0.0 {
            row[..n].copy_from_slice(&a[i]);
            row[n + i] = 1.0;
            rhs.push(b[i]);
            basis.push(n + i);
        } else {
            for (dst, &src) in row[..n].iter_mut().zip(&a[i]) {
                *dst = -src;
            }
            row[n + i] = -1.0;
            row[next_art] = 1.0;
            rhs.push(-b[i]);
            basis.push(next_art);
            next_art += 1;
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        cost: vec![0.0; width],
        cost_rhs: 0.0,
    };
    let mut budget = max_pivots;

    if n_art > 0 {
        let mut phase1 = vec![0.0; width];
        for v in phase1[n + m..].iter_mut() {
            *v = 1.0;
        }
        t.price(&phase1);
        match t.optimize(width, &mut budget) {
            None => return LpOutcome::IterationLimit,
            Some(_) => {}
        }
        let infeasibility = -t.cost_rhs;
        let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if t.basis[i] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| t.rows[i][j].abs() > 1e-9) {
                    t.pivot(i, c);
                }
            }
        }
    }

    let mut phase2 = vec![0.0; width];
    phase2[..n].copy_from_slice(c);
    t.price(&phase2);
    match t.optimize(n + m, &mut budget) {
        None => LpOutcome::IterationLimit,
        Some(false) => LpOutcome::Unbounded,
        Some(true) => {
            let mut x = vec![0.0; n];
            for (i, &bv) in t.basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t.rhs[i].max(0.0);
                }
            }
            let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            LpOutcome::Optimal { x, objective }
        }
    }
}
