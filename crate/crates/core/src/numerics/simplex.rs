//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are stated as maximizations with `<=`, `=` and `>=` rows and
//! per-variable bounds. Internally every variable is shifted or split so
//! that all columns are nonnegative, rows are scaled to a nonnegative
//! right-hand side, and phase one minimizes the sum of artificials.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Bound {
    fn default() -> Self {
        Self { lower: 0.0, upper: f64::INFINITY }
    }
}

/// `maximize objective · x` subject to the constraint rows and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        let bounds = vec![Bound::default(); objective.len()];
        Self { objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coefficients, relation, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = Bound { lower, upper };
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Schema(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::Schema(format!(
                    "constraint {i} has width {}, objective has {n}",
                    c.coefficients.len()
                )));
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!("constraint {i} has non-finite entries")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper {
                return Err(Error::Schema(format!("variable {j} has empty bounds")));
            }
            if b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return Err(Error::Schema(format!("variable {j} has unattainable bounds")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("objective has non-finite entries".into()));
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, v) in self.bounds.iter().zip(x) {
            worst = worst.max(b.lower - v).max(v - b.upper);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Final phase-two reduced costs of the internal columns; all are
    /// `>= -1e-7` at an optimal vertex.
    pub reduced_costs: Vec<f64>,
    pub pivots: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, pivots: usize) -> Self {
        Self {
            status,
            values: vec![f64::NAN; n],
            objective_value: f64::NAN,
            reduced_costs: Vec::new(),
            pivots,
        }
    }
}

/// How an original variable maps onto nonnegative internal columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + col
    Shifted { col: usize, offset: f64 },
    /// x = offset - col
    Mirrored { col: usize, offset: f64 },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows + 1` rows of `cols + 1` entries; the last row is the objective
    /// row (reduced costs), the last column the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.data[pr * w + pc];
        for c in 0..w {
            self.data[pr * w + c] *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * w + pc];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for (dst, src) in row.iter_mut().zip(&pivot_row) {
                *dst -= factor * src;
            }
            row[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Installs `cost` (maximize) as the objective row in reduced-cost form.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        let obj = self.rows * w;
        for c in 0..w {
            self.data[obj + c] = if c < self.cols { -cost[c] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for c in 0..w {
                self.data[obj + c] += cb * self.data[r * w + c];
            }
        }
    }

    /// Runs primal simplex iterations on the current objective row.
    /// Returns `false` when the problem is unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> Result<bool> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Numeric("simplex pivot limit exceeded".into()));
            }
            // Bland: lowest-index column with a negative reduced cost.
            let entering = (0..self.cols).find(|&c| allowed[c] && self.at(self.rows, c) < -PIVOT_TOL);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    best = match best {
                        None => Some((ratio, r)),
                        Some((br, brow)) => {
                            if ratio < br - 1e-12
                                || ((ratio - br).abs() <= 1e-12 && self.basis[r] < self.basis[brow])
                            {
                                Some((ratio, r))
                            } else {
                                Some((br, brow))
                            }
                        }
                    };
                }
            }
            let Some((_, pr)) = best else {
                return Ok(false);
            };
            self.pivot(pr, pc);
        }
    }
}

pub fn solve_lp(problem: &LinearProgram) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for b in &problem.bounds {
        let m = match (b.lower.is_finite(), b.upper.is_finite()) {
            (true, _) => {
                let col = ncols;
                ncols += 1;
                if b.upper.is_finite() {
                    bound_rows.push((col, b.upper - b.lower));
                }
                VarMap::Shifted { col, offset: b.lower }
            }
            (false, true) => {
                let col = ncols;
                ncols += 1;
                VarMap::Mirrored { col, offset: b.upper }
            }
            (false, false) => {
                let pos = ncols;
                ncols += 2;
                VarMap::Split { pos, neg: pos + 1 }
            }
        };
        maps.push(m);
    }

    // Rows over the structural internal columns.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &problem.constraints {
        let mut coeffs = vec![0.0; ncols];
        let mut rhs = c.rhs;
        for (j, &a) in c.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shifted { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (col, width) in bound_rows {
        let mut coeffs = vec![0.0; ncols];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width));
    }
    for row in &mut rows {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|v| *v = -*v);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = ncols + n_slack + n_art;
    let art_start = ncols + n_slack;

    let w = total + 1;
    let mut tab = Tableau {
        rows: m,
        cols: total,
        data: vec![0.0; (m + 1) * w],
        basis: vec![0; m],
        pivots: 0,
    };
    let (mut next_slack, mut next_art) = (ncols, art_start);
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        tab.data[r * w..r * w + ncols].copy_from_slice(coeffs);
        tab.data[r * w + total] = *rhs;
        match rel {
            Relation::Le => {
                tab.data[r * w + next_slack] = 1.0;
                tab.basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                tab.data[r * w + next_slack] = -1.0;
                next_slack += 1;
                tab.data[r * w + next_art] = 1.0;
                tab.basis[r] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                tab.data[r * w + next_art] = 1.0;
                tab.basis[r] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase one: maximize -sum(artificials).
    if n_art > 0 {
        let mut cost = vec![0.0; total];
        cost[art_start..].iter_mut().for_each(|c| *c = -1.0);
        tab.set_objective(&cost);
        let allowed = vec![true; total];
        tab.optimize(&allowed)?;
        let infeasibility = -tab.at(m, total);
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::failed(LpStatus::Infeasible, n, tab.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= art_start {
                if let Some(pc) = (0..art_start).find(|&c| tab.at(r, c).abs() > PIVOT_TOL) {
                    tab.pivot(r, pc);
                }
            }
        }
    }

    // Phase two.
    let mut cost = vec![0.0; total];
    for (j, &c) in problem.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shifted { col, .. } => cost[col] += c,
            VarMap::Mirrored { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    tab.set_objective(&cost);
    let allowed: Vec<bool> = (0..total).map(|c| c < art_start).collect();
    if !tab.optimize(&allowed)? {
        return Ok(LpSolution::failed(LpStatus::Unbounded, n, tab.pivots));
    }

    let mut internal = vec![0.0; total];
    for r in 0..m {
        internal[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let values: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shifted { col, offset } => offset + internal[col],
            VarMap::Mirrored { col, offset } => offset - internal[col],
            VarMap::Split { pos, neg } => internal[pos] - internal[neg],
        })
        .collect();
    let objective_value = problem.objective.iter().zip(&values).map(|(c, x)| c * x).sum();
    let reduced_costs = (0..art_start).map(|c| tab.at(m, c)).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
        reduced_costs,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_upper_bound() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_negative_cap() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn classic_two_variable() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.add_constraint(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.add_constraint(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.add_constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective_value - 36.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9 && (s.values[1] - 6.0).abs() < 1e-9);
        assert!(s.reduced_costs.iter().all(|&r| r >= -1e-7));
    }

    #[test]
    fn equality_and_free_variable() {
        // max -|z| style: max y s.t. y <= x, y <= -x, x free, y free -> 0
        let mut lp = LinearProgram::maximize(vec![0.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![-1.0, 1.0], Relation::Le, 0.0);
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 0.0);
        lp.add_constraint(vec![1.0, 0.0], Relation::Ge, -3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective_value.abs() < 1e-9);
    }

    #[test]
    fn bounded_variables_and_equality() {
        // max x + 2y s.t. x + y = 3, 0.5 <= x <= 2, y <= 2.2
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 3.0);
        lp.set_bounds(0, 0.5, 2.0);
        lp.set_bounds(1, 0.0, 2.2);
        let s = solve_lp(&lp).unwrap();
        assert!((s.values[0] - 0.8).abs() < 1e-9);
        assert!((s.values[1] - 2.2).abs() < 1e-9);
        assert!(lp.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's cycling example; Bland's rule must terminate.
        let mut lp = LinearProgram::maximize(vec![0.75, -150.0, 0.02, -6.0]);
        lp.add_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Schema(_))));
    }
}
