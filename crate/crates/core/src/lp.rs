//! Exact bounded-variable primal simplex.
//!
//! Programs have the shape `min c·x` subject to `row_lo ≤ A x ≤ row_hi` and
//! `var_lo ≤ x ≤ var_hi`, with integer data and rational costs. Infinite
//! bounds are `None`. The solver returns a vertex of the feasible region,
//! which is what makes the integrality guarantees of totally unimodular
//! systems observable: on a TU matrix with integer bounds every returned
//! point is integral.
//!
//! Pivoting follows Bland's rule (lowest eligible entering index, lowest
//! leaving index among ratio ties), so runs terminate and are reproducible.
//! Feasibility comes from a phase that minimizes the sum of artificial
//! variables attached to rows violated by the all-lower-bounds start.

use crate::error::{malformed, Result};
use crate::numeric::{ExactField, IntMatrix, Rational};

/// A linear program with integer constraint data.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<F = Rational> {
    /// Minimized.
    pub objective: Vec<F>,
    pub matrix: IntMatrix,
    pub row_lower: Vec<Option<i64>>,
    pub row_upper: Vec<Option<i64>>,
    pub var_lower: Vec<i64>,
    pub var_upper: Vec<Option<i64>>,
}

impl<F: ExactField> LinearProgram<F> {
    /// All rows unconstrained, all variables in `[0, +∞)`.
    pub fn new(objective: Vec<F>, matrix: IntMatrix) -> Self {
        let (m, n) = (matrix.rows(), matrix.cols());
        LinearProgram {
            objective,
            matrix,
            row_lower: vec![None; m],
            row_upper: vec![None; m],
            var_lower: vec![0; n],
            var_upper: vec![None; n],
        }
    }

    /// Zero objective, for pure feasibility questions.
    pub fn feasibility(matrix: IntMatrix) -> Self {
        let n = matrix.cols();
        Self::new(vec![F::zero(); n], matrix)
    }

    pub fn with_row_bounds(mut self, lower: Vec<Option<i64>>, upper: Vec<Option<i64>>) -> Self {
        self.row_lower = lower;
        self.row_upper = upper;
        self
    }

    pub fn with_var_bounds(mut self, lower: Vec<i64>, upper: Vec<Option<i64>>) -> Self {
        self.var_lower = lower;
        self.var_upper = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.matrix.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.num_rows(), self.num_vars());
        if self.objective.len() != n {
            return malformed(format!("objective has {} entries, expected {n}", self.objective.len()));
        }
        if self.row_lower.len() != m || self.row_upper.len() != m {
            return malformed(format!("row bounds must have {m} entries"));
        }
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return malformed(format!("variable bounds must have {n} entries"));
        }
        for r in 0..m {
            if let (Some(l), Some(u)) = (self.row_lower[r], self.row_upper[r]) {
                if l > u {
                    return malformed(format!("row {r} has lower bound {l} above upper bound {u}"));
                }
            }
        }
        for j in 0..n {
            if let Some(u) = self.var_upper[j] {
                if self.var_lower[j] > u {
                    return malformed(format!("variable {j} has lower bound above upper bound"));
                }
            }
        }
        Ok(())
    }

    /// Objective value at `x`.
    pub fn evaluate(&self, x: &[F]) -> F {
        self.objective
            .iter()
            .zip(x)
            .fold(F::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// Exact feasibility test for a candidate point.
    pub fn is_feasible(&self, x: &[F]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        for (j, v) in x.iter().enumerate() {
            if *v < F::from_int(self.var_lower[j]) {
                return false;
            }
            if matches!(self.var_upper[j], Some(u) if *v > F::from_int(u)) {
                return false;
            }
        }
        for r in 0..self.num_rows() {
            let act = row_activity(self.matrix.row(r), x);
            if matches!(self.row_lower[r], Some(l) if act < F::from_int(l)) {
                return false;
            }
            if matches!(self.row_upper[r], Some(u) if act > F::from_int(u)) {
                return false;
            }
        }
        true
    }
}

fn row_activity<F: ExactField>(row: &[i64], x: &[F]) -> F {
    row.iter()
        .zip(x)
        .filter(|(a, _)| **a != 0)
        .fold(F::zero(), |acc, (a, v)| acc + F::from_int(*a) * v.clone())
}

/// Result of a solve.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<F = Rational> {
    /// A vertex of the feasible region and its objective value.
    Optimal { solution: Vec<F>, value: F },
    Infeasible,
    Unbounded,
}

impl<F> LpOutcome<F> {
    pub fn solution(&self) -> Option<&[F]> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&F> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

/// Minimizes the objective; an optimal answer is always a vertex.
pub fn solve_lp<F: ExactField>(lp: &LinearProgram<F>) -> Result<LpOutcome<F>> {
    solve(lp, true)
}

/// Returns some vertex of the feasible region (the objective is ignored for
/// the search and only evaluated at the returned point).
pub fn find_vertex<F: ExactField>(lp: &LinearProgram<F>) -> Result<LpOutcome<F>> {
    solve(lp, false)
}

fn solve<F: ExactField>(lp: &LinearProgram<F>, optimize: bool) -> Result<LpOutcome<F>> {
    lp.validate()?;
    let Some(reduced) = presolve(lp) else {
        return Ok(LpOutcome::Infeasible);
    };

    let mut tab = Tableau::new(&reduced);
    let phase_one_cost: Vec<F> = (0..tab.num_cols())
        .map(|k| if k >= tab.first_artificial { F::one() } else { F::zero() })
        .collect();
    tab.run(&phase_one_cost);
    let infeasibility = (tab.first_artificial..tab.num_cols())
        .fold(F::zero(), |acc, k| acc + tab.values[k].clone());
    if !infeasibility.is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    for k in tab.first_artificial..tab.num_cols() {
        tab.hi[k] = Some(F::zero());
    }

    if optimize {
        let mut cost = vec![F::zero(); tab.num_cols()];
        for (k, &orig) in reduced.columns.iter().enumerate() {
            cost[k] = lp.objective[orig].clone();
        }
        if tab.run(&cost) == PhaseEnd::Unbounded {
            return Ok(LpOutcome::Unbounded);
        }
    }

    let mut solution = reduced.fixed.clone();
    for (k, &orig) in reduced.columns.iter().enumerate() {
        solution[orig] = tab.values[k].clone();
    }
    let value = lp.evaluate(&solution);
    Ok(LpOutcome::Optimal { solution, value })
}

/// Program after removing singleton rows and fixed variables.
struct Reduced<F> {
    /// Original index of each surviving column.
    columns: Vec<usize>,
    /// Full-length vector holding values of removed (fixed) variables.
    fixed: Vec<F>,
    rows: Vec<Vec<i64>>,
    row_lower: Vec<Option<i64>>,
    row_upper: Vec<Option<i64>>,
    var_lower: Vec<i64>,
    var_upper: Vec<Option<i64>>,
}

/// Folds unit-coefficient singleton rows into variable bounds and substitutes
/// out fixed variables, repeating until stable. `None` means infeasible.
fn presolve<F: ExactField>(lp: &LinearProgram<F>) -> Option<Reduced<F>> {
    let n = lp.num_vars();
    let mut lower = lp.var_lower.clone();
    let mut upper = lp.var_upper.clone();
    let mut alive_row = vec![true; lp.num_rows()];
    let row_lower = &lp.row_lower;
    let row_upper = &lp.row_upper;
    let mut fixed: Vec<Option<i64>> = vec![None; n];

    loop {
        let mut changed = false;
        for r in 0..lp.num_rows() {
            if !alive_row[r] {
                continue;
            }
            let row = lp.matrix.row(r);
            let live: Vec<usize> = (0..n).filter(|&j| row[j] != 0 && fixed[j].is_none()).collect();
            let fixed_part: i64 = (0..n)
                .filter_map(|j| fixed[j].map(|v| row[j] * v))
                .sum();
            let lo = row_lower[r].map(|l| l - fixed_part);
            let hi = row_upper[r].map(|u| u - fixed_part);
            match live.as_slice() {
                [] => {
                    if lo.is_some_and(|l| l > 0) || hi.is_some_and(|u| u < 0) {
                        return None;
                    }
                    alive_row[r] = false;
                    changed = true;
                }
                [j] if row[*j].abs() == 1 => {
                    let j = *j;
                    let (lo_x, hi_x) = if row[j] == 1 {
                        (lo, hi)
                    } else {
                        (hi.map(|u| -u), lo.map(|l| -l))
                    };
                    if let Some(l) = lo_x {
                        lower[j] = lower[j].max(l);
                    }
                    if let Some(u) = hi_x {
                        upper[j] = Some(upper[j].map_or(u, |cur| cur.min(u)));
                    }
                    alive_row[r] = false;
                    changed = true;
                }
                _ => {}
            }
        }
        for j in 0..n {
            if fixed[j].is_some() {
                continue;
            }
            if let Some(u) = upper[j] {
                if lower[j] > u {
                    return None;
                }
                if lower[j] == u {
                    fixed[j] = Some(u);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let columns: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    let mut rows = Vec::new();
    let mut rl = Vec::new();
    let mut ru = Vec::new();
    for r in 0..lp.num_rows() {
        if !alive_row[r] {
            continue;
        }
        let row = lp.matrix.row(r);
        let fixed_part: i64 = (0..n).filter_map(|j| fixed[j].map(|v| row[j] * v)).sum();
        rows.push(columns.iter().map(|&j| row[j]).collect());
        rl.push(row_lower[r].map(|l| l - fixed_part));
        ru.push(row_upper[r].map(|u| u - fixed_part));
    }
    Some(Reduced {
        fixed: fixed.iter().map(|v| F::from_int(v.unwrap_or(0))).collect(),
        var_lower: columns.iter().map(|&j| lower[j]).collect(),
        var_upper: columns.iter().map(|&j| upper[j]).collect(),
        columns,
        rows,
        row_lower: rl,
        row_upper: ru,
    })
}

#[derive(Debug, PartialEq, Eq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

/// Dense tableau over structural, slack and artificial columns.
///
/// Row `r` encodes `Σ_k t[r][k]·x_k = 0` with the basic column scaled to one,
/// so `x_basic = -Σ_nonbasic t[r][k]·x_k`.
struct Tableau<F> {
    t: Vec<Vec<F>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    values: Vec<F>,
    lo: Vec<Option<F>>,
    hi: Vec<Option<F>>,
    first_artificial: usize,
}

enum Blocker {
    Flip,
    Row { row: usize, to_upper: bool },
}

impl<F: ExactField> Tableau<F> {
    fn new(p: &Reduced<F>) -> Self {
        let n = p.columns.len();
        let m = p.rows.len();
        let x0: Vec<i64> = p.var_lower.clone();
        let activity: Vec<i64> = p
            .rows
            .iter()
            .map(|row| row.iter().zip(&x0).map(|(a, b)| a * b).sum())
            .collect();
        let violated: Vec<Option<i64>> = (0..m)
            .map(|r| {
                let v = activity[r];
                match (p.row_lower[r], p.row_upper[r]) {
                    (Some(l), _) if v < l => Some(l),
                    (_, Some(u)) if v > u => Some(u),
                    _ => None,
                }
            })
            .collect();
        let num_art = violated.iter().filter(|v| v.is_some()).count();
        let first_artificial = n + m;
        let cols = n + m + num_art;

        let mut lo: Vec<Option<F>> = Vec::with_capacity(cols);
        let mut hi: Vec<Option<F>> = Vec::with_capacity(cols);
        for j in 0..n {
            lo.push(Some(F::from_int(p.var_lower[j])));
            hi.push(p.var_upper[j].map(F::from_int));
        }
        for r in 0..m {
            lo.push(p.row_lower[r].map(F::from_int));
            hi.push(p.row_upper[r].map(F::from_int));
        }
        for _ in 0..num_art {
            lo.push(Some(F::zero()));
            hi.push(None);
        }

        let mut values = vec![F::zero(); cols];
        for j in 0..n {
            values[j] = F::from_int(x0[j]);
        }
        let mut t = vec![vec![F::zero(); cols]; m];
        let mut basis = Vec::with_capacity(m);
        let mut is_basic = vec![false; cols];
        let mut at_upper = vec![false; cols];
        let mut next_art = first_artificial;
        for r in 0..m {
            let slack = n + r;
            match violated[r] {
                None => {
                    for j in 0..n {
                        t[r][j] = F::from_int(-p.rows[r][j]);
                    }
                    t[r][slack] = F::one();
                    values[slack] = F::from_int(activity[r]);
                    basis.push(slack);
                    is_basic[slack] = true;
                }
                Some(bound) => {
                    let sigma: i64 = if bound > activity[r] { 1 } else { -1 };
                    for j in 0..n {
                        t[r][j] = F::from_int(sigma * p.rows[r][j]);
                    }
                    t[r][slack] = F::from_int(-sigma);
                    t[r][next_art] = F::one();
                    values[slack] = F::from_int(bound);
                    at_upper[slack] = p.row_upper[r] == Some(bound) && p.row_lower[r] != Some(bound);
                    values[next_art] = F::from_int((bound - activity[r]).abs());
                    basis.push(next_art);
                    is_basic[next_art] = true;
                    next_art += 1;
                }
            }
        }
        Tableau {
            t,
            basis,
            is_basic,
            at_upper,
            values,
            lo,
            hi,
            first_artificial,
        }
    }

    fn num_cols(&self) -> usize {
        self.values.len()
    }

    fn is_fixed(&self, k: usize) -> bool {
        matches!((&self.lo[k], &self.hi[k]), (Some(l), Some(u)) if l == u)
    }

    /// Lowest-index nonbasic column whose move improves the objective, with
    /// the direction of the move (+1 up from lower, -1 down from upper).
    fn entering(&self, cost: &[F]) -> Option<(usize, i8)> {
        for k in 0..self.num_cols() {
            if self.is_basic[k] || self.is_fixed(k) {
                continue;
            }
            let mut d = cost[k].clone();
            for (r, &b) in self.basis.iter().enumerate() {
                if !cost[b].is_zero() && !self.t[r][k].is_zero() {
                    d = d - cost[b].clone() * self.t[r][k].clone();
                }
            }
            if self.at_upper[k] {
                if d.is_positive() {
                    return Some((k, -1));
                }
            } else if d.is_negative() {
                return Some((k, 1));
            }
        }
        None
    }

    fn run(&mut self, cost: &[F]) -> PhaseEnd {
        while let Some((j, dir)) = self.entering(cost) {
            let delta = F::from_int(i64::from(dir));
            let mut best: Option<(F, usize, Blocker)> = None;
            let consider = |theta: F, var: usize, why: Blocker, best: &mut Option<(F, usize, Blocker)>| {
                let better = match best {
                    None => true,
                    Some((bt, bv, _)) => theta < *bt || (theta == *bt && var < *bv),
                };
                if better {
                    *best = Some((theta, var, why));
                }
            };
            if let (Some(l), Some(u)) = (&self.lo[j], &self.hi[j]) {
                consider(u.clone() - l.clone(), j, Blocker::Flip, &mut best);
            }
            for r in 0..self.basis.len() {
                let coef = &self.t[r][j];
                if coef.is_zero() {
                    continue;
                }
                let rate = -(coef.clone() * delta.clone());
                let b = self.basis[r];
                if rate.is_negative() {
                    if let Some(l) = &self.lo[b] {
                        let theta = (self.values[b].clone() - l.clone()) / (-rate);
                        consider(theta, b, Blocker::Row { row: r, to_upper: false }, &mut best);
                    }
                } else if let Some(u) = &self.hi[b] {
                    let theta = (u.clone() - self.values[b].clone()) / rate;
                    consider(theta, b, Blocker::Row { row: r, to_upper: true }, &mut best);
                }
            }
            let Some((theta, _, blocker)) = best else {
                return PhaseEnd::Unbounded;
            };

            if !theta.is_zero() {
                let step = theta.clone() * delta.clone();
                self.values[j] = self.values[j].clone() + step.clone();
                for r in 0..self.basis.len() {
                    if !self.t[r][j].is_zero() {
                        let b = self.basis[r];
                        self.values[b] = self.values[b].clone() - self.t[r][j].clone() * step.clone();
                    }
                }
            }
            match blocker {
                Blocker::Flip => {
                    self.at_upper[j] = !self.at_upper[j];
                    self.snap_to_bound(j);
                }
                Blocker::Row { row, to_upper } => {
                    let leaving = self.basis[row];
                    self.pivot(row, j);
                    self.is_basic[leaving] = false;
                    self.at_upper[leaving] = to_upper;
                    self.snap_to_bound(leaving);
                }
            }
        }
        PhaseEnd::Optimal
    }

    fn snap_to_bound(&mut self, k: usize) {
        let bound = if self.at_upper[k] { &self.hi[k] } else { &self.lo[k] };
        if let Some(b) = bound {
            self.values[k] = b.clone();
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        if !p.is_one() {
            for v in self.t[row].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for (k, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    line[k] = line[k].clone() - factor.clone() * pv.clone();
                }
            }
        }
        self.basis[row] = col;
        self.is_basic[col] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rank, rational};
    use num_rational::Ratio;

    fn q(v: i64) -> Rational {
        rational(v, 1)
    }

    #[test]
    fn single_variable_bound() {
        let lp = LinearProgram::new(vec![q(-1)], IntMatrix::zeros(0, 1)).with_var_bounds(vec![0], vec![Some(1)]);
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out, LpOutcome::Optimal { solution: vec![q(1)], value: q(-1) });
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let m = IntMatrix::from_rows(1, &[vec![1], vec![1]]).unwrap();
        let lp = LinearProgram::<Rational>::new(vec![q(0)], m)
            .with_row_bounds(vec![Some(2), None], vec![None, Some(1)])
            .with_var_bounds(vec![0], vec![Some(5)]);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
        assert_eq!(find_vertex(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_direction_detected() {
        let m = IntMatrix::from_rows(2, &[vec![1, -1]]).unwrap();
        let lp = LinearProgram::new(vec![q(-1), q(0)], m).with_row_bounds(vec![None], vec![Some(3)]);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_row_vertex_is_never_fractional() {
        let m = IntMatrix::from_rows(2, &[vec![1, 1]]).unwrap();
        let lp = LinearProgram::<Rational>::feasibility(m)
            .with_row_bounds(vec![Some(1)], vec![Some(1)])
            .with_var_bounds(vec![0, 0], vec![Some(1), Some(1)]);
        let out = find_vertex(&lp).unwrap();
        let x = out.solution().unwrap();
        assert!(x == [q(1), q(0)] || x == [q(0), q(1)], "got {x:?}");
    }

    #[test]
    fn unit_interval_vertex() {
        let lp = LinearProgram::<Rational>::feasibility(IntMatrix::zeros(0, 1)).with_var_bounds(vec![0], vec![Some(1)]);
        let x = find_vertex(&lp).unwrap().solution().unwrap().to_vec();
        assert!(x == [q(0)] || x == [q(1)]);
    }

    #[test]
    fn empty_region_from_bounds() {
        let lp = LinearProgram::<Rational>::feasibility(IntMatrix::zeros(0, 1)).with_var_bounds(vec![2], vec![Some(1)]);
        assert!(lp.validate().is_err());
        let m = IntMatrix::from_rows(1, &[vec![1]]).unwrap();
        let lp = LinearProgram::<Rational>::feasibility(m)
            .with_row_bounds(vec![Some(3)], vec![None])
            .with_var_bounds(vec![0], vec![Some(1)]);
        assert_eq!(find_vertex(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn malformed_dimensions_rejected() {
        let lp = LinearProgram::new(vec![q(1)], IntMatrix::zeros(0, 2));
        assert!(matches!(solve_lp(&lp), Err(crate::Error::Malformed(_))));
    }

    #[test]
    fn fractional_vertex_on_non_tu_system() {
        // x+y ≤ 1, y+z ≤ 1, x+z ≤ 1; max x+y+z has the fractional vertex (1/2,1/2,1/2).
        let m = IntMatrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let lp = LinearProgram::new(vec![q(-1), q(-1), q(-1)], m)
            .with_row_bounds(vec![None; 3], vec![Some(1); 3])
            .with_var_bounds(vec![0; 3], vec![Some(1); 3]);
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&rational(-3, 2)));
        assert!(!crate::numeric::is_integral(out.solution().unwrap()));
    }

    /// Classic degenerate instance on which Dantzig's rule cycles.
    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example with the first two rows scaled to integers.
        let m = IntMatrix::from_rows(
            4,
            &[vec![1, -32, -4, 36], vec![1, -24, -1, 6], vec![0, 0, 1, 0]],
        )
        .unwrap();
        let lp = LinearProgram::new(vec![rational(-3, 4), q(20), rational(-1, 2), q(6)], m)
            .with_row_bounds(vec![None; 3], vec![Some(0), Some(0), Some(1)]);
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&rational(-5, 4)));
    }

    #[test]
    fn fixed_width_field_agrees() {
        let m = IntMatrix::from_rows(3, &[vec![1, 2, -1], vec![-1, 1, 1]]).unwrap();
        let big = LinearProgram::new(vec![q(-2), q(1), q(-1)], m.clone())
            .with_row_bounds(vec![Some(-2), None], vec![Some(3), Some(2)])
            .with_var_bounds(vec![0, -1, 0], vec![Some(2), Some(2), Some(3)]);
        let small: LinearProgram<Ratio<i128>> = LinearProgram {
            objective: vec![Ratio::from_integer(-2), Ratio::from_integer(1), Ratio::from_integer(-1)],
            matrix: m,
            row_lower: big.row_lower.clone(),
            row_upper: big.row_upper.clone(),
            var_lower: big.var_lower.clone(),
            var_upper: big.var_upper.clone(),
        };
        let a = solve_lp(&big).unwrap();
        let b = solve_lp(&small).unwrap();
        assert_eq!(a.value().unwrap().to_string(), b.value().unwrap().to_string());
    }

    #[test]
    fn returned_point_is_a_vertex() {
        let m = IntMatrix::from_rows(3, &[vec![1, 1, 1], vec![1, -1, 0]]).unwrap();
        let lp = LinearProgram::new(vec![q(1), q(2), q(-1)], m)
            .with_row_bounds(vec![Some(1), Some(-1)], vec![Some(2), Some(1)])
            .with_var_bounds(vec![0; 3], vec![Some(1); 3]);
        let out = solve_lp(&lp).unwrap();
        let x = out.solution().unwrap();
        assert!(lp.is_feasible(x));
        let mut tight: Vec<Vec<Rational>> = Vec::new();
        for r in 0..lp.num_rows() {
            let act = row_activity(lp.matrix.row(r), x);
            if lp.row_lower[r].map(q) == Some(act.clone()) || lp.row_upper[r].map(q) == Some(act) {
                tight.push(lp.matrix.row(r).iter().map(|&v| q(v)).collect());
            }
        }
        for j in 0..3 {
            if x[j] == q(lp.var_lower[j]) || lp.var_upper[j].map(q) == Some(x[j].clone()) {
                let mut e = vec![q(0); 3];
                e[j] = q(1);
                tight.push(e);
            }
        }
        assert_eq!(rank(&tight), 3);
    }
}
