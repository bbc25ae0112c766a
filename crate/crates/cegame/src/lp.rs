//! A dense exact-rational linear program solver.
//!
//! Two-phase primal simplex over arbitrary-precision rationals with
//! Bland's anti-cycling rule, so every pivot decision and the reported
//! optimum are exact and termination is guaranteed. Variables are free;
//! they are split into differences of non-negatives internally. Built for
//! the small, dense programs of the nucleolus scheme, not for scale.

use crate::numeric::Rational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint has {got} coefficients, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `maximize c·x subject to rows`, with free variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    rows: Vec<(Vec<Rational>, Sense, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> LinearProgram {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::DimensionMismatch { expected: self.num_vars, got: coeffs.len() });
        }
        self.objective = coeffs;
        Ok(())
    }

    pub fn add_row(
        &mut self,
        coeffs: Vec<Rational>,
        sense: Sense,
        rhs: Rational,
    ) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::DimensionMismatch { expected: self.num_vars, got: coeffs.len() });
        }
        self.rows.push((coeffs, sense, rhs));
        Ok(())
    }
}

struct Tableau {
    /// rows[i] has `width` coefficient entries followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize, cost: &mut [Rational]) {
        let factor = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry /= &factor;
        }
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let mult = self.rows[r][col].clone();
            if mult.is_zero() {
                continue;
            }
            for c in 0..=self.width {
                let delta = &self.rows[row][c] * &mult;
                self.rows[r][c] -= delta;
            }
        }
        let mult = cost[col].clone();
        if !mult.is_zero() {
            for c in 0..=self.width {
                let delta = &self.rows[row][c] * &mult;
                cost[c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Primal simplex with Bland's rule, minimizing the reduced `cost`
    /// row (the rhs cell of `cost` holds minus the current objective).
    /// Columns at or beyond `limit` never enter. Returns false when the
    /// problem is unbounded below.
    fn minimize(&mut self, cost: &mut [Rational], limit: usize) -> bool {
        loop {
            // Bland: smallest-index column with a negative reduced cost
            let entering = (0..limit).find(|&c| cost[c].is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let coeff = &self.rows[r][col];
                if coeff > &Rational::zero() {
                    let ratio = &self.rows[r][self.width] / coeff;
                    let replace = match &leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if replace {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col, cost);
        }
    }
}

/// Solves the program exactly.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    for (coeffs, _, _) in &lp.rows {
        if coeffs.len() != lp.num_vars {
            return Err(LpError::DimensionMismatch {
                expected: lp.num_vars,
                got: coeffs.len(),
            });
        }
    }

    let n = lp.num_vars;
    let m = lp.rows.len();
    // columns: u_0..u_{n-1}, w_0..w_{n-1} (x = u − w), then one slack or
    // surplus per inequality, then artificials.
    let num_slack = lp.rows.iter().filter(|(_, s, _)| *s != Sense::Eq).count();
    let mut width = 2 * n + num_slack;
    let art_start = width;

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut slack_idx = 2 * n;
    let mut artificials = 0usize;

    struct Pending {
        row: Vec<Rational>,
        rhs: Rational,
        needs_artificial: bool,
    }
    let mut pending = Vec::with_capacity(m);

    for (coeffs, sense, rhs) in &lp.rows {
        let mut flip = false;
        let mut rhs = rhs.clone();
        if rhs.is_negative() {
            flip = true;
            rhs = -rhs;
        }
        let mut row = vec![Rational::zero(); 2 * n + num_slack];
        for (j, a) in coeffs.iter().enumerate() {
            let a = if flip { -a.clone() } else { a.clone() };
            row[n + j] = -&a;
            row[j] = a;
        }
        let effective = match (sense, flip) {
            (Sense::Le, false) | (Sense::Ge, true) => Sense::Le,
            (Sense::Ge, false) | (Sense::Le, true) => Sense::Ge,
            (Sense::Eq, _) => Sense::Eq,
        };
        let needs_artificial = match effective {
            Sense::Le => {
                row[slack_idx] = Rational::one();
                slack_idx += 1;
                false
            }
            Sense::Ge => {
                row[slack_idx] = -Rational::one();
                slack_idx += 1;
                true
            }
            Sense::Eq => true,
        };
        if needs_artificial {
            artificials += 1;
        }
        pending.push(Pending { row, rhs, needs_artificial });
    }

    width += artificials;
    let mut art_col = art_start;
    for (i, p) in pending.into_iter().enumerate() {
        let mut row = p.row;
        row.resize(width, Rational::zero());
        if p.needs_artificial {
            row[art_col] = Rational::one();
            basis[i] = art_col;
            art_col += 1;
        } else {
            // slack is basic; find its column (the +1 entry past 2n)
            let col = (2 * n..art_start)
                .find(|&c| row[c].is_one())
                .expect("slack column present");
            basis[i] = col;
        }
        row.push(p.rhs);
        rows.push(row);
    }

    let mut tableau = Tableau { rows, basis, width };

    // Phase 1: minimize the sum of artificials.
    if artificials > 0 {
        let mut cost = vec![Rational::zero(); width + 1];
        for c in art_start..width {
            cost[c] = Rational::one();
        }
        for r in 0..m {
            if tableau.basis[r] >= art_start {
                let row = tableau.rows[r].clone();
                for c in 0..=width {
                    cost[c] -= &row[c];
                }
            }
        }
        let bounded = tableau.minimize(&mut cost, width);
        debug_assert!(bounded, "phase 1 objective is bounded below by zero");
        // objective value = −cost[rhs]
        if !cost[width].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // drive any remaining artificial out of the basis
        for r in 0..m {
            if tableau.basis[r] >= art_start {
                let col = (0..art_start).find(|&c| !tableau.rows[r][c].is_zero());
                if let Some(col) = col {
                    tableau.pivot(r, col, &mut cost);
                }
                // otherwise the row is redundant (all-zero over real
                // columns); it stays basic at zero and never pivots again
            }
        }
    }

    // Phase 2: minimize −objective.
    let mut cost = vec![Rational::zero(); width + 1];
    for j in 0..n {
        cost[j] = -lp.objective[j].clone();
        cost[n + j] = lp.objective[j].clone();
    }
    for r in 0..m {
        let b = tableau.basis[r];
        if b < art_start && !cost[b].is_zero() {
            let mult = cost[b].clone();
            let row = tableau.rows[r].clone();
            for c in 0..=width {
                let delta = &row[c] * &mult;
                cost[c] -= delta;
            }
        }
    }
    if !tableau.minimize(&mut cost, art_start) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut z = vec![Rational::zero(); width];
    for r in 0..m {
        z[tableau.basis[r]] = tableau.rows[r][width].clone();
    }
    let point: Vec<Rational> = (0..n).map(|j| &z[j] - &z[n + j]).collect();
    let value: Rational = lp
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpOutcome::Optimal { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn optimal(outcome: LpOutcome) -> (Rational, Vec<Rational>) {
        match outcome {
            LpOutcome::Optimal { value, point } => (value, point),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn bounded_single_variable() {
        // max x s.t. x ≤ 3, x ≥ 0
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![int(1)]).unwrap();
        lp.add_row(vec![int(1)], Sense::Le, int(3)).unwrap();
        lp.add_row(vec![int(1)], Sense::Ge, int(0)).unwrap();
        let (value, point) = optimal(lp_solve(&lp).unwrap());
        assert_eq!(value, int(3));
        assert_eq!(point, vec![int(3)]);
    }

    #[test]
    fn unbounded_single_variable() {
        // max x s.t. x ≥ 0
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![int(1)]).unwrap();
        lp.add_row(vec![int(1)], Sense::Ge, int(0)).unwrap();
        assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![int(1)]).unwrap();
        lp.add_row(vec![int(1)], Sense::Le, int(1)).unwrap();
        lp.add_row(vec![int(1)], Sense::Ge, int(2)).unwrap();
        assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn first_max_min_excess_round() {
        // max ε s.t. x₁+x₂+x₃ = 13, x₁+x₂−ε ≥ 9, x₁+x₃−ε ≥ 5.5,
        // x₂+x₃−ε ≥ 5.5, xᵢ − ε ≥ 0
        let mut lp = LinearProgram::new(4);
        lp.set_objective(vec![int(0), int(0), int(0), int(1)]).unwrap();
        lp.add_row(vec![int(1), int(1), int(1), int(0)], Sense::Eq, int(13)).unwrap();
        lp.add_row(vec![int(1), int(1), int(0), int(-1)], Sense::Ge, int(9)).unwrap();
        lp.add_row(vec![int(1), int(0), int(1), int(-1)], Sense::Ge, rat(11, 2)).unwrap();
        lp.add_row(vec![int(0), int(1), int(1), int(-1)], Sense::Ge, rat(11, 2)).unwrap();
        lp.add_row(vec![int(1), int(0), int(0), int(-1)], Sense::Ge, int(0)).unwrap();
        lp.add_row(vec![int(0), int(1), int(0), int(-1)], Sense::Ge, int(0)).unwrap();
        lp.add_row(vec![int(0), int(0), int(1), int(-1)], Sense::Ge, int(0)).unwrap();
        let (value, _) = optimal(lp_solve(&lp).unwrap());
        assert_eq!(value, int(2));
    }

    #[test]
    fn free_variables_go_negative() {
        // max −x s.t. x ≥ −5 → x = −5
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![int(-1)]).unwrap();
        lp.add_row(vec![int(1)], Sense::Ge, int(-5)).unwrap();
        let (value, point) = optimal(lp_solve(&lp).unwrap());
        assert_eq!(point, vec![int(-5)]);
        assert_eq!(value, int(5));
    }

    #[test]
    fn degenerate_equalities() {
        // max x + y s.t. x + y = 2, x − y = 0, x ≤ 1
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![int(1), int(1)]).unwrap();
        lp.add_row(vec![int(1), int(1)], Sense::Eq, int(2)).unwrap();
        lp.add_row(vec![int(1), int(-1)], Sense::Eq, int(0)).unwrap();
        lp.add_row(vec![int(1), int(0)], Sense::Le, int(1)).unwrap();
        let (value, point) = optimal(lp_solve(&lp).unwrap());
        assert_eq!(value, int(2));
        assert_eq!(point, vec![int(1), int(1)]);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        // x + y = 2 stated twice
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![int(1), int(0)]).unwrap();
        lp.add_row(vec![int(1), int(1)], Sense::Eq, int(2)).unwrap();
        lp.add_row(vec![int(1), int(1)], Sense::Eq, int(2)).unwrap();
        lp.add_row(vec![int(0), int(1)], Sense::Ge, int(0)).unwrap();
        lp.add_row(vec![int(1), int(0)], Sense::Ge, int(0)).unwrap();
        let (value, _) = optimal(lp_solve(&lp).unwrap());
        assert_eq!(value, int(2));
    }

    #[test]
    fn rational_coefficients() {
        // max 3x + 2y s.t. x/2 + y/3 ≤ 1, x, y ≥ 0
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![int(3), int(2)]).unwrap();
        lp.add_row(vec![rat(1, 2), rat(1, 3)], Sense::Le, int(1)).unwrap();
        lp.add_row(vec![int(1), int(0)], Sense::Ge, int(0)).unwrap();
        lp.add_row(vec![int(0), int(1)], Sense::Ge, int(0)).unwrap();
        let (value, _) = optimal(lp_solve(&lp).unwrap());
        // x = 0, y = 3 gives 6; x = 2, y = 0 gives 6 — optimum is 6
        assert_eq!(value, int(6));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut lp = LinearProgram::new(2);
        assert!(matches!(
            lp.add_row(vec![int(1)], Sense::Le, int(1)),
            Err(LpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            lp.set_objective(vec![int(1)]),
            Err(LpError::DimensionMismatch { .. })
        ));
    }
}
