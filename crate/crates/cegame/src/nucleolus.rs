//! The nucleolus, computed by the classic successive-LP scheme over exact
//! rationals.
//!
//! Round after round, maximize the minimum excess `ε` over the imputation
//! set subject to the excesses frozen in earlier rounds; coalitions whose
//! constraint is tight in *every* optimum of the round (decided by one
//! exact re-optimization per candidate) get their excess frozen. The
//! iteration stops as soon as the frozen equalities pin the payoff vector,
//! which they must — the nucleolus is a single point.

use crate::allocation::{excess, Allocation, AllocationRule};
use crate::coalition::Coalition;
use crate::game::CEGame;
use crate::lp::{lp_solve, LinearProgram, LpError, LpOutcome, Sense};
use crate::numeric::Rational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NucleolusError {
    #[error("the imputation set is empty: v(N) < Σ v({{i}})")]
    EmptyImputationSet,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal failure in the successive scheme: {0}")]
    Internal(&'static str),
}

/// Excesses of every proper non-empty coalition, sorted ascending. The
/// nucleolus lexicographically maximizes this vector over imputations.
pub fn sorted_excesses(game: &CEGame, payoffs: &[Rational]) -> Vec<Rational> {
    let full = game.grand().bits();
    let mut out: Vec<Rational> = (1..full)
        .map(|bits| excess(game, Coalition::from_bits(bits), payoffs))
        .collect();
    out.sort();
    out
}

/// Lexicographic `a ≥ b` on equal-length vectors.
pub fn lex_ge(a: &[Rational], b: &[Rational]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return true;
        }
        if x < y {
            return false;
        }
    }
    true
}

/// Builds the constraint system shared by the round LP and the tightness
/// re-optimizations. Variables are `x_0 … x_{n−1}, ε`.
fn base_program(
    game: &CEGame,
    fixed: &[(Coalition, Rational)],
    active: &[Coalition],
) -> Result<LinearProgram, LpError> {
    let n = game.n();
    let mut lp = LinearProgram::new(n + 1);

    let mut efficiency = vec![Rational::zero(); n + 1];
    for coef in efficiency.iter_mut().take(n) {
        *coef = Rational::one();
    }
    lp.add_row(efficiency, Sense::Eq, game.grand_value().clone())?;

    for (s, e) in fixed {
        let mut row = vec![Rational::zero(); n + 1];
        for i in s.iter() {
            row[i] = Rational::one();
        }
        lp.add_row(row, Sense::Eq, game.value(*s) + e)?;
    }

    for &s in active {
        let mut row = vec![Rational::zero(); n + 1];
        for i in s.iter() {
            row[i] = Rational::one();
        }
        row[n] = -Rational::one();
        lp.add_row(row, Sense::Ge, game.value(s).clone())?;
    }

    // imputation floor: x_i ≥ v({i})
    for i in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[i] = Rational::one();
        lp.add_row(row, Sense::Ge, game.value(Coalition::singleton(i)).clone())?;
    }
    Ok(lp)
}

fn solve_round(
    game: &CEGame,
    fixed: &[(Coalition, Rational)],
    active: &[Coalition],
) -> Result<(Rational, Vec<Rational>), NucleolusError> {
    let n = game.n();
    let mut lp = base_program(game, fixed, active)?;
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    lp.set_objective(objective)?;
    match lp_solve(&lp)? {
        LpOutcome::Optimal { value, mut point } => {
            point.truncate(n);
            Ok((value, point))
        }
        LpOutcome::Infeasible => Err(NucleolusError::Internal("round LP infeasible")),
        LpOutcome::Unbounded => Err(NucleolusError::Internal("round LP unbounded")),
    }
}

/// Whether coalition `s`'s excess equals `eps` in every optimum of the
/// round: maximize it subject to the round system at `ε = eps` and compare.
fn always_tight(
    game: &CEGame,
    fixed: &[(Coalition, Rational)],
    active: &[Coalition],
    eps: &Rational,
    s: Coalition,
) -> Result<bool, NucleolusError> {
    let n = game.n();
    let mut lp = base_program(game, fixed, active)?;
    let mut pin = vec![Rational::zero(); n + 1];
    pin[n] = Rational::one();
    lp.add_row(pin, Sense::Eq, eps.clone())?;
    let mut objective = vec![Rational::zero(); n + 1];
    for i in s.iter() {
        objective[i] = Rational::one();
    }
    lp.set_objective(objective)?;
    match lp_solve(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(value == game.value(s) + eps),
        LpOutcome::Infeasible => Err(NucleolusError::Internal("tightness LP infeasible")),
        LpOutcome::Unbounded => Err(NucleolusError::Internal("tightness LP unbounded")),
    }
}

/// Solves the frozen equality system when it already has full rank.
/// Rows are `[coefficients | rhs]` over the `n` payoff variables.
fn pinned_solution(n: usize, rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(coeffs, rhs)| {
            let mut row = coeffs.clone();
            row.push(rhs.clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pr) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pr);
        let factor = mat[rank][col].clone();
        for entry in mat[rank].iter_mut() {
            *entry /= &factor;
        }
        for r in 0..mat.len() {
            if r != rank && !mat[r][col].is_zero() {
                let mult = mat[r][col].clone();
                for c in 0..=n {
                    let delta = &mat[rank][c] * &mult;
                    mat[r][c] -= delta;
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    if pivot_of_col.iter().any(|&p| p == usize::MAX) {
        return None;
    }
    Some((0..n).map(|col| mat[pivot_of_col[col]][n].clone()).collect())
}

/// The nucleolus of the game: the unique imputation lexicographically
/// maximizing the ascending vector of excesses.
pub fn nucleolus(game: &CEGame) -> Result<Allocation, NucleolusError> {
    let n = game.n();
    let singles: Rational = (0..n)
        .map(|i| game.value(Coalition::singleton(i)).clone())
        .sum();
    if *game.grand_value() < singles {
        return Err(NucleolusError::EmptyImputationSet);
    }
    if n == 1 {
        return Ok(Allocation {
            payoffs: vec![game.grand_value().clone()],
            rule: AllocationRule::Nucleolus,
            weights: None,
        });
    }

    let full = game.grand().bits();
    let mut active: Vec<Coalition> = (1..full).map(Coalition::from_bits).collect();
    let mut fixed: Vec<(Coalition, Rational)> = Vec::new();

    for _round in 0..(1usize << n) {
        let (eps, x) = solve_round(game, &fixed, &active)?;
        let mut newly = Vec::new();
        for (idx, &s) in active.iter().enumerate() {
            if excess(game, s, &x) == eps && always_tight(game, &fixed, &active, &eps, s)? {
                newly.push(idx);
            }
        }
        if newly.is_empty() {
            return Err(NucleolusError::Internal("no always-tight coalition found"));
        }
        for &idx in newly.iter().rev() {
            let s = active.remove(idx);
            fixed.push((s, eps.clone()));
        }

        let mut rows: Vec<(Vec<Rational>, Rational)> = vec![(
            vec![Rational::one(); n],
            game.grand_value().clone(),
        )];
        for (s, e) in &fixed {
            let mut coeffs = vec![Rational::zero(); n];
            for i in s.iter() {
                coeffs[i] = Rational::one();
            }
            rows.push((coeffs, game.value(*s) + e));
        }
        if let Some(payoffs) = pinned_solution(n, &rows) {
            debug_assert!(
                fixed.iter().all(|(s, e)| &excess(game, *s, &payoffs) == e),
                "pinned solution must satisfy every frozen excess"
            );
            return Ok(Allocation { payoffs, rule: AllocationRule::Nucleolus, weights: None });
        }
        if active.is_empty() {
            return Err(NucleolusError::Internal("constraints exhausted before pinning"));
        }
    }
    Err(NucleolusError::Internal("round limit exceeded"))
}
