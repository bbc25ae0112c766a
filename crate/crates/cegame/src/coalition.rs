//! Per-coalition profit maximization: which members of a coalition should
//! export, at what commitment, and for what optimal profit.
//!
//! For a coalition `S` of SMEs, all essential members export whenever the
//! coalition exports at all. If their combined capacity already covers the
//! MQC the solution is immediate; otherwise the best subset `D ⊆ S^C` of
//! complementary members maximizes the contribution function
//! `G^S(D) = Σ_{i∈D} Δᵢ + min{m̲ − Σ_{S^E} Qᵢ, Σ_{i∈D} Qᵢ}·rᵘ`,
//! a 0/1-knapsack-like problem solved exactly here (exhaustively for small
//! complements, by branch and bound above that). A plain enumeration
//! oracle over exporter sets is provided for cross-checking.

use crate::model::{CESituation, PlayerClass};
use crate::numeric::Rational;
use num_traits::Zero;
use std::fmt;
use thiserror::Error;

/// Exhaustive G-search is used up to this many complementary members;
/// branch and bound takes over beyond it.
const EXHAUSTIVE_LIMIT: u32 = 12;

/// Coalitions larger than this are rejected by the enumeration oracle.
const ORACLE_LIMIT: u32 = 20;

/// A set of players, as a bitmask over the situation's player order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    /// The grand coalition over `n` players.
    pub fn full(n: usize) -> Coalition {
        debug_assert!(n <= 32);
        if n == 32 {
            Coalition(u32::MAX)
        } else {
            Coalition((1u32 << n) - 1)
        }
    }

    pub fn from_bits(bits: u32) -> Coalition {
        Coalition(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Coalition {
        Coalition(1 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Coalition {
        indices.iter().fold(Coalition::EMPTY, |c, &i| c.insert(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    #[must_use]
    pub fn insert(self, i: usize) -> Coalition {
        Coalition(self.0 | (1 << i))
    }

    #[must_use]
    pub fn remove(self, i: usize) -> Coalition {
        Coalition(self.0 & !(1 << i))
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Coalition {
        Coalition(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of this coalition in ascending bitmask order,
    /// including the empty set and the coalition itself.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                // next subset in ascending order
                Some(cur.wrapping_sub(mask) & mask)
            };
            Some(Coalition(cur))
        })
    }

    /// Label with 1-based member positions, e.g. `{1,3}`.
    pub fn label(self) -> String {
        let members: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", members.join(","))
    }

    /// Label with the situation's player ids.
    pub fn label_with(self, situation: &CESituation) -> String {
        let members: Vec<String> = self.iter().map(|i| situation.players()[i].clone()).collect();
        format!("{{{}}}", members.join(","))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoalitionError {
    #[error("coalition references players beyond the situation")]
    OutOfRange,
    #[error("player `{0}` is not an SME (capacity at or above the MQC)")]
    NonSmeMember(String),
    #[error("set is not a subset of the coalition's complementary players")]
    NotComplementarySubset,
    #[error("essential capacity already covers the MQC")]
    EssentialCapacityCoversMqc,
    #[error("oracle limited to {max} potential players, got {got}")]
    OracleTooLarge { got: usize, max: usize },
}

/// The optimal export decision of one coalition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionSolution {
    pub members: Coalition,
    /// Optimal exporter set `R^S`; empty when the coalition stays domestic.
    pub exporters: Coalition,
    /// Optimal commitment `m^S`; zero when not exporting.
    pub commitment: Rational,
    /// Optimal profit `v(S) ≥ 0`.
    pub value: Rational,
    /// Shortfall `(m̲ − Σ_{R^S} Qᵢ)⁺`; zero when not exporting.
    pub under_supply: Rational,
}

impl CoalitionSolution {
    fn no_export(members: Coalition) -> Self {
        CoalitionSolution {
            members,
            exporters: Coalition::EMPTY,
            commitment: Rational::zero(),
            value: Rational::zero(),
            under_supply: Rational::zero(),
        }
    }
}

/// `S^E`: essential members of `s`.
pub fn essential_members(situation: &CESituation, s: Coalition) -> Coalition {
    filter_class(situation, s, PlayerClass::Essential)
}

/// `S^P`: potential members of `s` (essential or complementary).
pub fn potential_members(situation: &CESituation, s: Coalition) -> Coalition {
    essential_members(situation, s).union(complementary_members(situation, s))
}

/// `S^C`: complementary members of `s`.
pub fn complementary_members(situation: &CESituation, s: Coalition) -> Coalition {
    filter_class(situation, s, PlayerClass::Complementary)
}

fn filter_class(situation: &CESituation, s: Coalition, class: PlayerClass) -> Coalition {
    s.iter()
        .filter(|&i| situation.classify(i) == class)
        .fold(Coalition::EMPTY, |c, i| c.insert(i))
}

fn check_range(situation: &CESituation, s: Coalition) -> Result<(), CoalitionError> {
    if s.is_subset_of(Coalition::full(situation.n())) {
        Ok(())
    } else {
        Err(CoalitionError::OutOfRange)
    }
}

fn check_sme(situation: &CESituation, s: Coalition) -> Result<(), CoalitionError> {
    for i in s.iter() {
        if !situation.is_sme(i) {
            return Err(CoalitionError::NonSmeMember(situation.players()[i].clone()));
        }
    }
    Ok(())
}

fn sum_capacity(situation: &CESituation, s: Coalition) -> Rational {
    s.iter().map(|i| situation.capacity(i).clone()).sum()
}

fn sum_delta(situation: &CESituation, s: Coalition) -> Rational {
    s.iter().map(|i| situation.delta(i)).sum()
}

/// `G^S(D)`: the contribution of complementary exporters `D` on top of the
/// essential members of `s`.
pub fn g_contribution(
    situation: &CESituation,
    s: Coalition,
    d: Coalition,
) -> Result<Rational, CoalitionError> {
    check_range(situation, s)?;
    if !d.is_subset_of(complementary_members(situation, s)) {
        return Err(CoalitionError::NotComplementarySubset);
    }
    let gap = situation.mqc() - sum_capacity(situation, essential_members(situation, s));
    if gap <= Rational::zero() {
        return Err(CoalitionError::EssentialCapacityCoversMqc);
    }
    let capacity_d = sum_capacity(situation, d);
    Ok(sum_delta(situation, d) + gap.min(capacity_d) * situation.under_penalty())
}

/// A candidate during the G / profit searches. Ties in the objective are
/// broken toward larger total exported capacity, then the smallest bitmask.
struct Best {
    objective: Rational,
    capacity: Rational,
    set: Coalition,
}

impl Best {
    fn consider(&mut self, objective: Rational, capacity: Rational, set: Coalition) {
        let better = match objective.cmp(&self.objective) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match capacity.cmp(&self.capacity) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => set < self.set,
            },
        };
        if better {
            self.objective = objective;
            self.capacity = capacity;
            self.set = set;
        }
    }
}

struct Item {
    index: usize,
    capacity: Rational,
    delta: Rational,
    delta_u: Rational,
}

/// Exhaustive maximization of `G` over all subsets of `comp`.
fn search_exhaustive(items: &[Item], gap: &Rational, penalty: &Rational) -> Best {
    let mut best = Best {
        objective: Rational::zero(),
        capacity: Rational::zero(),
        set: Coalition::EMPTY,
    };
    let mut chosen = Vec::with_capacity(items.len());
    fn recurse(
        items: &[Item],
        pos: usize,
        sum_delta: &Rational,
        sum_q: &Rational,
        chosen: &mut Vec<usize>,
        gap: &Rational,
        penalty: &Rational,
        best: &mut Best,
    ) {
        if pos == items.len() {
            let credited = gap.min(sum_q).clone();
            let g = sum_delta + credited * penalty;
            best.consider(g, sum_q.clone(), Coalition::from_indices(chosen));
            return;
        }
        chosen.push(items[pos].index);
        recurse(
            items,
            pos + 1,
            &(sum_delta + &items[pos].delta),
            &(sum_q + &items[pos].capacity),
            chosen,
            gap,
            penalty,
            best,
        );
        chosen.pop();
        recurse(items, pos + 1, sum_delta, sum_q, chosen, gap, penalty, best);
    }
    recurse(
        items,
        0,
        &Rational::zero(),
        &Rational::zero(),
        &mut chosen,
        gap,
        penalty,
        &mut best,
    );
    best
}

/// Branch-and-bound maximization of `G`, split into the two knapsack
/// regimes: capacity under the gap (maximize `Σ δᵢ` subject to
/// `Σ Qᵢ ≤ gap`) and capacity covering the gap (maximize `Σ Δᵢ`, the
/// penalty credit saturating at `gap·rᵘ`). Items are pre-sorted by
/// density `δᵢ/Qᵢ` descending. Pruning is strict-only so ties survive
/// for the deterministic tie-break.
fn search_branch_bound(items: &[Item], gap: &Rational, penalty: &Rational) -> Best {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let da = &items[a].delta_u * &items[b].capacity;
        let db = &items[b].delta_u * &items[a].capacity;
        db.cmp(&da).then(items[a].index.cmp(&items[b].index))
    });
    let sorted: Vec<&Item> = order.iter().map(|&i| &items[i]).collect();

    // suffix sums of δ for the under-gap bound (δ ≥ 0 for complementary players)
    let mut suffix_delta_u = vec![Rational::zero(); sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix_delta_u[i] = &suffix_delta_u[i + 1] + &sorted[i].delta_u;
    }

    let mut best = Best {
        objective: Rational::zero(),
        capacity: Rational::zero(),
        set: Coalition::EMPTY,
    };

    // Regime (a): Σ Q ≤ gap, G = Σ δ.
    fn under_gap(
        sorted: &[&Item],
        suffix: &[Rational],
        pos: usize,
        sum_delta_u: &Rational,
        sum_q: &Rational,
        set: Coalition,
        gap: &Rational,
        best: &mut Best,
    ) {
        best.consider(sum_delta_u.clone(), sum_q.clone(), set);
        if pos == sorted.len() {
            return;
        }
        if sum_delta_u + &suffix[pos] < best.objective {
            return;
        }
        let with_q = sum_q + &sorted[pos].capacity;
        if with_q <= *gap {
            under_gap(
                sorted,
                suffix,
                pos + 1,
                &(sum_delta_u + &sorted[pos].delta_u),
                &with_q,
                set.insert(sorted[pos].index),
                gap,
                best,
            );
        }
        under_gap(sorted, suffix, pos + 1, sum_delta_u, sum_q, set, gap, best);
    }
    under_gap(
        &sorted,
        &suffix_delta_u,
        0,
        &Rational::zero(),
        &Rational::zero(),
        Coalition::EMPTY,
        gap,
        &mut best,
    );

    // Regime (b): Σ Q ≥ gap, G = Σ Δ + gap·rᵘ. Every Δ is strictly
    // negative, so once the gap is covered no extension can tie.
    let credit = gap * penalty;
    fn over_gap(
        sorted: &[&Item],
        pos: usize,
        sum_delta: &Rational,
        sum_q: &Rational,
        set: Coalition,
        gap: &Rational,
        credit: &Rational,
        best: &mut Best,
    ) {
        if *sum_q >= *gap {
            best.consider(sum_delta + credit, sum_q.clone(), set);
            return;
        }
        if pos == sorted.len() {
            return;
        }
        if sum_delta + credit < best.objective {
            return;
        }
        over_gap(
            sorted,
            pos + 1,
            &(sum_delta + &sorted[pos].delta),
            &(sum_q + &sorted[pos].capacity),
            set.insert(sorted[pos].index),
            gap,
            credit,
            best,
        );
        over_gap(sorted, pos + 1, sum_delta, sum_q, set, gap, credit, best);
    }
    over_gap(
        &sorted,
        0,
        &Rational::zero(),
        &Rational::zero(),
        Coalition::EMPTY,
        gap,
        &credit,
        &mut best,
    );

    best
}

fn complementary_items(situation: &CESituation, comp: Coalition) -> Vec<Item> {
    comp.iter()
        .map(|i| Item {
            index: i,
            capacity: situation.capacity(i).clone(),
            delta: situation.delta(i),
            delta_u: situation.delta_u(i),
        })
        .collect()
}

fn optimal_complementary_inner(
    situation: &CESituation,
    comp: Coalition,
    gap: &Rational,
) -> (Coalition, Rational) {
    if comp.is_empty() {
        return (Coalition::EMPTY, Rational::zero());
    }
    let items = complementary_items(situation, comp);
    let best = if comp.len() as u32 <= EXHAUSTIVE_LIMIT {
        search_exhaustive(&items, gap, situation.under_penalty())
    } else {
        search_branch_bound(&items, gap, situation.under_penalty())
    };
    (best.set, best.objective)
}

/// The maximizer `D^S` of `G^S` over subsets of `S^C`, with its value.
///
/// Requires that the essential capacity of `s` falls short of the MQC
/// (otherwise no complementary player ever exports).
pub fn optimal_complementary(
    situation: &CESituation,
    s: Coalition,
) -> Result<(Coalition, Rational), CoalitionError> {
    check_range(situation, s)?;
    let ess = essential_members(situation, s);
    let gap = situation.mqc() - sum_capacity(situation, ess);
    if gap <= Rational::zero() {
        return Err(CoalitionError::EssentialCapacityCoversMqc);
    }
    Ok(optimal_complementary_inner(
        situation,
        complementary_members(situation, s),
        &gap,
    ))
}

/// Solves the export problem of coalition `s` exactly.
///
/// When exporting would net exactly zero the coalition is reported as not
/// exporting, so "exports at optimality" is a deterministic predicate.
pub fn solve_coalition(
    situation: &CESituation,
    s: Coalition,
) -> Result<CoalitionSolution, CoalitionError> {
    check_range(situation, s)?;
    check_sme(situation, s)?;
    if s.is_empty() {
        return Ok(CoalitionSolution::no_export(s));
    }
    let ess = essential_members(situation, s);
    let cap_ess = sum_capacity(situation, ess);
    let gap = situation.mqc() - &cap_ess;
    if gap <= Rational::zero() {
        // essential capacity alone covers the MQC
        let value = sum_delta(situation, ess);
        if value > Rational::zero() {
            return Ok(CoalitionSolution {
                members: s,
                exporters: ess,
                commitment: cap_ess,
                value,
                under_supply: Rational::zero(),
            });
        }
        return Ok(CoalitionSolution::no_export(s));
    }
    let (d, g) = optimal_complementary_inner(situation, complementary_members(situation, s), &gap);
    let profit_essential = sum_delta(situation, ess) - &gap * situation.under_penalty();
    let value = profit_essential + g;
    if value > Rational::zero() {
        let exporters = ess.union(d);
        let cap = sum_capacity(situation, exporters);
        let under = (situation.mqc() - &cap).max(Rational::zero());
        let commitment = situation.mqc().clone().max(cap);
        Ok(CoalitionSolution {
            members: s,
            exporters,
            commitment,
            value,
            under_supply: under,
        })
    } else {
        Ok(CoalitionSolution::no_export(s))
    }
}

/// Independent oracle: enumerate every exporter set `R ⊆ S^P` and score it
/// directly as `Σ_{R} Δᵢ − (m̲ − Σ_{R} Qᵢ)⁺·rᵘ`. Shares the tie-break of
/// [`solve_coalition`] so results compare exactly.
pub fn brute_force_coalition(
    situation: &CESituation,
    s: Coalition,
) -> Result<CoalitionSolution, CoalitionError> {
    check_range(situation, s)?;
    check_sme(situation, s)?;
    let potential = potential_members(situation, s);
    if potential.len() as u32 > ORACLE_LIMIT {
        return Err(CoalitionError::OracleTooLarge {
            got: potential.len(),
            max: ORACLE_LIMIT as usize,
        });
    }
    let items: Vec<Item> = potential
        .iter()
        .map(|i| Item {
            index: i,
            capacity: situation.capacity(i).clone(),
            delta: situation.delta(i),
            delta_u: situation.delta_u(i),
        })
        .collect();

    let mut best = Best {
        objective: Rational::zero(),
        capacity: Rational::zero(),
        set: Coalition::EMPTY,
    };
    // Seed with the no-export benchmark (profit 0), then score every
    // non-empty exporter set.
    fn recurse(
        items: &[Item],
        pos: usize,
        sum_delta: &Rational,
        sum_q: &Rational,
        set: Coalition,
        mqc: &Rational,
        penalty: &Rational,
        best: &mut Best,
    ) {
        if pos == items.len() {
            if !set.is_empty() {
                let shortfall = (mqc - sum_q).max(Rational::zero());
                let profit = sum_delta - shortfall * penalty;
                best.consider(profit, sum_q.clone(), set);
            }
            return;
        }
        recurse(
            items,
            pos + 1,
            &(sum_delta + &items[pos].delta),
            &(sum_q + &items[pos].capacity),
            set.insert(items[pos].index),
            mqc,
            penalty,
            best,
        );
        recurse(items, pos + 1, sum_delta, sum_q, set, mqc, penalty, best);
    }
    recurse(
        &items,
        0,
        &Rational::zero(),
        &Rational::zero(),
        Coalition::EMPTY,
        situation.mqc(),
        situation.under_penalty(),
        &mut best,
    );

    if best.objective > Rational::zero() {
        let under = (situation.mqc() - &best.capacity).max(Rational::zero());
        let commitment = situation.mqc().clone().max(best.capacity.clone());
        Ok(CoalitionSolution {
            members: s,
            exporters: best.set,
            commitment,
            value: best.objective,
            under_supply: under,
        })
    } else {
        Ok(CoalitionSolution::no_export(s))
    }
}
