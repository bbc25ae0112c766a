//! Gain-sharing rules and core-stability certificates.
//!
//! The NEA rule splits `v(N)` among essential players proportionally to
//! their full-capacity margins and is always in the core. The
//! δ-proportional rule pays every grand-coalition exporter proportionally
//! to `δᵢ` but can leave the core. The two essential-rate rules tax the
//! essential players — a flat amount `ρ` each (egalitarian) or a fraction
//! `ρ` of their NEA share (proportional) — and hand the proceeds to the
//! complementary exporters `D^N`; the maximal stable `ρ` comes from a
//! restricted coalition search that this module performs exactly.

use crate::coalition::Coalition;
use crate::game::CEGame;
use crate::numeric::Rational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AllocationError {
    #[error("payoff vector has wrong length")]
    WrongLength,
    #[error("the game has no essential players")]
    NoEssentialPlayers,
    #[error("no complementary player exports in the grand coalition")]
    NoComplementaryExporters,
    #[error("weights must be non-negative with at least one positive entry on D^N")]
    InvalidWeights,
    #[error("rate must satisfy {0}")]
    InvalidRate(&'static str),
    #[error("no proper coalition qualifies for the search")]
    NoCandidates,
}

/// Which rule produced an [`Allocation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllocationRule {
    Nea,
    DeltaProportional,
    EgalitarianRate(Rational),
    ProportionalRate(Rational),
    Nucleolus,
    Custom,
}

impl AllocationRule {
    pub fn name(&self) -> &'static str {
        match self {
            AllocationRule::Nea => "nea",
            AllocationRule::DeltaProportional => "delta",
            AllocationRule::EgalitarianRate(_) => "egal",
            AllocationRule::ProportionalRate(_) => "prop",
            AllocationRule::Nucleolus => "nucleolus",
            AllocationRule::Custom => "custom",
        }
    }
}

/// A payoff vector over the situation's players, tagged with its rule and
/// the weight system used (when one applies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub payoffs: Vec<Rational>,
    pub rule: AllocationRule,
    /// The α-weights over `D^N` that were used, when the rule has any.
    pub weights: Option<Vec<Rational>>,
}

impl Allocation {
    pub fn custom(payoffs: Vec<Rational>) -> Allocation {
        Allocation { payoffs, rule: AllocationRule::Custom, weights: None }
    }

    pub fn total(&self) -> Rational {
        self.payoffs.iter().sum()
    }

    /// Indices of players with a negative payoff (possible for the
    /// egalitarian rate rule at large `ρ`, even inside the stable range).
    pub fn negative_components(&self) -> Vec<usize> {
        self.payoffs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_negative())
            .map(|(i, _)| i)
            .collect()
    }
}

/// The excess `e(S, x) = Σ_{i∈S} xᵢ − v(S)` of coalition `S` at payoffs `x`.
pub fn excess(game: &CEGame, s: Coalition, payoffs: &[Rational]) -> Rational {
    let sum: Rational = s.iter().map(|i| payoffs[i].clone()).sum();
    sum - game.value(s)
}

/// Outcome of an exhaustive core check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreCheck {
    pub in_core: bool,
    /// Whether `Σ xᵢ = v(N)` exactly.
    pub efficient: bool,
    /// The proper coalition with the smallest excess (ties broken toward
    /// the smallest bitmask); `None` only for single-player games.
    pub worst_coalition: Option<Coalition>,
    pub worst_excess: Option<Rational>,
}

/// Checks efficiency and all `2^n − 2` proper-coalition constraints
/// exactly.
pub fn in_core(game: &CEGame, payoffs: &[Rational]) -> CoreCheck {
    assert_eq!(payoffs.len(), game.n(), "payoff vector length mismatch");
    let full = game.grand().bits();
    let efficient = excess(game, game.grand(), payoffs).is_zero();
    let mut worst: Option<(Coalition, Rational)> = None;
    for bits in 1..full {
        let s = Coalition::from_bits(bits);
        let e = excess(game, s, payoffs);
        match &worst {
            Some((_, w)) if *w <= e => {}
            _ => worst = Some((s, e)),
        }
    }
    let stable = worst.as_ref().map_or(true, |(_, e)| !e.is_negative());
    CoreCheck {
        in_core: efficient && stable,
        efficient,
        worst_coalition: worst.as_ref().map(|(s, _)| *s),
        worst_excess: worst.map(|(_, e)| e),
    }
}

/// The NEA rule: essential players share `v(N)` proportionally to `Δᵢ`,
/// everyone else receives zero.
///
/// When the essential margins sum to zero the whole surplus is zero as
/// well, and the rule degenerates to the zero vector.
pub fn nea(game: &CEGame) -> Allocation {
    let n = game.n();
    let mut payoffs = vec![Rational::zero(); n];
    let essential = game.essential();
    let total: Rational = essential.iter().map(|i| game.situation().delta(i)).sum();
    if !total.is_zero() {
        let v_n = game.grand_value();
        for i in essential.iter() {
            payoffs[i] = game.situation().delta(i) / &total * v_n;
        }
    }
    Allocation { payoffs, rule: AllocationRule::Nea, weights: None }
}

/// The δ-proportional rule: exporters of the grand coalition share `v(N)`
/// proportionally to `δᵢ`. Not guaranteed to be in the core.
pub fn delta_proportional(game: &CEGame) -> Allocation {
    let n = game.n();
    let mut payoffs = vec![Rational::zero(); n];
    let exporters = game.grand_exporters();
    let total: Rational = exporters.iter().map(|i| game.situation().delta_u(i)).sum();
    if !total.is_zero() {
        let v_n = game.grand_value();
        for i in exporters.iter() {
            payoffs[i] = game.situation().delta_u(i) / &total * v_n;
        }
    }
    Allocation { payoffs, rule: AllocationRule::DeltaProportional, weights: None }
}

/// Result of one of the restricted coalition searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionSearchResult {
    pub coalition: Coalition,
    /// The minimized criterion value at `coalition`.
    pub criterion: Rational,
    /// Every candidate that was examined.
    pub candidates: Vec<Coalition>,
}

/// Finds `Ŝ`, the proper coalition minimizing `e(S, φ)/|S^E|`, over the
/// restricted candidate family: every `N∖{i}`, plus `(N∖N^E)∪{i*}` for the
/// essential players `i*` of minimal `Δ`.
pub fn min_excess_per_essential(
    game: &CEGame,
    phi: &[Rational],
) -> Result<CoalitionSearchResult, AllocationError> {
    if phi.len() != game.n() {
        return Err(AllocationError::WrongLength);
    }
    let essential = game.essential();
    if essential.is_empty() {
        return Err(AllocationError::NoEssentialPlayers);
    }
    let grand = game.grand();
    let mut candidates: Vec<Coalition> = (0..game.n()).map(|i| grand.remove(i)).collect();
    let min_delta = essential
        .iter()
        .map(|i| game.situation().delta(i))
        .min()
        .expect("essential set is non-empty");
    let non_essential = grand.difference(essential);
    for i in essential.iter() {
        if game.situation().delta(i) == min_delta {
            candidates.push(non_essential.insert(i));
        }
    }
    candidates.retain(|s| {
        !s.is_empty()
            && *s != grand
            && !crate::coalition::essential_members(game.situation(), *s).is_empty()
    });
    candidates.sort();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(AllocationError::NoCandidates);
    }
    let mut best: Option<(Coalition, Rational)> = None;
    for &s in &candidates {
        let count = crate::coalition::essential_members(game.situation(), s).len() as i64;
        let ratio = excess(game, s, phi) / crate::numeric::int(count);
        match &best {
            Some((_, b)) if *b <= ratio => {}
            _ => best = Some((s, ratio)),
        }
    }
    let (coalition, criterion) = best.expect("candidates verified non-empty");
    Ok(CoalitionSearchResult { coalition, criterion, candidates })
}

/// Finds `Š`, minimizing `e(N∖{i}, φ) / Σ_{j∈N∖{i}} φⱼ` over `i ∈ N`.
///
/// Dropping an essential player is the classic candidate shape; dropping a
/// non-exporting player must also be examined (there the ratio collapses
/// to zero, since `v(N∖{i}) = v(N)`), or the minimum over all proper
/// coalitions with essential members can be missed. Candidates without
/// essential members or whose NEA payoff sum is zero are skipped; when
/// all are, the search refuses.
pub fn min_excess_ratio(
    game: &CEGame,
    phi: &[Rational],
) -> Result<CoalitionSearchResult, AllocationError> {
    if phi.len() != game.n() {
        return Err(AllocationError::WrongLength);
    }
    let essential = game.essential();
    if essential.is_empty() {
        return Err(AllocationError::NoEssentialPlayers);
    }
    let grand = game.grand();
    let mut candidates = Vec::new();
    let mut best: Option<(Coalition, Rational)> = None;
    for i in grand.iter() {
        let s = grand.remove(i);
        if s.is_empty() || crate::coalition::essential_members(game.situation(), s).is_empty() {
            continue;
        }
        let denom: Rational = s.iter().map(|j| phi[j].clone()).sum();
        if denom.is_zero() {
            continue;
        }
        candidates.push(s);
        let ratio = excess(game, s, phi) / denom;
        let replace = match &best {
            Some((bs, b)) => ratio < *b || (ratio == *b && s < *bs),
            None => true,
        };
        if replace {
            best = Some((s, ratio));
        }
    }
    candidates.sort();
    match best {
        Some((coalition, criterion)) => Ok(CoalitionSearchResult { coalition, criterion, candidates }),
        None => Err(AllocationError::NoCandidates),
    }
}

fn validated_weights(
    game: &CEGame,
    alpha: Option<&[Rational]>,
) -> Result<Vec<Rational>, AllocationError> {
    let d = game.complementary_exporters();
    let weights: Vec<Rational> = match alpha {
        Some(w) => {
            if w.len() != game.n() {
                return Err(AllocationError::WrongLength);
            }
            w.to_vec()
        }
        // default: αᵢ = δᵢ on D^N
        None => (0..game.n())
            .map(|i| {
                if d.contains(i) {
                    game.situation().delta_u(i)
                } else {
                    Rational::zero()
                }
            })
            .collect(),
    };
    let mut any_positive = false;
    for i in d.iter() {
        if weights[i].is_negative() {
            return Err(AllocationError::InvalidWeights);
        }
        if weights[i] > Rational::zero() {
            any_positive = true;
        }
    }
    if !any_positive {
        return Err(AllocationError::InvalidWeights);
    }
    Ok(weights)
}

/// The maximal stable flat tax `ρ^E`: the smaller of the `Ŝ` search bound
/// and the level at which complementary exporters would match their
/// δ-proportional shares.
pub fn rho_egalitarian(game: &CEGame) -> Result<Rational, AllocationError> {
    let d = game.complementary_exporters();
    if d.is_empty() {
        return Err(AllocationError::NoComplementaryExporters);
    }
    let phi = nea(game);
    let search = min_excess_per_essential(game, &phi.payoffs)?;
    let delta_d: Rational = d.iter().map(|i| game.situation().delta_u(i)).sum();
    let delta_r: Rational = game
        .grand_exporters()
        .iter()
        .map(|i| game.situation().delta_u(i))
        .sum();
    let essential_count = crate::numeric::int(game.essential().len() as i64);
    let matching = game.grand_value() * delta_d / (essential_count * delta_r);
    Ok(search.criterion.min(matching))
}

/// The maximal stable proportional tax `ρ^P ∈ [0, 1)`.
pub fn rho_proportional(game: &CEGame) -> Result<Rational, AllocationError> {
    let d = game.complementary_exporters();
    if d.is_empty() {
        return Err(AllocationError::NoComplementaryExporters);
    }
    let phi = nea(game);
    let search = min_excess_ratio(game, &phi.payoffs)?;
    let delta_d: Rational = d.iter().map(|i| game.situation().delta_u(i)).sum();
    let delta_r: Rational = game
        .grand_exporters()
        .iter()
        .map(|i| game.situation().delta_u(i))
        .sum();
    Ok(search.criterion.min(delta_d / delta_r))
}

/// The egalitarian essential-rate rule `ψ^ρ`: every essential player pays
/// a flat `ρ`, and the pot `|N^E|·ρ` goes to `D^N` in proportion to `α`.
pub fn egalitarian_rate(
    game: &CEGame,
    rho: &Rational,
    alpha: Option<&[Rational]>,
) -> Result<Allocation, AllocationError> {
    if rho.is_negative() {
        return Err(AllocationError::InvalidRate("0 ≤ ρ"));
    }
    let d = game.complementary_exporters();
    if d.is_empty() {
        return Err(AllocationError::NoComplementaryExporters);
    }
    let weights = validated_weights(game, alpha)?;
    let phi = nea(game);
    let essential = game.essential();
    let pot = crate::numeric::int(essential.len() as i64) * rho;
    let weight_sum: Rational = d.iter().map(|i| weights[i].clone()).sum();
    let mut payoffs = phi.payoffs;
    for i in essential.iter() {
        payoffs[i] -= rho;
    }
    for i in d.iter() {
        payoffs[i] = &weights[i] / &weight_sum * &pot;
    }
    Ok(Allocation {
        payoffs,
        rule: AllocationRule::EgalitarianRate(rho.clone()),
        weights: Some(weights),
    })
}

/// The proportional essential-rate rule `φ^ρ`: essential players keep a
/// `(1 − ρ)` fraction of their NEA share, and `ρ·v(N)` goes to `D^N` in
/// proportion to `α`.
pub fn proportional_rate(
    game: &CEGame,
    rho: &Rational,
    alpha: Option<&[Rational]>,
) -> Result<Allocation, AllocationError> {
    if rho.is_negative() || *rho >= crate::numeric::int(1) {
        return Err(AllocationError::InvalidRate("0 ≤ ρ < 1"));
    }
    let d = game.complementary_exporters();
    if d.is_empty() {
        return Err(AllocationError::NoComplementaryExporters);
    }
    let weights = validated_weights(game, alpha)?;
    let phi = nea(game);
    let essential = game.essential();
    let pot = rho * game.grand_value();
    let weight_sum: Rational = d.iter().map(|i| weights[i].clone()).sum();
    let one = crate::numeric::int(1);
    let mut payoffs = phi.payoffs;
    for i in essential.iter() {
        payoffs[i] *= &one - rho;
    }
    for i in d.iter() {
        payoffs[i] = &weights[i] / &weight_sum * &pot;
    }
    Ok(Allocation {
        payoffs,
        rule: AllocationRule::ProportionalRate(rho.clone()),
        weights: Some(weights),
    })
}
