//! The cooperative-export situation: players, capacities, costs, the
//! minimum quantity commitment (MQC), and the individual export strategies.
//!
//! A *CE-situation* describes `n` producers of a common commodity who may
//! export at unit price `p` after committing a volume to the export
//! authority. Commitments must reach the MQC `m̲`; shortfalls against the
//! commitment are penalized at `rᵘ` per unit. Two derived margins drive
//! everything downstream:
//!
//! * the full-capacity margin `Δᵢ = Qᵢ·p − cᵢ`, and
//! * the under-supply adjusted margin `δᵢ = Qᵢ·(p + rᵘ) − cᵢ`.

use crate::coalition::Coalition;
use crate::numeric::Rational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("a situation needs at least one player")]
    NoPlayers,
    #[error("duplicate player id `{0}`")]
    DuplicatePlayer(String),
    #[error("capacity of player `{0}` must be strictly positive")]
    NonPositiveCapacity(String),
    #[error("fixed cost of player `{0}` must be non-negative")]
    NegativeCost(String),
    #[error("{0} must be non-negative")]
    NegativeParameter(&'static str),
    #[error("expected one capacity and one fixed cost per player")]
    LengthMismatch,
}

/// Classification of a single player, per the margins `Δᵢ` and `δᵢ`.
///
/// SMEs (players with `Qᵢ < m̲`) split into essential (`Δᵢ ≥ 0`),
/// complementary (`Δᵢ < 0 ≤ δᵢ`) and non-potential (`δᵢ < 0`). Players
/// whose capacity reaches the MQC export alone when profitable
/// (`AlphaExporter`) and stay domestic otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayerClass {
    Essential,
    Complementary,
    NonPotential,
    AlphaExporter,
    Domestic,
}

/// Derived per-player data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerProfile {
    /// Full capacity margin `Δᵢ = Qᵢ·p − cᵢ`.
    pub delta: Rational,
    /// Under-supply adjusted margin `δᵢ = Qᵢ·(p + rᵘ) − cᵢ`.
    pub delta_u: Rational,
    pub class: PlayerClass,
}

/// One player's optimal individual export decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    /// Optimal export quantity `q*`.
    pub quantity: Rational,
    /// Optimal commitment `m*`.
    pub commitment: Rational,
    /// Optimal profit.
    pub profit: Rational,
}

impl Strategy {
    fn stay_domestic() -> Self {
        Strategy {
            quantity: Rational::zero(),
            commitment: Rational::zero(),
            profit: Rational::zero(),
        }
    }
}

/// A cooperative-export situation. Immutable after construction; every
/// operation on it is a pure function, safe to call concurrently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CESituation {
    players: Vec<String>,
    capacity: Vec<Rational>,
    fixed_cost: Vec<Rational>,
    price: Rational,
    mqc: Rational,
    under_penalty: Rational,
    over_penalty: Rational,
}

impl CESituation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        players: Vec<String>,
        capacity: Vec<Rational>,
        fixed_cost: Vec<Rational>,
        price: Rational,
        mqc: Rational,
        under_penalty: Rational,
        over_penalty: Rational,
    ) -> Result<Self, ModelError> {
        if players.is_empty() {
            return Err(ModelError::NoPlayers);
        }
        if players.len() != capacity.len() || players.len() != fixed_cost.len() {
            return Err(ModelError::LengthMismatch);
        }
        for (i, id) in players.iter().enumerate() {
            if players[..i].contains(id) {
                return Err(ModelError::DuplicatePlayer(id.clone()));
            }
        }
        for (id, q) in players.iter().zip(&capacity) {
            if *q <= Rational::zero() {
                return Err(ModelError::NonPositiveCapacity(id.clone()));
            }
        }
        for (id, c) in players.iter().zip(&fixed_cost) {
            if *c < Rational::zero() {
                return Err(ModelError::NegativeCost(id.clone()));
            }
        }
        if price < Rational::zero() {
            return Err(ModelError::NegativeParameter("price"));
        }
        if mqc < Rational::zero() {
            return Err(ModelError::NegativeParameter("mqc"));
        }
        if under_penalty < Rational::zero() {
            return Err(ModelError::NegativeParameter("under_penalty"));
        }
        if over_penalty < Rational::zero() {
            return Err(ModelError::NegativeParameter("over_penalty"));
        }
        Ok(CESituation {
            players,
            capacity,
            fixed_cost,
            price,
            mqc,
            under_penalty,
            over_penalty,
        })
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_index(&self, id: &str) -> Option<usize> {
        self.players.iter().position(|p| p == id)
    }

    pub fn capacity(&self, i: usize) -> &Rational {
        &self.capacity[i]
    }

    pub fn fixed_cost(&self, i: usize) -> &Rational {
        &self.fixed_cost[i]
    }

    pub fn price(&self) -> &Rational {
        &self.price
    }

    pub fn mqc(&self) -> &Rational {
        &self.mqc
    }

    pub fn under_penalty(&self) -> &Rational {
        &self.under_penalty
    }

    pub fn over_penalty(&self) -> &Rational {
        &self.over_penalty
    }

    /// `Δᵢ = Qᵢ·p − cᵢ`
    pub fn delta(&self, i: usize) -> Rational {
        &self.capacity[i] * &self.price - &self.fixed_cost[i]
    }

    /// `δᵢ = Qᵢ·(p + rᵘ) − cᵢ`
    pub fn delta_u(&self, i: usize) -> Rational {
        &self.capacity[i] * (&self.price + &self.under_penalty) - &self.fixed_cost[i]
    }

    /// Whether player `i` is an SME, i.e. `Qᵢ < m̲`.
    pub fn is_sme(&self, i: usize) -> bool {
        self.capacity[i] < self.mqc
    }

    /// Whether every player is an SME. The cooperative game is defined
    /// only over all-SME situations.
    pub fn all_sme(&self) -> bool {
        (0..self.n()).all(|i| self.is_sme(i))
    }

    pub fn classify(&self, i: usize) -> PlayerClass {
        let delta = self.delta(i);
        if self.is_sme(i) {
            if delta >= Rational::zero() {
                PlayerClass::Essential
            } else if self.delta_u(i) >= Rational::zero() {
                PlayerClass::Complementary
            } else {
                PlayerClass::NonPotential
            }
        } else if delta >= Rational::zero() {
            PlayerClass::AlphaExporter
        } else {
            PlayerClass::Domestic
        }
    }

    /// Margins and classification for every player.
    pub fn profiles(&self) -> Vec<PlayerProfile> {
        (0..self.n())
            .map(|i| PlayerProfile {
                delta: self.delta(i),
                delta_u: self.delta_u(i),
                class: self.classify(i),
            })
            .collect()
    }

    /// Non-fatal diagnostics about the instance data.
    ///
    /// The over-supply penalty is stored but never enters the optimization:
    /// committing less than one exports is excluded from the strategy
    /// space. When `rᵒ < p` over-supplying would in principle be
    /// profitable, so we flag it.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.over_penalty < self.price {
            out.push(format!(
                "over_penalty ({}) is below price ({}); over-supply strategies are outside the model and never considered",
                crate::numeric::format_exact(&self.over_penalty),
                crate::numeric::format_exact(&self.price),
            ));
        }
        out
    }

    /// The sub-situation on the members of `coalition`, preserving player
    /// order.
    pub fn restrict(&self, coalition: Coalition) -> CESituation {
        let idx: Vec<usize> = coalition.iter().collect();
        CESituation {
            players: idx.iter().map(|&i| self.players[i].clone()).collect(),
            capacity: idx.iter().map(|&i| self.capacity[i].clone()).collect(),
            fixed_cost: idx.iter().map(|&i| self.fixed_cost[i].clone()).collect(),
            price: self.price.clone(),
            mqc: self.mqc.clone(),
            under_penalty: self.under_penalty.clone(),
            over_penalty: self.over_penalty.clone(),
        }
    }
}

/// Optimal individual strategy when no MQC applies (`m̲ = 0`): export full
/// capacity whenever the full-capacity margin is non-negative.
pub fn individual_strategy_no_mqc(situation: &CESituation, i: usize) -> Strategy {
    let delta = situation.delta(i);
    if delta >= Rational::zero() {
        Strategy {
            quantity: situation.capacity[i].clone(),
            commitment: situation.capacity[i].clone(),
            profit: delta,
        }
    } else {
        Strategy::stay_domestic()
    }
}

/// Optimal individual strategy under the situation's MQC.
///
/// Large players (`Qᵢ ≥ m̲`) behave as without an MQC. SMEs must commit
/// the full MQC and eat the under-supply penalty, which is worthwhile
/// exactly when `δᵢ − m̲·rᵘ ≥ 0`. With `m̲ = 0` this degenerates to
/// [`individual_strategy_no_mqc`].
pub fn individual_strategy_mqc(situation: &CESituation, i: usize) -> Strategy {
    let delta = situation.delta(i);
    if !situation.is_sme(i) {
        if delta >= Rational::zero() {
            return Strategy {
                quantity: situation.capacity[i].clone(),
                commitment: situation.capacity[i].clone(),
                profit: delta,
            };
        }
        return Strategy::stay_domestic();
    }
    let profit = situation.delta_u(i) - situation.mqc() * situation.under_penalty();
    if profit >= Rational::zero() {
        Strategy {
            quantity: situation.capacity[i].clone(),
            commitment: situation.mqc.clone(),
            profit,
        }
    } else {
        Strategy::stay_domestic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn three_sme() -> CESituation {
        // Q = (14, 33, 21), c = (15, 7, 23), p = 21, m̲ = 61, rᵘ = 10
        CESituation::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![int(14), int(33), int(21)],
            vec![int(15), int(7), int(23)],
            int(21),
            int(61),
            int(10),
            int(0),
        )
        .unwrap()
    }

    fn four_with_complementary() -> CESituation {
        // Q = (10, 15, 15, 30), c = (1, 25, 25, 200), p = 6, m̲ = 50, rᵘ = 5
        CESituation::new(
            vec!["1".into(), "2".into(), "3".into(), "4".into()],
            vec![int(10), int(15), int(15), int(30)],
            vec![int(1), int(25), int(25), int(200)],
            int(6),
            int(50),
            int(5),
            int(0),
        )
        .unwrap()
    }

    #[test]
    fn margins_and_classes() {
        let sit = three_sme();
        let profiles = sit.profiles();
        let deltas: Vec<_> = profiles.iter().map(|p| p.delta.clone()).collect();
        assert_eq!(deltas, vec![int(279), int(686), int(418)]);
        assert!(profiles.iter().all(|p| p.class == PlayerClass::Essential));
    }

    #[test]
    fn complementary_classification() {
        let sit = four_with_complementary();
        let p4 = &sit.profiles()[3];
        assert_eq!(p4.delta, int(-20));
        assert_eq!(p4.delta_u, int(130));
        assert_eq!(p4.class, PlayerClass::Complementary);
    }

    #[test]
    fn zero_margin_is_essential() {
        // cᵢ = Qᵢ·p puts Δᵢ exactly at 0
        let sit = CESituation::new(
            vec!["a".into()],
            vec![int(4)],
            vec![int(12)],
            int(3),
            int(10),
            int(1),
            int(0),
        )
        .unwrap();
        assert_eq!(sit.delta(0), int(0));
        assert_eq!(sit.classify(0), PlayerClass::Essential);
    }

    #[test]
    fn non_sme_classes() {
        let sit = CESituation::new(
            vec!["big".into(), "lossy".into()],
            vec![int(20), int(20)],
            vec![int(5), int(100)],
            int(2),
            int(10),
            int(1),
            int(0),
        )
        .unwrap();
        assert_eq!(sit.classify(0), PlayerClass::AlphaExporter);
        assert_eq!(sit.classify(1), PlayerClass::Domestic);
        assert!(!sit.all_sme());
    }

    #[test]
    fn strategy_without_mqc() {
        let sit = three_sme();
        let s = individual_strategy_no_mqc(&sit, 1);
        assert_eq!(s, Strategy { quantity: int(33), commitment: int(33), profit: int(686) });
        // Δ < 0 stays home
        let sit2 = four_with_complementary();
        assert_eq!(individual_strategy_no_mqc(&sit2, 3), Strategy::stay_domestic());
    }

    #[test]
    fn strategy_without_mqc_zero_margin_exports() {
        let sit = CESituation::new(
            vec!["a".into()],
            vec![int(4)],
            vec![int(12)],
            int(3),
            int(0),
            int(1),
            int(0),
        )
        .unwrap();
        let s = individual_strategy_no_mqc(&sit, 0);
        assert_eq!(s.quantity, int(4));
        assert_eq!(s.profit, int(0));
    }

    #[test]
    fn strategy_under_mqc() {
        let sit = three_sme();
        // player 2: δ₂ = 1016, m̲·rᵘ = 610 → exports at commitment 61
        let s = individual_strategy_mqc(&sit, 1);
        assert_eq!(s, Strategy { quantity: int(33), commitment: int(61), profit: int(406) });
        // player 1: δ₁ = 419 < 610 → domestic
        assert_eq!(individual_strategy_mqc(&sit, 0), Strategy::stay_domestic());
    }

    #[test]
    fn strategy_under_mqc_unprofitable_sme() {
        let sit = four_with_complementary();
        // player 3: δ₃ = 140 < m̲·rᵘ = 250
        assert_eq!(individual_strategy_mqc(&sit, 2), Strategy::stay_domestic());
    }

    #[test]
    fn degenerate_mqc_agrees_with_no_mqc() {
        let sit = CESituation::new(
            vec!["x".into(), "y".into()],
            vec![int(5), int(7)],
            vec![int(3), int(100)],
            int(2),
            int(0),
            int(4),
            int(0),
        )
        .unwrap();
        for i in 0..sit.n() {
            assert_eq!(
                individual_strategy_mqc(&sit, i),
                individual_strategy_no_mqc(&sit, i)
            );
        }
    }

    #[test]
    fn margin_identity() {
        let sit = four_with_complementary();
        for i in 0..sit.n() {
            assert_eq!(
                sit.delta_u(i) - sit.delta(i),
                sit.capacity(i) * sit.under_penalty()
            );
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            CESituation::new(vec![], vec![], vec![], int(1), int(1), int(1), int(0)),
            Err(ModelError::NoPlayers)
        ));
        assert!(matches!(
            CESituation::new(
                vec!["a".into(), "a".into()],
                vec![int(1), int(2)],
                vec![int(0), int(0)],
                int(1),
                int(5),
                int(1),
                int(0)
            ),
            Err(ModelError::DuplicatePlayer(_))
        ));
        assert!(matches!(
            CESituation::new(
                vec!["a".into()],
                vec![int(0)],
                vec![int(0)],
                int(1),
                int(5),
                int(1),
                int(0)
            ),
            Err(ModelError::NonPositiveCapacity(_))
        ));
        assert!(matches!(
            CESituation::new(
                vec!["a".into()],
                vec![int(2)],
                vec![int(0)],
                rat(-1, 2),
                int(5),
                int(1),
                int(0)
            ),
            Err(ModelError::NegativeParameter("price"))
        ));
    }

    #[test]
    fn warns_when_over_penalty_below_price() {
        let sit = three_sme();
        assert_eq!(sit.warnings().len(), 1);
        let ok = CESituation::new(
            vec!["a".into()],
            vec![int(2)],
            vec![int(0)],
            int(3),
            int(5),
            int(1),
            int(3),
        )
        .unwrap();
        assert!(ok.warnings().is_empty());
    }
}
