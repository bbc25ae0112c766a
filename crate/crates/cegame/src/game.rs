//! The cooperative export game `(N, v)`: the characteristic function over
//! all `2^n` coalitions, plus the structural checks (superadditivity,
//! monotonicity, convexity) used as test predicates.

use crate::coalition::{
    complementary_members, essential_members, potential_members, solve_coalition, Coalition,
    CoalitionError, CoalitionSolution,
};
use crate::model::CESituation;
use crate::numeric::Rational;
use thiserror::Error;

/// Full-table enumeration guard. Larger situations can still be evaluated
/// coalition by coalition through [`coalition_value`].
pub const MAX_TABLE_PLAYERS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error(transparent)]
    Coalition(#[from] CoalitionError),
    #[error("full game tables support up to {max} players, got {got}")]
    TooManyPlayers { got: usize, max: usize },
}

/// A game built from a situation: one [`CoalitionSolution`] per bitmask.
#[derive(Debug, Clone)]
pub struct CEGame {
    situation: CESituation,
    solutions: Vec<CoalitionSolution>,
}

/// Lazy single-coalition evaluation, for situations too large for the
/// full table.
pub fn coalition_value(situation: &CESituation, s: Coalition) -> Result<Rational, GameError> {
    Ok(solve_coalition(situation, s)?.value)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperadditivityViolation {
    pub left: Coalition,
    pub right: Coalition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub smaller: Coalition,
    pub larger: Coalition,
}

/// A pair `S ⊆ T` on which player `i`'s marginal contribution decreases,
/// i.e. `v(S∪{i}) − v(S) > v(T∪{i}) − v(T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexityWitness {
    pub player: usize,
    pub smaller: Coalition,
    pub larger: Coalition,
    pub margin_smaller: Rational,
    pub margin_larger: Rational,
}

impl CEGame {
    /// Solves every coalition of an all-SME situation.
    pub fn build(situation: CESituation) -> Result<CEGame, GameError> {
        let n = situation.n();
        if n > MAX_TABLE_PLAYERS {
            return Err(GameError::TooManyPlayers { got: n, max: MAX_TABLE_PLAYERS });
        }
        for i in 0..n {
            if !situation.is_sme(i) {
                return Err(CoalitionError::NonSmeMember(situation.players()[i].clone()).into());
            }
        }
        let mut solutions = Vec::with_capacity(1usize << n);
        for bits in 0..(1u32 << n) {
            solutions.push(solve_coalition(&situation, Coalition::from_bits(bits))?);
        }
        Ok(CEGame { situation, solutions })
    }

    pub fn situation(&self) -> &CESituation {
        &self.situation
    }

    pub fn n(&self) -> usize {
        self.situation.n()
    }

    pub fn grand(&self) -> Coalition {
        Coalition::full(self.n())
    }

    pub fn solution(&self, s: Coalition) -> &CoalitionSolution {
        &self.solutions[s.bits() as usize]
    }

    /// `v(S)`.
    pub fn value(&self, s: Coalition) -> &Rational {
        &self.solution(s).value
    }

    pub fn grand_value(&self) -> &Rational {
        self.value(self.grand())
    }

    /// `N^E`: essential players of the grand coalition.
    pub fn essential(&self) -> Coalition {
        essential_members(&self.situation, self.grand())
    }

    /// `N^P`.
    pub fn potential(&self) -> Coalition {
        potential_members(&self.situation, self.grand())
    }

    /// `N^C`.
    pub fn complementary(&self) -> Coalition {
        complementary_members(&self.situation, self.grand())
    }

    /// `R^N`: the optimal exporter set of the grand coalition.
    pub fn grand_exporters(&self) -> Coalition {
        self.solution(self.grand()).exporters
    }

    /// `D^N = R^N ∖ N^E`: complementary players who export in the grand
    /// coalition.
    pub fn complementary_exporters(&self) -> Coalition {
        self.grand_exporters().difference(self.essential())
    }

    /// Exhaustive superadditivity check: `v(S∪T) ≥ v(S) + v(T)` for every
    /// disjoint pair. Returns the first violating pair, if any.
    pub fn check_superadditive(&self) -> Option<SuperadditivityViolation> {
        let full = self.grand().bits();
        for s in 1..=full {
            for t in 1..=full {
                if s & t != 0 {
                    continue;
                }
                let (cs, ct) = (Coalition::from_bits(s), Coalition::from_bits(t));
                if self.value(cs.union(ct)) < &(self.value(cs) + self.value(ct)) {
                    return Some(SuperadditivityViolation { left: cs, right: ct });
                }
            }
        }
        None
    }

    /// Exhaustive monotonicity check: `v(S) ≤ v(T)` for every `S ⊆ T`.
    pub fn check_monotone(&self) -> Option<MonotonicityViolation> {
        let full = self.grand().bits();
        for t in 0..=full {
            let ct = Coalition::from_bits(t);
            for cs in ct.subsets() {
                if self.value(cs) > self.value(ct) {
                    return Some(MonotonicityViolation { smaller: cs, larger: ct });
                }
            }
        }
        None
    }

    /// Convexity check: marginal contributions must be monotone in the
    /// coalition. Returns the first witness of failure.
    pub fn check_convex(&self) -> Option<ConvexityWitness> {
        let n = self.n();
        for i in 0..n {
            let rest = self.grand().remove(i);
            for t in rest.subsets() {
                let margin_larger = self.value(t.insert(i)) - self.value(t);
                for s in t.subsets() {
                    let margin_smaller = self.value(s.insert(i)) - self.value(s);
                    if margin_smaller > margin_larger {
                        return Some(ConvexityWitness {
                            player: i,
                            smaller: s,
                            larger: t,
                            margin_smaller,
                            margin_larger,
                        });
                    }
                }
            }
        }
        None
    }

    /// The restriction of the game to coalition `t`, re-indexed over `t`'s
    /// members in situation order. Copies solutions from the parent table
    /// rather than re-solving.
    pub fn subgame(&self, t: Coalition) -> Result<CEGame, GameError> {
        if !t.is_subset_of(self.grand()) {
            return Err(CoalitionError::OutOfRange.into());
        }
        let positions: Vec<usize> = t.iter().collect();
        let k = positions.len();
        let remap = |parent: Coalition| -> Coalition {
            positions
                .iter()
                .enumerate()
                .filter(|(_, &p)| parent.contains(p))
                .fold(Coalition::EMPTY, |c, (j, _)| c.insert(j))
        };
        let mut solutions = Vec::with_capacity(1usize << k);
        for bits in 0..(1u32 << k) {
            let parent_mask = Coalition::from_bits(bits)
                .iter()
                .fold(Coalition::EMPTY, |c, j| c.insert(positions[j]));
            let parent = self.solution(parent_mask);
            solutions.push(CoalitionSolution {
                members: Coalition::from_bits(bits),
                exporters: remap(parent.exporters),
                commitment: parent.commitment.clone(),
                value: parent.value.clone(),
                under_supply: parent.under_supply.clone(),
            });
        }
        Ok(CEGame { situation: self.situation.restrict(t), solutions })
    }
}
