//! Deterministic random instance generation for property suites and the
//! `gen` subcommand.
//!
//! Instances are always all-SME (every capacity strictly below the MQC)
//! and are drawn from small integer/half-integer grids so the exact
//! solvers stay fast. The same `(n, seed, profile)` triple always yields
//! the same situation.

use crate::model::CESituation;
use crate::numeric::{int, rat, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Random mix of classes with at least one essential player.
    Mixed,
    /// Mostly essential players.
    EssentialHeavy,
    /// At least half of the players complementary.
    ComplementaryHeavy,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Mixed => "mixed",
            Profile::EssentialHeavy => "essential-heavy",
            Profile::ComplementaryHeavy => "complementary-heavy",
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mixed" => Ok(Profile::Mixed),
            "essential-heavy" => Ok(Profile::EssentialHeavy),
            "complementary-heavy" => Ok(Profile::ComplementaryHeavy),
            other => Err(format!(
                "unknown profile `{other}` (expected mixed, essential-heavy or complementary-heavy)"
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Essential,
    Complementary,
    NonPotential,
}

/// Generates a deterministic pseudo-random all-SME situation.
pub fn generate(n: usize, seed: u64, profile: Profile) -> CESituation {
    assert!(n >= 1, "need at least one player");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let price_halves: i64 = rng.random_range(2..=24); // p ∈ [1, 12], maybe half-integer
    let price = rat(price_halves, 2);
    let under_penalty = int(rng.random_range(1..=8));

    let capacities: Vec<i64> = (0..n).map(|_| rng.random_range(1..=30)).collect();
    let max_q = *capacities.iter().max().expect("n >= 1");
    // MQC strictly above every capacity, occasionally half-integer
    let mqc_halves = 2 * (max_q + rng.random_range(1..=20)) + i64::from(rng.random_bool(0.3));
    let mqc = rat(mqc_halves, 2);

    let mut targets: Vec<Target> = (0..n)
        .map(|_| {
            let roll: f64 = rng.random();
            match profile {
                Profile::Mixed => {
                    if roll < 0.5 {
                        Target::Essential
                    } else if roll < 0.8 {
                        Target::Complementary
                    } else {
                        Target::NonPotential
                    }
                }
                Profile::EssentialHeavy => {
                    if roll < 0.8 {
                        Target::Essential
                    } else if roll < 0.95 {
                        Target::Complementary
                    } else {
                        Target::NonPotential
                    }
                }
                Profile::ComplementaryHeavy => {
                    if roll < 0.3 {
                        Target::Essential
                    } else if roll < 0.9 {
                        Target::Complementary
                    } else {
                        Target::NonPotential
                    }
                }
            }
        })
        .collect();

    match profile {
        Profile::Mixed | Profile::EssentialHeavy => {
            if !targets.contains(&Target::Essential) {
                let at = rng.random_range(0..n);
                targets[at] = Target::Essential;
            }
        }
        Profile::ComplementaryHeavy => {
            let needed = n.div_ceil(2);
            let mut have = targets.iter().filter(|t| **t == Target::Complementary).count();
            while have < needed {
                let at = rng.random_range(0..n);
                if targets[at] != Target::Complementary {
                    targets[at] = Target::Complementary;
                    have += 1;
                }
            }
        }
    }

    let costs: Vec<Rational> = capacities
        .iter()
        .zip(&targets)
        .map(|(&q, target)| {
            let q = int(q);
            let full_margin_cost = &q * &price; // c at which Δ = 0
            let adjusted_cost = &q * (&price + &under_penalty); // c at which δ = 0
            match target {
                Target::Essential => {
                    // c ∈ [0, Q·p] in half-integer steps
                    let hi = double(&full_margin_cost);
                    rat(rng.random_range(0..=hi), 2)
                }
                Target::Complementary => {
                    // c ∈ (Q·p, Q·(p + rᵘ)] in half-integer steps
                    let lo = double(&full_margin_cost);
                    let hi = double(&adjusted_cost);
                    rat(rng.random_range(lo + 1..=hi), 2)
                }
                Target::NonPotential => {
                    let lo = double(&adjusted_cost);
                    rat(rng.random_range(lo + 1..=lo + 60), 2)
                }
            }
        })
        .collect();

    let over_penalty = &price + int(rng.random_range(0..=4));
    let situation = CESituation::new(
        (1..=n).map(|i| i.to_string()).collect(),
        capacities.into_iter().map(int).collect(),
        costs,
        price,
        mqc,
        under_penalty,
        over_penalty,
    )
    .expect("generated data is valid by construction");
    debug_assert!(situation.all_sme());
    situation
}

/// Twice the value as an integer; the generated grid keeps everything in
/// half-integers so this is exact.
fn double(value: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    let doubled = value * int(2);
    debug_assert!(doubled.is_integer());
    doubled.to_integer().to_i64().expect("generator grid fits i64")
}
