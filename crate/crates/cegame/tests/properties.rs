//! Randomized invariants over generated instances.

mod common;

use cegame::gen::{generate, Profile};
use cegame::model::PlayerClass;
use cegame::{
    brute_force_coalition, delta_proportional, egalitarian_rate, excess, g_contribution, in_core,
    individual_strategy_mqc, min_excess_per_essential, min_excess_ratio, nea, nucleolus,
    proportional_rate, solve_coalition, Coalition, CEGame, CESituation, Rational,
};
use common::int;
use num_traits::Zero;
use proptest::prelude::*;

fn profile_from(tag: u8) -> Profile {
    match tag % 3 {
        0 => Profile::Mixed,
        1 => Profile::EssentialHeavy,
        _ => Profile::ComplementaryHeavy,
    }
}

/// Direct profit of an exporter set per the coalition objective:
/// `Σ_R Δᵢ − (m̲ − Σ_R Qᵢ)⁺·rᵘ`.
fn profit_of(sit: &CESituation, exporters: Coalition) -> Rational {
    let delta: Rational = exporters.iter().map(|i| sit.delta(i)).sum();
    let cap: Rational = exporters.iter().map(|i| sit.capacity(i).clone()).sum();
    let shortfall = (sit.mqc() - cap).max(Rational::zero());
    delta - shortfall * sit.under_penalty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn individual_profit_is_clamped_case_formula(seed in any::<u64>(), n in 1usize..6) {
        let sit = generate(n, seed, Profile::Mixed);
        for i in 0..sit.n() {
            let s = individual_strategy_mqc(&sit, i);
            let formula = if sit.is_sme(i) {
                sit.delta_u(i) - sit.mqc() * sit.under_penalty()
            } else {
                sit.delta(i)
            };
            prop_assert_eq!(s.profit.clone(), formula.max(Rational::zero()));
            prop_assert!(s.profit >= Rational::zero());
        }
    }

    #[test]
    fn sme_classes_partition(seed in any::<u64>(), n in 1usize..8, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        for p in sit.profiles() {
            let is_sme_class = matches!(
                p.class,
                PlayerClass::Essential | PlayerClass::Complementary | PlayerClass::NonPotential
            );
            prop_assert!(is_sme_class);
            match p.class {
                PlayerClass::Essential => prop_assert!(p.delta >= Rational::zero()),
                PlayerClass::Complementary => {
                    prop_assert!(p.delta < Rational::zero());
                    prop_assert!(p.delta_u >= Rational::zero());
                }
                PlayerClass::NonPotential => prop_assert!(p.delta_u < Rational::zero()),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn essential_and_complementary_decomposition(seed in any::<u64>(), n in 2usize..7, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let full = Coalition::full(n);
        for s in full.subsets() {
            let ess = cegame::essential_members(&sit, s);
            let cap_ess: Rational = ess.iter().map(|i| sit.capacity(i).clone()).sum();
            if cap_ess >= *sit.mqc() {
                continue;
            }
            let comp = cegame::complementary_members(&sit, s);
            for d in comp.subsets() {
                let g = g_contribution(&sit, s, d).unwrap();
                prop_assert_eq!(
                    profit_of(&sit, ess.union(d)),
                    profit_of(&sit, ess) + g,
                    "decomposition must hold for S={} D={}", s, d
                );
            }
        }
    }

    #[test]
    fn solver_structure_invariants(seed in any::<u64>(), n in 2usize..8, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let full = Coalition::full(n);
        for s in full.subsets() {
            let sol = solve_coalition(&sit, s).unwrap();
            let ess = cegame::essential_members(&sit, s);
            let pot = cegame::potential_members(&sit, s);
            if !sol.exporters.is_empty() {
                prop_assert!(ess.is_subset_of(sol.exporters), "essential dominance");
            }
            prop_assert!(sol.exporters.is_subset_of(pot), "only potential players export");
            let cap: Rational = sol.exporters.iter().map(|i| sit.capacity(i).clone()).sum();
            if cap >= *sit.mqc() {
                prop_assert!(sol.under_supply.is_zero(), "no shortfall once covered");
            }
            prop_assert!(sol.value >= Rational::zero());
        }
    }

    #[test]
    fn solver_matches_oracle(seed in any::<u64>(), n in 2usize..7, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let full = Coalition::full(n);
        for s in full.subsets() {
            let fast = solve_coalition(&sit, s).unwrap();
            let slow = brute_force_coalition(&sit, s).unwrap();
            prop_assert_eq!(fast, slow, "coalition {}", s);
        }
    }

    #[test]
    fn optimal_complementary_sets_shrink_under_restriction(seed in any::<u64>(), n in 2usize..7, sub in any::<u32>()) {
        // grand-coalition comparison of the complementary exporter sets:
        // restricted coalitions never beat the grand coalition's margins
        let sit = generate(n, seed, Profile::ComplementaryHeavy);
        let full = Coalition::full(n);
        let grand = solve_coalition(&sit, full).unwrap();
        if grand.exporters.is_empty() {
            return Ok(());
        }
        let essential = cegame::essential_members(&sit, full);
        let complementary = cegame::complementary_members(&sit, full);
        let chosen = Coalition::from_bits(sub & essential.bits());
        let s = chosen.union(complementary);
        let restricted = solve_coalition(&sit, s).unwrap();
        if restricted.exporters.is_empty() {
            return Ok(());
        }
        let delta_of = |set: Coalition| -> Rational { set.iter().map(|i| sit.delta(i)).sum() };
        let d_s = restricted.exporters.difference(chosen);
        let d_n = grand.exporters.difference(essential);
        prop_assert!(delta_of(d_s) <= delta_of(d_n), "margin comparison");
        let penalized = |set: Coalition, d: Coalition| -> Rational {
            let cap: Rational = set.iter().map(|i| sit.capacity(i).clone()).sum();
            delta_of(d) - (sit.mqc() - cap).max(Rational::zero()) * sit.under_penalty()
        };
        prop_assert!(
            penalized(restricted.exporters, d_s) <= penalized(grand.exporters, d_n),
            "penalized margin comparison"
        );
    }

    #[test]
    fn game_structure_and_subgames(seed in any::<u64>(), n in 2usize..7, tag in any::<u8>(), sub in any::<u32>()) {
        let sit = generate(n, seed, profile_from(tag));
        let game = CEGame::build(sit.clone()).unwrap();
        prop_assert!(game.check_superadditive().is_none());
        prop_assert!(game.check_monotone().is_none());

        // no essential players, no export profit
        let idle = game.grand().difference(game.essential());
        for t in idle.subsets() {
            prop_assert!(game.value(t).is_zero());
        }

        // dropping never-exporting members changes nothing
        for s in game.grand().subsets() {
            let dead = s.difference(cegame::potential_members(&sit, s));
            for t in dead.subsets() {
                prop_assert_eq!(game.value(s.difference(t)), game.value(s));
            }
        }

        // subgames are the restriction of the table
        let t = Coalition::from_bits(sub & game.grand().bits());
        if !t.is_empty() {
            let subgame = game.subgame(t).unwrap();
            let rebuilt = CEGame::build(sit.restrict(t)).unwrap();
            for bits in 0..(1u32 << t.len()) {
                let c = Coalition::from_bits(bits);
                prop_assert_eq!(subgame.value(c), rebuilt.value(c));
            }
        }
    }

    #[test]
    fn nea_is_efficient_and_stable(seed in any::<u64>(), n in 2usize..8, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let game = CEGame::build(sit).unwrap();
        let phi = nea(&game);
        prop_assert_eq!(phi.total(), game.grand_value().clone());
        prop_assert!(in_core(&game, &phi.payoffs).in_core);
        // stability restated per coalition
        for bits in 1..game.grand().bits() {
            prop_assert!(excess(&game, Coalition::from_bits(bits), &phi.payoffs) >= Rational::zero());
        }
    }

    #[test]
    fn rules_are_efficient(seed in any::<u64>(), n in 2usize..7, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let game = CEGame::build(sit).unwrap();
        let v_n = game.grand_value().clone();
        prop_assert_eq!(nea(&game).total(), v_n.clone());
        prop_assert_eq!(delta_proportional(&game).total(), v_n.clone());
        if !game.complementary_exporters().is_empty() {
            let bound = min_excess_per_essential(&game, &nea(&game).payoffs).unwrap().criterion;
            let psi = egalitarian_rate(&game, &bound, None).unwrap();
            prop_assert_eq!(psi.total(), v_n.clone());
            let half = cegame::numeric::rat(1, 2);
            let prop_alloc = proportional_rate(&game, &half, None).unwrap();
            prop_assert_eq!(prop_alloc.total(), v_n);
        }
    }

    #[test]
    fn rate_allocations_are_affine_in_rho(seed in any::<u64>(), n in 2usize..7) {
        let sit = generate(n, seed, Profile::ComplementaryHeavy);
        let game = CEGame::build(sit).unwrap();
        if game.complementary_exporters().is_empty() {
            return Ok(());
        }
        let phi = nea(&game);
        let two = int(2);

        let bound = min_excess_per_essential(&game, &phi.payoffs).unwrap().criterion;
        let half = &bound / &two;
        let lo = egalitarian_rate(&game, &int(0), None).unwrap();
        let mid = egalitarian_rate(&game, &half, None).unwrap();
        let hi = egalitarian_rate(&game, &bound, None).unwrap();
        for i in 0..game.n() {
            prop_assert_eq!(&mid.payoffs[i] * &two, &lo.payoffs[i] + &hi.payoffs[i]);
        }

        if let Ok(found) = min_excess_ratio(&game, &phi.payoffs) {
            // stay strictly below 1 so the rule's precondition holds
            let cap = found.criterion / &two;
            let quarter = &cap / &two;
            let lo = proportional_rate(&game, &int(0), None).unwrap();
            let mid = proportional_rate(&game, &quarter, None).unwrap();
            let hi = proportional_rate(&game, &cap, None).unwrap();
            for i in 0..game.n() {
                prop_assert_eq!(&mid.payoffs[i] * &two, &lo.payoffs[i] + &hi.payoffs[i]);
            }
        }
    }

    #[test]
    fn restricted_searches_match_brute_force(seed in any::<u64>(), n in 2usize..7, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let game = CEGame::build(sit.clone()).unwrap();
        let phi = nea(&game);

        // Ŝ: minimum of e(S,φ)/|S^E| over all proper S with essentials
        let mut brute: Option<Rational> = None;
        for bits in 1..game.grand().bits() {
            let s = Coalition::from_bits(bits);
            let ess = cegame::essential_members(&sit, s).len();
            if ess == 0 {
                continue;
            }
            let ratio = excess(&game, s, &phi.payoffs) / int(ess as i64);
            brute = Some(match brute {
                None => ratio,
                Some(b) => b.min(ratio),
            });
        }
        if let Some(brute) = brute {
            let family = min_excess_per_essential(&game, &phi.payoffs).unwrap();
            prop_assert_eq!(family.criterion, brute);
        }

        // Š: minimum of e(S,φ)/Σ_S φ over the same coalitions, skipping
        // zero denominators
        let mut brute: Option<Rational> = None;
        for bits in 1..game.grand().bits() {
            let s = Coalition::from_bits(bits);
            if cegame::essential_members(&sit, s).is_empty() {
                continue;
            }
            let denom: Rational = s.iter().map(|i| phi.payoffs[i].clone()).sum();
            if denom.is_zero() {
                continue;
            }
            let ratio = excess(&game, s, &phi.payoffs) / denom;
            brute = Some(match brute {
                None => ratio,
                Some(b) => b.min(ratio),
            });
        }
        match (brute, min_excess_ratio(&game, &phi.payoffs)) {
            (Some(brute), Ok(family)) => prop_assert_eq!(family.criterion, brute),
            (None, Err(_)) => {}
            (brute, family) => {
                return Err(TestCaseError::fail(format!(
                    "search disagreement: brute={brute:?} family={family:?}"
                )))
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nucleolus_is_a_core_imputation(seed in any::<u64>(), n in 2usize..5, tag in any::<u8>()) {
        let sit = generate(n, seed, profile_from(tag));
        let game = CEGame::build(sit).unwrap();
        let eta = nucleolus(&game).unwrap();
        prop_assert_eq!(eta.total(), game.grand_value().clone());
        for i in 0..game.n() {
            prop_assert!(&eta.payoffs[i] >= game.value(Coalition::singleton(i)));
        }
        prop_assert!(in_core(&game, &eta.payoffs).in_core);
    }

    #[test]
    fn nucleolus_not_lex_dominated_by_random_imputations(seed in any::<u64>(), n in 2usize..4) {
        use rand::{Rng, SeedableRng};
        let sit = generate(n, seed, Profile::Mixed);
        let game = CEGame::build(sit).unwrap();
        let eta = nucleolus(&game).unwrap();
        let eta_sorted = cegame::sorted_excesses(&game, &eta.payoffs);

        let singles: Vec<Rational> =
            (0..n).map(|i| game.value(Coalition::singleton(i)).clone()).collect();
        let slack = game.grand_value() - singles.iter().sum::<Rational>();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        for _ in 0..200 {
            let weights: Vec<i64> = (0..n).map(|_| rng.random_range(0..1000)).collect();
            let total: i64 = weights.iter().sum();
            if total == 0 {
                continue;
            }
            let imputation: Vec<Rational> = (0..n)
                .map(|i| &singles[i] + &slack * cegame::numeric::rat(weights[i], total))
                .collect();
            let other = cegame::sorted_excesses(&game, &imputation);
            prop_assert!(
                cegame::nucleolus::lex_ge(&eta_sorted, &other),
                "random imputation lexicographically dominates the nucleolus"
            );
        }
    }
}
