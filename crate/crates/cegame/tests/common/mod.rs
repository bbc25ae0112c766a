#![allow(dead_code)]

use cegame::{CEGame, Instance, Rational};
use num_bigint::BigInt;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> Instance {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    cegame::parse_instance(&text).expect("fixture parses")
}

pub fn fixture_game(name: &str) -> CEGame {
    CEGame::build(load_fixture(name).situation).expect("fixture builds")
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// |value − reference| ≤ tol, with `reference` given as a decimal string.
pub fn within(value: &Rational, reference: &str, tol: &Rational) -> bool {
    let r = cegame::numeric::parse_decimal(reference).expect("reference parses");
    let diff = value - r;
    let abs = if diff < int(0) { -diff } else { diff };
    abs <= *tol
}
