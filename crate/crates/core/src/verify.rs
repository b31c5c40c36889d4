//! Randomized certification of claimed identities.
//!
//! A claim is evaluated as a raw [`Tree`] at seeded rational points, which
//! never touches the canonical-form arithmetic, and is also canonicalized.
//! Both must give zero.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::expr::{Expr, Rational, Scope, Tree, Var};

pub const DEFAULT_TRIALS: usize = 16;
pub const DEFAULT_BOUND: u32 = 97;

pub type Assignment = BTreeMap<Var, Rational>;

fn draw(symbols: &[Var], rng: &mut ChaCha8Rng, bound: u32) -> Assignment {
    let bound = i64::from(bound.max(1));
    symbols
        .iter()
        .map(|v| {
            let den = rng.gen_range(1..=bound);
            let num = rng.gen_range(-bound * den..=bound * den);
            (
                v.clone(),
                Rational::new(BigInt::from(num), BigInt::from(den)),
            )
        })
        .collect()
}

fn stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A point in `[-bound, bound]` with denominators at most `bound` for every
/// symbol of the scope; identical for identical seeds.
pub fn random_point(scope: &dyn Scope, seed: u64, bound: u32) -> Assignment {
    draw(&scope.symbols(), &mut stream(seed, 0), bound)
}

/// A sampled point where the claim did not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub trial: usize,
    pub point: Assignment,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub trials: usize,
    pub seed: u64,
    /// Canonical form of the claim.
    pub canonical: Expr,
    /// First failing trial, if any.
    pub witness: Option<Witness>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.canonical.is_zero() && self.witness.is_none()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Checks that `claim` is identically zero. Trial `k` draws from ChaCha
/// stream `k` of `seed`, so results do not depend on scheduling.
pub fn certify_zero(scope: &dyn Scope, claim: &Tree, trials: usize, seed: u64) -> Certificate {
    certify_zero_bounded(scope, claim, trials, seed, DEFAULT_BOUND)
}

pub fn certify_zero_bounded(
    scope: &dyn Scope,
    claim: &Tree,
    trials: usize,
    seed: u64,
    bound: u32,
) -> Certificate {
    let trials = trials.max(1);
    let mut symbols: BTreeSet<Var> = scope.symbols().into_iter().collect();
    let mut used = Vec::new();
    claim.vars(&mut used);
    symbols.extend(used);
    let symbols: Vec<Var> = symbols.into_iter().collect();

    let witness = (0..trials).into_par_iter().find_map_first(|trial| {
        let point = draw(&symbols, &mut stream(seed, trial as u64), bound);
        let value = claim
            .eval(&|v| point.get(v).cloned())
            .expect("every symbol of the claim is assigned");
        (!value.is_zero()).then_some(Witness {
            trial,
            point,
            value,
        })
    });
    Certificate {
        trials,
        seed,
        canonical: claim.canonicalize(),
        witness,
    }
}
