//! Seeded sampling of test inputs.
//!
//! "Random element" throughout the crate means a sum of random monomials
//! with coefficients drawn from `{-3, …, 3} \ {0}`, reproducible from a
//! seed.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;
use crate::superpoly::{GeneratorTable, Monomial, SuperPoly};

/// The generator used for every randomized check.
pub type TestRng = ChaCha8Rng;

/// A deterministic generator for `seed`.
pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero coefficient in `{-3, …, 3}`.
pub fn coefficient<S: Scalar>(rng: &mut TestRng) -> S {
    let magnitude = rng.gen_range(1..=3);
    S::int(if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    })
}

/// A random monomial in the allowed generators with at most `max_factors`
/// factors; odd generators appear at most once.
pub fn monomial(
    rng: &mut TestRng,
    table: &GeneratorTable,
    allowed: &[usize],
    max_factors: usize,
) -> Monomial {
    let mut m = vec![0u16; table.len()];
    if allowed.is_empty() {
        return m.into_boxed_slice();
    }
    let factors = rng.gen_range(0..=max_factors);
    for _ in 0..factors {
        let &g = allowed.choose(rng).expect("nonempty");
        if table.is_odd(g) && m[g] > 0 {
            continue;
        }
        m[g] += 1;
    }
    m.into_boxed_slice()
}

/// A random polynomial with up to `terms` terms.
pub fn poly<S: Scalar>(
    rng: &mut TestRng,
    table: &Arc<GeneratorTable>,
    allowed: &[usize],
    max_factors: usize,
    terms: usize,
) -> SuperPoly<S> {
    let mut out = SuperPoly::zero(table);
    for _ in 0..terms {
        let m = monomial(rng, table, allowed, max_factors);
        out.add_term(m, coefficient(rng));
    }
    out
}

/// A random homogeneous polynomial: random monomials are drawn and only
/// those of the degree of the first draw are kept. Returns `None` only if
/// every draw failed to produce a monomial of the requested degree.
pub fn homogeneous<S: Scalar>(
    rng: &mut TestRng,
    table: &Arc<GeneratorTable>,
    allowed: &[usize],
    max_factors: usize,
    terms: usize,
    degree: Option<i64>,
) -> Option<SuperPoly<S>> {
    let mut target = degree;
    let mut out = SuperPoly::zero(table);
    for _ in 0..terms.max(1) * 20 {
        let m = monomial(rng, table, allowed, max_factors);
        let d = table.monomial_degree(&m);
        match target {
            None => target = Some(d),
            Some(t) if t != d => continue,
            _ => {}
        }
        out.add_term(m, coefficient(rng));
        if out.num_terms() >= terms {
            break;
        }
    }
    (!out.is_zero()).then_some(out)
}
