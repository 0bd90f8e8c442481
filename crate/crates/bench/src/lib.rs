//! Shared fixtures for the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecstruct_core::{Form, FormBasis};

/// Deterministic form with coefficients in `[−1, 1)`.
pub fn random_form(seed: u64, n: usize, k: usize) -> Form<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = FormBasis::new(n, k);
    let c: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    basis.from_coords(&c)
}
