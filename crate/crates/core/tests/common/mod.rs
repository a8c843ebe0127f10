#![allow(dead_code)]

use choremarket::{ratio, Instance, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `-p/q` with `p, q` drawn from `1..=20`.
pub fn negative_entry(rng: &mut impl Rng) -> Rational {
    -ratio(rng.gen_range(1..=20), rng.gen_range(1..=20))
}

pub fn random_instance(rng: &mut impl Rng, max_n: usize, max_m: usize) -> Instance {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    sized_instance(rng, n, m)
}

pub fn sized_instance(rng: &mut impl Rng, n: usize, m: usize) -> Instance {
    let values = (0..n).map(|_| (0..m).map(|_| negative_entry(rng)).collect()).collect();
    let budgets = (0..n).map(|_| negative_entry(rng)).collect();
    Instance::new(values, budgets).expect("strictly negative entries")
}

pub fn corpus(seed: u64, count: usize, max_n: usize, max_m: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_n, max_m)).collect()
}

pub fn positive_weights(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| -negative_entry(rng)).collect()
}

pub fn small_instance() -> Instance {
    Instance::from_ints(&[vec![-1, -8], vec![-1, -2]], &[-1, -2]).unwrap()
}
