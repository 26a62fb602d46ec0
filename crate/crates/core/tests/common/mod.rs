#![allow(dead_code)]

use quantal_persuasion::model::Instance;
use quantal_persuasion::sisu::normalize_instance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random prior on `m` states, bounded away from zero.
pub fn random_prior(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = p[..m - 1].iter().sum();
    p[m - 1] = 1.0 - head;
    p
}

/// Strictly increasing values in `[-3, 3]` spaced at least 0.05 apart.
pub fn random_values(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return v;
        }
    }
}

/// Random state-independent instance with a negative and a positive value.
pub fn random_sisu(rng: &mut ChaCha8Rng, m: usize) -> Instance {
    let lambda = random_prior(rng, m);
    let v = random_values(rng, m);
    let inst = Instance::new(&lambda, &v, &vec![1.0; m]).unwrap();
    normalize_instance(&inst).unwrap()
}

/// Random instance with state-dependent sender utility in `[0, 2]`.
pub fn random_sdsu(rng: &mut ChaCha8Rng, m: usize) -> Instance {
    let lambda = random_prior(rng, m);
    let v = random_values(rng, m);
    let u: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
    Instance::new(&lambda, &v, &u).unwrap()
}
