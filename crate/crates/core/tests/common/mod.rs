//! Synthetic series generators for the integration suites: random walks,
//! noisy sines, and step signals, the mix the bound checks are exercised on.

use abba_core::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_walk(n: usize, rng: &mut ChaCha8Rng) -> TimeSeries {
    let mut value = rng.gen_range(-1.0..1.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(value);
        value += rng.gen_range(-1.0..1.0);
    }
    TimeSeries::new(out).unwrap()
}

pub fn noisy_sine(n: usize, rng: &mut ChaCha8Rng) -> TimeSeries {
    let amplitude = rng.gen_range(0.5..3.0);
    let period = rng.gen_range(20.0..200.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let noise = 0.05 * amplitude;
    let out = (0..n)
        .map(|i| {
            let x = i as f64 / period * std::f64::consts::TAU + phase;
            amplitude * x.sin() + rng.gen_range(-noise..noise)
        })
        .collect();
    TimeSeries::new(out).unwrap()
}

pub fn step_series(n: usize, rng: &mut ChaCha8Rng) -> TimeSeries {
    let mut level = rng.gen_range(-2.0..2.0);
    let mut remaining = 0usize;
    let out = (0..n)
        .map(|_| {
            if remaining == 0 {
                remaining = rng.gen_range(10..100);
                level += rng.gen_range(-2.0..2.0);
            }
            remaining -= 1;
            level
        })
        .collect();
    TimeSeries::new(out).unwrap()
}

/// A deterministic mixed corpus with lengths in `[50, 2000]`.
pub fn corpus(count: usize, seed: u64) -> Vec<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(50..=2000);
            match i % 3 {
                0 => random_walk(n, &mut rng),
                1 => noisy_sine(n, &mut rng),
                _ => step_series(n, &mut rng),
            }
        })
        .collect()
}

/// The 1,000-point eight-period sine used by the fixed-point locality and
/// symbol-structure checks.
pub fn fig_sine() -> TimeSeries {
    let n = 1000;
    let out = (0..n)
        .map(|i| (std::f64::consts::TAU * 8.0 * i as f64 / n as f64).sin())
        .collect();
    TimeSeries::new(out).unwrap()
}
