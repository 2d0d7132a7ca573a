//! Synthetic series generators shared by the benchmarks.

use abba_core::TimeSeries;

/// A smooth multi-tone wave with a mild trend.
pub fn wave(n: usize) -> TimeSeries {
    let values = (0..n)
        .map(|i| {
            let x = i as f64;
            (x * 0.051).sin() * 1.6 + (x * 0.0113).cos() * 0.9 + x * 1e-4
        })
        .collect();
    TimeSeries::new(values).expect("generator emits finite values")
}

/// A deterministic pseudo-random walk (xorshift increments).
pub fn walk(n: usize, seed: u64) -> TimeSeries {
    let mut state = seed | 1;
    let mut value = 0.0;
    let values = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let unit = (state >> 11) as f64 / (1u64 << 53) as f64;
            value += unit * 2.0 - 1.0;
            value
        })
        .collect();
    TimeSeries::new(values).expect("generator emits finite values")
}
