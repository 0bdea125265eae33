//! Fixtures shared by the solver benchmarks.

use std::f64::consts::{PI, TAU};

use cdm_core::Disk;

/// `n` disks of mixed radius and weight, internally tangent to the unit
/// circle at slightly jittered angles, with neighbours kept apart so every
/// pair table is full size.
pub fn ring(n: usize) -> Vec<Disk> {
    let r_max = 0.72 * PI / n as f64;
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64 + 0.1 * (i as f64).sin() / n as f64;
            let r = r_max * (0.5 + 0.125 * ((i * 7) % 5) as f64);
            let c = 1.0 - r;
            Disk::new(i, c * t.cos(), c * t.sin(), r, 1.0 + (i % 3) as f64)
        })
        .collect()
}
