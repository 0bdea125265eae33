//! Seeded random instances with a promised classification.
//!
//! Every disk is placed internally tangent to the unit circle at a random
//! direction, which puts each disk on the hull.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Disk, Point, Tolerance};
use crate::hull::{disk_hull_with, Classification};
use crate::io::instance::{InstanceFile, Metadata};

const RETRIES: usize = 200;
const CIRCLE: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    StronglyConvex,
    /// At least one disk owns two hull arcs; needs `n >= 3`.
    Convex,
    /// Strongly convex with neighbouring pairs a few tolerances away from
    /// tangency on either side.
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub radius_range: (f64, f64),
    pub mode: Mode,
    pub seed: u64,
    /// Chance that a disk is a point.
    pub point_fraction: f64,
    /// Weights drawn uniformly from this range; `(1, 1)` gives unit weights.
    pub weight_range: (f64, f64),
}

impl GeneratorSpec {
    pub fn new(n: usize, mode: Mode, seed: u64) -> Self {
        GeneratorSpec {
            n,
            radius_range: (0.05, 0.4),
            mode,
            seed,
            point_fraction: 0.0,
            weight_range: (1.0, 1.0),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<InstanceFile> {
    let disks = generate_disks(spec)?;
    let name = match spec.mode {
        Mode::StronglyConvex => "strongly-convex",
        Mode::Convex => "convex",
        Mode::Adversarial => "adversarial",
    };
    Ok(InstanceFile::from_disks(
        &disks,
        Some(Metadata {
            seed: Some(spec.seed),
            generator: Some(name.to_string()),
            description: None,
        }),
    ))
}

pub fn generate_disks(spec: &GeneratorSpec) -> Result<Vec<Disk>> {
    if spec.n == 0 {
        return Err(Error::GenerationFailed(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..RETRIES {
        let mut disks = ring(spec, &mut rng);
        let ok = match spec.mode {
            Mode::StronglyConvex => classify(&disks) == Classification::StronglyConvex,
            Mode::Convex => inflate_one(&mut disks, &mut rng),
            Mode::Adversarial => near_tangent(&mut disks, &mut rng) && classify(&disks) == Classification::StronglyConvex,
        };
        if ok {
            return Ok(disks);
        }
    }
    Err(Error::GenerationFailed(RETRIES))
}

fn classify(disks: &[Disk]) -> Classification {
    disk_hull_with(disks, &Tolerance::for_disks(disks)).classification
}

fn tangent_disk(id: usize, theta: f64, r: f64, w: f64) -> Disk {
    let c = Point::unit(theta) * (CIRCLE - r);
    Disk::new(id, c.x, c.y, r, w)
}

fn ring(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<Disk> {
    let mut dirs: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(0.0..TAU)).collect();
    dirs.sort_by(f64::total_cmp);
    dirs.iter()
        .enumerate()
        .map(|(i, &t)| {
            let (lo, hi) = spec.radius_range;
            let r = if rng.gen_bool(spec.point_fraction.clamp(0.0, 1.0)) {
                0.0
            } else if hi > lo {
                rng.gen_range(lo..hi)
            } else {
                lo
            };
            let (wl, wh) = spec.weight_range;
            let w = if wh > wl { rng.gen_range(wl..wh) } else { wl };
            tangent_disk(i, t, r, w)
        })
        .collect()
}

/// Grows a random disk toward the circle until it owns two arcs. Fails if
/// that never happens while every disk stays on the hull.
fn inflate_one(disks: &mut [Disk], rng: &mut ChaCha8Rng) -> bool {
    if disks.len() < 2 {
        return false;
    }
    let i = rng.gen_range(0..disks.len());
    let theta = disks[i].center.angle();
    let start = disks[i].radius;
    for step in 1..=40 {
        let r = start + (0.98 * CIRCLE - start) * step as f64 / 40.0;
        disks[i] = tangent_disk(disks[i].id, theta, r, disks[i].weight);
        let tol = Tolerance::for_disks(disks);
        let h = disk_hull_with(disks, &tol);
        match h.classification {
            Classification::NotConvexPosition => return false,
            Classification::Convex if h.arc_count(disks[i].id) >= 2 => return true,
            _ => {}
        }
    }
    false
}

/// Rescales the second disk of alternating neighbour pairs so the pair gap is
/// `±10` predicate tolerances.
fn near_tangent(disks: &mut [Disk], rng: &mut ChaCha8Rng) -> bool {
    let n = disks.len();
    if n < 2 {
        return true;
    }
    let eps = 10.0 * Tolerance::for_disks(disks).pred;
    for a in (0..n - 1).step_by(2) {
        let b = a + 1;
        let target = if rng.gen_bool(0.5) { eps } else { -eps };
        let theta = disks[b].center.angle();
        let (pa, ra, w) = (disks[a].center, disks[a].radius, disks[b].weight);
        let gap = |r: f64| tangent_disk(0, theta, r, 1.0).center.dist(pa) - ra - r - target;
        // The gap shrinks as the disk grows.
        let (mut lo, mut hi) = (0.0, 0.9 * CIRCLE);
        if gap(lo) < 0.0 || gap(hi) > 0.0 {
            return false;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        disks[b] = tangent_disk(disks[b].id, theta, 0.5 * (lo + hi), w);
    }
    true
}
