//! Exhaustive reference solvers. They recompute disjointness straight from
//! disk fields and share no code with the dynamic program or the dispersion
//! search, so agreement between the two is meaningful.

use std::time::{Duration, Instant};

use crate::dispersion::{DispersionResult, disk_distance};
use crate::dp::Solution;
use crate::error::{Error, Result};
use crate::geom::{Disk, Tolerance};
use crate::hull::{disk_hull_with, Classification};

/// Limits on an enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub timeout: Option<Duration>,
}

impl OracleBudget {
    pub const MWIS: OracleBudget = OracleBudget::new(20);
    pub const MWIS_STRONGLY_CONVEX: OracleBudget = OracleBudget::new(12);
    pub const DISPERSION: OracleBudget = OracleBudget::new(10);

    pub const fn new(max_n: usize) -> Self {
        OracleBudget { max_n, timeout: None }
    }

    pub fn with_timeout(self, timeout: Duration) -> Self {
        OracleBudget {
            timeout: Some(timeout),
            ..self
        }
    }

    fn admit(&self, n: usize) -> Result<Clock> {
        if n > self.max_n {
            return Err(Error::BudgetExceeded { n, max: self.max_n });
        }
        Ok(Clock {
            deadline: self.timeout.map(|t| Instant::now() + t),
            ticks: 0,
        })
    }
}

struct Clock {
    deadline: Option<Instant>,
    ticks: u32,
}

impl Clock {
    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Timeout);
                }
            }
        }
        Ok(())
    }
}

fn by_id(disks: &[Disk]) -> Vec<Disk> {
    let mut v = disks.to_vec();
    v.sort_by_key(|d| d.id);
    v
}

/// Bit `b` of `conflicts[a]` is set when disks `a` and `b` are not strictly
/// disjoint.
fn conflict_masks(disks: &[Disk], tol: &Tolerance) -> Vec<u32> {
    let n = disks.len();
    let mut m = vec![0u32; n];
    for a in 0..n {
        for b in a + 1..n {
            let (p, q) = (&disks[a], &disks[b]);
            let gap = (p.center.x - q.center.x).hypot(p.center.y - q.center.y) - p.radius - q.radius;
            if gap <= tol.pred {
                m[a] |= 1 << b;
                m[b] |= 1 << a;
            }
        }
    }
    m
}

fn members(mask: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&i| mask >> i & 1 == 1)
}

/// Best mask among independent sets accepted by `keep`; ties go to the
/// lexicographically smallest id list.
fn enumerate_independent(
    disks: &[Disk],
    tol: &Tolerance,
    clock: &mut Clock,
    mut keep: impl FnMut(u32) -> bool,
) -> Result<Solution> {
    let n = disks.len();
    let conflicts = conflict_masks(disks, tol);
    let mut best = Solution::default();
    let total: u64 = 1 << n;
    // independent[m] for every mask, built from the mask without its lowest bit.
    let mut independent = vec![false; total as usize];
    independent[0] = true;
    for mask in 1..total as u32 {
        clock.tick()?;
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = independent[rest as usize] && conflicts[low] & rest == 0;
        independent[mask as usize] = ok;
        if !ok {
            continue;
        }
        let weight: f64 = members(mask, n).map(|i| disks[i].weight).sum();
        if weight < best.total_weight {
            continue;
        }
        let ids: Vec<usize> = members(mask, n).map(|i| disks[i].id).collect();
        if (weight > best.total_weight || ids < best.chosen) && keep(mask) {
            best = Solution {
                chosen: ids,
                total_weight: weight,
            };
        }
    }
    Ok(best)
}

/// Maximum-weight independent set by exhaustive enumeration.
pub fn brute_mwis(disks: &[Disk]) -> Result<Solution> {
    brute_mwis_with(disks, &Tolerance::for_disks(disks), OracleBudget::MWIS)
}

pub fn brute_mwis_with(disks: &[Disk], tol: &Tolerance, budget: OracleBudget) -> Result<Solution> {
    let mut clock = budget.admit(disks.len())?;
    enumerate_independent(&by_id(disks), tol, &mut clock, |_| true)
}

/// Maximum-weight independent set among those in strongly convex position.
/// The empty set and singletons qualify.
pub fn brute_mwis_strongly_convex(disks: &[Disk]) -> Result<Solution> {
    brute_mwis_strongly_convex_with(disks, &Tolerance::for_disks(disks), OracleBudget::MWIS_STRONGLY_CONVEX)
}

pub fn brute_mwis_strongly_convex_with(disks: &[Disk], tol: &Tolerance, budget: OracleBudget) -> Result<Solution> {
    let mut clock = budget.admit(disks.len())?;
    let sorted = by_id(disks);
    let n = sorted.len();
    enumerate_independent(&sorted, tol, &mut clock, |mask| {
        if mask.count_ones() <= 1 {
            return true;
        }
        let subset: Vec<Disk> = members(mask, n).map(|i| sorted[i]).collect();
        disk_hull_with(&subset, tol).classification == Classification::StronglyConvex
    })
}

/// Max-min dispersion by enumerating every `k`-subset in lexicographic id
/// order; the first subset reaching the best minimum wins.
pub fn brute_dispersion(disks: &[Disk], k: usize) -> Result<DispersionResult> {
    brute_dispersion_with(disks, k, OracleBudget::DISPERSION)
}

pub fn brute_dispersion_with(disks: &[Disk], k: usize, budget: OracleBudget) -> Result<DispersionResult> {
    let n = disks.len();
    let mut clock = budget.admit(n)?;
    if k == 0 || k > n {
        return Err(Error::InfeasibleK { k, n });
    }
    let sorted = by_id(disks);
    if k == 1 {
        return Ok(DispersionResult::unbounded(sorted[0].id));
    }
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            dist[a * n + b] = disk_distance(&sorted[a], &sorted[b]);
        }
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        clock.tick()?;
        let mut m = f64::INFINITY;
        for (s, &a) in idx.iter().enumerate() {
            for &b in &idx[s + 1..] {
                m = m.min(dist[a * n + b]);
            }
        }
        if best.as_ref().is_none_or(|(r, _)| m > *r) {
            best = Some((m, idx.clone()));
        }
        // Advance to the next combination.
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            break;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    let (r_star, picked) = best.expect("at least one subset");
    Ok(DispersionResult {
        r_star,
        chosen: picked.iter().map(|&i| sorted[i].id).collect(),
        unbounded: false,
    })
}
