//! Choose `k` disks maximizing their minimum pairwise distance.
//!
//! Growing every disk by `r / 2` turns "pairwise distance greater than `r`"
//! into "pairwise disjoint", so a unit-weight independent set solve answers
//! the decision question. Growth shifts every support function by the same
//! amount, which leaves the hull arc structure unchanged. The optimum is one
//! of the pairwise distances, found by binary search over them.

use crate::error::{Error, Result};
use crate::geom::{grow, Disk, Tolerance};
use crate::reductions::{solve_convex_mwis_tol, PipelineOptions};

/// Chosen ids and their minimum pairwise distance.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionResult {
    /// `f64::INFINITY` when `unbounded`.
    pub r_star: f64,
    pub chosen: Vec<usize>,
    /// Set for `k = 1`, where no pair constrains the minimum.
    pub unbounded: bool,
}

impl DispersionResult {
    pub fn unbounded(id: usize) -> Self {
        DispersionResult {
            r_star: f64::INFINITY,
            chosen: vec![id],
            unbounded: true,
        }
    }
}

/// Extra detail from [`solve_dispersion_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionReport {
    pub result: DispersionResult,
    /// Number of decision calls made by the search.
    pub decisions: usize,
    /// The optimum fell in a group of candidate distances merged because they
    /// lie within the predicate tolerance of each other.
    pub in_merged_band: bool,
}

/// Gap between two disks, 0 when they overlap.
pub fn disk_distance(a: &Disk, b: &Disk) -> f64 {
    (a.center.dist(b.center) - a.radius - b.radius).max(0.0)
}

/// Sorted pairwise distances, collapsed so that consecutive values differ by
/// more than the predicate tolerance. Each group is represented by its least
/// member.
pub fn candidate_radii(disks: &[Disk]) -> Vec<f64> {
    candidate_radii_with(disks, &Tolerance::for_disks(disks))
        .into_iter()
        .map(|g| g.value)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Group {
    value: f64,
    merged: bool,
}

fn candidate_radii_with(disks: &[Disk], tol: &Tolerance) -> Vec<Group> {
    let mut all: Vec<f64> = Vec::with_capacity(disks.len() * disks.len().saturating_sub(1) / 2);
    for (i, a) in disks.iter().enumerate() {
        for b in &disks[i + 1..] {
            all.push(disk_distance(a, b));
        }
    }
    all.sort_by(f64::total_cmp);
    let mut out: Vec<Group> = Vec::new();
    for v in all {
        match out.last_mut() {
            Some(g) if v - g.value <= tol.pred => g.merged |= v != g.value,
            _ => out.push(Group { value: v, merged: false }),
        }
    }
    out
}

/// Whether some `k` disks have all pairwise distances greater than `r`.
pub fn decide(disks: &[Disk], k: usize, r: f64) -> Result<bool> {
    decide_with(disks, k, r, &Tolerance::for_disks(disks), &PipelineOptions::default())
}

pub fn decide_with(disks: &[Disk], k: usize, r: f64, tol: &Tolerance, opts: &PipelineOptions) -> Result<bool> {
    if k <= 1 {
        return Ok(true);
    }
    Ok(spread_set(disks, r, tol, opts)?.len() >= k)
}

/// Largest set of disks with pairwise distances greater than `r`.
fn spread_set(disks: &[Disk], r: f64, tol: &Tolerance, opts: &PipelineOptions) -> Result<Vec<usize>> {
    let grown: Vec<Disk> = disks
        .iter()
        .map(|d| Disk {
            weight: 1.0,
            ..grow(d, r / 2.0)
        })
        .collect();
    Ok(solve_convex_mwis_tol(&grown, tol, opts)?.solution.chosen)
}

pub fn solve_dispersion(disks: &[Disk], k: usize) -> Result<DispersionResult> {
    solve_dispersion_with(disks, k, &PipelineOptions::default()).map(|r| r.result)
}

pub fn solve_dispersion_with(disks: &[Disk], k: usize, opts: &PipelineOptions) -> Result<DispersionReport> {
    let n = disks.len();
    if k == 0 || k > n {
        return Err(Error::InfeasibleK { k, n });
    }
    for d in disks {
        d.validate()?;
    }
    let mut ids: Vec<usize> = disks.iter().map(|d| d.id).collect();
    ids.sort_unstable();
    if k == 1 {
        return Ok(DispersionReport {
            result: DispersionResult::unbounded(ids[0]),
            decisions: 0,
            in_merged_band: false,
        });
    }
    let tol = Tolerance::with_scale(disks, opts.eps_scale);
    let radii = candidate_radii_with(disks, &tol);
    let mut decisions = 0;

    // Smallest index whose decision is false; the last candidate is always
    // infeasible because no pair is farther apart than the largest distance.
    let (mut lo, mut hi) = (0, radii.len() - 1);
    let mut witness: Option<Vec<usize>> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        decisions += 1;
        let set = spread_set(disks, radii[mid].value, &tol, opts)?;
        if set.len() >= k {
            lo = mid + 1;
            witness = Some(set);
        } else {
            hi = mid;
        }
    }
    let m = lo;
    let r_star = radii[m].value;

    // Every distance above the previous group exceeds it by more than the
    // tolerance, so a set feasible at the previous candidate realizes r*.
    let chosen = if m == 0 || r_star == 0.0 {
        ids[..k].to_vec()
    } else {
        let mut set = match witness {
            Some(w) if w.len() >= k => w,
            _ => {
                decisions += 1;
                spread_set(disks, radii[m - 1].value, &tol, opts)?
            }
        };
        set.sort_unstable();
        set.truncate(k);
        set
    };
    debug_assert_eq!(chosen.len(), k);
    let picked: Vec<&Disk> = chosen
        .iter()
        .map(|id| disks.iter().find(|d| d.id == *id).expect("chosen id from input"))
        .collect();
    let realized = min_pairwise(&picked);
    if realized < r_star - tol.pred {
        return Err(Error::Inconsistent(format!(
            "extracted set realizes {realized:e}, below the optimum {r_star:e}"
        )));
    }
    Ok(DispersionReport {
        result: DispersionResult {
            r_star,
            chosen,
            unbounded: false,
        },
        decisions,
        in_merged_band: radii[m].merged,
    })
}

fn min_pairwise(disks: &[&Disk]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, a) in disks.iter().enumerate() {
        for b in &disks[i + 1..] {
            m = m.min(disk_distance(a, b));
        }
    }
    m
}
