//! Convex hull of a set of disks.
//!
//! The hull boundary is computed as the upper envelope of the disks' support
//! functions `h_d(β) = ⟨u(β), p_d⟩ + r_d` over the outward normal angle `β`.
//! Each maximal interval on which one disk attains the envelope is a hull
//! arc; the transitions between intervals are the outer common tangents.
//! The envelope is traced by gift wrapping: from the current disk, the next
//! one is the disk whose outer tangent requires the smallest counterclockwise
//! turn of the normal.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geom::{outer_tangent_normal, Disk, Point, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    NotConvexPosition,
    Convex,
    StronglyConvex,
}

/// A maximal arc of one disk on the hull boundary, running counterclockwise
/// from `start` to `end`. For a radius-0 disk the arc is a single vertex and
/// `sweep` is the exterior angle at that vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullArc {
    pub disk_id: usize,
    pub start: Point,
    pub end: Point,
    /// Outward normal angle at `start`.
    pub start_angle: f64,
    /// Angular measure of the arc; `2π` for a lone disk.
    pub sweep: f64,
    pub is_degenerate: bool,
}

impl HullArc {
    pub fn end_angle(&self) -> f64 {
        self.start_angle + self.sweep
    }

    pub fn mid_angle(&self) -> f64 {
        self.start_angle + 0.5 * self.sweep
    }

    /// Does the outward normal angle `beta` fall inside this arc?
    pub fn covers_angle(&self, beta: f64, slack: f64) -> bool {
        let off = (beta - self.start_angle).rem_euclid(TAU);
        off <= self.sweep + slack || off >= TAU - slack
    }
}

/// Tangent segment from the end of one arc to the start of the next.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullSegment {
    pub from_id: usize,
    pub to_id: usize,
    pub start: Point,
    pub end: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskHull {
    /// Arcs in counterclockwise order.
    pub arcs: Vec<HullArc>,
    /// `segments[k]` joins `arcs[k]` to `arcs[k + 1]` (cyclically).
    pub segments: Vec<HullSegment>,
    pub classification: Classification,
    /// Ids of every input disk, including those absent from the hull.
    pub ids: Vec<usize>,
}

impl DiskHull {
    /// Number of maximal arcs per input disk id.
    pub fn arc_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts: BTreeMap<usize, usize> = self.ids.iter().map(|&id| (id, 0)).collect();
        for a in &self.arcs {
            *counts.entry(a.disk_id).or_insert(0) += 1;
        }
        counts
    }

    pub fn arc_count(&self, id: usize) -> usize {
        self.arcs.iter().filter(|a| a.disk_id == id).count()
    }

    /// Disk ids in the counterclockwise order of their unique arcs.
    pub fn cyclic_order(&self) -> Result<Vec<usize>, crate::Error> {
        if self.classification != Classification::StronglyConvex {
            return Err(crate::Error::NotStronglyConvex);
        }
        Ok(self.arcs.iter().map(|a| a.disk_id).collect())
    }
}

pub fn disk_hull(disks: &[Disk]) -> DiskHull {
    disk_hull_with(disks, &Tolerance::for_disks(disks))
}

pub fn cyclic_order(h: &DiskHull) -> Result<Vec<usize>, crate::Error> {
    h.cyclic_order()
}

/// Point of the arc at its angular midpoint; the vertex itself for a
/// radius-0 disk.
pub fn arc_midpoint(a: &HullArc, owner: &Disk) -> Point {
    owner.boundary_point(a.mid_angle())
}

fn derivative(d: &Disk, beta: f64) -> f64 {
    // d/dβ ⟨u(β), p⟩ = ⟨u(β + π/2), p⟩
    Point::unit(beta + FRAC_PI_2).dot(d.center)
}

/// Disks not contained in another disk. Of two coincident disks the one with
/// the smaller id survives.
fn uncovered(disks: &[Disk], tol: &Tolerance) -> Vec<usize> {
    let inside = |a: &Disk, b: &Disk| a.center.dist(b.center) + a.radius <= b.radius + tol.pred;
    (0..disks.len())
        .filter(|&i| {
            let a = &disks[i];
            !disks.iter().enumerate().any(|(j, b)| {
                j != i && inside(a, b) && !(inside(b, a) && (b.id, j) > (a.id, i))
            })
        })
        .collect()
}

struct Piece {
    disk: usize,
    from: f64,
    to: f64,
}

pub fn disk_hull_with(disks: &[Disk], tol: &Tolerance) -> DiskHull {
    let ids: Vec<usize> = disks.iter().map(|d| d.id).collect();
    let live = uncovered(disks, tol);
    let mut hull = DiskHull {
        arcs: Vec::new(),
        segments: Vec::new(),
        classification: Classification::NotConvexPosition,
        ids,
    };
    if live.is_empty() {
        return hull;
    }
    let pieces = if live.len() == 1 {
        vec![Piece {
            disk: live[0],
            from: 0.0,
            to: TAU,
        }]
    } else {
        wrap(disks, &live, tol)
    };
    build_boundary(disks, &pieces, &mut hull);
    hull.classification = classify(&hull);
    hull
}

fn wrap(disks: &[Disk], live: &[usize], tol: &Tolerance) -> Vec<Piece> {
    let beta0 = -FRAC_PI_2;
    let u0 = Point::unit(beta0);
    let hmax = live
        .iter()
        .map(|&i| disks[i].support(u0))
        .fold(f64::NEG_INFINITY, f64::max);
    let start = live
        .iter()
        .copied()
        .filter(|&i| disks[i].support(u0) >= hmax - tol.pred)
        .min_by(|&a, &b| {
            derivative(&disks[b], beta0)
                .total_cmp(&derivative(&disks[a], beta0))
                .then(disks[a].id.cmp(&disks[b].id))
        })
        .expect("non-empty");

    let atol = tol.angle;
    let mut pieces = Vec::new();
    let mut cur = start;
    let mut beta = beta0;
    let mut travelled = 0.0;
    let max_steps = 4 * live.len() + 8;
    for _ in 0..max_steps {
        let a = &disks[cur];
        let da = derivative(a, beta);
        // (turn, derivative at entry, id, index)
        let mut best: Option<(f64, f64, usize, usize)> = None;
        for &j in live {
            if j == cur {
                continue;
            }
            let b = &disks[j];
            let Some(entry) = outer_tangent_normal(a, b) else {
                continue;
            };
            let mut turn = (entry - beta).rem_euclid(TAU);
            if turn > TAU - atol {
                turn = 0.0;
            }
            if turn <= atol && derivative(b, beta) <= da + tol.pred {
                // Touches the current tangent line without overtaking.
                continue;
            }
            let db = derivative(b, entry);
            let better = match best {
                None => true,
                Some((bt, bd, bid, _)) => {
                    if (turn - bt).abs() <= atol {
                        db > bd + tol.pred || ((db - bd).abs() <= tol.pred && b.id < bid)
                    } else {
                        turn < bt
                    }
                }
            };
            if better {
                best = Some((turn, db, b.id, j));
            }
        }
        let Some((turn, _, _, next)) = best else {
            break;
        };
        if travelled + turn >= TAU - atol {
            pieces.push(Piece {
                disk: cur,
                from: beta,
                to: beta0 + TAU,
            });
            break;
        }
        pieces.push(Piece {
            disk: cur,
            from: beta,
            to: beta + turn,
        });
        travelled += turn;
        beta += turn;
        cur = next;
    }

    // The first and last pieces both belong to the start disk; join them.
    if pieces.len() >= 2 && pieces[0].disk == pieces[pieces.len() - 1].disk {
        let first = pieces.remove(0);
        let last = pieces.last_mut().expect("non-empty");
        last.to = first.to + TAU;
    }
    // Drop zero-measure pieces, then merge neighbours that became adjacent.
    pieces.retain(|p| p.to - p.from > atol);
    let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match merged.last_mut() {
            Some(m) if m.disk == p.disk => m.to = p.to,
            _ => merged.push(p),
        }
    }
    if merged.len() >= 2 && merged[0].disk == merged[merged.len() - 1].disk {
        let first = merged.remove(0);
        let last = merged.last_mut().expect("non-empty");
        last.to = first.to + TAU;
    }
    merged
}

fn build_boundary(disks: &[Disk], pieces: &[Piece], hull: &mut DiskHull) {
    for p in pieces {
        let d = &disks[p.disk];
        let sweep = (p.to - p.from).min(TAU);
        let start_angle = p.from.rem_euclid(TAU);
        hull.arcs.push(HullArc {
            disk_id: d.id,
            start: d.boundary_point(start_angle),
            end: d.boundary_point(start_angle + sweep),
            start_angle,
            sweep,
            is_degenerate: d.radius == 0.0,
        });
    }
    if hull.arcs.len() >= 2 {
        let n = hull.arcs.len();
        for k in 0..n {
            let (a, b) = (&hull.arcs[k], &hull.arcs[(k + 1) % n]);
            hull.segments.push(HullSegment {
                from_id: a.disk_id,
                to_id: b.disk_id,
                start: a.end,
                end: b.start,
            });
        }
    }
}

fn classify(hull: &DiskHull) -> Classification {
    let counts = hull.arc_counts();
    if counts.values().any(|&c| c == 0) {
        Classification::NotConvexPosition
    } else if counts.values().all(|&c| c == 1) {
        Classification::StronglyConvex
    } else {
        Classification::Convex
    }
}

/// Independent sampling check of a claimed hull against the disks.
///
/// Checks that (a) every sampled point on a claimed arc supports all disks,
/// (b) every sampled boundary direction where a disk strictly dominates is
/// covered by one of its arcs and no arc claims a direction where it is
/// strictly dominated, and (c) arcs and segments alternate with tangent,
/// gap-free transitions.
pub fn hull_validate(disks: &[Disk], h: &DiskHull) -> bool {
    const SAMPLES: usize = 64;
    let tol = Tolerance::for_disks(disks);
    let eps = tol.pred * 100.0;
    let slack = 1e-7;
    if disks.is_empty() {
        return h.arcs.is_empty();
    }
    if h.arcs.is_empty() {
        return false;
    }
    let by_id: BTreeMap<usize, &Disk> = disks.iter().map(|d| (d.id, d)).collect();
    let support_max = |u: Point| disks.iter().map(|d| d.support(u)).fold(f64::NEG_INFINITY, f64::max);

    // (c) structure: endpoints, tangency, alternation, total turn.
    let total: f64 = h.arcs.iter().map(|a| a.sweep).sum();
    if (total - TAU).abs() > 1e-6 {
        return false;
    }
    for a in &h.arcs {
        let Some(d) = by_id.get(&a.disk_id) else {
            return false;
        };
        if a.sweep < 0.0
            || a.start.dist(d.boundary_point(a.start_angle)) > eps
            || a.end.dist(d.boundary_point(a.end_angle())) > eps
        {
            return false;
        }
    }
    let n = h.arcs.len();
    if n >= 2 {
        if h.segments.len() != n {
            return false;
        }
        for k in 0..n {
            let (a, b, s) = (&h.arcs[k], &h.arcs[(k + 1) % n], &h.segments[k]);
            if a.disk_id == b.disk_id
                || s.from_id != a.disk_id
                || s.to_id != b.disk_id
                || s.start.dist(a.end) > eps
                || s.end.dist(b.start) > eps
            {
                return false;
            }
            let gap = (b.start_angle - a.end_angle()).rem_euclid(TAU);
            if gap.min(TAU - gap) > slack {
                return false;
            }
            let u = Point::unit(b.start_angle);
            let (da, db) = (by_id[&a.disk_id], by_id[&b.disk_id]);
            if (da.support(u) - db.support(u)).abs() > eps || (s.end - s.start).dot(u).abs() > eps {
                return false;
            }
        }
    } else if !h.segments.is_empty() {
        return false;
    }

    // (a) supporting lines along every arc.
    for a in &h.arcs {
        let d = by_id[&a.disk_id];
        for s in 0..=SAMPLES + 1 {
            let beta = a.start_angle + a.sweep * (s as f64) / (SAMPLES + 1) as f64;
            let u = Point::unit(beta);
            if support_max(u) > d.support(u) + eps {
                return false;
            }
        }
    }

    // (b) coverage of strictly dominant directions.
    for d in disks {
        let arcs: Vec<&HullArc> = h.arcs.iter().filter(|a| a.disk_id == d.id).collect();
        for s in 0..SAMPLES {
            let beta = TAU * (s as f64 + 0.5) / SAMPLES as f64 - PI;
            let u = Point::unit(beta);
            let mine = d.support(u);
            let other = disks
                .iter()
                .filter(|o| o.id != d.id)
                .map(|o| o.support(u))
                .fold(f64::NEG_INFINITY, f64::max);
            let covered = arcs.iter().any(|a| a.covers_angle(beta, slack));
            if mine > other + eps && !covered {
                return false;
            }
            if mine < other - eps && arcs.iter().any(|a| a.covers_angle(beta, -slack)) {
                return false;
            }
        }
    }
    true
}
