//! Auxiliary-point constructions and the end-to-end MWIS pipeline.
//!
//! `eliminate_arcs_z` adds radius-0 points that cut away surplus hull arcs
//! until every disk owns exactly one arc. `build_aux_b` then places one point
//! in every pocket between consecutive arcs, which makes every subset of the
//! disks strongly convex once the points are added. Auxiliary points are
//! disjoint from every disk, so they are always selected and can be stripped.

use std::f64::consts::PI;

use crate::dp::{extract_optimum, solve_fast, solve_naive, OrderedInstance, Solution, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::geom::{Disk, Point, Tolerance};
use crate::hull::{disk_hull_with, Classification, DiskHull, HullArc};

/// Which construction produced an auxiliary point, and from which hull feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance {
    /// Pocket between the arc of `owner` and the next arc counterclockwise.
    B { owner: usize, next: usize },
    /// Cut for the arc of `disk` starting at normal angle `arc_start`.
    Z { disk: usize, arc_start: f64, arc_sweep: f64 },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuxiliaryPoints {
    pub points: Vec<Disk>,
    pub provenance: Vec<Provenance>,
}

impl AuxiliaryPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn push(&mut self, d: Disk, p: Provenance) {
        self.points.push(d);
        self.provenance.push(p);
    }
}

/// The line `{x : n·x = c}`; the hull lies on the side `n·x < c`.
#[derive(Clone, Copy, Debug)]
struct Line {
    normal: Point,
    offset: f64,
}

impl Line {
    fn support(d: &Disk, angle: f64) -> Self {
        let normal = Point::unit(angle);
        Line {
            normal,
            offset: d.support(normal),
        }
    }

    fn shifted(self, by: f64) -> Self {
        Line {
            offset: self.offset - by,
            ..self
        }
    }

    /// Signed distance, positive outside.
    fn excess(&self, q: Point) -> f64 {
        self.normal.dot(q) - self.offset
    }

    fn meet(&self, o: &Line) -> Option<Point> {
        let det = self.normal.cross(o.normal);
        if det.abs() < 1e-14 {
            return None;
        }
        Some(Point::new(
            (self.offset * o.normal.y - o.offset * self.normal.y) / det,
            (self.normal.x * o.offset - o.normal.x * self.offset) / det,
        ))
    }
}

fn strictly_outside_all(q: Point, disks: &[Disk], tol: &Tolerance) -> bool {
    disks.iter().all(|d| q.dist(d.center) > d.radius + tol.pred)
}

fn owner<'a>(disks: &'a [Disk], arc: &HullArc) -> &'a Disk {
    disks.iter().find(|d| d.id == arc.disk_id).expect("arc owner in input")
}

fn next_id(disks: &[Disk]) -> usize {
    disks.iter().map(|d| d.id + 1).max().unwrap_or(0)
}

/// One point per pocket of a strongly convex instance, with default weight 1
/// and ids following the largest input id.
pub fn build_aux_b(disks: &[Disk]) -> Result<AuxiliaryPoints> {
    build_aux_b_with(disks, &Tolerance::for_disks(disks), next_id(disks), 1.0)
}

/// Point `b_i` sits where the tangent lines at the midpoints of arcs `i` and
/// `i + 1` meet, after both lines are pushed toward the hull by a fraction of
/// the gap separating each arc owner from every other disk in that direction.
/// The push keeps `b_i` beyond the common tangent of the two disks.
pub fn build_aux_b_with(disks: &[Disk], tol: &Tolerance, first_id: usize, weight: f64) -> Result<AuxiliaryPoints> {
    if disks.len() < 3 {
        return Err(Error::TooFewDisks(disks.len()));
    }
    let hull = disk_hull_with(disks, tol);
    if hull.classification != Classification::StronglyConvex {
        return Err(Error::NotStronglyConvex);
    }
    let arcs = &hull.arcs;
    let m = arcs.len();
    let tangent: Vec<Line> = arcs.iter().map(|a| Line::support(owner(disks, a), a.mid_angle())).collect();
    let push: Vec<f64> = arcs
        .iter()
        .zip(&tangent)
        .map(|(a, l)| {
            let rival = disks
                .iter()
                .filter(|d| d.id != a.disk_id)
                .map(|d| d.support(l.normal))
                .fold(f64::NEG_INFINITY, f64::max);
            ((l.offset - rival) / 2.0).clamp(0.0, 1e-3 * tol.diameter)
        })
        .collect();

    let mut out = AuxiliaryPoints::default();
    for i in 0..m {
        let k = (i + 1) % m;
        let rho = Line::support(owner(disks, &arcs[i]), arcs[i].end_angle());
        let base = tangent[i]
            .meet(&tangent[k])
            .ok_or_else(|| Error::AuxiliaryPlacement(format!("parallel tangents after disk {}", arcs[i].disk_id)))?;
        let base_margin = rho.excess(base);
        let mut scale = 1.0;
        let point = loop {
            let cand = tangent[i]
                .shifted(scale * push[i])
                .meet(&tangent[k].shifted(scale * push[k]));
            if let Some(b) = cand {
                if rho.excess(b) >= 0.5 * base_margin && strictly_outside_all(b, disks, tol) {
                    break b;
                }
            }
            scale *= 0.5;
            if scale < 1e-12 {
                if base_margin > tol.pred && strictly_outside_all(base, disks, tol) {
                    break base;
                }
                return Err(Error::AuxiliaryPlacement(format!(
                    "no exterior point between disks {} and {}",
                    arcs[i].disk_id, arcs[k].disk_id
                )));
            }
        };
        out.push(
            Disk::auxiliary(first_id + i, point, weight),
            Provenance::B {
                owner: arcs[i].disk_id,
                next: arcs[k].disk_id,
            },
        );
    }
    Ok(out)
}

/// Points that leave every disk with a single hull arc, default weight 1.
pub fn eliminate_arcs_z(disks: &[Disk]) -> Result<AuxiliaryPoints> {
    eliminate_arcs_z_with(disks, &Tolerance::for_disks(disks), next_id(disks), 1.0)
}

/// Repeatedly takes the disk with the most arcs, picks its shortest arc below
/// a half turn, and places a point just beyond the apex of the two tangent
/// lines bounding that arc. The point is kept only if it removes exactly that
/// arc and leaves every other arc count unchanged.
pub fn eliminate_arcs_z_with(disks: &[Disk], tol: &Tolerance, first_id: usize, weight: f64) -> Result<AuxiliaryPoints> {
    let mut out = AuxiliaryPoints::default();
    let mut current = disks.to_vec();
    let cap = 2 * disks.len();
    loop {
        let hull = disk_hull_with(&current, tol);
        match hull.classification {
            Classification::NotConvexPosition => return Err(Error::NotConvexPosition),
            Classification::StronglyConvex => return Ok(out),
            Classification::Convex => {}
        }
        if out.len() >= cap {
            return Err(Error::AuxiliaryPlacement(format!("more than {cap} cut points needed")));
        }
        let z = place_cut(&current, &hull, tol, first_id + out.len(), weight)?;
        current.push(z.0);
        out.push(z.0, z.1);
    }
}

fn place_cut(current: &[Disk], hull: &DiskHull, tol: &Tolerance, id: usize, weight: f64) -> Result<(Disk, Provenance)> {
    let counts = hull.arc_counts();
    let (&target, _) = counts
        .iter()
        .filter(|(_, &c)| c >= 2)
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("a convex hull that is not strongly convex has a repeated disk");
    let arcs = &hull.arcs;
    let m = arcs.len();
    let a = (0..m)
        .filter(|&a| arcs[a].disk_id == target && arcs[a].sweep < PI - tol.angle)
        .min_by(|&x, &y| arcs[x].sweep.total_cmp(&arcs[y].sweep))
        .ok_or_else(|| Error::AuxiliaryPlacement(format!("disk {target} has no arc below a half turn")))?;
    let prev = &arcs[(a + m - 1) % m];
    let next = &arcs[(a + 1) % m];
    if prev.disk_id == target || next.disk_id == target {
        return Err(Error::SelfAdjacentArc(target));
    }
    let arc = &arcs[a];
    let d = owner(current, arc);
    let rho_in = Line::support(d, arc.start_angle);
    let rho_out = Line::support(d, arc.end_angle());
    let ell_prev = Line::support(owner(current, prev), prev.mid_angle());
    let ell_next = Line::support(owner(current, next), next.mid_angle());
    let q = rho_in
        .meet(&rho_out)
        .ok_or_else(|| Error::AuxiliaryPlacement(format!("tangents of disk {target} are parallel")))?;
    let outward = Point::unit(arc.mid_angle());
    let before = counts;

    let mut delta = 1e-3 * tol.diameter;
    for _ in 0..60 {
        let z = q + outward * delta;
        delta *= 0.5;
        let inside_q = rho_in.excess(z) > tol.pred
            && rho_out.excess(z) > tol.pred
            && ell_prev.excess(z) < -tol.pred
            && ell_next.excess(z) < -tol.pred;
        if !inside_q || !strictly_outside_all(z, current, tol) {
            continue;
        }
        let cand = Disk::auxiliary(id, z, weight);
        let mut trial = current.to_vec();
        trial.push(cand);
        let after = disk_hull_with(&trial, tol);
        if after.classification == Classification::NotConvexPosition {
            continue;
        }
        let ok = before.iter().all(|(&disk, &c)| {
            let expect = if disk == target { c - 1 } else { c };
            after.arc_count(disk) == expect
        }) && after.arc_count(id) == 1;
        if ok {
            return Ok((
                cand,
                Provenance::Z {
                    disk: target,
                    arc_start: arc.start_angle,
                    arc_sweep: arc.sweep,
                },
            ));
        }
    }
    Err(Error::AuxiliaryPlacement(format!("no cut point for an arc of disk {target}")))
}

/// Knobs for [`solve_convex_mwis_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Predicate tolerance as a fraction of the instance diameter.
    pub eps_scale: f64,
    /// Weight given to every auxiliary point; any positive value works.
    pub aux_weight: f64,
    /// Cap on the augmented instance size.
    pub max_n: usize,
    pub use_naive: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            eps_scale: Tolerance::DEFAULT_SCALE,
            aux_weight: 1.0,
            max_n: DEFAULT_MAX_N,
            use_naive: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    /// Optimum over the input disks, in input ids.
    pub solution: Solution,
    /// Optimum of the augmented instance, before auxiliary points are
    /// stripped. Ids are positions in `augmented`.
    pub internal: Solution,
    /// Input disks, then cut points, then pocket points; `id` = position.
    pub augmented: Vec<Disk>,
    pub z_count: usize,
    pub b_count: usize,
    pub degenerate_triples: usize,
}

/// Maximum-weight independent set of disks in convex position.
pub fn solve_convex_mwis(disks: &[Disk]) -> Result<Solution> {
    solve_convex_mwis_with(disks, &PipelineOptions::default()).map(|r| r.solution)
}

pub fn solve_convex_mwis_with(disks: &[Disk], opts: &PipelineOptions) -> Result<PipelineReport> {
    let tol = Tolerance::with_scale(disks, opts.eps_scale);
    solve_convex_mwis_tol(disks, &tol, opts)
}

/// As [`solve_convex_mwis_with`] with an explicit tolerance, so callers that
/// transform an instance can keep the predicates of the original.
pub fn solve_convex_mwis_tol(disks: &[Disk], tol: &Tolerance, opts: &PipelineOptions) -> Result<PipelineReport> {
    for d in disks {
        d.validate()?;
    }
    let mut augmented: Vec<Disk> = disks
        .iter()
        .enumerate()
        .map(|(i, d)| Disk { id: i, ..*d })
        .collect();
    let n = augmented.len();

    if n < 3 {
        let internal = tiny_mwis(&augmented, tol);
        return Ok(PipelineReport {
            solution: strip(&internal, disks),
            internal,
            augmented,
            z_count: 0,
            b_count: 0,
            degenerate_triples: 0,
        });
    }
    if disk_hull_with(&augmented, tol).classification == Classification::NotConvexPosition {
        return Err(Error::NotConvexPosition);
    }
    let z = eliminate_arcs_z_with(&augmented, tol, n, opts.aux_weight)?;
    augmented.extend(z.points.iter().copied());
    let b = build_aux_b_with(&augmented, tol, augmented.len(), opts.aux_weight)?;
    augmented.extend(b.points.iter().copied());

    let inst = OrderedInstance::with_limits(&augmented, *tol, opts.max_n)?;
    let table = if opts.use_naive { solve_naive(&inst) } else { solve_fast(&inst) };
    let internal = extract_optimum(&inst, &table);
    Ok(PipelineReport {
        solution: strip(&internal, disks),
        internal,
        augmented,
        z_count: z.len(),
        b_count: b.len(),
        degenerate_triples: table.degenerate_triples,
    })
}

/// Input disks of an internal solution; internal ids are input positions.
fn strip(internal: &Solution, disks: &[Disk]) -> Solution {
    Solution::from_disks(internal.chosen.iter().filter(|&&i| i < disks.len()).map(|&i| &disks[i]))
}

/// Best of the at most four subsets of a one- or two-disk instance.
fn tiny_mwis(disks: &[Disk], tol: &Tolerance) -> Solution {
    use crate::geom::{disks_disjoint, Disjointness};
    let mut best = Solution::default();
    let mut consider = |s: Solution| {
        if s.total_weight > best.total_weight {
            best = s;
        }
    };
    for d in disks {
        consider(Solution::from_disks([d]));
    }
    if let [a, b] = disks {
        if disks_disjoint(a, b, Disjointness::Strict, tol) {
            consider(Solution::from_disks([a, b]));
        }
    }
    best
}
