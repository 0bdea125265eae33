//! Dynamic program for disks in strongly convex position.
//!
//! Disks are indexed by their counterclockwise position on the hull. For a
//! disjoint ordered pair `(i, j)` and a third index `k` on the far side
//! (`k` in `interval(j, i)`) such that `{i, j, k}` is a strongly convex
//! independent triple, `f(i, j, k)` is the best weight of a subset of the
//! disks strictly between `i` and `j` that avoids `i`, `j` and the tangent
//! disk of the triple, and whose union with `{i, j}` is again a strongly
//! convex independent set. `k = None` replaces the tangent disk by the upper
//! halfplane of the pair and so imposes no extra constraint.
//!
//! Both evaluators fill pairs in increasing cyclic interval length, so every
//! right-hand side `f(i, l, j)`, `f(l, j, i)` is already known.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{apollonius_vertex, disks_disjoint, outer_tangent_normal, pair_frame, triple_strongly_convex};
use crate::geom::{ApolloniusDisk, Disjointness, Disk, Point, Tolerance};
use crate::hull::disk_hull_with;

/// Default cap on the number of disks a single solve accepts.
pub const DEFAULT_MAX_N: usize = 512;

const NONE: u32 = u32::MAX;

/// Disks re-indexed by their counterclockwise hull order.
#[derive(Clone, Debug)]
pub struct OrderedInstance {
    disks: Vec<Disk>,
    tol: Tolerance,
}

impl OrderedInstance {
    pub fn new(disks: &[Disk]) -> Result<Self> {
        Self::with_tolerance(disks, Tolerance::for_disks(disks))
    }

    pub fn with_tolerance(disks: &[Disk], tol: Tolerance) -> Result<Self> {
        Self::with_limits(disks, tol, DEFAULT_MAX_N)
    }

    pub fn with_limits(disks: &[Disk], tol: Tolerance, max_n: usize) -> Result<Self> {
        if disks.len() > max_n {
            return Err(Error::TooLarge {
                n: disks.len(),
                max: max_n,
            });
        }
        for d in disks {
            d.validate()?;
        }
        if disks.is_empty() {
            return Ok(OrderedInstance { disks: Vec::new(), tol });
        }
        let hull = disk_hull_with(disks, &tol);
        let order = hull.cyclic_order()?;
        let ordered = order
            .iter()
            .map(|id| *disks.iter().find(|d| d.id == *id).expect("hull id from input"))
            .collect();
        Ok(OrderedInstance { disks: ordered, tol })
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn disk(&self, i: usize) -> &Disk {
        &self.disks[i]
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    fn disjoint(&self, a: usize, b: usize) -> bool {
        disks_disjoint(&self.disks[a], &self.disks[b], Disjointness::Strict, &self.tol)
    }
}

/// Indices strictly between `i` and `j`, counterclockwise, wrapping past `n - 1`.
pub fn interval(n: usize, i: usize, j: usize) -> Vec<usize> {
    debug_assert!(i != j && i < n && j < n);
    let len = (j + n - i) % n;
    (1..len).map(|s| (i + s) % n).collect()
}

/// Members of `interval(i, j)` forming a strongly convex independent triple
/// with `i` and `j`.
pub fn candidate_set(inst: &OrderedInstance, i: usize, j: usize) -> Vec<usize> {
    if !inst.disjoint(i, j) {
        return Vec::new();
    }
    interval(inst.len(), i, j)
        .into_iter()
        .filter(|&h| {
            inst.disjoint(h, i)
                && inst.disjoint(h, j)
                && triple_strongly_convex(&inst.disks[i], &inst.disks[j], &inst.disks[h], &inst.tol)
        })
        .collect()
}

/// Members of `cands` strictly disjoint from the tangent disk. The halfplane
/// sentinel keeps everything.
pub fn filter_by_apollonius(inst: &OrderedInstance, cands: &[usize], k_disk: &ApolloniusDisk) -> Vec<usize> {
    cands
        .iter()
        .copied()
        .filter(|&h| k_disk.is_disjoint_from(&inst.disks[h], &inst.tol))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
struct PairEntry {
    f0: f64,
    back0: u32,
    /// Proper third indices, in counterclockwise order starting after `j`.
    ks: Vec<u32>,
    /// Positions into `ks` in increasing bisector order of the tangent disks.
    order: Vec<u32>,
    values: Vec<f64>,
    back: Vec<u32>,
}

/// `f` values and backpointers for every canonical triple.
#[derive(Clone, Debug, PartialEq)]
pub struct DpTable {
    n: usize,
    entries: Vec<Option<PairEntry>>,
    /// Canonical triples whose tangent disk has no finite solution because
    /// the third disk touches the common tangent line of the pair. They are
    /// replaced by the limiting halfplane; see [`TangentDisk`].
    pub degenerate_triples: usize,
}

fn opt(x: u32) -> Option<usize> {
    (x != NONE).then_some(x as usize)
}

impl DpTable {
    pub fn n(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> Option<&PairEntry> {
        if i == j || i >= self.n || j >= self.n {
            return None;
        }
        self.entries[i * self.n + j].as_ref()
    }

    fn rank(&self, e: &PairEntry, j: usize, k: usize) -> Option<usize> {
        let n = self.n;
        let off = |x: u32| (x as usize + n - j) % n;
        let target = (k + n - j) % n;
        e.ks
            .binary_search_by(|&x| off(x).cmp(&target))
            .ok()
    }

    /// `f(i, j, k)`, or `None` if `(i, j, k)` is not a canonical triple.
    pub fn f(&self, i: usize, j: usize, k: Option<usize>) -> Option<f64> {
        let e = self.entry(i, j)?;
        match k {
            None => Some(e.f0),
            Some(k) => self.rank(e, j, k).map(|r| e.values[r]),
        }
    }

    /// The maximizing middle disk of `f(i, j, k)`.
    pub fn backpointer(&self, i: usize, j: usize, k: Option<usize>) -> Option<usize> {
        let e = self.entry(i, j)?;
        match k {
            None => opt(e.back0),
            Some(k) => self.rank(e, j, k).and_then(|r| opt(e.back[r])),
        }
    }

    /// Proper `k` of the pair in increasing bisector order.
    pub fn sorted_k(&self, i: usize, j: usize) -> Vec<usize> {
        self.entry(i, j)
            .map(|e| e.order.iter().map(|&r| e.ks[r as usize] as usize).collect())
            .unwrap_or_default()
    }

    /// Number of stored `f` values, counting the `k = None` entries.
    pub fn len(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .map(|e| 1 + e.values.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest absolute difference between two tables of identical shape, or
    /// `None` if their canonical triples differ.
    pub fn max_abs_diff(&self, other: &DpTable) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) if a.ks == b.ks => {
                    worst = worst.max((a.f0 - b.f0).abs());
                    for (x, y) in a.values.iter().zip(&b.values) {
                        worst = worst.max((x - y).abs());
                    }
                }
                _ => return None,
            }
        }
        Some(worst)
    }

    pub fn same_backpointers(&self, other: &DpTable) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| match (a, b) {
                    (None, None) => true,
                    (Some(a), Some(b)) => a.back0 == b.back0 && a.back == b.back,
                    _ => false,
                })
    }
}

/// Pair data shared by both evaluators.
struct Prep {
    n: usize,
    disjoint: Vec<bool>,
    /// `dprime[i * n + j]` = candidate_set(i, j), counterclockwise.
    dprime: Vec<Vec<u32>>,
}

impl Prep {
    fn new(inst: &OrderedInstance) -> Self {
        let n = inst.len();
        let mut disjoint = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                disjoint[i * n + j] = i != j && inst.disjoint(i, j);
            }
        }
        // Strong convexity of each independent triple, computed once per
        // unordered triple. Bit index: (a * n + b) * n + c with a < b < c.
        let mut convex = vec![0u64; (n * n * n).div_ceil(64)];
        for a in 0..n {
            for b in a + 1..n {
                if !disjoint[a * n + b] {
                    continue;
                }
                for c in b + 1..n {
                    if disjoint[a * n + c]
                        && disjoint[b * n + c]
                        && triple_strongly_convex(&inst.disks[a], &inst.disks[b], &inst.disks[c], &inst.tol)
                    {
                        let bit = (a * n + b) * n + c;
                        convex[bit / 64] |= 1 << (bit % 64);
                    }
                }
            }
        }
        let is_convex = |x: usize, y: usize, z: usize| {
            let mut t = [x, y, z];
            t.sort_unstable();
            let bit = (t[0] * n + t[1]) * n + t[2];
            convex[bit / 64] >> (bit % 64) & 1 == 1
        };
        let mut dprime = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j || !disjoint[i * n + j] {
                    continue;
                }
                dprime[i * n + j] = interval(n, i, j)
                    .into_iter()
                    .filter(|&h| is_convex(i, j, h))
                    .map(|h| h as u32)
                    .collect();
            }
        }
        Prep { n, disjoint, dprime }
    }

    fn is_disjoint(&self, i: usize, j: usize) -> bool {
        self.disjoint[i * self.n + j]
    }

    fn dprime(&self, i: usize, j: usize) -> &[u32] {
        &self.dprime[i * self.n + j]
    }
}

/// Pairs in increasing cyclic interval length.
fn pair_schedule(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(move |len| (0..n).map(move |i| (i, (i + len) % n)))
}

/// Constraint a proper `k` puts on the candidates of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TangentDisk {
    Solved(ApolloniusDisk),
    /// Degenerate limit covering the whole candidate side of the pair.
    /// Sorts first.
    Blocking,
    /// Degenerate limit lying beyond the pair's outer tangent. Sorts last.
    Open,
}

impl TangentDisk {
    /// Degenerate triples resolve by the side of the pair's outer tangent
    /// line on which the third disk lies; touching counts as not crossing.
    fn new(a: &Disk, b: &Disk, c: &Disk, tol: &Tolerance) -> (Self, bool) {
        match apollonius_vertex(a, b, c, tol) {
            Ok(v) => (TangentDisk::Solved(v), false),
            Err(_) => {
                let crosses = outer_tangent_normal(b, a).is_some_and(|beta| {
                    let n = Point::unit(beta);
                    c.support(n) > b.support(n)
                });
                (if crosses { TangentDisk::Open } else { TangentDisk::Blocking }, true)
            }
        }
    }

    pub fn admits(&self, d: &Disk, tol: &Tolerance) -> bool {
        match self {
            TangentDisk::Solved(a) => a.is_disjoint_from(d, tol),
            TangentDisk::Blocking => false,
            TangentDisk::Open => true,
        }
    }

    fn order_key(&self, frame: &crate::geom::PairFrame) -> f64 {
        match self {
            TangentDisk::Solved(a) => a.order_key(frame),
            TangentDisk::Blocking => f64::NEG_INFINITY,
            TangentDisk::Open => f64::INFINITY,
        }
    }
}

/// Proper tangent disks of the pair, sorted by bisector order with ties inside
/// the predicate tolerance broken by disk id.
struct SortedK {
    ks: Vec<u32>,
    disks: Vec<TangentDisk>,
    order: Vec<u32>,
    degenerate: usize,
}

fn sorted_k(inst: &OrderedInstance, prep: &Prep, i: usize, j: usize) -> SortedK {
    let (di, dj) = (&inst.disks[i], &inst.disks[j]);
    let frame = pair_frame(di, dj, &inst.tol).expect("disjoint disks have distinct centers");
    let mut ks = Vec::new();
    let mut disks = Vec::new();
    let mut keys = Vec::new();
    let mut degenerate = 0;
    for &k in prep.dprime(j, i) {
        let (t, degen) = TangentDisk::new(di, dj, &inst.disks[k as usize], &inst.tol);
        degenerate += degen as usize;
        keys.push(t.order_key(&frame));
        ks.push(k);
        disks.push(t);
    }
    let id = |r: u32| inst.disks[ks[r as usize] as usize].id;
    let mut order: Vec<u32> = (0..ks.len() as u32).collect();
    order.sort_by(|&a, &b| {
        keys[a as usize]
            .total_cmp(&keys[b as usize])
            .then(id(a).cmp(&id(b)))
    });
    // Runs of keys within tolerance are ordered by id.
    let mut s = 0;
    while s < order.len() {
        let mut e = s + 1;
        while e < order.len() && keys[order[e] as usize] - keys[order[e - 1] as usize] <= inst.tol.pred {
            e += 1;
        }
        order[s..e].sort_by_key(|&r| id(r));
        s = e;
    }
    SortedK {
        ks,
        disks,
        order,
        degenerate,
    }
}

struct Best {
    value: f64,
    arg: u32,
    id: usize,
}

impl Best {
    fn empty() -> Self {
        Best {
            value: 0.0,
            arg: NONE,
            id: usize::MAX,
        }
    }

    /// Strict improvement wins; equal values go to the smaller disk id. The
    /// empty choice is never displaced by a tie.
    fn offer(&mut self, value: f64, arg: u32, id: usize) {
        let take = match value.total_cmp(&self.value) {
            Ordering::Greater => true,
            Ordering::Equal => self.arg != NONE && id < self.id,
            Ordering::Less => false,
        };
        if take {
            *self = Best { value, arg, id };
        }
    }
}

/// `cost(l) = f(i, l, j) + f(l, j, i) + W_l` for every candidate.
fn costs(table: &DpTable, inst: &OrderedInstance, i: usize, j: usize, cands: &[u32]) -> Vec<f64> {
    cands
        .iter()
        .map(|&l| {
            let l = l as usize;
            let left = table.f(i, l, Some(j));
            let right = table.f(l, j, Some(i));
            debug_assert!(left.is_some() && right.is_some(), "missing subproblem ({i},{l},{j})");
            left.unwrap_or(0.0) + right.unwrap_or(0.0) + inst.disks[l].weight
        })
        .collect()
}

fn empty_table(n: usize) -> DpTable {
    DpTable {
        n,
        entries: vec![None; n * n],
        degenerate_triples: 0,
    }
}

fn intersecting_entry(inst: &OrderedInstance, i: usize, j: usize) -> PairEntry {
    PairEntry {
        f0: -inst.disks[i].weight - inst.disks[j].weight,
        back0: NONE,
        ks: Vec::new(),
        order: Vec::new(),
        values: Vec::new(),
        back: Vec::new(),
    }
}

/// Reference evaluation: every `f(i, j, k)` scans its whole candidate set.
pub fn solve_naive(inst: &OrderedInstance) -> DpTable {
    let n = inst.len();
    let mut table = empty_table(n);
    if n < 2 {
        return table;
    }
    let prep = Prep::new(inst);
    for (i, j) in pair_schedule(n) {
        if !prep.is_disjoint(i, j) {
            table.entries[i * n + j] = Some(intersecting_entry(inst, i, j));
            continue;
        }
        let cands = prep.dprime(i, j);
        let cost = costs(&table, inst, i, j, cands);
        let sk = sorted_k(inst, &prep, i, j);
        table.degenerate_triples += sk.degenerate;

        let mut all = Best::empty();
        for (c, &l) in cands.iter().enumerate() {
            all.offer(cost[c], l, inst.disks[l as usize].id);
        }
        let mut values = Vec::with_capacity(sk.ks.len());
        let mut back = Vec::with_capacity(sk.ks.len());
        for a in &sk.disks {
            let mut best = Best::empty();
            for (c, &l) in cands.iter().enumerate() {
                if a.admits(&inst.disks[l as usize], &inst.tol) {
                    best.offer(cost[c], l, inst.disks[l as usize].id);
                }
            }
            values.push(best.value);
            back.push(best.arg);
        }
        table.entries[i * n + j] = Some(PairEntry {
            f0: all.value,
            back0: all.arg,
            ks: sk.ks,
            order: sk.order,
            values,
            back,
        });
    }
    table
}

/// Labelled evaluation. Along the bisector order the admissible candidate
/// sets are nested, so each candidate gets the first rank at which it becomes
/// admissible (binary search) and one running maximum over ranks yields all
/// `f(i, j, k)` of the pair.
pub fn solve_fast(inst: &OrderedInstance) -> DpTable {
    let n = inst.len();
    let mut table = empty_table(n);
    if n < 2 {
        return table;
    }
    let prep = Prep::new(inst);
    let mut buckets: Vec<Vec<u32>> = Vec::new();
    for (i, j) in pair_schedule(n) {
        if !prep.is_disjoint(i, j) {
            table.entries[i * n + j] = Some(intersecting_entry(inst, i, j));
            continue;
        }
        let cands = prep.dprime(i, j);
        let cost = costs(&table, inst, i, j, cands);
        let sk = sorted_k(inst, &prep, i, j);
        table.degenerate_triples += sk.degenerate;
        let g = sk.ks.len();

        buckets.clear();
        buckets.resize(g + 1, Vec::new());
        let mut all = Best::empty();
        for (c, &l) in cands.iter().enumerate() {
            let dl = &inst.disks[l as usize];
            all.offer(cost[c], l, dl.id);
            let label = sk
                .order
                .partition_point(|&r| !sk.disks[r as usize].admits(dl, &inst.tol));
            buckets[label].push(c as u32);
        }

        let mut values = vec![0.0; g];
        let mut back = vec![NONE; g];
        let mut running = Best::empty();
        for t in 0..g {
            for &c in &buckets[t] {
                let l = cands[c as usize];
                running.offer(cost[c as usize], l, inst.disks[l as usize].id);
            }
            let r = sk.order[t] as usize;
            values[r] = running.value;
            back[r] = running.arg;
        }
        table.entries[i * n + j] = Some(PairEntry {
            f0: all.value,
            back0: all.arg,
            ks: sk.ks,
            order: sk.order,
            values,
            back,
        });
    }
    table
}

/// Selected disk ids and their total weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Solution {
    pub chosen: Vec<usize>,
    pub total_weight: f64,
}

impl Solution {
    pub fn from_disks<'a>(disks: impl IntoIterator<Item = &'a Disk>) -> Self {
        let mut chosen = Vec::new();
        let mut total_weight = 0.0;
        for d in disks {
            chosen.push(d.id);
            total_weight += d.weight;
        }
        chosen.sort_unstable();
        Solution { chosen, total_weight }
    }
}

/// Optimum over the empty set, singletons and every ordered disjoint pair,
/// recovered by expanding backpointers.
pub fn extract_optimum(inst: &OrderedInstance, table: &DpTable) -> Solution {
    let n = inst.len();
    let mut best_value = 0.0;
    let mut best: Option<(usize, Option<usize>)> = None;
    for i in 0..n {
        let w = inst.disks[i].weight;
        if w > best_value {
            best_value = w;
            best = Some((i, None));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let Some(f0) = table.f(i, j, None) else {
                continue;
            };
            let v = f0 + inst.disks[i].weight + inst.disks[j].weight;
            if v > best_value {
                best_value = v;
                best = Some((i, Some(j)));
            }
        }
    }
    let mut picked = Vec::new();
    match best {
        None => {}
        Some((i, None)) => picked.push(i),
        Some((i, Some(j))) => {
            picked.push(i);
            picked.push(j);
            let mut stack = vec![(i, j, None)];
            while let Some((a, b, k)) = stack.pop() {
                if let Some(l) = table.backpointer(a, b, k) {
                    picked.push(l);
                    stack.push((a, l, Some(b)));
                    stack.push((l, b, Some(a)));
                }
            }
        }
    }
    Solution::from_disks(picked.iter().map(|&i| &inst.disks[i]))
}

/// Results of checking that admissible sets grow along the bisector order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotoneAudit {
    pub pairs: usize,
    pub comparisons: usize,
    /// Nesting failures with every margin outside the tolerance band.
    pub violations: usize,
    /// Nesting failures decided inside the tolerance band; logged only.
    pub band_violations: usize,
}

/// For every canonical pair and every adjacent `k ≺ k'`, checks
/// `D'_k(i, j) ⊆ D'_{k'}(i, j)` by direct filtering.
pub fn audit_monotonicity(inst: &OrderedInstance) -> MonotoneAudit {
    let n = inst.len();
    let mut audit = MonotoneAudit::default();
    if n < 3 {
        return audit;
    }
    let prep = Prep::new(inst);
    let band = inst.tol.resid;
    let margin = |a: &TangentDisk, d: &Disk| match a {
        TangentDisk::Solved(ApolloniusDisk::Proper { center, radius }) => d.center.dist(*center) - d.radius - radius,
        _ => f64::INFINITY,
    };
    for i in 0..n {
        for j in 0..n {
            if i == j || !prep.is_disjoint(i, j) {
                continue;
            }
            let sk = sorted_k(inst, &prep, i, j);
            if sk.ks.is_empty() {
                continue;
            }
            audit.pairs += 1;
            let mut chain: Vec<TangentDisk> = sk.order.iter().map(|&r| sk.disks[r as usize]).collect();
            chain.extend(ApolloniusDisk::upper_halfplane(&inst.disks[i], &inst.disks[j]).map(TangentDisk::Solved));
            let cands = prep.dprime(i, j);
            for w in chain.windows(2) {
                for &h in cands {
                    let d = &inst.disks[h as usize];
                    audit.comparisons += 1;
                    if w[0].admits(d, &inst.tol) && !w[1].admits(d, &inst.tol) {
                        if margin(&w[0], d).abs() <= band || margin(&w[1], d).abs() <= band {
                            audit.band_violations += 1;
                        } else {
                            audit.violations += 1;
                        }
                    }
                }
            }
        }
    }
    audit
}
