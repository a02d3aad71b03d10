//! Recursive k-point sets E_k in the plane: every convex set holding more
//! than ε̄_k·n of the points contains one of them.
//!
//! For k = r + 2s + 1 the construction picks the maximin point z (the
//! highest among the lowest points of intersections of two heavy
//! half-planes), recurses with r points on the users below z and with s
//! points on the users above z on each side.
//!
//! The subset rule used for the recursive calls is a reconstruction. Every
//! result is therefore checked against the exact best response and, if the
//! bound is missed, improved by a swap search before it is returned. When
//! the swap search stalls, greedy and k-means starts are tried the same way.

use crate::best_response::best_response;
use crate::epsilon_table::{floor_times, EpsilonTable};
use crate::error::{Result, VgError};
use crate::geometry::{FacilitySet, Point, UserSet, TOL};
use crate::p1_strategies::centerpoint::deep_point;
use crate::p1_strategies::{Strategy, StrategyKind};

/// Closed half-plane `a·x >= b`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub a: Point,
    pub b: f64,
}

impl HalfPlane {
    pub fn contains(&self, p: &Point) -> bool {
        self.a.dot(p) >= self.b - TOL
    }
}

/// Heavy closed half-planes bounded by lines through two points.
fn heavy_halfplanes(pts: &[Point], thr: usize) -> Vec<HalfPlane> {
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = pts[j].sub(&pts[i]);
            let a = Point::new2(-d.y(), d.x()).normalized();
            let b = a.dot(&pts[i]);
            for h in [HalfPlane { a, b }, HalfPlane { a: a.scale(-1.0), b: -b }] {
                if pts.iter().filter(|p| h.contains(p)).count() >= thr {
                    out.push(h);
                }
            }
        }
    }
    out
}

/// Lowest point of the intersection of two half-planes, when it exists.
fn lowest_point(h1: &HalfPlane, h2: &HalfPlane) -> Option<Point> {
    let (a1, a2) = (h1.a, h2.a);
    let det = a1.x() * a2.y() - a1.y() * a2.x();
    if det.abs() < 1e-12 {
        return None;
    }
    // The minimum of y is bounded iff (0, 1) is a nonnegative combination
    // of the inward normals.
    let l1 = -a2.x() / det;
    let l2 = a1.x() / det;
    if l1 < -1e-12 || l2 < -1e-12 {
        return None;
    }
    let x = (h1.b * a2.y() - h2.b * a1.y()) / det;
    let y = (a1.x() * h2.b - a2.x() * h1.b) / det;
    Some(Point::new2(x, y))
}

/// The maximin point of `pts` for half-planes holding at least `thr` points,
/// with the two half-planes attaining it.
pub fn maximin_point(pts: &[Point], thr: usize) -> Option<(Point, HalfPlane, HalfPlane)> {
    let hs = heavy_halfplanes(pts, thr);
    let mut best: Option<(Point, usize, usize)> = None;
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            if let Some(p) = lowest_point(&hs[i], &hs[j]) {
                let better = match &best {
                    None => true,
                    Some((q, _, _)) => p.y() > q.y() || (p.y() == q.y() && p.x() < q.x()),
                };
                if better {
                    best = Some((p, i, j));
                }
            }
        }
    }
    best.map(|(p, i, j)| (p, hs[i], hs[j]))
}

fn construct(pts: &[Point], k: usize, table: &EpsilonTable, out: &mut Vec<Point>) -> Result<()> {
    if k == 0 || pts.is_empty() {
        return Ok(());
    }
    if k == 1 {
        out.push(deep_point(pts)?);
        return Ok(());
    }
    let entry = table.entry(k)?;
    let (r, s) = (entry.r, entry.s);
    let thr = crate::epsilon_table::ceil_times(&entry.value, pts.len()).max(1);
    let Some((z, h1, h2)) = maximin_point(pts, thr) else {
        // Too few points for two heavy half-planes: one deep point suffices.
        out.push(deep_point(pts)?);
        return Ok(());
    };
    out.push(z);
    let below: Vec<Point> = pts.iter().filter(|p| p.y() < z.y() - TOL).copied().collect();
    let above: Vec<&Point> = pts.iter().filter(|p| p.y() >= z.y() - TOL && p.dist2(&z) > 0.0).collect();
    let t1: Vec<Point> = above.iter().filter(|p| !h2.contains(p)).map(|p| **p).collect();
    let t2: Vec<Point> = above.iter().filter(|p| !h1.contains(p)).map(|p| **p).collect();
    construct(&below, r, table, out)?;
    construct(&t1, s, table, out)?;
    construct(&t2, s, table, out)
}

fn dedup(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| q.dist2(&p) == 0.0) {
            out.push(p);
        }
    }
    out
}

/// Swap search: while P2's best response beats `limit`, try moving one
/// facility onto the best-response location and keep the best improvement.
fn repair(users: &UserSet, mut pts: Vec<Point>, limit: usize) -> Result<(Vec<Point>, usize)> {
    let mut current = best_response(users, &FacilitySet::p1(pts.clone())?)?;
    for _ in 0..64 {
        if current.payoff <= limit {
            break;
        }
        let mut best: Option<(usize, crate::best_response::BestResponse)> = None;
        for i in 0..pts.len() {
            let mut trial = pts.clone();
            trial[i] = current.location;
            let Ok(fs) = FacilitySet::p1(trial) else { continue };
            let br = best_response(users, &fs)?;
            if br.payoff < current.payoff && best.as_ref().is_none_or(|b| br.payoff < b.1.payoff) {
                best = Some((i, br));
            }
        }
        match best {
            Some((i, br)) => {
                pts[i] = current.location;
                current = br;
            }
            None => break,
        }
    }
    Ok((pts, current.payoff))
}

/// Adds best-response locations until `k` distinct facilities are placed.
/// Extra facilities never raise P2's payoff.
pub(crate) fn pad_to_k(users: &UserSet, mut pts: Vec<Point>, k: usize) -> Result<Vec<Point>> {
    while pts.len() < k {
        if pts.is_empty() {
            pts.push(deep_point(users.points())?);
            continue;
        }
        let br = best_response(users, &FacilitySet::p1(pts.clone())?)?;
        pts.push(br.location);
    }
    Ok(pts)
}

/// Lloyd iterations from a farthest-point seeding. Deterministic.
fn kmeans_start(pts: &[Point], k: usize) -> Vec<Point> {
    let Ok(first) = deep_point(pts) else { return Vec::new() };
    let mut centers = vec![first];
    while centers.len() < k.min(pts.len()) {
        let far = pts
            .iter()
            .max_by(|a, b| {
                let da = centers.iter().map(|c| c.dist2(a)).fold(f64::INFINITY, f64::min);
                let db = centers.iter().map(|c| c.dist2(b)).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db)
            })
            .copied()
            .unwrap_or(first);
        centers.push(far);
    }
    for _ in 0..50 {
        let mut sum = vec![(0.0, 0.0, 0usize); centers.len()];
        for p in pts {
            let j = (0..centers.len()).min_by(|&a, &b| centers[a].dist2(p).total_cmp(&centers[b].dist2(p))).unwrap_or(0);
            sum[j].0 += p.x();
            sum[j].1 += p.y();
            sum[j].2 += 1;
        }
        for (c, (sx, sy, m)) in centers.iter_mut().zip(sum) {
            if m > 0 {
                *c = Point::new2(sx / m as f64, sy / m as f64);
            }
        }
    }
    dedup(centers)
}

/// k points whose best response is at most ⌊ε̄_k·n⌋ users.
pub fn build_e_k(users: &UserSet, k: usize, table: &EpsilonTable) -> Result<Strategy> {
    if users.dim() != 2 {
        return Err(VgError::InvalidInput("the recursive construction is planar only".into()));
    }
    if table.dim != 2 {
        return Err(VgError::DimensionMismatch { expected: 2, got: table.dim });
    }
    if k == 0 {
        return Err(VgError::OutOfRange("k must be at least 1".into()));
    }
    let eps = table.value(k)?.clone();
    let mut raw = Vec::new();
    construct(users.points(), k, table, &mut raw)?;
    let mut pts = dedup(raw);
    pts.truncate(k);
    let limit = floor_times(&eps, users.len());
    let (mut pts, mut payoff) = repair(users, pts, limit)?;
    if payoff > limit {
        let starts = [pad_to_k(users, Vec::new(), k)?, kmeans_start(users.points(), k)];
        for start in starts {
            let (cand, p) = repair(users, start, limit)?;
            if p < payoff {
                (pts, payoff) = (cand, p);
            }
            if payoff <= limit {
                break;
            }
        }
    }
    if payoff > limit {
        return Err(VgError::Verification(format!(
            "best response takes {payoff} users, above the bound {limit}"
        )));
    }
    let pts = pad_to_k(users, pts, k)?;
    Ok(Strategy {
        placements: FacilitySet::p1(pts)?,
        kind: StrategyKind::MustafaRay,
        k,
        epsilon: None,
        guarantee: eps,
    })
}
