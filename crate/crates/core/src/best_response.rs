//! Player 2's single-facility responses.
//!
//! The optimal response is a point of maximum depth in the arrangement of
//! nearest-facility disks `C_u`: a facility placed strictly inside `C_u`
//! takes user `u` away from P1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use crate::error::{Result, VgError};
use crate::geometry::{nearest_dist2, payoff_unchecked, Disk, FacilitySet, Point, UserSet, TOL};
use crate::p1_strategies::cones::cone_cover_directions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ArrangementSweep,
    BruteForce,
    Halfcell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub location: Point,
    pub payoff: usize,
    pub served: Vec<usize>,
    pub method: Method,
}

/// One disk per user, centered at the user and passing through its nearest
/// P1 facility.
pub fn nearest_facility_disks(users: &UserSet, f1: &FacilitySet) -> Result<Vec<Disk>> {
    if f1.is_empty() {
        return Err(VgError::InvalidInput("P1 must place at least one facility".into()));
    }
    for f in f1.points() {
        if f.dim() != users.dim() {
            return Err(VgError::DimensionMismatch { expected: users.dim(), got: f.dim() });
        }
    }
    Ok(users
        .points()
        .iter()
        .map(|u| Disk::new(*u, nearest_dist2(u, f1.points()).sqrt()))
        .collect())
}

fn open_depth(disks: &[Disk], p: &Point) -> Vec<usize> {
    disks.iter().enumerate().filter(|(_, d)| d.contains_open(p)).map(|(i, _)| i).collect()
}

/// A candidate witness: an angular interval on the boundary of disk `disk`
/// where `cover` other disks contain the boundary.
#[derive(Clone, Debug)]
struct ArcCandidate {
    disk: usize,
    cover: usize,
    theta: f64,
    width: f64,
}

/// Best intervals on the boundary circle of disk `i`, sorted by decreasing
/// coverage then decreasing width.
fn sweep_circle(disks: &[Disk], i: usize) -> Vec<ArcCandidate> {
    let di = &disks[i];
    let ri = di.radius;
    let mut full = 0usize;
    let mut events: Vec<(f64, i32)> = Vec::new();
    let mut initial = 0i64;
    for (j, dj) in disks.iter().enumerate() {
        if j == i || dj.radius <= 0.0 {
            continue;
        }
        let d = di.center.dist(&dj.center);
        let rj = dj.radius;
        if d + ri < rj {
            full += 1;
            continue;
        }
        if d >= ri + rj || d + rj <= ri || d == 0.0 {
            continue;
        }
        let cos_a = ((ri * ri + d * d - rj * rj) / (2.0 * ri * d)).clamp(-1.0, 1.0);
        let alpha = cos_a.acos();
        if alpha <= 0.0 {
            continue;
        }
        let phi = (dj.center.y() - di.center.y()).atan2(dj.center.x() - di.center.x());
        let start = (phi - alpha).rem_euclid(TAU);
        let end = (phi + alpha).rem_euclid(TAU);
        events.push((start, 1));
        events.push((end, -1));
        if start > end {
            // The arc wraps through angle 0.
            initial += 1;
        }
    }
    if events.is_empty() {
        return vec![ArcCandidate { disk: i, cover: full, theta: 0.0, width: TAU }];
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    let mut cur = initial;
    let mut k = 0;
    let m = events.len();
    // Coverage on (events[last], events[0] + 2π) is `initial`.
    let first = events[0].0;
    let last = events[m - 1].0;
    let wrap_width = first + TAU - last;
    if wrap_width > 0.0 {
        out.push(ArcCandidate {
            disk: i,
            cover: full + initial as usize,
            theta: (last + wrap_width / 2.0).rem_euclid(TAU),
            width: wrap_width,
        });
    }
    while k < m {
        let angle = events[k].0;
        while k < m && events[k].0 == angle {
            cur += events[k].1 as i64;
            k += 1;
        }
        if k < m {
            let next = events[k].0;
            let width = next - angle;
            if width > 0.0 && cur >= 0 {
                out.push(ArcCandidate { disk: i, cover: full + cur as usize, theta: angle + width / 2.0, width });
            }
        }
    }
    out.sort_by(|a, b| b.cover.cmp(&a.cover).then(b.width.total_cmp(&a.width)));
    out.truncate(4);
    out
}

fn arc_witness(disks: &[Disk], c: &ArcCandidate, shrink: f64) -> Point {
    let d = &disks[c.disk];
    let eta = 1e-7 * d.radius * c.width.min(1.0) * shrink;
    let r = d.radius - eta;
    Point::new2(d.center.x() + r * c.theta.cos(), d.center.y() + r * c.theta.sin())
}

fn fallback_point(disks: &[Disk], forbidden: &[Point]) -> Point {
    let (lo, hi) = crate::geometry::bbox_of(&disks.iter().map(|d| d.center).collect::<Vec<_>>());
    let mut p = Point::new2(hi.x() + 1.0 + (hi.x() - lo.x()), hi.y() + 1.0);
    while forbidden.iter().any(|f| f.dist2(&p) == 0.0) {
        p = p.add(&Point::new2(1.0, 1.0));
    }
    p
}

/// Planar maximum-depth point over the open disks, by a circular sweep along
/// every disk boundary. The witness is nudged into the deepest face and the
/// depth is recounted directly.
pub fn max_depth_point(disks: &[Disk], forbidden: &FacilitySet) -> Result<BestResponse> {
    if disks.is_empty() {
        return Err(VgError::InvalidInput("no disks".into()));
    }
    if disks.iter().any(|d| d.center.dim() != 2) {
        return Err(VgError::InvalidInput("the arrangement sweep is planar only".into()));
    }
    let live: Vec<usize> = (0..disks.len()).filter(|&i| disks[i].radius > 0.0).collect();
    if live.is_empty() {
        let p = fallback_point(disks, forbidden.points());
        return Ok(BestResponse { location: p, payoff: 0, served: vec![], method: Method::ArrangementSweep });
    }
    let mut cands: Vec<ArcCandidate> = live.par_iter().flat_map_iter(|&i| sweep_circle(disks, i)).collect();
    cands.sort_by(|a, b| {
        b.cover.cmp(&a.cover).then(a.disk.cmp(&b.disk)).then(b.width.total_cmp(&a.width))
    });
    let mut best: Option<(Point, Vec<usize>)> = None;
    for c in &cands {
        let target = c.cover + 1;
        if best.as_ref().is_some_and(|b| b.1.len() >= target) {
            break;
        }
        let mut shrink = 1.0;
        for _ in 0..6 {
            let p = arc_witness(disks, c, shrink);
            let served = open_depth(disks, &p);
            let ok = !forbidden.points().iter().any(|f| f.dist2(&p) == 0.0);
            if ok && best.as_ref().is_none_or(|b| served.len() > b.1.len()) {
                best = Some((p, served.clone()));
            }
            if ok && served.len() >= target {
                break;
            }
            shrink *= 0.1;
        }
    }
    let (location, served) = best.expect("at least one live disk yields a witness");
    Ok(BestResponse { location, payoff: served.len(), served, method: Method::ArrangementSweep })
}

/// Candidate-enumeration best response for balls in space.
fn max_depth_point_3d(users: &UserSet, f1: &FacilitySet, disks: &[Disk]) -> Result<BestResponse> {
    let n = disks.len();
    let live: Vec<usize> = (0..n).filter(|&i| disks[i].radius > 0.0).collect();
    if live.is_empty() {
        let p = users.points()[0].add(&Point::new3(1e3, 1e3, 1e3));
        return Ok(BestResponse { location: p, payoff: 0, served: vec![], method: Method::BruteForce });
    }
    let scale = live.iter().map(|&i| disks[i].radius).fold(0.0, f64::max);
    let eta = 1e-7 * scale;
    let score = |p: &Point| -> Vec<usize> { open_depth(disks, p) };
    // Every candidate is (point, order key); the best count wins, then the
    // lowest key.
    let per_disk: Vec<(usize, usize, Point, Vec<usize>)> = live
        .par_iter()
        .map(|&i| {
            let di = &disks[i];
            let mut best: Option<(usize, Point, Vec<usize>)> = None;
            let mut consider = |key: usize, p: Point| {
                let s = score(&p);
                if best.as_ref().is_none_or(|b| s.len() > b.2.len()) {
                    best = Some((key, p, s));
                }
            };
            consider(0, di.center);
            let mut key = 1;
            for &j in &live {
                if j <= i {
                    continue;
                }
                let dj = &disks[j];
                let axis = dj.center.sub(&di.center);
                let d = axis.norm();
                if d == 0.0 || d >= di.radius + dj.radius {
                    continue;
                }
                let a = axis.scale(1.0 / d);
                // Middle of the overlap along the line of centers.
                let lo = (-di.radius).max(d - dj.radius);
                let hi = di.radius.min(d + dj.radius);
                consider(key, di.center.add(&a.scale((lo + hi) / 2.0)));
                key += 1;
                if d + dj.radius <= di.radius || d + di.radius <= dj.radius {
                    continue;
                }
                // Circle of intersection, sampled and nudged into the lens.
                let x = (d * d + di.radius * di.radius - dj.radius * dj.radius) / (2.0 * d);
                let rho = (di.radius * di.radius - x * x).max(0.0).sqrt();
                let mid = di.center.add(&a.scale(x));
                let helper = if a.x().abs() < 0.9 { Point::new3(1., 0., 0.) } else { Point::new3(0., 1., 0.) };
                let e1 = a.cross(&helper).normalized();
                let e2 = a.cross(&e1).normalized();
                for t in 0..8 {
                    let ang = t as f64 * PI / 4.0;
                    let q = mid.add(&e1.scale(rho * ang.cos())).add(&e2.scale(rho * ang.sin()));
                    let inward = di.center.sub(&q).normalized().add(&dj.center.sub(&q).normalized()).normalized();
                    consider(key, q.add(&inward.scale(eta)));
                    key += 1;
                }
                for &l in &live {
                    if l <= j {
                        continue;
                    }
                    for q in sphere_triple(di, dj, &disks[l]) {
                        let inward = di
                            .center
                            .sub(&q)
                            .normalized()
                            .add(&dj.center.sub(&q).normalized())
                            .add(&disks[l].center.sub(&q).normalized())
                            .normalized();
                        consider(key, q.add(&inward.scale(eta)));
                        key += 1;
                    }
                }
            }
            let (k, p, s) = best.expect("center candidate always present");
            (i, k, p, s)
        })
        .collect();
    let (_, _, p, served) = per_disk
        .into_iter()
        .max_by(|a, b| a.3.len().cmp(&b.3.len()).then(b.0.cmp(&a.0)).then(b.1.cmp(&a.1)))
        .expect("nonempty");
    debug_assert!(!f1.points().iter().any(|f| f.dist2(&p) == 0.0));
    Ok(BestResponse { location: p, payoff: served.len(), served, method: Method::BruteForce })
}

/// The (up to two) common points of three spheres.
fn sphere_triple(a: &Disk, b: &Disk, c: &Disk) -> Vec<Point> {
    let p1 = a.center;
    let ex = b.center.sub(&p1);
    let d = ex.norm();
    if d == 0.0 {
        return vec![];
    }
    let ex = ex.scale(1.0 / d);
    let pc = c.center.sub(&p1);
    let i = ex.dot(&pc);
    let ey = pc.sub(&ex.scale(i));
    let ey_n = ey.norm();
    if ey_n <= TOL {
        return vec![];
    }
    let ey = ey.scale(1.0 / ey_n);
    let ez = ex.cross(&ey);
    let j = ey.dot(&pc);
    let x = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    let y = (a.radius * a.radius - c.radius * c.radius + i * i + j * j) / (2.0 * j) - i * x / j;
    let z2 = a.radius * a.radius - x * x - y * y;
    if z2 < 0.0 {
        return vec![];
    }
    let z = z2.sqrt();
    let base = p1.add(&ex.scale(x)).add(&ey.scale(y));
    vec![base.add(&ez.scale(z)), base.add(&ez.scale(-z))]
}

/// Optimal single facility for P2 against `f1`.
pub fn best_response(users: &UserSet, f1: &FacilitySet) -> Result<BestResponse> {
    let disks = nearest_facility_disks(users, f1)?;
    let mut br = if users.dim() == 2 {
        max_depth_point(&disks, f1)?
    } else {
        max_depth_point_3d(users, f1, &disks)?
    };
    // Final word from the payoff rule itself.
    let rec = payoff_unchecked(users.points(), f1.points(), &[br.location]);
    br.served = rec.served_by_p2;
    br.payoff = br.served.len();
    // Every disk passes through a facility, so the faces next to a facility
    // are thin wedges the sweep can lose to rounding. Splitting each cell
    // covers them directly.
    for (j, cell) in voronoi_cells(users, f1).iter().enumerate() {
        if let Ok(alt) = split_cell(users, f1, j, cell) {
            if alt.payoff > br.payoff {
                br.location = alt.location;
                br.served = alt.served;
                br.payoff = alt.payoff;
            }
        }
    }
    Ok(br)
}

fn circle_intersections(a: &Disk, b: &Disk) -> Vec<Point> {
    let d = a.center.dist(&b.center);
    if d == 0.0 || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let h = (a.radius * a.radius - x * x).max(0.0).sqrt();
    let ex = b.center.sub(&a.center).scale(1.0 / d);
    let ey = Point::new2(-ex.y(), ex.x());
    let base = a.center.add(&ex.scale(x));
    vec![base.add(&ey.scale(h)), base.add(&ey.scale(-h))]
}

/// Planar best response by plain enumeration: every disk center and every
/// pairwise boundary crossing nudged eight ways. Cubic in n, used as a
/// cross-check of the sweep.
pub fn brute_force_best_response(users: &UserSet, f1: &FacilitySet) -> Result<BestResponse> {
    if users.dim() != 2 {
        return Err(VgError::UnsupportedDimension(users.dim()));
    }
    let disks = nearest_facility_disks(users, f1)?;
    let mut cands: Vec<Point> = users.points().to_vec();
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let scale = disks[i].radius.min(disks[j].radius).max(TOL);
            for v in circle_intersections(&disks[i], &disks[j]) {
                // The two tangents at v cut four sectors; step along each
                // sector bisector, plus a fixed compass for good measure.
                let ti = v.sub(&disks[i].center).normalized();
                let tj = v.sub(&disks[j].center).normalized();
                let mut dirs: Vec<Point> = Vec::with_capacity(12);
                for w in [ti.add(&tj), ti.sub(&tj)] {
                    if w.norm2() > 0.0 {
                        let w = w.normalized();
                        dirs.push(w);
                        dirs.push(w.scale(-1.0));
                    }
                }
                for t in 0..8 {
                    let a = t as f64 * PI / 4.0 + PI / 8.0;
                    dirs.push(Point::new2(a.cos(), a.sin()));
                }
                for step in [1e-6, 1e-9] {
                    for w in &dirs {
                        cands.push(v.add(&w.scale(step * scale)));
                    }
                }
            }
        }
    }
    // Next to a facility f the served set is {u : (u - f)·n > 0} for the
    // step direction n, so one direction per angular gap between the
    // critical normals covers every wedge at f.
    for f in f1.points() {
        let mut crit: Vec<f64> = Vec::new();
        let mut reach = f64::INFINITY;
        for u in users.points() {
            let v = u.sub(f);
            if v.norm2() == 0.0 {
                continue;
            }
            reach = reach.min(v.norm());
            let a = v.y().atan2(v.x());
            crit.push((a + PI / 2.0).rem_euclid(TAU));
            crit.push((a - PI / 2.0).rem_euclid(TAU));
        }
        crit.sort_by(f64::total_cmp);
        for (t, a) in crit.iter().enumerate() {
            let b = if t + 1 < crit.len() { crit[t + 1] } else { crit[0] + TAU };
            let mid = (a + b) / 2.0;
            for step in [1e-6, 1e-9] {
                let s = step * reach.min(1.0);
                cands.push(Point::new2(f.x() + s * mid.cos(), f.y() + s * mid.sin()));
            }
        }
    }
    let mut best: Option<(Point, Vec<usize>)> = None;
    for c in cands {
        if f1.points().iter().any(|f| f.dist2(&c) == 0.0) {
            continue;
        }
        let rec = payoff_unchecked(users.points(), f1.points(), &[c]);
        if best.as_ref().is_none_or(|b| rec.p2_count > b.1.len()) {
            best = Some((c, rec.served_by_p2));
        }
    }
    let (location, served) = best.unwrap_or_else(|| (fallback_point(&disks, f1.points()), Vec::new()));
    Ok(BestResponse { location, payoff: served.len(), served, method: Method::BruteForce })
}

/// Cells of the nearest-facility partition (ties to the lowest index).
pub fn voronoi_cells(users: &UserSet, f1: &FacilitySet) -> Vec<Vec<usize>> {
    let mut cells = vec![Vec::new(); f1.len()];
    for (ui, u) in users.points().iter().enumerate() {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (j, f) in f1.points().iter().enumerate() {
            let d = u.dist2(f);
            if d < bd {
                bd = d;
                best = j;
            }
        }
        cells[best].push(ui);
    }
    cells
}

/// Directions with no vector on their orthogonal hyperplane, each oriented
/// to have the most vectors on its positive side. Sorted by that count, then
/// by the smallest angle any vector makes with the hyperplane, since sliver
/// angles make the offset test drown in rounding.
fn splitting_directions(vecs: &[Point], dim: usize) -> Vec<Point> {
    let mut dirs: Vec<Point> = Vec::new();
    if dim == 2 {
        let mut angles: Vec<f64> = vecs.iter().map(|v| v.y().atan2(v.x()).rem_euclid(PI)).collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        for (t, a) in angles.iter().enumerate() {
            let b = if t + 1 < angles.len() { angles[t + 1] } else { angles[0] + PI };
            let mid = (a + b) / 2.0;
            // Normal of the line through the origin at angle `mid`.
            dirs.push(Point::new2(-mid.sin(), mid.cos()));
        }
        if angles.is_empty() {
            dirs.push(Point::new2(1.0, 0.0));
        }
    } else {
        let m = 2000;
        for t in 0..m {
            let z = 1.0 - (2.0 * t as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = t as f64 * PI * (3.0 - 5f64.sqrt());
            dirs.push(Point::new3(r * phi.cos(), r * phi.sin(), z));
        }
    }
    let mut ranked: Vec<((usize, f64), Point)> = Vec::new();
    for d in dirs {
        let mut pos = 0;
        let mut neg = 0;
        let mut margin = f64::INFINITY;
        for v in vecs {
            let h = d.dot(v);
            margin = margin.min(h.abs() / v.norm());
            if h > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        if margin <= 0.0 {
            continue;
        }
        let (cnt, dir) = if pos >= neg { (pos, d) } else { (neg, d.scale(-1.0)) };
        ranked.push(((cnt, margin), dir));
    }
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    ranked.into_iter().map(|r| r.1).collect()
}

/// The lower-bound response: split the most populated Voronoi cell by a
/// line (plane) through its facility and step just off the facility towards
/// the heavier side.
pub fn halfcell_response(users: &UserSet, f1: &FacilitySet) -> Result<BestResponse> {
    if f1.is_empty() || users.is_empty() {
        return Err(VgError::InvalidInput("need users and at least one P1 facility".into()));
    }
    let cells = voronoi_cells(users, f1);
    let (j, cell) = cells
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .expect("f1 nonempty");
    split_cell(users, f1, j, cell)
}

/// Steps off facility `j` into the heavier side of a line (plane) through
/// it that splits its cell.
fn split_cell(users: &UserSet, f1: &FacilitySet, j: usize, cell: &[usize]) -> Result<BestResponse> {
    let fj = f1.points()[j];
    let pts = users.points();
    // Users sitting on the facility up to rounding cannot be won reliably.
    let floor = TOL * (1.0 + fj.norm());
    let offsets: Vec<(usize, Point)> =
        cell.iter().map(|&u| (u, pts[u].sub(&fj))).filter(|(_, v)| v.norm() > floor).collect();
    let vecs: Vec<Point> = offsets.iter().map(|(_, v)| *v).collect();
    let normals = splitting_directions(&vecs, users.dim());
    if normals.is_empty() {
        return Err(VgError::Degenerate("no splitting direction through the facility".into()));
    }
    // The best-ranked direction nearly always works; the next few cover
    // slivers where rounding defeats every offset.
    for normal in normals.into_iter().take(16) {
        let target = offsets.iter().filter(|(_, v)| v.dot(&normal) > 0.0).count();
        let mut delta = f64::INFINITY;
        for (_, v) in &offsets {
            let h = v.dot(&normal);
            if h > 0.0 {
                delta = delta.min(h);
            }
        }
        if !delta.is_finite() {
            delta = 1.0;
        }
        // Every target user stays served while delta < 2·h_min. In sliver
        // wedges the usable band is narrow: small steps lose the direction
        // to coordinate rounding, so walk down from just below the limit.
        delta *= 1.9;
        for _ in 0..100 {
            let cand = fj.add(&normal.scale(delta));
            let collides = f1.points().iter().any(|f| f.dist2(&cand) == 0.0);
            if !collides {
                let rec = payoff_unchecked(pts, f1.points(), &[cand]);
                if rec.p2_count >= target {
                    return Ok(BestResponse {
                        location: cand,
                        payoff: rec.p2_count,
                        served: rec.served_by_p2,
                        method: Method::Halfcell,
                    });
                }
            }
            delta *= 0.7;
        }
    }
    Err(VgError::Degenerate("no valid offset found for any splitting direction".into()))
}

/// Sector (cone) argument witness: among the users served by the response,
/// take the most populated sector around f' and its farthest user `u`; the
/// disk centered at `u` through f' holds the whole sector and no P1 facility.
pub fn sector_witness(users: &UserSet, f1: &FacilitySet, response: &BestResponse) -> Result<Disk> {
    if response.served.is_empty() {
        return Err(VgError::InvalidInput("the response serves no user".into()));
    }
    let f = response.location;
    let pts = users.points();
    let sectors = if users.dim() == 2 { 6 } else { 20 };
    let cones = if users.dim() == 3 { Some(cone_cover_directions()?) } else { None };
    let mut buckets = vec![Vec::new(); sectors];
    for &u in &response.served {
        let v = pts[u].sub(&f);
        let idx = match &cones {
            None => {
                let ang = v.y().atan2(v.x()).rem_euclid(TAU);
                ((ang / (PI / 3.0)).floor() as usize).min(5)
            }
            Some(c) => c.nearest(&v),
        };
        buckets[idx].push(u);
    }
    let (_, bucket) = buckets
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .expect("sectors nonempty");
    let far = *bucket
        .iter()
        .max_by(|&&a, &&b| pts[a].dist2(&f).partial_cmp(&pts[b].dist2(&f)).unwrap_or(Ordering::Equal))
        .expect("bucket nonempty");
    let disk = Disk::new(pts[far], pts[far].dist(&f));
    debug_assert!(f1.points().iter().all(|q| !disk.contains_open(q)));
    Ok(disk)
}
