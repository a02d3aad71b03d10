//! Deep points: a centerpoint has Tukey depth at least ⌈n/(d+1)⌉.
//!
//! The depth-t region is the intersection of the closed half-spaces whose
//! boundary passes through d input points and which hold at least n-t+1
//! points. We look for the largest t whose region has an interior, take the
//! center of the largest inscribed ball of that region by linear
//! programming, and verify its depth exactly.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Result, VgError};
use crate::geometry::{tukey_depth_points, Point, UserSet, TOL};

/// Closed half-space `a·x >= b` with `count` input points on its closed side.
struct HalfSpace {
    a: Point,
    b: f64,
    count: usize,
}

fn candidate_halfspaces(pts: &[Point]) -> Vec<HalfSpace> {
    let n = pts.len();
    let dim = pts[0].dim();
    let mut out = Vec::new();
    let mut push = |a: Point, b: f64| {
        let len = a.norm();
        if len <= TOL {
            return;
        }
        let a = a.scale(1.0 / len);
        let b = b / len;
        let (mut pos, mut neg) = (0, 0);
        for p in pts {
            let h = a.dot(p) - b;
            if h >= -TOL {
                pos += 1;
            }
            if h <= TOL {
                neg += 1;
            }
        }
        out.push(HalfSpace { a, b, count: pos });
        out.push(HalfSpace { a: a.scale(-1.0), b: -b, count: neg });
    };
    if dim == 2 {
        for i in 0..n {
            for j in i + 1..n {
                let d = pts[j].sub(&pts[i]);
                let a = Point::new2(-d.y(), d.x());
                push(a, a.dot(&pts[i]));
            }
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = pts[j].sub(&pts[i]).cross(&pts[k].sub(&pts[i])).with_dim(3);
                    push(a, a.dot(&pts[i]));
                }
            }
        }
    }
    out
}

/// Center and radius of the largest ball inside the depth-t region, if the
/// region is nonempty.
fn chebyshev_center(hs: &[HalfSpace], n: usize, t: usize, dim: usize, span: f64) -> Option<(Point, f64)> {
    let need = n + 1 - t;
    let mut pb = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..dim).map(|_| pb.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let rho = pb.add_var(1.0, (0.0, span.max(1.0)));
    let mut any = false;
    for h in hs.iter().filter(|h| h.count >= need) {
        any = true;
        let mut expr: Vec<_> = xs.iter().zip(h.a.raw()).map(|(v, c)| (*v, c)).collect();
        expr.push((rho, -1.0));
        pb.add_constraint(expr.as_slice(), ComparisonOp::Ge, h.b);
    }
    if !any {
        return None;
    }
    let sol = pb.solve().ok()?;
    let c: Vec<f64> = xs.iter().map(|v| *sol.var_value(*v)).collect();
    Some((Point::from_slice(&c).ok()?, *sol.var_value(rho)))
}

/// A point of maximal (or at least centerpoint-level) Tukey depth for `pts`.
pub fn deep_point(pts: &[Point]) -> Result<Point> {
    let n = pts.len();
    let first = pts.first().ok_or_else(|| VgError::InvalidInput("no points".into()))?;
    let dim = first.dim();
    let target = n.div_ceil(dim + 1);
    let centroid = pts.iter().fold(Point::zero(dim), |acc, p| acc.add(p)).scale(1.0 / n as f64);
    if n <= dim {
        return Ok(centroid);
    }
    let (lo, hi) = crate::geometry::bbox_of(pts);
    let span = hi.sub(&lo).norm();
    let hs = candidate_halfspaces(pts);
    let mut candidates = Vec::new();
    // Largest t whose region has an interior, by bisection.
    let (mut a, mut b) = (target, n / 2 + 1);
    let mut found: Option<(usize, Point)> = None;
    while a <= b {
        let t = (a + b) / 2;
        match chebyshev_center(&hs, n, t, dim, span) {
            Some((c, r)) if r > 1e-9 * span.max(1.0) => {
                found = Some((t, c));
                a = t + 1;
            }
            _ => {
                if t == 0 {
                    break;
                }
                b = t - 1;
            }
        }
    }
    if let Some((t, c)) = found {
        candidates.push(c);
        // Also try the next levels down in case rounding bit the deepest one.
        for tt in (target..t).rev().take(2) {
            if let Some((c2, _)) = chebyshev_center(&hs, n, tt, dim, span) {
                candidates.push(c2);
            }
        }
    }
    candidates.push(centroid);
    let mut best: Option<(usize, Point)> = None;
    for c in candidates {
        let d = tukey_depth_points(&c, pts);
        if best.as_ref().is_none_or(|b| d > b.0) {
            best = Some((d, c));
        }
    }
    let (depth, point) = best.expect("centroid is always a candidate");
    if depth >= target {
        return Ok(point);
    }
    // Exhaustive fallback over input points and pairwise midpoints.
    let mut best = (depth, point);
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i..] {
            let m = p.add(q).scale(0.5);
            let d = tukey_depth_points(&m, pts);
            if d > best.0 {
                best = (d, m);
            }
        }
        if best.0 >= target {
            return Ok(best.1);
        }
    }
    Err(VgError::Verification(format!("deepest point found has depth {} < {target}", best.0)))
}

/// A centerpoint of the user set, verified to have depth ≥ ⌈n/(d+1)⌉.
pub fn centerpoint(users: &UserSet) -> Result<Point> {
    deep_point(users.points())
}
