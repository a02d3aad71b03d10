//! Independent reference implementations used by the integration tests.
//! None of them call into the code they check.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vgame::game_engine::{generate_users, InstanceSpec};
use vgame::geometry::{Point, UserSet};

pub const DISTRIBUTIONS: [&str; 4] = ["uniform_square", "gaussian_clusters", "annulus", "grid_jitter"];

pub fn users(dist: &str, n: usize, seed: u64, dim: usize) -> UserSet {
    let spec = InstanceSpec::parse(&format!("{dist}:{n}:seed={seed}:dim={dim}")).unwrap();
    generate_users(&spec).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact value of a finite double as (integer, binary exponent).
fn split(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::from(0), 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let mut mant = (bits & 0xf_ffff_ffff_ffff) as i64;
    let exp = if raw_exp == 0 { -1074 } else { mant += 1 << 52; raw_exp - 1075 };
    let m = BigInt::from(if x < 0.0 { -mant } else { mant });
    (m, exp)
}

/// `|u p| < |u f|` decided exactly: floats when the gap is clear, integers
/// on a common binary scale otherwise.
pub fn strictly_closer(u: &Point, p: &Point, f: &Point) -> bool {
    let a = d2(u.coords(), p.coords());
    let b = d2(u.coords(), f.coords());
    if (a - b).abs() > 1e-12 * (a + b) {
        return a < b;
    }
    let all: Vec<(BigInt, i64)> = u.coords().iter().chain(p.coords()).chain(f.coords()).map(|&x| split(x)).collect();
    let low = all.iter().filter(|(m, _)| m.sign() != num_bigint::Sign::NoSign).map(|(_, e)| *e).min().unwrap_or(0);
    let scaled: Vec<BigInt> = all.into_iter().map(|(m, e)| m << ((e - low).max(0) as usize)).collect();
    let dim = u.dim();
    let (uu, pp, ff) = (&scaled[..dim], &scaled[dim..2 * dim], &scaled[2 * dim..]);
    let sq = |x: &[BigInt], y: &[BigInt]| -> BigInt { x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum() };
    sq(uu, pp) < sq(uu, ff)
}

/// Users strictly closer to `p2` than to every P1 facility, in exact
/// arithmetic on the given coordinates.
pub fn payoff(users: &[Point], f1: &[Point], p2: &Point) -> usize {
    users.iter().filter(|u| f1.iter().all(|f| strictly_closer(u, p2, f))).count()
}

/// Uniformly random facilities in the bounding box of `users`, stretched by
/// 10%, at mutual distance above 1e-6 of the box size.
pub fn random_facilities(users: &UserSet, k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let dim = users.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in users.points() {
        for i in 0..dim {
            lo[i] = lo[i].min(p.coords()[i]);
            hi[i] = hi[i].max(p.coords()[i]);
        }
    }
    let mut out: Vec<Point> = Vec::new();
    while out.len() < k {
        let c: Vec<f64> = (0..dim)
            .map(|i| {
                let pad = 0.1 * (hi[i] - lo[i]).max(1.0);
                rng.random_range(lo[i] - pad..hi[i] + pad)
            })
            .collect();
        let p = Point::from_slice(&c).unwrap();
        if out.iter().all(|o| o.dist(&p) > 1e-6 * (hi[0] - lo[0]).max(1.0)) {
            out.push(p);
        }
    }
    out
}

fn unit(a: f64) -> [f64; 2] {
    [a.cos(), a.sin()]
}

/// Planar best-response value by enumeration over the arrangement of the
/// open nearest-facility disks. Candidates:
/// * points just inside each circle at sixteen angles (faces without vertices),
/// * each pairwise crossing moved into its four local quadrants,
/// * each facility moved into every angular gap between the critical
///   directions of the circles through it.
pub fn brute_best_response(users: &[Point], f1: &[Point]) -> usize {
    let centers: Vec<[f64; 2]> = users.iter().map(|u| [u.x(), u.y()]).collect();
    let radii: Vec<f64> = users
        .iter()
        .map(|u| f1.iter().map(|f| d2(u.coords(), f.coords())).fold(f64::INFINITY, f64::min).sqrt())
        .collect();
    let rmin = radii.iter().copied().fold(f64::INFINITY, f64::min).max(1e-12);
    let mut best = 0;
    let try_point = |x: f64, y: f64, best: &mut usize| {
        let p = Point::new2(x, y);
        if f1.iter().any(|f| f.x() == x && f.y() == y) {
            return;
        }
        *best = (*best).max(payoff(users, f1, &p));
    };
    for (c, &r) in centers.iter().zip(&radii) {
        try_point(c[0], c[1], &mut best);
        for t in 0..16 {
            let [ux, uy] = unit(t as f64 * TAU / 16.0 + 0.1);
            for eps in [1e-7, 1e-10] {
                let s = r * (1.0 - eps);
                try_point(c[0] + s * ux, c[1] + s * uy, &mut best);
            }
        }
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let (a, ra, b, rb) = (centers[i], radii[i], centers[j], radii[j]);
            let local = ra.min(rb);
            let steps = [1e-5 * local, 1e-7 * local, 1e-9 * local];
            let dx = b[0] - a[0];
            let dy = b[1] - a[1];
            let d = (dx * dx + dy * dy).sqrt();
            if d == 0.0 || d > ra + rb || d < (ra - rb).abs() {
                continue;
            }
            let x = (d * d + ra * ra - rb * rb) / (2.0 * d);
            let h = (ra * ra - x * x).max(0.0).sqrt();
            let (ex, ey) = (dx / d, dy / d);
            for sgn in [1.0, -1.0] {
                let v = [a[0] + ex * x - sgn * ey * h, a[1] + ey * x + sgn * ex * h];
                let na = [(v[0] - a[0]) / ra, (v[1] - a[1]) / ra];
                let nb = [(v[0] - b[0]) / rb, (v[1] - b[1]) / rb];
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut w = [sa * na[0] + sb * nb[0], sa * na[1] + sb * nb[1]];
                    let len = (w[0] * w[0] + w[1] * w[1]).sqrt();
                    if len < 1e-12 {
                        w = [-na[1], na[0]];
                    } else {
                        w = [w[0] / len, w[1] / len];
                    }
                    for s in steps {
                        try_point(v[0] + s * w[0], v[1] + s * w[1], &mut best);
                    }
                }
                for t in 0..8 {
                    let [ux, uy] = unit(t as f64 * PI / 4.0 + 0.05);
                    for s in steps {
                        try_point(v[0] + s * ux, v[1] + s * uy, &mut best);
                    }
                }
            }
        }
    }
    for f in f1 {
        let mut angles: Vec<f64> = Vec::new();
        for u in users {
            if u.dist(f) == 0.0 {
                continue;
            }
            let a = (u.y() - f.y()).atan2(u.x() - f.x());
            angles.push((a + PI / 2.0).rem_euclid(TAU));
            angles.push((a - PI / 2.0).rem_euclid(TAU));
        }
        angles.sort_by(f64::total_cmp);
        let m = angles.len();
        let mut dirs = Vec::new();
        for i in 0..m {
            let a = angles[i];
            let b = if i + 1 < m { angles[i + 1] } else { angles[0] + TAU };
            dirs.push(0.5 * (a + b));
        }
        if dirs.is_empty() {
            dirs.push(0.0);
        }
        // Sliver wedges are only reachable in a narrow band of distances:
        // too far and the curvature cuts them off, too close and rounding
        // of the coordinates turns the step out of them. Walk a ladder.
        for a in dirs {
            let [ux, uy] = unit(a);
            let mut s = 0.5 * rmin.min(1.0);
            for _ in 0..45 {
                try_point(f.x() + s * ux, f.y() + s * uy, &mut best);
                s *= 0.5;
            }
        }
    }
    best
}

/// ε̄ recursion by exhaustive search over every split, no shortcuts.
/// Returns (ε̄_i) for i = 0..=kmax.
pub fn epsilon_oracle(dim: usize, kmax: usize) -> Vec<BigRational> {
    let one = BigRational::one();
    let dm1 = BigRational::from_integer(BigInt::from(dim as i64 - 1));
    let mut e = vec![one.clone()];
    if kmax >= 1 {
        e.push(q(dim as i64, dim as i64 + 1));
    }
    for i in 2..=kmax {
        let mut best: Option<BigRational> = None;
        for s in 0..=(i - 1) / 2 {
            let r = i - 1 - 2 * s;
            let x = &e[r] * (&one + &dm1 * &e[s]);
            let v = &x / (&one + &x);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        e.push(best.unwrap());
    }
    e
}

/// (2k − 1) / (2k (1 − ε̄_k)).
pub fn factor_oracle(eps: &BigRational, k: usize) -> BigRational {
    let k = k as i64;
    q(2 * k - 1, 2 * k) / (BigRational::one() - eps)
}

/// Closed containment with a relative tolerance.
pub fn in_ball(c: &[f64], r: f64, p: &[f64]) -> bool {
    d2(c, p).sqrt() <= r * (1.0 + 1e-9) + 1e-9
}

/// Smallest circle through two points (diametral) and the circumcircle of
/// three points, in the plane; in space also the circumsphere of four and
/// the smallest sphere through three. None when degenerate.
pub fn spanned_balls(pts: &[&Point]) -> Option<(Vec<f64>, f64)> {
    let dim = pts[0].dim();
    let c0: Vec<f64> = pts[0].coords().to_vec();
    // Solve for the center within the affine span of the points:
    // c = p0 + Σ t_i (p_i − p0) with |c − p_i| = |c − p0|.
    let m = pts.len() - 1;
    let v: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.coords().iter().zip(&c0).map(|(a, b)| a - b).collect()).collect();
    let mut a = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = 2.0 * v[i].iter().zip(&v[j]).map(|(x, y)| x * y).sum::<f64>();
        }
        rhs[i] = v[i].iter().map(|x| x * x).sum();
    }
    let t = solve(a, rhs)?;
    let mut c = c0.clone();
    for (ti, vi) in t.iter().zip(&v) {
        for k in 0..dim {
            c[k] += ti * vi[k];
        }
    }
    let r = d2(&c, &c0).sqrt();
    r.is_finite().then_some((c, r))
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Heavy spanned disks (balls) holding more than εn users that no net point
/// hits. Returns (heavy, misses).
pub fn piercing_oracle(users: &UserSet, net: &[Point], eps: &BigRational) -> (usize, usize) {
    let pts = users.points();
    let n = pts.len();
    let nn = BigInt::from(n);
    let (mut heavy, mut misses) = (0, 0);
    let mut check = |sub: &[&Point]| {
        let Some((c, r)) = spanned_balls(sub) else { return };
        let count = pts.iter().filter(|p| in_ball(&c, r, p.coords())).count();
        if BigInt::from(count) * eps.denom() > eps.numer() * &nn {
            heavy += 1;
            if !net.iter().any(|x| in_ball(&c, r, x.coords())) {
                misses += 1;
            }
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            check(&[&pts[i], &pts[j]]);
            for k in j + 1..n {
                check(&[&pts[i], &pts[j], &pts[k]]);
                if users.dim() == 3 {
                    for l in k + 1..n {
                        check(&[&pts[i], &pts[j], &pts[k], &pts[l]]);
                    }
                }
            }
        }
    }
    (heavy, misses)
}

/// Angular covering radius of unit `dirs`, estimated from `samples`
/// uniformly random directions (Gaussian normalization).
pub fn sampled_covering_radius(dirs: &[Point], samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let v = loop {
            let g: [f64; 3] = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let n2 = g.iter().map(|x| x * x).sum::<f64>();
            if n2 > 1e-6 && n2 <= 1.0 {
                let n = n2.sqrt();
                break [g[0] / n, g[1] / n, g[2] / n];
            }
        };
        let best = dirs
            .iter()
            .map(|d| (d.x() * v[0] + d.y() * v[1] + d.z() * v[2]).clamp(-1.0, 1.0))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(best.acos());
    }
    worst
}
