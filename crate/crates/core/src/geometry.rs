//! Dimension-generic primitives for the plane and for space.
//!
//! A [`Point`] always stores three coordinates; planar points keep `z = 0` so
//! that cross products and circumcenters can share one code path.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, VgError};

/// Absolute tolerance for geometric decisions.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    c: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point { c: [x, y, 0.0], dim: 2 }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point { c: [x, y, z], dim: 3 }
    }

    /// Builds a point from 2 or 3 finite coordinates.
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(VgError::InvalidInput(format!("non-finite coordinate in {coords:?}")));
        }
        match coords.len() {
            2 => Ok(Point::new2(coords[0], coords[1])),
            3 => Ok(Point::new3(coords[0], coords[1], coords[2])),
            d => Err(VgError::UnsupportedDimension(d)),
        }
    }

    /// Origin of the given dimension.
    pub fn zero(dim: usize) -> Self {
        Point { c: [0.0; 3], dim: dim as u8 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.c[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.c[2]
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim()]
    }

    #[inline]
    pub fn raw(&self) -> [f64; 3] {
        self.c
    }

    #[inline]
    pub fn sub(&self, o: &Point) -> Point {
        Point { c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]], dim: self.dim }
    }

    #[inline]
    pub fn add(&self, o: &Point) -> Point {
        Point { c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]], dim: self.dim }
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Point {
        Point { c: [self.c[0] * s, self.c[1] * s, self.c[2] * s], dim: self.dim }
    }

    #[inline]
    pub fn dot(&self, o: &Point) -> f64 {
        self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    /// Cross product; for planar inputs the result lies on the z axis.
    #[inline]
    pub fn cross(&self, o: &Point) -> Point {
        let a = self.c;
        let b = o.c;
        Point {
            c: [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]],
            dim: 3,
        }
    }

    /// The z component of the planar cross product.
    #[inline]
    pub fn cross2(&self, o: &Point) -> f64 {
        self.c[0] * o.c[1] - self.c[1] * o.c[0]
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn normalized(&self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Reinterprets the point in another dimension (drops or zero-fills z).
    pub fn with_dim(&self, dim: usize) -> Point {
        let mut c = self.c;
        if dim == 2 {
            c[2] = 0.0;
        }
        Point { c, dim: dim as u8 }
    }

    #[inline]
    pub fn dist2(&self, o: &Point) -> f64 {
        let dx = self.c[0] - o.c[0];
        let dy = self.c[1] - o.c[1];
        let dz = self.c[2] - o.c[2];
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn dist(&self, o: &Point) -> f64 {
        self.dist2(o).sqrt()
    }

    /// Lexicographic comparison, used for deterministic tie-breaks.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        for i in 0..3 {
            match self.c[i].total_cmp(&o.c[i]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::from_slice(&v).map_err(D::Error::custom)
    }
}

/// Squared Euclidean distance. Exact when all coordinates are small integers.
pub fn squared_distance(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(VgError::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    Ok(p.dist2(q))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(VgError::UnsupportedDimension(dim))
    }
}

/// An ordered set of distinct users in the plane or in space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserSet {
    users: Vec<Point>,
    dim: usize,
}

impl UserSet {
    /// Validates dimensions and pairwise distinctness. General position is
    /// not required here; see [`UserSet::new_checked`].
    pub fn new(users: Vec<Point>) -> Result<Self> {
        let dim = match users.first() {
            Some(p) => p.dim(),
            None => return Err(VgError::InvalidInput("user set is empty".into())),
        };
        check_dim(dim)?;
        for p in &users {
            if p.dim() != dim {
                return Err(VgError::DimensionMismatch { expected: dim, got: p.dim() });
            }
        }
        let mut order: Vec<usize> = (0..users.len()).collect();
        order.sort_by(|&a, &b| users[a].lex_cmp(&users[b]));
        for w in order.windows(2) {
            if users[w[0]].dist2(&users[w[1]]) == 0.0 {
                return Err(VgError::InvalidInput(format!(
                    "users {} and {} coincide at {}",
                    w[0], w[1], users[w[0]]
                )));
            }
        }
        Ok(UserSet { users, dim })
    }

    /// Like [`UserSet::new`], but rejects sets that are not in general
    /// position unless `allow_degenerate` is set.
    pub fn new_checked(users: Vec<Point>, allow_degenerate: bool) -> Result<Self> {
        let set = UserSet::new(users)?;
        if !allow_degenerate {
            if let Some(why) = set.general_position_violation() {
                return Err(VgError::Degenerate(why));
            }
        }
        Ok(set)
    }

    pub fn from_coords(coords: &[Vec<f64>]) -> Result<Self> {
        let pts = coords.iter().map(|c| Point::from_slice(c)).collect::<Result<Vec<_>>>()?;
        UserSet::new(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn general_position(&self) -> bool {
        self.general_position_violation().is_none()
    }

    /// Describes the first violation of general position, if any: d+1 users
    /// on a common hyperplane or d+2 users on a common sphere.
    pub fn general_position_violation(&self) -> Option<String> {
        let p = &self.users;
        let n = p.len();
        if self.dim == 2 {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        if orient2(&p[i], &p[j], &p[k]).abs() <= TOL {
                            return Some(format!("users {i}, {j}, {k} are collinear"));
                        }
                        for l in k + 1..n {
                            if incircle(&p[i], &p[j], &p[k], &p[l]).abs() <= TOL {
                                return Some(format!("users {i}, {j}, {k}, {l} are cocircular"));
                            }
                        }
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        for l in k + 1..n {
                            if orient3(&p[i], &p[j], &p[k], &p[l]).abs() <= TOL {
                                return Some(format!("users {i}, {j}, {k}, {l} are coplanar"));
                            }
                            for m in l + 1..n {
                                if insphere(&p[i], &p[j], &p[k], &p[l], &p[m]).abs() <= TOL {
                                    return Some(format!(
                                        "users {i}, {j}, {k}, {l}, {m} are cospherical"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bbox(&self) -> (Point, Point) {
        bbox_of(&self.users)
    }
}

pub fn bbox_of(pts: &[Point]) -> (Point, Point) {
    let dim = pts.first().map(|p| p.dim()).unwrap_or(2);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for i in 0..3 {
            lo[i] = lo[i].min(p.c[i]);
            hi[i] = hi[i].max(p.c[i]);
        }
    }
    (Point { c: lo, dim: dim as u8 }, Point { c: hi, dim: dim as u8 })
}

/// Twice the signed area of triangle abc.
pub fn orient2(a: &Point, b: &Point, c: &Point) -> f64 {
    b.sub(a).cross2(&c.sub(a))
}

/// Six times the signed volume of tetrahedron abcd.
pub fn orient3(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    b.sub(a).cross(&c.sub(a)).dot(&d.sub(a))
}

fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    let rows: Vec<[f64; 3]> = [a, b, c]
        .iter()
        .map(|p| {
            let v = p.sub(d);
            [v.x(), v.y(), v.norm2()]
        })
        .collect();
    det3(rows[0], rows[1], rows[2])
}

fn insphere(a: &Point, b: &Point, c: &Point, d: &Point, e: &Point) -> f64 {
    let rows: Vec<[f64; 4]> = [a, b, c, d]
        .iter()
        .map(|p| {
            let v = p.sub(e);
            [v.x(), v.y(), v.z(), v.norm2()]
        })
        .collect();
    let mut total = 0.0;
    for col in 0..4 {
        let minor: Vec<[f64; 3]> = rows[1..]
            .iter()
            .map(|r| {
                let mut m = [0.0; 3];
                let mut t = 0;
                for (c, v) in r.iter().enumerate() {
                    if c != col {
                        m[t] = *v;
                        t += 1;
                    }
                }
                m
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * rows[0][col] * det3(minor[0], minor[1], minor[2]);
    }
    total
}

pub(crate) fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    P1,
    P2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacilitySet {
    pub facilities: Vec<Point>,
    pub owner: Owner,
}

impl FacilitySet {
    /// Builds a facility set, rejecting coincident facilities.
    pub fn new(facilities: Vec<Point>, owner: Owner) -> Result<Self> {
        for (i, a) in facilities.iter().enumerate() {
            for (j, b) in facilities.iter().enumerate().skip(i + 1) {
                if a.dim() != b.dim() {
                    return Err(VgError::DimensionMismatch { expected: a.dim(), got: b.dim() });
                }
                if a.dist2(b) == 0.0 {
                    return Err(VgError::FacilityCollision(format!(
                        "facilities {i} and {j} coincide at {a}"
                    )));
                }
            }
        }
        Ok(FacilitySet { facilities, owner })
    }

    pub fn p1(facilities: Vec<Point>) -> Result<Self> {
        FacilitySet::new(facilities, Owner::P1)
    }

    pub fn p2(facilities: Vec<Point>) -> Result<Self> {
        FacilitySet::new(facilities, Owner::P2)
    }

    pub fn len(&self) -> usize {
        self.facilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facilities.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.facilities
    }
}

/// A disk (or ball when the center is three dimensional).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        Disk { center, radius }
    }

    /// Strict interior test.
    pub fn contains_open(&self, p: &Point) -> bool {
        self.center.dist2(p) < self.radius * self.radius
    }

    /// Closed containment with a small relative slack.
    pub fn contains_closed(&self, p: &Point) -> bool {
        self.center.dist(p) <= self.radius * (1.0 + TOL) + TOL
    }
}

/// Outcome of evaluating P2's payoff.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffRecord {
    pub p2_count: usize,
    pub p1_count: usize,
    pub served_by_p2: Vec<usize>,
}

/// Squared distance from `u` to the nearest point of `f` (infinity when empty).
pub fn nearest_dist2(u: &Point, f: &[Point]) -> f64 {
    f.iter().map(|q| u.dist2(q)).fold(f64::INFINITY, f64::min)
}

/// Payoff of P2: users strictly closer to F2 than to F1. Ties go to P1.
pub fn payoff(users: &UserSet, f1: &FacilitySet, f2: &FacilitySet) -> Result<PayoffRecord> {
    if f1.is_empty() {
        return Err(VgError::InvalidInput("P1 must place at least one facility".into()));
    }
    let dim = users.dim();
    for p in f1.points().iter().chain(f2.points()) {
        if p.dim() != dim {
            return Err(VgError::DimensionMismatch { expected: dim, got: p.dim() });
        }
    }
    for a in f1.points() {
        for b in f2.points() {
            if a.dist2(b) == 0.0 {
                return Err(VgError::FacilityCollision(format!("{a} is claimed by both players")));
            }
        }
    }
    Ok(payoff_unchecked(users.points(), f1.points(), f2.points()))
}

/// `m · 2^e` with the exact integer mantissa of a finite double.
fn decode(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i64 << 52), exp - 1075) };
    (sign * m, e)
}

/// Compares `|u a|²` with `|u b|²`. Clear cases are settled in floating
/// point; close ones exactly, by writing every coordinate as an integer
/// multiple of the smallest power of two involved.
pub fn cmp_dist2(u: &Point, a: &Point, b: &Point) -> Ordering {
    let da = u.dist2(a);
    let db = u.dist2(b);
    if (da - db).abs() > 1e-13 * (da + db) {
        return da.total_cmp(&db);
    }
    let coords = [u.coords(), a.coords(), b.coords()];
    let dec: Vec<Vec<(i64, i32)>> = coords.iter().map(|c| c.iter().map(|&x| decode(x)).collect()).collect();
    let base = dec.iter().flatten().filter(|(m, _)| *m != 0).map(|&(_, e)| e).min().unwrap_or(0);
    let big = |(m, e): (i64, i32)| BigInt::from(m) << ((e - base).max(0) as usize);
    let mut sum = BigInt::zero();
    for i in 0..u.dim() {
        let (ui, ai, bi) = (big(dec[0][i]), big(dec[1][i]), big(dec[2][i]));
        // |u−a|² − |u−b|² = Σ (b−a)(2u − a − b)
        sum += (&bi - &ai) * (BigInt::from(2) * ui - ai - bi);
    }
    sum.cmp(&BigInt::zero())
}

/// True when `u` is strictly closer to some point of `f2` than to every
/// point of `f1`, decided exactly.
pub fn strictly_closer_to(u: &Point, f2: &[Point], f1: &[Point]) -> bool {
    f2.iter().any(|g| f1.iter().all(|f| cmp_dist2(u, g, f) == Ordering::Less))
}

pub(crate) fn payoff_unchecked(users: &[Point], f1: &[Point], f2: &[Point]) -> PayoffRecord {
    let mut served = Vec::new();
    if !f2.is_empty() {
        for (i, u) in users.iter().enumerate() {
            if strictly_closer_to(u, f2, f1) {
                served.push(i);
            }
        }
    }
    PayoffRecord { p2_count: served.len(), p1_count: users.len() - served.len(), served_by_p2: served }
}

/// Number of nonzero vectors in the best open half-space through the origin
/// for the planar vectors `a`. Vectors must be nonzero.
fn max_open_halfplane(a: &[Point]) -> usize {
    let mut best = 0;
    for ai in a {
        let (mut left, mut right, mut same, mut opp) = (0, 0, 0, 0);
        for aj in a {
            let c = ai.cross2(aj);
            if c > TOL {
                left += 1;
            } else if c < -TOL {
                right += 1;
            } else if ai.dot(aj) > 0.0 {
                same += 1;
            } else {
                opp += 1;
            }
        }
        best = best.max(left.max(right) + same.max(opp));
    }
    best
}

/// Same as [`max_open_halfplane`] for vectors in space.
fn max_open_halfspace(a: &[Point]) -> usize {
    let n = a.len();
    if n == 0 {
        return 0;
    }
    let mut best = 0;
    let mut found_plane = false;
    for i in 0..n {
        for j in i + 1..n {
            let nrm = a[i].cross(&a[j]);
            let len = nrm.norm();
            if len <= TOL {
                continue;
            }
            found_plane = true;
            let nh = nrm.scale(1.0 / len);
            let e1 = a[i].normalized();
            let e2 = nh.cross(&e1);
            let (mut pos, mut neg) = (0, 0);
            let mut inplane = Vec::new();
            for v in a {
                let h = nh.dot(v);
                if h > TOL {
                    pos += 1;
                } else if h < -TOL {
                    neg += 1;
                } else {
                    inplane.push(Point::new2(e1.dot(v), e2.dot(v)));
                }
            }
            best = best.max(pos.max(neg) + max_open_halfplane(&inplane));
        }
    }
    if !found_plane {
        // All vectors are parallel; split them by orientation.
        let same = a.iter().filter(|v| v.dot(&a[0]) > 0.0).count();
        best = same.max(n - same);
    }
    best
}

/// Tukey depth of `x` with respect to `pts`: the minimum number of points in
/// a closed half-space containing `x`.
pub fn tukey_depth_points(x: &Point, pts: &[Point]) -> usize {
    let mut at_x = 0;
    let mut vecs = Vec::with_capacity(pts.len());
    for p in pts {
        let v = p.sub(x);
        if v.norm2() <= TOL * TOL {
            at_x += 1;
        } else {
            vecs.push(v);
        }
    }
    let best = if x.dim() == 2 { max_open_halfplane(&vecs) } else { max_open_halfspace(&vecs) };
    at_x + vecs.len() - best
}

pub fn tukey_depth(x: &Point, users: &UserSet) -> Result<usize> {
    if x.dim() != users.dim() {
        return Err(VgError::DimensionMismatch { expected: users.dim(), got: x.dim() });
    }
    Ok(tukey_depth_points(x, users.points()))
}

/// Circumcenter of three points (in their common plane); `None` if collinear.
pub(crate) fn circumcenter3(a: &Point, b: &Point, c: &Point) -> Option<Point> {
    let u = b.sub(a);
    let v = c.sub(a);
    let w = u.cross(&v);
    let w2 = w.norm2();
    if w2 <= TOL * TOL * u.norm2().max(1.0) * v.norm2().max(1.0) {
        return None;
    }
    let t = v.scale(u.norm2()).sub(&u.scale(v.norm2())).cross(&w).scale(1.0 / (2.0 * w2));
    Some(a.add(&t).with_dim(a.dim()))
}

/// Center of the sphere through four points; `None` if coplanar.
pub(crate) fn circumcenter4(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let rows = [b.sub(a), c.sub(a), d.sub(a)];
    let m: Vec<[f64; 3]> = rows.iter().map(|r| [2.0 * r.x(), 2.0 * r.y(), 2.0 * r.z()]).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.norm2()).collect();
    let det = det3(m[0], m[1], m[2]);
    if det.abs() <= TOL {
        return None;
    }
    let col = |k: usize| -> f64 {
        let mut mm = [m[0], m[1], m[2]];
        for i in 0..3 {
            mm[i][k] = rhs[i];
        }
        det3(mm[0], mm[1], mm[2]) / det
    };
    Some(a.add(&Point::new3(col(0), col(1), col(2))))
}

/// Candidate disks (balls) whose boundary passes through the given points:
/// a single point, a diameter pair, the circumcircle of a triple, or the
/// circumsphere of a quadruple.
pub(crate) fn boundary_disk(pts: &[&Point]) -> Option<Disk> {
    match pts.len() {
        1 => Some(Disk::new(*pts[0], 0.0)),
        2 => {
            let c = pts[0].add(pts[1]).scale(0.5);
            Some(Disk::new(c, c.dist(pts[0])))
        }
        3 => circumcenter3(pts[0], pts[1], pts[2]).map(|c| Disk::new(c, c.dist(pts[0]))),
        4 => circumcenter4(pts[0], pts[1], pts[2], pts[3]).map(|c| Disk::new(c, c.dist(pts[0]))),
        _ => None,
    }
}

/// Smallest disk (ball) enclosing 1..=d+1 points.
pub fn min_enclosing_disk_of_subset(points: &[Point]) -> Result<Disk> {
    let first = points
        .first()
        .ok_or_else(|| VgError::InvalidInput("need at least one point".into()))?;
    let dim = first.dim();
    check_dim(dim)?;
    if points.len() > dim + 1 {
        return Err(VgError::InvalidInput(format!(
            "at most {} points determine a {}-dimensional enclosing ball",
            dim + 1,
            dim
        )));
    }
    if points.iter().any(|p| p.dim() != dim) {
        return Err(VgError::DimensionMismatch { expected: dim, got: 0 });
    }
    let m = points.len();
    let mut best: Option<Disk> = None;
    for mask in 1u32..(1 << m) {
        let subset: Vec<&Point> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| &points[i]).collect();
        if let Some(d) = boundary_disk(&subset) {
            if points.iter().all(|p| d.contains_closed(p))
                && best.as_ref().is_none_or(|b| d.radius < b.radius)
            {
                best = Some(d);
            }
        }
    }
    best.ok_or_else(|| VgError::Degenerate("no enclosing disk found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> UserSet {
        UserSet::from_coords(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&Point::new2(0., 0.), &Point::new2(3., 4.)).unwrap(), 25.0);
        assert_eq!(squared_distance(&Point::new2(1., 1.), &Point::new2(1., 1.)).unwrap(), 0.0);
        assert_eq!(squared_distance(&Point::new3(0., 0., 0.), &Point::new3(1., 1., 1.)).unwrap(), 3.0);
        assert!(squared_distance(&Point::new2(0., 0.), &Point::new3(0., 0., 0.)).is_err());
    }

    #[test]
    fn payoff_tie_goes_to_p1() {
        let u = UserSet::from_coords(&[vec![0.0, 0.0]]).unwrap();
        let f1 = FacilitySet::p1(vec![Point::new2(1.0, 0.0)]).unwrap();
        let f2 = FacilitySet::p2(vec![Point::new2(-1.0, 0.0)]).unwrap();
        assert_eq!(payoff(&u, &f1, &f2).unwrap().p2_count, 0);
        let f1 = FacilitySet::p1(vec![Point::new2(2.0, 0.0)]).unwrap();
        let f2 = FacilitySet::p2(vec![Point::new2(1.0, 0.0)]).unwrap();
        assert_eq!(payoff(&u, &f1, &f2).unwrap().p2_count, 1);
    }

    #[test]
    fn payoff_square() {
        let f1 = FacilitySet::p1(vec![Point::new2(0.5, 0.5)]).unwrap();
        let f2 = FacilitySet::p2(vec![Point::new2(0.5, 0.4)]).unwrap();
        let r = payoff(&square(), &f1, &f2).unwrap();
        assert_eq!(r.p2_count, 2);
        assert_eq!(r.served_by_p2, vec![0, 1]);
        assert_eq!(r.p1_count, 2);
    }

    #[test]
    fn payoff_rejects_collision() {
        let f1 = FacilitySet::p1(vec![Point::new2(0.5, 0.5)]).unwrap();
        let f2 = FacilitySet::p2(vec![Point::new2(0.5, 0.5)]).unwrap();
        assert!(matches!(payoff(&square(), &f1, &f2), Err(VgError::FacilityCollision(_))));
    }

    #[test]
    fn tukey_examples() {
        let sq = square();
        assert_eq!(tukey_depth(&Point::new2(0.5, 0.5), &sq).unwrap(), 2);
        assert_eq!(tukey_depth(&Point::new2(10.0, 10.0), &sq).unwrap(), 0);
        let tri = UserSet::from_coords(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![1.0, 3.0]]).unwrap();
        assert!(tukey_depth(&Point::new2(0.0, 0.0), &tri).unwrap() >= 1);
    }

    #[test]
    fn tukey_depth_3d_cube_center() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(Point::new3(x, y, z));
                }
            }
        }
        let u = UserSet::new(pts).unwrap();
        assert_eq!(tukey_depth(&Point::new3(0.5, 0.5, 0.5), &u).unwrap(), 4);
        assert_eq!(tukey_depth(&Point::new3(0.0, 0.0, 0.0), &u).unwrap(), 1);
    }

    #[test]
    fn enclosing_examples() {
        let d = min_enclosing_disk_of_subset(&[Point::new2(0., 0.)]).unwrap();
        assert_eq!(d.radius, 0.0);
        let d = min_enclosing_disk_of_subset(&[Point::new2(0., 0.), Point::new2(2., 0.)]).unwrap();
        assert_eq!(d.center, Point::new2(1.0, 0.0));
        assert_eq!(d.radius, 1.0);
        let h = 3f64.sqrt() / 2.0;
        let d = min_enclosing_disk_of_subset(&[Point::new2(0., 0.), Point::new2(1., 0.), Point::new2(0.5, h)])
            .unwrap();
        assert!((d.radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        // Obtuse triangle: the long side is a diameter.
        let d = min_enclosing_disk_of_subset(&[Point::new2(0., 0.), Point::new2(4., 0.), Point::new2(2., 0.5)])
            .unwrap();
        assert!((d.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn user_set_rejects_duplicates_and_checks_position() {
        assert!(UserSet::from_coords(&[vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let line = vec![Point::new2(0., 0.), Point::new2(1., 1.), Point::new2(2., 2.)];
        assert!(UserSet::new_checked(line.clone(), false).is_err());
        assert!(UserSet::new_checked(line, true).is_ok());
        assert!(!square().general_position());
    }
}
