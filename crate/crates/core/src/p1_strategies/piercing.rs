use std::f64::consts::PI;

use crate::geometry::{Disk, Point};
use crate::p1_strategies::cones::ConeSet;

/// Seven points piercing every disk of radius at least `r` that meets the
/// disk `D*` of radius `r`: the center, plus one point per π/3 sector at
/// distance √3·r, each at distance exactly `r` from the four sector corners.
pub fn pierce_disk_cluster(dstar: &Disk) -> Vec<Point> {
    pierce_disk_cluster_rotated(dstar, 0.0)
}

/// Same as [`pierce_disk_cluster`] with the sector fan rotated by `anchor`.
pub fn pierce_disk_cluster_rotated(dstar: &Disk, anchor: f64) -> Vec<Point> {
    let c = dstar.center;
    let r = dstar.radius;
    if r <= 0.0 {
        return vec![c];
    }
    let mut out = Vec::with_capacity(7);
    out.push(c);
    // Canonical q = (3r/2, √3 r/2), the apex of the sector [0, π/3].
    let qx = 1.5 * r;
    let qy = 3f64.sqrt() / 2.0 * r;
    for k in 0..6 {
        let a = anchor + k as f64 * PI / 3.0;
        let (s, co) = a.sin_cos();
        out.push(Point::new2(c.x() + co * qx - s * qy, c.y() + s * qx + co * qy));
    }
    out
}

/// Center of `B*` plus one point per cone at distance √3·r along its axis.
pub fn pierce_ball_cluster(bstar: &Disk, cones: &ConeSet) -> Vec<Point> {
    let c = bstar.center;
    let r = bstar.radius;
    if r <= 0.0 {
        return vec![c];
    }
    let mut out = Vec::with_capacity(cones.directions.len() + 1);
    out.push(c);
    for d in &cones.directions {
        out.push(c.add(&d.scale(3f64.sqrt() * r)));
    }
    out
}
