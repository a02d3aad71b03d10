//! Minimum k-enclosing disks and balls by candidate enumeration.
//!
//! The optimal disk has at most d+1 points on its boundary that determine it,
//! so enumerating the disks through 1..=d+1 input points is exhaustive.

use rayon::prelude::*;
use std::cmp::Ordering;

use crate::error::{Result, VgError};
use crate::geometry::{boundary_disk, Disk, Point, UserSet};

fn better(a: &Disk, b: &Disk) -> bool {
    match a.radius.partial_cmp(&b.radius) {
        Some(Ordering::Less) => true,
        Some(Ordering::Greater) => false,
        _ => a.center.lex_cmp(&b.center) == Ordering::Less,
    }
}

fn count_inside(d: &Disk, pts: &[Point]) -> usize {
    pts.iter().filter(|p| d.contains_closed(p)).count()
}

/// Smallest disk (ball) holding at least `k` of `pts`. Ties go to the
/// smaller radius, then the lexicographically smaller center.
pub fn min_k_enclosing(pts: &[Point], k: usize) -> Result<Disk> {
    let n = pts.len();
    if k == 0 || k > n {
        return Err(VgError::OutOfRange(format!("k = {k} must lie in 1..={n}")));
    }
    let dim = pts[0].dim();
    if k == 1 {
        let p = pts.iter().min_by(|a, b| a.lex_cmp(b)).expect("n >= 1");
        return Ok(Disk::new(*p, 0.0));
    }
    let best = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let mut best: Option<Disk> = None;
            let mut consider = |d: Disk| {
                if best.as_ref().is_some_and(|b| d.radius > b.radius) {
                    return;
                }
                if count_inside(&d, pts) >= k && best.as_ref().is_none_or(|b| better(&d, b)) {
                    best = Some(d);
                }
            };
            for j in i + 1..n {
                if let Some(d) = boundary_disk(&[&pts[i], &pts[j]]) {
                    consider(d);
                }
                for l in j + 1..n {
                    if let Some(d) = boundary_disk(&[&pts[i], &pts[j], &pts[l]]) {
                        consider(d);
                    }
                    if dim == 3 {
                        for m in l + 1..n {
                            if let Some(d) = boundary_disk(&[&pts[i], &pts[j], &pts[l], &pts[m]]) {
                                consider(d);
                            }
                        }
                    }
                }
            }
            best
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a });
    best.ok_or_else(|| VgError::Degenerate("no candidate disk holds k points".into()))
}

/// Planar minimum k-enclosing disk.
pub fn min_k_enclosing_disk(users: &UserSet, k: usize) -> Result<Disk> {
    if users.dim() != 2 {
        return Err(VgError::DimensionMismatch { expected: 2, got: users.dim() });
    }
    min_k_enclosing(users.points(), k)
}

/// Minimum k-enclosing ball in space.
pub fn min_k_enclosing_ball(users: &UserSet, k: usize) -> Result<Disk> {
    if users.dim() != 3 {
        return Err(VgError::DimensionMismatch { expected: 3, got: users.dim() });
    }
    min_k_enclosing(users.points(), k)
}
