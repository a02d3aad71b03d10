//! Weak ε-nets for disks (7 points per cluster) and balls (21 points per
//! cluster).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::epsilon_table::{ceil_times, rat, Rational};
use crate::error::{Result, VgError};
use crate::geometry::{boundary_disk, Disk, FacilitySet, Point, UserSet, TOL};
use crate::p1_strategies::cones::cone_cover_directions;
use crate::p1_strategies::enclosing::min_k_enclosing;
use crate::p1_strategies::piercing::{pierce_ball_cluster, pierce_disk_cluster};
use crate::p1_strategies::{Strategy, StrategyKind};

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon > Rational::one() {
        return Err(VgError::OutOfRange(format!(
            "epsilon must lie in (0, 1], got {}",
            crate::epsilon_table::fmt_rational(epsilon)
        )));
    }
    Ok(())
}

/// Output of the greedy net loop, kept for inspection and tests.
#[derive(Clone, Debug)]
pub struct NetTrace {
    pub points: Vec<Point>,
    /// The k-enclosing disks found, in order.
    pub clusters: Vec<Disk>,
}

/// Greedy loop shared by both nets: while more than εn points remain, find
/// the smallest disk (ball) holding ⌈εn⌉ of them, pierce it and drop the
/// points it contains.
pub fn net_loop(users: &UserSet, epsilon: &Rational) -> Result<NetTrace> {
    check_epsilon(epsilon)?;
    let n = users.len();
    let need = ceil_times(epsilon, n).max(1);
    let nn = BigInt::from(n);
    let cones = if users.dim() == 3 { Some(cone_cover_directions()?) } else { None };
    let mut remaining: Vec<Point> = users.points().to_vec();
    let mut points: Vec<Point> = Vec::new();
    let mut clusters = Vec::new();
    // remaining > ε n  <=>  remaining * den > num * n
    while BigInt::from(remaining.len()) * epsilon.denom() > epsilon.numer() * &nn {
        let dstar = min_k_enclosing(&remaining, need)?;
        let cluster = match &cones {
            None => pierce_disk_cluster(&dstar),
            Some(c) => pierce_ball_cluster(&dstar, c),
        };
        for q in cluster {
            // Clusters of neighbouring disks can share points up to rounding.
            let tol = TOL * (1.0 + q.norm());
            if !points.iter().any(|p| p.dist(&q) <= tol) {
                points.push(q);
            }
        }
        let before = remaining.len();
        remaining.retain(|p| !dstar.contains_closed(p));
        if remaining.len() == before {
            return Err(VgError::Degenerate("k-enclosing disk removed no point".into()));
        }
        clusters.push(dstar);
    }
    Ok(NetTrace { points, clusters })
}

fn build_net(users: &UserSet, epsilon: &Rational, kind: StrategyKind, factor: i64) -> Result<Strategy> {
    let trace = net_loop(users, epsilon)?;
    let mut guarantee = epsilon * rat(factor, 1);
    if guarantee > Rational::one() {
        guarantee = Rational::one();
    }
    if guarantee.is_zero() {
        guarantee = Rational::one();
    }
    let k = trace.points.len();
    Ok(Strategy {
        placements: FacilitySet::p1(trace.points)?,
        kind,
        k,
        epsilon: Some(epsilon.clone()),
        guarantee,
    })
}

/// Planar weak ε-net of at most 7⌊1/ε⌋ points; P2 then takes at most 6εn.
pub fn build_disk_net(users: &UserSet, epsilon: &Rational) -> Result<Strategy> {
    if users.dim() != 2 {
        return Err(VgError::DimensionMismatch { expected: 2, got: users.dim() });
    }
    build_net(users, epsilon, StrategyKind::DiskNet, 6)
}

/// Weak ε-net in space of at most 21⌊1/ε⌋ points; P2 then takes at most 20εn.
pub fn build_ball_net(users: &UserSet, epsilon: &Rational) -> Result<Strategy> {
    if users.dim() != 3 {
        return Err(VgError::DimensionMismatch { expected: 3, got: users.dim() });
    }
    build_net(users, epsilon, StrategyKind::BallNet, 20)
}

/// Outcome of the exhaustive piercing check.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PiercingReport {
    /// Candidate disks (balls) examined.
    pub candidates: usize,
    /// Candidates holding more than εn users.
    pub heavy: usize,
    /// Heavy candidates containing no net point.
    pub misses: usize,
}

/// Checks that every disk (ball) spanned by 2..=d+1 users and holding more
/// than εn of them contains a net point. Containment is closed with the
/// usual tolerance on both sides.
pub fn verify_piercing(users: &UserSet, net: &[Point], epsilon: &Rational) -> Result<PiercingReport> {
    check_epsilon(epsilon)?;
    let pts = users.points();
    let n = pts.len();
    let d = users.dim();
    let nn = BigInt::from(n);
    let mut report = PiercingReport { candidates: 0, heavy: 0, misses: 0 };
    let mut visit = |subset: &[&Point]| {
        let Some(disk) = boundary_disk(subset) else { return };
        report.candidates += 1;
        let count = pts.iter().filter(|p| disk.contains_closed(p)).count();
        if BigInt::from(count) * epsilon.denom() > epsilon.numer() * &nn {
            report.heavy += 1;
            if !net.iter().any(|q| disk.contains_closed(q)) {
                report.misses += 1;
            }
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            visit(&[&pts[i], &pts[j]]);
            for k in j + 1..n {
                visit(&[&pts[i], &pts[j], &pts[k]]);
                if d == 3 {
                    for l in k + 1..n {
                        visit(&[&pts[i], &pts[j], &pts[k], &pts[l]]);
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_one_gives_empty_net() {
        let u = UserSet::from_coords(&[vec![0.0, 0.0], vec![3.0, 1.0], vec![1.0, 5.0]]).unwrap();
        assert!(net_loop(&u, &rat(1, 1)).unwrap().points.is_empty());
        assert!(build_disk_net(&u, &rat(0, 1)).is_err());
        assert!(build_disk_net(&u, &rat(2, 1)).is_err());
    }
}
