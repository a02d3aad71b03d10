//! Twenty cone axes covering the sphere of directions.
//!
//! Each cone has aperture π/3, so every direction must lie within π/6 of
//! some axis. The axes below were found offline by minimizing the covering
//! radius numerically and are frozen here; [`covering_radius`] re-derives
//! the certificate by sampling.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Result, VgError};
use crate::geometry::Point;

/// Number of sampled directions in the covering certificate.
pub const CERTIFICATE_SAMPLES: usize = 1_000_000;

/// Covering radius about 29.66°.
#[rustfmt::skip]
const DIRECTIONS: [[f64; 3]; 20] = [
    [-0.30842847215490593, 0.62155844353284617, 0.72009511790958292],
    [0.38053930471467112, -0.88519933563873676, 0.26760413627598117],
    [0.83960937261001534, 0.0052724415267403988, -0.54316507876129494],
    [-0.2818164333613053, -0.47433401618610838, -0.83401842843924601],
    [-0.86743721073854718, -0.45103610949766404, -0.21004550305907613],
    [-0.95052587854413206, 0.07877498299901757, 0.30049135806443833],
    [0.87524174960050116, 0.44447308066928776, 0.19077620479663182],
    [-0.19949447401657924, -0.95654807749483783, -0.21264461027211118],
    [0.89011683601296077, -0.37564939085175475, 0.25803014048552847],
    [-0.67135356810718283, 0.7411009675410567, -0.0073309275991443575],
    [0.54476790185168278, -0.61932382725975632, -0.56539006897932231],
    [0.34418322425460507, -0.46597549297791119, 0.81511026743974768],
    [-0.26155671330508218, 0.78514394355687478, -0.56137070962154967],
    [0.16379259424922349, 0.95406141113903564, 0.25087608464040834],
    [0.4891008653674484, 0.71301104310702468, -0.50238988435700593],
    [-0.48620767700650253, -0.68293475409973414, 0.545162559667001],
    [-0.74429273832186937, 0.25302235208100032, -0.61806796473262693],
    [0.086142561640736706, 0.088775955173583651, -0.99231965054461646],
    [-0.36028884677249789, -0.059217804857304449, 0.93095928937801886],
    [0.49975886576380291, 0.30028593165142936, 0.81244657383898811],
];

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSet {
    pub directions: Vec<Point>,
    /// Full apex angle of every cone.
    pub aperture: f64,
}

impl ConeSet {
    /// Index of the axis closest in angle to `v` (ties to the lowest index).
    pub fn nearest(&self, v: &Point) -> usize {
        let mut best = 0;
        let mut bd = f64::NEG_INFINITY;
        for (i, d) in self.directions.iter().enumerate() {
            let c = d.dot(v);
            if c > bd {
                bd = c;
                best = i;
            }
        }
        best
    }
}

/// `m` quasi-uniform unit vectors on a golden-angle spiral.
pub fn fibonacci_sphere(m: usize) -> impl Iterator<Item = Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m).map(move |t| {
        let z = 1.0 - (2.0 * t as f64 + 1.0) / m as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = t as f64 * golden;
        Point::new3(r * phi.cos(), r * phi.sin(), z)
    })
}

/// Largest angle from a sampled direction to its nearest axis.
pub fn covering_radius(directions: &[Point], samples: usize) -> f64 {
    let mut worst: f64 = 1.0;
    for s in fibonacci_sphere(samples) {
        let best = directions.iter().map(|d| d.dot(&s)).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.min(best);
    }
    worst.clamp(-1.0, 1.0).acos()
}

fn validated() -> Result<ConeSet> {
    let directions: Vec<Point> = DIRECTIONS.iter().map(|c| Point::new3(c[0], c[1], c[2])).collect();
    for (i, d) in directions.iter().enumerate() {
        if (d.norm() - 1.0).abs() > 1e-12 {
            return Err(VgError::Verification(format!("cone axis {i} is not a unit vector")));
        }
    }
    let radius = covering_radius(&directions, CERTIFICATE_SAMPLES);
    if radius > PI / 6.0 + 1e-6 {
        return Err(VgError::Verification(format!(
            "cone axes cover the sphere only within {radius} rad, above π/6"
        )));
    }
    Ok(ConeSet { directions, aperture: PI / 3.0 })
}

/// The frozen axes, validated once per process.
pub fn cone_cover_directions() -> Result<ConeSet> {
    static CELL: OnceLock<Result<ConeSet>> = OnceLock::new();
    CELL.get_or_init(validated).clone()
}
