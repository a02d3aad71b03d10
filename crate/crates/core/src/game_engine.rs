//! Episodes of the one-round game VG(k,1), reproducible instance generation
//! and exact bound checks.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_response::{best_response, halfcell_response, BestResponse};
use crate::epsilon_table::{fmt_rational, rat, EpsilonTable, JsonRational, Rational};
use crate::error::{Result, VgError};
use crate::geometry::{FacilitySet, Point, UserSet};
use crate::p1_strategies::{build_strategy, Strategy, StrategyKind};

/// Maximum jitter applied to generated coordinates.
pub const JITTER: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    UniformSquare,
    GaussianClusters,
    Annulus,
    GridJitter,
}

impl Distribution {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform_square" => Ok(Distribution::UniformSquare),
            "gaussian_clusters" => Ok(Distribution::GaussianClusters),
            "annulus" => Ok(Distribution::Annulus),
            "grid_jitter" => Ok(Distribution::GridJitter),
            _ => Err(VgError::InvalidInput(format!("unknown distribution {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Distribution::UniformSquare => "uniform_square",
            Distribution::GaussianClusters => "gaussian_clusters",
            Distribution::Annulus => "annulus",
            Distribution::GridJitter => "grid_jitter",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim: usize,
    pub n: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl InstanceSpec {
    /// Parses `dist:n[:seed=S][:dim=D]`, e.g. `uniform_square:30:seed=7`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let dist = Distribution::parse(parts.next().unwrap_or(""))?;
        let n_str = parts
            .next()
            .ok_or_else(|| VgError::InvalidInput(format!("instance spec {s:?} lacks a size")))?;
        let n: usize = n_str
            .parse()
            .map_err(|_| VgError::InvalidInput(format!("bad size {n_str:?} in instance spec")))?;
        let mut spec = InstanceSpec { dim: 2, n, distribution: dist, seed: 0 };
        for p in parts {
            let (key, val) = p
                .split_once('=')
                .ok_or_else(|| VgError::InvalidInput(format!("expected key=value, got {p:?}")))?;
            let bad = || VgError::InvalidInput(format!("bad value {val:?} for {key}"));
            match key {
                "seed" => spec.seed = val.parse().map_err(|_| bad())?,
                "dim" => spec.dim = val.parse().map_err(|_| bad())?,
                _ => return Err(VgError::InvalidInput(format!("unknown instance option {key:?}"))),
            }
        }
        Ok(spec)
    }

    pub fn id(&self) -> String {
        format!("{}:{}:seed={}:dim={}", self.distribution.as_str(), self.n, self.seed, self.dim)
    }
}

fn draw(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let d = spec.dim;
    let n = spec.n;
    let mut pts = Vec::with_capacity(n);
    match spec.distribution {
        Distribution::UniformSquare => {
            for _ in 0..n {
                let mut c = [0.0; 3];
                for v in c.iter_mut().take(d) {
                    *v = rng.random_range(0.0..100.0);
                }
                pts.push(c);
            }
        }
        Distribution::GaussianClusters => {
            let clusters = (n / 10 + 1).clamp(2, 5);
            let centers: Vec<[f64; 3]> = (0..clusters)
                .map(|_| {
                    let mut c = [0.0; 3];
                    for v in c.iter_mut().take(d) {
                        *v = rng.random_range(20.0..80.0);
                    }
                    c
                })
                .collect();
            let noise = Normal::new(0.0, 6.0).expect("valid deviation");
            for t in 0..n {
                let mut c = centers[t % clusters];
                for v in c.iter_mut().take(d) {
                    *v += noise.sample(rng);
                }
                pts.push(c);
            }
        }
        Distribution::Annulus => {
            for _ in 0..n {
                let r = rng.random_range(30.0..50.0);
                let dir: [f64; 3] = if d == 2 {
                    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    [a.cos(), a.sin(), 0.0]
                } else {
                    UnitSphere.sample(rng)
                };
                pts.push([50.0 + r * dir[0], 50.0 + r * dir[1], if d == 3 { 50.0 + r * dir[2] } else { 0.0 }]);
            }
        }
        Distribution::GridJitter => {
            let side = (n as f64).powf(1.0 / d as f64).ceil() as usize;
            for t in 0..n {
                let (i, j, l) = (t % side, (t / side) % side, t / (side * side));
                pts.push([10.0 * i as f64, 10.0 * j as f64, if d == 3 { 10.0 * l as f64 } else { 0.0 }]);
            }
        }
    }
    for c in pts.iter_mut() {
        for v in c.iter_mut().take(d) {
            *v += rng.random_range(-JITTER..JITTER) / (d as f64).sqrt();
        }
    }
    pts
}

/// Deterministic users for a spec; the same spec always yields the same
/// coordinates, bit for bit (ChaCha8 seeded from the 64-bit seed).
pub fn generate_users(spec: &InstanceSpec) -> Result<UserSet> {
    if spec.n == 0 {
        return Err(VgError::InvalidInput("instance size must be at least 1".into()));
    }
    if spec.dim != 2 && spec.dim != 3 {
        return Err(VgError::UnsupportedDimension(spec.dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..1000 {
        let raw = draw(spec, &mut rng);
        let pts: Vec<Point> = raw
            .iter()
            .map(|c| if spec.dim == 2 { Point::new2(c[0], c[1]) } else { Point::new3(c[0], c[1], c[2]) })
            .collect();
        if let Ok(set) = UserSet::new_checked(pts, false) {
            return Ok(set);
        }
    }
    Err(VgError::Degenerate(format!("no general-position sample for {} after 1000 retries", spec.id())))
}

/// Exact bound bookkeeping for one episode. Fractions are of n.
#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    /// P1 keeps at least `p1_lower · n` users.
    pub p1_lower: JsonRational,
    /// P1 keeps at most `p1_upper · n` users.
    pub p1_upper: JsonRational,
    pub lower_satisfied: bool,
    pub upper_satisfied: bool,
    pub halfcell_satisfied: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameResult {
    pub instance_id: String,
    pub dim: usize,
    pub n: usize,
    pub k: usize,
    pub users: Vec<Point>,
    pub f1: Vec<Point>,
    pub strategy: StrategyKind,
    pub guarantee: JsonRational,
    pub best_response: BestResponse,
    pub halfcell_payoff: usize,
    pub p1_payoff: usize,
    pub p2_payoff: usize,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, Default)]
pub struct PlayParams<'a> {
    pub epsilon: Option<Rational>,
    pub table: Option<&'a EpsilonTable>,
    pub instance_id: Option<String>,
}

fn n_rat(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Plays one episode: P1 follows `strategy_kind`, P2 answers optimally.
pub fn play(users: &UserSet, k: usize, strategy_kind: StrategyKind, params: &PlayParams) -> Result<GameResult> {
    if k == 0 {
        return Err(VgError::InvalidInput("k must be at least 1".into()));
    }
    let budget = if strategy_kind == StrategyKind::Centerpoint { None } else { Some(k) };
    let strategy = build_strategy(users, strategy_kind, budget, params.epsilon.clone(), params.table)
        .map_err(|e| match e {
            VgError::Verification(m) => VgError::Verification(m),
            other => VgError::InvalidInput(format!("building {} strategy: {other}", strategy_kind.as_str())),
        })?;
    evaluate(users, &strategy, params.instance_id.clone())
}

/// Scores a fixed P1 placement.
pub fn evaluate(users: &UserSet, strategy: &Strategy, instance_id: Option<String>) -> Result<GameResult> {
    let f1 = &strategy.placements;
    if f1.is_empty() {
        return Err(VgError::InvalidInput("strategy placed no facility".into()));
    }
    let br = best_response(users, f1)?;
    let hc = halfcell_response(users, f1)?;
    let n = users.len();
    let k = f1.len();
    let p2 = br.payoff;
    let p1 = n - p2;
    let lower = Rational::one() - &strategy.guarantee;
    let upper = rat(2 * k as i64 - 1, 2 * k as i64);
    let bounds = Bounds {
        lower_satisfied: n_rat(p1) >= &lower * n_rat(n),
        upper_satisfied: n_rat(p1) <= &upper * n_rat(n),
        halfcell_satisfied: n_rat(hc.payoff) * rat(2 * k as i64, 1) >= n_rat(n),
        p1_lower: JsonRational(lower),
        p1_upper: JsonRational(upper),
    };
    Ok(GameResult {
        instance_id: instance_id.unwrap_or_else(|| "adhoc".into()),
        dim: users.dim(),
        n,
        k,
        users: users.points().to_vec(),
        f1: f1.points().to_vec(),
        strategy: strategy.kind,
        guarantee: JsonRational(strategy.guarantee.clone()),
        best_response: br,
        halfcell_payoff: hc.payoff,
        p1_payoff: p1,
        p2_payoff: p2,
        bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Re-checks every inequality of a result from its raw numbers.
pub fn verify_bounds(result: &GameResult, table: &EpsilonTable) -> BoundsReport {
    let mut v = Vec::new();
    let n = result.n;
    let k = result.k.max(1);
    if result.p1_payoff + result.p2_payoff != n {
        v.push(format!("payoffs {} + {} do not add up to n = {n}", result.p1_payoff, result.p2_payoff));
    }
    if result.best_response.payoff != result.p2_payoff {
        v.push("P2 payoff differs from the best response".into());
    }
    let g = &result.guarantee.0;
    if n_rat(result.p2_payoff) > g * n_rat(n) {
        v.push(format!(
            "lower bound: P2 took {} > {}·{n}",
            result.p2_payoff,
            fmt_rational(g)
        ));
    }
    if n_rat(result.p2_payoff) * rat(2 * k as i64, 1) < n_rat(n) {
        v.push(format!("upper bound: P2 took {} < n/(2k) with k = {k}", result.p2_payoff));
    }
    if n_rat(result.halfcell_payoff) * rat(2 * k as i64, 1) < n_rat(n) {
        v.push(format!("half-cell response took {} < n/(2k) with k = {k}", result.halfcell_payoff));
    }
    if result.strategy == StrategyKind::MustafaRay && table.dim == result.dim {
        match table.value(result.k) {
            Ok(e) if e == g => {}
            Ok(e) => v.push(format!("guarantee {} differs from the table value {}", fmt_rational(g), fmt_rational(e))),
            Err(e) => v.push(e.to_string()),
        }
    }
    BoundsReport { ok: v.is_empty(), violations: v }
}

/// Runs one episode per spec in parallel; results keep the input order.
pub fn run_batch(
    specs: &[InstanceSpec],
    k: usize,
    kind: StrategyKind,
    epsilon: Option<Rational>,
    table: Option<&EpsilonTable>,
) -> Vec<Result<GameResult>> {
    specs
        .par_iter()
        .map(|spec| {
            let users = generate_users(spec)?;
            let params = PlayParams { epsilon: epsilon.clone(), table, instance_id: Some(spec.id()) };
            play(&users, k, kind, &params)
        })
        .collect()
}

pub fn write_jsonl<W: Write>(mut out: W, results: &[GameResult]) -> std::io::Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Summary CSV with columns k, strategy, n, p1_payoff, lower, upper; the
/// bounds are exact rationals of users.
pub fn write_summary_csv<W: Write>(out: W, results: &[GameResult]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "strategy", "n", "p1_payoff", "lower", "upper"])?;
    for r in results {
        let n = n_rat(r.n);
        w.write_record([
            r.k.to_string(),
            r.strategy.as_str().to_string(),
            r.n.to_string(),
            r.p1_payoff.to_string(),
            fmt_rational(&(&r.bounds.p1_lower.0 * &n)),
            fmt_rational(&(&r.bounds.p1_upper.0 * &n)),
        ])?;
    }
    w.flush()
}

/// Wraps a caller-supplied placement as a strategy with the trivial bound.
pub fn custom_strategy(points: Vec<Point>) -> Result<Strategy> {
    let k = points.len();
    Ok(Strategy {
        placements: FacilitySet::p1(points)?,
        kind: StrategyKind::Custom,
        k,
        epsilon: None,
        guarantee: Rational::one(),
    })
}
