//! Command-line driver. `run` parses argv, dispatches a subcommand and maps
//! the outcome to an exit code: 0 success, 1 a bound or verification
//! failed, 2 bad usage or input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::best_response::{best_response, brute_force_best_response, halfcell_response, sector_witness};
use crate::epsilon_table::{approx_factor, build_table, ceil_times, floor_times, fmt_rational, parse_rational, rat};
use crate::error::VgError;
use crate::game_engine::{generate_users, play, verify_bounds, InstanceSpec, PlayParams};
use crate::geometry::{Disk, FacilitySet, Point, UserSet};
use crate::io::{format_points, read_points};
use crate::p1_strategies::cones::cone_cover_directions;
use crate::p1_strategies::{
    build_ball_net, build_disk_net, pierce_ball_cluster, pierce_disk_cluster, verify_piercing, StrategyKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "vgame", version, about = "Discrete Voronoi game workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Bounds,
    Piercing,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Centerpoint,
    Eknet,
    Disknet,
    Ballnet,
}

impl StrategyArg {
    fn kind(self) -> StrategyKind {
        match self {
            StrategyArg::Centerpoint => StrategyKind::Centerpoint,
            StrategyArg::Eknet => StrategyKind::MustafaRay,
            StrategyArg::Disknet => StrategyKind::DiskNet,
            StrategyArg::Ballnet => StrategyKind::BallNet,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the ε̄ table with the approximation factors.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
        dim: u32,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        kmax: i64,
        #[arg(long, value_enum, default_value = "pretty")]
        format: TableFormat,
    },
    /// Play one episode and check its bounds.
    Play {
        /// Point file, one `x,y[,z]` per line.
        #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
        users: Option<PathBuf>,
        /// Generator spec such as `uniform_square:30:seed=7`.
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        epsilon: Option<String>,
        /// Write the full game result as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Build a weak ε-net and check it.
    Net {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
        dim: u32,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Randomized self-checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Dump sessions as JSON files into this directory.
        #[arg(long)]
        persist: Option<PathBuf>,
        #[arg(long, default_value_t = 3600)]
        ttl_secs: u64,
    },
}

/// Failure of a subcommand, already classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

impl From<VgError> for Failure {
    fn from(e: VgError) -> Self {
        match e {
            VgError::Verification(_) => Failure::Failed(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(format!("i/o error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the CLI with process stdout and stderr.
pub fn run(argv: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams. `argv[0]` is the program name.
pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Table { dim, kmax, format } => cmd_table(dim as usize, kmax, format, out),
        Command::Play { users, gen, k, strategy, epsilon, json, seed, allow_degenerate } => {
            cmd_play(users, gen, k, strategy, epsilon, json, seed, allow_degenerate, out)
        }
        Command::Net { dim, epsilon, users, allow_degenerate } => {
            cmd_net(dim as usize, &epsilon, users, allow_degenerate, out)
        }
        Command::Verify { suite, seed, trials } => cmd_verify(suite, env_seed().unwrap_or(seed), trials, out),
        Command::Serve { port, persist, ttl_secs } => cmd_serve(port, persist, ttl_secs, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Failed(m)) => {
            let _ = writeln!(err, "FAILED: {m}");
            EXIT_FAILED
        }
    }
}

/// `VG_SEED` wins over any seed given on the command line.
fn env_seed() -> Option<u64> {
    std::env::var("VG_SEED").ok().and_then(|s| s.trim().parse().ok())
}

fn cmd_table(dim: usize, kmax: i64, format: TableFormat, out: &mut dyn Write) -> Outcome {
    let table = build_table(dim, kmax)?;
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["k", "epsilon_num", "epsilon_den", "r", "s", "factor_num", "factor_den"])
                .map_err(|e| Failure::Failed(e.to_string()))?;
            for k in 1..=table.kmax() {
                let e = table.entry(k)?;
                let f = approx_factor(k, &table)?;
                w.write_record([
                    k.to_string(),
                    e.value.numer().to_string(),
                    e.value.denom().to_string(),
                    e.r.to_string(),
                    e.s.to_string(),
                    f.numer().to_string(),
                    f.denom().to_string(),
                ])
                .map_err(|e| Failure::Failed(e.to_string()))?;
            }
            w.flush()?;
        }
        TableFormat::Pretty => {
            let mut rows = vec![["k".to_string(), format!("eps_k^{dim}"), "(r, s)".into(), "factor".into()]];
            for k in 1..=table.kmax() {
                let e = table.entry(k)?;
                rows.push([
                    k.to_string(),
                    fmt_rational(&e.value),
                    format!("({}, {})", e.r, e.s),
                    fmt_rational(&approx_factor(k, &table)?),
                ]);
            }
            let widths: Vec<usize> =
                (0..4).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
            for (i, row) in rows.iter().enumerate() {
                let cells: Vec<String> =
                    row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}", w = *w)).collect();
                writeln!(out, "{}", cells.join(" | "))?;
                if i == 0 {
                    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                    writeln!(out, "{}", rule.join("-+-"))?;
                }
            }
        }
    }
    Ok(())
}

fn load_users(path: &PathBuf, allow_degenerate: bool) -> Result<UserSet, Failure> {
    let pts = read_points(path)?;
    Ok(UserSet::new_checked(pts, allow_degenerate)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_play(
    users: Option<PathBuf>,
    gen: Option<String>,
    k: usize,
    strategy: StrategyArg,
    epsilon: Option<String>,
    json: Option<PathBuf>,
    seed: Option<u64>,
    allow_degenerate: bool,
    out: &mut dyn Write,
) -> Outcome {
    let kind = strategy.kind();
    let epsilon = epsilon.as_deref().map(parse_rational).transpose()?;
    let (users, id) = match (users, gen) {
        (Some(path), _) => (load_users(&path, allow_degenerate)?, path.display().to_string()),
        (None, Some(g)) => {
            let mut spec = InstanceSpec::parse(&g)?;
            if let Some(s) = env_seed().or(seed) {
                spec.seed = s;
            }
            if kind == StrategyKind::BallNet && !g.contains("dim=") {
                spec.dim = 3;
            }
            (generate_users(&spec)?, spec.id())
        }
        (None, None) => return Err(Failure::Usage("one of --users or --gen is required".into())),
    };
    let table = if kind == StrategyKind::MustafaRay { Some(build_table(2, k.max(1) as i64)?) } else { None };
    let params = PlayParams { epsilon, table: table.as_ref(), instance_id: Some(id) };
    let result = play(&users, k, kind, &params)?;
    let check_table = match table {
        Some(t) => t,
        None => build_table(users.dim(), k.max(1) as i64)?,
    };
    let report = verify_bounds(&result, &check_table);
    writeln!(
        out,
        "instance={} n={} k={} strategy={} p1_payoff={} p2_payoff={} halfcell_payoff={} guarantee={}",
        result.instance_id,
        result.n,
        result.k,
        kind.as_str(),
        result.p1_payoff,
        result.p2_payoff,
        result.halfcell_payoff,
        fmt_rational(&result.guarantee.0)
    )?;
    writeln!(
        out,
        "p1 bounds: lower {}·n ({}), upper {}·n ({})",
        fmt_rational(&result.bounds.p1_lower.0),
        if result.bounds.lower_satisfied { "ok" } else { "VIOLATED" },
        fmt_rational(&result.bounds.p1_upper.0),
        if result.bounds.upper_satisfied { "ok" } else { "VIOLATED" },
    )?;
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&result).map_err(|e| Failure::Failed(e.to_string()))?;
        std::fs::write(&path, text)?;
    }
    if report.ok {
        Ok(())
    } else {
        Err(Failure::Failed(report.violations.join("; ")))
    }
}

fn cmd_net(dim: usize, epsilon: &str, users: PathBuf, allow_degenerate: bool, out: &mut dyn Write) -> Outcome {
    let eps = parse_rational(epsilon)?;
    if eps <= rat(0, 1) || eps > rat(1, 1) {
        return Err(Failure::Usage(format!("--epsilon must lie in (0, 1], got {epsilon}")));
    }
    let users = load_users(&users, allow_degenerate)?;
    if users.dim() != dim {
        return Err(Failure::Usage(format!("--dim {dim} but the point file is {}-dimensional", users.dim())));
    }
    let (strategy, per_cluster, factor) =
        if dim == 2 { (build_disk_net(&users, &eps)?, 7, 6) } else { (build_ball_net(&users, &eps)?, 21, 20) };
    let net = strategy.placements.points();
    write!(out, "{}", format_points(net))?;
    let n = users.len();
    let inv = floor_times(&(rat(1, 1) / &eps), 1);
    let size_bound = per_cluster * inv;
    let pierce = verify_piercing(&users, net, &eps)?;
    let mut failures = Vec::new();
    if net.len() > size_bound {
        failures.push(format!("net size {} exceeds {size_bound}", net.len()));
    }
    if pierce.misses > 0 {
        failures.push(format!("{} heavy candidate disks miss the net", pierce.misses));
    }
    let mut p2 = 0;
    if !net.is_empty() {
        let br = best_response(&users, &strategy.placements)?;
        p2 = br.payoff;
        let cap = floor_times(&(&eps * rat(factor, 1)), n);
        if p2 > cap {
            failures.push(format!("best response takes {p2} > {cap}"));
        }
    }
    writeln!(
        out,
        "# size={} bound={} candidates={} heavy={} misses={} best_response={}",
        net.len(),
        size_bound,
        pierce.candidates,
        pierce.heavy,
        pierce.misses,
        p2
    )?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Failed(failures.join("; ")))
    }
}

fn suite_line(out: &mut dyn Write, name: &str, checked: usize, failures: &[String]) -> std::io::Result<()> {
    if failures.is_empty() {
        writeln!(out, "PASS {name}: {checked} checks")
    } else {
        writeln!(out, "FAIL {name}: {} of {checked} checks failed; first: {}", failures.len(), failures[0])
    }
}

fn cmd_verify(suite: Suite, seed: u64, trials: usize, out: &mut dyn Write) -> Outcome {
    let mut all_failures = 0;
    if matches!(suite, Suite::All | Suite::Bounds) {
        let (checked, f) = verify_bounds_suite(seed, trials)?;
        suite_line(out, "bounds", checked, &f)?;
        all_failures += f.len();
    }
    if matches!(suite, Suite::All | Suite::Piercing) {
        let (checked, f) = verify_piercing_suite(seed, trials)?;
        suite_line(out, "piercing", checked, &f)?;
        all_failures += f.len();
    }
    if matches!(suite, Suite::All | Suite::Oracle) {
        let (checked, f) = verify_oracle_suite(seed, trials)?;
        suite_line(out, "oracle", checked, &f)?;
        all_failures += f.len();
    }
    if all_failures == 0 {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{all_failures} checks failed")))
    }
}

fn spec(dist: &str, n: usize, seed: u64, dim: usize) -> Result<InstanceSpec, Failure> {
    Ok(InstanceSpec::parse(&format!("{dist}:{n}:seed={seed}:dim={dim}"))?)
}

const DISTS: [&str; 4] = ["uniform_square", "gaussian_clusters", "annulus", "grid_jitter"];

fn verify_bounds_suite(seed: u64, trials: usize) -> Result<(usize, Vec<String>), Failure> {
    let table = build_table(2, 5)?;
    let mut checked = 0;
    let mut failures = Vec::new();
    for t in 0..trials {
        let s = seed.wrapping_add(t as u64);
        let spec = spec(DISTS[t % DISTS.len()], 30 + t % 11, s, 2)?;
        let users = generate_users(&spec)?;
        let runs: [(StrategyKind, usize, Option<&str>); 3] =
            [(StrategyKind::Centerpoint, 1, None), (StrategyKind::MustafaRay, 2, None), (StrategyKind::DiskNet, 28, Some("1/4"))];
        for (kind, k, eps) in runs {
            let params = PlayParams {
                epsilon: eps.map(parse_rational).transpose()?,
                table: Some(&table),
                instance_id: Some(spec.id()),
            };
            checked += 1;
            match play(&users, k, kind, &params) {
                Ok(r) => {
                    let rep = verify_bounds(&r, &table);
                    if !rep.ok {
                        failures.push(format!("{} {}: {}", spec.id(), kind.as_str(), rep.violations.join("; ")));
                    }
                }
                Err(e) => failures.push(format!("{} {}: {e}", spec.id(), kind.as_str())),
            }
        }
    }
    Ok((checked, failures))
}

fn verify_piercing_suite(seed: u64, trials: usize) -> Result<(usize, Vec<String>), Failure> {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Random disks of radius >= r meeting D* must contain a cluster point.
    let dstar = Disk::new(Point::new2(0.0, 0.0), 1.0);
    let cluster = pierce_disk_cluster(&dstar);
    for _ in 0..trials * 500 {
        let rad = 1.0 + rng.random_range(0.0..3.0);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let reach = 1.0 + rad;
        let dist = rng.random_range(0.0..reach);
        let d = Disk::new(Point::new2(dist * a.cos(), dist * a.sin()), rad);
        checked += 1;
        if !cluster.iter().any(|q| d.contains_closed(q)) {
            failures.push(format!("disk at ({:.6}, {:.6}) r={rad:.6} missed", d.center.x(), d.center.y()));
        }
    }
    let cones = cone_cover_directions()?;
    let ball = Disk::new(Point::new3(0.0, 0.0, 0.0), 1.0);
    let cluster = pierce_ball_cluster(&ball, &cones);
    for _ in 0..trials * 500 {
        let rad = 1.0 + rng.random_range(0.0..3.0);
        let v = Point::new3(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() < 1e-6 {
            continue;
        }
        let dist = rng.random_range(0.0..1.0 + rad);
        let b = Disk::new(v.normalized().scale(dist), rad);
        checked += 1;
        if !cluster.iter().any(|q| b.contains_closed(q)) {
            failures.push(format!("ball at {:?} r={rad:.6} missed", b.center.coords()));
        }
    }
    for t in 0..trials.min(5) {
        let spec = spec(DISTS[t % DISTS.len()], 40, seed.wrapping_add(t as u64), 2)?;
        let users = generate_users(&spec)?;
        for eps in ["1/2", "1/4"] {
            let e = parse_rational(eps)?;
            let net = build_disk_net(&users, &e)?;
            let rep = verify_piercing(&users, net.placements.points(), &e)?;
            checked += 1;
            if rep.misses > 0 {
                failures.push(format!("{} eps={eps}: {} misses", spec.id(), rep.misses));
            }
        }
    }
    Ok((checked, failures))
}

fn verify_oracle_suite(seed: u64, trials: usize) -> Result<(usize, Vec<String>), Failure> {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for t in 0..trials {
        let n = rng.random_range(5..=25);
        let k = rng.random_range(1..=4);
        let spec = spec(DISTS[t % DISTS.len()], n, seed.wrapping_add(t as u64), 2)?;
        let users = generate_users(&spec)?;
        let f1: Vec<Point> =
            (0..k).map(|_| Point::new2(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0))).collect();
        let f1 = FacilitySet::p1(f1)?;
        checked += 1;
        let sweep = best_response(&users, &f1)?;
        let brute = brute_force_best_response(&users, &f1)?;
        if sweep.payoff != brute.payoff {
            failures.push(format!("{}: sweep {} vs brute force {}", spec.id(), sweep.payoff, brute.payoff));
        }
        let hc = halfcell_response(&users, &f1)?;
        if hc.payoff * 2 * k < n {
            failures.push(format!("{}: half-cell response {} < n/(2k)", spec.id(), hc.payoff));
        }
        if sweep.payoff > 0 {
            let w = sector_witness(&users, &f1, &sweep)?;
            let inside = users.points().iter().filter(|p| w.contains_closed(p)).count();
            let blocked = f1.points().iter().any(|q| w.contains_open(q));
            if inside < ceil_times(&rat(1, 6), sweep.payoff) || blocked {
                failures.push(format!("{}: sector witness holds {inside} users", spec.id()));
            }
        }
    }
    Ok((checked, failures))
}

fn cmd_serve(port: u16, persist: Option<PathBuf>, ttl_secs: u64, out: &mut dyn Write) -> Outcome {
    let config = crate::service_api::ServiceConfig {
        ttl: std::time::Duration::from_secs(ttl_secs),
        persist,
    };
    writeln!(out, "listening on 0.0.0.0:{port}")?;
    out.flush()?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(crate::service_api::serve(port, config)).map_err(|e| Failure::Failed(e.to_string()))
}
