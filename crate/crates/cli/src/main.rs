//! `euler2c`: region scans, rotation numbers, Conley-Zehnder indices,
//! family tracing, trajectories and the verification suite for the planar
//! problem of two fixed centers.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use euler2c::contact::{minimum_at_zero_check, transversality_audit};
use euler2c::dynamics::{integrate, sample_state};
use euler2c::index::{cz, CollisionOrbit, IndexResult};
use euler2c::periods::{critical_orbit_periods, period_closed_form, CriticalKind, PeriodPair};
use euler2c::problem::{classify, Component, EnergyMomentum, ProblemParams, Region, RegionTag, DELTA_CURVE};
use euler2c::rotation::{critical_rotation, rotation_number, trace_torus_family};
use euler2c::verify::{run_all, Level};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "euler2c", version, about = "Rotation numbers and indices for two fixed centers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a (g, c) grid and print regions, periods and rotation numbers as CSV
    Scan(ScanArgs),
    /// Conley-Zehnder index of a collision orbit (JSON)
    Cz(CzArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
    /// Rotation number of a torus or a critical orbit (JSON)
    Rotation(RotationArgs),
    /// Trace a T_{k,l} torus family as CSV
    Trace(TraceArgs),
    /// Integrate the regularized flow from a point of (g, c) and print CSV
    Integrate(IntegrateArgs),
    /// Transversality audit of the radial Liouville field (JSON)
    ContactAudit(ContactArgs),
}

#[derive(Args)]
struct MassArg {
    /// Mass parameter of the Moon, in (0, 1/2]
    #[arg(long, value_parser = parse_mu)]
    mu: f64,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    mass: MassArg,
    /// Energy range `min,max`
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    c_range: (f64, f64),
    /// Integral range `min,max`
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    g_range: (f64, f64),
    /// Points per axis
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitArg {
    Int,
    #[value(name = "extE")]
    ExtE,
    #[value(name = "extM")]
    ExtM,
}

impl From<OrbitArg> for CollisionOrbit {
    fn from(o: OrbitArg) -> Self {
        match o {
            OrbitArg::Int => CollisionOrbit::Interior,
            OrbitArg::ExtE => CollisionOrbit::ExteriorEarth,
            OrbitArg::ExtM => CollisionOrbit::ExteriorMoon,
        }
    }
}

#[derive(Args)]
struct CzArgs {
    #[command(flatten)]
    mass: MassArg,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, value_enum)]
    orbit: OrbitArg,
    /// Number of traversals; must be even
    #[arg(long, default_value_t = 2, value_parser = parse_cover)]
    cover: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct RotationArgs {
    #[command(flatten)]
    mass: MassArg,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// First integral of a regular torus
    #[arg(long, allow_hyphen_values = true, conflicts_with = "orbit", required_unless_present = "orbit")]
    g: Option<f64>,
    /// Critical orbit: int, extE, extM, dou, hyp or ell
    #[arg(long, value_parser = parse_kind)]
    orbit: Option<CriticalKind>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    mass: MassArg,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Energy range `min,max`
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    c_range: (f64, f64),
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Restrict to one region: Sprime, S, L or P
    #[arg(long, value_parser = parse_region)]
    region: Option<Region>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    Earth,
    Moon,
    Whole,
}

impl From<ComponentArg> for Component {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::Earth => Component::Earth,
            ComponentArg::Moon => Component::Moon,
            ComponentArg::Whole => Component::Whole,
        }
    }
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    mass: MassArg,
    #[arg(long, allow_hyphen_values = true)]
    g: f64,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, value_enum, default_value = "whole")]
    component: ComponentArg,
    /// Length of the run in regularized time
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct ContactArgs {
    #[command(flatten)]
    mass: MassArg,
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also check the angular minimum of dV/dr at this radius
    #[arg(long)]
    radius: Option<f64>,
}

fn parse_mu(s: &str) -> Result<f64, String> {
    let mu: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if mu > 0.0 && mu <= 0.5 {
        Ok(mu)
    } else {
        Err(format!("mu = {mu} must lie in (0, 0.5]"))
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `min,max`")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo <= hi) {
        return Err(format!("range {lo},{hi} is empty"));
    }
    Ok((lo, hi))
}

fn parse_cover(s: &str) -> Result<u32, String> {
    let k: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if k == 0 || !k.is_multiple_of(2) {
        return Err(format!("cover {k} is not a positive even number"));
    }
    Ok(k)
}

fn parse_kind(s: &str) -> Result<CriticalKind, String> {
    CriticalKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown orbit `{s}`"))
}

fn parse_region(s: &str) -> Result<Region, String> {
    Region::ALL
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| format!("unknown region `{s}`"))
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == hi || n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn periods_json(p: &PeriodPair) -> Value {
    json!({ "tau_xi": p.tau_xi, "tau_eta": p.tau_eta })
}

fn print_json(v: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, v)?;
    writeln!(out)
}

fn scan_row(p: &ProblemParams, g: f64, c: f64) -> String {
    let Ok(em) = EnergyMomentum::new(*p, g, c) else {
        return format!("{},{g},{c},nonnegative-energy,,,", p.mu);
    };
    let tag = classify(&em, DELTA_CURVE);
    let periods = match tag {
        RegionTag::Regular(_) | RegionTag::OnL4 => period_closed_form(&em, Component::Whole).ok(),
        _ => None,
    };
    let (rot, tx, te) = match periods {
        Some(pp) => {
            let r = pp.ratio().map(|r| r.to_string()).unwrap_or_default();
            (r, pp.tau_xi.to_string(), pp.tau_eta.to_string())
        }
        None => Default::default(),
    };
    format!("{},{g},{c},{},{rot},{tx},{te}", p.mu, tag.name())
}

fn cmd_scan(a: &ScanArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let gs = linspace(a.g_range.0, a.g_range.1, a.steps);
    let cs = linspace(a.c_range.0, a.c_range.1, a.steps);
    let rows: Vec<String> = gs
        .par_iter()
        .flat_map_iter(|&g| cs.iter().map(move |&c| (g, c)))
        .map(|(g, c)| scan_row(&p, g, c))
        .collect();
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "mu,g,c,region,rotation,tau_xi,tau_eta")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cz(a: &CzArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let orbit: CollisionOrbit = a.orbit.into();
    let kind = orbit.critical_kind();
    let result = cz(&p, a.c, a.cover, orbit)?;
    let mut v = json!({
        "schema": SCHEMA,
        "mu": p.mu,
        "c": a.c,
        "orbit": orbit.name(),
        "cover": a.cover,
        "rotation": critical_rotation(&p, a.c, kind)?,
        "periods": periods_json(&critical_orbit_periods(&p, a.c, kind)?),
    });
    match result {
        IndexResult::Nondegenerate { index } => v["index"] = json!(index),
        IndexResult::Degenerate { resonance } => {
            v["degenerate"] = json!(true);
            v["resonance"] = json!(resonance);
        }
    }
    print_json(&v)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let level = match a.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = run_all(level, a.seed);
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("[{status}] {:>2} {:<30} {:>8.3}s  {}", c.id, c.name, c.elapsed.as_secs_f64(), c.summary);
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if !failed.is_empty() {
        eprintln!("failed: {}", failed.join(", "));
    }
    print_json(&serde_json::to_value(&report).expect("report serializes"))?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_rotation(a: &RotationArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let v = match (a.g, a.orbit) {
        (_, Some(kind)) => json!({
            "schema": SCHEMA,
            "mu": p.mu,
            "c": a.c,
            "orbit": kind.name(),
            "g": kind.g_at(&p, a.c),
            "rotation": critical_rotation(&p, a.c, kind)?,
            "periods": periods_json(&critical_orbit_periods(&p, a.c, kind)?),
        }),
        (Some(g), None) => {
            let em = EnergyMomentum::new(p, g, a.c)?;
            json!({
                "schema": SCHEMA,
                "mu": p.mu,
                "c": a.c,
                "g": g,
                "region": classify(&em, DELTA_CURVE).name(),
                "rotation": rotation_number(&em)?,
                "periods": periods_json(&period_closed_form(&em, Component::Whole)?),
            })
        }
        (None, None) => unreachable!("clap requires --g or --orbit"),
    };
    print_json(&v)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_trace(a: &TraceArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let fam = trace_torus_family(&p, a.k, a.l, a.c_range.0, a.c_range.1, a.steps, a.region)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "c,g,region,residual")?;
    for s in &fam.samples {
        writeln!(out, "{},{},{},{:e}", s.c, s.g, s.region.name(), s.residual)?;
    }
    out.flush()?;
    for e in &fam.endpoints {
        eprintln!("endpoint {} at c = {}", e.kind.name(), e.c);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_integrate(a: &IntegrateArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let em = EnergyMomentum::new(p, a.g, a.c)?;
    let s0 = sample_state(&em, a.component.into())?;
    let tr = integrate(&p, a.c, &s0, a.tau, a.tol)?;
    let mut out = BufWriter::new(io::stdout().lock());
    tr.write_csv(&p, a.c, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_contact(a: &ContactArgs) -> CmdResult {
    let p = ProblemParams::new(a.mass.mu)?;
    let audit = transversality_audit(&p, a.c, a.samples, a.seed)?;
    let mut v = json!({
        "schema": SCHEMA,
        "mu": p.mu,
        "seed": a.seed,
        "transversality": audit,
    });
    if let Some(r) = a.radius {
        v["minimum"] = serde_json::to_value(minimum_at_zero_check(&p, r, 10_001)?).expect("report serializes");
    }
    print_json(&v)?;
    Ok(if audit.positive && audit.contained { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn configure_threads() {
    if let Some(n) = std::env::var("EULER2C_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let res = match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Cz(a) => cmd_cz(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Rotation(a) => cmd_rotation(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Integrate(a) => cmd_integrate(a),
        Command::ContactAudit(a) => cmd_contact(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
