//! The `helix-mse` command line. [`execute_command`] parses, runs and writes a run
//! manifest; it returns the process exit code (0 pass, 1 usage or configuration error,
//! 2 certificate failure, infeasibility or a height above the cap).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_forms::{BarrierSpec, CatenoidProfile};
use crate::drivers::{
    collar_supersolution_certificate, gradient_constrained_family, height_prescribed_solution, FamilyConfig, Problem,
    RungSpacing,
};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, GroupSpec, QuotientPoint};
use crate::io::{
    export_csv, export_obj, import_csv, lift_and_verify, random_ambient_samples, write_csv, write_obj, RunManifest,
};
use crate::io::Timing;
use crate::solver::{solve_dirichlet, GridSpec, Reduction, SolverConfig, Spacing, DETACHMENT_LIMIT};

pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "helix-mse", version, about = "Helicoidal minimal graphs: barriers, solves and certificates")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// TOML file with default values keyed by flag name; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where to write the run manifest (default: next to the main output, else stderr).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit geometry and the quotient metric at a point.
    Geometry(GeometryArgs),
    /// Barrier constants and a table of the collar profile.
    Barriers(BarrierArgs),
    /// One Dirichlet solve of the reduced equation.
    Solve(SolveArgs),
    /// Gradient-constrained exhaustion family.
    Family(FamilyArgs),
    /// Height-prescribed solution between barriers.
    Perron(PerronArgs),
    /// Supersolution certificate of the collar barrier.
    Certify(CertifyArgs),
    /// Lift the catenoid profile to R^(n+1) and verify it there.
    Lift(LiftArgs),
    /// Convert a field CSV to OBJ (or re-emit CSV).
    Export(ExportArgs),
}

#[derive(Args, Debug, Default)]
struct GroupArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Rotation axes and translation axis, 1-based (default 1, 2, n+1).
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Quotient point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Args, Debug)]
struct BarrierArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "R")]
    outer_radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    inner: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    outer: Option<f64>,
    /// `NSxNT`, or `NS` for the radial reduction.
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// `uniform`, `quadratic` or `geometric:K`.
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DriverArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// `origin-ball:R`, `ball:CX,CY,R` or `figure1`.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    reduction: Option<String>,
    /// Truncation radii, comma separated.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    /// Physical width of the first radial cell (geometric spacing).
    #[arg(long = "first-cell")]
    first_cell: Option<f64>,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the solution on the last rung.
    #[arg(long = "field-out")]
    field_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "bisection-tol")]
    bisection_tol: Option<f64>,
    #[command(flatten)]
    driver: DriverArgs,
}

#[derive(Args, Debug)]
struct PerronArgs {
    #[arg(long)]
    c: Option<f64>,
    #[command(flatten)]
    driver: DriverArgs,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Neck radius of the catenoid profile.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-residual")]
    max_residual: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<String>,
    /// `obj` or `csv`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flag values backed by an optional TOML table.
struct Settings {
    table: toml::Table,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let table = match path {
            Some(p) => fs::read_to_string(p)?
                .parse::<toml::Table>()
                .map_err(|e| Error::Parse(format!("config {}: {e}", p.display())))?,
            None => toml::Table::new(),
        };
        Ok(Self { table })
    }

    fn f64(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(x)) => Ok(Some(*x as f64)),
            Some(v) => Err(Error::Parse(format!("config key '{key}': expected a number, found {v}"))),
        }
    }

    fn usize(&self, key: &str, flag: Option<usize>) -> Result<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(x)) if *x >= 0 => Ok(Some(*x as usize)),
            Some(v) => Err(Error::Parse(format!("config key '{key}': expected a non-negative integer, found {v}"))),
        }
    }

    fn string(&self, key: &str, flag: Option<String>) -> Result<Option<String>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(toml::Value::Integer(x)) => Ok(Some(x.to_string())),
            Some(toml::Value::Float(x)) => Ok(Some(x.to_string())),
            Some(v) => Err(Error::Parse(format!("config key '{key}': expected a string, found {v}"))),
        }
    }

    fn path(&self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
        Ok(self.string(key, flag.map(|p| p.display().to_string()))?.map(PathBuf::from))
    }

    fn req_f64(&self, key: &str, flag: Option<f64>) -> Result<f64> {
        self.f64(key, flag)?.ok_or_else(|| missing(key))
    }

    fn req_usize(&self, key: &str, flag: Option<usize>) -> Result<usize> {
        self.usize(key, flag)?.ok_or_else(|| missing(key))
    }

    fn req_string(&self, key: &str, flag: Option<String>) -> Result<String> {
        self.string(key, flag)?.ok_or_else(|| missing(key))
    }

    fn group(&self, g: &GroupArgs) -> Result<GroupSpec> {
        let n = self.req_usize("n", g.n)?;
        let lambda = self.req_f64("lambda", g.lambda)?;
        let a = self.req_f64("a", g.a)?;
        let i = self.usize("i", g.i)?.unwrap_or(1);
        let j = self.usize("j", g.j)?.unwrap_or(2);
        let k = self.usize("k", g.k)?.unwrap_or(n + 1);
        GroupSpec::new(lambda, a, i, j, k, n)
    }
}

fn missing(key: &str) -> Error {
    Error::InvalidArgument(format!("missing required value --{key}"))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{x}' in '{s}': {e}"))))
        .collect()
}

fn parse_nodes(s: &str, reduction: Reduction) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("nodes '{s}': {e}")));
    match (parts.as_slice(), reduction) {
        ([ns], Reduction::Radial) => Ok((num(ns)?, 1)),
        ([ns, nt], _) => Ok((num(ns)?, num(nt)?)),
        _ => Err(Error::Parse(format!("nodes '{s}' must look like NSxNT"))),
    }
}

fn parse_spacing(s: &str) -> Result<Spacing> {
    match s.split_once(':') {
        None if s == "uniform" => Ok(Spacing::Uniform),
        None if s == "quadratic" => Ok(Spacing::Quadratic),
        Some(("geometric", k)) => {
            Ok(Spacing::Geometric(k.parse().map_err(|e| Error::Parse(format!("spacing '{s}': {e}")))?))
        }
        _ => Err(Error::Parse(format!("unknown spacing '{s}' (uniform, quadratic, geometric:K)"))),
    }
}

fn parse_domain(s: &str) -> Result<DomainSpec> {
    if s == "figure1" {
        return Ok(DomainSpec::figure1());
    }
    match s.split_once(':') {
        Some(("origin-ball", r)) => DomainSpec::origin_ball(parse_list(r)?[0]),
        Some(("ball", rest)) => match parse_list(rest)?.as_slice() {
            [cx, cy, r] => DomainSpec::exterior_ball([*cx, *cy], *r),
            _ => Err(Error::Parse(format!("domain '{s}' must be ball:CX,CY,R"))),
        },
        _ => Err(Error::Parse(format!("unknown domain '{s}' (origin-ball:R, ball:CX,CY,R, figure1)"))),
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    report_version: u32,
    report: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn write_json<T: Serialize>(path: Option<&Path>, kind: &str, body: &T, manifest: &mut RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(&Versioned { report_version: REPORT_VERSION, report: kind, body })
        .map_err(|e| Error::Parse(format!("report serialisation: {e}")))?;
    match path {
        Some(p) => {
            fs::write(p, text + "\n")?;
            manifest.add_artifact(p)?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Outcome of a subcommand: exit code plus the file the manifest should sit next to.
struct Outcome {
    code: i32,
    primary: Option<PathBuf>,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn execute_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let start = Instant::now();
    let mut manifest = RunManifest::new(argv.iter().map(|a| a.to_string_lossy().into_owned()).collect());
    let outcome = Settings::load(cli.config.as_deref()).and_then(|settings| {
        if let Some(p) = &cli.config {
            manifest.add_artifact(p)?;
        }
        run(&cli.command, &settings, &mut manifest)
    });
    let (code, primary) = match outcome {
        Ok(o) => (o.code, o.primary),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Infeasible { last_feasible: Some(t), .. } = &e {
                eprintln!("last feasible continuation fraction: {t}");
            }
            (error_code(&e), None)
        }
    };
    manifest.exit_code = code;
    manifest.timing = Some(Timing { wall_time_s: start.elapsed().as_secs_f64() });
    let target = cli.manifest.clone().or_else(|| primary.map(|p| manifest_path_for(&p)));
    let emitted = match &target {
        Some(p) => manifest.write(p),
        None => manifest.render().map(|text| eprint!("{text}")),
    };
    if let Err(e) = emitted {
        eprintln!("error: could not write manifest: {e}");
        return 1;
    }
    code
}

/// `field.csv` gets `field.csv.manifest.toml`.
pub fn manifest_path_for(primary: &Path) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.toml");
    PathBuf::from(name)
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } | Error::HeightAboveCap { .. } => 2,
        _ => 1,
    }
}

fn run(cmd: &Command, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    match cmd {
        Command::Geometry(a) => geometry(a, st, m),
        Command::Barriers(a) => barriers(a, st, m),
        Command::Solve(a) => solve(a, st, m),
        Command::Family(a) => family(a, st, m),
        Command::Perron(a) => perron(a, st, m),
        Command::Certify(a) => certify(a, st, m),
        Command::Lift(a) => lift(a, st, m),
        Command::Export(a) => export(a, st, m),
    }
}

#[derive(Serialize)]
struct GeometryReport {
    group: GroupSpec,
    sup_orbit_curvature: f64,
    sup_attained_at_sigma: Option<f64>,
    point: Option<PointReport>,
}

#[derive(Serialize)]
struct PointReport {
    q: Vec<f64>,
    sigma: f64,
    warp: f64,
    a_coefficient: f64,
    orbit_curvature: f64,
    metric: Vec<Vec<f64>>,
    drift: Vec<f64>,
}

fn geometry(args: &GeometryArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let gs = st.group(&args.group)?;
    m.group = Some(gs);
    let (sup, at) = gs.sup_orbit_curvature();
    let point = match st.string("point", args.point.clone())? {
        Some(s) => {
            let q = QuotientPoint(parse_list(&s)?);
            if q.0.len() != gs.n {
                return Err(Error::InvalidArgument(format!("point needs {} coordinates", gs.n)));
            }
            let sigma = gs.sigma(&q);
            let g = gs.quotient_metric(&q);
            Some(PointReport {
                sigma,
                warp: gs.warp(sigma),
                a_coefficient: gs.a_coefficient(sigma),
                orbit_curvature: gs.orbit_curvature(sigma),
                metric: (0..gs.n).map(|r| (0..gs.n).map(|c| g.tensor[(r, c)]).collect()).collect(),
                drift: gs.drift_field(&q).0,
                q: q.0,
            })
        }
        None => None,
    };
    let report = GeometryReport { group: gs, sup_orbit_curvature: sup, sup_attained_at_sigma: at, point };
    write_json(None, "geometry", &report, m)?;
    Ok(Outcome { code: 0, primary: None })
}

fn barriers(args: &BarrierArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let gs = st.group(&args.group)?;
    m.group = Some(gs);
    let r = st.req_f64("r", args.r)?;
    let bs = BarrierSpec::new(r, gs.n, gs.lambda, gs.a, st.f64("b", args.b)?)?;
    let rows = st.usize("rows", args.rows)?.unwrap_or(11).max(2);
    println!("C = {}", bs.c);
    println!("varsigma = {}", bs.varsigma);
    println!("b = {}", bs.b);
    println!("t0 = {}", bs.t0);
    println!("L = {}", bs.l);
    println!("d,psi,dpsi");
    for row in 0..rows {
        let d = bs.t0 * row as f64 / (rows - 1) as f64;
        let slope = bs.psi_prime(d);
        let dpsi = if slope.saturated { "inf".to_string() } else { crate::io::format_g17(slope.value) };
        println!("{},{},{}", crate::io::format_g17(d), crate::io::format_g17(bs.psi(d)), dpsi);
    }
    Ok(Outcome { code: 0, primary: None })
}

#[derive(Serialize)]
struct SolveSummary {
    converged: bool,
    inner_detachment: f64,
    residual_norm: f64,
    tolerance: f64,
    newton_iterations: usize,
    continuation_steps: usize,
    sup_gradient: f64,
    sup_gradient_saturated: bool,
    sup_gradient_at: [f64; 2],
    min: f64,
    max: f64,
}

fn solve(args: &SolveArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let gs = st.group(&args.group)?;
    m.group = Some(gs);
    let reduction: Reduction = st.req_string("reduction", args.reduction.clone())?.parse()?;
    let rho = st.req_f64("rho", args.rho)?;
    let outer_radius = st.req_f64("R", args.outer_radius)?;
    let inner = st.req_f64("inner", args.inner)?;
    let outer = st.req_f64("outer", args.outer)?;
    let nodes = parse_nodes(&st.req_string("nodes", args.nodes.clone())?, reduction)?;
    let spacing = parse_spacing(&st.string("spacing", args.spacing.clone())?.unwrap_or("quadratic".into()))?;
    let center = match st.string("center", args.center.clone())? {
        Some(c) => match parse_list(&c)?.as_slice() {
            [x, y] => [*x, *y],
            _ => return Err(Error::Parse(format!("center '{c}' must be X,Y"))),
        },
        None => [0.0; 2],
    };
    let spec = match reduction {
        Reduction::Radial => GridSpec::radial(gs, rho, outer_radius, nodes.0, spacing),
        Reduction::Axisym => GridSpec::axisym(gs, rho, outer_radius, nodes, spacing),
        Reduction::Polar2d => GridSpec::polar2d(gs, center, rho, outer_radius, nodes, spacing),
    };
    m.domain = Some(format!("{reduction} exterior of ball centre {center:?} radius {rho}, truncated at {outer_radius}"));
    m.grids.push(format!("{}x{} {:?}", nodes.0, nodes.1, spacing));
    let cfg = SolverConfig::default();
    m.tolerances.insert("abs_tol".into(), cfg.abs_tol);
    m.tolerances.insert("rel_tol".into(), cfg.rel_tol);
    let grid = spec.build()?;
    let rep = solve_dirichlet(&grid, inner, outer, &cfg, None)?;
    if rep.inner_detachment > DETACHMENT_LIMIT {
        return Err(Error::Infeasible {
            reason: format!(
                "the discrete solution detaches from the inner data (first-cell ratio {:.3} > {DETACHMENT_LIMIT}); \
                 outer data {outer} is out of reach from inner data {inner}",
                rep.inner_detachment
            ),
            last_feasible: None,
        });
    }
    let out = st.path("out", args.out.clone())?;
    match &out {
        Some(p) => {
            export_csv(&rep.field, p)?;
            m.add_artifact(p)?;
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&crate::io::field_rows(&rep.field), &mut buf)?;
            print!("{}", String::from_utf8_lossy(&buf));
        }
    }
    if let Some(p) = st.path("obj", args.obj.clone())? {
        export_obj(&rep.field, &p)?;
        m.add_artifact(&p)?;
    }
    let summary = SolveSummary {
        converged: rep.converged,
        inner_detachment: rep.inner_detachment,
        residual_norm: rep.residual_norm,
        tolerance: rep.tolerance,
        newton_iterations: rep.newton_iterations,
        continuation_steps: rep.continuation_steps,
        sup_gradient: rep.sup_gradient.value,
        sup_gradient_saturated: rep.sup_gradient.saturated,
        sup_gradient_at: rep.sup_gradient.location,
        min: rep.field.min(),
        max: rep.field.max(),
    };
    if out.is_some() {
        write_json(None, "solve", &summary, m)?;
    } else {
        let text = serde_json::to_string(&summary).map_err(|e| Error::Parse(e.to_string()))?;
        eprintln!("{text}");
    }
    Ok(Outcome { code: if rep.converged { 0 } else { 2 }, primary: out })
}

fn driver_problem(d: &DriverArgs, st: &Settings, m: &mut RunManifest) -> Result<(Problem, Vec<f64>)> {
    let group = st.group(&d.group)?;
    let domain_text = st.req_string("domain", d.domain.clone())?;
    let domain = parse_domain(&domain_text)?;
    let reduction: Reduction = match st.string("reduction", d.reduction.clone())? {
        Some(r) => r.parse()?,
        None if domain.as_ball().is_some_and(|(c, _)| c == [0.0; 2]) => Reduction::Radial,
        None => Reduction::Polar2d,
    };
    let nodes = parse_nodes(&st.req_string("nodes", d.nodes.clone())?, reduction)?;
    let spacing = match (st.f64("first-cell", d.first_cell)?, st.string("spacing", d.spacing.clone())?) {
        (Some(w), _) => RungSpacing::FirstCell(w),
        (None, Some(s)) => RungSpacing::Fixed(parse_spacing(&s)?),
        (None, None) => RungSpacing::Fixed(Spacing::Quadratic),
    };
    let ladder = parse_list(&st.req_string("ladder", d.ladder.clone())?)?;
    m.group = Some(group);
    m.domain = Some(domain_text);
    m.grids.push(format!("{}x{} {:?} on radii {:?}", nodes.0, nodes.1, spacing, ladder));
    Ok((Problem { group, domain, reduction, nodes, spacing }, ladder))
}

fn write_field(path: Option<PathBuf>, field: Option<&crate::solver::GridField>, m: &mut RunManifest) -> Result<()> {
    if let (Some(p), Some(f)) = (path, field) {
        export_csv(f, &p)?;
        m.add_artifact(&p)?;
    }
    Ok(())
}

fn family(args: &FamilyArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let (problem, ladder) = driver_problem(&args.driver, st, m)?;
    let s = st.req_f64("s", args.s)?;
    let mut cfg = FamilyConfig::default();
    if let Some(tol) = st.f64("bisection-tol", args.bisection_tol)? {
        cfg.bisection_tol = tol;
    }
    m.tolerances.insert("abs_tol".into(), cfg.solver.abs_tol);
    m.tolerances.insert("rel_tol".into(), cfg.solver.rel_tol);
    m.tolerances.insert("bisection_tol".into(), cfg.bisection_tol);
    let report = gradient_constrained_family(s, &problem, &ladder, &cfg)?;
    let out = st.path("out", args.driver.out.clone())?;
    write_json(out.as_deref(), "family", &report, m)?;
    write_field(
        st.path("field-out", args.driver.field_out.clone())?,
        report.solutions.last().map(|r| &r.field),
        m,
    )?;
    let converged = report.solutions.iter().all(|r| r.converged);
    Ok(Outcome { code: if converged { 0 } else { 2 }, primary: out })
}

fn perron(args: &PerronArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let (problem, ladder) = driver_problem(&args.driver, st, m)?;
    let c = st.req_f64("c", args.c)?;
    let cfg = SolverConfig::default();
    m.tolerances.insert("abs_tol".into(), cfg.abs_tol);
    m.tolerances.insert("rel_tol".into(), cfg.rel_tol);
    let report = height_prescribed_solution(c, &problem, &ladder, &cfg)?;
    let out = st.path("out", args.driver.out.clone())?;
    write_json(out.as_deref(), "perron", &report, m)?;
    write_field(
        st.path("field-out", args.driver.field_out.clone())?,
        report.solutions.last().map(|r| &r.field),
        m,
    )?;
    Ok(Outcome { code: if report.all_pass() { 0 } else { 2 }, primary: out })
}

fn certify(args: &CertifyArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let gs = st.group(&args.group)?;
    m.group = Some(gs);
    let r = st.req_f64("r", args.r)?;
    let bs = BarrierSpec::new(r, gs.n, gs.lambda, gs.a, st.f64("b", args.b)?)?;
    let reduction: Reduction = st.string("reduction", args.reduction.clone())?.unwrap_or("radial".into()).parse()?;
    let default_nodes = if reduction == Reduction::Radial { "400" } else { "64x16" };
    let nodes = parse_nodes(&st.string("nodes", args.nodes.clone())?.unwrap_or(default_nodes.into()), reduction)?;
    m.grids.push(format!("{}x{} quadratic collar", nodes.0, nodes.1));
    let cert = collar_supersolution_certificate(&gs, &bs, reduction, nodes)?;
    m.tolerances.insert("certificate_tolerance".into(), cert.tolerance);
    let out = st.path("out", args.out.clone())?;
    write_json(out.as_deref(), "certificate", &cert, m)?;
    Ok(Outcome { code: if cert.pass { 0 } else { 2 }, primary: out })
}

fn lift(args: &LiftArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let gs = st.group(&args.group)?;
    m.group = Some(gs);
    let rho = st.req_f64("rho", args.rho)?;
    let count = st.usize("samples", args.samples)?.unwrap_or(100);
    let seed = st.usize("seed", args.seed.map(|s| s as usize))?.unwrap_or(0) as u64;
    let limit = st.f64("max-residual", args.max_residual)?.unwrap_or(1e-4);
    m.tolerances.insert("max_residual".into(), limit);
    let profile = CatenoidProfile::new(gs.n, rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = random_ambient_samples(&gs, &mut rng, count, (1.5 * rho, 5.0 * rho), 5.0);
    let report = lift_and_verify(&gs, &profile, &samples, &mut rng)?;
    let out = st.path("out", args.out.clone())?;
    write_json(out.as_deref(), "lift", &report, m)?;
    let pass = report.max_mse_residual <= limit && report.max_gradient_error <= 1e-6 && report.max_invariance_error <= 1e-10;
    Ok(Outcome { code: if pass { 0 } else { 2 }, primary: out })
}

fn export(args: &ExportArgs, st: &Settings, m: &mut RunManifest) -> Result<Outcome> {
    let input = st.path("in", args.input.clone())?.ok_or_else(|| missing("in"))?;
    let out = st.path("out", args.out.clone())?.ok_or_else(|| missing("out"))?;
    let format = st.string("format", args.format.clone())?.unwrap_or("obj".into());
    m.add_artifact(&input)?;
    let rows = import_csv(&input)?;
    let mut buf = Vec::new();
    match format.as_str() {
        "obj" => {
            let nodes = parse_nodes(&st.req_string("nodes", args.nodes.clone())?, Reduction::Polar2d)?;
            write_obj(&rows, nodes.0, nodes.1, &mut buf)?;
        }
        "csv" => write_csv(&rows, &mut buf)?,
        other => return Err(Error::InvalidArgument(format!("unknown format '{other}' (obj, csv)"))),
    }
    fs::write(&out, buf)?;
    m.add_artifact(&out)?;
    Ok(Outcome { code: 0, primary: Some(out) })
}
