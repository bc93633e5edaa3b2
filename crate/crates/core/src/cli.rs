//! Command-line front end: Itô tables, analytic fields, simulation,
//! perturbative solvers and MC-versus-analytic comparison.
//!
//! Exit codes: 0 success, 1 comparison failure, 2 usage or configuration
//! error, 3 runtime model error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::erf::erfc;

use crate::algebra::{table_for, AlgebraError};
use crate::grid::{FieldGrid, Torus};
use crate::models::{self, GfQuery, ModelError};
use crate::perturb::{self, MomentumGrid, PerturbError};
use crate::simulate::{self, SimConfig, SimError};
use crate::spec::{FieldSpec, ModelSpec, SpecError};

#[derive(Parser, Debug)]
#[command(name = "rdito", version, about = "Itô calculus toolkit for reaction-diffusion systems")]
pub struct Cli {
    /// RNG seed (overrides the simulation file)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (falls back to RD_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output path; multi-file commands treat it as a prefix
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Derive the Itô product table of the named noise families
    DeriveTable {
        #[arg(required = true)]
        families: Vec<String>,
        #[arg(long)]
        allow_unrecognized: bool,
    },
    /// Analytic density fields on the model grid
    Density {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// Report grid-cell averages (comparable with MC histograms)
        #[arg(long)]
        cell_average: bool,
    },
    /// Log generating functional for a test function u
    Gf {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// Test function as a field JSON; defaults to u ≡ 1
        #[arg(long)]
        u: Option<PathBuf>,
        /// Species-B test function for two-species models
        #[arg(long)]
        u_b: Option<PathBuf>,
    },
    /// Janossy density of finding exactly the given particles
    Fn {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// A particle position, coordinates separated by ':'
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Particle Monte Carlo estimates at time t
    Simulate {
        model: PathBuf,
        sim: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Tree-level solvers and the third-order diagram for annihilation
    Perturb {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Dyson)]
        method: Method,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Write every n-th time step
        #[arg(long, default_value_t = 1)]
        every: usize,
        /// Integer frequency vector for the third-order term, e.g. 0 or 1:0
        #[arg(long, default_value = "0")]
        k: String,
    },
    /// Per-point z-scores of an MC field against an analytic one
    Compare {
        analytic: PathBuf,
        mc: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dyson,
    Pde,
    ThirdOrder,
}

/// Provenance record written next to every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::UnknownFamily(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Spec(_) | ModelError::GridMismatch | ModelError::WrongKind { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::StepTooLarge { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<PerturbError> for Failure {
    fn from(e: PerturbError) -> Self {
        match e {
            PerturbError::Spec(_) | PerturbError::WrongKind(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let shown: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, shown) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

struct Session {
    start: Instant,
    args: Vec<String>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl Session {
    fn read(&mut self, path: &Path) -> Outcome<String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), digest(text.as_bytes()));
        Ok(text)
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Outcome<()> {
        write_atomic(path, bytes).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.insert(path.display().to_string(), digest(bytes));
        Ok(())
    }

    fn manifest(self, command: &str, config: serde_json::Value, seed: Option<u64>, path: &Path) -> Outcome<()> {
        let m = RunManifest {
            command: command.to_string(),
            args: self.args,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serialises");
        write_atomic(path, text.as_bytes()).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Outcome<T> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn kind_name(spec: &ModelSpec) -> String {
    serde_json::to_value(spec.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn fmt_row(out: &mut String, coords: &[f64], values: &[f64]) {
    let cells: Vec<String> = coords.iter().chain(values).map(|v| v.to_string()).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn coord_names(d: usize) -> Vec<String> {
    (0..d).map(|a| format!("x{a}")).collect()
}

/// One CSV block: `# model,<kind>,t,<t>`, a column line, then rows.
fn field_block(out: &mut String, kind: &str, t: f64, torus: &Torus, fields: &[(String, FieldGrid)]) {
    let _ = writeln!(out, "# model,{kind},t,{t}");
    let mut cols = coord_names(torus.dim());
    cols.extend(fields.iter().map(|f| f.0.clone()));
    let _ = writeln!(out, "# {}", cols.join(","));
    for i in 0..torus.len() {
        let vals: Vec<f64> = fields.iter().map(|f| f.1.values[i].re).collect();
        fmt_row(out, &torus.position(i), &vals);
    }
}

fn emit(session: &mut Session, out: &Option<PathBuf>, text: &str) -> Outcome<bool> {
    match out {
        Some(p) => {
            session.write(p, text.as_bytes())?;
            Ok(true)
        }
        None => {
            print!("{text}");
            Ok(false)
        }
    }
}

fn load_model(session: &mut Session, path: &Path) -> Outcome<(ModelSpec, Torus)> {
    let text = session.read(path)?;
    let spec: ModelSpec = parse_json(&text, path)?;
    let torus = spec.validate()?;
    Ok((spec, torus))
}

fn execute(cli: &Cli, args: Vec<String>) -> Outcome<i32> {
    let mut s = Session { start: Instant::now(), args, inputs: BTreeMap::new(), outputs: BTreeMap::new() };
    match &cli.command {
        Command::DeriveTable { families, allow_unrecognized } => {
            let names: Vec<&str> = families.iter().map(String::as_str).collect();
            let table = table_for(&names)?;
            let text = table.to_text();
            if let Some(prefix) = &cli.out {
                s.write(&with_suffix(prefix, ".txt"), text.as_bytes())?;
                s.write(&with_suffix(prefix, ".json"), table.to_json().as_bytes())?;
                s.manifest("derive-table", serde_json::json!({ "families": families }), None, &with_suffix(prefix, ".manifest.json"))?;
            } else {
                print!("{text}");
            }
            if !table.all_recognized() && !allow_unrecognized {
                return Err(Failure::Runtime("some products are outside the listed families".into()));
            }
            Ok(0)
        }
        Command::Density { model, t, cell_average } => {
            let (spec, torus) = load_model(&mut s, model)?;
            let kind = kind_name(&spec);
            let mut text = String::new();
            for &time in t {
                let mut fields = models::density_fields(&spec, time)?;
                if *cell_average {
                    for f in &mut fields {
                        f.1 = f.1.cell_average().map_err(|e| Failure::Runtime(e.to_string()))?;
                    }
                }
                field_block(&mut text, &kind, time, &torus, &fields);
            }
            if emit(&mut s, &cli.out, &text)? {
                let cfg = serde_json::json!({ "model": spec, "t": t, "cell_average": cell_average });
                s.manifest("density", cfg, None, &with_suffix(cli.out.as_ref().unwrap(), ".manifest.json"))?;
            }
            Ok(0)
        }
        Command::Gf { model, t, u, u_b } => {
            let (spec, torus) = load_model(&mut s, model)?;
            let mut field = |p: &Option<PathBuf>| -> Outcome<Option<FieldSpec>> {
                match p {
                    Some(p) => {
                        let text = s.read(p)?;
                        Ok(Some(parse_json(&text, p)?))
                    }
                    None => Ok(None),
                }
            };
            let u_spec = field(u)?.unwrap_or(FieldSpec::Const(1.0));
            let ub_spec = field(u_b)?;
            let mut text = format!("# model,{},gf\n# t,log_gf\n", kind_name(&spec));
            for &time in t {
                let mut q = GfQuery::new(u_spec.sample(&torus, 0.0), time);
                q.u_b = ub_spec.as_ref().map(|f| f.sample(&torus, 0.0));
                fmt_row(&mut text, &[time], &[models::log_gf(&spec, &q)?]);
            }
            if emit(&mut s, &cli.out, &text)? {
                let cfg = serde_json::json!({ "model": spec, "t": t, "u": u_spec, "u_b": ub_spec });
                s.manifest("gf", cfg, None, &with_suffix(cli.out.as_ref().unwrap(), ".manifest.json"))?;
            }
            Ok(0)
        }
        Command::Fn { model, t, points } => {
            let (spec, torus) = load_model(&mut s, model)?;
            let pts: Vec<Vec<f64>> = points
                .iter()
                .map(|p| {
                    let c: Vec<f64> = p.split(':').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(
                        |e| Failure::Usage(format!("bad point `{p}`: {e}")),
                    )?;
                    if c.len() != torus.dim() {
                        return Err(Failure::Usage(format!("point `{p}` needs {} coordinates", torus.dim())));
                    }
                    Ok(c)
                })
                .collect::<Outcome<_>>()?;
            let mut text = format!("# model,{},fn,{}\n# t,value\n", kind_name(&spec), pts.len());
            for &time in t {
                fmt_row(&mut text, &[time], &[models::death_diffusion_fn(&spec, &pts, time)?]);
            }
            if emit(&mut s, &cli.out, &text)? {
                let cfg = serde_json::json!({ "model": spec, "t": t, "points": pts });
                s.manifest("fn", cfg, None, &with_suffix(cli.out.as_ref().unwrap(), ".manifest.json"))?;
            }
            Ok(0)
        }
        Command::Simulate { model, sim, t } => {
            let (spec, torus) = load_model(&mut s, model)?;
            let text = s.read(sim)?;
            let mut cfg: SimConfig = parse_json(&text, sim)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if cli.threads.is_some() {
                cfg.threads = cli.threads;
            }
            let report = simulate::run(&spec, &cfg, *t)?;
            let hist = Torus::new(cfg.histogram.clone().unwrap_or_else(|| torus.shape.clone()), torus.lengths.clone())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let names: Vec<String> = if report.density.len() == 2 {
                vec!["X_a".into(), "X_b".into()]
            } else {
                vec!["X".into()]
            };
            let mut csv = format!("# model,{},t,{t},replicas,{}\n", kind_name(&spec), report.replicas);
            let mut cols = coord_names(hist.dim());
            for n in &names {
                cols.push(n.clone());
                cols.push(format!("se_{n}"));
            }
            let _ = writeln!(csv, "# {}", cols.join(","));
            for i in 0..hist.len() {
                let vals: Vec<f64> = report
                    .density
                    .iter()
                    .zip(&report.density_se)
                    .flat_map(|(m, e)| [m.values[i].re, e.values[i].re])
                    .collect();
                fmt_row(&mut csv, &hist.position(i), &vals);
            }
            let summary = serde_json::to_string_pretty(&report.scalars()).expect("summary serialises");
            match &cli.out {
                Some(prefix) => {
                    s.write(&with_suffix(prefix, ".density.csv"), csv.as_bytes())?;
                    s.write(&with_suffix(prefix, ".report.json"), summary.as_bytes())?;
                    let config = serde_json::json!({ "model": spec, "sim": cfg, "t": t });
                    s.manifest("simulate", config, Some(cfg.seed), &with_suffix(prefix, ".manifest.json"))?;
                }
                None => {
                    print!("{csv}");
                    eprintln!("{summary}");
                }
            }
            Ok(0)
        }
        Command::Perturb { model, method, t, steps, every, k } => {
            let (spec, torus) = load_model(&mut s, model)?;
            let mut text = String::new();
            match method {
                Method::ThirdOrder => {
                    let kv: Vec<i64> = k
                        .split(':')
                        .map(|x| x.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| Failure::Usage(format!("bad frequency `{k}`: {e}")))?;
                    if kv.len() != torus.dim() {
                        return Err(Failure::Usage(format!("frequency needs {} components", torus.dim())));
                    }
                    let grid = MomentumGrid::from_spec(&spec)?;
                    let v = perturb::third_order_term(&grid, &kv, *t)?;
                    let _ = writeln!(text, "# model,{},third_order,t,{t}\n# re,im", kind_name(&spec));
                    fmt_row(&mut text, &[], &[v.re, v.im]);
                }
                Method::Dyson | Method::Pde => {
                    let series = if *method == Method::Dyson {
                        perturb::dyson_tree_density(&MomentumGrid::from_spec(&spec)?, *t, *steps)?
                    } else {
                        perturb::mean_field_pde(&spec, *t, *steps)?
                    };
                    let mut cols = vec!["t".to_string()];
                    cols.extend(coord_names(torus.dim()));
                    cols.push("X".into());
                    let _ = writeln!(text, "# model,{},{:?},t,{t}\n# {}", kind_name(&spec), method, cols.join(","));
                    for (j, (time, f)) in series.times.iter().zip(&series.fields).enumerate() {
                        if j % every.max(&1) != 0 && j + 1 != series.times.len() {
                            continue;
                        }
                        let pos = match f.representation {
                            crate::grid::Representation::Position => f.clone(),
                            crate::grid::Representation::Momentum => {
                                f.to_position().map_err(|e| Failure::Runtime(e.to_string()))?
                            }
                        };
                        for i in 0..torus.len() {
                            let mut row = vec![*time];
                            row.extend(torus.position(i));
                            fmt_row(&mut text, &row, &[pos.values[i].re]);
                        }
                    }
                }
            }
            if emit(&mut s, &cli.out, &text)? {
                let cfg = serde_json::json!({ "model": spec, "method": format!("{method:?}"), "t": t, "steps": steps, "k": k });
                s.manifest("perturb", cfg, None, &with_suffix(cli.out.as_ref().unwrap(), ".manifest.json"))?;
            }
            Ok(0)
        }
        Command::Compare { analytic, mc, sigma } => {
            let a = Table::parse(&s.read(analytic)?, analytic)?;
            let m = Table::parse(&s.read(mc)?, mc)?;
            let summary = compare(&a, &m, *sigma)?;
            let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
            match &cli.out {
                Some(p) => {
                    s.write(p, text.as_bytes())?;
                    let cfg = serde_json::json!({ "sigma": sigma });
                    s.manifest("compare", cfg, None, &with_suffix(p, ".manifest.json"))?;
                }
                None => println!("{text}"),
            }
            if summary.passed {
                Ok(0)
            } else {
                Err(Failure::Mismatch(format!(
                    "{} of {} points beyond {sigma}σ (allowed {})",
                    summary.exceed, summary.points, summary.allowed
                )))
            }
        }
    }
}

/// A parsed field CSV: the last `# name,...` comment line names the columns.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn parse(text: &str, path: &Path) -> Outcome<Table> {
        let mut columns = Vec::new();
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                let names: Vec<String> = c.trim().split(',').map(|x| x.trim().to_string()).collect();
                if !names.first().is_some_and(|x| x == "model") {
                    columns = names;
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
            if row.len() != columns.len() {
                return Err(Failure::Usage(format!("{}:{}: expected {} columns", path.display(), n + 1, columns.len())));
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Outcome of an MC-versus-analytic comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub points: usize,
    pub sigma: f64,
    pub exceed: usize,
    pub fraction: f64,
    /// Largest exceedance count within the binomial 99% bound.
    pub allowed: u64,
    pub max_abs_z: f64,
    pub passed: bool,
}

fn compare(a: &Table, m: &Table, sigma: f64) -> Outcome<CompareSummary> {
    if a.rows.len() != m.rows.len() {
        return Err(Failure::Usage(format!("row counts differ: {} vs {}", a.rows.len(), m.rows.len())));
    }
    let coords: Vec<usize> = (0..a.columns.len()).filter(|i| a.columns[*i].starts_with('x')).collect();
    let values: Vec<&String> = a.columns.iter().filter(|c| !c.starts_with('x') && !c.starts_with("se_")).collect();
    let mut pairs = Vec::new();
    for name in &values {
        let ai = a.col(name).expect("column exists");
        let mi = m.col(name).ok_or_else(|| Failure::Usage(format!("MC file lacks column {name}")))?;
        let si = m.col(&format!("se_{name}")).ok_or_else(|| Failure::Usage(format!("MC file lacks column se_{name}")))?;
        pairs.push((ai, mi, si));
    }
    let mut zs = Vec::new();
    for (ra, rm) in a.rows.iter().zip(&m.rows) {
        for &c in &coords {
            let mc = m.col(&a.columns[c]).ok_or_else(|| Failure::Usage("coordinate columns differ".into()))?;
            if (ra[c] - rm[mc]).abs() > 1e-9 * ra[c].abs().max(1.0) {
                return Err(Failure::Usage("files are on different grids".into()));
            }
        }
        for &(ai, mi, si) in &pairs {
            let diff = rm[mi] - ra[ai];
            let z = if rm[si] > 0.0 {
                diff / rm[si]
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            zs.push(z);
        }
    }
    let n = zs.len();
    let exceed = zs.iter().filter(|z| z.abs() > sigma).count();
    let p = erfc(sigma / std::f64::consts::SQRT_2);
    let allowed = binomial_quantile(n as u64, p, 0.99);
    Ok(CompareSummary {
        points: n,
        sigma,
        exceed,
        fraction: if n == 0 { 0.0 } else { exceed as f64 / n as f64 },
        allowed,
        max_abs_z: zs.iter().map(|z| z.abs()).fold(0.0, f64::max),
        passed: exceed as u64 <= allowed,
    })
}

/// Smallest `k` with `P(Bin(n, p) ≤ k) ≥ q`.
fn binomial_quantile(n: u64, p: f64, q: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    let b = Binomial::new(p.clamp(0.0, 1.0), n).expect("valid binomial");
    (0..=n).find(|k| b.cdf(*k) >= q).unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_bound_is_a_quantile() {
        // P(Bin(100, 0.0027) ≤ 2) ≈ 0.9971 and P(≤ 1) ≈ 0.969
        assert_eq!(binomial_quantile(100, erfc(3.0 / std::f64::consts::SQRT_2), 0.99), 2);
        assert_eq!(binomial_quantile(0, 0.5, 0.99), 0);
    }
}
