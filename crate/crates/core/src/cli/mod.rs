//! Command-line driver: `projlab <command> [--config FILE] [flags]`.

mod config;
mod plot;

pub use config::{load_config, parse_config, ExperimentConfig, COMMON_KEYS, DEFAULT_SEED};
pub use plot::{emit_plot_script, PlotKind};

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::acceptance;
use crate::carleman::uniformity_sweep;
use crate::error::{Error, Result};
use crate::exponents::{classify_region, gamma_exponent, triangle_grid, ExponentPoint};
use crate::normlab::{best_family, fit_exponent, power_method_detailed, PowerOptions};
use crate::oscphase::{oscillatory_bank, t_lambda_eps_ratio, EPS0};
use crate::projection::Projector;
use crate::sphere::{GridFunction, SphereGrid};
use crate::stereo::{bank_pairs, extension_pairing, fit_limit_constant, i_n_integral};
use crate::witnesses::{make_witness, WitnessFamily, WitnessSpec, DEFAULT_C};
use crate::zonal::{frenzen_wong_main, zonal_constant, zonal_eval};

#[derive(Parser, Debug)]
#[command(name = "projlab", version, about = "Spherical harmonic projection laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Flat key = value file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    pub plot: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zonal kernel against its leading Bessel approximation.
    Kernel {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Apply H_n to a grid function CSV.
    Project {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        res: Option<String>,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        output: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Region and exponent over the (1/p, 1/q) triangle.
    Regions {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a witness on a sphere grid.
    Witness {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        res: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// p→q ratios of H_n over a list of degrees.
    NormScan {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        pt: Option<String>,
        #[arg(long = "n-list")]
        n_list: Option<String>,
        #[arg(long)]
        families: Option<String>,
        /// `witness` or `power`.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the growth exponent of a norm-scan CSV.
    ExponentFit {
        #[arg(long = "in")]
        input: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Weighted inequality ratio over a sweep of τ.
    Carleman {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// `a:b:k`, k equispaced values of τ.
        #[arg(long = "tau-sweep", allow_hyphen_values = true)]
        tau_sweep: Option<String>,
        #[arg(long = "dist-floor")]
        dist_floor: Option<String>,
        #[arg(long)]
        step: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Deviation of the blown-up pairing from its extension-operator limit.
    Limit {
        #[arg(long)]
        d: Option<String>,
        #[arg(long = "n-list")]
        n_list: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Decay of the oscillatory operator in λ.
    Oscdecay {
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long = "lambda-list")]
        lambda_list: Option<String>,
        #[arg(long)]
        pt: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        /// Comma-separated criterion numbers; all when absent.
        #[arg(long)]
        criteria: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

type Flags = Vec<(&'static str, Option<String>)>;

fn with_common(mut flags: Flags, common: &Common) -> Flags {
    flags.push(("out", common.out.clone()));
    flags.push(("seed", common.seed.clone()));
    flags.push(("plot", common.plot.then(|| "true".to_string())));
    flags
}

impl Command {
    fn parts(&self) -> (&'static str, Flags, &Common) {
        match self {
            Command::Kernel { d, n, samples, common } => {
                ("kernel", vec![("d", d.clone()), ("n", n.clone()), ("samples", samples.clone())], common)
            }
            Command::Project { d, n, res, input, output, common } => (
                "project",
                vec![("d", d.clone()), ("n", n.clone()), ("res", res.clone()), ("input", input.clone()), ("output", output.clone())],
                common,
            ),
            Command::Regions { d, grid, common } => ("regions", vec![("d", d.clone()), ("grid", grid.clone())], common),
            Command::Witness { family, d, n, res, c, common } => (
                "witness",
                vec![("family", family.clone()), ("d", d.clone()), ("n", n.clone()), ("res", res.clone()), ("c", c.clone())],
                common,
            ),
            Command::NormScan { d, pt, n_list, families, method, common } => (
                "norm-scan",
                vec![
                    ("d", d.clone()),
                    ("pt", pt.clone()),
                    ("n-list", n_list.clone()),
                    ("families", families.clone()),
                    ("method", method.clone()),
                ],
                common,
            ),
            Command::ExponentFit { input, common } => ("exponent-fit", vec![("in", input.clone())], common),
            Command::Carleman { d, p, q, tau_sweep, dist_floor, step, common } => (
                "carleman",
                vec![
                    ("d", d.clone()),
                    ("p", p.clone()),
                    ("q", q.clone()),
                    ("tau-sweep", tau_sweep.clone()),
                    ("dist-floor", dist_floor.clone()),
                    ("step", step.clone()),
                ],
                common,
            ),
            Command::Limit { d, n_list, common } => ("limit", vec![("d", d.clone()), ("n-list", n_list.clone())], common),
            Command::Oscdecay { d, eps, lambda_list, pt, common } => (
                "oscdecay",
                vec![("d", d.clone()), ("eps", eps.clone()), ("lambda-list", lambda_list.clone()), ("pt", pt.clone())],
                common,
            ),
            Command::Verify { suite, criteria, common } => {
                ("verify", vec![("suite", suite.clone()), ("criteria", criteria.clone())], common)
            }
        }
    }

    /// Merges the config file (if any) with the flags.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let (name, flags, common) = self.parts();
        let allowed: Vec<&str> = flags.iter().map(|(k, _)| *k).collect();
        let file = match &common.config {
            Some(path) => load_config(path)?,
            None => BTreeMap::new(),
        };
        ExperimentConfig::assemble(name, &allowed, file, with_common(flags, common))
    }
}

struct Output {
    writer: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
}

impl Output {
    fn open(path: Option<PathBuf>) -> Result<Self> {
        let sink: Box<dyn Write> = match &path {
            Some(p) => Box::new(std::fs::File::create(p)?),
            None => Box::new(std::io::stdout()),
        };
        Ok(Self { writer: csv::Writer::from_writer(sink), path })
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        self.writer.write_record(fields).map_err(csv_error)
    }

    fn finish(mut self, cfg: &ExperimentConfig, kind: Option<PlotKind>) -> Result<()> {
        self.writer.flush()?;
        drop(self.writer);
        if cfg.flag("plot")? {
            let kind = kind.ok_or_else(|| Error::Config(format!("no plot available for {}", cfg.command)))?;
            let path = self.path.ok_or_else(|| Error::Config("--plot needs --out".into()))?;
            emit_plot_script(&path, kind)?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

const PLOTTED: [&str; 4] = ["regions", "norm-scan", "limit", "oscdecay"];

/// Executes a configured command.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.flag("plot")? && !PLOTTED.contains(&cfg.command.as_str()) {
        return Err(Error::Config(format!("no plot available for {}", cfg.command)));
    }
    match cfg.command.as_str() {
        "kernel" => run_kernel(cfg),
        "project" => run_project(cfg),
        "regions" => run_regions(cfg),
        "witness" => run_witness(cfg),
        "norm-scan" => run_norm_scan(cfg),
        "exponent-fit" => run_exponent_fit(cfg),
        "carleman" => run_carleman(cfg),
        "limit" => run_limit(cfg),
        "oscdecay" => run_oscdecay(cfg),
        "verify" => run_verify(cfg),
        other => Err(Error::Config(format!("unknown command `{other}`"))),
    }
}

fn run_kernel(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.require("d")?;
    let n: usize = cfg.require("n")?;
    let samples: usize = cfg.get_or("samples", 200)?;
    let c = zonal_constant(d, n)?;
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["theta", "z_n", "fw_approx", "abs_err"].map(String::from))?;
    for k in 1..=samples {
        let theta = (std::f64::consts::PI - 0.05) * k as f64 / samples as f64;
        let z = zonal_eval(d, n, theta.cos(), false)?;
        let fw = c * frenzen_wong_main(d, n, theta, 1)?;
        out.row([num(theta), num(z), num(fw), num((z - fw).abs())])?;
    }
    out.finish(cfg, None)
}

fn run_project(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.require("d")?;
    let n: usize = cfg.require("n")?;
    let res: usize = cfg.get_or("res", n + 2)?;
    let input: PathBuf = cfg.require("input")?;
    let grid = Arc::new(SphereGrid::build(d, res)?);
    let f = GridFunction::read_csv(grid.clone(), std::io::BufReader::new(std::fs::File::open(input)?))?;
    let g = Projector::new(grid, n)?.project(&f)?;
    match cfg.get::<PathBuf>("output")?.or_else(|| cfg.out.clone()) {
        Some(p) => g.write_csv(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => g.write_csv(std::io::stdout().lock()),
    }
}

fn run_regions(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.require("d")?;
    let k: usize = cfg.get_or("grid", 100)?;
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["x", "y", "region", "gamma"].map(String::from))?;
    for p in triangle_grid(k) {
        let region = classify_region(d, p)?;
        out.row([format!("{}", p.x), format!("{}", p.y), region.to_string(), num(gamma_exponent(d, p))])?;
    }
    out.finish(cfg, Some(PlotKind::RegionMap))
}

fn run_witness(cfg: &ExperimentConfig) -> Result<()> {
    let family: WitnessFamily = cfg.require::<String>("family")?.parse()?;
    let spec = WitnessSpec::new(family, cfg.require("d")?, cfg.require("n")?, cfg.get_or("c", DEFAULT_C)?)?;
    let res = cfg.get_or("res", spec.min_resolution())?;
    let f = make_witness(&spec, Arc::new(SphereGrid::build(spec.d, res)?))?;
    match &cfg.out {
        Some(p) => f.write_csv(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => f.write_csv(std::io::stdout().lock()),
    }
}

fn run_norm_scan(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.require("d")?;
    let pt = cfg.point("pt")?;
    let ns: Vec<usize> = cfg.list("n-list")?.unwrap_or_else(|| vec![32, 64, 128, 256]);
    let method: String = cfg.get_or("method", "witness".to_string())?;
    let families: Vec<WitnessFamily> = match cfg.list::<String>("families")? {
        Some(names) => names.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        None => WitnessFamily::ALL.to_vec(),
    };
    let mut ns_sorted = ns.clone();
    ns_sorted.sort_unstable();
    ns_sorted.dedup();
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["d", "x", "y", "n", "method", "family", "ratio"].map(String::from))?;
    for n in ns_sorted {
        let (label, ratio) = match method.as_str() {
            "witness" => {
                let (fam, r) = best_family(d, n, pt, &families)?;
                (fam.to_string(), r)
            }
            "power" => {
                let r = power_method_detailed(d, n, pt, PowerOptions::default(), cfg.seed)?;
                (r.start, r.ratio)
            }
            other => return Err(Error::Config(format!("unknown method `{other}`"))),
        };
        out.row([d.to_string(), pt.x.to_string(), pt.y.to_string(), n.to_string(), method.clone(), label, num(ratio)])?;
    }
    out.finish(cfg, Some(PlotKind::LogLog))
}

fn run_exponent_fit(cfg: &ExperimentConfig) -> Result<()> {
    let input: PathBuf = cfg.require("in")?;
    let mut rdr = csv::Reader::from_path(&input).map_err(csv_error)?;
    let cols: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let idx = |name: &str| cols.iter().position(|c| c == name).ok_or_else(|| Error::Format(format!("missing column `{name}`")));
    let (id, ix, iy, inn, ir) = (idx("d")?, idx("x")?, idx("y")?, idx("n")?, idx("ratio")?);
    let mut pts = Vec::new();
    let mut head: Option<(usize, f64, f64)> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Format(format!("bad value in column {}", cols[i])))
        };
        let key = (field(id)? as usize, field(ix)?, field(iy)?);
        if *head.get_or_insert(key) != key {
            return Err(Error::Format("scan mixes several (d, x, y)".into()));
        }
        pts.push((field(inn)?, field(ir)?));
    }
    let (d, x, y) = head.ok_or_else(|| Error::Format("empty scan".into()))?;
    let pt = ExponentPoint::new(x, y)?;
    let fit = fit_exponent(&pts)?;
    let gamma = gamma_exponent(d, pt);
    let region = classify_region(d, pt)?;
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["slope", "r_squared", "gamma", "region"].map(String::from))?;
    out.row([num(fit.slope), num(fit.r_squared), num(gamma), region.to_string()])?;
    out.finish(cfg, None)?;
    if let Some(tol) = cfg.tolerances.get("slope") {
        if (fit.slope - gamma).abs() > *tol {
            return Err(Error::Assertion(format!("slope {:.4} differs from γ = {gamma:.4} by more than {tol}", fit.slope)));
        }
    }
    Ok(())
}

fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("tau-sweep `{s}` is not a:b:k"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let k: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match k {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
    }
}

fn run_carleman(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.get_or("d", 3)?;
    let p: f64 = cfg.get_or("p", 1.2)?;
    let q: f64 = cfg.get_or("q", 6.0)?;
    let floor: f64 = cfg.get_or("dist-floor", 0.25)?;
    let step: f64 = cfg.get_or("step", 1.0 / 32.0)?;
    let sweep = parse_sweep(&cfg.require::<String>("tau-sweep")?)?;
    let shift = d as f64 / q;
    let (taus, skipped): (Vec<f64>, Vec<f64>) =
        sweep.into_iter().partition(|t| crate::carleman::dist_to_integers(t - shift) >= floor);
    if !skipped.is_empty() {
        eprintln!("skipping {} τ values closer than {floor} to the resonances", skipped.len());
    }
    if taus.is_empty() {
        return Err(Error::Conditioning("every τ in the sweep is below the distance floor".into()));
    }
    let rows = uniformity_sweep(d, p, q, &taus, floor, step, cfg.seed)?;
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["tau", "ratio", "worst_mode"].map(String::from))?;
    for r in rows {
        out.row([num(r.tau), num(r.ratio), r.worst_mode.to_string()])?;
    }
    out.finish(cfg, None)
}

fn run_limit(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.get_or("d", 2)?;
    if d != 2 {
        return Err(Error::Unsupported(format!("the Gaussian bank is two-dimensional, got d = {d}")));
    }
    let mut ns: Vec<usize> = cfg.list("n-list")?.unwrap_or_else(|| vec![32, 64, 128, 256, 512]);
    ns.sort_unstable();
    ns.dedup();
    let top = *ns.last().ok_or_else(|| Error::Config("empty n-list".into()))?;
    let pairs = bank_pairs();
    let c = fit_limit_constant(d, top, &pairs)?;
    eprintln!("c̃ = {c:.8} fitted at n = {top}");
    let limits = pairs.iter().map(|(f, g)| Ok(c * extension_pairing(d, f, g)?.re)).collect::<Result<Vec<f64>>>()?;
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["n", "deviation"].map(String::from))?;
    for n in ns {
        let mut worst: f64 = 0.0;
        for ((f, g), lim) in pairs.iter().zip(&limits) {
            worst = worst.max((i_n_integral(d, n, f, g)? - lim).abs() / lim.abs());
        }
        out.row([n.to_string(), num(worst)])?;
    }
    out.finish(cfg, Some(PlotKind::LogLog))
}

fn run_oscdecay(cfg: &ExperimentConfig) -> Result<()> {
    let d: usize = cfg.get_or("d", 2)?;
    let eps: f64 = cfg.get_or("eps", EPS0)?;
    let lambdas: Vec<f64> = cfg.list("lambda-list")?.unwrap_or_else(|| vec![32.0, 64.0, 128.0, 256.0]);
    let pt = cfg.point("pt")?;
    if d != 2 {
        return Err(Error::Unsupported(format!("oscillatory decay only at d = 2, got {d}")));
    }
    if !(eps > 0.0 && eps <= EPS0) {
        return Err(Error::Config(format!("eps = {eps} outside (0, {EPS0}]")));
    }
    let mut out = Output::open(cfg.out.clone())?;
    out.row(["lambda", "input", "ratio"].map(String::from))?;
    for (i, input) in oscillatory_bank().iter().enumerate() {
        let mut pts = Vec::new();
        for &l in &lambdas {
            let r = t_lambda_eps_ratio(eps, l, pt, input)?;
            out.row([num(l), i.to_string(), num(r)])?;
            pts.push((l, r));
        }
        if pts.len() >= 3 {
            let fit = fit_exponent(&pts)?;
            eprintln!("input {i}: slope {:.4} (−d/q = {:.4})", fit.slope, -(d as f64) * pt.y);
        }
    }
    out.finish(cfg, Some(PlotKind::Decay))
}

fn run_verify(cfg: &ExperimentConfig) -> Result<()> {
    let suite: String = cfg.get_or("suite", "acceptance".to_string())?;
    if suite != "acceptance" {
        return Err(Error::Config(format!("unknown suite `{suite}`")));
    }
    let ids: Vec<usize> = cfg.list("criteria")?.unwrap_or_else(|| (1..=12).collect());
    if let Some(bad) = ids.iter().find(|i| !(1..=12).contains(*i)) {
        return Err(Error::Config(format!("no criterion {bad}")));
    }
    let mut failed = 0;
    for id in ids {
        let o = acceptance::run(id);
        println!("{o}");
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(Error::Assertion(format!("{failed} criteria failed")));
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command.config().and_then(|cfg| run(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
