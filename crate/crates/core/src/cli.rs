//! Command-line surface: argument parsing, one resolved [`RunConfig`] per
//! invocation, and deterministic CSV / JSON-lines rendering.
//!
//! Exit codes: 0 the claim was witnessed, 2 usage error, 3 inconclusive at
//! tolerance, 4 numerical budget exceeded.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::{domain, Error, Result};
use crate::euler_lagrange::{criticality_residual, moment_sweep, DEFAULT_MOMENT_KMAX};
use crate::exponents::{
    admissible_range, critical_exponent, critical_exponent_bisection, kappa, strichartz_q, Signature,
};
use crate::extremizer::{ascend, AscentConfig, SliceConfig};
use crate::gaussian_extension::{gaussian, gaussian_grid};
use crate::quadrature::Tolerance;
use crate::saddle::{
    k_apply_line_integral, k_pairing, kg_closed, reflection_r, seeded_smooth_function, symmetric_decompose,
    tensor_square, truncated_k1, truncated_kg_l2, LogSlopeFit, PairingConfig, PLANCHEREL_FACTOR,
};

pub const EXIT_WITNESSED: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "hypext",
    version,
    about = "Fourier extension from hyperbolic paraboloids: witnesses and searches"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Critical exponent p_d, the matching q_d and kappa_d, with a bisection cross-check.
    CriticalExponent { d: usize },
    /// Moment sweep k = 1..kmax of the Euler-Lagrange defect.
    Moments,
    /// Spread of the reduced Euler-Lagrange identity over seeded sample points.
    Residual,
    /// Diagnostics of the saddle convolution kernel.
    Saddle {
        #[arg(value_enum)]
        check: SaddleCheck,
    },
    /// Gradient ascent of ||Tf||_4^4 / ||f||_2^4 from the Gaussian.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SaddleCheck {
    Kernel,
    Divergence,
    Symmetry,
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Raw flags; anything left out falls back to [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Options {
    #[arg(long, global = true)]
    pub d_plus: Option<usize>,
    #[arg(long, global = true)]
    pub d_minus: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub grid_box: Option<f64>,
    #[arg(long, global = true)]
    pub cutoff_b: Option<f64>,
    #[arg(long, global = true)]
    pub cutoff_y: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub t_slices: Option<usize>,
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Every knob of one run, after defaults. Printed in full as the output header.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub d_plus: usize,
    pub d_minus: usize,
    pub p: f64,
    pub k_max: usize,
    pub tol: Tolerance,
    pub grid_n: usize,
    pub grid_box: f64,
    pub cutoff_b: f64,
    pub cutoff_y: f64,
    pub t_max: f64,
    pub t_slices: usize,
    pub iters: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Fills in per-command defaults and validates every field.
    pub fn resolve(command: Command, o: &Options) -> Result<Self> {
        let (grid_n, grid_box) = match command {
            Command::Saddle {
                check: SaddleCheck::Symmetry,
            } => (16, 2.5),
            Command::Saddle { .. } => (24, 3.0),
            _ => (64, 6.0),
        };
        let cutoff_b = match command {
            Command::Saddle {
                check: SaddleCheck::Divergence,
            } => 8.0,
            _ => crate::saddle::DEFAULT_CUTOFF,
        };
        let default_tol = Tolerance::default();
        let slices = SliceConfig::default();
        let c = RunConfig {
            command,
            d_plus: o.d_plus.unwrap_or(1),
            d_minus: o.d_minus.unwrap_or(1),
            p: o.p.unwrap_or(2.0),
            k_max: o.kmax.unwrap_or(DEFAULT_MOMENT_KMAX),
            tol: Tolerance::new(
                o.tol_abs.unwrap_or(default_tol.abs),
                o.tol_rel.unwrap_or(default_tol.rel),
            ),
            grid_n: o.grid_n.unwrap_or(grid_n),
            grid_box: o.grid_box.unwrap_or(grid_box),
            cutoff_b: o.cutoff_b.unwrap_or(cutoff_b),
            cutoff_y: o.cutoff_y.unwrap_or(10.0),
            t_max: o.t_max.unwrap_or(slices.t_max),
            t_slices: o.t_slices.unwrap_or(slices.t_slices),
            iters: o.iters.unwrap_or(AscentConfig::default().max_iters),
            seed: o.seed.unwrap_or(1),
            out: o.out.clone(),
            format: o.format.unwrap_or_default(),
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("tol-abs", self.tol.abs),
            ("tol-rel", self.tol.rel),
            ("grid-box", self.grid_box),
            ("cutoff-b", self.cutoff_b),
            ("t-max", self.t_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("--{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.cutoff_y > 1.0 && self.cutoff_y.is_finite()) {
            return domain(format!("--cutoff-y must exceed 1, got {}", self.cutoff_y));
        }
        if self.grid_n < 3 {
            return domain(format!("--grid-n must be at least 3, got {}", self.grid_n));
        }
        if self.k_max < 1 {
            return domain("--kmax must be at least 1");
        }
        if self.t_slices < 3 || self.t_slices.is_multiple_of(2) {
            return domain(format!("--t-slices must be odd and at least 3, got {}", self.t_slices));
        }
        if !self.p.is_finite() {
            return domain("--p must be finite");
        }
        Ok(())
    }

    fn signature(&self) -> Result<Signature> {
        Signature::new(self.d_plus, self.d_minus)
    }

    fn command_name(&self) -> String {
        match &self.command {
            Command::CriticalExponent { d } => format!("critical-exponent {d}"),
            Command::Moments => "moments".into(),
            Command::Residual => "residual".into(),
            Command::Saddle { check } => format!(
                "saddle {}",
                check
                    .to_possible_value()
                    .map(|v| v.get_name().to_owned())
                    .unwrap_or_default()
            ),
            Command::Search => "search".into(),
        }
    }

    /// `(key, value)` pairs in a fixed order.
    pub fn header(&self) -> Vec<(&'static str, String)> {
        vec![
            ("command", self.command_name()),
            ("d_plus", self.d_plus.to_string()),
            ("d_minus", self.d_minus.to_string()),
            ("p", format!("{:?}", self.p)),
            ("kmax", self.k_max.to_string()),
            ("tol_abs", format!("{:?}", self.tol.abs)),
            ("tol_rel", format!("{:?}", self.tol.rel)),
            ("grid_n", self.grid_n.to_string()),
            ("grid_box", format!("{:?}", self.grid_box)),
            ("cutoff_b", format!("{:?}", self.cutoff_b)),
            ("cutoff_y", format!("{:?}", self.cutoff_y)),
            ("t_max", format!("{:?}", self.t_max)),
            ("t_slices", self.t_slices.to_string()),
            ("iters", self.iters.to_string()),
            ("seed", self.seed.to_string()),
            (
                "format",
                if self.format == Format::Csv { "csv" } else { "jsonl" }.into(),
            ),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:?}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Vec<(&'static str, Cell)>,
    pub witnessed: bool,
    /// Extra artifact written next to `--out` (the search writes its final profile).
    pub grid_text: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.witnessed {
            EXIT_WITNESSED
        } else {
            EXIT_INCONCLUSIVE
        }
    }

    pub fn render(&self, config: &RunConfig) -> String {
        match config.format {
            Format::Csv => self.render_csv(config),
            Format::Jsonl => self.render_jsonl(config),
        }
    }

    fn render_csv(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        for (k, v) in config.header() {
            let _ = writeln!(out, "# {k}={v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "# table={}", t.name);
            let _ = writeln!(out, "{}", t.columns.join(","));
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}={}", v.csv());
        }
        let _ = writeln!(out, "# witnessed={}", self.witnessed);
        out
    }

    fn render_jsonl(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        let header: Map<String, Value> = config
            .header()
            .into_iter()
            .map(|(k, v)| (k.to_owned(), json!(v)))
            .collect();
        let _ = writeln!(out, "{}", json!({ "config": header }));
        for t in &self.tables {
            for row in &t.rows {
                let mut obj = Map::new();
                obj.insert("table".into(), json!(t.name));
                for (c, v) in t.columns.iter().zip(row) {
                    obj.insert((*c).to_owned(), v.json());
                }
                let _ = writeln!(out, "{}", Value::Object(obj));
            }
        }
        let mut summary: Map<String, Value> = self.summary.iter().map(|(k, v)| ((*k).to_owned(), v.json())).collect();
        summary.insert("witnessed".into(), json!(self.witnessed));
        let _ = writeln!(out, "{}", json!({ "summary": summary }));
        out
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Divergent(_) | Error::Singular(_) | Error::NonFinite(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

pub fn execute(c: &RunConfig) -> Result<Report> {
    match c.command {
        Command::CriticalExponent { d } => critical_exponent_report(d),
        Command::Moments => moments_report(c),
        Command::Residual => residual_report(c),
        Command::Saddle { check } => match check {
            SaddleCheck::Kernel => kernel_report(c),
            SaddleCheck::Divergence => divergence_report(c),
            SaddleCheck::Symmetry => symmetry_report(c),
            SaddleCheck::Norm => norm_report(c),
        },
        Command::Search => search_report(c),
    }
}

fn report(tables: Vec<Table>, summary: Vec<(&'static str, Cell)>, witnessed: bool) -> Report {
    Report {
        tables,
        summary,
        witnessed,
        grid_text: None,
    }
}

fn critical_exponent_report(d: usize) -> Result<Report> {
    let p = critical_exponent(d)?;
    let q = strichartz_q(p, d)?;
    let k = kappa(d)?;
    let residual = (p - critical_exponent_bisection(d)?).abs();
    let (lo, hi) = admissible_range(d);
    let in_range = lo < p && p < hi;
    let mut t = Table::new(
        "critical_exponent",
        &["d", "p_d", "q_d", "kappa_d", "bisection_residual", "in_range"],
    );
    t.push(vec![
        d.into(),
        p.into(),
        q.into(),
        k.into(),
        residual.into(),
        in_range.into(),
    ]);
    Ok(report(vec![t], vec![], residual < 1e-12 && in_range))
}

fn hyperbolic(c: &RunConfig) -> Result<Signature> {
    if c.d_plus == 0 || c.d_minus == 0 {
        return Err(Error::Paraboloid {
            d_plus: c.d_plus,
            d_minus: c.d_minus,
        });
    }
    c.signature()
}

fn moments_report(c: &RunConfig) -> Result<Report> {
    let sig = hyperbolic(c)?;
    let sweep = moment_sweep(c.k_max, c.p, &sig, c.tol)?;
    let mut t = Table::new("moments", &["k", "re", "im", "abs_error", "nonzero"]);
    for m in &sweep {
        t.push(vec![
            m.k.into(),
            m.value.re.into(),
            m.value.im.into(),
            m.abs_error.into(),
            m.nonzero_at_tolerance.into(),
        ]);
    }
    let witnessed = sweep.iter().any(|m| m.nonzero_at_tolerance);
    Ok(report(vec![t], vec![], witnessed))
}

/// `count` seeded points in `[0, 2]^2` for the reduced identity.
fn residual_samples(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0)))
        .collect()
}

fn residual_report(c: &RunConfig) -> Result<Report> {
    let sig = hyperbolic(c)?;
    let r = criticality_residual(c.p, &sig, &residual_samples(c.seed, 8), c.tol)?;
    let mut samples = Table::new("samples", &["r_plus", "r_minus"]);
    for &(a, b) in &r.sample_points {
        samples.push(vec![a.into(), b.into()]);
    }
    let mut t = Table::new(
        "residual",
        &[
            "lambda_re",
            "lambda_im",
            "lambda_error",
            "residual",
            "residual_error",
            "witness_k",
        ],
    );
    t.push(vec![
        r.lambda_estimate.re.into(),
        r.lambda_estimate.im.into(),
        r.lambda_error.into(),
        r.residual.into(),
        r.residual_error.into(),
        r.witness_k.map(Cell::from).unwrap_or(Cell::Text("none".into())),
    ]);
    Ok(report(vec![samples, t], vec![], r.witnessed()))
}

fn gaussian_tensor(p: [f64; 4]) -> Complex64 {
    Complex64::new(gaussian(&p[..2]) * gaussian(&p[2..]), 0.0)
}

/// Largest relative deviation tolerated between the Bessel closed form and the line integral.
pub const KERNEL_TOLERANCE: f64 = 1e-4;

fn kernel_report(c: &RunConfig) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut t = Table::new(
        "kernel",
        &[
            "eta_1",
            "eta_2",
            "nu_1",
            "nu_2",
            "closed_form",
            "line_integral",
            "rel_error",
        ],
    );
    let mut worst = 0.0f64;
    while t.rows.len() < 10 {
        let eta: [f64; 2] = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let nu: [f64; 2] = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let level = ((eta[0] - nu[0]).powi(2) - (eta[1] - nu[1]).powi(2)) / 2.0;
        if level.abs() < 1e-3 {
            continue;
        }
        let exact = kg_closed(eta, nu)?;
        let line = k_apply_line_integral(gaussian_tensor, eta, nu, c.cutoff_b, c.tol)?
            .value
            .re;
        let rel = (line - exact).abs() / exact.abs();
        worst = worst.max(rel);
        t.push(vec![
            eta[0].into(),
            eta[1].into(),
            nu[0].into(),
            nu[1].into(),
            exact.into(),
            line.into(),
            rel.into(),
        ]);
    }
    Ok(report(
        vec![t],
        vec![("max_rel_error", worst.into())],
        worst <= KERNEL_TOLERANCE,
    ))
}

/// Slope dispersion allowed for a truncation sequence to count as divergent.
pub const DIVERGENCE_DISPERSION: f64 = 0.1;

fn divergence_report(c: &RunConfig) -> Result<Report> {
    let eta = [0.5, 0.2];
    let nu = [-0.3, 0.9];
    let bs: Vec<f64> = (0..4).map(|k| c.cutoff_b * 2f64.powi(k)).collect();
    let ys: Vec<f64> = (0..4).map(|k| c.cutoff_y * 2f64.powi(k)).collect();
    let k1: Vec<f64> = bs.iter().map(|&b| truncated_k1(eta, nu, b)).collect::<Result<_>>()?;
    let l2: Vec<f64> = ys
        .iter()
        .map(|&y| Ok(truncated_kg_l2(y)?.value.re))
        .collect::<Result<_>>()?;
    let fit_k1 = LogSlopeFit::new(&bs, &k1)?;
    let fit_l2 = LogSlopeFit::new(&ys, &l2)?;
    let mut a = Table::new("k1", &["cutoff", "value"]);
    for (b, v) in bs.iter().zip(&k1) {
        a.push(vec![(*b).into(), (*v).into()]);
    }
    let mut b = Table::new("kg_l2", &["cutoff", "value"]);
    for (y, v) in ys.iter().zip(&l2) {
        b.push(vec![(*y).into(), (*v).into()]);
    }
    let summary = vec![
        ("k1_slope", fit_k1.fitted_slope.into()),
        ("k1_dispersion", fit_k1.dispersion.into()),
        ("kg_l2_slope", fit_l2.fitted_slope.into()),
        ("kg_l2_dispersion", fit_l2.dispersion.into()),
    ];
    let witnessed = fit_k1.diverges(DIVERGENCE_DISPERSION) && fit_l2.diverges(DIVERGENCE_DISPERSION);
    Ok(report(vec![a, b], summary, witnessed))
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-6;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

fn symmetry_report(c: &RunConfig) -> Result<Report> {
    let config = PairingConfig {
        cutoff: c.cutoff_b,
        ..Default::default()
    };
    let mut t = Table::new(
        "symmetry",
        &[
            "seed",
            "involution_exact",
            "orthogonality",
            "pairing_full",
            "pairing_symmetric",
            "rel_difference",
        ],
    );
    let mut ok = true;
    for seed in c.seed..c.seed + 3 {
        let f = seeded_smooth_function(seed, c.grid_n, c.grid_box)?;
        let involution = reflection_r(&reflection_r(&f)?)? == f;
        let (f1, f2) = symmetric_decompose(&f)?;
        let orth = f1.inner(&f2)?.norm() / (f1.norm_l2()? * f2.norm_l2()?);
        let full = k_pairing(&f, config)?.value;
        let sym = k_pairing(&f1, config)?.value;
        let rel = (full - sym).abs() / full.abs();
        ok &= involution && orth <= ORTHOGONALITY_TOLERANCE && rel <= SYMMETRY_TOLERANCE;
        t.push(vec![
            Cell::Int(seed as i64),
            involution.into(),
            orth.into(),
            full.into(),
            sym.into(),
            rel.into(),
        ]);
    }
    Ok(report(vec![t], vec![], ok))
}

pub const NORM_TOLERANCE: f64 = 2e-2;

fn norm_report(c: &RunConfig) -> Result<Report> {
    let g = gaussian_grid(2, c.grid_box, c.grid_n)?;
    let r = k_pairing(
        &tensor_square(&g)?,
        PairingConfig {
            cutoff: c.cutoff_b,
            ..Default::default()
        },
    )?;
    let target = 4.0 * PI.powi(4);
    let value = r.value * PLANCHEREL_FACTOR;
    let rel = (value - target).abs() / target;
    let mut t = Table::new(
        "norm",
        &["value", "target", "rel_deviation", "abs_error", "line_integrals"],
    );
    t.push(vec![
        value.into(),
        target.into(),
        rel.into(),
        (r.abs_error * PLANCHEREL_FACTOR).into(),
        r.line_integrals.into(),
    ]);
    Ok(report(vec![t], vec![], rel <= NORM_TOLERANCE))
}

fn search_report(c: &RunConfig) -> Result<Report> {
    let g = gaussian_grid(2, c.grid_box, c.grid_n)?;
    let config = AscentConfig {
        max_iters: c.iters,
        slices: SliceConfig {
            t_max: c.t_max,
            t_slices: c.t_slices,
            ..SliceConfig::default()
        },
        ..AscentConfig::default()
    };
    let r = ascend(&g, config)?;
    let mut t = Table::new("trace", &["iteration", "lambda", "step", "gradient_norm"]);
    for s in &r.steps {
        t.push(vec![
            s.iteration.into(),
            s.lambda.into(),
            s.step.into(),
            s.gradient_norm.into(),
        ]);
    }
    let summary = vec![
        ("lambda_gaussian", r.lambda_gaussian.into()),
        ("lambda_final", r.final_lambda().into()),
        ("relative_gain", (r.final_lambda() / r.lambda_gaussian - 1.0).into()),
        ("iterations", r.iterations.into()),
        ("gradient_norm_final", r.gradient_norm_final.into()),
        ("improved_over_gaussian", r.improved_over_gaussian.into()),
    ];
    let mut grid = Vec::new();
    r.final_f.write_text(&mut grid)?;
    Ok(Report {
        tables: vec![t],
        summary,
        witnessed: r.improved_over_gaussian,
        grid_text: Some(String::from_utf8(grid).map_err(|e| Error::Io(e.to_string()))?),
    })
}

/// Runs a parsed command line end to end and returns the exit code.
/// Output goes to `--out` when given, otherwise to stdout; diagnostics to stderr.
pub fn run(cli: Cli) -> i32 {
    let config = match RunConfig::resolve(cli.command, &cli.options) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hypext: {e}");
            return exit_code_for(&e);
        }
    };
    let rep = match execute(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hypext: {e}");
            return exit_code_for(&e);
        }
    };
    let text = rep.render(&config);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("hypext: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            if let Some(grid) = &rep.grid_text {
                let mut side = path.clone().into_os_string();
                side.push(".grid");
                if let Err(e) = std::fs::write(&side, grid) {
                    eprintln!("hypext: cannot write {}: {e}", PathBuf::from(side).display());
                    return EXIT_USAGE;
                }
            }
        }
        None => print!("{text}"),
    }
    rep.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hypext").chain(args.iter().copied())).unwrap()
    }

    fn resolved(args: &[&str]) -> RunConfig {
        let cli = parse(args);
        RunConfig::resolve(cli.command, &cli.options).unwrap()
    }

    #[test]
    fn flags_parse_after_the_subcommand() {
        let c = resolved(&[
            "moments",
            "--d-plus",
            "2",
            "--d-minus",
            "1",
            "--p",
            "2.2",
            "--kmax",
            "3",
            "--format",
            "jsonl",
        ]);
        assert_eq!((c.d_plus, c.d_minus, c.k_max), (2, 1, 3));
        assert_eq!(c.p, 2.2);
        assert_eq!(c.format, Format::Jsonl);
    }

    #[test]
    fn per_command_grid_defaults() {
        assert_eq!(resolved(&["saddle", "symmetry"]).grid_n, 16);
        assert_eq!(resolved(&["saddle", "norm"]).grid_n, 24);
        assert_eq!(resolved(&["search"]).grid_n, 64);
        assert_eq!(resolved(&["saddle", "divergence"]).cutoff_b, 8.0);
        assert_eq!(resolved(&["saddle", "kernel"]).cutoff_b, 12.0);
    }

    #[test]
    fn validation_rejects_bad_values() {
        for args in [
            &["search", "--grid-n", "2"][..],
            &["moments", "--tol-abs=-1"],
            &["search", "--t-slices", "64"],
            &["saddle", "divergence", "--cutoff-y", "0.5"],
        ] {
            let cli = parse(args);
            let e = RunConfig::resolve(cli.command, &cli.options).unwrap_err();
            assert_eq!(exit_code_for(&e), EXIT_USAGE, "{args:?}");
        }
        assert!(Cli::try_parse_from(["hypext", "saddle", "bogus"]).is_err());
    }

    #[test]
    fn critical_exponent_rows() {
        let c = resolved(&["critical-exponent", "3"]);
        let r = execute(&c).unwrap();
        let row = &r.tables[0].rows[0];
        assert_eq!(row[1], Cell::Num(2.25));
        assert!(r.witnessed);
        let c = resolved(&["critical-exponent", "1"]);
        assert_eq!(exit_code_for(&execute(&c).unwrap_err()), EXIT_USAGE);
    }

    #[test]
    fn paraboloid_is_a_usage_error() {
        let c = resolved(&["moments", "--d-minus", "0", "--d-plus", "2"]);
        let e = execute(&c).unwrap_err();
        assert!(matches!(e, Error::Paraboloid { .. }));
        assert_eq!(exit_code_for(&e), EXIT_USAGE);
    }

    #[test]
    fn csv_is_deterministic_and_carries_the_config() {
        let c = resolved(&["moments", "--kmax", "2"]);
        let a = execute(&c).unwrap().render(&c);
        let b = execute(&c).unwrap().render(&c);
        assert_eq!(a, b);
        assert!(a.starts_with("# command=moments\n"));
        assert!(a.contains("# kmax=2\n"));
        assert!(a.contains("k,re,im,abs_error,nonzero\n"));
        assert!(a.ends_with("# witnessed=true\n"));
    }

    #[test]
    fn jsonl_lines_parse() {
        let c = resolved(&["saddle", "divergence", "--format", "jsonl"]);
        let r = execute(&c).unwrap();
        assert!(r.witnessed);
        let text = r.render(&c);
        let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert!(lines[0].get("config").is_some());
        assert_eq!(lines[1]["table"], "k1");
        assert!(lines.last().unwrap()["summary"]["witnessed"].as_bool().unwrap());
    }

    #[test]
    fn budget_maps_to_its_own_code() {
        let e = Error::BudgetExceeded {
            value: Complex64::new(0.0, 0.0),
            abs_error: 1.0,
            evaluations: 10,
        };
        assert_eq!(exit_code_for(&e), EXIT_BUDGET);
        assert_eq!(exit_code_for(&Error::Divergent("x".into())), EXIT_INCONCLUSIVE);
    }
}
