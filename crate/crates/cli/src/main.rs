use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use banded_inverse::covstat::{self, CvRisk};
use banded_inverse::invapprox::{self, achieved_error, dense_inverse};
use banded_inverse::matcore::{band_distance_bounds, permute_conjugate};
use banded_inverse::mixing::{self, MixingReport, ProfilePoint};
use banded_inverse::spectral::{singular_bounds_banded, spd_bounds, spd_bounds_banded, DEFAULT_SLACK};
use banded_inverse::textio;
use banded_inverse::wiener::{self, SymbolSeries};
use banded_inverse::{
    bdo_inverse, neumann_general, neumann_spd, BandedMatrix, BdoDetails, DenseMatrix, Error,
    InverseCertificate, SeriesMode, SpectralBounds,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const THREADS_ENV: &str = "BANDED_INVERSE_THREADS";

#[derive(Parser)]
#[command(name = "banded-inverse", version, about = "Banded approximate inverses with certified error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Banded approximate inverse with an error certificate.
    ApproxInverse(ApproxArgs),
    /// Wiener norm of a matrix, optionally over a point-cloud metric.
    WienerNorm(WienerArgs),
    /// Wiener norm, Sobolev partial sum and range bounds of a symbol.
    #[command(alias = "wiener")]
    SymbolReport(SymbolArgs),
    /// Beta-mixing criterion profile and Hellinger summaries.
    MixingCheck(MixingArgs),
    /// Banded covariance and precision estimates from samples.
    Estimate(EstimateArgs),
    /// Draw Gaussian samples with a given covariance.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Spd,
    General,
    Bdo,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "spd")]
    construction: ConstructionArg,
    /// Half-bandwidth (truncation width for `bdo`).
    #[arg(long)]
    k: Option<usize>,
    /// Number of Neumann terms n.
    #[arg(long, conflicts_with = "tol", required_unless_present = "tol")]
    terms: Option<usize>,
    /// Smallest n whose certificate is at most this.
    #[arg(long)]
    tol: Option<f64>,
    /// Lower spectral bound m (with --m-hi).
    #[arg(long, requires = "m_hi")]
    m_lo: Option<f64>,
    /// Upper spectral bound M (with --m-lo).
    #[arg(long, requires = "m_lo")]
    m_hi: Option<f64>,
    /// Also compute the dense inverse and report the achieved error.
    #[arg(long)]
    oracle: bool,
    /// Write the approximant (banded format) here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct WienerArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Point cloud defining the index metric.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Conjugate the matrix by this permutation first.
    #[arg(long)]
    perm: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SymbolArgs {
    /// `example53` or a symbol file.
    #[arg(long)]
    symbol: String,
    #[arg(long, default_value_t = 1000)]
    mmax: u64,
    /// Zeroth coefficient of the example53 symbol.
    #[arg(long, default_value_t = 4.0)]
    shift: f64,
    /// Cutoff K of the Sobolev partial sum (default: largest offset).
    #[arg(long)]
    sobolev_k: Option<u128>,
    /// Write the n x n Laurent section (banded format) to --out.
    #[arg(long, requires = "out")]
    section: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MixingArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    pmax: usize,
    /// Window `m n p k`: past block m..=n, future block n+p+1..=n+p+k.
    #[arg(long, num_args = 4, value_names = ["M", "N", "P", "K"], action = clap::ArgAction::Append)]
    hellinger: Vec<usize>,
    /// Also profile the dense inverse.
    #[arg(long)]
    inverse: bool,
    /// Include the gamma(p) sufficient-condition profile.
    #[arg(long)]
    gamma: bool,
    /// Write the profile as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EstimateArgs {
    /// True covariance to sample from.
    #[arg(long, required_unless_present = "samples", conflicts_with = "samples")]
    truth: Option<PathBuf>,
    /// Observed samples.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long = "N", requires = "truth")]
    n_samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Banding width, or `auto` for cross-validation.
    #[arg(long, default_value = "auto")]
    k: String,
    /// Largest k tried by `auto`.
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long, default_value_t = 2)]
    folds: usize,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Write B_k(S_hat) here.
    #[arg(long)]
    out_cov: Option<PathBuf>,
    /// Write the banded precision estimate here.
    #[arg(long)]
    out_precision: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long = "N")]
    n_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write samples here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Math(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Math(e) if e.is_refusal() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) => f.write_str(m),
            Self::Math(e) => write!(f, "{e}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn input<T>(path: &Path, parse: impl FnOnce(&str) -> banded_inverse::Result<T>) -> Outcome<T> {
    parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `key = value` lines with dotted paths.
fn flatten(prefix: &str, v: &serde_json::Value, out: &mut String) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, x, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix} = {other}");
        }
    }
}

fn emit<T: Serialize>(output: &Output, report: &T, text: Option<String>) -> Outcome<()> {
    let body = match output.format {
        Format::Json => to_json(report),
        Format::Text => text.unwrap_or_else(|| {
            let mut s = String::new();
            flatten("", &serde_json::to_value(report).expect("reports serialize"), &mut s);
            s
        }),
    };
    match &output.report {
        Some(path) => write(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn user_bounds(m_lo: Option<f64>, m_hi: Option<f64>) -> Outcome<Option<SpectralBounds>> {
    match (m_lo, m_hi) {
        (Some(lo), Some(hi)) => banded_inverse::user_bounds(lo, hi)
            .map(Some)
            .map_err(|e| Failure::Input(e.to_string())),
        _ => Ok(None),
    }
}

#[derive(Serialize)]
struct ApproxReport {
    construction: invapprox::Construction,
    size: usize,
    k: usize,
    n: usize,
    band_width: usize,
    gamma: f64,
    m_lo: f64,
    m_hi: f64,
    kappa: f64,
    bounds_source: banded_inverse::BoundsSource,
    rigor: invapprox::Rigor,
    error_bound: f64,
    achieved_error: Option<f64>,
    bdo: Option<BdoDetails>,
}

fn approx_text(r: &ApproxReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "construction = {}", serde_json::to_value(r.construction).unwrap().as_str().unwrap());
    let _ = writeln!(s, "size = {}", r.size);
    let _ = writeln!(s, "k = {}", r.k);
    let _ = writeln!(s, "n = {}", r.n);
    let _ = writeln!(s, "band_width = {}", r.band_width);
    let _ = writeln!(s, "m = {:?}", r.m_lo);
    let _ = writeln!(s, "M = {:?}", r.m_hi);
    let _ = writeln!(s, "κ = {:?}", r.kappa);
    let _ = writeln!(s, "γ = {:?}", r.gamma);
    if let Some(d) = &r.bdo {
        let _ = writeln!(s, "ε_k = {:?}", d.epsilon_k);
        let _ = writeln!(s, "α_k = {:?}", d.alpha_k);
    }
    let _ = writeln!(s, "error_bound = {:?}", r.error_bound);
    if let Some(e) = r.achieved_error {
        let _ = writeln!(s, "achieved_error = {e:?}");
    }
    s
}

fn cmd_approx_inverse(args: &ApproxArgs) -> Outcome<()> {
    let text = input(&args.matrix, textio::parse_matrix)?;
    let dense = text.to_dense();
    let supplied = user_bounds(args.m_lo, args.m_hi)?;
    let (cert, k): (InverseCertificate, usize) = match args.construction {
        ConstructionArg::Bdo => {
            let k = args
                .k
                .ok_or_else(|| Failure::Input("--construction bdo needs --k".into()))?;
            let terms = match (args.terms, args.tol) {
                (Some(n), _) => n,
                (None, Some(tol)) => invapprox::bdo_terms_for_tolerance(&dense, k, supplied, tol)?,
                (None, None) => unreachable!("clap requires --terms or --tol"),
            };
            (bdo_inverse(&dense, k, terms, supplied)?, k)
        }
        c => {
            let banded = match args.k {
                Some(k) => BandedMatrix::from_dense(&dense, k)?,
                None => text.to_banded()?,
            };
            let spd = matches!(c, ConstructionArg::Spd);
            let (terms, bounds) = match (args.terms, args.tol) {
                (Some(n), _) => (n, supplied),
                (None, Some(tol)) => {
                    let b = match supplied {
                        Some(b) => b,
                        None if spd => spd_bounds_banded(&banded, DEFAULT_SLACK)?,
                        None => singular_bounds_banded(&banded, DEFAULT_SLACK)?,
                    };
                    let mode = if spd { SeriesMode::Spd } else { SeriesMode::General };
                    (invapprox::terms_for_tolerance(&b, mode, tol)?, Some(b))
                }
                (None, None) => unreachable!("clap requires --terms or --tol"),
            };
            let cert = if spd {
                neumann_spd(&banded, terms, bounds)?
            } else {
                neumann_general(&banded, terms, bounds)?
            };
            (cert, banded.half_bandwidth())
        }
    };
    let achieved = if args.oracle {
        Some(achieved_error(&dense, &cert.approx)?)
    } else {
        None
    };
    if let Some(path) = &args.out {
        write(path, &textio::write_banded(&cert.approx))?;
    }
    let report = ApproxReport {
        construction: cert.construction,
        size: dense.rows(),
        k,
        n: cert.terms,
        band_width: cert.band_width,
        gamma: cert.gamma,
        m_lo: cert.bounds_used.m_lo,
        m_hi: cert.bounds_used.m_hi,
        kappa: cert.bounds_used.kappa,
        bounds_source: cert.bounds_used.source,
        rigor: cert.rigor,
        error_bound: cert.error_bound,
        achieved_error: achieved,
        bdo: cert.bdo,
    };
    emit(&args.output, &report, Some(approx_text(&report)))
}

#[derive(Serialize)]
struct WienerReport {
    size: usize,
    wiener_norm: f64,
    effective_bandwidth: usize,
    generalized_wiener_norm: Option<f64>,
    shells: Option<Vec<(u64, f64)>>,
}

fn cmd_wiener_norm(args: &WienerArgs) -> Outcome<()> {
    let mut a = input(&args.matrix, textio::parse_matrix)?.to_dense();
    if let Some(path) = &args.perm {
        let pi = input(path, textio::parse_permutation)?;
        a = permute_conjugate(&a, &pi)?;
    }
    let (generalized, shells) = match &args.points {
        Some(path) => {
            let rho = input(path, textio::parse_points)?;
            let shells = wiener::metric_shell_sups(&a, &rho)?;
            (
                Some(shells.values().sum()),
                Some(shells.into_iter().collect()),
            )
        }
        None => (None, None),
    };
    let report = WienerReport {
        size: a.rows(),
        wiener_norm: wiener::wiener_norm(&a)?,
        effective_bandwidth: a.bandwidth(),
        generalized_wiener_norm: generalized,
        shells,
    };
    emit(&args.output, &report, None)
}

#[derive(Serialize)]
struct SymbolReport {
    source: String,
    coefficients: usize,
    max_offset: u128,
    f0: f64,
    wiener_norm: f64,
    off_zero_norm: f64,
    sobolev_cutoff: u128,
    sobolev_partial: f64,
    range_lower: f64,
    range_upper: f64,
    certified_positive: bool,
}

fn cmd_symbol_report(args: &SymbolArgs) -> Outcome<()> {
    let (f, source): (SymbolSeries, String) = if args.symbol == "example53" {
        (wiener::example53_symbol(args.mmax, args.shift)?, "example53".into())
    } else {
        let path = Path::new(&args.symbol);
        (input(path, textio::parse_symbol)?, args.symbol.clone())
    };
    let cutoff = args.sobolev_k.unwrap_or_else(|| f.max_offset());
    let norm = wiener::symbol_wiener_norm(&f);
    let range = wiener::symbol_range_bounds(&f);
    if let (Some(n), Some(path)) = (args.section, &args.out) {
        write(path, &textio::write_banded(&wiener::laurent_banded(&f, n)?))?;
    }
    let f0 = f.coefficient(0);
    let report = SymbolReport {
        source,
        coefficients: f.len(),
        max_offset: f.max_offset(),
        f0,
        wiener_norm: norm,
        off_zero_norm: norm - f0.abs(),
        sobolev_cutoff: cutoff,
        sobolev_partial: wiener::sobolev_half_partial(&f, cutoff),
        range_lower: range.lower,
        range_upper: range.upper,
        certified_positive: range.lower > 0.0,
    };
    emit(&args.output, &report, None)
}

#[derive(Serialize)]
struct InverseMixing {
    sigma: MixingReport,
    inverse: MixingReport,
    /// The inverse's profile decays whenever the matrix's does.
    consistent: bool,
}

fn mixing_report(sigma: &DenseMatrix, args: &MixingArgs) -> Outcome<MixingReport> {
    let mut report = mixing::beta_criterion_profile(sigma, args.pmax)?;
    if args.gamma {
        report.gamma = Some(mixing::gamma_profile(sigma, args.pmax)?);
    }
    for w in args.hellinger.chunks(4) {
        let window = mixing::Window {
            m: w[0],
            n: w[1],
            p: w[2],
            k: w[3],
        };
        report.hellinger.push(mixing::hellinger_record(sigma, window)?);
    }
    Ok(report)
}

fn profile_csv(columns: &[(&str, &[ProfilePoint])]) -> String {
    let mut s = String::from("p");
    for (name, _) in columns {
        let _ = write!(s, ",{name}");
    }
    s.push('\n');
    for (row, pt) in columns[0].1.iter().enumerate() {
        let _ = write!(s, "{}", pt.p);
        for (_, col) in columns {
            let _ = write!(s, ",{:?}", col[row].value);
        }
        s.push('\n');
    }
    s
}

fn cmd_mixing_check(args: &MixingArgs) -> Outcome<()> {
    let sigma = input(&args.matrix, textio::parse_matrix)?.to_dense();
    let report = mixing_report(&sigma, args)?;
    let inverse = if args.inverse {
        spd_bounds(&sigma, DEFAULT_SLACK)?;
        let inv = dense_inverse(&sigma)?;
        let inv = inv.add(&inv.transpose())?.scale(0.5);
        Some(mixing_report(&inv, args)?)
    } else {
        None
    };
    if let Some(path) = &args.csv {
        let mut cols: Vec<(&str, &[ProfilePoint])> = vec![("b", &report.profile)];
        if let Some(g) = &report.gamma {
            cols.push(("gamma", g));
        }
        if let Some(inv) = &inverse {
            cols.push(("inverse_b", &inv.profile));
        }
        write(path, &profile_csv(&cols))?;
    }
    match inverse {
        Some(inv) => {
            let out = InverseMixing {
                consistent: !report.verdict.decays || inv.verdict.decays,
                sigma: report,
                inverse: inv,
            };
            emit(&args.output, &out, None)
        }
        None => emit(&args.output, &report, None),
    }
}

#[derive(Serialize)]
struct Eq26 {
    delta_k: f64,
    bound: Option<f64>,
    refused: Option<String>,
}

impl Eq26 {
    fn eval(bounds: &SpectralBounds, delta_k: f64, terms: usize) -> Self {
        match covstat::precision_bound_eq26(bounds, delta_k, terms) {
            Ok(b) => Self {
                delta_k,
                bound: Some(b),
                refused: None,
            },
            Err(e) => Self {
                delta_k,
                bound: None,
                refused: Some(e.to_string()),
            },
        }
    }
}

#[derive(Serialize)]
struct TruthErrors {
    m: f64,
    big_m: f64,
    kappa: f64,
    eq26: Eq26,
    /// `||B_{nk}(S^{-1}) - S^{-1}||` for the true `S`.
    inverse_off_band: f64,
    covariance_error: f64,
    precision_error: f64,
}

#[derive(Serialize)]
struct EstimateReport {
    n_samples: usize,
    dim: usize,
    seed: Option<u64>,
    k: usize,
    k_selection: &'static str,
    cv_risks: Option<Vec<CvRisk>>,
    terms: usize,
    gamma_hat: f64,
    m_hat: f64,
    big_m_hat: f64,
    kappa_hat: f64,
    /// eq26 evaluated with `(m_hat, M_hat)` and `||S_hat - B_k(S_hat)||`.
    eq26_estimated: Eq26,
    truth: Option<TruthErrors>,
}

fn estimate_text(r: &EstimateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "N = {}", r.n_samples);
    let _ = writeln!(s, "p = {}", r.dim);
    let _ = writeln!(s, "k = {}", r.k);
    let _ = writeln!(s, "n = {}", r.terms);
    let _ = writeln!(s, "γ̂ = {:?}", r.gamma_hat);
    let _ = writeln!(s, "m̂ = {:?}", r.m_hat);
    let _ = writeln!(s, "M̂ = {:?}", r.big_m_hat);
    let _ = writeln!(s, "κ̂ = {:?}", r.kappa_hat);
    let _ = writeln!(s, "δ̂_k = {:?}", r.eq26_estimated.delta_k);
    if let Some(t) = &r.truth {
        let _ = writeln!(s, "m = {:?}", t.m);
        let _ = writeln!(s, "M = {:?}", t.big_m);
        let _ = writeln!(s, "κ = {:?}", t.kappa);
        let _ = writeln!(s, "δ_k = {:?}", t.eq26.delta_k);
        if let Some(b) = t.eq26.bound {
            let _ = writeln!(s, "eq26_bound = {b:?}");
        }
        let _ = writeln!(s, "inverse_off_band = {:?}", t.inverse_off_band);
        let _ = writeln!(s, "covariance_error = {:?}", t.covariance_error);
        let _ = writeln!(s, "precision_error = {:?}", t.precision_error);
    }
    s
}

fn cmd_estimate(args: &EstimateArgs) -> Outcome<()> {
    let (data, truth) = match (&args.truth, &args.samples) {
        (Some(path), _) => {
            let sigma = input(path, textio::parse_matrix)?.to_dense();
            let n = args
                .n_samples
                .ok_or_else(|| Failure::Input("--truth needs --N".into()))?;
            (covstat::sample_gaussian(&sigma, n, args.seed)?, Some(sigma))
        }
        (None, Some(path)) => (input(path, textio::parse_samples)?, None),
        (None, None) => unreachable!("clap requires --truth or --samples"),
    };
    let p = data.dim();
    let (k, selection, risks) = if args.k == "auto" {
        let grid: Vec<usize> = (0..=args.k_max.min(p.saturating_sub(1))).collect();
        let risks = covstat::cv_risks(&data, &grid, args.folds)?;
        (covstat::select_k(&data, &grid, args.folds)?, "cross-validation", Some(risks))
    } else {
        let k = args
            .k
            .parse()
            .map_err(|_| Failure::Input(format!("--k expects an integer or `auto`, got `{}`", args.k)))?;
        (k, "fixed", None)
    };
    let empirical = covstat::empirical_cov(&data)?;
    let banded = covstat::banded_cov_estimator(&empirical, k)?;
    let precision = covstat::banded_precision_estimator(&empirical, k, args.terms)?;
    let (m_hat, big_m_hat) = precision.eigen_extremes.expect("set by the precision estimator");
    let hat_bounds = banded_inverse::user_bounds(m_hat, big_m_hat)?;
    let delta_hat = band_distance_bounds(&empirical.sigma_hat, k)?.upper;
    let truth = match &truth {
        Some(sigma) => {
            let b = spd_bounds(sigma, DEFAULT_SLACK)?;
            let inv = dense_inverse(sigma)?;
            let width = (args.terms * k).min(p - 1);
            Some(TruthErrors {
                m: b.m_lo,
                big_m: b.m_hi,
                kappa: b.kappa,
                eq26: Eq26::eval(&b, band_distance_bounds(sigma, k)?.upper, args.terms),
                inverse_off_band: band_distance_bounds(&inv, width)?.upper,
                covariance_error: banded_inverse::op_norm(&banded.sigma_hat.sub(sigma)?)?,
                precision_error: banded_inverse::op_norm(&precision.sigma_hat.sub(&inv)?)?,
            })
        }
        None => None,
    };
    if let Some(path) = &args.out_cov {
        write(path, &textio::write_banded(&BandedMatrix::from_dense(&banded.sigma_hat, k)?))?;
    }
    if let Some(path) = &args.out_precision {
        let width = (args.terms * k).min(p - 1);
        write(
            path,
            &textio::write_banded(&BandedMatrix::from_dense(&precision.sigma_hat, width)?),
        )?;
    }
    let report = EstimateReport {
        n_samples: data.n_samples(),
        dim: p,
        seed: data.seed(),
        k,
        k_selection: selection,
        cv_risks: risks,
        terms: args.terms,
        gamma_hat: precision.gamma_hat.expect("set by the precision estimator"),
        m_hat,
        big_m_hat,
        kappa_hat: hat_bounds.kappa,
        eq26_estimated: Eq26::eval(&hat_bounds, delta_hat, args.terms),
        truth,
    };
    emit(&args.output, &report, Some(estimate_text(&report)))
}

fn cmd_sample(args: &SampleArgs) -> Outcome<()> {
    let sigma = input(&args.truth, textio::parse_matrix)?.to_dense();
    let data = covstat::sample_gaussian(&sigma, args.n_samples, args.seed)?;
    let body = textio::write_samples(&data);
    match &args.out {
        Some(path) => write(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn run(cli: &Cli) -> Outcome<()> {
    configure_threads()?;
    match &cli.command {
        Command::ApproxInverse(a) => cmd_approx_inverse(a),
        Command::WienerNorm(a) => cmd_wiener_norm(a),
        Command::SymbolReport(a) => cmd_symbol_report(a),
        Command::MixingCheck(a) => cmd_mixing_check(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sample(a) => cmd_sample(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
