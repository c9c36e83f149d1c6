//! Command-line front door: sampling, density/CF evaluation, moments, and
//! the Monte Carlo verification suites, all seeded and byte-reproducible.
//!
//! Numbers print in Rust's shortest round-trip decimal form (up to 17
//! significant digits), so piping output through text and back is
//! lossless for f64. Exit codes: 0 success, 1 statistical failure,
//! 2 usage or validation error.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{Array1, Array2};
use serde_json::json;

use galkit::core::{GalParams, MatrixProductParams};
use galkit::error::GalError;
use galkit::sample::{
    sample_isotropic_product, sample_matrix_product, sample_mixture, RngStream, SampleMatrix,
    SampleMeta,
};
use galkit::{dist, verify};

#[derive(Parser)]
#[command(
    name = "galkit",
    version,
    about = "Multivariate generalized asymmetric Laplace toolkit",
    long_about = "Sampling, density and characteristic-function evaluation, moments, and \
                  statistical verification of the GAL distribution. All randomness derives \
                  from --seed/--stream (GALKIT_SEED overrides the default seed); identical \
                  configurations produce byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw GAL samples with one of the three constructions
    Sample(SampleArgs),
    /// Evaluate log-density and density at points
    Pdf(PdfArgs),
    /// Evaluate the characteristic function at frequencies
    Cf(CfArgs),
    /// Print the exact mean vector and covariance matrix
    Moments(MomentsArgs),
    /// Run a named verification suite and emit a JSON report
    #[command(subcommand)]
    Verify(VerifySuite),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerKind {
    /// u mu + sqrt(u) x with u ~ Gamma(s,1), x ~ N(0, sigma)
    Mixture,
    /// W y + ||y||^2 mu with W ~ N(0, sigma) columns, y ~ N(0, I_d)
    MatrixProduct,
    /// W y with y ~ N(0, alpha I_d)
    Isotropic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    sampler: SamplerKind,
    /// Matrix as `I2`/`I3`/... or row-major `a,b;c,d`
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    /// Comma-separated vector, e.g. `0.5,-1`; defaults to zeros
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Shape parameter (mixture sampler only)
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Dimension cross-check (inferred from --sigma when omitted)
    #[arg(long)]
    p: Option<usize>,
    /// Column count of W (matrix-product / isotropic samplers)
    #[arg(long)]
    d: Option<usize>,
    /// Isotropic variance of y (isotropic sampler only)
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write to a file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Prepend a `x1,...,xp` header row (CSV only)
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct PdfArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    /// Evaluation point (comma-separated for p > 1); repeatable
    #[arg(long, allow_hyphen_values = true, required = true)]
    x: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CfArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    /// Frequency vector (comma-separated for p > 1); repeatable
    #[arg(long, allow_hyphen_values = true, required = true)]
    u: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Matrix-product vs. mixture sampler battery at one (p, d) cell
    TheoremMain {
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        permutations: usize,
    },
    /// Isotropic product vs. sqrt(u) x mixture battery
    CorollaryPca {
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        permutations: usize,
    },
    /// Sums of independent GAL draws vs. direct draws, plus the analytic
    /// CF product identity
    Convolution {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        s1: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.5)]
        s2: f64,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        permutations: usize,
    },
    /// Analytic Laplace reduction grid plus the Wishart KS special case
    LaplaceReduction {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        b: f64,
        /// Sample size for the KS check (needs n >= 100)
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
        seed: u64,
    },
    /// Empirical moments of the three samplers vs. the exact formulas
    Moments {
        /// Sample size (needs n >= 10000)
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, env = "GALKIT_SEED", default_value_t = 7)]
        seed: u64,
    },
    /// One-sample KS against Laplace(b) on externally provided samples
    KsLaplace {
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        b: f64,
        /// CSV file of univariate samples, or `-` for standard input
        #[arg(long, default_value = "-")]
        input: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, GalError> {
    match cli.cmd {
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::Pdf(args) => cmd_pdf(args),
        Cmd::Cf(args) => cmd_cf(args),
        Cmd::Moments(args) => cmd_moments(args),
        Cmd::Verify(suite) => cmd_verify(suite),
    }
}

// ---- flag parsing -------------------------------------------------------

fn parse_vector(text: &str) -> Result<Array1<f64>, GalError> {
    let vals: Result<Vec<f64>, _> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect();
    let vals = vals.map_err(|_| GalError::Domain(format!("cannot parse vector '{text}'")))?;
    if vals.is_empty() {
        return Err(GalError::Domain(format!("empty vector '{text}'")));
    }
    Ok(Array1::from_vec(vals))
}

/// `I2`, `I3`, ... for identities; otherwise row-major `a,b;c,d`.
fn parse_matrix(text: &str) -> Result<Array2<f64>, GalError> {
    let t = text.trim();
    if let Some(dim) = t.strip_prefix('I').and_then(|r| r.parse::<usize>().ok()) {
        if dim == 0 {
            return Err(GalError::Domain("identity dimension must be >= 1".into()));
        }
        return Ok(Array2::eye(dim));
    }
    let rows: Vec<Vec<f64>> = t
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| GalError::Domain(format!("cannot parse matrix '{text}'")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let p = rows.len();
    if p == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(GalError::Domain(format!("ragged matrix '{text}'")));
    }
    if rows[0].len() != p {
        return Err(GalError::DimensionMismatch(format!(
            "matrix '{text}' is {}x{}, expected square",
            p,
            rows[0].len()
        )));
    }
    Ok(Array2::from_shape_fn((p, p), |(i, j)| rows[i][j]))
}

fn write_out(text: &str, path: Option<&PathBuf>) -> Result<(), GalError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| GalError::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| GalError::Domain(format!("cannot write stdout: {e}")))
        }
    }
}

fn fmt(v: f64) -> String {
    v.to_string()
}

fn csv_row(vals: impl Iterator<Item = f64>) -> String {
    vals.map(fmt).collect::<Vec<_>>().join(",")
}

// ---- subcommands --------------------------------------------------------

fn cmd_sample(args: SampleArgs) -> Result<ExitCode, GalError> {
    let sigma = parse_matrix(&args.sigma)?;
    let p = sigma.nrows();
    if let Some(flag_p) = args.p {
        if flag_p != p {
            return Err(GalError::DimensionMismatch(format!(
                "--p {flag_p} does not match sigma dimension {p}"
            )));
        }
    }
    let mu = match &args.mu {
        Some(text) => parse_vector(text)?,
        None => Array1::zeros(p),
    };
    let mut rng = RngStream::new(args.seed, args.stream);
    let samples = match args.sampler {
        SamplerKind::Mixture => {
            let s = args
                .s
                .ok_or_else(|| GalError::Domain("--s is required for the mixture sampler".into()))?;
            if args.d.is_some() || args.alpha.is_some() {
                return Err(GalError::Domain(
                    "--d/--alpha do not apply to the mixture sampler".into(),
                ));
            }
            let params = GalParams::new(sigma, mu, s)?;
            sample_mixture(&mut rng, &params, args.n)?
        }
        SamplerKind::MatrixProduct => {
            let d = args.d.ok_or_else(|| {
                GalError::Domain("--d is required for the matrix-product sampler".into())
            })?;
            if args.s.is_some() || args.alpha.is_some() {
                return Err(GalError::Domain(
                    "--s/--alpha do not apply to the matrix-product sampler".into(),
                ));
            }
            let mp = MatrixProductParams::new(sigma, mu, d, 1.0)?;
            sample_matrix_product(&mut rng, &mp, args.n)?
        }
        SamplerKind::Isotropic => {
            let d = args.d.ok_or_else(|| {
                GalError::Domain("--d is required for the isotropic sampler".into())
            })?;
            if args.s.is_some() {
                return Err(GalError::Domain(
                    "--s does not apply to the isotropic sampler".into(),
                ));
            }
            let mp = MatrixProductParams::new(sigma, mu, d, args.alpha.unwrap_or(1.0))?;
            sample_isotropic_product(&mut rng, &mp, args.n)?
        }
    };

    let text = match args.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            if args.header {
                let names: Vec<String> = (1..=samples.p()).map(|i| format!("x{i}")).collect();
                out.push_str(&names.join(","));
                out.push('\n');
            }
            for row in samples.data.rows() {
                out.push_str(&csv_row(row.iter().copied()));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Vec<String>> = samples
                .data
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|&v| fmt(v)).collect())
                .collect();
            let doc = json!({ "meta": samples.meta, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
            s.push('\n');
            s
        }
    };
    write_out(&text, args.output.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_pdf(args: PdfArgs) -> Result<ExitCode, GalError> {
    let params = GalParams::new(parse_matrix(&args.sigma)?, parse_vector(&args.mu)?, args.s)?;
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for text in &args.x {
        let x = parse_vector(text)?;
        let lp = dist::logpdf(&params, &x)?;
        lines.push(format!("{},{}", fmt(lp), fmt(lp.exp())));
        entries.push(json!({
            "x": x.iter().map(|&v| fmt(v)).collect::<Vec<_>>(),
            "log_pdf": fmt(lp),
            "pdf": fmt(lp.exp()),
        }));
    }
    let text = match args.format {
        OutputFormat::Csv => lines.join("\n") + "\n",
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::Value::Array(entries))
                .expect("serializable report");
            s.push('\n');
            s
        }
    };
    write_out(&text, args.output.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cf(args: CfArgs) -> Result<ExitCode, GalError> {
    let params = GalParams::new(parse_matrix(&args.sigma)?, parse_vector(&args.mu)?, args.s)?;
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for text in &args.u {
        let u = parse_vector(text)?;
        let v = dist::cf(&params, &u)?;
        lines.push(format!("{},{}", fmt(v.re), fmt(v.im)));
        entries.push(json!({
            "u": u.iter().map(|&t| fmt(t)).collect::<Vec<_>>(),
            "re": fmt(v.re),
            "im": fmt(v.im),
        }));
    }
    let text = match args.format {
        OutputFormat::Csv => lines.join("\n") + "\n",
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::Value::Array(entries))
                .expect("serializable report");
            s.push('\n');
            s
        }
    };
    write_out(&text, args.output.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_moments(args: MomentsArgs) -> Result<ExitCode, GalError> {
    let params = GalParams::new(parse_matrix(&args.sigma)?, parse_vector(&args.mu)?, args.s)?;
    let m = dist::moments(&params);
    let text = match args.format {
        OutputFormat::Csv => {
            // First line the mean, second the covariance row-major.
            let mean = csv_row(m.mean.iter().copied());
            let cov = csv_row(m.covariance.iter().copied());
            format!("{mean}\n{cov}\n")
        }
        OutputFormat::Json => {
            let doc = json!({
                "mean": m.mean.iter().map(|&v| fmt(v)).collect::<Vec<_>>(),
                "covariance": m.covariance
                    .rows()
                    .into_iter()
                    .map(|r| r.iter().map(|&v| fmt(v)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
            s.push('\n');
            s
        }
    };
    write_out(&text, args.output.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

// ---- verification suites ------------------------------------------------

struct Battery {
    energy: verify::TwoSampleReport,
    ecf: verify::EcfReport,
    moments: verify::MomentReport,
}

impl Battery {
    fn pass(&self) -> bool {
        self.energy.pass && self.ecf.pass && self.moments.pass
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "energy": serde_json::to_value(&self.energy).expect("serializable"),
            "ecf": serde_json::to_value(&self.ecf).expect("serializable"),
            "moments": serde_json::to_value(&self.moments).expect("serializable"),
        })
    }
}

/// Shared check battery: energy two-sample test between `a` and `b`, plus
/// ECF and moment checks of `a` against the analytic `target`.
fn run_battery(
    a: &SampleMatrix,
    b: &SampleMatrix,
    target: &GalParams,
    perm_rng: &RngStream,
    permutations: usize,
) -> Result<Battery, GalError> {
    let energy = verify::energy_distance_test(a, b, perm_rng, permutations)?;
    let ecf = verify::ecf_check(a, target, &verify::default_ecf_grid(target.p()))?;
    let moments = verify::moment_zscores(a, target)?;
    Ok(Battery { energy, ecf, moments })
}

fn finish_verify(suite: &str, pass: bool, body: serde_json::Value) -> Result<ExitCode, GalError> {
    let doc = json!({ "suite": suite, "pass": pass, "checks": body });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
    s.push('\n');
    write_out(&s, None)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(suite: VerifySuite) -> Result<ExitCode, GalError> {
    match suite {
        VerifySuite::TheoremMain { p, d, n, seed, permutations } => {
            let sigma = verify::preset_sigma(p);
            let mu = verify::preset_mu(p);
            let mp = MatrixProductParams::new(sigma.clone(), mu.clone(), d, 1.0)?;
            let target = GalParams::new(
                sigma.mapv(|v| 2.0 * v),
                mu.mapv(|v| 2.0 * v),
                d as f64 / 2.0,
            )?;
            let a = sample_matrix_product(&mut RngStream::new(seed, 1), &mp, n)?;
            let b = sample_mixture(&mut RngStream::new(seed, 2), &target, n)?;
            let battery = run_battery(&a, &b, &target, &RngStream::new(seed, 3), permutations)?;
            finish_verify("theorem-main", battery.pass(), battery.to_json())
        }
        VerifySuite::CorollaryPca { p, d, alpha, n, seed, permutations } => {
            let sigma = verify::preset_sigma(p);
            let mp = MatrixProductParams::new(sigma.clone(), Array1::zeros(p), d, alpha)?;
            let target = GalParams::new(
                sigma.mapv(|v| 2.0 * alpha * v),
                Array1::zeros(p),
                d as f64 / 2.0,
            )?;
            let a = sample_isotropic_product(&mut RngStream::new(seed, 1), &mp, n)?;
            let b = sample_mixture(&mut RngStream::new(seed, 2), &target, n)?;
            let battery = run_battery(&a, &b, &target, &RngStream::new(seed, 3), permutations)?;
            finish_verify("corollary-pca", battery.pass(), battery.to_json())
        }
        VerifySuite::Convolution { s1, s2, n, seed, permutations } => {
            let sigma = verify::preset_sigma(2);
            let mu = verify::preset_mu(2);
            let pa = GalParams::new(sigma.clone(), mu.clone(), s1)?;
            let pb = GalParams::new(sigma.clone(), mu.clone(), s2)?;
            let conv = dist::convolve_params(&pa, &pb)?;

            let za = sample_mixture(&mut RngStream::new(seed, 1), &pa, n)?;
            let zb = sample_mixture(&mut RngStream::new(seed, 2), &pb, n)?;
            let summed = SampleMatrix {
                data: &za.data + &zb.data,
                meta: SampleMeta {
                    sampler: "convolution-sum".into(),
                    params: format!("GAL(s={s1}) + GAL(s={s2})"),
                    seed,
                    stream: 1,
                },
            };
            let direct = sample_mixture(&mut RngStream::new(seed, 3), &conv, n)?;
            let battery =
                run_battery(&summed, &direct, &conv, &RngStream::new(seed, 4), permutations)?;

            // Analytic identity: cf(conv) = cf(a) cf(b) on the grid.
            let grid = verify::default_ecf_grid(2);
            let mut max_dev = 0.0f64;
            for u in &grid {
                let lhs = dist::cf(&conv, u)?;
                let rhs = dist::cf(&pa, u)? * dist::cf(&pb, u)?;
                max_dev = max_dev.max((lhs - rhs).norm());
            }
            let cf_pass = max_dev <= 1e-12;
            let pass = battery.pass() && cf_pass;
            let mut body = battery.to_json();
            body["cf_product"] = json!({
                "max_abs_dev": max_dev.to_string(),
                "bound": "1e-12",
                "pass": cf_pass,
            });
            finish_verify("convolution", pass, body)
        }
        VerifySuite::LaplaceReduction { d, b, n, seed } => {
            // Analytic reduction: GAL_1(2b^2, 0, 1) is Laplace(b).
            let mut max_rel = 0.0f64;
            for &scale in &[0.5, 1.0, 3.0] {
                let params = GalParams::new(
                    Array2::from_elem((1, 1), 2.0 * scale * scale),
                    Array1::zeros(1),
                    1.0,
                )?;
                for i in 0..=200 {
                    let x = -10.0 + i as f64 * 0.1;
                    let got = dist::logpdf(&params, &Array1::from_vec(vec![x]))?.exp();
                    let want = (-x.abs() / scale).exp() / (2.0 * scale);
                    max_rel = max_rel.max((got - want).abs() / want);
                }
            }
            let analytic_pass = max_rel <= 1e-10;

            // Wishart special case: matrix-product samples with p = 1 and
            // sigma = b^2 follow GAL_1(2 b^2, 0, d/2); d = 2 is Laplace(b).
            let mp = MatrixProductParams::new(
                Array2::from_elem((1, 1), b * b),
                Array1::zeros(1),
                d,
                1.0,
            )?;
            let samples = sample_matrix_product(&mut RngStream::new(seed, 1), &mp, n)?;
            let ks = verify::ks_laplace_test(&samples, b)?;
            let pass = analytic_pass && ks.pass;
            finish_verify(
                "laplace-reduction",
                pass,
                json!({
                    "analytic_grid": {
                        "max_rel_err": max_rel.to_string(),
                        "bound": "1e-10",
                        "pass": analytic_pass,
                    },
                    "ks": serde_json::to_value(&ks).expect("serializable"),
                }),
            )
        }
        VerifySuite::Moments { n, seed } => {
            let mut checks = Vec::new();
            let mut pass = true;

            // Mixture sampler, two parameter sets.
            let sets = [
                GalParams::new(Array2::eye(2), Array1::from_vec(vec![1.0, 0.0]), 2.0)?,
                GalParams::new(verify::preset_sigma(2), verify::preset_mu(2), 1.5)?,
            ];
            for (i, params) in sets.iter().enumerate() {
                let s = sample_mixture(&mut RngStream::new(seed, 10 + i as u64), params, n)?;
                let report = verify::moment_check(&s, params)?;
                pass &= report.pass;
                checks.push(json!({
                    "sampler": "mixture",
                    "set": i,
                    "report": serde_json::to_value(&report).expect("serializable"),
                }));
            }

            // Matrix-product sampler against GAL(2 sigma, 2 mu, d/2).
            let sigma = verify::preset_sigma(2);
            let mu = verify::preset_mu(2);
            let mp = MatrixProductParams::new(sigma.clone(), mu.clone(), 5, 1.0)?;
            let target = GalParams::new(sigma.mapv(|v| 2.0 * v), mu.mapv(|v| 2.0 * v), 2.5)?;
            let s = sample_matrix_product(&mut RngStream::new(seed, 20), &mp, n)?;
            let report = verify::moment_check(&s, &target)?;
            pass &= report.pass;
            checks.push(json!({
                "sampler": "matrix-product",
                "set": 2,
                "report": serde_json::to_value(&report).expect("serializable"),
            }));

            // Isotropic sampler against GAL(2 alpha sigma, 0, d/2).
            let sigma3 = verify::preset_sigma(3);
            let mp = MatrixProductParams::new(sigma3.clone(), Array1::zeros(3), 6, 2.0)?;
            let target = GalParams::new(sigma3.mapv(|v| 4.0 * v), Array1::zeros(3), 3.0)?;
            let s = sample_isotropic_product(&mut RngStream::new(seed, 21), &mp, n)?;
            let report = verify::moment_check(&s, &target)?;
            pass &= report.pass;
            checks.push(json!({
                "sampler": "isotropic",
                "set": 3,
                "report": serde_json::to_value(&report).expect("serializable"),
            }));

            finish_verify("moments", pass, serde_json::Value::Array(checks))
        }
        VerifySuite::KsLaplace { b, input } => {
            let mut text = String::new();
            if input == "-" {
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| GalError::Domain(format!("cannot read stdin: {e}")))?;
            } else {
                text = std::fs::read_to_string(&input)
                    .map_err(|e| GalError::Domain(format!("cannot read {input}: {e}")))?;
            }
            let values: Vec<f64> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    l.trim()
                        .parse::<f64>()
                        .map_err(|_| GalError::Domain(format!("cannot parse sample line '{l}'")))
                })
                .collect::<Result<_, _>>()?;
            if values.is_empty() {
                return Err(GalError::Domain("no samples provided".into()));
            }
            let n = values.len();
            let samples = SampleMatrix {
                data: Array2::from_shape_vec((n, 1), values)
                    .expect("shape matches by construction"),
                meta: SampleMeta {
                    sampler: "external".into(),
                    params: format!("ks-laplace input b={b}"),
                    seed: 0,
                    stream: 0,
                },
            };
            let ks = verify::ks_laplace_test(&samples, b)?;
            finish_verify(
                "ks-laplace",
                ks.pass,
                json!({ "ks": serde_json::to_value(&ks).expect("serializable") }),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_matrix_identity_and_rows() {
        assert_eq!(parse_matrix("I2").unwrap(), Array2::<f64>::eye(2));
        let m = parse_matrix("4,2;2,5").unwrap();
        assert_eq!(m[(0, 0)], 4.0);
        assert_eq!(m[(1, 0)], 2.0);
        let m = parse_matrix("2").unwrap();
        assert_eq!(m.nrows(), 1);
        assert!(parse_matrix("1,2;3").is_err());
        assert!(parse_matrix("1,2,3;4,5,6").is_err());
    }

    #[test]
    fn parse_vector_handles_negatives() {
        let v = parse_vector("0.5,-1").unwrap();
        assert_eq!(v.to_vec(), vec![0.5, -1.0]);
        assert!(parse_vector("a,b").is_err());
    }
}
