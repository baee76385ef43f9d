use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use anomcheck::anomaly::{
    self, numeric_reports, run_suite, self_test, summarize, theta_four_reports, verify_identity,
    CheckStatus, EulerChoice, RankSpec, Target, VerificationConfig, VerificationReport, XiMode,
};
use anomcheck::charclass::{
    theta1_expansion, theta2_expansion, AtomKind, BundleExpr, EulerMode, GenusSpec,
};
use anomcheck::modforms::{decompose_weight6, ModularBasis};
use anomcheck::build_p2;

/// Exact checker for anomaly-factorization identities: truncated
/// polynomial rings over the rationals, q-series with graded coefficients,
/// and weight-6 modular-form decompositions.
#[derive(Parser)]
#[command(name = "anomcheck", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: CommonOpts,
}

#[derive(Args)]
struct CommonOpts {
    /// Truncation degree of the polynomial ring (even, >= 12).
    #[arg(long, default_value_t = 12, global = true)]
    max_degree: u32,

    /// Number of retained half-exponent q-coefficients.
    #[arg(long, default_value_t = 12, global = true)]
    q_order: u32,

    /// Bundle ranks: `symbolic` or `m=INT,n=INT`.
    #[arg(long, default_value = "symbolic", global = true)]
    ranks: String,

    /// Rank-2 twist bundle: generic Euler class or trivial.
    #[arg(long, value_enum, default_value_t = XiArg::Generic, global = true)]
    xi: XiArg,

    /// Which Euler-factor closed form(s) to run.
    #[arg(long, value_enum, default_value_t = EulerArg::Both, global = true)]
    euler_mode: EulerArg,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Evaluation point for the numeric checks, as `RE,IM` (upper half
    /// plane).  Default: both i and 0.1+1.2i.
    #[arg(long, global = true)]
    tau: Option<String>,

    /// Numeric tolerance (default 1e-9 for theta laws, 1e-6 for E2).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of product terms in the numeric theta evaluations.
    #[arg(long, default_value_t = 64, global = true)]
    terms: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum XiArg {
    Generic,
    Trivial,
}

#[derive(Clone, Copy, ValueEnum)]
enum EulerArg {
    Cosh,
    Exp,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one identity or the whole suite.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Print a q-expansion or genus polynomial.
    Expand {
        #[arg(value_enum)]
        what: ExpandWhat,
    },
    /// Decompose the weight-6 series against its modular basis and print
    /// the coordinates.
    Decompose {
        #[arg(value_enum)]
        what: DecomposeWhat,
    },
    /// Floating-point spot checks of the transformation laws, or the exact
    /// theta^4 identities.
    Numeric {
        #[arg(value_enum)]
        what: NumericWhat,
    },
    /// Inject deliberate faults and confirm every one is caught.
    SelfTest,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    All,
    Theorem1,
    Cor1,
    Cor2,
    Cor3,
    Gs,
    Sw,
    Agw,
    Remark,
    P2Modularity,
    P1Modularity,
    CoeffEqs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpandWhat {
    Theta2,
    Theta1,
    P2,
    Ahat,
    Lgenus,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecomposeWhat {
    P2,
}

#[derive(Clone, Copy, ValueEnum)]
enum NumericWhat {
    Transforms,
    Theta4,
}

fn parse_ranks(s: &str) -> Result<RankSpec, String> {
    if s.trim() == "symbolic" {
        return Ok(RankSpec::Symbolic);
    }
    let mut m = None;
    let mut n = None;
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `m=INT,n=INT`, got `{s}`"))?;
        let v: u32 = value
            .trim()
            .parse()
            .map_err(|_| format!("rank `{value}` is not a non-negative integer"))?;
        match key.trim() {
            "m" => m = Some(v),
            "n" => n = Some(v),
            other => return Err(format!("unknown rank `{other}`")),
        }
    }
    match (m, n) {
        (Some(m), Some(n)) => Ok(RankSpec::Concrete { m, n }),
        _ => Err(format!("expected both ranks in `{s}`")),
    }
}

fn parse_tau(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `RE,IM`, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part `{re}`"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part `{im}`"))?;
    Ok(Complex64::new(re, im))
}

fn config_from(opts: &CommonOpts) -> Result<VerificationConfig, String> {
    let config = VerificationConfig {
        ranks: parse_ranks(&opts.ranks)?,
        xi: match opts.xi {
            XiArg::Generic => XiMode::Generic,
            XiArg::Trivial => XiMode::Trivial,
        },
        euler: match opts.euler_mode {
            EulerArg::Cosh => EulerChoice::Cosh,
            EulerArg::Exp => EulerChoice::Exp,
            EulerArg::Both => EulerChoice::Both,
        },
        max_degree: opts.max_degree,
        q_order: opts.q_order,
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn render_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "INFO",
        };
        out.push_str(&format!(
            "{status}  {:<28} {} [euler={}, ranks={}]",
            r.check_id, r.paper_target, r.euler_mode, r.ranks
        ));
        if let Some(t) = r.residual_terms {
            out.push_str(&format!("  residual_terms={t}"));
        }
        if let (Some(res), Some(tol)) = (r.residual_max, r.tolerance) {
            out.push_str(&format!("  residual={res:.3e} (tol {tol:.1e})"));
        }
        out.push_str(&format!("  [{} ms]\n", r.elapsed_ms));
        if let Some(note) = &r.note {
            out.push_str(&format!("      note: {note}\n"));
        }
        for line in &r.residual_sample {
            out.push_str(&format!("      residual term: {line}\n"));
        }
    }
    let s = summarize(reports);
    out.push_str(&format!(
        "{} checks: {} passed, {} failed, {} informational\n",
        s.total, s.passed, s.failed, s.info
    ));
    out
}

#[derive(serde::Serialize)]
struct ReportDocument<'a> {
    reports: &'a [VerificationReport],
    summary: anomaly::SuiteSummary,
}

fn render_json(reports: &[VerificationReport]) -> String {
    let doc = ReportDocument {
        reports,
        summary: summarize(reports),
    };
    serde_json::to_string_pretty(&doc).expect("report serialization cannot fail") + "\n"
}

fn emit(opts: &CommonOpts, text: String) -> Result<(), String> {
    match &opts.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            f.write_all(text.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
    }
}

fn emit_reports(opts: &CommonOpts, reports: &[VerificationReport]) -> Result<bool, String> {
    let text = match opts.format {
        FormatArg::Text => render_text(reports),
        FormatArg::Json => render_json(reports),
    };
    emit(opts, text)?;
    Ok(reports.iter().all(|r| r.status != CheckStatus::Fail))
}

/// The bundle geometry implied by the common flags, for `expand` and
/// `decompose`.
fn set_from(config: &VerificationConfig) -> anomcheck::Result<anomcheck::BundleSet> {
    anomaly::configured_set(config)
}

fn euler_mode_from(opts: &CommonOpts) -> EulerMode {
    match opts.euler_mode {
        EulerArg::Exp => EulerMode::ExpHalf,
        _ => EulerMode::CoshHalf,
    }
}

fn series_lines(s: &anomcheck::QSeries<anomcheck::GradedElement>) -> Vec<(String, String)> {
    let mut lines = Vec::new();
    for h in 0..s.order() {
        let v = s.coefficient(h).expect("h < order");
        if !v.is_zero() || h == 0 {
            lines.push((format!("q^({h}/2)"), v.to_string()));
        }
    }
    lines
}

fn emit_series(
    opts: &CommonOpts,
    title: &str,
    lines: Vec<(String, String)>,
) -> Result<(), String> {
    match opts.format {
        FormatArg::Text => {
            let mut out = format!("{title}\n");
            for (k, v) in &lines {
                out.push_str(&format!("  {k}: {v}\n"));
            }
            emit(opts, out)
        }
        FormatArg::Json => {
            let map: Vec<serde_json::Value> = lines
                .iter()
                .map(|(k, v)| serde_json::json!({"exponent": k, "value": v}))
                .collect();
            let value = serde_json::json!({"series": title, "coefficients": map});
            emit(
                opts,
                serde_json::to_string_pretty(&value).expect("serialization cannot fail") + "\n",
            )
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let opts = &cli.opts;
    let config = config_from(opts)?;
    match &cli.command {
        Command::Verify { target } => {
            let reports = match target {
                VerifyTarget::All => run_suite(&config),
                VerifyTarget::Theorem1 => verify_identity(Target::Theorem1, &config),
                VerifyTarget::Cor1 => verify_identity(Target::Cor1, &config),
                VerifyTarget::Cor2 => verify_identity(Target::Cor2, &config),
                VerifyTarget::Cor3 => verify_identity(Target::Cor3, &config),
                VerifyTarget::Gs => verify_identity(Target::Gs, &config),
                VerifyTarget::Sw => verify_identity(Target::Sw, &config),
                VerifyTarget::Agw => verify_identity(Target::Agw, &config),
                VerifyTarget::Remark => verify_identity(Target::Remark, &config),
                VerifyTarget::P2Modularity => verify_identity(Target::P2Modularity, &config),
                VerifyTarget::P1Modularity => verify_identity(Target::P1Modularity, &config),
                VerifyTarget::CoeffEqs => verify_identity(Target::CoeffEqs, &config),
            }
            .map_err(|e| e.to_string())?;
            emit_reports(opts, &reports)
        }
        Command::Expand { what } => {
            match what {
                ExpandWhat::Theta2 => {
                    let set = set_from(&config).map_err(|e| e.to_string())?;
                    let s = theta2_expansion(&set, config.q_order).map_err(|e| e.to_string())?;
                    emit_series(opts, "ch Theta (half exponents)", series_lines(&s))?;
                }
                ExpandWhat::Theta1 => {
                    let set = set_from(&config).map_err(|e| e.to_string())?;
                    let v = BundleExpr::atom(AtomKind::F1) - BundleExpr::atom(AtomKind::F2);
                    let s = theta1_expansion(&set, &v, config.q_order).map_err(|e| e.to_string())?;
                    emit_series(opts, "ch Theta (whole exponents)", series_lines(&s))?;
                }
                ExpandWhat::P2 => {
                    let set = set_from(&config).map_err(|e| e.to_string())?;
                    let s = build_p2(&set, euler_mode_from(opts), config.q_order)
                        .map_err(|e| e.to_string())?;
                    emit_series(opts, "weight-6 series (degree-12 part)", series_lines(&s))?;
                }
                ExpandWhat::Ahat => {
                    let set = set_from(&config).map_err(|e| e.to_string())?;
                    let g = GenusSpec::a_hat(config.max_degree)
                        .genus_form(set.atom(AtomKind::Tz))
                        .map_err(|e| e.to_string())?;
                    emit_series(opts, "A-hat genus", vec![("value".into(), g.to_string())])?;
                }
                ExpandWhat::Lgenus => {
                    let set = set_from(&config).map_err(|e| e.to_string())?;
                    let g = GenusSpec::l_genus(config.max_degree)
                        .genus_form(set.atom(AtomKind::Tz))
                        .map_err(|e| e.to_string())?;
                    emit_series(opts, "L genus", vec![("value".into(), g.to_string())])?;
                }
            }
            Ok(true)
        }
        Command::Decompose { what: DecomposeWhat::P2 } => {
            let set = set_from(&config).map_err(|e| e.to_string())?;
            let s = build_p2(&set, euler_mode_from(opts), config.q_order)
                .map_err(|e| e.to_string())?;
            let dec =
                decompose_weight6(&s, ModularBasis::HalfIntegral).map_err(|e| e.to_string())?;
            let ok = dec.residual.is_zero();
            let lines = vec![
                ("basis".to_string(), dec.basis.label().to_string()),
                ("h0".to_string(), dec.h0.to_string()),
                ("h1".to_string(), dec.h1.to_string()),
                (
                    "residual".to_string(),
                    if ok { "0".to_string() } else { dec.residual.to_string() },
                ),
            ];
            emit_series(opts, "weight-6 decomposition", lines)?;
            Ok(ok)
        }
        Command::Numeric { what } => {
            let reports = match what {
                NumericWhat::Theta4 => theta_four_reports(&config),
                NumericWhat::Transforms => {
                    let tol_theta = opts.tol.unwrap_or(1e-9);
                    let tol_e2 = opts.tol.unwrap_or(1e-6);
                    let v = Complex64::new(0.3, 0.1);
                    let taus: Vec<Complex64> = match &opts.tau {
                        Some(s) => vec![parse_tau(s)?],
                        None => {
                            vec![Complex64::new(0.0, 1.0), Complex64::new(0.1, 1.2)]
                        }
                    };
                    let mut all = Vec::new();
                    for tau in taus {
                        all.extend(
                            numeric_reports(tau, v, opts.terms, tol_theta, tol_e2, &config)
                                .map_err(|e| e.to_string())?
                                .into_iter()
                                .map(|mut r| {
                                    r.ranks = format!("tau={}+{}i", tau.re, tau.im);
                                    r
                                }),
                        );
                    }
                    all
                }
            };
            emit_reports(opts, &reports)
        }
        Command::SelfTest => {
            let reports = self_test(&config).map_err(|e| e.to_string())?;
            emit_reports(opts, &reports)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
