//! `densitylab`: upper Buck density bounds, density estimates and smallness
//! certificates for integer sets described in JSON.

mod demos;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use densitylab::certify::{self, CertifyError, SmallnessCertificate};
use densitylab::density::{buck_upper_with, BuckOptions, DEFAULT_DEPTH};
use densitylab::estimators::{self, Windows};
use densitylab::numtheory::{nonresidue_cover, sieve_primes};
use densitylab::quadform::{classify_form, form_smallness_certificate, FormError};
use densitylab::setspec::{Ambient, Node, SetSpec};

#[derive(Parser)]
#[command(name = "densitylab", version, about = "Residue-class density bounds and smallness certificates")]
struct Cli {
    /// Ambient for specs that do not name one (and override for those that do).
    #[arg(long, global = true, value_enum)]
    ambient: Option<AmbientArg>,
    /// Aligned tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbientArg {
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "Z", alias = "z")]
    Z,
}

impl From<AmbientArg> for Ambient {
    fn from(a: AmbientArg) -> Self {
        match a {
            AmbientArg::N => Ambient::NonNegative,
            AmbientArg::Z => Ambient::AllIntegers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Upper Buck density bound inf_k r_k / k over the lcm(1..n) ladder.
    Buck {
        /// Set spec: inline JSON or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u64,
        /// Further moduli to include in the profile, comma separated.
        #[arg(long, value_delimiter = ',')]
        extra_moduli: Vec<u64>,
    },
    /// Finite-window estimates of other upper densities.
    Estimate {
        /// Set spec: inline JSON or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = EstimateMethod::All)]
        method: EstimateMethod,
        /// Exponent for the alpha method.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        alpha_n: Option<u64>,
        #[arg(long)]
        banach_len: Option<u64>,
        #[arg(long)]
        banach_bound: Option<u64>,
        #[arg(long)]
        analytic_bound: Option<u64>,
        #[arg(long)]
        polya_n: Option<u64>,
    },
    /// Build a smallness certificate.
    Certify {
        /// Set spec: inline JSON or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = CriterionArg::Auto)]
        criterion: CriterionArg,
        /// `prime-squares`, `primes` (moduli up to the budget) or a comma
        /// separated list.
        #[arg(long)]
        moduli: Option<String>,
        /// Prime bound for structural criteria; modulus bound for `--moduli` schemes.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Largest acceptable product bound, as a decimal or `p/q`.
        #[arg(long, default_value = "0.01")]
        epsilon: String,
        /// Primorial index, digit block count: the single-modulus parameter.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Re-check a certificate against a spec.
    Verify {
        /// Set spec: inline JSON or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Discriminant case of a x^2 + b xy + c y^2.
    ClassifyForm {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
    },
    /// Modulus and class of primes modulo which d is a non-residue.
    NonresidueCover {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        /// Number of class primes to check.
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
    /// Run a named reproduction.
    Demo {
        name: String,
    },
    ListDemos,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimateMethod {
    All,
    Alpha,
    Banach,
    Analytic,
    Polya,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Auto,
    CoprimeProduct,
    PerfectPowers,
    Form,
    PolyImage,
    PolyPrimePreimage,
    Chain,
    DigitBlocks,
    Omega,
}

/// Why a command produced no successful result.
enum Failure {
    /// Bad input; exit 2, nothing on standard output.
    Usage(anyhow::Error),
    /// The claim under test failed; exit 1, with an optional report.
    Rejected { message: String, report: Option<String> },
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn read_spec(arg: &str, ambient: Option<AmbientArg>) -> anyhow::Result<SetSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg.strip_prefix('@').unwrap_or(arg)).with_context(|| format!("reading spec {arg}"))?
    };
    let spec = SetSpec::from_json_with_default(&text, Ambient::NonNegative)?;
    Ok(match ambient {
        Some(a) => spec.with_ambient(a.into())?,
        None => spec,
    })
}

fn parse_rational(s: &str) -> anyhow::Result<BigRational> {
    let bad = || anyhow!("cannot read {s:?} as a rational");
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (BigInt, BigInt) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        if q == BigInt::from(0) {
            bail!("zero denominator in {s:?}");
        }
        return Ok(BigRational::new(p, q));
    }
    let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)))
}

fn moduli_list(scheme: &str, budget: u64) -> anyhow::Result<Vec<u64>> {
    Ok(match scheme {
        "prime-squares" => sieve_primes(budget).into_iter().map(|p| p * p).take_while(|&k| k <= budget).collect(),
        "primes" => sieve_primes(budget),
        list => list
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| anyhow!("bad modulus {t:?}")))
            .collect::<anyhow::Result<_>>()?,
    })
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<serde_json::Value> {
    Ok(serde_json::to_value(value)?)
}

fn certify_failure(e: CertifyError) -> Failure {
    match e {
        CertifyError::BoundNotReached { .. } | CertifyError::NoUsablePrimes(_) => {
            Failure::Rejected { message: e.to_string(), report: None }
        }
        other => Failure::Usage(other.into()),
    }
}

fn form_failure(e: FormError) -> Failure {
    match e {
        FormError::Certify(c) => certify_failure(c),
        FormError::BudgetExhausted(_) => Failure::Rejected { message: e.to_string(), report: None },
        other => Failure::Usage(other.into()),
    }
}

fn certify_cmd(
    spec: &SetSpec,
    criterion: CriterionArg,
    moduli: Option<&str>,
    budget: u64,
    eps: &BigRational,
    n: Option<u64>,
) -> Result<SmallnessCertificate, Failure> {
    let criterion = match (criterion, moduli) {
        (CriterionArg::Auto, Some(_)) => CriterionArg::CoprimeProduct,
        (CriterionArg::Auto, None) => match &spec.node {
            Node::PerfectPowers => CriterionArg::PerfectPowers,
            Node::QuadFormValues { .. } => CriterionArg::Form,
            Node::PolyImage { .. } => CriterionArg::PolyImage,
            Node::PolyPrimePreimage { .. } => CriterionArg::PolyPrimePreimage,
            Node::DivisibilityChain { .. } => CriterionArg::Chain,
            Node::DigitAvoider { .. } => CriterionArg::DigitBlocks,
            Node::OmegaExact { .. } | Node::OmegaAtMost { .. } => CriterionArg::Omega,
            _ => return Err(Failure::Usage(anyhow!("no structural criterion for this spec; pass --moduli"))),
        },
        (c, _) => c,
    };
    let need_n = || n.ok_or_else(|| Failure::Usage(anyhow!("this criterion needs --n")));
    let mismatch = || Failure::Usage(anyhow!("the set spec does not fit the chosen criterion"));
    match criterion {
        CriterionArg::CoprimeProduct => {
            let list = moduli_list(moduli.unwrap_or("prime-squares"), budget)?;
            certify::smallness_certificate(spec, &list, eps).map_err(certify_failure)
        }
        CriterionArg::PerfectPowers => match spec.node {
            Node::PerfectPowers => {
                certify::perfect_powers_certificate(spec.ambient, budget, eps).map_err(certify_failure)
            }
            _ => Err(mismatch()),
        },
        CriterionArg::Form => match spec.node {
            Node::QuadFormValues { a, b, c } => {
                form_smallness_certificate(a, b, c, spec.ambient, budget, eps).map_err(form_failure)
            }
            _ => Err(mismatch()),
        },
        CriterionArg::PolyImage => match &spec.node {
            Node::PolyImage { coeffs } => certify::poly_image_certificate(coeffs, spec.ambient, budget, eps)
                .map(|r| r.certificate)
                .map_err(certify_failure),
            _ => Err(mismatch()),
        },
        CriterionArg::PolyPrimePreimage => match &spec.node {
            Node::PolyPrimePreimage { coeffs } => {
                certify::poly_prime_preimage_certificate(coeffs, spec.ambient, budget, eps).map_err(certify_failure)
            }
            _ => Err(mismatch()),
        },
        CriterionArg::Chain => certify::chain_certificate(spec, eps).map_err(certify_failure),
        CriterionArg::DigitBlocks => certify::digit_certificate(spec, need_n()? as u32, eps).map_err(certify_failure),
        CriterionArg::Omega => certify::omega_certificate(spec, need_n()? as usize, eps).map_err(certify_failure),
        CriterionArg::Auto => unreachable!("resolved above"),
    }
}

/// Runs one command and returns the text for standard output.
fn run(cli: &Cli) -> Result<String, Failure> {
    let report = |value: serde_json::Value| -> String {
        if cli.pretty {
            render::pretty(&value)
        } else {
            serde_json::to_string_pretty(&value).expect("json values serialize") + "\n"
        }
    };
    Ok(match &cli.command {
        Command::Buck { spec, depth, extra_moduli } => {
            let spec = read_spec(spec, cli.ambient)?;
            let opts = BuckOptions { extra_moduli: extra_moduli.clone(), ..BuckOptions::depth(*depth) };
            report(json(&buck_upper_with(&spec, &opts).map_err(anyhow::Error::from)?)?)
        }
        Command::Estimate {
            spec,
            method,
            alpha,
            format,
            alpha_n,
            banach_len,
            banach_bound,
            analytic_bound,
            polya_n,
        } => {
            let spec = read_spec(spec, cli.ambient)?;
            let d = Windows::default();
            let w = Windows {
                alpha_n: alpha_n.unwrap_or(d.alpha_n),
                banach_len: banach_len.unwrap_or(d.banach_len),
                banach_bound: banach_bound.unwrap_or(d.banach_bound),
                analytic_bound: analytic_bound.unwrap_or(d.analytic_bound),
                polya_n: polya_n.unwrap_or(d.polya_n),
                ..d
            };
            let est = match method {
                EstimateMethod::All => estimators::all_estimates(&spec, &w),
                EstimateMethod::Alpha => estimators::alpha_density_upper(&spec, *alpha, w.alpha_n).map(|e| vec![e]),
                EstimateMethod::Banach => {
                    estimators::banach_upper(&spec, w.banach_len, w.banach_bound).map(|e| vec![e])
                }
                EstimateMethod::Analytic => {
                    estimators::analytic_upper(&spec, &w.analytic_s, w.analytic_bound).map(|e| vec![e])
                }
                EstimateMethod::Polya => estimators::polya_upper(&spec, &w.polya_s, w.polya_n).map(|e| vec![e]),
            }
            .map_err(anyhow::Error::from)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    estimators::write_csv(&est, &mut buf).map_err(anyhow::Error::from)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => report(json(&est)?),
            }
        }
        Command::Certify { spec, criterion, moduli, budget, epsilon, n } => {
            let spec = read_spec(spec, cli.ambient)?;
            let eps = parse_rational(epsilon)?;
            let cert = certify_cmd(&spec, *criterion, moduli.as_deref(), *budget, &eps, *n)?;
            cert.to_json() + "\n"
        }
        Command::Verify { spec, cert } => {
            let spec = read_spec(spec, cli.ambient)?;
            let text = std::fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
            let cert = SmallnessCertificate::from_json(&text).map_err(anyhow::Error::from)?;
            match certify::verify_certificate(&cert, &spec) {
                Ok(r) if r.valid => report(json(&r)?),
                Ok(r) => {
                    let message = r.first_failure.clone().unwrap_or_default();
                    return Err(Failure::Rejected { message, report: Some(report(json(&r)?)) });
                }
                Err(e) => return Err(Failure::Rejected { message: e.to_string(), report: None }),
            }
        }
        Command::ClassifyForm { a, b, c } => {
            let ambient = cli.ambient.map(Ambient::from).unwrap_or(Ambient::NonNegative);
            report(json(&classify_form(*a, *b, *c, ambient).map_err(anyhow::Error::from)?)?)
        }
        Command::NonresidueCover { d, budget } => {
            report(json(&nonresidue_cover(*d, *budget).map_err(anyhow::Error::from)?)?)
        }
        Command::Demo { name } => {
            let demo = demos::find(name).ok_or_else(|| anyhow!("unknown demo {name:?}; see list-demos"))?;
            let value = (demo.run)().map_err(Failure::Usage)?;
            let ok = value.get("holds").and_then(|v| v.as_bool()).unwrap_or(true);
            let text = report(serde_json::json!({ "demo": demo.name, "claim": demo.claim, "result": value }));
            if !ok {
                return Err(Failure::Rejected {
                    message: format!("demo {name}: claim does not hold"),
                    report: Some(text),
                });
            }
            text
        }
        Command::ListDemos => report(json(
            &demos::DEMOS.iter().map(|d| serde_json::json!({ "name": d.name, "claim": d.claim })).collect::<Vec<_>>(),
        )?),
    })
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("DENSITYLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a failure here only means the pool was already configured
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Rejected { message, report }) => {
            if let Some(text) = report {
                if let Err(e) = emit(&cli, &text) {
                    eprintln!("error: {e:#}");
                }
            }
            eprintln!("rejected: {message}");
            ExitCode::from(1)
        }
    }
}
