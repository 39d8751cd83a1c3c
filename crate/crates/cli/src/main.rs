//! `qlat`, the command-line front end for the quadratic lattice-point toolkit.
//!
//! One subcommand per library operation; every output row carries the inputs,
//! the outputs, completeness flags, a schema version and the tool version.
//! Identical invocations produce byte-identical output regardless of the
//! worker count. Exit codes: 0 success, 1 invalid configuration or input,
//! 2 internal assertion failure.

mod output;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use output::{base_row, write_rows, Format, Row};
use qlat_core::arcs::{
    self, arc_count, bugeaud_bound, census_row, max_arc_count, pattern_at, pattern_family,
    pell_relation_check, BugeaudParams, PatternSpec, RegimeContext,
};
use qlat_core::dfi::{
    apply_operator, c0_counterexample, pj_consistency, s_lambda_sum, sharpness_witness, DfiParams,
    FiniteSignal,
};
use qlat_core::qform::{factor_square_disc, representations, FormClass, QuadForm};
use qlat_core::reduce::{gamma_solvable, reduce_poly, QuadPoly};
use qlat_core::sieve::{
    default_q_level, jacobi_symbol, large_sieve_bound, nonresidue_prime_classes, perron_count,
    perron_formula, representable_count_exact, strip_sum, SieveQuery, SieveSystem,
};
use qlat_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad input data: exit 1.
    Config(String),
    /// A broken invariant inside the toolkit: exit 2.
    Internal(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Internal(msg) => CliError::Internal(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qlat",
    version,
    about = "Exact scans over quadratic forms, fractional integral sums, residue sieves, and lattice points on short arcs"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json-lines")]
    format: Format,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for range scans; the QLAT_WORKERS environment variable
    /// overrides this flag.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant and class of a binary quadratic form.
    Classify {
        /// Coefficients a,b,c of a m^2 + b m n + c n^2.
        #[arg(long)]
        form: String,
    },
    /// Linear-factor data of a square-discriminant form.
    Factor {
        #[arg(long)]
        form: String,
    },
    /// Representations of an integer by a form.
    #[command(allow_negative_numbers = true)]
    Reps {
        #[arg(long)]
        form: String,
        #[arg(long)]
        k: i128,
        /// Box half-width for the truncated cases.
        #[arg(long = "box")]
        box_bound: Option<u64>,
    },
    /// Reduction data (alpha, beta, gamma) of a quadratic polynomial.
    Reduce {
        /// Coefficients a,b,c,d,e,f (or a,b,c for a pure form).
        #[arg(long)]
        poly: String,
    },
    /// Solvability of P = gamma for square discriminant.
    Gamma {
        #[arg(long)]
        poly: String,
    },
    /// The sum of |m|^-lambda over representations of k.
    #[command(allow_negative_numbers = true)]
    DfiSum {
        #[arg(long, conflicts_with = "poly")]
        form: Option<String>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        k: i128,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Apply the operator to a finite signal and report window values + norm.
    Opnorm {
        #[arg(long, conflicts_with = "poly")]
        form: Option<String>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        window: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        /// Signal as a JSON object {"k": value, ...}.
        #[arg(long, conflicts_with = "signal_file")]
        signal: Option<String>,
        /// Path to a JSON file holding the signal object.
        #[arg(long)]
        signal_file: Option<PathBuf>,
    },
    /// Both routes of the shifted-circle identity for P_j.
    PjCheck {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        lambda: f64,
    },
    /// The primorial witness for q = m^2 + mn.
    C0Example {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        lambda: f64,
    },
    /// Partial sums of the off-diagonal sharpness witness.
    Sharpness {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        truncation: u64,
    },
    /// Jacobi symbol (m | n).
    #[command(allow_negative_numbers = true)]
    Jacobi {
        #[arg(long)]
        m: i128,
        #[arg(long)]
        n: u64,
    },
    /// Shifted nonresidue intersection count, direct and by formula.
    #[command(allow_negative_numbers = true)]
    Perron {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: i64,
    },
    /// Residue classes mod 8r characterizing (-a | p) = -1.
    #[command(allow_negative_numbers = true)]
    Classes {
        #[arg(long)]
        a: i64,
    },
    /// Large-sieve density bound for the conic a m^2 + n^2 = N.
    #[command(allow_negative_numbers = true)]
    SieveBound {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 0)]
        tau: i64,
        #[arg(long)]
        half_width: u64,
        /// Sieving level; floor(sqrt(2M)) when omitted.
        #[arg(long)]
        q_level: Option<u64>,
    },
    /// The strip sum 1/|m - tau|^lambda over a m^2 + n^2 = N.
    #[command(allow_negative_numbers = true)]
    StripSum {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 0)]
        tau: i64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
    },
    /// Circle / hyperbola / divisor strips at a threshold.
    Strips {
        #[arg(long)]
        target: u64,
        /// Explicit strip threshold.
        #[arg(long, conflicts_with = "kappa")]
        t: Option<f64>,
        /// Use the thresholds 6 N^(1/4) log^(kappa/4) N (strips) and
        /// 2 N^(1/4) log^(kappa/4) N (divisor window).
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Lattice points on an arc of the circle x^2 + y^2 = N.
    #[command(allow_negative_numbers = true)]
    Arc {
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 0.0)]
        center: f64,
        #[arg(long)]
        length: f64,
    },
    /// Scan a range for realizations of a shift pattern.
    Patterns {
        /// Shifts h_1,h_2,... (strictly increasing).
        #[arg(long)]
        spec: String,
        /// Inclusive range lo:hi[:stride].
        #[arg(long)]
        range: String,
    },
    /// The explicit three-point family realizing the pattern (1, 2).
    Family {
        #[arg(long)]
        j: u64,
    },
    /// The Pell relation h_i n_j^2 - h_j n_i^2 = (h_i - h_j)(h_i h_j + r).
    PellCheck {
        #[arg(long, requires = "target", conflicts_with = "family")]
        spec: Option<String>,
        #[arg(long)]
        target: Option<u64>,
        /// Use the family instance at this index instead of scanning.
        #[arg(long)]
        family: Option<u64>,
        #[arg(long, default_value_t = 0)]
        first: usize,
        #[arg(long, default_value_t = 1)]
        second: usize,
    },
    /// Simultaneous-approximation quality of sqrt(h_i / h_l) at n_l.
    Quality {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, requires = "rho")]
        big_r: Option<u64>,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Log-scale effective bound for simultaneous Pell equations.
    #[command(allow_negative_numbers = true)]
    Bugeaud {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        u: i64,
        #[arg(long)]
        v: i64,
        #[arg(long)]
        c: f64,
    },
    /// Strip cardinalities for every N in the regime set E of a range.
    Census {
        /// Inclusive range lo:hi[:stride].
        #[arg(long)]
        range: String,
        #[arg(long)]
        kappa: f64,
    },
    /// Summarize a census output file (maxima, witnesses, histograms).
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Also write a plot-ready CSV of counts vs N.
        #[arg(long)]
        plot_csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            // help/version output
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| run(cli)));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CliError::Config(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(CliError::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = resolve_workers(cli.workers)?;
    let rows = dispatch(cli.command, workers)?;
    write_rows(&rows, cli.format, cli.out.as_deref())
}

fn resolve_workers(flag: usize) -> Result<usize, CliError> {
    let workers = match std::env::var("QLAT_WORKERS") {
        Ok(s) => s.parse::<usize>().map_err(|_| {
            CliError::Config(format!("QLAT_WORKERS must be a positive integer, got {s:?}"))
        })?,
        Err(_) => flag,
    };
    if workers == 0 {
        return Err(CliError::Config("worker count must be at least 1".into()));
    }
    Ok(workers)
}

fn dispatch(command: Command, workers: usize) -> Result<Vec<Row>, CliError> {
    match command {
        Command::Classify { form } => cmd_classify(&form),
        Command::Factor { form } => cmd_factor(&form),
        Command::Reps { form, k, box_bound } => cmd_reps(&form, k, box_bound),
        Command::Reduce { poly } => cmd_reduce(&poly),
        Command::Gamma { poly } => cmd_gamma(&poly),
        Command::DfiSum {
            form,
            poly,
            k,
            lambda,
            cutoff,
        } => cmd_dfi_sum(phase(form, poly)?, k, lambda, cutoff),
        Command::Opnorm {
            form,
            poly,
            lambda,
            p,
            window,
            cutoff,
            signal,
            signal_file,
        } => cmd_opnorm(
            phase(form, poly)?,
            lambda,
            p,
            window,
            cutoff,
            load_signal(signal, signal_file)?,
        ),
        Command::PjCheck { j, lambda } => cmd_pj_check(j, lambda),
        Command::C0Example { j, lambda } => cmd_c0(j, lambda),
        Command::Sharpness {
            p,
            eps,
            lambda,
            q,
            truncation,
        } => cmd_sharpness(p, eps, lambda, q, truncation),
        Command::Jacobi { m, n } => cmd_jacobi(m, n),
        Command::Perron { p, s } => cmd_perron(p, s),
        Command::Classes { a } => cmd_classes(a),
        Command::SieveBound {
            a,
            target,
            tau,
            half_width,
            q_level,
        } => cmd_sieve_bound(a, target, tau, half_width, q_level),
        Command::StripSum {
            a,
            target,
            tau,
            lambda,
            cutoff,
        } => cmd_strip_sum(a, target, tau, lambda, cutoff),
        Command::Strips { target, t, kappa } => cmd_strips(target, t, kappa),
        Command::Arc {
            target,
            center,
            length,
        } => cmd_arc(target, center, length),
        Command::Patterns { spec, range } => cmd_patterns(&spec, &range),
        Command::Family { j } => cmd_family(j),
        Command::PellCheck {
            spec,
            target,
            family,
            first,
            second,
        } => cmd_pell_check(spec, target, family, first, second),
        Command::Quality {
            spec,
            n,
            eps,
            big_r,
            rho,
        } => cmd_quality(&spec, n, eps, big_r, rho),
        Command::Bugeaud { a, b, u, v, c } => cmd_bugeaud(a, b, u, v, c),
        Command::Census { range, kappa } => cmd_census(&range, kappa, workers),
        Command::Report { input, plot_csv } => cmd_report(&input, plot_csv.as_deref()),
    }
}

// ---- argument parsing helpers ----

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Config(format!("{what}: bad integer {tok:?}")))
        })
        .collect()
}

fn parse_form(s: &str) -> Result<QuadForm, CliError> {
    let v = parse_ints(s, "--form")?;
    if v.len() != 3 {
        return Err(CliError::Config(format!(
            "--form needs exactly 3 coefficients a,b,c, got {}",
            v.len()
        )));
    }
    Ok(QuadForm::new(v[0], v[1], v[2])?)
}

fn parse_poly(s: &str) -> Result<QuadPoly, CliError> {
    let v = parse_ints(s, "--poly")?;
    match v.len() {
        3 => Ok(QuadPoly::new(v[0], v[1], v[2], 0, 0, 0)?),
        6 => Ok(QuadPoly::new(v[0], v[1], v[2], v[3], v[4], v[5])?),
        n => Err(CliError::Config(format!(
            "--poly needs 3 or 6 coefficients a,b,c[,d,e,f], got {n}"
        ))),
    }
}

fn phase(form: Option<String>, poly: Option<String>) -> Result<QuadPoly, CliError> {
    match (form, poly) {
        (Some(f), None) => Ok(parse_form(&f)?.into()),
        (None, Some(p)) => parse_poly(&p),
        _ => Err(CliError::Config(
            "exactly one of --form or --poly is required".into(),
        )),
    }
}

fn parse_range(s: &str) -> Result<(u64, u64, u64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("--range must be start:end[:stride], got {s:?}"));
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let lo: u64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: u64 = parts[1].trim().parse().map_err(|_| bad())?;
    let stride: u64 = if parts.len() == 3 {
        parts[2].trim().parse().map_err(|_| bad())?
    } else {
        1
    };
    if lo > hi {
        return Err(CliError::Config(format!("empty range {s:?}")));
    }
    if stride == 0 {
        return Err(CliError::Config("stride must be at least 1".into()));
    }
    Ok((lo, hi, stride))
}

fn parse_spec(s: &str) -> Result<PatternSpec, CliError> {
    let shifts: Result<Vec<u64>, CliError> = s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("--spec: bad shift {tok:?}")))
        })
        .collect();
    Ok(PatternSpec::new(shifts?)?)
}

fn load_signal(inline: Option<String>, file: Option<PathBuf>) -> Result<FiniteSignal, CliError> {
    let text = match (inline, file) {
        (Some(s), None) => s,
        (None, Some(path)) => std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            return Err(CliError::Config(
                "exactly one of --signal or --signal-file is required".into(),
            ))
        }
    };
    let obj: BTreeMap<String, f64> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("signal must be a JSON object of numbers: {e}")))?;
    let mut pairs = Vec::with_capacity(obj.len());
    for (key, value) in obj {
        let k: i128 = key
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("signal key {key:?} is not an integer")))?;
        pairs.push((k, value));
    }
    Ok(FiniteSignal::from_pairs(pairs))
}

// ---- row value helpers ----

fn int_value(x: i128) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn pair_list(pairs: &[(i128, i128)]) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|&(m, n)| Value::Array(vec![int_value(m), int_value(n)]))
            .collect(),
    )
}

fn ratio_fields(row: &mut Row, prefix: &str, r: &qlat_core::Ratio<i128>) {
    row.insert(format!("{prefix}_num"), int_value(*r.numer()));
    row.insert(format!("{prefix}_den"), int_value(*r.denom()));
}

// ---- commands ----

fn cmd_classify(form: &str) -> Result<Vec<Row>, CliError> {
    let f = parse_form(form)?;
    let cf = f.classify();
    let mut row = base_row("classify");
    row.insert("a".into(), Value::from(f.a()));
    row.insert("b".into(), Value::from(f.b()));
    row.insert("c".into(), Value::from(f.c()));
    row.insert("disc".into(), int_value(cf.disc));
    let (class, sqrt_disc) = match cf.class {
        FormClass::Negative => ("negative", Value::Null),
        FormClass::PositiveNonsquare => ("positive-nonsquare", Value::Null),
        FormClass::PositiveSquare { sqrt_disc } => ("positive-square", int_value(sqrt_disc)),
        FormClass::Zero => ("zero", Value::Null),
    };
    row.insert("class".into(), Value::from(class));
    row.insert("sqrt_disc".into(), sqrt_disc);
    Ok(vec![row])
}

fn cmd_factor(form: &str) -> Result<Vec<Row>, CliError> {
    let f = parse_form(form)?;
    let ff = factor_square_disc(&f)?;
    let mut row = base_row("factor");
    row.insert("a".into(), Value::from(f.a()));
    row.insert("b".into(), Value::from(f.b()));
    row.insert("c".into(), Value::from(f.c()));
    row.insert("sqrt_disc".into(), int_value(ff.sqrt_disc));
    row.insert("a1".into(), int_value(ff.a1));
    row.insert("a2".into(), int_value(ff.a2));
    row.insert("c1".into(), int_value(ff.c1));
    row.insert("c2".into(), int_value(ff.c2));
    row.insert("g1".into(), int_value(ff.g1));
    row.insert("g2".into(), int_value(ff.g2));
    Ok(vec![row])
}

fn cmd_reps(form: &str, k: i128, box_bound: Option<u64>) -> Result<Vec<Row>, CliError> {
    let f = parse_form(form)?;
    let reps = representations(&f, k, box_bound)?;
    let mut row = base_row("reps");
    row.insert("a".into(), Value::from(f.a()));
    row.insert("b".into(), Value::from(f.b()));
    row.insert("c".into(), Value::from(f.c()));
    row.insert("k".into(), int_value(k));
    row.insert("count".into(), Value::from(reps.reps.len() as u64));
    row.insert("reps".into(), pair_list(&reps.reps));
    row.insert("complete".into(), Value::from(reps.complete));
    row.insert(
        "box".into(),
        reps.box_bound.map(Value::from).unwrap_or(Value::Null),
    );
    Ok(vec![row])
}

fn cmd_reduce(poly: &str) -> Result<Vec<Row>, CliError> {
    let p = parse_poly(poly)?;
    let red = reduce_poly(&p)?;
    let mut row = base_row("reduce");
    row.insert("poly".into(), Value::from(poly));
    row.insert("disc".into(), int_value(red.disc));
    row.insert("alpha".into(), int_value(red.alpha));
    row.insert("beta".into(), int_value(red.beta));
    ratio_fields(&mut row, "gamma", &red.gamma);
    let solvable = match p.form().classify().class {
        FormClass::PositiveSquare { .. } => Value::from(gamma_solvable(&p)?.solvable),
        _ => Value::Null,
    };
    row.insert("solvable".into(), solvable);
    Ok(vec![row])
}

fn cmd_gamma(poly: &str) -> Result<Vec<Row>, CliError> {
    let p = parse_poly(poly)?;
    let sol = gamma_solvable(&p)?;
    let mut row = base_row("gamma");
    row.insert("poly".into(), Value::from(poly));
    ratio_fields(&mut row, "gamma1", &sol.gamma1);
    ratio_fields(&mut row, "gamma2", &sol.gamma2);
    row.insert("solvable".into(), Value::from(sol.solvable));
    row.insert(
        "lines".into(),
        Value::Array(
            sol.lines
                .iter()
                .map(|line| {
                    let mut obj = serde_json::Map::new();
                    obj.insert(
                        "base".into(),
                        Value::Array(vec![int_value(line.base.0), int_value(line.base.1)]),
                    );
                    obj.insert(
                        "dir".into(),
                        Value::Array(vec![int_value(line.dir.0), int_value(line.dir.1)]),
                    );
                    Value::Object(obj)
                })
                .collect(),
        ),
    );
    Ok(vec![row])
}

fn cmd_dfi_sum(p: QuadPoly, k: i128, lambda: f64, cutoff: u64) -> Result<Vec<Row>, CliError> {
    let params = DfiParams::new(lambda, 1.0, cutoff)?;
    let sum = s_lambda_sum(&p, k, &params)?;
    let (a, b, c, d, e, f) = p.coeffs();
    let mut row = base_row("dfi-sum");
    row.insert(
        "poly".into(),
        Value::from(format!("{a},{b},{c},{d},{e},{f}")),
    );
    row.insert("k".into(), int_value(k));
    row.insert("lambda".into(), Value::from(lambda));
    row.insert("cutoff".into(), Value::from(sum.cutoff));
    row.insert("value".into(), Value::from(sum.value));
    row.insert("complete".into(), Value::from(sum.complete));
    row.insert("terms".into(), Value::from(sum.terms));
    Ok(vec![row])
}

fn cmd_opnorm(
    p: QuadPoly,
    lambda: f64,
    p_norm: f64,
    window: u64,
    cutoff: u64,
    signal: FiniteSignal,
) -> Result<Vec<Row>, CliError> {
    let params = DfiParams::new(lambda, p_norm, cutoff)?;
    let out = apply_operator(&p, &signal, &params, window)?;
    let (a, b, c, d, e, f) = p.coeffs();
    let poly_text = format!("{a},{b},{c},{d},{e},{f}");
    let rows = out
        .values
        .iter()
        .map(|&(n, value)| {
            let mut row = base_row("opnorm");
            row.insert("poly".into(), Value::from(poly_text.clone()));
            row.insert("lambda".into(), Value::from(lambda));
            row.insert("p".into(), Value::from(out.p));
            row.insert("window".into(), Value::from(window));
            row.insert("cutoff".into(), Value::from(cutoff));
            row.insert("n".into(), Value::from(n));
            row.insert("value".into(), Value::from(value));
            row.insert("lp_norm".into(), Value::from(out.lp_norm));
            row.insert("truncated".into(), Value::from(out.truncated));
            row
        })
        .collect();
    Ok(rows)
}

fn cmd_pj_check(j: u32, lambda: f64) -> Result<Vec<Row>, CliError> {
    let check = pj_consistency(j, lambda)?;
    let mut row = base_row("pj-check");
    row.insert("j".into(), Value::from(j));
    row.insert("lambda".into(), Value::from(lambda));
    row.insert("direct".into(), Value::from(check.direct));
    row.insert("shifted".into(), Value::from(check.shifted));
    row.insert(
        "abs_diff".into(),
        Value::from((check.direct - check.shifted).abs()),
    );
    Ok(vec![row])
}

fn cmd_c0(j: u32, lambda: f64) -> Result<Vec<Row>, CliError> {
    let w = c0_counterexample(j, lambda)?;
    let mut row = base_row("c0-example");
    row.insert("j".into(), Value::from(j));
    row.insert("lambda".into(), Value::from(lambda));
    row.insert("k".into(), Value::from(w.k));
    row.insert("lower_bound".into(), Value::from(w.lower_bound));
    row.insert("exact_sum".into(), Value::from(w.exact_sum));
    Ok(vec![row])
}

fn cmd_sharpness(
    p: f64,
    eps: f64,
    lambda: f64,
    q: f64,
    truncation: u64,
) -> Result<Vec<Row>, CliError> {
    let rep = sharpness_witness(p, eps, lambda, q, truncation)?;
    let mut row = base_row("sharpness");
    row.insert("p".into(), Value::from(p));
    row.insert("eps".into(), Value::from(eps));
    row.insert("lambda".into(), Value::from(lambda));
    row.insert("q".into(), Value::from(q));
    row.insert("truncation".into(), Value::from(truncation));
    row.insert("lq_partial".into(), Value::from(rep.lq_partial));
    row.insert("lq_exponent".into(), Value::from(rep.lq_exponent));
    row.insert("lq_diverges".into(), Value::from(rep.lq_diverges));
    row.insert("dual_partial".into(), Value::from(rep.dual_partial));
    row.insert("dual_exponent".into(), Value::from(rep.dual_exponent));
    row.insert("dual_diverges".into(), Value::from(rep.dual_diverges));
    Ok(vec![row])
}

fn cmd_jacobi(m: i128, n: u64) -> Result<Vec<Row>, CliError> {
    let symbol = jacobi_symbol(m, n)?;
    let mut row = base_row("jacobi");
    row.insert("m".into(), int_value(m));
    row.insert("n".into(), Value::from(n));
    row.insert("symbol".into(), Value::from(symbol));
    Ok(vec![row])
}

fn cmd_perron(p: u64, s: i64) -> Result<Vec<Row>, CliError> {
    let direct = perron_count(p, s)?;
    let formula = perron_formula(p, s)?;
    let mut row = base_row("perron");
    row.insert("p".into(), Value::from(p));
    row.insert("s".into(), Value::from(s));
    row.insert("count".into(), Value::from(direct));
    row.insert("formula_count".into(), Value::from(formula));
    Ok(vec![row])
}

fn cmd_classes(a: i64) -> Result<Vec<Row>, CliError> {
    let c = nonresidue_prime_classes(a)?;
    let mut row = base_row("classes");
    row.insert("a".into(), Value::from(a));
    row.insert("modulus".into(), Value::from(c.modulus));
    row.insert("odd_core".into(), Value::from(c.odd_core));
    row.insert("class_count".into(), Value::from(c.expected));
    row.insert(
        "classes".into(),
        Value::Array(c.classes.iter().map(|&x| Value::from(x)).collect()),
    );
    Ok(vec![row])
}

fn cmd_sieve_bound(
    a: i64,
    target: u64,
    tau: i64,
    half_width: u64,
    q_level: Option<u64>,
) -> Result<Vec<Row>, CliError> {
    let q_level = q_level.unwrap_or_else(|| default_q_level(half_width));
    let system = SieveSystem::build(a, target, q_level)?;
    let query = SieveQuery::new(tau, half_width, a)?;
    let bound = large_sieve_bound(&system, &query);
    let exact = representable_count_exact(a, target, tau, half_width);
    let mut row = base_row("sieve-bound");
    row.insert("a".into(), Value::from(a));
    row.insert("target".into(), Value::from(target));
    row.insert("tau".into(), Value::from(tau));
    row.insert("half_width".into(), Value::from(half_width));
    row.insert("q_level".into(), Value::from(q_level));
    row.insert("prime_count".into(), Value::from(system.primes.len() as u64));
    row.insert("sieve_mass".into(), Value::from(system.mass));
    row.insert("k_a".into(), Value::from(query.k_a));
    row.insert("bound".into(), bound.map(Value::from).unwrap_or(Value::Null));
    row.insert("exact_count".into(), Value::from(exact));
    Ok(vec![row])
}

fn cmd_strip_sum(
    a: i64,
    target: u64,
    tau: i64,
    lambda: f64,
    cutoff: u64,
) -> Result<Vec<Row>, CliError> {
    let sum = strip_sum(a, target, tau, lambda, cutoff)?;
    let mut row = base_row("strip-sum");
    row.insert("a".into(), Value::from(a));
    row.insert("target".into(), Value::from(target));
    row.insert("tau".into(), Value::from(tau));
    row.insert("lambda".into(), Value::from(lambda));
    row.insert("cutoff".into(), Value::from(sum.cutoff));
    row.insert("value".into(), Value::from(sum.value));
    row.insert("complete".into(), Value::from(sum.complete));
    row.insert("terms".into(), Value::from(sum.terms));
    Ok(vec![row])
}

fn cmd_strips(target: u64, t: Option<f64>, kappa: Option<f64>) -> Result<Vec<Row>, CliError> {
    let (strip_t, window_t) = match (t, kappa) {
        (Some(t), None) => (t, t),
        (None, Some(kappa)) => {
            if !kappa.is_finite() || kappa <= 0.0 || kappa >= 0.5 {
                return Err(CliError::Config("kappa must lie in (0, 1/2)".into()));
            }
            let quarter = (target as f64).powf(0.25) * (target as f64).ln().powf(kappa / 4.0);
            (6.0 * quarter, 2.0 * quarter)
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --t or --kappa is required".into(),
            ))
        }
    };
    let circle = arcs::circle_strip(target, strip_t);
    let hyper = arcs::hyperbola_strip(target, strip_t);
    let window = arcs::divisor_window(target, window_t)?;
    let mut row = base_row("strips");
    row.insert("target".into(), Value::from(target));
    row.insert("strip_threshold".into(), Value::from(strip_t));
    row.insert("window_threshold".into(), Value::from(window_t));
    row.insert("circle_count".into(), Value::from(circle.reps.len() as u64));
    row.insert(
        "hyperbola_count".into(),
        Value::from(hyper.reps.len() as u64),
    );
    row.insert("divisor_count".into(), Value::from(window.reps.len() as u64));
    row.insert("circle_points".into(), pair_list(&circle.reps));
    row.insert("hyperbola_points".into(), pair_list(&hyper.reps));
    row.insert("divisor_points".into(), pair_list(&window.reps));
    Ok(vec![row])
}

fn cmd_arc(target: u64, center: f64, length: f64) -> Result<Vec<Row>, CliError> {
    let mut row = base_row("arc");
    row.insert("target".into(), Value::from(target));
    row.insert("center".into(), Value::from(center));
    row.insert("length".into(), Value::from(length));
    row.insert(
        "count".into(),
        Value::from(arc_count(target, center, length)),
    );
    row.insert(
        "max_count".into(),
        Value::from(max_arc_count(target, length)),
    );
    Ok(vec![row])
}

fn instance_row(command: &str, inst: &arcs::PatternInstance) -> Row {
    let mut row = base_row(command);
    row.insert("n".into(), Value::from(inst.n));
    row.insert("big_r".into(), Value::from(inst.big_r));
    row.insert("r".into(), Value::from(inst.r));
    row.insert(
        "pairs".into(),
        Value::Array(
            inst.pairs
                .iter()
                .map(|&(h, ni)| Value::Array(vec![Value::from(h), Value::from(ni)]))
                .collect(),
        ),
    );
    row
}

fn cmd_patterns(spec: &str, range: &str) -> Result<Vec<Row>, CliError> {
    let pattern = parse_spec(spec)?;
    let (lo, hi, stride) = parse_range(range)?;
    let mut rows = Vec::new();
    for n in (lo..=hi).step_by(stride as usize) {
        if let Some(inst) = pattern_at(&pattern, n) {
            let mut row = instance_row("patterns", &inst);
            row.insert("spec".into(), Value::from(spec));
            rows.push(row);
        }
    }
    Ok(rows)
}

fn cmd_family(j: u64) -> Result<Vec<Row>, CliError> {
    let fam = pattern_family(j)?;
    let inst = fam.instance();
    let mut row = base_row("family");
    row.insert("j".into(), Value::from(j));
    row.insert("n".into(), Value::from(fam.n));
    row.insert(
        "points".into(),
        Value::Array(
            fam.points
                .iter()
                .map(|&(x, y)| Value::Array(vec![Value::from(x), Value::from(y)]))
                .collect(),
        ),
    );
    row.insert("big_r".into(), Value::from(inst.big_r));
    row.insert("r".into(), Value::from(inst.r));
    row.insert("verified".into(), Value::from(inst.verify_circle()));
    Ok(vec![row])
}

fn cmd_pell_check(
    spec: Option<String>,
    target: Option<u64>,
    family: Option<u64>,
    first: usize,
    second: usize,
) -> Result<Vec<Row>, CliError> {
    let inst = match (spec, target, family) {
        (Some(spec), Some(target), None) => {
            let pattern = parse_spec(&spec)?;
            pattern_at(&pattern, target).ok_or_else(|| {
                CliError::Config(format!("N={target} does not realize the pattern {spec}"))
            })?
        }
        (None, None, Some(j)) => pattern_family(j)?.instance(),
        _ => {
            return Err(CliError::Config(
                "need either --spec with --target, or --family".into(),
            ))
        }
    };
    let check = pell_relation_check(&inst, first, second)?;
    let mut row = instance_row("pell-check", &inst);
    row.insert("first".into(), Value::from(first as u64));
    row.insert("second".into(), Value::from(second as u64));
    row.insert("lhs".into(), int_value(check.lhs));
    row.insert("rhs".into(), int_value(check.rhs));
    row.insert("equal".into(), Value::from(check.equal));
    row.insert(
        "strip_bounds_ok".into(),
        Value::Array(
            check
                .strip_bounds
                .iter()
                .map(|&(h, ok)| Value::Array(vec![Value::from(h), Value::from(ok)]))
                .collect(),
        ),
    );
    row.insert(
        "asymptotic_regime".into(),
        Value::from(check.asymptotic_regime),
    );
    Ok(vec![row])
}

fn cmd_quality(
    spec: &str,
    n: u64,
    eps: f64,
    big_r: Option<u64>,
    rho: Option<f64>,
) -> Result<Vec<Row>, CliError> {
    let pattern = parse_spec(spec)?;
    let context = match (big_r, rho) {
        (Some(big_r), Some(rho)) => Some(RegimeContext { big_r, rho }),
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "--big-r and --rho must be given together".into(),
            ))
        }
    };
    let q = arcs::approx_quality(&pattern, n, eps, context)?;
    let independent = arcs::besicovitch_independent(&pattern)?;
    let mut row = base_row("quality");
    row.insert("spec".into(), Value::from(spec));
    row.insert("n".into(), Value::from(n));
    row.insert("eps".into(), Value::from(eps));
    row.insert("quality".into(), Value::from(q.quality));
    row.insert(
        "per_term".into(),
        Value::Array(q.per_term.iter().map(|&d| Value::from(d)).collect()),
    );
    row.insert(
        "regime_bound".into(),
        q.regime_bound.map(Value::from).unwrap_or(Value::Null),
    );
    row.insert("independent".into(), Value::from(independent));
    Ok(vec![row])
}

fn cmd_bugeaud(a: u64, b: u64, u: i64, v: i64, c: f64) -> Result<Vec<Row>, CliError> {
    let params = BugeaudParams::new(a, b, u, v, c)?;
    let bound = bugeaud_bound(&params)?;
    let mut row = base_row("bugeaud");
    row.insert("a".into(), Value::from(a));
    row.insert("b".into(), Value::from(b));
    row.insert("u".into(), Value::from(u));
    row.insert("v".into(), Value::from(v));
    row.insert("c".into(), Value::from(c));
    row.insert("exponent".into(), Value::from(bound.exponent));
    row.insert("log_bound".into(), Value::from(bound.log_bound));
    Ok(vec![row])
}

fn census_row_to_output(kappa: f64, r: &arcs::CensusRow) -> Row {
    let mut row = base_row("census");
    row.insert("kappa".into(), Value::from(kappa));
    row.insert("n".into(), Value::from(r.n));
    row.insert("big_r".into(), Value::from(r.big_r));
    row.insert("r".into(), Value::from(r.r));
    row.insert("in_e".into(), Value::from(r.in_e));
    row.insert("in_f".into(), Value::from(r.in_f));
    row.insert("borderline".into(), Value::from(r.borderline));
    row.insert("strip_threshold".into(), Value::from(r.strip_threshold));
    row.insert("window_threshold".into(), Value::from(r.window_threshold));
    row.insert("circle_count".into(), Value::from(r.circle_count));
    row.insert("hyperbola_count".into(), Value::from(r.hyperbola_count));
    row.insert("divisor_count".into(), Value::from(r.divisor_count));
    row
}

fn cmd_census(range: &str, kappa: f64, workers: usize) -> Result<Vec<Row>, CliError> {
    let (lo, hi, stride) = parse_range(range)?;
    let values: Vec<u64> = (lo.max(2)..=hi).step_by(stride as usize).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    // Work items are independent; collecting preserves input order, so the
    // output is byte-identical for any worker count.
    let rows: Result<Vec<Option<arcs::CensusRow>>, qlat_core::Error> =
        pool.install(|| values.par_iter().map(|&n| census_row(n, kappa)).collect());
    Ok(rows?
        .into_iter()
        .flatten()
        .map(|r| census_row_to_output(kappa, &r))
        .collect())
}

type CensusTuple = (u64, u64, u64, u64);

fn cmd_report(
    input: &std::path::Path,
    plot_csv: Option<&std::path::Path>,
) -> Result<Vec<Row>, CliError> {
    let file = std::fs::File::open(input)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", input.display())))?;
    let reader = BufReader::new(file);
    let mut census: Vec<CensusTuple> = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut saw_first = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::Config(format!("read error: {e}")))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !saw_first {
            saw_first = true;
            // sniff: json-lines rows start with '{', csv starts with a header
            if !line.trim_start().starts_with('{') {
                header = Some(split_csv_line(&line));
                continue;
            }
        }
        match &header {
            None => census.push(parse_json_census_line(&line, lineno)?),
            Some(h) => census.push(parse_csv_census_line(h, &line, lineno)?),
        }
    }

    if let Some(path) = plot_csv {
        let mut out = std::fs::File::create(path)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
        writeln!(out, "n,circle_count,hyperbola_count,divisor_count")
            .and_then(|_| {
                census
                    .iter()
                    .try_for_each(|c| writeln!(out, "{},{},{},{}", c.0, c.1, c.2, c.3))
            })
            .map_err(|e| CliError::Internal(format!("plot csv write failed: {e}")))?;
    }

    let mut row = base_row("report");
    row.insert("rows".into(), Value::from(census.len() as u64));
    type Getter = fn(&CensusTuple) -> u64;
    let kinds: [(&str, Getter); 3] = [
        ("circle", |c| c.1),
        ("hyperbola", |c| c.2),
        ("divisor", |c| c.3),
    ];
    for (name, get) in kinds {
        let mut max = 0u64;
        let mut argmax = Value::Null;
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        for c in &census {
            let v = get(c);
            *hist.entry(v).or_default() += 1;
            if argmax.is_null() || v > max {
                max = v;
                argmax = Value::from(c.0);
            }
        }
        row.insert(format!("max_{name}"), Value::from(max));
        row.insert(format!("argmax_{name}"), argmax);
        let hist_obj: serde_json::Map<String, Value> = hist
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::from(v)))
            .collect();
        row.insert(format!("hist_{name}"), Value::Object(hist_obj));
    }
    Ok(vec![row])
}

fn parse_json_census_line(line: &str, lineno: usize) -> Result<CensusTuple, CliError> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| CliError::Config(format!("line {lineno}: invalid JSON: {e}")))?;
    let field = |name: &str| -> Result<u64, CliError> {
        value
            .get(name)
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::Config(format!("line {lineno}: missing field {name}")))
    };
    Ok((
        field("n")?,
        field("circle_count")?,
        field("hyperbola_count")?,
        field("divisor_count")?,
    ))
}

fn split_csv_line(line: &str) -> Vec<String> {
    // census rows contain no quoted commas in the fields read here
    line.split(',').map(|s| s.trim().to_string()).collect()
}

fn parse_csv_census_line(
    header: &[String],
    line: &str,
    lineno: usize,
) -> Result<CensusTuple, CliError> {
    let cells = split_csv_line(line);
    if cells.len() != header.len() {
        return Err(CliError::Config(format!(
            "line {lineno}: {} cells, header has {}",
            cells.len(),
            header.len()
        )));
    }
    let field = |name: &str| -> Result<u64, CliError> {
        let idx = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("line {lineno}: no column {name}")))?;
        cells[idx].parse::<u64>().map_err(|_| {
            CliError::Config(format!("line {lineno}: bad {name} value {:?}", cells[idx]))
        })
    };
    Ok((
        field("n")?,
        field("circle_count")?,
        field("hyperbola_count")?,
        field("divisor_count")?,
    ))
}
