//! Subcommand definitions and their implementations.

use std::f64::consts::LN_2;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wiretap_core::ensemble::{
    codebook_size, empirical_exponent, exhaustive_ensemble_mean, DIVERGENCE_FLOOR, GENERATOR_ID,
};
use wiretap_core::exponents::{
    corollary_exponent_pair, e1_e2, eb_closed_form, et, f0, g0, gallager_e0, gallager_er,
    level_range, secrecy_curve, secrecy_exponent, secrecy_exponent_min_form, DualOptions,
    MIN_FORM_GRID_CAP,
};
use wiretap_core::prob::{conditional_kl, mutual_information, Distribution, JointXZ};
use wiretap_core::type_oracle::{
    eb_bruteforce, type_decomposition, DEFAULT_EB_GRID, DEFAULT_ENUMERATION_CAP, EB_MAX_CELLS,
};

use crate::channel_file::{load, Loaded};
use crate::error::CliError;
use crate::format::{sig12, Csv};

#[derive(Debug, Parser)]
#[command(
    name = "wiretap",
    version,
    about = "Secrecy and reliability exponents of the wire-tap channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print mutual informations and exponents at given rates.
    Exponent(ExponentArgs),
    /// Tabulate the secrecy exponent over a range of R'.
    Sweep(SweepArgs),
    /// Run the oracle checks against a channel file.
    Verify(VerifyArgs),
    /// Estimate leakage decay by simulating random codebooks.
    Simulate(SimulateArgs),
}

#[derive(Debug, clap::Args)]
pub struct ExponentArgs {
    /// Channel description file (JSON).
    pub file: PathBuf,
    /// Randomization rate R'. Defaults to the rate pairs in the file.
    #[arg(long)]
    pub rate_prime: Option<f64>,
    /// Message rate R; adds E_r(R + R') to the report.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Read and print rates and exponents in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    pub file: PathBuf,
    /// First R' of the sweep.
    #[arg(long)]
    pub from: f64,
    /// Last R' of the sweep.
    #[arg(long)]
    pub to: f64,
    /// Number of evenly spaced points, at least 2.
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Message rate R; adds an e_r column with E_r(R + R').
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    /// Blocklengths, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Fixed number of codewords per message.
    #[arg(
        long,
        conflicts_with = "rate_prime",
        required_unless_present = "rate_prime"
    )]
    pub m_prime: Option<usize>,
    /// Randomization rate; M' = ceil(exp(n R')) at each blocklength.
    #[arg(long)]
    pub rate_prime: Option<f64>,
    /// Largest M' allowed when derived from --rate-prime.
    #[arg(long, default_value_t = 1 << 16)]
    pub max_m_prime: usize,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    /// Master seed, decimal or 0x-prefixed hexadecimal.
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub bits: bool,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Conversion between the user's units and nats.
#[derive(Debug, Clone, Copy)]
struct Units {
    bits: bool,
}

impl Units {
    fn input(self, value: f64) -> f64 {
        if self.bits {
            value * LN_2
        } else {
            value
        }
    }

    fn output(self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

fn check_rate(what: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(CliError::Usage(format!(
            "{what} must be finite and non-negative, got {value}"
        )))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exponent(args) => exponent(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Verify(args) => verify(&args),
        Command::Simulate(args) => simulate(&args),
    }
}

#[derive(Debug, Serialize)]
struct ExponentReport {
    units: &'static str,
    sha256: String,
    i_xz: f64,
    i_xy: f64,
    points: Vec<ExponentPoint>,
}

#[derive(Debug, Serialize)]
struct ExponentPoint {
    rate_prime: f64,
    e_s: f64,
    arg_lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_r: Option<f64>,
}

fn exponent(args: &ExponentArgs) -> Result<(), CliError> {
    let loaded = load(&args.file)?;
    let units = Units { bits: args.bits };
    let pairs: Vec<(Option<f64>, f64)> = match args.rate_prime {
        Some(rp) => vec![(
            args.rate
                .map(|r| check_rate("--rate", units.input(r)))
                .transpose()?,
            check_rate("--rate-prime", units.input(rp))?,
        )],
        None if args.rate.is_some() => {
            return Err(CliError::Usage("--rate needs --rate-prime".into()));
        }
        None if loaded.file.rates.is_empty() => {
            return Err(CliError::Usage(
                "no --rate-prime given and the file lists no rates".into(),
            ));
        }
        None => loaded
            .file
            .rates
            .iter()
            .map(|p| (Some(p.rate), p.rate_prime))
            .collect(),
    };

    let joint = loaded.model.joint()?;
    let i_xy = mutual_information(&loaded.model.input, &loaded.model.main)?;
    let mut points = Vec::with_capacity(pairs.len());
    for (rate, rate_prime) in pairs {
        let (e_s, e_r) = match rate {
            Some(r) => {
                let (rel, sec) = corollary_exponent_pair(&loaded.model.instance(r, rate_prime)?)?;
                (sec, Some(rel.value))
            }
            None => (secrecy_exponent(&joint, rate_prime)?, None),
        };
        points.push(ExponentPoint {
            rate_prime: units.output(rate_prime),
            e_s: units.output(e_s.value),
            arg_lambda: e_s.arg_lambda,
            rate: rate.map(|r| units.output(r)),
            e_r: e_r.map(|v| units.output(v)),
        });
    }
    let report = ExponentReport {
        units: units.name(),
        sha256: loaded.sha256.clone(),
        i_xz: units.output(joint.mutual_information()),
        i_xy: units.output(i_xy),
        points,
    };

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("plain data always serializes")
        );
        return Ok(());
    }
    println!("units: {}", report.units);
    println!("I(X;Z): {}", sig12(report.i_xz));
    println!("I(X;Y): {}", sig12(report.i_xy));
    for p in &report.points {
        println!();
        println!("R': {}", sig12(p.rate_prime));
        println!("E_s: {}", sig12(p.e_s));
        println!("arg_lambda: {}", sig12(p.arg_lambda));
        if let (Some(r), Some(e_r)) = (p.rate, p.e_r) {
            println!("R: {}", sig12(r));
            println!("E_r(R+R'): {}", sig12(e_r));
        }
    }
    Ok(())
}

fn metadata(loaded: &Loaded, units: Units) -> Vec<(&'static str, String)> {
    vec![
        ("tool", format!("wiretap {}", env!("CARGO_PKG_VERSION"))),
        ("sha256", loaded.sha256.clone()),
        ("units", units.name().into()),
    ]
}

fn emit(csv: &Csv, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => csv.write(path),
        None => {
            print!("{}", csv.as_str());
            Ok(())
        }
    }
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let units = Units { bits: args.bits };
    let from = check_rate("--from", units.input(args.from))?;
    let to = check_rate("--to", units.input(args.to))?;
    if args.steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be at least 2, got {}",
            args.steps
        )));
    }
    if to <= from {
        return Err(CliError::Usage("--to must exceed --from".into()));
    }
    let rate = args
        .rate
        .map(|r| check_rate("--rate", units.input(r)))
        .transpose()?;
    let loaded = load(&args.file)?;
    let joint = loaded.model.joint()?;

    let last = (args.steps - 1) as f64;
    let rates: Vec<f64> = (0..args.steps)
        .map(|i| {
            if i == args.steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / last
            }
        })
        .collect();
    let curve = secrecy_curve(&joint, &rates)?;

    let mut meta = metadata(&loaded, units);
    let mut columns = vec!["r_prime", "e_s", "arg_lambda"];
    if let Some(r) = rate {
        meta.push(("rate", sig12(units.output(r))));
        columns.push("e_r");
    }
    let mut csv = Csv::new(&meta, &columns);
    for (rate_prime, e_s) in &curve.points {
        let mut row = vec![
            units.output(*rate_prime),
            units.output(e_s.value),
            e_s.arg_lambda,
        ];
        if let Some(r) = rate {
            let e_r = gallager_er(&loaded.model.input, &loaded.model.main, r + rate_prime)?;
            row.push(units.output(e_r.value));
        }
        csv.row(&row);
    }
    emit(&csv, args.out.as_ref())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let units = Units { bits: args.bits };
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be positive".into()));
    }
    if let Some(&0) = args.n.iter().find(|&&n| n == 0) {
        return Err(CliError::Usage("blocklengths must be positive".into()));
    }
    if args.m_prime == Some(0) {
        return Err(CliError::Usage("--m-prime must be positive".into()));
    }
    let rate_prime = args
        .rate_prime
        .map(|r| check_rate("--rate-prime", units.input(r)))
        .transpose()?;
    let loaded = load(&args.file)?;
    let joint = loaded.model.joint()?;

    let mut points = Vec::with_capacity(args.n.len());
    for &n in &args.n {
        let m_prime = match (args.m_prime, rate_prime) {
            (Some(m), _) => m,
            (None, Some(r)) => codebook_size(n, r, args.max_m_prime)?,
            (None, None) => unreachable!("clap requires one of --m-prime and --rate-prime"),
        };
        points.push((n, m_prime));
    }
    let results = empirical_exponent(
        &loaded.model.input,
        &loaded.model.wiretap,
        &points,
        args.replicates,
        args.seed,
    )?;

    let mut meta = metadata(&loaded, units);
    meta.push(("seed", format!("{:#x}", args.seed)));
    meta.push(("replicates", args.replicates.to_string()));
    meta.push(("generator", GENERATOR_ID.into()));
    meta.push((
        "e_s_reference",
        match rate_prime {
            Some(_) => "E_s at the given R'".into(),
            None => "E_s at R' = ln(M')/n".to_string(),
        },
    ));
    let mut csv = Csv::new(
        &meta,
        &[
            "n",
            "m_prime",
            "mean_divergence",
            "std_error",
            "empirical_exponent",
            "e_s_reference",
        ],
    );
    for point in &results {
        let reference_rate =
            rate_prime.unwrap_or_else(|| (point.m_prime as f64).ln() / point.n as f64);
        let reference = secrecy_exponent(&joint, reference_rate)?;
        // Means at the floor are rounding noise, the same cut that makes the
        // exponent infinite.
        let (mean, std_error) = if point.mean.estimate <= DIVERGENCE_FLOOR {
            (0.0, 0.0)
        } else {
            (point.mean.estimate, point.mean.std_error)
        };
        csv.row(&[
            point.n as f64,
            point.m_prime as f64,
            units.output(mean),
            units.output(std_error),
            units.output(point.exponent),
            units.output(reference.value),
        ]);
    }
    emit(&csv, args.out.as_ref())
}

/// Result of one verification check.
enum Check {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn judged(pass: bool, detail: String) -> Check {
    if pass {
        Check::Pass(detail)
    } else {
        Check::Fail(detail)
    }
}

/// Turns resource-cap errors into skips; other errors propagate.
fn skip_on_cap(result: Result<Check, CliError>) -> Result<Check, CliError> {
    match result {
        Err(CliError::Core(e @ wiretap_core::Error::CapExceeded { .. })) => {
            Ok(Check::Skip(e.to_string()))
        }
        other => other,
    }
}

/// Deterministic low-discrepancy points in `[0, 1)`.
struct Weyl {
    state: f64,
    step: f64,
}

impl Weyl {
    fn new(step: f64) -> Self {
        Self { state: 0.5, step }
    }

    fn next(&mut self) -> f64 {
        self.state = (self.state + self.step).fract();
        self.state
    }
}

struct Settings {
    convexity_probes: usize,
    min_form_points: f64,
    eb_levels: usize,
    blocklength: usize,
}

impl Level {
    fn settings(self) -> Settings {
        match self {
            Level::Fast => Settings {
                convexity_probes: 200,
                min_form_points: 2e4,
                eb_levels: 3,
                blocklength: 3,
            },
            Level::Full => Settings {
                convexity_probes: 1000,
                min_form_points: MIN_FORM_GRID_CAP as f64,
                eb_levels: 7,
                blocklength: 4,
            },
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let loaded = load(&args.file)?;
    let joint = loaded.model.joint()?;
    let s = args.level.settings();

    let checks: Vec<(&str, Result<Check, CliError>)> = vec![
        ("F0 origin and slope", check_origin(&joint)),
        ("E_s zero threshold", check_threshold(&joint)),
        (
            "min form = max form",
            skip_on_cap(check_min_form(&joint, &s)),
        ),
        (
            "E_b closed form vs brute force",
            skip_on_cap(check_eb(&joint, &s)),
        ),
        ("E_t = min(E1, E2)", check_et(&joint)),
        ("convexity of F0 and G0", check_convexity(&joint, &s)),
        (
            "ensemble mean output",
            skip_on_cap(check_mean_output(&joint, &s)),
        ),
        (
            "type decomposition",
            skip_on_cap(check_decomposition(&joint, &s)),
        ),
        ("Gallager E_r", check_gallager(&loaded)),
    ];

    let (mut failed, mut total) = (0, 0);
    for (name, check) in checks {
        match check? {
            Check::Pass(detail) => {
                total += 1;
                println!("PASS {name}: {detail}");
            }
            Check::Fail(detail) => {
                total += 1;
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
            Check::Skip(reason) => println!("SKIP {name}: {reason}"),
        }
    }
    println!("{} of {total} checks passed", total - failed);
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total });
    }
    Ok(())
}

fn check_origin(joint: &JointXZ) -> Result<Check, CliError> {
    let h = 1e-5;
    let origin = f0(joint, 0.0);
    let slope = (f0(joint, h) - f0(joint, -h)) / (2.0 * h);
    let gap = (slope - joint.mutual_information()).abs();
    Ok(judged(
        origin == 0.0 && gap <= 1e-6,
        format!("F0(0) = {origin:e}, |F0'(0) - I(X;Z)| = {gap:.2e} (tol 1e-6)"),
    ))
}

fn check_threshold(joint: &JointXZ) -> Result<Check, CliError> {
    let i = joint.mutual_information();
    let below = secrecy_exponent(joint, (i - 0.01).max(0.0))?.value;
    let above = secrecy_exponent(joint, i + 0.05)?.value;
    Ok(judged(
        below <= 1e-9 && above > 0.0,
        format!("E_s(I - 0.01) = {below:.2e} (tol 1e-9), E_s(I + 0.05) = {above:.3e} (> 0)"),
    ))
}

/// Largest simplex-grid resolution whose point count stays within `budget`.
fn grid_resolution(parts: usize, budget: f64) -> usize {
    let count =
        |res: usize| -> f64 { (1..parts).fold(1.0, |acc, j| acc * (res + j) as f64 / j as f64) };
    let mut res = 2;
    while res < 2000 && count(res + 1) <= budget {
        res += 1;
    }
    res
}

fn check_min_form(joint: &JointXZ, s: &Settings) -> Result<Check, CliError> {
    let resolution = grid_resolution(joint.output_size(), s.min_form_points);
    let i = joint.mutual_information();
    let mut worst = 0.0f64;
    for offset in [-0.05, 0.02, 0.1, 0.3] {
        let rate = (i + offset).max(0.0);
        let max_form = secrecy_exponent(joint, rate)?.value;
        let min_form = secrecy_exponent_min_form(joint, rate, resolution)?.value;
        worst = worst.max((max_form - min_form).abs());
    }
    Ok(judged(
        worst <= 1e-3,
        format!("max gap {worst:.2e} over 4 rates, grid 1/{resolution} (tol 1e-3)"),
    ))
}

fn check_eb(joint: &JointXZ, s: &Settings) -> Result<Check, CliError> {
    let cells = joint.input_size() * joint.output_size();
    if cells > EB_MAX_CELLS {
        return Ok(Check::Skip(format!(
            "|X|·|Z| = {cells} exceeds the brute-force limit of {EB_MAX_CELLS}"
        )));
    }
    let p = joint.output().clone();
    let (lo, hi) = level_range(joint, &p)?;
    let a_star = conditional_kl(joint.posterior(), &joint.replicated_input(), &p)?;
    let mut levels = vec![a_star];
    if hi - lo > 1e-9 {
        levels.extend(
            (1..=s.eb_levels).map(|k| lo + k as f64 / (s.eb_levels + 1) as f64 * (hi - lo)),
        );
    }

    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_gap = 0.0f64;
    let mut resolution = DEFAULT_EB_GRID;
    for &a in &levels {
        let closed = eb_closed_form(joint, &p, a, DualOptions::default())?;
        let oracle = loop {
            match eb_bruteforce(joint, &p, a, resolution) {
                Err(wiretap_core::Error::CapExceeded { .. }) if resolution > 8 => {
                    resolution /= 2;
                }
                other => break other?,
            }
        };
        let gap = (closed.value - oracle.grid_value).abs();
        worst_gap = worst_gap.max(gap);
        worst_excess = worst_excess.max(gap - oracle.slack.max(1e-3));
    }
    let natural = (eb_closed_form(joint, &p, a_star, DualOptions::default())?.value - a_star).abs();
    Ok(judged(
        worst_excess <= 0.0 && natural <= 1e-9,
        format!(
            "max gap {worst_gap:.2e} over {} levels at grid 1/{resolution} (tol max(1e-3, grid step)), |E_b(a*) - a*| = {natural:.2e} (tol 1e-9)",
            levels.len()
        ),
    ))
}

fn check_et(joint: &JointXZ) -> Result<Check, CliError> {
    let nz = joint.output_size();
    let mut weyl = Weyl::new(0.618_033_988_749_894_9);
    let mut weights = vec![joint.output().clone()];
    for _ in 0..3 {
        weights.push(Distribution::normalized(
            (0..nz).map(|_| 0.05 + weyl.next()).collect(),
        )?);
    }
    let (mut worst, mut both_positive) = (0.0f64, 0);
    for p in &weights {
        let (_, hi) = level_range(joint, p)?;
        for k in 0..5 {
            let rate = (hi.max(0.0) + 0.3) * k as f64 / 4.0;
            let t = e1_e2(joint, p, rate, DualOptions::default())?;
            let target = et(joint, p, rate)?.value;
            let m = t.e1.value.min(t.e2.value);
            if m != target {
                worst = worst.max((m - target).abs());
            }
            if t.e2.value > 1e-9 && t.e2_bar.value > 1e-9 {
                both_positive += 1;
            }
        }
    }
    Ok(judged(
        worst <= 1e-9 && both_positive == 0,
        format!(
            "max |min(E1, E2) - E_t| = {worst:.2e} (tol 1e-9), rates with E2 and E2bar both positive: {both_positive}"
        ),
    ))
}

fn check_convexity(joint: &JointXZ, s: &Settings) -> Result<Check, CliError> {
    let nz = joint.output_size();
    let mut points = Weyl::new(0.754_877_666_246_692_7);
    let mut mix = Weyl::new(0.569_840_290_998_053_3);
    let mut worst = f64::NEG_INFINITY;
    for probe in 0..s.convexity_probes {
        let mut l = [0.0; 3].map(|_: f64| -2.0 + 5.0 * points.next());
        l.sort_by(f64::total_cmp);
        let [a, b, c] = l;
        if c - a < 1e-9 {
            continue;
        }
        let t = (b - a) / (c - a);
        let excess = if probe % 2 == 0 {
            f0(joint, b) - ((1.0 - t) * f0(joint, a) + t * f0(joint, c))
        } else {
            let p = Distribution::normalized((0..nz).map(|_| 0.05 + mix.next()).collect())?;
            let g = |x| g0(joint, &p, x);
            g(b)? - ((1.0 - t) * g(a)? + t * g(c)?)
        };
        worst = worst.max(excess);
    }
    Ok(judged(
        worst <= 1e-10,
        format!(
            "max convexity excess {worst:.2e} over {} probes (tol 1e-10)",
            s.convexity_probes
        ),
    ))
}

fn check_mean_output(joint: &JointXZ, s: &Settings) -> Result<Check, CliError> {
    let n = s.blocklength;
    let mean = exhaustive_ensemble_mean(joint.input(), joint.channel(), n, 2)?;
    let dev = mean.max_output_deviation;
    Ok(judged(
        dev <= 1e-12,
        format!("max_z |E[P_Z|W(z|w)] - P_Z^n(z)| = {dev:.2e} at n = {n}, M' = 2 (tol 1e-12)"),
    ))
}

fn check_decomposition(joint: &JointXZ, s: &Settings) -> Result<Check, CliError> {
    let n = s.blocklength;
    let exhaustive = exhaustive_ensemble_mean(joint.input(), joint.channel(), n, 2)?
        .divergence
        .estimate;
    let by_types = type_decomposition(joint, n, 2, DEFAULT_ENUMERATION_CAP)?;
    let gap = (by_types - exhaustive).abs();
    Ok(judged(
        gap <= 1e-10,
        format!("|sum over types - exhaustive E[D]| = {gap:.2e} at n = {n}, M' = 2 (tol 1e-10)"),
    ))
}

fn check_gallager(loaded: &Loaded) -> Result<Check, CliError> {
    let m = &loaded.model;
    let i_xy = mutual_information(&m.input, &m.main)?;
    let capacity_side = gallager_er(&m.input, &m.main, i_xy)?.value;
    let at_zero = gallager_er(&m.input, &m.main, 0.0)?.value;
    let e0_one = gallager_e0(&m.input, &m.main, 1.0)?;
    Ok(judged(
        capacity_side <= 1e-9 && (at_zero - e0_one).abs() <= 1e-9,
        format!(
            "E_r(I(X;Y) = {i_xy:.6}) = {capacity_side:.2e} (tol 1e-9), |E_r(0) - E0(1)| = {:.2e} (tol 1e-9)",
            (at_zero - e0_one).abs()
        ),
    ))
}
