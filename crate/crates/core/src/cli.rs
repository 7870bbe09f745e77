//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 amplitude outside the recoverable range.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bitstream::{pack, unpack, Payload, Scheme, StreamHeader};
use crate::ecrt::EcrtCodec;
use crate::error::Error;
use crate::experiments::{fig2_sweep, mae, SweepParams};
use crate::modcore::{frames_from_samples, NoiseDistribution, NoiseSpec, SignalSpec, SystemConfig};
use crate::rates::{parse_rows, table1, table_csv, TABLE1_ROWS};
use crate::rcrt::RcrtCodec;
use crate::verify::{bounds_suite, corollary_suite, crt_oracle_suite, variance_suite, BoundsOptions, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ecrt", version, about = "Bit-efficient two-channel modulo ADC toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bitrate comparison table as CSV.
    Table1 {
        /// Nyquist rate in hertz.
        #[arg(long, default_value_t = 1.0)]
        fnyq: f64,
        /// Rows as "b:rho,b:rho,...".
        #[arg(long)]
        rows: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the overhead case split over a grid of rho.
    Corollary {
        #[arg(long, default_value_t = 4096.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 1.0 / 64.0)]
        step: f64,
        #[arg(long, default_value_t = 12)]
        b_max: u32,
    },
    /// MAE-versus-bitrate sweep for the three schemes.
    Sweep {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        bmin: Option<u32>,
        #[arg(long)]
        bmax: Option<u32>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a decimal sample file into a packed stream.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a packed stream into a decimal sample file.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth samples for an MAE summary.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run a property suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Ecrt,
    Rcrt,
}

#[derive(Debug, Clone, Default, Args)]
struct SystemArgs {
    /// INI-style file of key=value lines; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tau1: Option<u32>,
    #[arg(long)]
    tau2: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    sample_period: Option<f64>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    peak: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_e1: Option<f64>,
    #[arg(long)]
    noise_e2: Option<f64>,
    #[arg(long)]
    noise_es: Option<f64>,
    /// uniform or worst_case_sign
    #[arg(long)]
    noise_distribution: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::AmplitudeOutOfRange { .. } => EXIT_DOMAIN,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

const CONFIG_KEYS: &[&str] = &[
    "tau1",
    "tau2",
    "epsilon",
    "b",
    "sample_period",
    "bandwidth",
    "peak",
    "duration",
    "seed",
    "noise_e1",
    "noise_e2",
    "noise_es",
    "noise_distribution",
    "trials",
    "bmin",
    "bmax",
    "samples",
    "scheme",
];

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", i + 1))?;
        let key = k.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key {key:?}", i + 1));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

struct Resolved {
    file: BTreeMap<String, String>,
}

impl Resolved {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let file = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_text(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
            }
            None => BTreeMap::new(),
        };
        Ok(Self { file })
    }

    /// Flag, then file, then default.
    fn get<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| Failure::usage(format!("config key {key}: cannot parse {s:?}"))),
            None => Ok(default),
        }
    }
}

struct Settings {
    config: SystemConfig,
    signal: SignalSpec,
    noise: NoiseSpec,
}

fn resolve_system(sys: &SystemArgs, r: &Resolved, default_b: u32) -> CliResult<Settings> {
    let config = SystemConfig::new(
        r.get("tau1", sys.tau1, 15)?,
        r.get("tau2", sys.tau2, 16)?,
        r.get("epsilon", sys.epsilon, 18.75)?,
        r.get("b", sys.b, default_b)?,
        r.get("sample_period", sys.sample_period, 1.0)?,
    )?;
    let signal = SignalSpec::new(
        r.get("bandwidth", sys.bandwidth, 0.5 / config.sample_period())?,
        r.get("peak", sys.peak, 2200.0)?,
        r.get("duration", sys.duration, 10_000.0 * config.sample_period())?,
        r.get("seed", sys.seed, 1)?,
    );
    let e1 = r.get("noise_e1", sys.noise_e1, 0.0)?;
    let dist: String = r.get("noise_distribution", sys.noise_distribution.clone(), "uniform".into())?;
    let distribution = match dist.as_str() {
        "uniform" => NoiseDistribution::Uniform,
        "worst_case_sign" | "worst-case-sign" => NoiseDistribution::WorstCaseSign,
        other => return Err(Failure::usage(format!("unknown noise distribution {other:?}"))),
    };
    let noise = NoiseSpec {
        e1_max: e1,
        es_max: r.get("noise_es", sys.noise_es, 0.0)?,
        e2_max: Some(r.get("noise_e2", sys.noise_e2, e1)?),
        distribution,
        seed: signal.seed,
    };
    noise.validate()?;
    Ok(Settings { config, signal, noise })
}

fn describe(s: &Settings) -> String {
    let c = &s.config;
    format!(
        "tau1={} tau2={} epsilon={} b={} b_d={} sample_period={} delta1={} delta2={} bandwidth={} peak={} duration={} seed={} noise_e1={} noise_e2={} noise_es={} noise_distribution={:?}",
        c.tau1(),
        c.tau2(),
        c.epsilon(),
        c.b(),
        c.b_d(),
        c.sample_period(),
        c.delta1(),
        c.delta2(),
        s.signal.bandwidth,
        s.signal.peak,
        s.signal.duration,
        s.signal.seed,
        s.noise.e1_max,
        s.noise.e2_bound(),
        s.noise.es_max,
        s.noise.distribution,
    )
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Whitespace-separated decimals; errors name the 1-based line.
pub fn parse_samples(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| format!("line {}: cannot parse {tok:?} as a number", i + 1))?;
            if !v.is_finite() {
                return Err(format!("line {}: non-finite sample {tok:?}", i + 1));
            }
            out.push(v);
        }
    }
    Ok(out)
}

fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_samples(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn cmd_table1(fnyq: f64, rows: Option<&str>, out: Option<&Path>) -> CliResult<i32> {
    let rows = match rows {
        Some(s) => parse_rows(s)?,
        None => TABLE1_ROWS.to_vec(),
    };
    eprintln!("config: fnyq={fnyq} rows={rows:?}");
    let reports = table1(&rows, fnyq)?;
    write_output(out, &table_csv(&reports))?;
    Ok(EXIT_OK)
}

fn report_exit(report: &crate::verify::Report) -> i32 {
    println!("{report}");
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn cmd_corollary(rho_max: f64, step: f64, b_max: u32) -> CliResult<i32> {
    if !(rho_max > 1.0 && step > 0.0 && b_max >= 1) {
        return Err(Failure::usage("need rho_max > 1, step > 0, b_max >= 1"));
    }
    eprintln!("config: rho_max={rho_max} step={step} b_max={b_max}");
    Ok(report_exit(&corollary_suite(rho_max, step, b_max)?))
}

fn cmd_sweep(
    sys: &SystemArgs,
    bmin: Option<u32>,
    bmax: Option<u32>,
    trials: Option<usize>,
    samples: Option<usize>,
    out: Option<&Path>,
) -> CliResult<i32> {
    let r = Resolved::load(sys.config.as_deref())?;
    let s = resolve_system(sys, &r, 1)?;
    let params = SweepParams {
        signal: s.signal,
        base: s.config,
        b_min: r.get("bmin", bmin, 1)?,
        b_max: r.get("bmax", bmax, 16)?,
        noise: s.noise,
        trials: r.get("trials", trials, 10)?,
        samples: match samples {
            Some(n) => Some(n),
            None => r.file.get("samples").map(|v| v.parse()).transpose().map_err(|_| Failure::usage("config key samples: bad value"))?,
        },
        exec: Default::default(),
    };
    eprintln!(
        "config: {} bmin={} bmax={} trials={} samples={:?}",
        describe(&s),
        params.b_min,
        params.b_max,
        params.trials,
        params.samples
    );
    let result = fig2_sweep(&params)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    write_output(out, &result.to_csv())?;
    Ok(EXIT_OK)
}

fn cmd_encode(input: &Path, sys: &SystemArgs, scheme: Option<SchemeArg>, out: &Path) -> CliResult<i32> {
    let r = Resolved::load(sys.config.as_deref())?;
    let s = resolve_system(sys, &r, 14)?;
    let scheme = match scheme {
        Some(SchemeArg::Ecrt) => Scheme::Ecrt,
        Some(SchemeArg::Rcrt) => Scheme::Rcrt,
        None => match r.file.get("scheme").map(String::as_str) {
            None | Some("ecrt") => Scheme::Ecrt,
            Some("rcrt") => Scheme::Rcrt,
            Some(other) => return Err(Failure::usage(format!("unknown scheme {other:?}"))),
        },
    };
    eprintln!("config: {} scheme={}", describe(&s), scheme.name());
    let samples = read_samples(input)?;
    s.config.check_amplitudes(&samples)?;
    let frames = frames_from_samples(&samples, &s.config, &NoiseSpec::none())?;
    let header = StreamHeader::new(&s.config, scheme, frames.len() as u64);
    let payload = match scheme {
        Scheme::Ecrt => Payload::Ecrt(EcrtCodec::new(s.config).encode(&frames)),
        Scheme::Rcrt => Payload::Rcrt(RcrtCodec::new(s.config)?.encode(&frames)),
    };
    let bytes = pack(&header, &payload)?;
    fs::write(out, &bytes).map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "encoded count={} scheme={} bits_per_sample={} payload_bytes={}",
        frames.len(),
        scheme.name(),
        header.bits_per_sample(),
        header.payload_len()
    );
    Ok(EXIT_OK)
}

fn cmd_decode(input: &Path, out: &Path, truth: Option<&Path>) -> CliResult<i32> {
    eprintln!(
        "config: input={} out={} truth={}",
        input.display(),
        out.display(),
        truth.map(|p| p.display().to_string()).unwrap_or_else(|| "-".into())
    );
    let bytes = fs::read(input).map_err(|e| Failure::usage(format!("cannot read {}: {e}", input.display())))?;
    let (header, payload) = unpack(&bytes)?;
    let config = header.config()?;
    let g_hat = match &payload {
        Payload::Ecrt(frames) => EcrtCodec::new(config).decode(frames).g_hat,
        Payload::Rcrt(frames) => RcrtCodec::new(config)?.decode(frames).g_hat,
    };
    let mut text = String::with_capacity(g_hat.len() * 20);
    for g in &g_hat {
        text.push_str(&g.to_string());
        text.push('\n');
    }
    fs::write(out, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
    let mut summary = format!(
        "decoded count={} scheme={} bits_per_sample={}",
        g_hat.len(),
        header.scheme.name(),
        header.bits_per_sample()
    );
    if let Some(t) = truth {
        let g = read_samples(t)?;
        if g.len() != g_hat.len() {
            return Err(Failure::usage(format!(
                "truth has {} samples, stream has {}",
                g.len(),
                g_hat.len()
            )));
        }
        if !g.is_empty() {
            summary.push_str(&format!(" mae={}", mae(&g, &g_hat)?));
        }
    }
    println!("{summary}");
    Ok(EXIT_OK)
}

fn cmd_verify(suite: &str, sys: &SystemArgs, seeds: Option<u64>, samples: Option<usize>) -> CliResult<i32> {
    let suite = Suite::parse(suite).ok_or_else(|| {
        Failure::usage(format!("unknown suite {suite:?}; expected bounds, corollary, crt-oracle or variance"))
    })?;
    let report = match suite {
        Suite::Bounds => {
            let r = Resolved::load(sys.config.as_deref())?;
            let s = resolve_system(sys, &r, 1)?;
            let opts = BoundsOptions {
                config: s.config,
                peak: s.signal.peak,
                seeds: seeds.unwrap_or(10),
                samples: samples.unwrap_or(10_000),
                e1_max: s.noise.e1_max,
                es_max: s.noise.es_max,
                ..Default::default()
            };
            eprintln!(
                "config: suite=bounds {} b=1..16 seeds={} samples={}",
                describe(&s),
                opts.seeds,
                opts.samples
            );
            bounds_suite(&opts)?
        }
        Suite::Corollary => {
            eprintln!("config: suite=corollary rho=(1,4096] step=1/64 b=1..12");
            corollary_suite(4096.0, 1.0 / 64.0, 12)?
        }
        Suite::CrtOracle => {
            eprintln!("config: suite=crt-oracle tau2<=64");
            crt_oracle_suite(64)?
        }
        Suite::Variance => {
            let n = samples.unwrap_or(1_000_000);
            let seed = seeds.unwrap_or(1);
            eprintln!("config: suite=variance tau1=15 tau2=16 b=8 samples={n} seed={seed}");
            variance_suite(n, seed)?
        }
    };
    Ok(report_exit(&report))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Table1 { fnyq, rows, out } => cmd_table1(*fnyq, rows.as_deref(), out.as_deref()),
        Command::Corollary { rho_max, step, b_max } => cmd_corollary(*rho_max, *step, *b_max),
        Command::Sweep {
            sys,
            bmin,
            bmax,
            trials,
            samples,
            out,
        } => cmd_sweep(sys, *bmin, *bmax, *trials, *samples, out.as_deref()),
        Command::Encode { input, sys, scheme, out } => cmd_encode(input, sys, *scheme, out),
        Command::Decode { input, out, truth } => cmd_decode(input, out, truth.as_deref()),
        Command::Verify {
            suite,
            sys,
            seeds,
            samples,
        } => cmd_verify(suite, sys, *seeds, *samples),
    };
    let _ = std::io::stdout().flush();
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text() {
        let m = parse_config_text("# header\ntau1 = 3\n\ntau2=4 # trailing\nnoise-es=0.01\n").unwrap();
        assert_eq!(m["tau1"], "3");
        assert_eq!(m["tau2"], "4");
        assert_eq!(m["noise_es"], "0.01");
        assert!(parse_config_text("colour=blue").unwrap_err().contains("unknown key"));
        assert!(parse_config_text("tau1").unwrap_err().contains("line 1"));
    }

    #[test]
    fn flags_override_file() {
        let r = Resolved {
            file: parse_config_text("tau1=3\ntau2=4\nepsilon=0.24\nb=6").unwrap(),
        };
        let sys = SystemArgs {
            b: Some(9),
            ..Default::default()
        };
        let s = resolve_system(&sys, &r, 14).unwrap();
        assert_eq!((s.config.tau1(), s.config.tau2(), s.config.b()), (3, 4, 9));
        assert_eq!(s.config.epsilon(), 0.24);
    }

    #[test]
    fn sample_parsing() {
        assert_eq!(parse_samples("1 2.5\n-3e2\n\n").unwrap(), vec![1.0, 2.5, -300.0]);
        assert!(parse_samples("1\n2\nabc\n").unwrap_err().starts_with("line 3"));
        assert!(parse_samples("").unwrap().is_empty());
    }
}
