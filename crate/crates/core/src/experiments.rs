//! Experiment drivers and reconstruction metrics.

use std::fmt::Write as _;

use crate::ecrt::{theorem1_bound, EcrtCodec};
use crate::error::{invalid, Result};
use crate::modcore::{acquire_with, synthesize_signal, NoiseSpec, SampleFrame, SignalSpec, SystemConfig};
use crate::par::Exec;
use crate::quant::UniformQuantizer;
use crate::rates::ceil_log2;
use crate::rcrt::{rcrt_error_bound, rcrt_is_stable, rcrt_min_bits, RcrtCodec};

pub const SWEEP_CSV_HEADER: &str = "scheme,bits_per_sample,bitrate_bps,mae,bound,seed";

fn check_pair(g: &[f64], g_hat: &[f64]) -> Result<()> {
    if g.len() != g_hat.len() {
        return Err(invalid(format!("length mismatch: {} vs {}", g.len(), g_hat.len())));
    }
    if g.is_empty() {
        return Err(invalid("empty sequences"));
    }
    Ok(())
}

/// Maximum absolute error `max_k |g[k] − ĝ[k]|`.
pub fn mae(g: &[f64], g_hat: &[f64]) -> Result<f64> {
    check_pair(g, g_hat)?;
    Ok(g.iter().zip(g_hat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Relative root-squared error `sqrt(Σ|g−ĝ|² / Σ|g|²)`.
pub fn rrse(g: &[f64], g_hat: &[f64]) -> Result<f64> {
    check_pair(g, g_hat)?;
    let energy: f64 = g.iter().map(|x| x * x).sum();
    if energy == 0.0 {
        return Err(invalid("reference signal has zero energy"));
    }
    let err: f64 = g.iter().zip(g_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((err / energy).sqrt())
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// `Var(rcrt_err) / Var(ecrt_err)`.
pub fn variance_ratio(rcrt_err: &[f64], ecrt_err: &[f64]) -> f64 {
    variance(rcrt_err) / variance(ecrt_err)
}

/// High-resolution ADC baseline: step `Δ₂/2^b` over enough cells to cover
/// the signal peak without folding.
#[derive(Debug, Clone, Copy)]
pub struct ConventionalAdc {
    quantizer: UniformQuantizer,
    bits: u32,
}

impl ConventionalAdc {
    pub fn new(config: &SystemConfig, peak: f64) -> Result<Self> {
        let rho = 2.0 * peak / config.delta2();
        let extra = if rho > 1.0 { ceil_log2(rho) as u32 } else { 0 };
        let bits = config.b() + extra;
        let step = config.delta2() / 2f64.powi(config.b() as i32);
        let levels = 1u64
            .checked_shl(bits)
            .filter(|_| bits < 64)
            .ok_or_else(|| invalid(format!("{bits}-bit conventional ADC is too wide")))?;
        let quantizer = UniformQuantizer::midrise(-0.5 * levels as f64 * step, step, levels)?;
        Ok(Self { quantizer, bits })
    }

    pub fn bits_per_sample(&self) -> u32 {
        self.bits
    }

    pub fn step(&self) -> f64 {
        self.quantizer.step()
    }

    pub fn bound(&self, e_max: f64) -> f64 {
        e_max + 0.5 * self.quantizer.step()
    }

    /// Quantises `g + e₁` directly.
    pub fn reconstruct(&self, frames: &[SampleFrame], exec: Exec) -> Vec<f64> {
        exec.map_slice(frames, |f| {
            let x = f.g + (f.y1_noisy - f.y1);
            self.quantizer.reconstruct(self.quantizer.quantize(x))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepScheme {
    Conventional,
    Rcrt,
    Ecrt,
}

impl SweepScheme {
    pub fn name(self) -> &'static str {
        match self {
            SweepScheme::Conventional => "conventional",
            SweepScheme::Rcrt => "rcrt",
            SweepScheme::Ecrt => "ecrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub scheme: SweepScheme,
    pub bits_per_sample: u32,
    pub bitrate_bps: f64,
    pub mae: f64,
    /// Worst-case guarantee, NaN when the scheme's stability condition fails.
    pub bound: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SWEEP_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.scheme.name(),
                r.bits_per_sample,
                r.bitrate_bps,
                r.mae,
                r.bound,
                r.seed
            );
        }
        out
    }

    pub fn find(&self, scheme: SweepScheme, bits_per_sample: u32) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.bits_per_sample == bits_per_sample)
    }

    /// Rows whose empirical MAE exceeds a finite bound.
    pub fn violations(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.bound.is_finite() && r.mae > r.bound).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepParams {
    pub signal: SignalSpec,
    /// Moduli, ε and sample period; `b` is overridden per row.
    pub base: SystemConfig,
    pub b_min: u32,
    pub b_max: u32,
    pub noise: NoiseSpec,
    pub trials: usize,
    /// Samples per trial; `None` uses one per Nyquist interval of the signal.
    pub samples: Option<usize>,
    pub exec: Exec,
}

impl SweepParams {
    /// Simulation setting: bandwidth 0.5 Hz, peak 2200 (ρ ≈ 14.67 against Δ₂ = 300),
    /// τ₁=15, τ₂=16, ε=18.75, noiseless, ten trials.
    pub fn simulation_defaults() -> Self {
        Self {
            signal: SignalSpec::new(0.5, 2200.0, 10_000.0, 1),
            base: SystemConfig::simulation(1).expect("valid"),
            b_min: 1,
            b_max: 16,
            noise: NoiseSpec::none(),
            trials: 10,
            samples: None,
            exec: Exec::default(),
        }
    }
}

struct TrialOutcome {
    // (scheme, b) -> mae, in a fixed order
    maes: Vec<(SweepScheme, u32, f64)>,
}

fn run_trial(params: &SweepParams, trial: usize) -> Result<TrialOutcome> {
    let spec = SignalSpec {
        seed: params.signal.seed.wrapping_add(trial as u64),
        ..params.signal
    };
    let signal = synthesize_signal(&spec)?;
    let noise = NoiseSpec {
        seed: params.noise.seed.wrapping_add(trial as u64),
        ..params.noise
    };
    let count = params
        .samples
        .unwrap_or_else(|| (spec.duration * spec.f_nyq()).floor() as usize);
    let frames = acquire_with(Exec::Sequential, &signal, &params.base, &noise, count)?;
    let g: Vec<f64> = frames.iter().map(|f| f.g).collect();

    let mut maes = Vec::new();
    for b in params.b_min..=params.b_max {
        let config = params.base.with_bits(b)?;
        let adc = ConventionalAdc::new(&config, spec.peak)?;
        maes.push((SweepScheme::Conventional, b, mae(&g, &adc.reconstruct(&frames, Exec::Sequential))?));
        if b >= rcrt_min_bits(&config) {
            let codec = RcrtCodec::new(config)?.with_exec(Exec::Sequential);
            let r = codec.decode(&codec.encode(&frames));
            maes.push((SweepScheme::Rcrt, b, mae(&g, &r.g_hat)?));
        }
        let codec = EcrtCodec::new(config).with_exec(Exec::Sequential);
        let r = codec.decode(&codec.encode(&frames));
        maes.push((SweepScheme::Ecrt, b, mae(&g, &r.g_hat)?));
    }
    Ok(TrialOutcome { maes })
}

/// MAE-versus-bitrate sweep for the three schemes, aggregated by the
/// maximum over trials.
pub fn fig2_sweep(params: &SweepParams) -> Result<SweepResult> {
    params.signal.validate()?;
    params.noise.validate()?;
    if params.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if params.b_min == 0 || params.b_min > params.b_max {
        return Err(invalid(format!("bad b range {}..={}", params.b_min, params.b_max)));
    }
    let outcomes: Vec<Result<TrialOutcome>> = params.exec.map_range(params.trials, |t| run_trial(params, t));
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let f_nyq = params.signal.f_nyq();
    let noise = &params.noise;
    let e1 = noise.e1_max;
    let e_any = e1.max(noise.e2_bound());
    let mut result = SweepResult::default();

    let ecrt_ok = noise.es_max < params.base.epsilon() / 4.0;
    if !ecrt_ok {
        result.warnings.push(format!(
            "es_max={} is not below epsilon/4={}; bit-efficient bound not applicable",
            noise.es_max,
            params.base.epsilon() / 4.0
        ));
    }
    if params.signal.peak >= params.base.max_amplitude() {
        result.warnings.push(format!(
            "peak {} is outside the recoverable range (< {})",
            params.signal.peak,
            params.base.max_amplitude()
        ));
    }

    let first = &outcomes[0].maes;
    for (i, &(scheme, b, _)) in first.iter().enumerate() {
        let worst = outcomes.iter().map(|o| o.maes[i].2).fold(0.0, f64::max);
        let config = params.base.with_bits(b)?;
        let in_range = params.signal.peak < config.max_amplitude();
        let (bits, bound) = match scheme {
            SweepScheme::Conventional => {
                let adc = ConventionalAdc::new(&config, params.signal.peak)?;
                (adc.bits_per_sample(), adc.bound(e1))
            }
            SweepScheme::Rcrt => {
                let stable = in_range && rcrt_is_stable(&config, e1 + noise.e2_bound());
                if !stable {
                    result
                        .warnings
                        .push(format!("b={b}: two-residue stability condition fails; bound not applicable"));
                }
                (2 * b, if stable { rcrt_error_bound(&config, e_any) } else { f64::NAN })
            }
            SweepScheme::Ecrt => (
                b + config.b_d(),
                if ecrt_ok && in_range { theorem1_bound(&config, e1) } else { f64::NAN },
            ),
        };
        result.rows.push(SweepRow {
            scheme,
            bits_per_sample: bits,
            bitrate_bps: bits as f64 * f_nyq,
            mae: worst,
            bound,
            seed: params.signal.seed,
        });
    }
    result.rows.sort_by(|a, b| {
        (a.scheme, a.bits_per_sample)
            .cmp(&(b.scheme, b.bits_per_sample))
    });
    Ok(result)
}

/// Reconstruction errors of both two-channel schemes on the same frames.
pub fn scheme_errors(frames: &[SampleFrame], config: &SystemConfig, exec: Exec) -> Result<(Vec<f64>, Vec<f64>)> {
    let rcrt = RcrtCodec::new(*config)?.with_exec(exec);
    let ecrt = EcrtCodec::new(*config).with_exec(exec);
    let r = rcrt.decode(&rcrt.encode(frames));
    let e = ecrt.decode(&ecrt.encode(frames));
    let err = |g_hat: &[f64]| frames.iter().zip(g_hat).map(|(f, x)| x - f.g).collect::<Vec<f64>>();
    Ok((err(&r.g_hat), err(&e.g_hat)))
}

/// `Var(ĝ_RCRT − g) / Var(ĝ_ECRT − g)` under quantisation-only noise.
pub fn variance_study(config: &SystemConfig, b: u32, samples: usize, seed: u64) -> Result<f64> {
    variance_study_with(Exec::default(), config, b, samples, seed)
}

pub fn variance_study_with(exec: Exec, config: &SystemConfig, b: u32, samples: usize, seed: u64) -> Result<f64> {
    if samples < 8 {
        return Err(invalid("variance study needs at least 8 samples"));
    }
    let config = config.with_bits(b)?;
    let f_nyq = 1.0 / config.sample_period();
    let spec = SignalSpec::new(0.5 * f_nyq, 0.97 * config.max_amplitude(), samples as f64 / f_nyq, seed);
    let signal = synthesize_signal(&spec)?;
    let frames = acquire_with(exec, &signal, &config, &NoiseSpec::none(), samples)?;
    let (r, e) = scheme_errors(&frames, &config, exec)?;
    Ok(variance_ratio(&r, &e))
}
