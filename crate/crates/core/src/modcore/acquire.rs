use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fold_raw, Signal, SystemConfig};
use crate::error::{invalid, Result};
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseDistribution {
    /// Independent draws, uniform on `[-max, max]`.
    Uniform,
    /// Constant magnitude `max` with alternating sign. Channel 2 takes the
    /// opposite sign of channel 1 so `|e₂ − e₁|` reaches `2·max`.
    WorstCaseSign,
}

/// Bounds on the channel-1 folding noise `e₁` and the difference-path noise `e_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub e1_max: f64,
    pub es_max: f64,
    /// Channel-2 bound for the two-residue baseline; `None` reuses `e1_max`.
    pub e2_max: Option<f64>,
    pub distribution: NoiseDistribution,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            e1_max: 0.0,
            es_max: 0.0,
            e2_max: None,
            distribution: NoiseDistribution::Uniform,
            seed: 0,
        }
    }

    pub fn uniform(e1_max: f64, es_max: f64, seed: u64) -> Self {
        Self {
            e1_max,
            es_max,
            e2_max: None,
            distribution: NoiseDistribution::Uniform,
            seed,
        }
    }

    pub fn worst_case(e1_max: f64, es_max: f64) -> Self {
        Self {
            e1_max,
            es_max,
            e2_max: None,
            distribution: NoiseDistribution::WorstCaseSign,
            seed: 0,
        }
    }

    pub fn with_e2(mut self, e2_max: f64) -> Self {
        self.e2_max = Some(e2_max);
        self
    }

    pub fn e2_bound(&self) -> f64 {
        self.e2_max.unwrap_or(self.e1_max)
    }

    pub fn is_noiseless(&self) -> bool {
        self.e1_max == 0.0 && self.es_max == 0.0 && self.e2_bound() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e1_max", self.e1_max),
            ("es_max", self.es_max),
            ("e2_max", self.e2_bound()),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Noise triples `(e₁, e₂, e_s)` for samples `0..count`.
    fn draw(&self, count: usize) -> Vec<[f64; 3]> {
        let bounds = [self.e1_max, self.e2_bound(), self.es_max];
        match self.distribution {
            NoiseDistribution::WorstCaseSign => (0..count)
                .map(|k| {
                    let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                    [s * bounds[0], -s * bounds[1], s * bounds[2]]
                })
                .collect(),
            NoiseDistribution::Uniform => {
                let mut rngs: Vec<ChaCha8Rng> = (0..3u64)
                    .map(|stream| {
                        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
                        r.set_stream(stream + 1);
                        r
                    })
                    .collect();
                (0..count)
                    .map(|_| {
                        let mut e = [0.0; 3];
                        for (i, rng) in rngs.iter_mut().enumerate() {
                            if bounds[i] > 0.0 {
                                e[i] = rng.gen_range(-bounds[i]..=bounds[i]);
                            }
                        }
                        e
                    })
                    .collect()
            }
        }
    }
}

/// One sampling instant of the two-channel front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleFrame {
    pub g: f64,
    pub y1: f64,
    pub y2: f64,
    pub n1: i64,
    pub n2: i64,
    /// Normalised difference `(y₂ − y₁)/ε = τ₁n₁ − τ₂n₂`.
    pub d: i64,
    /// `ỹ₁ = y₁ + e₁`
    pub y1_noisy: f64,
    /// `ỹ₂ = y₂ + e₂`, used only by the two-residue baseline.
    pub y2_noisy: f64,
    /// `s̃ = (y₂ − y₁)/2 + e_s`
    pub s_noisy: f64,
}

impl SampleFrame {
    fn build(g: f64, config: &SystemConfig, e: [f64; 3]) -> Self {
        let (y1, n1) = fold_raw(g, config.delta1());
        let (y2, n2) = fold_raw(g, config.delta2());
        let d = config.tau1() as i64 * n1 - config.tau2() as i64 * n2;
        Self {
            g,
            y1,
            y2,
            n1,
            n2,
            d,
            y1_noisy: y1 + e[0],
            y2_noisy: y2 + e[1],
            s_noisy: 0.5 * (y2 - y1) + e[2],
        }
    }

    /// Clean scaled difference `(y₂ − y₁)/2`.
    pub fn s(&self) -> f64 {
        0.5 * (self.y2 - self.y1)
    }
}

pub fn acquire(
    signal: &impl Signal,
    config: &SystemConfig,
    noise: &NoiseSpec,
    count: usize,
) -> Result<Vec<SampleFrame>> {
    acquire_with(Exec::default(), signal, config, noise, count)
}

/// Samples `signal` at `k·T` for `k in 0..count` through both channels.
pub fn acquire_with(
    exec: Exec,
    signal: &impl Signal,
    config: &SystemConfig,
    noise: &NoiseSpec,
    count: usize,
) -> Result<Vec<SampleFrame>> {
    if count == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    noise.validate()?;
    let period = config.sample_period();
    let samples = exec.map_range(count, |k| signal.sample(k, period));
    frames_from_samples_with(exec, &samples, config, noise)
}

pub fn frames_from_samples(
    samples: &[f64],
    config: &SystemConfig,
    noise: &NoiseSpec,
) -> Result<Vec<SampleFrame>> {
    frames_from_samples_with(Exec::default(), samples, config, noise)
}

/// Front-end model applied to already-sampled values `g[k]`.
pub fn frames_from_samples_with(
    exec: Exec,
    samples: &[f64],
    config: &SystemConfig,
    noise: &NoiseSpec,
) -> Result<Vec<SampleFrame>> {
    noise.validate()?;
    if let Some(k) = samples.iter().position(|g| !g.is_finite()) {
        return Err(invalid(format!("sample {k} is not finite")));
    }
    let draws = noise.draw(samples.len());
    let pairs: Vec<(f64, [f64; 3])> = samples.iter().copied().zip(draws).collect();
    Ok(exec.map_slice(&pairs, |&(g, e)| SampleFrame::build(g, config, e)))
}
