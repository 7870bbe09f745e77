//! The bit-efficient two-channel codec.
//!
//! The transmitter sends the `b`-bit channel-1 residue code and a `b_d`-bit
//! code for the scaled difference `s̃ = εd/2 + e_s`. The receiver rounds the
//! difference back to the integer `d = τ₁n₁ − τ₂n₂`, recovers
//! `n₁ ≡ d·γ₁ (mod τ₂)` and rebuilds `ĝ = n₁Δ₁ + ŷ₁`.

use crate::error::{Error, Result};
use crate::modcore::{SampleFrame, SystemConfig};
use crate::par::Exec;
use crate::quant::UniformQuantizer;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiplicative inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {m}")));
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Maps an integer difference back to the channel-1 folding index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtUnfolder {
    tau2: i64,
    gamma1: i64,
}

impl CrtUnfolder {
    pub fn new(config: &SystemConfig) -> Self {
        Self {
            tau2: config.tau2() as i64,
            gamma1: config.gamma1() as i64,
        }
    }

    /// `(d·γ₁) mod τ₂` in `[0, τ₂)`.
    pub fn residue(&self, d: i64) -> i64 {
        (d * self.gamma1).rem_euclid(self.tau2)
    }

    /// Centered representative of residue `r`.
    ///
    /// For even τ₂ the class τ₂/2 holds both `+τ₂/2` and `−τ₂/2`. On the
    /// recoverable amplitude range the former only occurs with `y₁ < 0` and
    /// the latter with `y₁ ≥ 0`, so the sign of `ŷ₁` decides.
    pub fn unfold(&self, r: i64, y1_hat: f64) -> i64 {
        let half = self.tau2 / 2;
        if self.tau2 % 2 == 0 && r == half {
            if y1_hat < 0.0 {
                half
            } else {
                -half
            }
        } else if r < (self.tau2 + 1) / 2 {
            r
        } else {
            r - self.tau2
        }
    }

    pub fn folding_index(&self, d: i64, y1_hat: f64) -> i64 {
        self.unfold(self.residue(d), y1_hat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodedFrame {
    pub code_y1: u32,
    pub code_d: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub g_hat: Vec<f64>,
    pub n1_hat: Vec<i64>,
    /// Channel-2 indices; only the two-residue baseline estimates these.
    pub n2_hat: Option<Vec<i64>>,
    pub d_hat: Vec<i64>,
    /// Worst-case error guaranteed for the assumed noise level.
    pub error_bound: f64,
}

impl ReconstructionResult {
    pub(crate) fn from_parts(parts: Vec<(f64, i64, i64, i64)>, error_bound: f64, with_n2: bool) -> Self {
        let mut out = Self {
            g_hat: Vec::with_capacity(parts.len()),
            n1_hat: Vec::with_capacity(parts.len()),
            n2_hat: with_n2.then(|| Vec::with_capacity(parts.len())),
            d_hat: Vec::with_capacity(parts.len()),
            error_bound,
        };
        for (g, n1, n2, d) in parts {
            out.g_hat.push(g);
            out.n1_hat.push(n1);
            out.d_hat.push(d);
            if let Some(v) = out.n2_hat.as_mut() {
                v.push(n2);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.g_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_hat.is_empty()
    }
}

/// `‖e₁‖∞ + Δ₁/2^{b+1}`
pub fn theorem1_bound(config: &SystemConfig, e1_max: f64) -> f64 {
    e1_max + config.delta1() / 2f64.powi(config.b() as i32 + 1)
}

/// Encoder/decoder pair for one configuration, with γ₁ and both quantisers
/// prepared up front.
#[derive(Debug, Clone, Copy)]
pub struct EcrtCodec {
    config: SystemConfig,
    residue_q: UniformQuantizer,
    diff_q: UniformQuantizer,
    unfolder: CrtUnfolder,
    max_abs_d: i64,
    e1_max: f64,
    exec: Exec,
}

impl EcrtCodec {
    pub fn new(config: SystemConfig) -> Self {
        let max_abs_d = config.max_abs_d();
        let residue_q = UniformQuantizer::midrise_centered(config.delta1(), config.b())
            .expect("validated config");
        let diff_q = UniformQuantizer::midtread(0.5 * config.epsilon(), -max_abs_d, 1u64 << config.b_d())
            .expect("validated config");
        Self {
            config,
            residue_q,
            diff_q,
            unfolder: CrtUnfolder::new(&config),
            max_abs_d,
            e1_max: 0.0,
            exec: Exec::default(),
        }
    }

    /// Assumed `‖e₁‖∞` reported through [`ReconstructionResult::error_bound`].
    pub fn with_noise_bound(mut self, e1_max: f64) -> Self {
        self.e1_max = e1_max;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn residue_quantizer(&self) -> &UniformQuantizer {
        &self.residue_q
    }

    pub fn difference_quantizer(&self) -> &UniformQuantizer {
        &self.diff_q
    }

    pub fn bits_per_sample(&self) -> u32 {
        self.config.b() + self.config.b_d()
    }

    pub fn encode_frame(&self, frame: &SampleFrame) -> EncodedFrame {
        let code_d = self.diff_q.quantize(frame.s_noisy).min(2 * self.max_abs_d as u64);
        EncodedFrame {
            code_y1: self.residue_q.quantize(frame.y1_noisy) as u32,
            code_d: code_d as u32,
        }
    }

    pub fn encode(&self, frames: &[SampleFrame]) -> Vec<EncodedFrame> {
        self.exec.map_slice(frames, |f| self.encode_frame(f))
    }

    /// Encode after checking every ground-truth sample lies in the recoverable range.
    pub fn encode_checked(&self, frames: &[SampleFrame]) -> Result<Vec<EncodedFrame>> {
        let g: Vec<f64> = frames.iter().map(|f| f.g).collect();
        self.config.check_amplitudes(&g)?;
        Ok(self.encode(frames))
    }

    /// Returns `(ĝ, n̂₁, d̂)`.
    pub fn decode_frame(&self, frame: &EncodedFrame) -> (f64, i64, i64) {
        let d_hat = self
            .diff_q
            .index_of(frame.code_d as u64)
            .clamp(-self.max_abs_d, self.max_abs_d);
        let code_y1 = (frame.code_y1 as u64).min(self.residue_q.levels() - 1);
        let y1_hat = self.residue_q.reconstruct(code_y1);
        let n1_hat = self.unfolder.folding_index(d_hat, y1_hat);
        (n1_hat as f64 * self.config.delta1() + y1_hat, n1_hat, d_hat)
    }

    pub fn decode(&self, encoded: &[EncodedFrame]) -> ReconstructionResult {
        let parts = self.exec.map_slice(encoded, |f| {
            let (g, n1, d) = self.decode_frame(f);
            (g, n1, 0, d)
        });
        ReconstructionResult::from_parts(parts, theorem1_bound(&self.config, self.e1_max), false)
    }
}

pub fn ecrt_encode(frames: &[SampleFrame], config: &SystemConfig) -> Vec<EncodedFrame> {
    EcrtCodec::new(*config).encode(frames)
}

pub fn ecrt_decode(encoded: &[EncodedFrame], config: &SystemConfig) -> ReconstructionResult {
    EcrtCodec::new(*config).decode(encoded)
}
