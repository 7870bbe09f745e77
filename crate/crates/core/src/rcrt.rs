//! Two-residue baseline: both channels quantised with `b` bits, folding
//! indices recovered from the rounded residue difference, and the two
//! unfolded estimates averaged.

use crate::ecrt::{CrtUnfolder, ReconstructionResult};
use crate::error::{Error, Result};
use crate::modcore::{SampleFrame, SystemConfig};
use crate::par::Exec;
use crate::quant::UniformQuantizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RcrtEncodedFrame {
    pub code_y1: u32,
    pub code_y2: u32,
}

/// Smallest per-channel width the baseline accepts, `⌈log₂(τ₁+τ₂)⌉`.
pub fn rcrt_min_bits(config: &SystemConfig) -> u32 {
    config.b_d()
}

/// `‖e‖∞ + (Δ₁+Δ₂)/2^{b+2}`
pub fn rcrt_error_bound(config: &SystemConfig, e_max: f64) -> f64 {
    e_max + (config.delta1() + config.delta2()) / 2f64.powi(config.b() as i32 + 2)
}

/// Left side of the stability condition for `|e₂ − e₁| ≤ e_diff_max`.
pub fn rcrt_stability_lhs(config: &SystemConfig, e_diff_max: f64) -> f64 {
    e_diff_max + (config.delta1() + config.delta2()) / 2f64.powi(config.b() as i32 + 1)
}

/// Whether the stability condition `|e₂−e₁| + (Δ₁+Δ₂)/2^{b+1} < ε/2` holds.
pub fn rcrt_is_stable(config: &SystemConfig, e_diff_max: f64) -> bool {
    rcrt_stability_lhs(config, e_diff_max) < 0.5 * config.epsilon()
}

#[derive(Debug, Clone, Copy)]
pub struct RcrtCodec {
    config: SystemConfig,
    q1: UniformQuantizer,
    q2: UniformQuantizer,
    unfolder: CrtUnfolder,
    max_abs_d: i64,
    e_max: f64,
    exec: Exec,
}

impl RcrtCodec {
    pub fn new(config: SystemConfig) -> Result<Self> {
        let floor = rcrt_min_bits(&config);
        if config.b() < floor {
            return Err(Error::InvalidConfig(format!(
                "two-residue recovery needs b >= {floor} for tau1={} tau2={}, got b={}",
                config.tau1(),
                config.tau2(),
                config.b()
            )));
        }
        let q = |delta| UniformQuantizer::midrise_centered(delta, config.b()).expect("validated config");
        Ok(Self {
            config,
            q1: q(config.delta1()),
            q2: q(config.delta2()),
            unfolder: CrtUnfolder::new(&config),
            max_abs_d: config.max_abs_d(),
            e_max: 0.0,
            exec: Exec::default(),
        })
    }

    /// Assumed `‖e‖∞` over both channels, used for the reported bound.
    pub fn with_noise_bound(mut self, e_max: f64) -> Self {
        self.e_max = e_max;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn bits_per_sample(&self) -> u32 {
        2 * self.config.b()
    }

    pub fn encode_frame(&self, frame: &SampleFrame) -> RcrtEncodedFrame {
        RcrtEncodedFrame {
            code_y1: self.q1.quantize(frame.y1_noisy) as u32,
            code_y2: self.q2.quantize(frame.y2_noisy) as u32,
        }
    }

    pub fn encode(&self, frames: &[SampleFrame]) -> Vec<RcrtEncodedFrame> {
        self.exec.map_slice(frames, |f| self.encode_frame(f))
    }

    /// Returns `(ĝ, n̂₁, n̂₂, d̂)`.
    pub fn decode_frame(&self, frame: &RcrtEncodedFrame) -> (f64, i64, i64, i64) {
        let top = self.q1.levels() - 1;
        let y1 = self.q1.reconstruct((frame.code_y1 as u64).min(top));
        let y2 = self.q2.reconstruct((frame.code_y2 as u64).min(top));
        let d_hat = ((y2 - y1) / self.config.epsilon())
            .round()
            .clamp(-self.max_abs_d as f64, self.max_abs_d as f64) as i64;
        let n1 = self.unfolder.folding_index(d_hat, y1);
        let tau2 = self.config.tau2() as i64;
        let n2 = nearest_div(self.config.tau1() as i64 * n1 - d_hat, tau2);
        let g = 0.5 * (n1 as f64 * self.config.delta1() + y1 + n2 as f64 * self.config.delta2() + y2);
        (g, n1, n2, d_hat)
    }

    pub fn decode(&self, encoded: &[RcrtEncodedFrame]) -> ReconstructionResult {
        let parts = self.exec.map_slice(encoded, |f| self.decode_frame(f));
        ReconstructionResult::from_parts(parts, rcrt_error_bound(&self.config, self.e_max), true)
    }
}

/// Integer division rounded to nearest, ties toward +∞.
fn nearest_div(num: i64, den: i64) -> i64 {
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    if 2 * r >= den {
        q + 1
    } else {
        q
    }
}

pub fn rcrt_encode(frames: &[SampleFrame], config: &SystemConfig) -> Result<Vec<RcrtEncodedFrame>> {
    Ok(RcrtCodec::new(*config)?.encode(frames))
}

pub fn rcrt_decode(encoded: &[RcrtEncodedFrame], config: &SystemConfig) -> Result<ReconstructionResult> {
    Ok(RcrtCodec::new(*config)?.decode(encoded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecrt::theorem1_bound;
    use crate::modcore::{acquire, frames_from_samples, synthesize_signal, NoiseSpec, SignalSpec};

    #[test]
    fn bit_floor() {
        let c = SystemConfig::simulation(5).unwrap();
        assert!(RcrtCodec::new(c).is_ok());
        assert!(matches!(
            RcrtCodec::new(c.with_bits(4).unwrap()),
            Err(Error::InvalidConfig(_))
        ));
        assert_eq!(RcrtCodec::new(c).unwrap().bits_per_sample(), 10);
    }

    #[test]
    fn reference_sample() {
        let c = SystemConfig::simulation(14).unwrap();
        let codec = RcrtCodec::new(c).unwrap();
        let frames = frames_from_samples(&[1000.0], &c, &NoiseSpec::none()).unwrap();
        let e = codec.encode_frame(&frames[0]);
        let y1 = codec.q1.dequantize(e.code_y1 as u64).unwrap();
        let y2 = codec.q2.dequantize(e.code_y2 as u64).unwrap();
        assert!((y1 + 125.0).abs() <= c.delta1() / 2f64.powi(15));
        assert!((y2 - 100.0).abs() <= c.delta2() / 2f64.powi(15));
        let (g, n1, n2, d) = codec.decode_frame(&e);
        assert_eq!((n1, n2, d), (4, 3, 12));
        assert_eq!(g, 0.5 * (1125.0 + y1 + 900.0 + y2));
        assert!((g - 1000.0).abs() <= rcrt_error_bound(&c, 0.0));
    }

    #[test]
    fn zero_signal() {
        let c = SystemConfig::simulation(8).unwrap();
        let frames = frames_from_samples(&[0.0; 4], &c, &NoiseSpec::none()).unwrap();
        let r = rcrt_decode(&rcrt_encode(&frames, &c).unwrap(), &c).unwrap();
        for k in 0..4 {
            assert_eq!((r.d_hat[k], r.n1_hat[k], r.n2_hat.as_ref().unwrap()[k]), (0, 0, 0));
            assert!(r.g_hat[k].abs() <= rcrt_error_bound(&c, 0.0));
        }
    }

    #[test]
    fn bound_values() {
        let c = SystemConfig::simulation(14).unwrap();
        assert_eq!(rcrt_error_bound(&c, 0.0), 581.25 / 65536.0);
        assert!((rcrt_error_bound(&c, 0.0) - 8.869e-3).abs() < 5e-7);
        assert!(rcrt_error_bound(&c.with_bits(32).unwrap(), 3.0) - 3.0 < 1e-6);
        // with Δ₂ = Δ₁ the two bounds coincide algebraically
        let d1 = c.delta1();
        let rhs = 0.0 + (d1 + d1) / 2f64.powi(16);
        assert_eq!(rhs, theorem1_bound(&c, 0.0));
    }

    #[test]
    fn stable_under_condition() {
        let c = SystemConfig::simulation(8).unwrap();
        let e = 4.0;
        assert!(rcrt_is_stable(&c, 2.0 * e));
        let sig = synthesize_signal(&SignalSpec::new(0.5, 2200.0, 20_000.0, 77)).unwrap();
        for noise in [NoiseSpec::uniform(e, 0.0, 1), NoiseSpec::worst_case(e, 0.0)] {
            let frames = acquire(&sig, &c, &noise, 20_000).unwrap();
            let r = rcrt_decode(&rcrt_encode(&frames, &c).unwrap(), &c).unwrap();
            let n2 = r.n2_hat.as_ref().unwrap();
            for (k, f) in frames.iter().enumerate() {
                assert_eq!((r.n1_hat[k], n2[k]), (f.n1, f.n2));
                assert!((r.g_hat[k] - f.g).abs() <= rcrt_error_bound(&c, e));
            }
        }
    }

    #[test]
    fn nearest_division() {
        assert_eq!(nearest_div(48, 16), 3);
        assert_eq!(nearest_div(55, 16), 3);
        assert_eq!(nearest_div(56, 16), 4);
        assert_eq!(nearest_div(-55, 16), -3);
        assert_eq!(nearest_div(-57, 16), -4);
    }
}
