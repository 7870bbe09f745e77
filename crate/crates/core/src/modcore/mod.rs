//! Physical-layer simulation: centered modulo, test signals, two-channel
//! acquisition and bounded noise.

mod acquire;
mod fold;
mod signal;

pub use acquire::{acquire, acquire_with, frames_from_samples, frames_from_samples_with};
pub use acquire::{NoiseDistribution, NoiseSpec, SampleFrame};
pub use fold::{fold, fold_with_index, folding_index};
pub(crate) use fold::fold_raw;
pub use signal::{sinc, synthesize_signal, BandlimitedSignal, Signal, SignalSpec};

use crate::ecrt::{gcd, mod_inverse};
use crate::error::{Error, Result};

/// Widest code the codecs emit per channel.
pub const MAX_BITS: u32 = 32;

/// Two-channel modulo ADC parameters: `Δℓ = τℓ·ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    tau1: u32,
    tau2: u32,
    epsilon: f64,
    b: u32,
    sample_period: f64,
}

impl SystemConfig {
    pub fn new(tau1: u32, tau2: u32, epsilon: f64, b: u32, sample_period: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if tau1 < 2 || tau1 >= tau2 {
            return bad(format!("need 2 <= tau1 < tau2, got tau1={tau1} tau2={tau2}"));
        }
        if tau2 > u16::MAX as u32 {
            return bad(format!("tau2={tau2} exceeds {}", u16::MAX));
        }
        if gcd(tau1 as u64, tau2 as u64) != 1 {
            return bad(format!("tau1={tau1} and tau2={tau2} are not coprime"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {epsilon}"));
        }
        if !(1..=MAX_BITS).contains(&b) {
            return bad(format!("b must be in 1..={MAX_BITS}, got {b}"));
        }
        if !(sample_period.is_finite() && sample_period > 0.0) {
            return bad(format!("sample period must be positive, got {sample_period}"));
        }
        Ok(Self {
            tau1,
            tau2,
            epsilon,
            b,
            sample_period,
        })
    }

    /// Simulation setting: τ₁=15, τ₂=16, ε=18.75 (Δ₂=300), sampled at 1 Hz.
    pub fn simulation(b: u32) -> Result<Self> {
        Self::new(15, 16, 18.75, b, 1.0)
    }

    /// Prototype setting: τ₁=3, τ₂=4, ε=0.24 V (Δ₁=0.72 V, Δ₂=0.96 V).
    pub fn prototype(b: u32) -> Result<Self> {
        Self::new(3, 4, 0.24, b, 1.0 / 20e3)
    }

    pub fn with_bits(self, b: u32) -> Result<Self> {
        Self::new(self.tau1, self.tau2, self.epsilon, b, self.sample_period)
    }

    pub fn tau1(&self) -> u32 {
        self.tau1
    }

    pub fn tau2(&self) -> u32 {
        self.tau2
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn delta1(&self) -> f64 {
        self.tau1 as f64 * self.epsilon
    }

    pub fn delta2(&self) -> f64 {
        self.tau2 as f64 * self.epsilon
    }

    /// Difference-code width `⌈log₂(τ₁+τ₂)⌉`.
    pub fn b_d(&self) -> u32 {
        crate::rates::ceil_log2_u64((self.tau1 + self.tau2) as u64)
    }

    /// Inverse of τ₁ modulo τ₂.
    pub fn gamma1(&self) -> u32 {
        mod_inverse(self.tau1 as u64, self.tau2 as u64).expect("coprime by construction") as u32
    }

    /// Largest |d| a clean frame can produce: `⌈(τ₁+τ₂)/2⌉ − 1`.
    pub fn max_abs_d(&self) -> i64 {
        ((self.tau1 + self.tau2) as i64 + 1) / 2 - 1
    }

    /// Half-width of the recoverable amplitude range, `τ₁τ₂ε/2`.
    pub fn max_amplitude(&self) -> f64 {
        0.5 * self.tau1 as f64 * self.tau2 as f64 * self.epsilon
    }

    /// Whether `g` lies in the recoverable range `[−τ₁τ₂ε/2, τ₁τ₂ε/2)`.
    ///
    /// The two endpoints fold to identical residues on both channels, so only
    /// one of them can be kept.
    pub fn in_safe_range(&self, g: f64) -> bool {
        let m = self.max_amplitude();
        g >= -m && g < m
    }

    pub fn check_amplitudes(&self, samples: &[f64]) -> Result<()> {
        let m = self.max_amplitude();
        match samples.iter().position(|&g| !self.in_safe_range(g)) {
            Some(index) => Err(Error::AmplitudeOutOfRange {
                index,
                value: samples[index],
                low: -m,
                high: m,
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let c = SystemConfig::simulation(14).unwrap();
        assert_eq!(c.delta1(), 281.25);
        assert_eq!(c.delta2(), 300.0);
        assert_eq!(c.b_d(), 5);
        assert_eq!(c.gamma1(), 15);
        assert_eq!(c.max_abs_d(), 15);
        assert_eq!(c.max_amplitude(), 2250.0);

        let p = SystemConfig::prototype(3).unwrap();
        assert!((p.delta1() - 0.72).abs() < 1e-15);
        assert!((p.delta2() - 0.96).abs() < 1e-15);
        assert_eq!(p.b_d(), 3);
        assert_eq!(p.gamma1(), 3);
    }

    #[test]
    fn invariants_enforced() {
        assert!(SystemConfig::new(1, 3, 1.0, 4, 1.0).is_err());
        assert!(SystemConfig::new(4, 4, 1.0, 4, 1.0).is_err());
        assert!(SystemConfig::new(5, 4, 1.0, 4, 1.0).is_err());
        assert!(SystemConfig::new(4, 6, 1.0, 4, 1.0).is_err());
        assert!(SystemConfig::new(3, 4, 0.0, 4, 1.0).is_err());
        assert!(SystemConfig::new(3, 4, 1.0, 0, 1.0).is_err());
        assert!(SystemConfig::new(3, 4, 1.0, 33, 1.0).is_err());
        assert!(SystemConfig::new(3, 4, 1.0, 4, -1.0).is_err());
        assert!(SystemConfig::new(3, 5, 1.0, 1, 1.0).is_ok());
    }

    #[test]
    fn b_d_covers_all_differences() {
        for t1 in 2..40u32 {
            for t2 in t1 + 1..41 {
                if let Ok(c) = SystemConfig::new(t1, t2, 1.0, 4, 1.0) {
                    assert!(c.b_d() >= 2);
                    assert!((2 * c.max_abs_d() + 1) as u64 <= 1u64 << c.b_d());
                }
            }
        }
    }

    #[test]
    fn amplitude_guard() {
        let c = SystemConfig::simulation(14).unwrap();
        assert!(c.in_safe_range(-2250.0));
        assert!(!c.in_safe_range(2250.0));
        assert!(c.check_amplitudes(&[0.0, 2200.0, -2200.0]).is_ok());
        match c.check_amplitudes(&[0.0, 22000.0]) {
            Err(Error::AmplitudeOutOfRange { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
