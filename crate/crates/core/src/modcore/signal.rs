use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

const MIN_KERNELS: usize = 8;

/// Anything that can be sampled in continuous time.
pub trait Signal: Sync {
    fn eval(&self, t: f64) -> f64;

    /// Sample at `k·period`.
    fn sample(&self, k: usize, period: f64) -> f64 {
        self.eval(k as f64 * period)
    }
}

impl<F> Signal for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Parameters of a synthetic bandlimited test signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    /// One-sided bandwidth in hertz.
    pub bandwidth: f64,
    /// Target peak amplitude on the Nyquist grid.
    pub peak: f64,
    /// Duration in seconds; one kernel is placed per Nyquist interval.
    pub duration: f64,
    pub seed: u64,
}

impl SignalSpec {
    pub fn new(bandwidth: f64, peak: f64, duration: f64, seed: u64) -> Self {
        Self {
            bandwidth,
            peak,
            duration,
            seed,
        }
    }

    pub fn f_nyq(&self) -> f64 {
        2.0 * self.bandwidth
    }

    fn kernel_count(&self) -> usize {
        (self.duration * self.f_nyq()).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bandwidth", self.bandwidth),
            ("peak", self.peak),
            ("duration", self.duration),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.kernel_count() < MIN_KERNELS {
            return Err(invalid(format!(
                "duration {} s holds fewer than {MIN_KERNELS} Nyquist intervals",
                self.duration
            )));
        }
        Ok(())
    }
}

/// `sin(πx)/(πx)`, exactly zero at nonzero integers.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let k = x.round();
    let frac = x - k;
    if frac == 0.0 {
        return 0.0;
    }
    let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (std::f64::consts::PI * frac).sin() / (std::f64::consts::PI * x)
}

/// Finite sum of sinc kernels centred on the Nyquist grid `m / f_NYQ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedSignal {
    f_nyq: f64,
    coeffs: Vec<f64>,
}

impl BandlimitedSignal {
    pub fn from_coefficients(f_nyq: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(f_nyq.is_finite() && f_nyq > 0.0) {
            return Err(invalid(format!("Nyquist rate must be positive, got {f_nyq}")));
        }
        Ok(Self { f_nyq, coeffs })
    }

    pub fn f_nyq(&self) -> f64 {
        self.f_nyq
    }

    /// Kernel weights; these are also the values on the Nyquist grid.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    fn at_grid(&self, m: i64) -> f64 {
        usize::try_from(m)
            .ok()
            .and_then(|i| self.coeffs.get(i))
            .copied()
            .unwrap_or(0.0)
    }
}

impl Signal for BandlimitedSignal {
    fn eval(&self, t: f64) -> f64 {
        let u = t * self.f_nyq;
        if u.fract() == 0.0 {
            return self.at_grid(u as i64);
        }
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * sinc(u - m as f64))
            .sum()
    }

    fn sample(&self, k: usize, period: f64) -> f64 {
        let ratio = period * self.f_nyq;
        let stride = ratio.round();
        if stride >= 1.0 && (ratio - stride).abs() <= 1e-12 * stride {
            return self.at_grid(k as i64 * stride as i64);
        }
        self.eval(k as f64 * period)
    }
}

/// Seeded random-coefficient sinc mixture, rescaled so the largest
/// Nyquist-grid magnitude equals `spec.peak`.
pub fn synthesize_signal(spec: &SignalSpec) -> Result<BandlimitedSignal> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.kernel_count();
    let mut coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return Err(invalid("degenerate all-zero coefficient draw"));
    }
    let scale = spec.peak / max;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    BandlimitedSignal::from_coefficients(spec.f_nyq(), coeffs)
}
