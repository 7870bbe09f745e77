//! Property suites run by `ecrt verify`.
//!
//! Each suite compares the codec against an independent computation:
//! interval enumeration for reachable folding-index pairs, direct dyadic
//! membership for the overhead case split, and ground-truth frames for the
//! Monte Carlo bound checks.

use std::fmt;

use crate::ecrt::{gcd, theorem1_bound, CrtUnfolder, EcrtCodec};
use crate::error::Result;
use crate::experiments::{mae, variance_study};
use crate::modcore::{acquire, synthesize_signal, NoiseSpec, SignalSpec, SystemConfig};
use crate::rates::{conventional_bits, corollary1_overhead, ecrt_bits};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Corollary,
    CrtOracle,
    Variance,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bounds" => Some(Suite::Bounds),
            "corollary" => Some(Suite::Corollary),
            "crt-oracle" => Some(Suite::CrtOracle),
            "variance" => Some(Suite::Variance),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bounds => "bounds",
            Suite::Corollary => "corollary",
            Suite::CrtOracle => "crt-oracle",
            Suite::Variance => "variance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", c.name, c.detail)?;
        }
        let verdict = if self.passed() { "passed" } else { "FAILED" };
        write!(f, "suite {} {verdict}", self.suite.name())
    }
}

/// Options for the Monte Carlo bound suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOptions {
    pub config: SystemConfig,
    pub peak: f64,
    pub b_min: u32,
    pub b_max: u32,
    pub seeds: u64,
    pub samples: usize,
    pub e1_max: f64,
    /// Difference-path noise, applied with alternating worst-case sign.
    pub es_max: f64,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            config: SystemConfig::simulation(1).expect("valid"),
            peak: 2200.0,
            b_min: 1,
            b_max: 16,
            seeds: 10,
            samples: 10_000,
            e1_max: 0.0,
            es_max: 0.0,
        }
    }
}

pub fn bounds_suite(opts: &BoundsOptions) -> Result<Report> {
    let mut checks = Vec::new();
    for b in opts.b_min..=opts.b_max {
        let config = opts.config.with_bits(b)?;
        let codec = EcrtCodec::new(config);
        let bound = theorem1_bound(&config, opts.e1_max);
        let mut worst = 0.0f64;
        let mut counterexample = None;
        for seed in 0..opts.seeds {
            let spec = SignalSpec::new(0.5 / config.sample_period(), opts.peak, opts.samples as f64 * config.sample_period(), seed);
            let signal = synthesize_signal(&spec)?;
            let noise = NoiseSpec {
                e1_max: opts.e1_max,
                es_max: opts.es_max,
                e2_max: None,
                distribution: crate::modcore::NoiseDistribution::WorstCaseSign,
                seed,
            };
            let frames = acquire(&signal, &config, &noise, opts.samples)?;
            let r = codec.decode(&codec.encode(&frames));
            let g: Vec<f64> = frames.iter().map(|f| f.g).collect();
            worst = worst.max(mae(&g, &r.g_hat)?);
            if counterexample.is_none() {
                counterexample = frames.iter().enumerate().find_map(|(k, f)| {
                    let err = (r.g_hat[k] - f.g).abs();
                    (r.d_hat[k] != f.d || r.n1_hat[k] != f.n1 || err > bound).then(|| {
                        format!(
                            "seed {seed} k={k}: g={} d={} d_hat={} n1={} n1_hat={} |err|={err:.6e}",
                            f.g, f.d, r.d_hat[k], f.n1, r.n1_hat[k]
                        )
                    })
                });
            }
        }
        checks.push(Check {
            name: format!("b={b}"),
            passed: counterexample.is_none(),
            detail: counterexample.unwrap_or_else(|| format!("mae {worst:.6e} <= bound {bound:.6e}, indices exact")),
        });
    }
    Ok(Report { suite: Suite::Bounds, checks })
}

/// Overhead from dyadic-interval membership, without logarithms.
fn dyadic_overhead(rho: f64) -> u32 {
    let mut n = 1;
    while 2f64.powi(n) < rho {
        n += 1;
    }
    if rho > 2f64.powi(n) - 1.0 {
        2
    } else {
        1
    }
}

pub fn corollary_suite(rho_max: f64, grid_step: f64, b_max: u32) -> Result<Report> {
    let steps = (rho_max / grid_step).round() as u64;
    let start = (1.0 / grid_step).round() as u64 + 1;
    let mut mismatch = None;
    let mut scanned = 0u64;
    'scan: for i in start..=steps {
        let rho = i as f64 * grid_step;
        let expect = dyadic_overhead(rho);
        let stated = corollary1_overhead(rho)?;
        if stated != expect {
            mismatch = Some(format!("rho={rho}: case split gives {stated}, dyadic membership {expect}"));
            break;
        }
        for b in 1..=b_max {
            let got = ecrt_bits(b, rho)? - conventional_bits(b, rho)?;
            scanned += 1;
            if got != expect {
                mismatch = Some(format!("rho={rho} b={b}: B_ECRT - B_c = {got}, expected {expect}"));
                break 'scan;
            }
        }
    }
    Ok(Report {
        suite: Suite::Corollary,
        checks: vec![Check {
            name: format!("overhead over (1, {rho_max}] step {grid_step}, b<={b_max}"),
            passed: mismatch.is_none(),
            detail: mismatch.unwrap_or_else(|| format!("{scanned} (rho, b) points agree")),
        }],
    })
}

/// Reachable `(n₁, n₂)` for `g ∈ [−τ₁τ₂ε/2, τ₁τ₂ε/2)`, with the reachable
/// interval of `2y₁/ε` for each pair. Integer arithmetic in units of ε/2.
pub fn reachable_pairs(tau1: i64, tau2: i64) -> Vec<(i64, i64, i64, i64)> {
    let m = tau1 * tau2;
    let mut out = Vec::new();
    for n1 in -tau2..=tau2 {
        for n2 in -tau1..=tau1 {
            let lo = (tau1 * (2 * n1 - 1)).max(tau2 * (2 * n2 - 1)).max(-m);
            let hi = (tau1 * (2 * n1 + 1)).min(tau2 * (2 * n2 + 1)).min(m);
            if lo < hi {
                out.push((n1, n2, lo - 2 * tau1 * n1, hi - 2 * tau1 * n1));
            }
        }
    }
    out
}

pub fn crt_oracle_suite(tau_max: u32) -> Result<Report> {
    let mut checks = Vec::new();
    let mut pairs = 0usize;
    let mut first_failure = None;
    for t2 in 3..=tau_max {
        for t1 in 2..t2 {
            if gcd(t1 as u64, t2 as u64) != 1 {
                continue;
            }
            let config = SystemConfig::new(t1, t2, 1.0, 8, 1.0)?;
            let unfolder = CrtUnfolder::new(&config);
            let (t1, t2) = (t1 as i64, t2 as i64);
            for (n1, n2, y_lo, y_hi) in reachable_pairs(t1, t2) {
                pairs += 1;
                let d = t1 * n1 - t2 * n2;
                let mut fail = |why: String| {
                    if first_failure.is_none() {
                        first_failure = Some(format!("tau=({t1},{t2}) n=({n1},{n2}) d={d}: {why}"));
                    }
                };
                if d.abs() > config.max_abs_d() {
                    fail(format!("|d| exceeds {}", config.max_abs_d()));
                }
                let r = unfolder.residue(d);
                if r != n1.rem_euclid(t2) {
                    fail(format!("residue {r} != n1 mod tau2"));
                }
                // every residue sign the reachable y₁ interval admits
                let mut probes = vec![y_lo as f64];
                let mid = 0.5 * (y_lo + y_hi) as f64;
                probes.push(mid);
                probes.push((y_hi as f64).next_down());
                for y in probes {
                    let n1_hat = unfolder.unfold(r, y);
                    if n1_hat != n1 {
                        fail(format!("unfold gives {n1_hat} at 2y1/eps={y}"));
                    }
                }
            }
        }
    }
    checks.push(Check {
        name: format!("coprime pairs with tau2 <= {tau_max}"),
        passed: first_failure.is_none(),
        detail: first_failure.unwrap_or_else(|| format!("{pairs} reachable index pairs recovered")),
    });
    Ok(Report { suite: Suite::CrtOracle, checks })
}

pub fn variance_suite(samples: usize, seed: u64) -> Result<Report> {
    let config = SystemConfig::simulation(8)?;
    let ratio = variance_study(&config, 8, samples, seed)?;
    Ok(Report {
        suite: Suite::Variance,
        checks: vec![Check {
            name: format!("Var ratio, tau=(15,16), b=8, {samples} samples"),
            passed: (0.40..=0.65).contains(&ratio),
            detail: format!("ratio {ratio:.4} (accepted [0.40, 0.65])"),
        }],
    })
}
