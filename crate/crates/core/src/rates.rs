//! Closed-form bit budgets and bitrates for the conventional ADC, the
//! two-residue baseline, the bit-efficient codec and single-channel
//! one-bit-side-information sampling.

use std::fmt::Write as _;

use crate::error::{invalid, Result};

/// The six `(b, ρ)` rows of the published rate table.
pub const TABLE1_ROWS: [(u32, f64); 6] = [(3, 5.0), (3, 8.0), (3, 10.0), (6, 5.0), (6, 8.0), (6, 10.0)];

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2_u64(n: u64) -> u32 {
    assert!(n >= 1, "log2 of zero");
    u64::BITS - (n - 1).leading_zeros()
}

/// Smallest integer `k` with `2^k ≥ x`, for `x > 0`.
pub fn ceil_log2(x: f64) -> i32 {
    assert!(x.is_finite() && x > 0.0, "log2 of non-positive {x}");
    let mut k = x.log2().ceil() as i32;
    while 2f64.powi(k) < x {
        k += 1;
    }
    while 2f64.powi(k - 1) >= x {
        k -= 1;
    }
    k
}

/// Amplitude scaling factor `ρ = 2‖g‖∞/Δ`.
pub fn rho(peak: f64, delta: f64) -> f64 {
    2.0 * peak / delta
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 1.0) {
        return Err(invalid(format!("rho must exceed 1, got {rho}")));
    }
    Ok(())
}

fn check_b(b: u32) -> Result<()> {
    if b == 0 {
        return Err(invalid("b must be at least 1"));
    }
    Ok(())
}

/// Consecutive moduli `(⌈ρ⌉, ⌈ρ⌉+1)` that maximise ε for a given ρ.
pub fn corollary_moduli(rho: f64) -> Result<(u32, u32)> {
    check_rho(rho)?;
    let t1 = rho.ceil() as u32;
    Ok((t1, t1 + 1))
}

/// `B_c = b + ⌈log₂ρ⌉`
pub fn conventional_bits(b: u32, rho: f64) -> Result<u32> {
    check_b(b)?;
    check_rho(rho)?;
    Ok(b + ceil_log2(rho) as u32)
}

/// `B_ECRT = b + ⌈log₂(2⌈ρ⌉+1)⌉` with the consecutive-moduli rule.
pub fn ecrt_bits(b: u32, rho: f64) -> Result<u32> {
    check_b(b)?;
    let (t1, t2) = corollary_moduli(rho)?;
    Ok(b + ceil_log2_u64((t1 + t2) as u64))
}

/// `B_RCRT = 2b`, with `b` raised to the stability floor `⌈log₂(τ₁+τ₂)⌉`.
pub fn rcrt_bits(b: u32, rho: f64) -> Result<u32> {
    check_b(b)?;
    let (t1, t2) = corollary_moduli(rho)?;
    Ok(2 * b.max(ceil_log2_u64((t1 + t2) as u64)))
}

/// `(b+1)·OF·f_NYQ`
pub fn sosi_rate_with_of(b: u32, oversampling: f64, f_nyq: f64) -> f64 {
    (b as f64 + 1.0) * oversampling * f_nyq
}

/// Rate at the smallest admissible oversampling factor `OF = ρ + 2`.
pub fn sosi_rate(b: u32, rho: f64, f_nyq: f64) -> f64 {
    sosi_rate_with_of(b, rho + 2.0, f_nyq)
}

/// Overhead `B_ECRT − B_c` from the dyadic case split: 1 on
/// `(2^{n−1}, 2^n − 1]`, 2 on `(2^n − 1, 2^n]`.
pub fn corollary1_overhead(rho: f64) -> Result<u32> {
    check_rho(rho)?;
    let n = ceil_log2(rho);
    Ok(if rho <= 2f64.powi(n) - 1.0 { 1 } else { 2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub b: u32,
    pub rho: f64,
    pub f_nyq: f64,
    pub bits_conventional: u32,
    pub bits_rcrt: u32,
    pub bits_ecrt: u32,
    pub rate_conventional: f64,
    pub rate_sosi: f64,
    pub rate_ecrt: f64,
    pub overhead_ecrt: u32,
}

pub fn rate_report(b: u32, rho: f64, f_nyq: f64) -> Result<RateReport> {
    if !(f_nyq.is_finite() && f_nyq > 0.0) {
        return Err(invalid(format!("f_nyq must be positive, got {f_nyq}")));
    }
    let bits_conventional = conventional_bits(b, rho)?;
    let bits_ecrt = ecrt_bits(b, rho)?;
    Ok(RateReport {
        b,
        rho,
        f_nyq,
        bits_conventional,
        bits_rcrt: rcrt_bits(b, rho)?,
        bits_ecrt,
        rate_conventional: bits_conventional as f64 * f_nyq,
        rate_sosi: sosi_rate(b, rho, f_nyq),
        rate_ecrt: bits_ecrt as f64 * f_nyq,
        overhead_ecrt: bits_ecrt - bits_conventional,
    })
}

pub fn table1(rows: &[(u32, f64)], f_nyq: f64) -> Result<Vec<RateReport>> {
    rows.iter().map(|&(b, rho)| rate_report(b, rho, f_nyq)).collect()
}

/// CSV with columns `b,rho,R_C,R_SOSI,R_ECRT`.
pub fn table_csv(reports: &[RateReport]) -> String {
    let mut out = String::from("b,rho,R_C,R_SOSI,R_ECRT\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.b, r.rho, r.rate_conventional, r.rate_sosi, r.rate_ecrt
        );
    }
    out
}

/// Parses `"b:rho,b:rho,..."`.
pub fn parse_rows(spec: &str) -> Result<Vec<(u32, f64)>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (b, rho) = item
                .split_once(':')
                .ok_or_else(|| invalid(format!("row {item:?} is not of the form b:rho")))?;
            let b = b.trim().parse().map_err(|_| invalid(format!("bad b in {item:?}")))?;
            let rho = rho.trim().parse().map_err(|_| invalid(format!("bad rho in {item:?}")))?;
            Ok((b, rho))
        })
        .collect()
}
