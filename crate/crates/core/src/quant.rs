//! Uniform scalar quantisers.
//!
//! The residue path uses a midrise quantiser over `[-Δ/2, Δ/2)` with `2^b`
//! cells, giving `|error| ≤ Δ/2^{b+1}` for in-range inputs. The difference
//! path uses a midtread quantiser whose reproduction points are integer
//! multiples of the step, so a code is an integer index plus a fixed offset.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerStyle {
    /// Zero is a decision boundary (reproduction at cell centres).
    Midrise,
    /// Zero is a reproduction point (reproduction at multiples of the step).
    Midtread,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformQuantizer {
    range_low: f64,
    step: f64,
    levels: u64,
    style: QuantizerStyle,
    min_code: i64,
    /// Midrise only: `range_low / step` when it is a whole number.
    low_index: Option<f64>,
}

fn check_levels(levels: u64) -> Result<()> {
    if levels == 0 || !levels.is_power_of_two() {
        return Err(invalid(format!("levels must be a power of two, got {levels}")));
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    Ok(())
}

impl UniformQuantizer {
    /// Midrise quantiser with cells `[range_low + i·step, range_low + (i+1)·step)`.
    pub fn midrise(range_low: f64, step: f64, levels: u64) -> Result<Self> {
        check_step(step)?;
        check_levels(levels)?;
        if !range_low.is_finite() {
            return Err(invalid("range_low must be finite"));
        }
        let offset = range_low / step;
        let low_index = (offset.fract() == 0.0 && offset * step == range_low).then_some(offset);
        Ok(Self {
            range_low,
            step,
            levels,
            style: QuantizerStyle::Midrise,
            min_code: 0,
            low_index,
        })
    }

    /// `bits`-bit midrise quantiser covering `[-span/2, span/2)`.
    pub fn midrise_centered(span: f64, bits: u32) -> Result<Self> {
        if !(1..=63).contains(&bits) {
            return Err(invalid(format!("bits must be in 1..=63, got {bits}")));
        }
        let levels = 1u64 << bits;
        Self::midrise(-0.5 * span, span / levels as f64, levels)
    }

    /// Midtread quantiser; code `c` reproduces `(c + min_code)·step`.
    pub fn midtread(step: f64, min_code: i64, levels: u64) -> Result<Self> {
        check_step(step)?;
        check_levels(levels)?;
        Ok(Self {
            range_low: min_code as f64 * step,
            step,
            levels,
            style: QuantizerStyle::Midtread,
            min_code,
            low_index: None,
        })
    }

    pub fn range_low(&self) -> f64 {
        self.range_low
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn levels(&self) -> u64 {
        self.levels
    }

    pub fn style(&self) -> QuantizerStyle {
        self.style
    }

    /// Signed index of code 0 (midtread; 0 for midrise).
    pub fn min_code(&self) -> i64 {
        self.min_code
    }

    /// Saturating encode: out-of-range inputs map to the nearest extreme code.
    pub fn quantize(&self, x: f64) -> u64 {
        let top = (self.levels - 1) as f64;
        match self.style {
            QuantizerStyle::Midrise => {
                let mut cell = ((x - self.range_low) / self.step).floor().clamp(0.0, top);
                // the subtraction can round x across a cell edge
                if cell > 0.0 && x < self.edge(cell) {
                    cell -= 1.0;
                } else if cell < top && x >= self.edge(cell + 1.0) {
                    cell += 1.0;
                }
                cell as u64
            }
            QuantizerStyle::Midtread => {
                ((x / self.step).round() - self.min_code as f64).clamp(0.0, top) as u64
            }
        }
    }

    pub fn dequantize(&self, code: u64) -> Result<f64> {
        if code >= self.levels {
            return Err(invalid(format!(
                "code {code} out of range for {} levels",
                self.levels
            )));
        }
        Ok(self.reconstruct(code))
    }

    #[inline]
    pub(crate) fn reconstruct(&self, code: u64) -> f64 {
        match self.style {
            QuantizerStyle::Midrise => self.edge(code as f64 + 0.5),
            QuantizerStyle::Midtread => (code as i64 + self.min_code) as f64 * self.step,
        }
    }

    /// Lower edge of midrise cell `i` (fractional `i` gives interior points).
    /// When `range_low` is a whole number of steps this is a single rounding.
    #[inline]
    fn edge(&self, i: f64) -> f64 {
        match self.low_index {
            Some(k) => (i + k) * self.step,
            None => self.range_low + i * self.step,
        }
    }

    /// Signed index `round(x/step)` represented by a midtread code.
    pub fn index_of(&self, code: u64) -> i64 {
        code as i64 + self.min_code
    }
}
