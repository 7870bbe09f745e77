//! Packed wire format for encoded frame sequences.
//!
//! Layout (all multi-byte fields little-endian):
//!
//! | offset | size | field           |
//! |--------|------|-----------------|
//! | 0      | 4    | magic `"ECRT"`  |
//! | 4      | 1    | version (1)     |
//! | 5      | 1    | scheme (0 = bit-efficient, 1 = two-residue) |
//! | 6      | 2    | τ₁              |
//! | 8      | 2    | τ₂              |
//! | 10     | 1    | b               |
//! | 11     | 1    | b_d             |
//! | 12     | 8    | ε (f64)         |
//! | 20     | 8    | sample period (f64) |
//! | 28     | 8    | sample count (u64)  |
//!
//! The payload follows immediately: per sample, the channel-1 code and then
//! either the difference code or the channel-2 code, packed LSB-first with no
//! padding between samples. The last byte is zero-padded.

use crate::ecrt::EncodedFrame;
use crate::error::{Error, Result};
use crate::modcore::SystemConfig;
use crate::rcrt::RcrtEncodedFrame;

pub const MAGIC: [u8; 4] = *b"ECRT";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ecrt = 0,
    Rcrt = 1,
}

impl Scheme {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Scheme::Ecrt),
            1 => Some(Scheme::Rcrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ecrt => "ecrt",
            Scheme::Rcrt => "rcrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub scheme: Scheme,
    pub tau1: u16,
    pub tau2: u16,
    pub b: u8,
    pub b_d: u8,
    pub epsilon: f64,
    pub sample_period: f64,
    pub count: u64,
}

impl StreamHeader {
    pub fn new(config: &SystemConfig, scheme: Scheme, count: u64) -> Self {
        Self {
            scheme,
            tau1: config.tau1() as u16,
            tau2: config.tau2() as u16,
            b: config.b() as u8,
            b_d: config.b_d() as u8,
            epsilon: config.epsilon(),
            sample_period: config.sample_period(),
            count,
        }
    }

    pub fn config(&self) -> Result<SystemConfig> {
        let config = SystemConfig::new(
            self.tau1 as u32,
            self.tau2 as u32,
            self.epsilon,
            self.b as u32,
            self.sample_period,
        )?;
        if config.b_d() != self.b_d as u32 {
            return Err(Error::InvalidConfig(format!(
                "header b_d={} but tau1+tau2={} needs {}",
                self.b_d,
                self.tau1 + self.tau2,
                config.b_d()
            )));
        }
        Ok(config)
    }

    /// `(channel-1 width, second-code width)` in bits.
    pub fn code_widths(&self) -> (u32, u32) {
        match self.scheme {
            Scheme::Ecrt => (self.b as u32, self.b_d as u32),
            Scheme::Rcrt => (self.b as u32, self.b as u32),
        }
    }

    pub fn bits_per_sample(&self) -> u32 {
        let (a, b) = self.code_widths();
        a + b
    }

    /// `⌈count · bits_per_sample / 8⌉`
    pub fn payload_len(&self) -> usize {
        (self.count as u128 * self.bits_per_sample() as u128).div_ceil(8) as usize
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.scheme as u8);
        out.extend_from_slice(&self.tau1.to_le_bytes());
        out.extend_from_slice(&self.tau2.to_le_bytes());
        out.push(self.b);
        out.push(self.b_d);
        out.extend_from_slice(&self.epsilon.to_le_bytes());
        out.extend_from_slice(&self.sample_period.to_le_bytes());
        out.extend_from_slice(&self.count.to_le_bytes());
    }

    fn read(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(malformed(
                bytes.len(),
                format!("header truncated: need {} more bytes", HEADER_LEN - bytes.len()),
            ));
        }
        if bytes[0..4] != MAGIC {
            return Err(malformed(0, format!("bad magic {:02x?}", &bytes[0..4])));
        }
        if bytes[4] != VERSION {
            return Err(malformed(4, format!("unsupported version {}", bytes[4])));
        }
        let scheme = Scheme::from_byte(bytes[5])
            .ok_or_else(|| malformed(5, format!("unknown scheme {}", bytes[5])))?;
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let header = Self {
            scheme,
            tau1: u16_at(6),
            tau2: u16_at(8),
            b: bytes[10],
            b_d: bytes[11],
            epsilon: f64_at(12),
            sample_period: f64_at(20),
            count: u64::from_le_bytes(bytes[28..36].try_into().unwrap()),
        };
        header
            .config()
            .map_err(|e| malformed(6, format!("invalid configuration: {e}")))?;
        Ok(header)
    }
}

fn malformed(offset: usize, reason: String) -> Error {
    Error::MalformedStream { offset, reason }
}

/// Encoded frames of either scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Ecrt(Vec<EncodedFrame>),
    Rcrt(Vec<RcrtEncodedFrame>),
}

impl Payload {
    pub fn len(&self) -> usize {
        match self {
            Payload::Ecrt(v) => v.len(),
            Payload::Rcrt(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Payload::Ecrt(_) => Scheme::Ecrt,
            Payload::Rcrt(_) => Scheme::Rcrt,
        }
    }

    fn code_pair(&self, k: usize) -> (u32, u32) {
        match self {
            Payload::Ecrt(v) => (v[k].code_y1, v[k].code_d),
            Payload::Rcrt(v) => (v[k].code_y1, v[k].code_y2),
        }
    }
}

struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn new(out: Vec<u8>) -> Self {
        Self { out, acc: 0, nbits: 0 }
    }

    fn write(&mut self, value: u32, width: u32) {
        debug_assert!(width <= 32);
        self.acc |= (value as u64) << self.nbits;
        self.nbits += width;
        while self.nbits >= 8 {
            self.out.push(self.acc as u8);
            self.acc >>= 8;
            self.nbits -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push(self.acc as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0, acc: 0, nbits: 0 }
    }

    /// Caller guarantees enough bytes remain.
    fn read(&mut self, width: u32) -> u32 {
        while self.nbits < width {
            self.acc |= (self.bytes[self.pos] as u64) << self.nbits;
            self.pos += 1;
            self.nbits += 8;
        }
        let mask = if width == 32 { u32::MAX as u64 } else { (1u64 << width) - 1 };
        let v = (self.acc & mask) as u32;
        self.acc >>= width;
        self.nbits -= width;
        v
    }
}

pub fn pack(header: &StreamHeader, payload: &Payload) -> Result<Vec<u8>> {
    header.config()?;
    if header.scheme != payload.scheme() {
        return Err(Error::InvalidArgument(format!(
            "header scheme {} does not match {} frames",
            header.scheme.name(),
            payload.scheme().name()
        )));
    }
    if header.count != payload.len() as u64 {
        return Err(Error::InvalidArgument(format!(
            "header count {} but {} frames supplied",
            header.count,
            payload.len()
        )));
    }
    let (w1, w2) = header.code_widths();
    let fits = |v: u32, w: u32| w == 32 || (v as u64) < (1u64 << w);
    let mut out = Vec::with_capacity(HEADER_LEN + header.payload_len());
    header.write(&mut out);
    let mut writer = BitWriter::new(out);
    for k in 0..payload.len() {
        let (a, b) = payload.code_pair(k);
        if !fits(a, w1) || !fits(b, w2) {
            return Err(Error::InvalidArgument(format!(
                "frame {k}: codes ({a}, {b}) exceed widths ({w1}, {w2})"
            )));
        }
        writer.write(a, w1);
        writer.write(b, w2);
    }
    Ok(writer.finish())
}

pub fn unpack(bytes: &[u8]) -> Result<(StreamHeader, Payload)> {
    let header = StreamHeader::read(bytes)?;
    let need = header.payload_len();
    let body = &bytes[HEADER_LEN..];
    if body.len() < need {
        return Err(malformed(
            bytes.len(),
            format!("payload truncated: need {} more bytes", need - body.len()),
        ));
    }
    if body.len() > need {
        return Err(malformed(
            HEADER_LEN + need,
            format!("{} trailing bytes after payload", body.len() - need),
        ));
    }
    let (w1, w2) = header.code_widths();
    let mut reader = BitReader::new(&body[..need]);
    let count = header.count as usize;
    let payload = match header.scheme {
        Scheme::Ecrt => Payload::Ecrt(
            (0..count)
                .map(|_| EncodedFrame {
                    code_y1: reader.read(w1),
                    code_d: reader.read(w2),
                })
                .collect(),
        ),
        Scheme::Rcrt => Payload::Rcrt(
            (0..count)
                .map(|_| RcrtEncodedFrame {
                    code_y1: reader.read(w1),
                    code_y2: reader.read(w2),
                })
                .collect(),
        ),
    };
    Ok((header, payload))
}
