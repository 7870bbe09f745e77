//! Bit-efficient quantisation for two-channel modulo ADCs.
//!
//! Two folding ADCs with dynamic ranges `Δ₁ = τ₁ε` and `Δ₂ = τ₂ε` (coprime
//! `τ₁ < τ₂`) observe the same signal. Instead of quantising both residues,
//! the [`ecrt`] codec sends the channel-1 residue with `b` bits plus the
//! scaled inter-channel difference with `⌈log₂(τ₁+τ₂)⌉` bits, and recovers
//! the folding index with a modular inverse. [`rcrt`] is the two-residue
//! baseline, [`rates`] holds the closed-form bit budgets, [`bitstream`] the
//! packed wire format, and [`experiments`] the Monte Carlo drivers.
//!
//! ```
//! use ecrt::ecrt::EcrtCodec;
//! use ecrt::modcore::{frames_from_samples, NoiseSpec, SystemConfig};
//!
//! let config = SystemConfig::simulation(14).unwrap();
//! let frames = frames_from_samples(&[1000.0, -1750.0], &config, &NoiseSpec::none()).unwrap();
//! let codec = EcrtCodec::new(config);
//! let out = codec.decode(&codec.encode(&frames));
//! assert!((out.g_hat[0] - 1000.0).abs() <= out.error_bound);
//! assert_eq!(out.n1_hat, vec![4, -6]);
//! ```

pub mod bitstream;
pub mod cli;
pub mod ecrt;
pub mod error;
pub mod experiments;
pub mod modcore;
pub mod par;
pub mod quant;
pub mod rates;
pub mod rcrt;
pub mod verify;

pub use error::{Error, Result};
