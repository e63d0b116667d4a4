//! Capacity and capacity bounds for multi-route point-to-point channels with
//! distortion-limited modifying adversaries.
//!
//! The crate is organized bottom-up:
//!
//! - [`info_math`]: entropies, mutual information, Hamming ball volumes.
//! - [`channel_model`]: routes, distortion measures, placements, noise.
//! - [`rate_engine`]: closed-form rates and the minimax solver.
//! - [`adversary_lab`]: worst-case memoryless laws and codeword-aware attacks.
//! - [`code_lab`]: random linear codes over prime fields and their decoders.
//! - [`sim_engine`]: end-to-end Monte Carlo with distortion auditing.
//! - [`workflow`]: run configurations and artifact emission used by the CLI.

pub mod adversary_lab;
pub mod channel_model;
pub mod code_lab;
pub mod error;
pub mod info_math;
pub mod rate_engine;
pub mod sim_engine;
pub mod workflow;

pub use error::{Error, Result};
