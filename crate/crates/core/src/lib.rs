//! Desk-scale text-to-audio laboratory.
//!
//! The crate is organized as a stack: [`tensorkit`] is the dense numeric
//! kernel (matrices, MLPs, AdamW, RNG streams) everything else builds on;
//! [`synthworld`] generates the synthetic audio domain (scenes, clips,
//! spectrogram-style latents, captions) and persists datasets;
//! [`captionaug`] enriches captions through pluggable rewriters;
//! [`encoders`] trains the frozen reward/eval machinery (event classifier,
//! contrastive dual encoder, Gaussian reference statistics); [`flowmatch`]
//! is the conditional rectified-flow generator with ODE and SDE samplers;
//! [`rlrewards`] computes CLAP/KL/FAD-style rewards and their composite;
//! [`grpo`] fine-tunes the flow policy with group-relative advantages and
//! a clipped surrogate against a frozen reference.

pub mod captionaug;
pub mod encoders;
pub mod error;
pub mod flowmatch;
pub mod gradcheck;
pub mod grpo;
pub mod modelio;
pub mod rlrewards;
pub mod synthworld;
pub mod tensorkit;

pub use error::{Error, Result};
