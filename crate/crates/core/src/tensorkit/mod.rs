//! Minimal dense numeric kernel: matrices, explicit forward/backward MLPs,
//! AdamW with decoupled weight decay, a cosine learning-rate schedule, and
//! named counter-based RNG streams.
//!
//! Everything is `f64`; the kernel is deliberately small (no broadcasting,
//! no convolutions) and every gradient path is checkable against central
//! finite differences.

mod adamw;
mod mat;
mod mlp;
mod ops;
mod rng;
mod schedule;

pub use adamw::{adamw_step, AdamWConfig, AdamWState};
pub use mat::Mat;
pub use mlp::{mlp_backward, mlp_forward, Activation, DenseLayer, ForwardCache, MlpParams};
pub use ops::{l2_normalize, softmax};
pub use rng::RngStream;
pub use schedule::cosine_lr;
