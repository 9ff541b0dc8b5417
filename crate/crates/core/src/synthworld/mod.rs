//! The synthetic audio world: parametric event scenes, rendered waveforms,
//! spectrogram-style latents, terse base captions, and dataset persistence.

mod caption;
mod dataset;
mod encode;
mod render;
mod scene;

pub use caption::{base_caption, Caption, CaptionSource, Vocab, VOCAB_VERSION};
pub use dataset::{
    generate_records, read_dataset, write_dataset, Dataset, DatasetConfig, DatasetMeta, Record,
};
pub use encode::{encode, Latent, LatentEncoder};
pub use render::{render, Clip};
pub use scene::{sample_scene, EventClass, EventScene, EventSpec, GrammarConfig};
