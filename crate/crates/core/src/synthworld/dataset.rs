//! Dataset generation and persistence.
//!
//! On-disk layout: `manifest.jsonl` (one JSON record per line with the
//! scene, caption strings, and latent blob offset/length), `latents.bin`
//! (little-endian f32 values), and `meta.json` (vocabulary, grammar config,
//! seed, format version).

use crate::synthworld::{
    base_caption, render, sample_scene, EventScene, GrammarConfig, Latent, LatentEncoder, Vocab,
};
use crate::tensorkit::RngStream;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub grammar: GrammarConfig,
    pub bands: usize,
    pub frames: usize,
    pub log_floor: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            grammar: GrammarConfig::default(),
            bands: 8,
            frames: 8,
            log_floor: -10.0,
        }
    }
}

impl DatasetConfig {
    pub fn latent_dim(&self) -> usize {
        self.bands * self.frames
    }

    pub fn clip_len(&self) -> usize {
        (self.grammar.sample_rate as f64 * self.grammar.clip_seconds).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.grammar.validate()?;
        if self.clip_len() % self.frames != 0 {
            return Err(Error::Config(format!(
                "clip length {} not divisible into {} frames",
                self.clip_len(),
                self.frames
            )));
        }
        Ok(())
    }

    pub fn encoder(&self) -> Result<LatentEncoder> {
        LatentEncoder::new(
            self.grammar.sample_rate,
            self.clip_len(),
            self.bands,
            self.frames,
            self.log_floor,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: u64,
    pub scene: EventScene,
    pub clip_sha256: String,
    pub caption: String,
    pub enriched_caption: Option<String>,
    pub latent: Latent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub format_version: u32,
    pub seed: u64,
    pub vocab_version: String,
    pub vocab_words: Vec<String>,
    pub config: DatasetConfig,
    pub n_records: usize,
}

impl DatasetMeta {
    pub fn new(seed: u64, config: &DatasetConfig, n_records: usize) -> Self {
        let vocab = Vocab::builtin();
        DatasetMeta {
            format_version: DATASET_FORMAT_VERSION,
            seed,
            vocab_version: vocab.version.clone(),
            vocab_words: vocab.words().to_vec(),
            config: config.clone(),
            n_records,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub records: Vec<Record>,
}

/// Generate `n` records with ids `id_base..id_base+n`. Each record has its
/// own RNG stream, so generation parallelizes without changing output.
pub fn generate_records(
    config: &DatasetConfig,
    seed: u64,
    n: usize,
    id_base: u64,
) -> Result<Vec<Record>> {
    config.validate()?;
    let encoder = config.encoder()?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let id = id_base + i as u64;
            let mut rng = RngStream::new(seed, &format!("dataset/record/{id}"));
            let scene = sample_scene(&mut rng, &config.grammar, id)?;
            let clip = render(&scene, config.grammar.sample_rate, config.grammar.clip_seconds);
            let latent = encoder.encode(&clip)?;
            let caption = base_caption(&scene).text;
            Ok(Record {
                id,
                scene,
                clip_sha256: clip.sha256(),
                caption,
                enriched_caption: None,
                latent,
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestLine {
    id: u64,
    scene: EventScene,
    clip_sha256: String,
    caption: String,
    enriched_caption: Option<String>,
    /// Byte offset into latents.bin.
    latent_offset: u64,
    /// Byte length in latents.bin.
    latent_len: u64,
}

pub fn write_dataset(dir: &Path, meta: &DatasetMeta, records: &[Record]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut meta = meta.clone();
    meta.n_records = records.len();

    let mut blob: Vec<u8> = Vec::with_capacity(records.len() * meta.config.latent_dim() * 4);
    let mut manifest = fs::File::create(dir.join("manifest.jsonl"))?;
    for record in records {
        let offset = blob.len() as u64;
        for &v in record.latent.as_slice() {
            blob.extend_from_slice(&(v as f32).to_le_bytes());
        }
        let line = ManifestLine {
            id: record.id,
            scene: record.scene.clone(),
            clip_sha256: record.clip_sha256.clone(),
            caption: record.caption.clone(),
            enriched_caption: record.enriched_caption.clone(),
            latent_offset: offset,
            latent_len: blob.len() as u64 - offset,
        };
        serde_json::to_writer(&mut manifest, &line).map_err(|e| Error::Parse(e.to_string()))?;
        manifest.write_all(b"\n")?;
    }
    fs::write(dir.join("latents.bin"), blob)?;
    fs::write(
        dir.join("meta.json"),
        serde_json::to_vec_pretty(&meta).expect("meta serializes"),
    )?;
    Ok(())
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let meta: DatasetMeta = serde_json::from_slice(&fs::read(dir.join("meta.json"))?)
        .map_err(|e| Error::Parse(format!("meta.json: {e}")))?;
    if meta.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported dataset format version {}",
            meta.format_version
        )));
    }
    let blob = fs::read(dir.join("latents.bin"))?;
    let manifest = BufReader::new(fs::File::open(dir.join("manifest.jsonl"))?);
    let (bands, frames) = (meta.config.bands, meta.config.frames);
    let expected_len = (bands * frames * 4) as u64;

    let mut records = Vec::new();
    for (lineno, line) in manifest.lines().enumerate() {
        let line = line?;
        let entry: ManifestLine = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("manifest line {}: {e}", lineno + 1)))?;
        if entry.latent_len != expected_len
            || entry.latent_offset + entry.latent_len > blob.len() as u64
        {
            return Err(Error::Integrity(format!(
                "record {} latent blob range [{}, {}) invalid for blob of {} bytes",
                entry.id,
                entry.latent_offset,
                entry.latent_offset + entry.latent_len,
                blob.len()
            )));
        }
        let start = entry.latent_offset as usize;
        let values: Vec<f64> = blob[start..start + entry.latent_len as usize]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        records.push(Record {
            id: entry.id,
            scene: entry.scene,
            clip_sha256: entry.clip_sha256,
            caption: entry.caption,
            enriched_caption: entry.enriched_caption,
            latent: Latent {
                bands,
                frames,
                values,
            },
        });
    }
    if records.len() != meta.n_records {
        return Err(Error::Integrity(format!(
            "manifest has {} records, meta says {}",
            records.len(),
            meta.n_records
        )));
    }
    Ok(Dataset { meta, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> DatasetConfig {
        DatasetConfig::default()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let mut records = generate_records(&config, 11, 100, 0).unwrap();
        records[3].enriched_caption = Some("a steady 400 hertz tone".into());
        let meta = DatasetMeta::new(11, &config, records.len());
        write_dataset(dir.path(), &meta, &records).unwrap();
        let loaded = read_dataset(dir.path()).unwrap();
        assert_eq!(loaded.records, records);
        assert_eq!(loaded.meta.n_records, 100);

        let manifest = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
        assert_eq!(manifest.lines().count(), records.len());
    }

    #[test]
    fn generation_is_reproducible() {
        let config = small_config();
        let a = generate_records(&config, 5, 20, 100).unwrap();
        let b = generate_records(&config, 5, 20, 100).unwrap();
        assert_eq!(a, b);
        let c = generate_records(&config, 6, 20, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn truncated_blob_names_the_record() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let records = generate_records(&config, 7, 5, 0).unwrap();
        let meta = DatasetMeta::new(7, &config, records.len());
        write_dataset(dir.path(), &meta, &records).unwrap();
        let blob_path = dir.path().join("latents.bin");
        let blob = std::fs::read(&blob_path).unwrap();
        std::fs::write(&blob_path, &blob[..blob.len() - 8]).unwrap();
        match read_dataset(dir.path()) {
            Err(Error::Integrity(msg)) => assert!(msg.contains("record 4"), "{msg}"),
            other => panic!("expected integrity error, got {other:?}"),
        }
    }

    #[test]
    fn corrupt_manifest_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config();
        let records = generate_records(&config, 8, 3, 0).unwrap();
        let meta = DatasetMeta::new(8, &config, records.len());
        write_dataset(dir.path(), &meta, &records).unwrap();
        let path = dir.path().join("manifest.jsonl");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen("{\"id\":1", "{\"id\":oops", 1);
        std::fs::write(&path, text).unwrap();
        match read_dataset(dir.path()) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
