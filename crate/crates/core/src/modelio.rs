//! Checkpoint format: a versioned JSON header describing shapes and
//! hyperparameters plus a little-endian `f64` weight blob, digested with
//! SHA-256 so frozen models can be asserted unchanged.

use crate::tensorkit::{Activation, DenseLayer, Mat, MlpParams};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;

/// One or more named networks plus free-form metadata, saved as a unit.
#[derive(Debug, Clone)]
pub struct NetBundle {
    pub kind: String,
    pub meta: serde_json::Value,
    pub nets: Vec<(String, MlpParams)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    kind: String,
    meta: serde_json::Value,
    nets: Vec<NetHeader>,
    blob_sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetHeader {
    name: String,
    layers: Vec<LayerHeader>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerHeader {
    rows: usize,
    cols: usize,
    act: Activation,
}

fn blob_bytes(nets: &[(String, MlpParams)]) -> Vec<u8> {
    let mut bytes = Vec::new();
    for (_, params) in nets {
        for v in params.flatten() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    bytes
}

/// SHA-256 hex digest of the weight blob; the identity of a frozen model.
pub fn bundle_digest(nets: &[(String, MlpParams)]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(blob_bytes(nets));
    hex_digest(hasher)
}

pub fn params_digest(params: &MlpParams) -> String {
    bundle_digest(std::slice::from_ref(&("net".to_string(), params.clone())))
}

fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("json"), base.with_extension("bin"))
}

/// Write `base.json` + `base.bin`. Returns the blob digest.
pub fn save_bundle(base: &Path, bundle: &NetBundle) -> Result<String> {
    let bytes = blob_bytes(&bundle.nets);
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hex_digest(hasher);
    let header = Header {
        format_version: FORMAT_VERSION,
        kind: bundle.kind.clone(),
        meta: bundle.meta.clone(),
        nets: bundle
            .nets
            .iter()
            .map(|(name, params)| NetHeader {
                name: name.clone(),
                layers: params
                    .layers
                    .iter()
                    .map(|l| LayerHeader {
                        rows: l.in_dim(),
                        cols: l.out_dim(),
                        act: l.act,
                    })
                    .collect(),
            })
            .collect(),
        blob_sha256: digest.clone(),
    };
    let (json_path, bin_path) = paths(base);
    if let Some(parent) = base.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&json_path, serde_json::to_vec_pretty(&header).expect("header serializes"))?;
    fs::write(&bin_path, bytes)?;
    Ok(digest)
}

/// Read a bundle back, verifying the blob digest against the header.
pub fn load_bundle(base: &Path) -> Result<NetBundle> {
    let (json_path, bin_path) = paths(base);
    let header: Header = serde_json::from_slice(&fs::read(&json_path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", json_path.display())))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported checkpoint version {}",
            header.format_version
        )));
    }
    let bytes = fs::read(&bin_path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hex_digest(hasher);
    if digest != header.blob_sha256 {
        return Err(Error::Integrity(format!(
            "weight blob digest mismatch for {}",
            bin_path.display()
        )));
    }

    let mut nets = Vec::with_capacity(header.nets.len());
    let mut pos = 0usize;
    for net in &header.nets {
        let mut layers = Vec::with_capacity(net.layers.len());
        for lh in &net.layers {
            let nw = lh.rows * lh.cols;
            let need = (nw + lh.cols) * 8;
            if pos + need > bytes.len() {
                return Err(Error::Integrity(format!(
                    "weight blob truncated in net '{}'",
                    net.name
                )));
            }
            let mut w = Vec::with_capacity(nw);
            for i in 0..nw {
                let off = pos + i * 8;
                w.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
            }
            pos += nw * 8;
            let mut b = Vec::with_capacity(lh.cols);
            for i in 0..lh.cols {
                let off = pos + i * 8;
                b.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
            }
            pos += lh.cols * 8;
            layers.push(DenseLayer {
                w: Mat::from_vec(lh.rows, lh.cols, w)?,
                b,
                act: lh.act,
            });
        }
        nets.push((net.name.clone(), MlpParams { layers }));
    }
    if pos != bytes.len() {
        return Err(Error::Integrity(format!(
            "weight blob has {} trailing bytes",
            bytes.len() - pos
        )));
    }
    Ok(NetBundle {
        kind: header.kind,
        meta: header.meta,
        nets,
    })
}
