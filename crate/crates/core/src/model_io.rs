//! Model persistence.
//!
//! A model is a single JSON document: a small envelope (format version,
//! sha-256 checksum) around the model payload. Every float in the payload is
//! written in scientific notation with 17 significant digits, which
//! round-trips `f64` exactly, so a reloaded model reproduces predictions and
//! contributions bit for bit. The checksum is computed over the canonical
//! payload serialization and re-verified from the parsed model on load, so
//! any value corruption is caught while formatting-only edits are not.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forest::ForestModel;

pub const FORMAT_VERSION: u32 = 1;

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Canonical payload serialization (the checksummed bytes).
pub fn model_to_canonical_json(model: &ForestModel) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    model
        .serialize(&mut ser)
        .map_err(|e| Error::ModelParse(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::ModelParse(e.to_string()))
}

fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_model(model: &ForestModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = model_to_canonical_json(model)?;
    let checksum = sha256_hex(&body);
    let document = format!(
        "{{\"format_version\":{FORMAT_VERSION},\"checksum_sha256\":\"{checksum}\",\"model\":{body}}}"
    );
    std::fs::write(path, document).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct Envelope {
    checksum_sha256: String,
    model: ForestModel,
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ForestModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::ModelParse(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::ModelParse("missing format_version".into()))?
        as u32;
    if version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let envelope: Envelope =
        serde_json::from_value(value).map_err(|e| Error::ModelParse(e.to_string()))?;
    let computed = sha256_hex(&model_to_canonical_json(&envelope.model)?);
    if computed != envelope.checksum_sha256 {
        return Err(Error::ChecksumMismatch {
            expected: envelope.checksum_sha256,
            computed,
        });
    }
    Ok(envelope.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{train_forest, Task, TrainConfig};
    use crate::sim::{simulate_toy, ToyConfig};

    fn tmp(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("rfexplain-io-{}-{name}", std::process::id()))
    }

    fn trained() -> (crate::data::Dataset, ForestModel) {
        let sim = simulate_toy(&ToyConfig {
            n: 120,
            seed: 60,
            ..Default::default()
        })
        .unwrap();
        let model = train_forest(
            &sim.dataset,
            &TrainConfig {
                n_tree: 8,
                seed: 60,
                ..TrainConfig::new(Task::Regression)
            },
        )
        .unwrap();
        (sim.dataset, model)
    }

    #[test]
    fn round_trip_preserves_model_and_predictions() {
        let (ds, model) = trained();
        let path = tmp("roundtrip.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(model, loaded);
        let a = model.predict(&ds).unwrap();
        let b = loaded.predict(&ds).unwrap();
        assert_eq!(a.values, b.values);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn floats_carry_17_significant_digits() {
        let (_, model) = trained();
        let body = model_to_canonical_json(&model).unwrap();
        // mantissa of the scientific form has 16 fractional digits
        assert!(body.contains("e0") || body.contains("e-"));
        let has_long_mantissa = body.split(&['"', ',', '[', ']', '{', '}'][..]).any(|tok| {
            tok.contains('e')
                && tok.contains('.')
                && tok
                    .split('.')
                    .nth(1)
                    .map(|frac| {
                        frac.split('e')
                            .next()
                            .map(|digits| digits.len() == 16)
                            .unwrap_or(false)
                    })
                    .unwrap_or(false)
        });
        assert!(has_long_mantissa, "no 17-digit float found");
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let (_, model) = trained();
        let path = tmp("truncated.json");
        save_model(&model, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelParse(_))));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn foreign_version_is_rejected() {
        let (_, model) = trained();
        let path = tmp("version.json");
        save_model(&model, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(
            &path,
            text.replace("\"format_version\":1", "\"format_version\":99"),
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::FormatVersion { found: 99, .. })
        ));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn tampered_value_fails_the_checksum() {
        let (_, model) = trained();
        let path = tmp("tampered.json");
        save_model(&model, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let tampered = text.replace("\"min_node_size\":5", "\"min_node_size\":6");
        assert_ne!(text, tampered);
        std::fs::write(&path, tampered).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ChecksumMismatch { .. })
        ));
        std::fs::remove_file(path).ok();
    }
}
