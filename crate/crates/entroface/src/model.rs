//! Model persistence: a one-line magic header for early format detection,
//! then the trained model as JSON. Floating-point fields survive the round
//! trip bit-exactly (the serializer emits shortest-round-trip decimals), so
//! a reloaded model classifies identically to the one that was saved.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::TrainedModel;

/// First bytes of every model file; the trailing digit versions the format.
pub const MODEL_MAGIC: &[u8] = b"EFMODEL1\n";

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let mut bytes = MODEL_MAGIC.to_vec();
    let payload = serde_json::to_vec(model).map_err(|e| Error::ModelFormat {
        path: path.to_owned(),
        reason: format!("serialization failed: {e}"),
    })?;
    bytes.extend_from_slice(&payload);
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let err = |reason: String| Error::ModelFormat {
        path: path.to_owned(),
        reason,
    };
    if bytes.len() < MODEL_MAGIC.len() || &bytes[..MODEL_MAGIC.len()] != MODEL_MAGIC {
        return Err(err(format!(
            "missing magic header {:?} (not a model file, or a newer format)",
            String::from_utf8_lossy(MODEL_MAGIC).trim_end()
        )));
    }
    serde_json::from_slice(&bytes[MODEL_MAGIC.len()..])
        .map_err(|e| err(format!("corrupt payload: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Metric;
    use crate::config::PipelineConfig;
    use crate::pipeline::fit_model;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_model() -> TrainedModel {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (label, center) in [("a", 0.0), ("b", 4.0), ("c", -4.0)] {
            for _ in 0..4 {
                features.push(
                    (0..6)
                        .map(|_| center + rng.gen_range(-0.4..0.4))
                        .collect::<Vec<f64>>(),
                );
                labels.push(label.to_string());
            }
        }
        let cfg = PipelineConfig {
            m: 3,
            metric: Metric::Mahalanobis,
            ..PipelineConfig::default()
        };
        fit_model(&features, &labels, &cfg).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let model = small_model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.efm");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(model, loaded);

        // Predictions agree bit-for-bit.
        let query = vec![0.1, -0.2, 0.05, 0.0, 0.3, -0.1];
        let (l1, d1) = model.predict(&query).unwrap();
        let (l2, d2) = loaded.predict(&query).unwrap();
        assert_eq!(l1, l2);
        assert_eq!(d1.to_bits(), d2.to_bits());
    }

    #[test]
    fn file_starts_with_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.efm");
        save_model(&small_model(), &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(MODEL_MAGIC));
    }

    #[test]
    fn rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.efm");
        fs::write(&path, b"NOTAMODEL{}").unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("magic"), "{err}");
    }

    #[test]
    fn rejects_truncated_payload() {
        let model = small_model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.efm");
        save_model(&model, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 40]).unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("corrupt"), "{err}");
    }
}
