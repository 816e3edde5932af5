use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Gate, LstmParams, TrainConfig};
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "volmoe-lstm-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON checkpoint. Floats are written in shortest round-trip form and parsed
/// with correct rounding, so a reload reproduces predictions bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub hidden_size: usize,
    pub input_size: usize,
    pub window: usize,
    /// SHA-256 of the JSON-serialized training config.
    pub config_hash: String,
    pub w_f: Vec<f64>,
    pub w_i: Vec<f64>,
    pub w_c: Vec<f64>,
    pub w_o: Vec<f64>,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_c: Vec<f64>,
    pub b_o: Vec<f64>,
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

pub(crate) fn config_hash(cfg: &TrainConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl Checkpoint {
    pub fn new(params: &LstmParams, window: usize, cfg: &TrainConfig) -> Result<Self> {
        Ok(Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            hidden_size: params.hidden_size(),
            input_size: params.input_size(),
            window,
            config_hash: config_hash(cfg)?,
            w_f: params.weight_block(Gate::Forget).to_vec(),
            w_i: params.weight_block(Gate::Input).to_vec(),
            w_c: params.weight_block(Gate::Candidate).to_vec(),
            w_o: params.weight_block(Gate::Output).to_vec(),
            b_f: params.bias_block(Gate::Forget).to_vec(),
            b_i: params.bias_block(Gate::Input).to_vec(),
            b_c: params.bias_block(Gate::Candidate).to_vec(),
            b_o: params.bias_block(Gate::Output).to_vec(),
            w_out: params.w_out().to_vec(),
            b_out: params.b_out(),
        })
    }

    pub fn to_params(&self) -> Result<LstmParams> {
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            )));
        }
        let (h, i) = (self.hidden_size, self.input_size);
        let weight_len = h * (h + i);
        let blocks_ok = [&self.w_f, &self.w_i, &self.w_c, &self.w_o].iter().all(|b| b.len() == weight_len)
            && [&self.b_f, &self.b_i, &self.b_c, &self.b_o, &self.w_out].iter().all(|b| b.len() == h);
        if !blocks_ok {
            return Err(Error::Dimension(format!(
                "checkpoint blocks do not match hidden={h}, input={i}"
            )));
        }
        let values: Vec<f64> = [
            &self.w_f, &self.w_i, &self.w_c, &self.w_o, &self.b_f, &self.b_i, &self.b_c, &self.b_o, &self.w_out,
        ]
        .into_iter()
        .flatten()
        .copied()
        .chain(std::iter::once(self.b_out))
        .collect();
        let params = LstmParams::from_values(h, i, values)?;
        Ok(params)
    }
}

pub fn save_checkpoint(path: &Path, params: &LstmParams, window: usize, cfg: &TrainConfig) -> Result<()> {
    let ck = Checkpoint::new(params, window, cfg)?;
    let text = serde_json::to_string(&ck)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(LstmParams, Checkpoint)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ck: Checkpoint = serde_json::from_str(&text)?;
    Ok((ck.to_params()?, ck))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lstm::{init_params, predict_standardized};
    use crate::numkit::RngStream;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        let mut rng = RngStream::new(77, 0);
        let params = init_params(7, 1, &mut rng).unwrap();
        let cfg = TrainConfig::default();
        save_checkpoint(&path, &params, 10, &cfg).unwrap();
        let (back, ck) = load_checkpoint(&path).unwrap();
        assert_eq!(back, params);
        assert_eq!(ck.config_hash, config_hash(&cfg).unwrap());
        let w: Vec<f64> = (0..10).map(|k| (k as f64 * 0.37).cos()).collect();
        assert_eq!(
            predict_standardized(&back, &w).unwrap().to_bits(),
            predict_standardized(&params, &w).unwrap().to_bits()
        );
    }

    #[test]
    fn mangled_blocks_rejected() {
        let params = init_params(3, 1, &mut RngStream::new(1, 0)).unwrap();
        let mut ck = Checkpoint::new(&params, 10, &TrainConfig::default()).unwrap();
        ck.w_f.pop();
        ck.b_f.push(0.0);
        assert!(ck.to_params().is_err());
        let mut ck2 = Checkpoint::new(&params, 10, &TrainConfig::default()).unwrap();
        ck2.version = 99;
        assert!(ck2.to_params().is_err());
    }

    #[test]
    fn hash_tracks_config() {
        let a = config_hash(&TrainConfig::default()).unwrap();
        let b = config_hash(&TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        })
        .unwrap();
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}
