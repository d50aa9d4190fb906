//! The `GCMODEL` parameter container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            7 bytes  "GCMODEL"
//! format version   u32      currently 1
//! n_blocks         u32
//! n_fc_layers      u32
//! width            u32
//! k                u32
//! h                u32
//! cat_dim          u32
//! share_weights    u8
//! parameter count  u64
//! parameters       count x f64, canonical traversal order
//! ```
//!
//! The traversal order is block-major, FC layers then backcast then
//! forecast, weights before biases; a write/read round trip is bit-exact.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use gridcast_core::model::{parameter_count, ModelConfig, ModelParams};

const MAGIC: &[u8; 7] = b"GCMODEL";
const VERSION: u32 = 1;

pub fn write_model(path: &Path, params: &ModelParams) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let cfg = &params.config;
    for field in [
        cfg.n_blocks,
        cfg.n_fc_layers,
        cfg.width,
        cfg.k,
        cfg.h,
        cfg.cat_dim,
    ] {
        w.write_all(&u32::try_from(field).context("config field exceeds u32")?.to_le_bytes())?;
    }
    w.write_all(&[cfg.share_weights as u8])?;
    w.write_all(&(params.scalar_count() as u64).to_le_bytes())?;
    for slice in params.param_slices() {
        for &x in slice {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelParams> {
    let mut data = Vec::new();
    fs::File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_end(&mut data)?;
    let mut cursor = 0usize;
    let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
        if *cursor + n > data.len() {
            bail!("{}: truncated model container", path.display());
        }
        let out = &data[*cursor..*cursor + n];
        *cursor += n;
        Ok(out)
    };

    if take(&mut cursor, 7)? != MAGIC {
        bail!("{}: not a GCMODEL container", path.display());
    }
    let version = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());
    if version != VERSION {
        bail!("{}: unsupported container version {version}", path.display());
    }
    let field = |cursor: &mut usize| -> Result<usize> {
        Ok(u32::from_le_bytes(take(cursor, 4)?.try_into().unwrap()) as usize)
    };
    let cfg = ModelConfig {
        n_blocks: field(&mut cursor)?,
        n_fc_layers: field(&mut cursor)?,
        width: field(&mut cursor)?,
        k: field(&mut cursor)?,
        h: field(&mut cursor)?,
        cat_dim: field(&mut cursor)?,
        share_weights: take(&mut cursor, 1)?[0] != 0,
    };
    cfg.validate().map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let count = u64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap()) as usize;
    if count != parameter_count(&cfg) {
        bail!(
            "{}: container declares {count} parameters but the configuration needs {}",
            path.display(),
            parameter_count(&cfg)
        );
    }
    let bytes = take(&mut cursor, count * 8)?;
    if cursor != data.len() {
        bail!("{}: trailing bytes after parameters", path.display());
    }

    let mut params = ModelParams::zeros(&cfg);
    let mut offset = 0;
    for slice in params.param_slices_mut() {
        for x in slice.iter_mut() {
            *x = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
            if !x.is_finite() {
                bail!("{}: non-finite parameter in container", path.display());
            }
            offset += 8;
        }
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridcast_core::model::init_params;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.gcm");
        let cfg = ModelConfig {
            n_blocks: 2,
            n_fc_layers: 2,
            width: 7,
            k: 11,
            h: 3,
            cat_dim: 67,
            share_weights: false,
        };
        let params = init_params(&cfg, 123).unwrap();
        write_model(&path, &params).unwrap();
        let again = read_model(&path).unwrap();
        assert_eq!(params, again);

        // Writing the same parameters twice produces identical bytes.
        let path2 = dir.path().join("m2.gcm");
        write_model(&path2, &params).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.gcm");
        fs::write(&path, b"NOTMODEL.....").unwrap();
        assert!(read_model(&path).is_err());
    }

    #[test]
    fn rejects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.gcm");
        let cfg = ModelConfig {
            n_blocks: 1,
            n_fc_layers: 1,
            width: 2,
            k: 3,
            h: 1,
            cat_dim: 0,
            share_weights: false,
        };
        write_model(&path, &init_params(&cfg, 1).unwrap()).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(read_model(&path).unwrap_err().to_string().contains("truncated"));
    }
}
