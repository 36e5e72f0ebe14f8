//! Binary channel-tensor container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    4 bytes  "MCHT"
//! version  u16      1
//! K N F M  4 × u32
//! flags    u32      bit 0: validity mask present
//! metalen  u32
//! meta     metalen bytes of UTF-8 JSON
//! payload  K·N·F·M × (f64 re, f64 im), index order k, n, f, m
//! mask     per user ceil(N/8) bytes, snapshot n at bit n%8 of byte n/8, 1 = valid
//! ```

use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use super::write_atomic;
use crate::tensor::{ChannelTensor, Dims, TensorMeta};

pub const MAGIC: &[u8; 4] = b"MCHT";
pub const VERSION: u16 = 1;
pub const FLAG_MASK: u32 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 * 4 + 4 + 4;

#[derive(Debug, Error)]
pub enum TensorFileError {
    #[error("not a channel tensor file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("file truncated: {0}")]
    Truncated(&'static str),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
    #[error("{0} unexpected trailing bytes")]
    TrailingData(usize),
    #[error("i/o error")]
    Io(#[from] std::io::Error),
}

impl TensorFileError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            TensorFileError::BadMagic => "bad_magic",
            TensorFileError::UnsupportedVersion(_) => "unsupported_version",
            TensorFileError::Truncated(_) => "truncated",
            TensorFileError::InvariantViolation(_) => "invariant_violation",
            TensorFileError::InvalidMetadata(_) => "invalid_metadata",
            TensorFileError::TrailingData(_) => "trailing_data",
            TensorFileError::Io(_) => "io",
        }
    }
}

type Result<T> = std::result::Result<T, TensorFileError>;

pub fn encode_tensor(tensor: &ChannelTensor) -> Vec<u8> {
    let d = tensor.dims();
    let meta = serde_json::to_vec(tensor.meta()).expect("metadata serializes");
    let mask_bytes = d.snapshots.div_ceil(8);
    let mut out = Vec::with_capacity(HEADER_LEN + meta.len() + d.len() * 16 + d.users * mask_bytes);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [d.users, d.snapshots, d.freqs, d.antennas] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    let flags = if tensor.mask().is_some() {
        FLAG_MASK
    } else {
        0
    };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    for h in tensor.samples() {
        out.extend_from_slice(&h.re.to_le_bytes());
        out.extend_from_slice(&h.im.to_le_bytes());
    }
    if let Some(mask) = tensor.mask() {
        for user in mask.chunks_exact(d.snapshots) {
            let mut bytes = vec![0u8; mask_bytes];
            for (n, &valid) in user.iter().enumerate() {
                if valid {
                    bytes[n / 8] |= 1 << (n % 8);
                }
            }
            out.extend_from_slice(&bytes);
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < len {
            return Err(TensorFileError::Truncated(what));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

pub fn decode_tensor(bytes: &[u8]) -> Result<ChannelTensor> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(TensorFileError::BadMagic);
    }
    let version = r.u16("version")?;
    if version != VERSION {
        return Err(TensorFileError::UnsupportedVersion(version));
    }
    let mut dims = [0usize; 4];
    for d in dims.iter_mut() {
        *d = r.u32("dimensions")? as usize;
    }
    let [users, snapshots, freqs, antennas] = dims;
    if dims.contains(&0) {
        return Err(TensorFileError::InvariantViolation(format!(
            "dimensions must be >= 1, got K={users} N={snapshots} F={freqs} M={antennas}"
        )));
    }
    let flags = r.u32("flags")?;
    if flags & !FLAG_MASK != 0 {
        return Err(TensorFileError::InvariantViolation(format!(
            "unknown flags {flags:#x}"
        )));
    }
    let meta_len = r.u32("metadata length")? as usize;
    let meta: TensorMeta = serde_json::from_slice(r.take(meta_len, "metadata")?)
        .map_err(|e| TensorFileError::InvalidMetadata(e.to_string()))?;
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|c| c.checked_mul(16).is_some())
        .ok_or_else(|| TensorFileError::InvariantViolation("dimensions overflow".into()))?;
    if r.remaining() < count * 16 {
        return Err(TensorFileError::Truncated("payload"));
    }
    let payload = r.take(count * 16, "payload")?;
    let samples: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let mask = if flags & FLAG_MASK != 0 {
        let per_user = snapshots.div_ceil(8);
        let raw = r.take(users * per_user, "validity mask")?;
        let mut mask = Vec::with_capacity(users * snapshots);
        for user in raw.chunks_exact(per_user) {
            mask.extend((0..snapshots).map(|n| user[n / 8] & (1 << (n % 8)) != 0));
        }
        Some(mask)
    } else {
        None
    };
    if r.remaining() != 0 {
        return Err(TensorFileError::TrailingData(r.remaining()));
    }
    let tensor = ChannelTensor::new(Dims::new(users, snapshots, freqs, antennas), samples, meta)
        .map_err(|e| TensorFileError::InvariantViolation(e.to_string()))?;
    match mask {
        Some(mask) => tensor
            .with_mask(mask)
            .map_err(|e| TensorFileError::InvariantViolation(e.to_string())),
        None => Ok(tensor),
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_tensor(tensor: &ChannelTensor, path: &Path) -> Result<()> {
    write_atomic(path, &encode_tensor(tensor))?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<ChannelTensor> {
    decode_tensor(&std::fs::read(path)?)
}
