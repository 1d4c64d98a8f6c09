//! Binary dictionary files. All integers are little-endian `u32`, all
//! entries little-endian `f64`.
//!
//! * `HHDL`: magic, version 1, `n`, `m`, flags (bit 0 = orthogonal set), then
//!   the `m` reflector vectors, `u_1` first.
//! * `QDLA`: magic, version 1, `n`, then the `n × n` matrix row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::householder::{HouseholderDictionary, Reflector};
use crate::imaging::dct_dictionary;
use crate::learning::Dictionary;
use crate::linalg::matrix::DenseMatrix;

pub const HHDL_MAGIC: &[u8; 4] = b"HHDL";
pub const QDLA_MAGIC: &[u8; 4] = b"QDLA";
pub const FORMAT_VERSION: u32 = 1;
const FLAG_ORTHOGONAL: u32 = 1;

/// Name that resolves to the built-in 8×8 DCT dictionary.
pub const BUILTIN_DCT: &str = "dct";

/// Orthonormality tolerance for dense dictionaries read from disk.
pub const DENSE_ORTHONORMAL_TOL: f64 = 1e-8;

pub fn encode_dictionary(d: &Dictionary) -> Vec<u8> {
    let mut out = Vec::new();
    match d {
        Dictionary::Householder(h) => {
            out.extend_from_slice(HHDL_MAGIC);
            for v in [FORMAT_VERSION, h.dim() as u32, h.len() as u32] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            let flags = if h.orthogonal_set() { FLAG_ORTHOGONAL } else { 0 };
            out.extend_from_slice(&flags.to_le_bytes());
            for r in h.reflectors() {
                for v in r.vector() {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        Dictionary::Dense(q) => {
            out.extend_from_slice(QDLA_MAGIC);
            out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
            out.extend_from_slice(&(q.rows() as u32).to_le_bytes());
            for v in q.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("dictionary file is truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = self.take(count.checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

pub fn decode_dictionary(bytes: &[u8]) -> Result<Dictionary> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.take(4)?.try_into().expect("4 bytes");
    let version = r.u32()?;
    if (&magic == HHDL_MAGIC || &magic == QDLA_MAGIC) && version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let n = r.u32()? as usize;
    if &magic == HHDL_MAGIC {
        let m = r.u32()? as usize;
        let flags = r.u32()?;
        if flags & !FLAG_ORTHOGONAL != 0 {
            return Err(Error::Format(format!("unknown flag bits {flags:#x}")));
        }
        let data = r.f64s(n.checked_mul(m).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        r.finish()?;
        let reflectors = if n == 0 {
            vec![Reflector::identity(0); m]
        } else {
            data.chunks_exact(n)
                .map(|c| Reflector::new(c.to_vec()))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Dictionary::Householder(HouseholderDictionary::new(
            n,
            reflectors,
            flags & FLAG_ORTHOGONAL != 0,
        )?))
    } else if &magic == QDLA_MAGIC {
        let data = r.f64s(n.checked_mul(n).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        r.finish()?;
        let q = DenseMatrix::new(n, n, data)?;
        let deviation = q.orthonormality_deviation();
        if deviation > DENSE_ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Dictionary::Dense(q))
    } else {
        Err(Error::Format(format!("unknown dictionary magic {:?}", String::from_utf8_lossy(&magic))))
    }
}

pub fn save_dictionary(d: &Dictionary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_dictionary(d)).map_err(|e| Error::io(path, e))
}

/// Reads a dictionary file; the name `dct` gives the built-in DCT.
pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    if path.as_os_str() == BUILTIN_DCT {
        return Ok(Dictionary::Dense(dct_dictionary()));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_dictionary(&bytes)
}
