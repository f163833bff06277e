//! Binary field snapshots: `"GNLS"`, version `u32`, `n_edges u32`, `n_points u64`,
//! `dx f64`, then each edge as interleaved `(re, im)` `f64` samples, little-endian.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{GraphField, GridSpec, N_EDGES};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"GNLS";
pub const CHECKPOINT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8;

pub fn encode_checkpoint(field: &GraphField) -> Vec<u8> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + N_EDGES * grid.n_points * 16);
    buf.extend_from_slice(&CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(N_EDGES as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.n_points as u64).to_le_bytes());
    buf.extend_from_slice(&grid.dx.to_le_bytes());
    for edge in field.edges() {
        for z in edge {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    buf
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// `path` is only used to label errors.
pub fn decode_checkpoint(bytes: &[u8], path: &Path) -> Result<GraphField> {
    let corrupt = |reason: String| Error::CheckpointCorrupt { path: path.to_path_buf(), reason };
    let shape = |reason: String| Error::CheckpointShape { path: path.to_path_buf(), reason };
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("{} bytes is shorter than the {HEADER_LEN}-byte header", bytes.len())));
    }
    if bytes[..4] != CHECKPOINT_MAGIC {
        return Err(corrupt(format!("bad magic {:?}", &bytes[..4])));
    }
    let version = read_u32(bytes, 4);
    if version != CHECKPOINT_VERSION {
        return Err(Error::CheckpointVersion {
            path: path.to_path_buf(),
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let n_edges = read_u32(bytes, 8) as usize;
    let n_points = read_u64(bytes, 12);
    let dx = read_f64(bytes, 20);
    if !(dx.is_finite() && dx > 0.0) {
        return Err(corrupt(format!("dx = {dx}")));
    }
    if n_edges != N_EDGES {
        return Err(shape(format!("{n_edges} edges, expected {N_EDGES}")));
    }
    let payload = bytes.len() - HEADER_LEN;
    let expected = (n_points as u128) * (n_edges as u128) * 16;
    if payload as u128 != expected {
        return Err(shape(format!(
            "header declares {n_edges}×{n_points} samples ({expected} bytes), payload has {payload} bytes"
        )));
    }
    let n = n_points as usize;
    let grid = GridSpec::new(dx, n).map_err(|e| shape(e.to_string()))?;
    let edges: [Vec<Complex64>; N_EDGES] = std::array::from_fn(|j| {
        (0..n)
            .map(|m| {
                let at = HEADER_LEN + (j * n + m) * 16;
                Complex64::new(read_f64(bytes, at), read_f64(bytes, at + 8))
            })
            .collect()
    });
    GraphField::from_edges(grid, edges)
}

pub fn checkpoint_save(field: &GraphField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_checkpoint(field))?;
    Ok(())
}

pub fn checkpoint_load(path: impl AsRef<Path>) -> Result<GraphField> {
    let path = path.as_ref();
    decode_checkpoint(&std::fs::read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GraphField {
        let grid = GridSpec::new(0.1, 17).unwrap();
        GraphField::from_fn(grid, |j, x| Complex64::new((x + j as f64).sin(), -1.0 / (1.0 + x * j as f64)))
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.gnls");
        let f = sample();
        checkpoint_save(&f, &p).unwrap();
        let g = checkpoint_load(&p).unwrap();
        assert_eq!(g.grid().dx.to_bits(), f.grid().dx.to_bits());
        for j in 0..3 {
            for (a, b) in f.edge(j).iter().zip(g.edge(j)) {
                assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
            }
        }
    }

    #[test]
    fn header_layout_is_little_endian() {
        let b = encode_checkpoint(&sample());
        assert_eq!(&b[..4], b"GNLS");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[8..12], &[3, 0, 0, 0]);
        assert_eq!(&b[12..20], &17u64.to_le_bytes());
        assert_eq!(b.len(), HEADER_LEN + 3 * 17 * 16);
    }

    #[test]
    fn error_kinds_are_distinct() {
        let p = Path::new("x");
        let b = encode_checkpoint(&sample());
        assert!(matches!(decode_checkpoint(&b[..10], p), Err(Error::CheckpointCorrupt { .. })));
        let mut bad_magic = b.clone();
        bad_magic[0] = b'X';
        assert!(matches!(decode_checkpoint(&bad_magic, p), Err(Error::CheckpointCorrupt { .. })));
        let mut v2 = b.clone();
        v2[4] = 2;
        assert!(matches!(decode_checkpoint(&v2, p), Err(Error::CheckpointVersion { found: 2, .. })));
        let mut more = b.clone();
        more[12] = 18;
        assert!(matches!(decode_checkpoint(&more, p), Err(Error::CheckpointShape { .. })));
        assert!(matches!(decode_checkpoint(&b[..b.len() - 8], p), Err(Error::CheckpointShape { .. })));
        let mut edges = b;
        edges[8] = 2;
        assert!(matches!(decode_checkpoint(&edges, p), Err(Error::CheckpointShape { .. })));
    }
}
