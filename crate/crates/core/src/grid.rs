//! Feature grids and their binary file format.
//!
//! A [`FeatureGrid`] is a rows×cols array of 32-bit floats in `[0, 1]`,
//! row-major, standing in for a spectrogram-like feature matrix. The on-disk
//! encoding (`FGRD` files) is bit-exact so that a grid's SHA-256 is stable:
//!
//! ```text
//! magic "FGRD" (4 bytes) | rows u16 LE | cols u16 LE | rows·cols f32 LE, row-major
//! ```

use thiserror::Error;

/// Magic prefix of a feature file.
pub const FEATURE_MAGIC: &[u8; 4] = b"FGRD";

/// Fixed header size: magic + rows + cols.
pub const FEATURE_HEADER_LEN: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid dimensions must be nonzero, got {rows}x{cols}")]
    ZeroDimension { rows: u16, cols: u16 },
    #[error("value count {got} does not match {rows}x{cols}")]
    LengthMismatch { rows: u16, cols: u16, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("value {value} at index {index} outside [0, 1]")]
    OutOfRange { index: usize, value: f32 },
    #[error("bad magic, not a feature file")]
    BadMagic,
    #[error("truncated feature file: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("trailing bytes after payload: expected {expected} bytes, got {got}")]
    TrailingBytes { expected: usize, got: usize },
}

/// A rows×cols feature matrix with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    rows: u16,
    cols: u16,
    values: Vec<f32>,
}

impl FeatureGrid {
    /// Build a grid, validating dimensions, finiteness, and range.
    pub fn new(rows: u16, cols: u16, values: Vec<f32>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::ZeroDimension { rows, cols });
        }
        let expected = rows as usize * cols as usize;
        if values.len() != expected {
            return Err(GridError::LengthMismatch {
                rows,
                cols,
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFinite(i));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(GridError::OutOfRange { index: i, value: v });
            }
        }
        Ok(FeatureGrid { rows, cols, values })
    }

    /// Grid with every cell set to `value`.
    pub fn filled(rows: u16, cols: u16, value: f32) -> Result<Self, GridError> {
        Self::new(rows, cols, vec![value; rows as usize * cols as usize])
    }

    pub fn rows(&self) -> u16 {
        self.rows
    }

    pub fn cols(&self) -> u16 {
        self.cols
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, row: u16, col: u16) -> f32 {
        assert!(row < self.rows && col < self.cols, "cell out of range");
        self.values[row as usize * self.cols as usize + col as usize]
    }

    /// Set a cell. The value is clamped to `[0, 1]`; non-finite input panics.
    pub fn set(&mut self, row: u16, col: u16, value: f32) {
        assert!(row < self.rows && col < self.cols, "cell out of range");
        assert!(value.is_finite(), "non-finite cell value");
        self.values[row as usize * self.cols as usize + col as usize] = value.clamp(0.0, 1.0);
    }

    /// Serialize to the bit-exact `FGRD` encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FEATURE_HEADER_LEN + self.values.len() * 4);
        out.extend_from_slice(FEATURE_MAGIC);
        out.extend_from_slice(&self.rows.to_le_bytes());
        out.extend_from_slice(&self.cols.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Parse the `FGRD` encoding, validating magic, length, and values.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GridError> {
        if bytes.len() < FEATURE_HEADER_LEN {
            return Err(GridError::Truncated {
                expected: FEATURE_HEADER_LEN,
                got: bytes.len(),
            });
        }
        if &bytes[..4] != FEATURE_MAGIC {
            return Err(GridError::BadMagic);
        }
        let rows = u16::from_le_bytes([bytes[4], bytes[5]]);
        let cols = u16::from_le_bytes([bytes[6], bytes[7]]);
        if rows == 0 || cols == 0 {
            return Err(GridError::ZeroDimension { rows, cols });
        }
        let count = rows as usize * cols as usize;
        let expected = FEATURE_HEADER_LEN + count * 4;
        if bytes.len() < expected {
            return Err(GridError::Truncated {
                expected,
                got: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(GridError::TrailingBytes {
                expected,
                got: bytes.len(),
            });
        }
        let mut values = Vec::with_capacity(count);
        for chunk in bytes[FEATURE_HEADER_LEN..].chunks_exact(4) {
            values.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]));
        }
        Self::new(rows, cols, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::Digest;
    use proptest::prelude::*;

    #[test]
    fn one_by_one_file_size() {
        // 4-byte magic + 2+2 byte dims + one 4-byte float.
        let g = FeatureGrid::filled(1, 1, 0.0).unwrap();
        assert_eq!(g.to_bytes().len(), 12);
    }

    #[test]
    fn rejects_bad_magic_and_dimension_mismatch() {
        let mut bytes = FeatureGrid::filled(2, 2, 0.5).unwrap().to_bytes();
        bytes[0] = b'X';
        assert_eq!(FeatureGrid::from_bytes(&bytes), Err(GridError::BadMagic));

        let mut truncated = FeatureGrid::filled(2, 2, 0.5).unwrap().to_bytes();
        truncated.pop();
        assert!(matches!(
            FeatureGrid::from_bytes(&truncated),
            Err(GridError::Truncated { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_on_read() {
        let mut bytes = FeatureGrid::filled(1, 2, 0.5).unwrap().to_bytes();
        bytes[8..12].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(FeatureGrid::from_bytes(&bytes), Err(GridError::NonFinite(0)));
    }

    #[test]
    fn single_value_difference_changes_digest() {
        let a = FeatureGrid::filled(4, 4, 0.25).unwrap();
        let mut b = a.clone();
        b.set(3, 3, 0.75);
        assert_ne!(Digest::of(&a.to_bytes()), Digest::of(&b.to_bytes()));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            rows in 1u16..24,
            cols in 1u16..24,
            seed in any::<u64>(),
        ) {
            // Pseudo-random but valid values derived from the seed.
            let count = rows as usize * cols as usize;
            let mut state = seed;
            let values: Vec<f32> = (0..count)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 40) as f32) / ((1u64 << 24) as f32)
                })
                .collect();
            let g = FeatureGrid::new(rows, cols, values).unwrap();
            let bytes = g.to_bytes();
            let back = FeatureGrid::from_bytes(&bytes).unwrap();
            prop_assert_eq!(back.to_bytes(), bytes);
            prop_assert_eq!(back, g);
        }
    }
}
