//! SHA-256 digests and content hashing.
//!
//! Every artifact in the pipeline is addressed by its SHA-256 digest. Digests
//! are carried as raw 32-byte values and rendered as 64 lowercase hex
//! characters in text manifests; uppercase hex is rejected on parse so that
//! the text form is canonical.

use std::fmt;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// A 32-byte SHA-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 32]);

/// Error parsing the hex form of a digest.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigestParseError {
    #[error("digest must be 64 hex characters, got {0}")]
    BadLength(usize),
    #[error("digest must be lowercase hex")]
    NotLowercaseHex,
}

impl Digest {
    /// SHA-256 of a byte slice.
    pub fn of(bytes: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(bytes);
        Digest(h.finalize().into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Lowercase hex rendering (64 characters).
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parse the canonical text form: exactly 64 lowercase hex characters.
    pub fn from_hex(s: &str) -> Result<Self, DigestParseError> {
        if s.len() != 64 {
            return Err(DigestParseError::BadLength(s.len()));
        }
        if !s
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        {
            return Err(DigestParseError::NotLowercaseHex);
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|_| DigestParseError::NotLowercaseHex)?;
        Ok(Digest(out))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

/// Streaming SHA-256 of a file's bytes.
pub fn hash_file(path: &Path) -> io::Result<Digest> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(Digest(hasher.finalize().into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    /// Reference value for SHA-256 of empty input.
    const EMPTY_SHA256: &str = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";

    #[test]
    fn empty_input() {
        assert_eq!(Digest::of(b"").to_hex(), EMPTY_SHA256);
    }

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty");
        File::create(&path).unwrap();
        assert_eq!(hash_file(&path).unwrap().to_hex(), EMPTY_SHA256);
    }

    #[test]
    fn file_matches_in_memory() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data");
        let bytes = b"the quick brown fox";
        File::create(&path).unwrap().write_all(bytes).unwrap();
        assert_eq!(hash_file(&path).unwrap(), Digest::of(bytes));
    }

    #[test]
    fn one_bit_change_changes_digest() {
        let a = Digest::of(b"abc");
        let b = Digest::of(b"abd");
        assert_ne!(a, b);
    }

    #[test]
    fn hex_round_trip() {
        let d = Digest::of(b"round trip");
        assert_eq!(Digest::from_hex(&d.to_hex()).unwrap(), d);
    }

    #[test]
    fn rejects_uppercase_and_bad_length() {
        let upper = EMPTY_SHA256.to_uppercase();
        assert_eq!(
            Digest::from_hex(&upper),
            Err(DigestParseError::NotLowercaseHex)
        );
        assert_eq!(
            Digest::from_hex(&EMPTY_SHA256[..63]),
            Err(DigestParseError::BadLength(63))
        );
    }
}
