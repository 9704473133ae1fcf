//! Short content hashes that let reports point back at their inputs.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

/// First 64 bits of a SHA-256 digest over a value's canonical bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    pub(crate) fn of_complex(tag: &str, shape: &[usize], entries: &[Complex64]) -> Self {
        let mut h = FingerprintHasher::new(tag);
        for &s in shape {
            h.write_u64(s as u64);
        }
        for z in entries {
            h.write_f64(z.re);
            h.write_f64(z.im);
        }
        h.finish()
    }

    /// Combines several fingerprints into one (order sensitive).
    pub fn combine(tag: &str, parts: &[Fingerprint]) -> Self {
        let mut h = FingerprintHasher::new(tag);
        for p in parts {
            h.write_u64(p.0);
        }
        h.finish()
    }
}

pub(crate) struct FingerprintHasher(Sha256);

impl FingerprintHasher {
    pub(crate) fn new(tag: &str) -> Self {
        let mut d = Sha256::new();
        d.update((tag.len() as u64).to_le_bytes());
        d.update(tag.as_bytes());
        Self(d)
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        self.0.update(v.to_le_bytes());
    }

    pub(crate) fn write_f64(&mut self, v: f64) {
        // -0.0 and 0.0 hash alike
        let v = if v == 0.0 { 0.0 } else { v };
        self.0.update(v.to_bits().to_le_bytes());
    }

    pub(crate) fn finish(self) -> Fingerprint {
        let digest = self.0.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        Fingerprint(u64::from_be_bytes(bytes))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16)
            .map(Fingerprint)
            .map_err(serde::de::Error::custom)
    }
}
