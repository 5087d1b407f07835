//! On-disk cache of the corner-tree recovery systems.
//!
//! Layout: `GPEB` magic, `u32` format version, `u32` basis version, `u64` payload
//! length (all little endian), the text payload, then its SHA-256.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gpe_core::cornertree::{install_bases, BasisSet, BASIS_VERSION};
use sha2::{Digest, Sha256};

const MAGIC: &[u8; 4] = b"GPEB";
const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

pub const CACHE_ENV: &str = "GPE_CACHE_DIR";

/// `$GPE_CACHE_DIR`, else `$XDG_CACHE_HOME/gpe`, else `~/.cache/gpe`.
pub fn cache_dir() -> Option<PathBuf> {
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty());
    if let Some(d) = env(CACHE_ENV) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = env("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("gpe"));
    }
    env("HOME").map(|h| PathBuf::from(h).join(".cache").join("gpe"))
}

pub fn cache_file(dir: &Path) -> PathBuf {
    dir.join(format!("bases-v{BASIS_VERSION}.bin"))
}

pub fn encode(set: &BasisSet) -> Vec<u8> {
    let payload = set.serialize().into_bytes();
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&BASIS_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

pub fn decode(bytes: &[u8]) -> Result<BasisSet> {
    if bytes.len() < HEADER_LEN + 32 || &bytes[..4] != MAGIC {
        bail!("not a basis cache file");
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    if u32_at(4) != FORMAT_VERSION || u32_at(8) != BASIS_VERSION {
        bail!("cache version mismatch");
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    if bytes.len() != HEADER_LEN + len + 32 {
        bail!("truncated cache file");
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + len];
    if Sha256::digest(payload).as_slice() != &bytes[HEADER_LEN + len..] {
        bail!("checksum mismatch");
    }
    let text = std::str::from_utf8(payload).context("payload is not utf-8")?;
    Ok(BasisSet::deserialize(text)?)
}

/// Loads the cached bases, or builds and stores them; installs the result for the
/// process. Cache problems are logged and never fatal.
pub fn load_or_build() -> Result<()> {
    let dir = cache_dir();
    if let Some(dir) = &dir {
        let path = cache_file(dir);
        match fs::read(&path) {
            Ok(bytes) => match decode(&bytes) {
                Ok(set) => {
                    log::debug!("bases loaded from {}", path.display());
                    install_bases(set);
                    return Ok(());
                }
                Err(e) => log::debug!("ignoring basis cache {}: {e:#}", path.display()),
            },
            Err(e) => log::debug!("no basis cache at {}: {e}", path.display()),
        }
    }
    let set = BasisSet::build()?;
    if let Some(dir) = &dir {
        if let Err(e) = store(dir, &set) {
            log::debug!("could not write basis cache: {e:#}");
        }
    }
    install_bases(set);
    Ok(())
}

fn store(dir: &Path, set: &BasisSet) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&encode(set))?;
    tmp.persist(cache_file(dir))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let set = BasisSet::build().unwrap();
        let bytes = encode(&set);
        let back = decode(&bytes).unwrap();
        assert_eq!(back.serialize(), set.serialize());

        let mut flipped = bytes.clone();
        flipped[HEADER_LEN + 10] ^= 1;
        assert!(decode(&flipped).is_err());
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut other = bytes;
        other[8] = 99;
        assert!(decode(&other).is_err());
    }
}
