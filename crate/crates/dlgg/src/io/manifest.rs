//! Run manifest: an ordered key=value file with enough information to
//! reproduce a run bit-exactly (full command line, seed, config echo, input
//! digest, tool version, wall-clock duration).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    /// Set or replace a key. Keys must not contain '='.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        assert!(!key.contains('='), "manifest keys cannot contain '='");
        let value = value.to_string();
        if let Some(e) = self.entries.iter_mut().find(|(k, _)| k == key) {
            e.1 = value;
        } else {
            self.entries.push((key.to_string(), value));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        fs::write(path.as_ref(), out)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.as_ref().display())))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut m = Manifest::new();
        for (li, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => m.entries.push((k.to_string(), v.to_string())),
                None => {
                    return Err(Error::BadFormat(format!(
                        "manifest line {} of {} has no '='",
                        li + 1,
                        path.display()
                    )))
                }
            }
        }
        Ok(m)
    }
}

/// FNV-1a 64-bit digest, reported as fixed-width hex.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn file_digest(path: impl AsRef<Path>) -> Result<String> {
    let bytes = fs::read(path.as_ref())
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.as_ref().display())))?;
    Ok(fnv1a64(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_order() {
        let mut m = Manifest::new();
        m.set("tool_version", "0.1.0");
        m.set("seed", 42u64);
        m.set("command", "fit --data x.csv --seed 42");
        let dir = std::env::temp_dir().join(format!("dlgg-man-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("manifest.txt");
        m.write(&path).unwrap();
        let back = Manifest::read(&path).unwrap();
        assert_eq!(m, back);
        assert_eq!(back.get("seed"), Some("42"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(fnv1a64(b""), "cbf29ce484222325");
        assert_eq!(fnv1a64(b"a"), fnv1a64(b"a"));
        assert_ne!(fnv1a64(b"a"), fnv1a64(b"b"));
    }
}
