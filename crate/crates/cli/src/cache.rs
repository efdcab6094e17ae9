//! Per-curve trace cache.
//!
//! ```text
//! NAGAOLAB-CACHE v1
//! <degree> <hash>
//! p,a
//! ...
//! ```
//!
//! Records are the good primes of the curve in ascending order, a
//! contiguous prefix starting at 3. Files only ever grow; a final line
//! without its LF is a torn write and is cut off on open.

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nagaolab::{curves, CurveSpec, IntPolynomial, Prime, TraceRecord};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const HEADER: &str = "NAGAOLAB-CACHE v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub degree: usize,
    pub hash: u64,
}

impl Fingerprint {
    /// Degree plus the first 8 bytes (big-endian) of the SHA-256 of the
    /// canonical printed form.
    pub fn of(f: &IntPolynomial) -> Self {
        let digest = Sha256::digest(f.to_string().as_bytes());
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Fingerprint {
            degree: f.degree().unwrap_or(0),
            hash: u64::from_be_bytes(head),
        }
    }

    pub fn file_name(&self) -> String {
        format!("curve-d{}-{:016x}.cache", self.degree, self.hash)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.degree, self.hash)
    }
}

#[derive(Debug)]
pub struct TraceCache {
    path: PathBuf,
    fingerprint: Fingerprint,
    records: Vec<TraceRecord>,
}

/// Parses a whole cache file; the error says why it was rejected.
fn parse_body(text: &str, fp: Fingerprint) -> Result<Vec<TraceRecord>, String> {
    let mut lines = text.split_terminator('\n');
    if lines.next() != Some(HEADER) {
        return Err("missing header".into());
    }
    let want = fp.to_string();
    match lines.next() {
        Some(line) if line == want => {}
        Some(line) => return Err(format!("fingerprint '{}' does not match '{}'", line, want)),
        None => return Err("missing fingerprint".into()),
    }
    let mut records: Vec<TraceRecord> = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 3;
        let (p, a) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected 'p,a'", lineno))?;
        let p: u64 = p
            .parse()
            .map_err(|_| format!("line {}: bad prime '{}'", lineno, p))?;
        let a: i64 = a
            .parse()
            .map_err(|_| format!("line {}: bad trace '{}'", lineno, a))?;
        if records.last().is_some_and(|r| r.p >= p) {
            return Err(format!("line {}: primes not strictly ascending", lineno));
        }
        records.push(TraceRecord { p, a });
    }
    Ok(records)
}

impl TraceCache {
    /// Opens or creates the cache for `f` in `dir`. A malformed file is
    /// quarantined and reported.
    pub fn open(dir: &Path, f: &IntPolynomial) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let fingerprint = Fingerprint::of(f);
        let path = dir.join(fingerprint.file_name());
        if !path.exists() {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, format!("{}\n{}\n", HEADER, fingerprint))
                .map_err(|e| CliError::io(&tmp, e))?;
            fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
            return Ok(TraceCache {
                path,
                fingerprint,
                records: Vec::new(),
            });
        }
        let mut text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        if !text.ends_with('\n') {
            let keep = text.rfind('\n').map_or(0, |i| i + 1);
            log::warn!("{}: dropping torn final line", path.display());
            text.truncate(keep);
            let file = OpenOptions::new()
                .write(true)
                .open(&path)
                .map_err(|e| CliError::io(&path, e))?;
            file.set_len(keep as u64)
                .map_err(|e| CliError::io(&path, e))?;
        }
        let cache = TraceCache {
            path,
            fingerprint,
            records: Vec::new(),
        };
        match parse_body(&text, fingerprint) {
            Ok(records) => Ok(TraceCache { records, ..cache }),
            Err(message) => Err(cache.reject(message)),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn get(&self, p: u64) -> Option<i64> {
        self.records
            .binary_search_by_key(&p, |r| r.p)
            .ok()
            .map(|i| self.records[i].a)
    }

    /// Appends records with primes beyond the last cached one.
    pub fn append(&mut self, new: &[TraceRecord]) -> Result<(), CliError> {
        if new.is_empty() {
            return Ok(());
        }
        let mut last = self.records.last().map_or(0, |r| r.p);
        let mut buf = String::new();
        for r in new {
            assert!(
                r.p > last,
                "cache records must be appended in ascending order"
            );
            last = r.p;
            buf.push_str(&format!("{},{}\n", r.p, r.a));
        }
        let mut file = OpenOptions::new()
            .append(true)
            .open(&self.path)
            .map_err(|e| CliError::io(&self.path, e))?;
        file.write_all(buf.as_bytes())
            .and_then(|_| file.sync_data())
            .map_err(|e| CliError::io(&self.path, e))?;
        self.records.extend_from_slice(new);
        Ok(())
    }

    /// Recomputes every record; the first disagreement rejects the file.
    pub fn verify(self, curve: &CurveSpec) -> Result<Self, CliError> {
        for r in &self.records {
            let expected = Prime::new(r.p)
                .ok()
                .filter(|p| curve.is_good(p.get()))
                .map(|p| curves::trace(curve, p))
                .transpose()?;
            match expected {
                Some(t) if t.a == r.a => {}
                Some(t) => {
                    let msg = format!("p = {}: cached a = {}, recomputed {}", r.p, r.a, t.a);
                    return Err(self.reject(msg));
                }
                None => {
                    let msg = format!("p = {} is not a good prime for {}", r.p, curve.poly());
                    return Err(self.reject(msg));
                }
            }
        }
        Ok(self)
    }

    /// Moves the file aside and builds the corruption error.
    pub fn reject(&self, message: String) -> CliError {
        let quarantined = match quarantine(&self.path) {
            Ok(q) => q.display().to_string(),
            Err(e) => format!("<not moved: {}>", e),
        };
        CliError::CacheCorrupt {
            path: self.path.display().to_string(),
            message,
            quarantined,
        }
    }
}

fn quarantine(path: &Path) -> io::Result<PathBuf> {
    let mut n = 0;
    loop {
        let target = PathBuf::from(format!("{}.corrupt.{}", path.display(), n));
        if !target.exists() {
            fs::rename(path, &target)?;
            return Ok(target);
        }
        n += 1;
    }
}

/// Reads the records of a cache file without repairing it.
pub fn read_records(path: &Path, f: &IntPolynomial) -> io::Result<Vec<TraceRecord>> {
    let mut text = String::new();
    io::Read::read_to_string(&mut File::open(path)?, &mut text)?;
    parse_body(&text, Fingerprint::of(f)).map_err(|m| io::Error::new(io::ErrorKind::InvalidData, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn fingerprint_is_stable() {
        let a = Fingerprint::of(&poly("x^3 + x"));
        assert_eq!(a, Fingerprint::of(&poly("x + x^3")));
        assert_ne!(a, Fingerprint::of(&poly("x^3 - x")));
        assert_eq!(a.degree, 3);
        assert!(a.to_string().starts_with("3 "));
    }

    #[test]
    fn round_trip_and_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let f = poly("x^3 + x");
        let mut c = TraceCache::open(dir.path(), &f).unwrap();
        c.append(&[TraceRecord { p: 3, a: 0 }, TraceRecord { p: 5, a: 2 }])
            .unwrap();
        let path = c.path().to_path_buf();
        let mut file = OpenOptions::new().append(true).open(&path).unwrap();
        file.write_all(b"7,0").unwrap();
        let c = TraceCache::open(dir.path(), &f).unwrap();
        assert_eq!(c.records().len(), 2);
        assert_eq!(c.get(5), Some(2));
        assert_eq!(c.get(7), None);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.ends_with("5,2\n"));
        assert!(text.starts_with("NAGAOLAB-CACHE v1\n3 "));
    }

    #[test]
    fn corrupt_file_is_quarantined() {
        let dir = tempfile::tempdir().unwrap();
        let f = poly("x^3 + x");
        let path = dir.path().join(Fingerprint::of(&f).file_name());
        fs::write(
            &path,
            format!("{}\n{}\n5,2\n3,0\n", HEADER, Fingerprint::of(&f)),
        )
        .unwrap();
        let err = TraceCache::open(dir.path(), &f).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(!path.exists());
        assert!(dir
            .path()
            .join(format!("{}.corrupt.0", Fingerprint::of(&f).file_name()))
            .exists());
    }

    #[test]
    fn verify_detects_wrong_trace() {
        let dir = tempfile::tempdir().unwrap();
        let f = poly("x^3 + x");
        let mut c = TraceCache::open(dir.path(), &f).unwrap();
        c.append(&[TraceRecord { p: 3, a: 0 }, TraceRecord { p: 5, a: -2 }])
            .unwrap();
        let curve = nagaolab::curve_from_poly(f).unwrap();
        assert_eq!(c.verify(&curve).unwrap_err().exit_code(), 4);
    }
}
