use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::series::CoefficientSeries;
use super::ArithError;

pub const CACHE_MAGIC: &[u8; 8] = b"RESCOEF\0";
pub const CACHE_VERSION: u32 = 1;

const FLAG_MULTIPLICATIVE: u32 = 1;
const RECORD_BYTES: usize = 24;

/// Directory of coefficient files, one per `(label, N_max)`.
///
/// Layout (little endian): magic, version u32, flags u32, label (u32 length +
/// UTF-8), normalisation note (u32 length + UTF-8), N_max u64, record count
/// u64, records `(n u64, re f64 bits, im f64 bits)`, FNV-1a 64 checksum of
/// everything before it.
#[derive(Debug, Clone)]
pub struct CoefficientCache {
    dir: PathBuf,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c.to_string()
            } else {
                format!("%{:x}", c as u32)
            }
        })
        .collect()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ArithError> {
        if self.buf.len() - self.pos < n {
            return Err(self.corrupt("truncated file"));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, ArithError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ArithError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, ArithError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| self.corrupt("invalid UTF-8"))
    }

    fn corrupt(&self, reason: &str) -> ArithError {
        ArithError::Integrity {
            path: self.path.display().to_string(),
            reason: reason.to_string(),
        }
    }
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, label: &str, n_max: usize) -> PathBuf {
        self.dir.join(format!("{}_{}.rcc", file_stem(label), n_max))
    }

    pub fn write(&self, series: &CoefficientSeries) -> Result<PathBuf, ArithError> {
        fs::create_dir_all(&self.dir)?;
        let mut buf = Vec::with_capacity(64 + series.n_max() * RECORD_BYTES);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        let flags = if series.is_multiplicative() {
            FLAG_MULTIPLICATIVE
        } else {
            0
        };
        buf.extend_from_slice(&flags.to_le_bytes());
        for s in [series.label(), series.normalization()] {
            buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
            buf.extend_from_slice(s.as_bytes());
        }
        buf.extend_from_slice(&(series.n_max() as u64).to_le_bytes());
        buf.extend_from_slice(&(series.n_max() as u64).to_le_bytes());
        for (i, v) in series.values().iter().enumerate() {
            buf.extend_from_slice(&(i as u64 + 1).to_le_bytes());
            buf.extend_from_slice(&v.re.to_bits().to_le_bytes());
            buf.extend_from_slice(&v.im.to_bits().to_le_bytes());
        }
        let checksum = fnv1a(&buf);
        buf.extend_from_slice(&checksum.to_le_bytes());

        let path = self.path_for(series.label(), series.n_max());
        let tmp = path.with_extension("rcc.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&buf)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn read(&self, label: &str, n_max: usize) -> Result<CoefficientSeries, ArithError> {
        let path = self.path_for(label, n_max);
        let buf = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ArithError::NotFound(format!("{label} (N_max = {n_max})")))
            }
            Err(e) => return Err(e.into()),
        };
        let mut r = Reader {
            buf: &buf,
            pos: 0,
            path: &path,
        };
        if r.take(8)? != CACHE_MAGIC {
            return Err(r.corrupt("bad magic"));
        }
        let version = r.u32()?;
        if version != CACHE_VERSION {
            return Err(ArithError::VersionMismatch {
                found: version,
                expected: CACHE_VERSION,
            });
        }
        let flags = r.u32()?;
        let stored_label = r.string()?;
        let note = r.string()?;
        if stored_label != label {
            return Err(r.corrupt("label does not match file name"));
        }
        let stored_n = r.u64()? as usize;
        let count = r.u64()? as usize;
        if stored_n != n_max || count != n_max {
            return Err(r.corrupt("record count does not match N_max"));
        }
        if buf.len() != r.pos + count * RECORD_BYTES + 8 {
            return Err(r.corrupt("truncated file"));
        }
        let mut values = Vec::with_capacity(count);
        for i in 0..count {
            let n = r.u64()?;
            if n != i as u64 + 1 {
                return Err(r.corrupt("records out of order"));
            }
            let re = f64::from_bits(r.u64()?);
            let im = f64::from_bits(r.u64()?);
            values.push(Complex64::new(re, im));
        }
        let body_end = r.pos;
        let checksum = r.u64()?;
        if checksum != fnv1a(&buf[..body_end]) {
            return Err(r.corrupt("checksum mismatch"));
        }
        Ok(CoefficientSeries::new(
            stored_label,
            values,
            flags & FLAG_MULTIPLICATIVE != 0,
            note,
        ))
    }

    /// Reads the series if cached, otherwise computes and stores it.
    pub fn get_or_insert_with<F>(
        &self,
        label: &str,
        n_max: usize,
        compute: F,
    ) -> Result<CoefficientSeries, ArithError>
    where
        F: FnOnce() -> Result<CoefficientSeries, ArithError>,
    {
        match self.read(label, n_max) {
            Ok(s) => Ok(s),
            Err(ArithError::NotFound(_)) => {
                let s = compute()?;
                self.write(&s)?;
                Ok(s)
            }
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{cuspform_coefficients, CuspForm};

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let series = cuspform_coefficients(CuspForm::Delta, 10_000).unwrap();
        cache.write(&series).unwrap();
        let back = cache.read(series.label(), 10_000).unwrap();
        assert_eq!(back.label(), series.label());
        assert_eq!(back.is_multiplicative(), series.is_multiplicative());
        for (a, b) in back.values().iter().zip(series.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn missing_label() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        assert!(matches!(
            cache.read("nothing", 5),
            Err(ArithError::NotFound(_))
        ));
    }

    #[test]
    fn truncated_file() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let path = cache.write(&CoefficientSeries::zeta(100)).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 30]).unwrap();
        assert!(matches!(
            cache.read("zeta", 100),
            Err(ArithError::Integrity { .. })
        ));
        fs::write(&path, &bytes[..10]).unwrap();
        assert!(matches!(
            cache.read("zeta", 100),
            Err(ArithError::Integrity { .. })
        ));
    }

    #[test]
    fn corrupted_header_and_payload() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let path = cache.write(&CoefficientSeries::zeta(100)).unwrap();
        let good = fs::read(&path).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        fs::write(&path, &bad).unwrap();
        assert!(matches!(cache.read("zeta", 100), Err(ArithError::Integrity { .. })));

        let mut bad = good.clone();
        bad[8] = 9;
        fs::write(&path, &bad).unwrap();
        assert!(matches!(
            cache.read("zeta", 100),
            Err(ArithError::VersionMismatch { found: 9, .. })
        ));

        let mut bad = good;
        let k = bad.len() - 20;
        bad[k] ^= 1;
        fs::write(&path, &bad).unwrap();
        assert!(matches!(cache.read("zeta", 100), Err(ArithError::Integrity { .. })));
    }

    #[test]
    fn labels_with_separators() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoefficientCache::new(dir.path());
        let s = CoefficientSeries::new("chi:4:1", vec![Complex64::new(1.0, 0.0); 3], true, "");
        cache.write(&s).unwrap();
        assert_eq!(cache.read("chi:4:1", 3).unwrap(), s);
        let mut calls = 0;
        cache
            .get_or_insert_with("chi:4:1", 3, || {
                calls += 1;
                Ok(s.clone())
            })
            .unwrap();
        assert_eq!(calls, 0);
    }
}
