//! CSV tables and the binary moment cache.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use planar_ortho::linalg::CMatrix;
use planar_ortho::moments::{MomentOptions, MomentTable};
use planar_ortho::process::{EigenConfiguration, RadialHistogram};
use planar_ortho::{DomainSpec, C64};
use sha2::{Digest, Sha256};

use crate::domain::format_domain;

/// Minimal CSV writer. Numbers use `Display`, which is exact and
/// deterministic for `f64`.
pub struct Csv<W: Write> {
    out: W,
    width: usize,
}

impl<W: Write> Csv<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Csv { out, width: header.len() })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.width);
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Field text for a number; empty for "not available". Both notations
/// print the shortest digits that parse back to the same `f64`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if a == 0.0 || (1e-4..1e15).contains(&a) || a.is_infinite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn write_moments_csv<W: Write>(out: W, table: &MomentTable) -> io::Result<()> {
    let mut csv = Csv::new(out, &["row", "col", "re", "im"])?;
    let m = &table.entries;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m[(r, c)];
            csv.row(&[r.to_string(), c.to_string(), num(v.re), num(v.im)])?;
        }
    }
    csv.finish().map(drop)
}

/// One row per point; `index` runs over configurations then points, so
/// configuration `k` holds indices `k·N .. (k+1)·N`.
pub fn write_samples_csv<W: Write>(out: W, samples: &[EigenConfiguration]) -> io::Result<()> {
    let mut csv = Csv::new(out, &["index", "re", "im"])?;
    let points = samples.iter().flat_map(|c| c.points.iter());
    for (i, p) in points.enumerate() {
        csv.row(&[i.to_string(), num(p.re), num(p.im)])?;
    }
    csv.finish().map(drop)
}

pub fn write_histogram_csv<W: Write>(out: W, hist: &RadialHistogram) -> io::Result<()> {
    let mut csv = Csv::new(out, &["bin_lo", "bin_hi", "density", "stderr"])?;
    for b in &hist.bins {
        csv.row(&[num(b.lo), num(b.hi), num(b.density), num(b.stderr)])?;
    }
    csv.finish().map(drop)
}

const CACHE_MAGIC: &[u8; 8] = b"PLOMC\x00\x00\x01";

/// File-backed store of moment tables keyed by a SHA-256 digest of the
/// inputs that determine them.
#[derive(Debug, Clone)]
pub struct MomentCache {
    dir: PathBuf,
}

impl MomentCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MomentCache { dir: dir.into() }
    }

    pub fn key(domain: &DomainSpec, n_max: usize, s: f64, opts: &MomentOptions) -> String {
        let text = format!(
            "{}|{}|{:016x}|{}|{}|{:016x}",
            format_domain(domain),
            n_max,
            s.to_bits(),
            opts.angular_nodes,
            opts.verify,
            opts.tol.to_bits()
        );
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.moments"))
    }

    /// `Ok(None)` on a miss; a corrupt file is an error.
    pub fn load(&self, key: &str) -> io::Result<Option<MomentTable>> {
        match fs::File::open(self.path(key)) {
            Ok(mut f) => {
                let mut bytes = Vec::new();
                f.read_to_end(&mut bytes)?;
                decode_table(&bytes).map(Some)
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Writes through a temporary file so readers never see a partial table.
    pub fn store(&self, key: &str, table: &MomentTable) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, encode_table(table))?;
        fs::rename(tmp, path)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

pub fn encode_table(t: &MomentTable) -> Vec<u8> {
    let n = t.n_max + 1;
    let mut out = Vec::with_capacity(48 + 3 * n * n * 16);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&(t.n_max as u64).to_le_bytes());
    out.extend_from_slice(&t.s.to_le_bytes());
    out.extend_from_slice(&(t.angular_nodes as u64).to_le_bytes());
    out.extend_from_slice(&t.doubling_change.to_le_bytes());
    for m in [&t.entries, &t.interior_part, &t.exterior_part] {
        for r in 0..n {
            for v in m.row(r) {
                out.extend_from_slice(&v.re.to_le_bytes());
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_table(bytes: &[u8]) -> io::Result<MomentTable> {
    let corrupt = || io::Error::new(io::ErrorKind::InvalidData, "corrupt moment cache file");
    let mut rest = bytes.strip_prefix(CACHE_MAGIC.as_slice()).ok_or_else(corrupt)?;
    let mut word = || -> io::Result<[u8; 8]> {
        let (head, tail) = rest.split_first_chunk::<8>().ok_or_else(corrupt)?;
        rest = tail;
        Ok(*head)
    };
    let n_max = u64::from_le_bytes(word()?) as usize;
    let s = f64::from_le_bytes(word()?);
    let angular_nodes = u64::from_le_bytes(word()?) as usize;
    let doubling_change = f64::from_le_bytes(word()?);
    let n = n_max.checked_add(1).ok_or_else(corrupt)?;
    let mut matrix = || -> io::Result<CMatrix> {
        let mut vals = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let re = f64::from_le_bytes(word()?);
            let im = f64::from_le_bytes(word()?);
            vals.push(C64::new(re, im));
        }
        Ok(CMatrix::from_fn(n, n, |r, c| vals[r * n + c]))
    };
    let entries = matrix()?;
    let interior_part = matrix()?;
    let exterior_part = matrix()?;
    if !rest.is_empty() {
        return Err(corrupt());
    }
    Ok(MomentTable { n_max, s, entries, interior_part, exterior_part, angular_nodes, doubling_change })
}
