//! File formats: CSV tables, the binary CIR file, `.iq` sample dumps and
//! event-trace TSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use fabnet_core::event::TraceRecord;
use fabnet_core::nlos::{Cir, Label};
use fabnet_core::Complex64;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes `rows` with a header taken from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// CIR file: `count` and `tap_count` as little-endian u32, then per record
/// `tap_count` taps as little-endian f64 I/Q pairs followed by a u8 label.
pub fn write_cirs(path: &Path, cirs: &[Cir]) -> Result<()> {
    let taps = cirs.first().map_or(0, |c| c.taps.len());
    if cirs.iter().any(|c| c.taps.len() != taps) {
        bail!("all CIRs in a file must have the same tap count");
    }
    let mut w = create(path)?;
    w.write_all(&u32::try_from(cirs.len())?.to_le_bytes())?;
    w.write_all(&u32::try_from(taps)?.to_le_bytes())?;
    for c in cirs {
        for t in &c.taps {
            w.write_all(&t.re.to_le_bytes())?;
            w.write_all(&t.im.to_le_bytes())?;
        }
        w.write_all(&[c.label.code()])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_cirs(path: &Path) -> Result<Vec<Cir>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    decode_cirs(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn decode_cirs<R: Read>(mut r: R) -> Result<Vec<Cir>> {
    let mut u32_buf = [0u8; 4];
    let mut f64_buf = [0u8; 8];
    r.read_exact(&mut u32_buf).context("truncated header")?;
    let count = u32::from_le_bytes(u32_buf) as usize;
    r.read_exact(&mut u32_buf).context("truncated header")?;
    let taps = u32::from_le_bytes(u32_buf) as usize;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for i in 0..count {
        let mut t = Vec::with_capacity(taps);
        for _ in 0..taps {
            r.read_exact(&mut f64_buf).with_context(|| format!("truncated record {i}"))?;
            let re = f64::from_le_bytes(f64_buf);
            r.read_exact(&mut f64_buf).with_context(|| format!("truncated record {i}"))?;
            t.push(Complex64::new(re, f64::from_le_bytes(f64_buf)));
        }
        let mut code = [0u8];
        r.read_exact(&mut code).with_context(|| format!("truncated record {i}"))?;
        let label = Label::from_code(code[0]).with_context(|| format!("record {i}: bad label {}", code[0]))?;
        out.push(Cir::new(t, label).with_context(|| format!("record {i}"))?);
    }
    if r.read(&mut [0u8])? != 0 {
        bail!("trailing bytes after {count} records");
    }
    Ok(out)
}

/// Interleaved little-endian f64 I/Q.
pub fn write_iq(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut w = create(path)?;
    for s in samples {
        w.write_all(&s.re.to_le_bytes())?;
        w.write_all(&s.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() % 16 != 0 {
        bail!("{}: length {} is not a whole number of samples", path.display(), bytes.len());
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

/// One line per event: `time_ns  seq  kind  target`, tab separated.
pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let mut w = create(path)?;
    for r in trace {
        writeln!(w, "{}", r.line())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cir(seed: u64, label: Label) -> Cir {
        let taps = (0..8).map(|i| Complex64::new((seed + i) as f64 * 0.1, -(i as f64) / 3.0)).collect();
        Cir::new(taps, label).unwrap()
    }

    #[test]
    fn cir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.bin");
        let cirs = vec![cir(1, Label::Los), cir(2, Label::Nlos), cir(3, Label::Unknown)];
        write_cirs(&path, &cirs).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 + 3 * (8 * 16 + 1));
        assert_eq!(read_cirs(&path).unwrap(), cirs);
    }

    #[test]
    fn cir_file_checks() {
        let mut bytes = Vec::new();
        bytes.extend(1u32.to_le_bytes());
        bytes.extend(8u32.to_le_bytes());
        bytes.extend([0u8; 16 * 8]);
        bytes.push(0);
        // All-zero taps.
        assert!(decode_cirs(&bytes[..]).is_err());
        bytes[8..16].copy_from_slice(&1.0f64.to_le_bytes());
        assert!(decode_cirs(&bytes[..]).is_ok());
        assert!(decode_cirs(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_cirs(&extra[..]).is_err());
        let mut bad = bytes.clone();
        *bad.last_mut().unwrap() = 7;
        assert!(decode_cirs(&bad[..]).is_err());
    }

    #[test]
    fn iq_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.iq");
        let x = [Complex64::new(1.5, -2.0), Complex64::new(0.0, 1e-300)];
        write_iq(&path, &x).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes[..8], 1.5f64.to_le_bytes());
        assert_eq!(bytes[8..16], (-2.0f64).to_le_bytes());
        assert_eq!(read_iq(&path).unwrap(), x);
    }
}
