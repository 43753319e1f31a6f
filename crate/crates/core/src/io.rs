//! Artifact formats: the binary FieldGridFile, CSV curves, `key value` text,
//! 8-bit grayscale previews and a SHA-256 manifest.
//!
//! FieldGridFile layout (all little-endian):
//!
//! | offset | type    | content                               |
//! |--------|---------|---------------------------------------|
//! | 0      | [u8; 4] | `EITF`                                |
//! | 4      | u16     | format version (1)                    |
//! | 6      | u8      | domain: 0 spatial, 1 frequency        |
//! | 7      | u8      | kind: 0 real, 1 complex               |
//! | 8      | u32     | nx                                    |
//! | 12     | u32     | ny                                    |
//! | 16     | f64     | dx (m or 1/m)                         |
//! | 24     | f64     | dy                                    |
//! | 32     | f64…    | row-major payload, (re, im) if complex |

use ndarray::Array2;
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::cell::ComplexField;
use crate::error::{EitError, Result};
use crate::grid::GridSpec;
use crate::optics::FarField;
use crate::patterns::CouplingMap;

pub const MAGIC: &[u8; 4] = b"EITF";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Spatial = 0,
    Frequency = 1,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl FieldData {
    fn dim(&self) -> (usize, usize) {
        match self {
            FieldData::Real(a) => a.dim(),
            FieldData::Complex(a) => a.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGridFile {
    pub domain: Domain,
    pub dx: f64,
    pub dy: f64,
    pub data: FieldData,
}

impl FieldGridFile {
    pub fn from_field(field: &ComplexField) -> Self {
        Self {
            domain: Domain::Spatial,
            dx: field.grid.dx,
            dy: field.grid.dy,
            data: FieldData::Complex(field.amplitude.clone()),
        }
    }

    pub fn from_far_field(far: &FarField) -> Self {
        Self {
            domain: Domain::Frequency,
            dx: far.grid.dx,
            dy: far.grid.dy,
            data: FieldData::Complex(far.amplitude.clone()),
        }
    }

    pub fn from_real(grid: &GridSpec, values: &Array2<f64>) -> Self {
        Self {
            domain: Domain::Spatial,
            dx: grid.dx,
            dy: grid.dy,
            data: FieldData::Real(values.clone()),
        }
    }

    pub fn from_map(map: &CouplingMap) -> Self {
        Self::from_real(&map.grid, &map.intensity)
    }

    pub fn nx(&self) -> usize {
        self.data.dim().1
    }

    pub fn ny(&self) -> usize {
        self.data.dim().0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (ny, nx) = self.data.dim();
        let (kind, per) = match self.data {
            FieldData::Real(_) => (0u8, 1),
            FieldData::Complex(_) => (1u8, 2),
        };
        let mut out = Vec::with_capacity(HEADER_LEN + nx * ny * per * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.domain as u8);
        out.push(kind);
        out.extend_from_slice(&(nx as u32).to_le_bytes());
        out.extend_from_slice(&(ny as u32).to_le_bytes());
        out.extend_from_slice(&self.dx.to_le_bytes());
        out.extend_from_slice(&self.dy.to_le_bytes());
        match &self.data {
            FieldData::Real(a) => a
                .iter()
                .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
            FieldData::Complex(a) => a.iter().for_each(|z| {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(EitError::Format(format!(
                "file too short ({} bytes)",
                bytes.len()
            )));
        }
        if &bytes[0..4] != MAGIC {
            return Err(EitError::Format("bad magic, not an EITF file".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(EitError::Format(format!("unsupported version {version}")));
        }
        let domain = match bytes[6] {
            0 => Domain::Spatial,
            1 => Domain::Frequency,
            d => return Err(EitError::Format(format!("bad domain flag {d}"))),
        };
        let complex = match bytes[7] {
            0 => false,
            1 => true,
            k => return Err(EitError::Format(format!("bad value kind {k}"))),
        };
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let (nx, ny) = (u32_at(8), u32_at(12));
        let (dx, dy) = (f64_at(16), f64_at(24));
        let per = if complex { 2 } else { 1 };
        let expected = nx
            .checked_mul(ny)
            .and_then(|n| n.checked_mul(per * 8))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| EitError::Format("dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(EitError::Format(format!(
                "payload length mismatch: {} bytes, expected {expected} for {nx}x{ny}",
                bytes.len()
            )));
        }
        let values: Vec<f64> = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let shape_err = |e: ndarray::ShapeError| EitError::Format(e.to_string());
        let data = if complex {
            let z = values
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            FieldData::Complex(Array2::from_shape_vec((ny, nx), z).map_err(shape_err)?)
        } else {
            FieldData::Real(Array2::from_shape_vec((ny, nx), values).map_err(shape_err)?)
        };
        Ok(Self {
            domain,
            dx,
            dy,
            data,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Interpret as a complex field centered on the origin.
    pub fn into_field(self, lambda: f64) -> Result<ComplexField> {
        let (ny, nx) = self.data.dim();
        let grid = GridSpec::new(nx, ny, self.dx, self.dy)?;
        let amplitude = match self.data {
            FieldData::Complex(a) => a,
            FieldData::Real(a) => a.mapv(|v| Complex64::new(v, 0.0)),
        };
        ComplexField::new(grid, amplitude, lambda)
    }
}

/// 8-bit grayscale PNG, linearly scaled min→0, max→255, +y up.
pub fn write_png(path: &Path, values: &Array2<f64>) -> Result<()> {
    let (ny, nx) = values.dim();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let img = image::GrayImage::from_fn(nx as u32, ny as u32, |x, y| {
        let v = values[[ny - 1 - y as usize, x as usize]];
        image::Luma([(((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8])
    });
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.12e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_records(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One `key value` pair per line.
pub fn key_values(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Files written into an output directory, with checksums.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    root: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub const FILE_NAME: &'static str = "manifest.txt";

    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            entries: Vec::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Record a file already written under the root.
    pub fn record(&mut self, name: &str) -> Result<()> {
        let data = fs::read(self.root.join(name))?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
        Ok(())
    }

    pub fn write_bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        fs::write(self.root.join(name), data)?;
        self.record(name)
    }

    pub fn to_text(&self) -> String {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        entries
            .iter()
            .map(|e| format!("{}  {:>10}  {}\n", e.sha256, e.bytes, e.path))
            .collect()
    }

    pub fn finish(&self) -> Result<PathBuf> {
        let p = self.root.join(Self::FILE_NAME);
        fs::write(&p, self.to_text())?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> ComplexField {
        let g = GridSpec::new(8, 10, 1e-6, 2e-6).unwrap();
        let a = Array2::from_shape_fn(g.shape(), |(iy, ix)| {
            Complex64::new(ix as f64, -(iy as f64))
        });
        ComplexField::new(g, a, 780e-9).unwrap()
    }

    #[test]
    fn header_layout_is_exact() {
        let f = FieldGridFile::from_field(&sample_field());
        let b = f.to_bytes();
        assert_eq!(&b[0..4], b"EITF");
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(b[6], 0);
        assert_eq!(b[7], 1);
        assert_eq!(&b[8..12], &8u32.to_le_bytes());
        assert_eq!(&b[12..16], &10u32.to_le_bytes());
        assert_eq!(&b[16..24], &1e-6f64.to_le_bytes());
        assert_eq!(b.len(), 32 + 8 * 10 * 2 * 8);
        // First payload value is (re, im) of [0, 0], then [0, 1].
        assert_eq!(&b[48..56], &1.0f64.to_le_bytes());
    }

    #[test]
    fn round_trip_complex_and_real() {
        let field = sample_field();
        let f = FieldGridFile::from_field(&field);
        let back = FieldGridFile::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.into_field(780e-9).unwrap().amplitude, field.amplitude);
        let r = FieldGridFile::from_real(&field.grid, &field.amplitude.mapv(|z| z.re));
        let rb = r.to_bytes();
        assert_eq!(rb.len(), 32 + 80 * 8);
        assert_eq!(FieldGridFile::from_bytes(&rb).unwrap(), r);
    }

    #[test]
    fn rejects_corrupt_files() {
        let b = FieldGridFile::from_field(&sample_field()).to_bytes();
        assert!(FieldGridFile::from_bytes(&b[..20]).is_err());
        assert!(FieldGridFile::from_bytes(&b[..b.len() - 8]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(FieldGridFile::from_bytes(&bad).is_err());
        let mut bad = b.clone();
        bad[7] = 3;
        assert!(FieldGridFile::from_bytes(&bad).is_err());
        let mut bad = b;
        bad[4] = 2;
        assert!(matches!(
            FieldGridFile::from_bytes(&bad),
            Err(EitError::Format(_))
        ));
    }

    #[test]
    fn manifest_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new(dir.path());
        m.write_bytes("b.txt", b"abc").unwrap();
        m.write_bytes("a.txt", b"").unwrap();
        let text = m.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].ends_with("a.txt"));
        assert!(lines[0].starts_with("e3b0c44298fc1c149afbf4c8996fb924"));
        assert!(lines[1].starts_with("ba7816bf8f01cfea414140de5dae2223"));
        m.finish().unwrap();
        assert!(dir.path().join("manifest.txt").exists());
    }

    #[test]
    fn csv_and_png_written() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_csv(&p, &["x", "y"], &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,y\n1.000000000000e0,2.000000000000e0\n"));
        let png = dir.path().join("m.png");
        write_png(
            &png,
            &Array2::from_shape_fn((8, 8), |(i, j)| (i + j) as f64),
        )
        .unwrap();
        let img = image::open(&png).unwrap().to_luma8();
        assert_eq!(img.dimensions(), (8, 8));
        assert_eq!(img.get_pixel(0, 7).0[0], 0);
        assert_eq!(img.get_pixel(7, 0).0[0], 255);
        assert_eq!(key_values(&[("a".into(), "1".into())]), "a 1\n");
    }
}
