//! SWF1 binary snapshots.
//!
//! A record is the magic `SWF1`, five little-endian `u32` values
//! `(kind, N0, N1, N2, N3)` and then the arrays as little-endian `f64` in
//! linear site order. Kind 1 holds one scalar array, kind 2 the four gauge
//! components, kind 3 the four spinor components `(w, x, y, z)`. Fields on Σ
//! are stored with `N2 = N3 = 1`. A file is a sequence of records; a
//! configuration or a tangent vector is a gauge record followed by a spinor
//! record. Lengths are not stored and come from the run configuration.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid, Grid2, Grid4, ScalarField4};
use crate::quat::Quaternion;
use crate::sw_ops::{GaugeField4, ReducedConfig, SpinorField4};
use crate::symplectic::TangentVector4;

pub const MAGIC: &[u8; 4] = b"SWF1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    Scalar = 1,
    Gauge = 2,
    Spinor = 3,
}

impl RecordKind {
    fn from_u32(v: u32) -> Result<Self> {
        match v {
            1 => Ok(Self::Scalar),
            2 => Ok(Self::Gauge),
            3 => Ok(Self::Spinor),
            _ => Err(Error::Snapshot(format!("unknown record kind {v}"))),
        }
    }

    fn arrays(self) -> usize {
        match self {
            Self::Scalar => 1,
            Self::Gauge | Self::Spinor => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: RecordKind,
    pub sizes: [u32; 4],
    pub arrays: Vec<Vec<f64>>,
}

fn sizes_of<const D: usize>(grid: &Grid<D>) -> [u32; 4] {
    let mut s = [1u32; 4];
    for (a, n) in grid.sizes().iter().enumerate() {
        s[a] = *n as u32;
    }
    s
}

fn spinor_arrays<const D: usize>(u: &Field<D, Quaternion>) -> Vec<Vec<f64>> {
    (0..4).map(|c| u.component(c).into_data()).collect()
}

impl Record {
    pub fn site_count(&self) -> usize {
        self.sizes.iter().map(|n| *n as usize).product()
    }

    pub fn scalar<const D: usize>(f: &Field<D>) -> Self {
        Self {
            kind: RecordKind::Scalar,
            sizes: sizes_of(f.grid()),
            arrays: vec![f.data().to_vec()],
        }
    }

    pub fn gauge<const D: usize>(comps: [&Field<D>; 4]) -> Self {
        Self {
            kind: RecordKind::Gauge,
            sizes: sizes_of(comps[0].grid()),
            arrays: comps.iter().map(|c| c.data().to_vec()).collect(),
        }
    }

    pub fn spinor<const D: usize>(u: &Field<D, Quaternion>) -> Self {
        Self {
            kind: RecordKind::Spinor,
            sizes: sizes_of(u.grid()),
            arrays: spinor_arrays(u),
        }
    }

    fn expect(&self, kind: RecordKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Snapshot(format!("expected a {kind:?} record, found {:?}", self.kind)));
        }
        Ok(())
    }

    fn check_grid<const D: usize>(&self, grid: &Grid<D>) -> Result<()> {
        if self.sizes != sizes_of(grid) {
            return Err(Error::GridMismatch(format!(
                "snapshot sizes {:?} do not match grid {:?}",
                self.sizes,
                grid.sizes()
            )));
        }
        Ok(())
    }

    fn field<const D: usize>(&self, grid: &Grid<D>, k: usize) -> Result<Field<D>> {
        Field::from_vec(*grid, self.arrays[k].clone())
    }

    pub fn to_scalar<const D: usize>(&self, grid: &Grid<D>) -> Result<Field<D>> {
        self.expect(RecordKind::Scalar)?;
        self.check_grid(grid)?;
        self.field(grid, 0)
    }

    pub fn to_gauge<const D: usize>(&self, grid: &Grid<D>) -> Result<[Field<D>; 4]> {
        self.expect(RecordKind::Gauge)?;
        self.check_grid(grid)?;
        Ok([
            self.field(grid, 0)?,
            self.field(grid, 1)?,
            self.field(grid, 2)?,
            self.field(grid, 3)?,
        ])
    }

    pub fn to_spinor<const D: usize>(&self, grid: &Grid<D>) -> Result<Field<D, Quaternion>> {
        self.expect(RecordKind::Spinor)?;
        self.check_grid(grid)?;
        let parts: Vec<Field<D>> = (0..4).map(|k| self.field(grid, k)).collect::<Result<_>>()?;
        Field::from_components([&parts[0], &parts[1], &parts[2], &parts[3]])
    }

    /// Whether the record lives on Σ (`N2 = N3 = 1`).
    pub fn is_2d(&self) -> bool {
        self.sizes[2] == 1 && self.sizes[3] == 1
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let n = self.site_count();
        if self.arrays.len() != self.kind.arrays() || self.arrays.iter().any(|a| a.len() != n) {
            return Err(Error::SizeMismatch("record arrays do not match its header".into()));
        }
        let mut buf = Vec::with_capacity(24 + 8 * n * self.arrays.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(self.kind as u32).to_le_bytes());
        for s in self.sizes {
            buf.extend_from_slice(&s.to_le_bytes());
        }
        for a in &self.arrays {
            for v in a {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Reads one record; `Ok(None)` at a clean end of input.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Option<Self>> {
        let mut magic = [0u8; 4];
        let mut got = 0;
        while got < 4 {
            let k = r.read(&mut magic[got..])?;
            if k == 0 {
                break;
            }
            got += k;
        }
        if got == 0 {
            return Ok(None);
        }
        if got < 4 || &magic != MAGIC {
            return Err(Error::Snapshot("bad magic, expected SWF1".into()));
        }
        let mut header = [0u8; 20];
        r.read_exact(&mut header).map_err(|_| Error::Snapshot("truncated header".into()))?;
        let word = |i: usize| u32::from_le_bytes(header[4 * i..4 * i + 4].try_into().expect("4 bytes"));
        let kind = RecordKind::from_u32(word(0))?;
        let sizes = [word(1), word(2), word(3), word(4)];
        if sizes.contains(&0) {
            return Err(Error::Snapshot(format!("zero extent in {sizes:?}")));
        }
        let n: usize = sizes.iter().map(|s| *s as usize).product();
        let mut arrays = Vec::with_capacity(kind.arrays());
        let mut bytes = vec![0u8; 8 * n];
        for _ in 0..kind.arrays() {
            r.read_exact(&mut bytes).map_err(|_| Error::Snapshot("truncated data".into()))?;
            arrays.push(
                bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            );
        }
        Ok(Some(Self { kind, sizes, arrays }))
    }
}

pub fn encode(records: &[Record]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        r.write_to(&mut out)?;
    }
    Ok(out)
}

pub fn decode(mut bytes: &[u8]) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    while let Some(r) = Record::read_from(&mut bytes)? {
        out.push(r);
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    fs::write(path, encode(records)?)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    decode(&fs::read(path)?)
}

fn pair(records: Vec<Record>) -> Result<(Record, Record)> {
    let mut it = records.into_iter();
    match (it.next(), it.next(), it.next()) {
        (Some(g), Some(s), None) => Ok((g, s)),
        _ => Err(Error::Snapshot("expected a gauge record followed by a spinor record".into())),
    }
}

pub fn config4_records(a: &GaugeField4, u: &SpinorField4) -> Vec<Record> {
    let c = a.components();
    vec![Record::gauge([&c[0], &c[1], &c[2], &c[3]]), Record::spinor(u)]
}

pub fn config4_from_records(records: Vec<Record>, grid: &Grid4) -> Result<(GaugeField4, SpinorField4)> {
    let (g, s) = pair(records)?;
    Ok((GaugeField4::new(g.to_gauge(grid)?)?, s.to_spinor(grid)?))
}

/// The reduced components `(a0, a1, φ1, φ2)` go into the gauge record.
pub fn reduced_records(c: &ReducedConfig) -> Vec<Record> {
    vec![Record::gauge(c.gauge_components()), Record::spinor(&c.u)]
}

pub fn reduced_from_records(records: Vec<Record>, grid: &Grid2) -> Result<ReducedConfig> {
    let (g, s) = pair(records)?;
    let [a0, a1, phi1, phi2] = g.to_gauge(grid)?;
    ReducedConfig::new(a0, a1, phi1, phi2, s.to_spinor(grid)?)
}

/// `(α0, α1, c2, c3)` in the gauge record, `ζ` in the spinor record.
pub fn tangent_records(t: &TangentVector4) -> Vec<Record> {
    vec![Record::gauge(t.form_components()), Record::spinor(t.zeta())]
}

pub fn tangent_from_records(records: Vec<Record>, grid: &Grid4) -> Result<TangentVector4> {
    let (g, s) = pair(records)?;
    let [a0, a1, c2, c3] = g.to_gauge(grid)?;
    TangentVector4::new(a0, a1, c2, c3, s.to_spinor(grid)?)
}

pub fn scalar4_from_records(records: Vec<Record>, grid: &Grid4) -> Result<ScalarField4> {
    match records.as_slice() {
        [r] => r.to_scalar(grid),
        _ => Err(Error::Snapshot("expected one scalar record".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{random_smooth_field, random_smooth_spinor};

    #[test]
    fn scalar_layout() {
        let g = Grid4::unit([4, 4, 4, 4]).unwrap();
        let f = Field::from_fn(g, |i| i as f64);
        let bytes = encode(&[Record::scalar(&f)]).unwrap();
        assert_eq!(&bytes[..4], b"SWF1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(bytes.len(), 24 + 8 * 256);
        assert_eq!(f64::from_le_bytes(bytes[24 + 8 * 5..24 + 8 * 6].try_into().unwrap()), 5.0);
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let g = Grid4::new([4, 5, 4, 6], [1.0, 1.1, 0.7, 1.9]).unwrap();
        let a = GaugeField4::new(std::array::from_fn(|m| random_smooth_field(&g, m as u64, 3))).unwrap();
        let u = random_smooth_spinor(&g, 9, 3);
        let (a1, u1) = config4_from_records(decode(&encode(&config4_records(&a, &u)).unwrap()).unwrap(), &g).unwrap();
        assert_eq!(a, a1);
        assert_eq!(u, u1);

        let c = ReducedConfig::random(g.factor1(), 4, 0.5, 3);
        let recs = decode(&encode(&reduced_records(&c)).unwrap()).unwrap();
        assert!(recs[0].is_2d());
        assert_eq!(reduced_from_records(recs, &g.factor1()).unwrap(), c);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(decode(b"SWF2xxxxxxxxxxxxxxxxxxxx"), Err(Error::Snapshot(_))));
        assert!(matches!(decode(b"SWF"), Err(Error::Snapshot(_))));
        let g = Grid4::unit([4, 4, 4, 4]).unwrap();
        let mut bytes = encode(&[Record::scalar(&Field::constant(g, 1.0))]).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(decode(&bytes), Err(Error::Snapshot(_))));
        assert!(decode(b"").unwrap().is_empty());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = Grid4::unit([4, 4, 4, 4]).unwrap();
        let other = Grid4::unit([4, 4, 4, 5]).unwrap();
        let r = Record::scalar(&Field::constant(g, 1.0));
        assert!(matches!(r.to_scalar(&other), Err(Error::GridMismatch(_))));
        assert!(matches!(r.to_spinor(&g), Err(Error::Snapshot(_))));
    }
}
