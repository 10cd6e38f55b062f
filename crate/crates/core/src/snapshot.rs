//! Binary field snapshots: `"VMF1"`, `n` (u64 LE), `L` (f64 LE), then the
//! `3n³` physical values as f64 LE, component-major with ξ₃ fastest.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::{GridSpec, PhysicalVectorField};

const MAGIC: &[u8; 4] = b"VMF1";

pub fn write_snapshot<W: Write>(f: &PhysicalVectorField, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * 3 * g.size());
    for c in f.components() {
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<PhysicalVectorField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = usize::try_from(u64::from_le_bytes(b8)).map_err(|_| Error::Snapshot("n overflows".into()))?;
    r.read_exact(&mut b8)?;
    let grid = GridSpec::new(n, f64::from_le_bytes(b8))?;
    let mut comps: [Vec<f64>; 3] = Default::default();
    let mut bytes = vec![0u8; 8 * grid.size()];
    for c in comps.iter_mut() {
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Snapshot(format!("truncated data: {e}")))?;
        *c = bytes
            .chunks_exact(8)
            .map(|ch| f64::from_le_bytes(ch.try_into().expect("8 bytes")))
            .collect();
    }
    let f = PhysicalVectorField::from_components(grid, comps)?;
    f.check_finite()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_layout() {
        let g = GridSpec::new(8, 3.0).unwrap();
        let f = PhysicalVectorField::from_fn(g, |x| [x[0], x[1] * 2.0, x[2] - 1.0]);
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 8 + 8 * 3 * 512);
        assert_eq!(&buf[..4], b"VMF1");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 8);
        // Second value of component 0 is at ξ₃ index 1.
        let v1 = f64::from_le_bytes(buf[28..36].try_into().unwrap());
        assert_eq!(v1, f.component(0)[1]);
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert!(read_snapshot(&buf[..100]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_snapshot(bad.as_slice()).is_err());
    }
}
