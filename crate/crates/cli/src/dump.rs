use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mixdisp::{Complex64, Field, Grid, GridSpec, Representation};

/// Little-endian: `u64 dim, u64 M, f64 L, u64 rep` (0 physical, 1 frequency), then
/// interleaved `f64` real/imaginary parts in row-major order.
pub fn write_field(path: &Path, u: &Field) -> Result<()> {
    let spec = u.grid().spec();
    let mut buf = Vec::with_capacity(32 + 16 * u.values().len());
    buf.extend_from_slice(&(spec.dim as u64).to_le_bytes());
    buf.extend_from_slice(&(spec.points_per_axis as u64).to_le_bytes());
    buf.extend_from_slice(&spec.half_length.to_le_bytes());
    let rep: u64 = match u.representation() {
        Representation::Physical => 0,
        Representation::Frequency => 1,
    };
    buf.extend_from_slice(&rep.to_le_bytes());
    for v in u.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Field> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_end(&mut bytes)?;
    if bytes.len() < 32 {
        bail!("{}: truncated header", path.display());
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
    let dim = u64::from_le_bytes(word(0)) as usize;
    let m = u64::from_le_bytes(word(1)) as usize;
    let l = f64::from_le_bytes(word(2));
    let rep = match u64::from_le_bytes(word(3)) {
        0 => Representation::Physical,
        1 => Representation::Frequency,
        r => bail!("{}: unknown representation flag {r}", path.display()),
    };
    let grid = Grid::new(GridSpec::new(dim, l, m)?)?;
    let n = grid.len();
    if bytes.len() != 32 + 16 * n {
        bail!("{}: expected {} data bytes, found {}", path.display(), 16 * n, bytes.len() - 32);
    }
    let values = (0..n)
        .map(|k| Complex64::new(f64::from_le_bytes(word(4 + 2 * k)), f64::from_le_bytes(word(5 + 2 * k))))
        .collect();
    Ok(Field::new(grid, rep, values)?)
}
