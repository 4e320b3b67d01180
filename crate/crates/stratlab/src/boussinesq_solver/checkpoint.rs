use std::io::{Read, Write};
use std::path::Path;

use crate::error::{LabError, Result};
use crate::spectral_core::{Grid3, SpectralField4, C64};
use crate::wave_algebra::PhysicsParams;

const MAGIC: &[u8; 4] = b"BQS1";

/// A saved state: header (n, L, ν, ν′, ε, t) followed by the coefficients.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub field: SpectralField4,
    pub params: PhysicsParams,
    pub time: f64,
}

pub fn write_checkpoint(
    mut out: impl Write,
    field: &SpectralField4,
    params: &PhysicsParams,
    time: f64,
) -> Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(g.n() as u64).to_le_bytes())?;
    for x in [
        g.box_length(),
        params.nu,
        params.nu_prime,
        params.epsilon,
        time,
    ] {
        out.write_all(&x.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * g.len());
    for comp in &field.comps {
        buf.clear();
        for c in comp {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

fn read_exact(input: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => {
            LabError::Format(format!("checkpoint truncated in {what}"))
        }
        _ => LabError::Io(e.to_string()),
    })
}

fn read_f64(input: &mut impl Read, what: &str) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b, what)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_checkpoint(mut input: impl Read) -> Result<Checkpoint> {
    let mut magic = [0u8; 4];
    read_exact(&mut input, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(LabError::Format(format!("bad magic {magic:?}")));
    }
    let mut b = [0u8; 8];
    read_exact(&mut input, &mut b, "grid size")?;
    let n = u64::from_le_bytes(b);
    if n > 1024 {
        return Err(LabError::Format(format!("grid size {n} is not plausible")));
    }
    let box_length = read_f64(&mut input, "box length")?;
    let grid = Grid3::new(n as usize, box_length).map_err(|e| LabError::Format(e.to_string()))?;
    let nu = read_f64(&mut input, "nu")?;
    let nu_prime = read_f64(&mut input, "nu_prime")?;
    let epsilon = read_f64(&mut input, "epsilon")?;
    let time = read_f64(&mut input, "time")?;
    let params = PhysicsParams {
        nu,
        nu_prime,
        epsilon,
    };
    let mut bytes = vec![0u8; 16 * grid.len()];
    let mut comps: [Vec<C64>; 4] = Default::default();
    for (k, comp) in comps.iter_mut().enumerate() {
        read_exact(&mut input, &mut bytes, &format!("component {k}"))?;
        *comp = bytes
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
    }
    let field = SpectralField4::from_components(grid, comps)?;
    Ok(Checkpoint {
        field,
        params,
        time,
    })
}

pub fn save_checkpoint(
    path: &Path,
    field: &SpectralField4,
    params: &PhysicsParams,
    time: f64,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_checkpoint(&mut w, field, params, time)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = std::fs::File::open(path)?;
    read_checkpoint(std::io::BufReader::new(file))
}
