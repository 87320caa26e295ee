//! TNS1 binary tensor files: magic `TNS1`, one ndim byte (always 3), three
//! u64 little-endian dims, then the payload as f64 little-endian in the
//! canonical mode-1-fastest layout. Used for tensors, masks and dictionaries.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::tensor::Tensor3;

const MAGIC: &[u8; 4] = b"TNS1";

pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[3u8])?;
    let (n1, n2, n3) = t.dims();
    for d in [n1, n2, n3] {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for v in t.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    let path = path.as_ref();
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::Format(format!(
            "{}: bad magic {:?}, expected \"TNS1\"",
            path.display(),
            magic
        )));
    }
    let mut ndim = [0u8; 1];
    r.read_exact(&mut ndim)?;
    if ndim[0] != 3 {
        return Err(CoreError::Format(format!(
            "{}: ndim {} unsupported, expected 3",
            path.display(),
            ndim[0]
        )));
    }
    let mut dims = [0usize; 3];
    let mut buf8 = [0u8; 8];
    for d in dims.iter_mut() {
        r.read_exact(&mut buf8)?;
        *d = u64::from_le_bytes(buf8) as usize;
    }
    let len = dims[0]
        .checked_mul(dims[1])
        .and_then(|n| n.checked_mul(dims[2]))
        .ok_or_else(|| CoreError::Format("dimension overflow".into()))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut buf8)?;
        data.push(f64::from_le_bytes(buf8));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(CoreError::Format(format!(
            "{}: trailing bytes after payload",
            path.display()
        )));
    }
    Tensor3::from_vec((dims[0], dims[1], dims[2]), data)
}
