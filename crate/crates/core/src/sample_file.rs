//! Binary container for simulated statistics.
//!
//! Layout: the 8-byte magic `GOFX2F64`, the value count as a little-endian
//! `u64`, then the values as little-endian IEEE-754 `f64`.

use std::io::{self, Read, Write};

pub const MAGIC: [u8; 8] = *b"GOFX2F64";
pub const HEADER_LEN: usize = 16;

pub fn write_samples<W: Write>(mut w: W, values: &[f64]) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn read_samples<R: Read>(mut r: R) -> io::Result<Vec<f64>> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("truncated sample header: {e}")))?;
    if header[..8] != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "not a sample file (bad magic)"));
    }
    let count = u64::from_le_bytes(header[8..].try_into().expect("8-byte slice"));
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() as u64 != count.saturating_mul(8) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("header announces {count} values but the body holds {} bytes", body.len()),
        ));
    }
    Ok(body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}
