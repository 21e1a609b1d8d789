//! IDX binary tensor format (the MNIST container): big-endian header
//! `00 00 08 <ndims>` followed by one u32 size per dimension, then raw
//! unsigned-byte data in row-major order.

use std::io::Read;
use std::path::Path;

use byteorder::{BigEndian, ByteOrder};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxTensor {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor> {
    if bytes.len() < 4 {
        return Err(Error::Format {
            offset: bytes.len(),
            message: "truncated header".into(),
        });
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic bytes {:02x} {:02x}", bytes[0], bytes[1]),
        });
    }
    if bytes[2] != 0x08 {
        return Err(Error::Format {
            offset: 2,
            message: format!("unsupported type byte {:02x} (only 0x08 unsigned byte)", bytes[2]),
        });
    }
    let ndims = bytes[3] as usize;
    let header_len = 4 + 4 * ndims;
    if bytes.len() < header_len {
        return Err(Error::Format {
            offset: bytes.len(),
            message: format!("truncated dimension table (need {header_len} bytes)"),
        });
    }
    let mut dims = Vec::with_capacity(ndims);
    for d in 0..ndims {
        dims.push(BigEndian::read_u32(&bytes[4 + 4 * d..8 + 4 * d]) as usize);
    }
    let payload: usize = dims.iter().product();
    if bytes.len() < header_len + payload {
        return Err(Error::Format {
            offset: bytes.len(),
            message: format!(
                "truncated payload: expected {payload} data bytes, found {}",
                bytes.len() - header_len
            ),
        });
    }
    Ok(IdxTensor {
        dims,
        data: bytes[header_len..header_len + payload].to_vec(),
    })
}

pub fn load_idx(path: &Path) -> Result<IdxTensor> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_idx(&bytes)
}

pub fn encode_idx(tensor: &IdxTensor) -> Result<Vec<u8>> {
    if tensor.dims.len() > 255 {
        return Err(Error::Config("idx supports at most 255 dimensions".into()));
    }
    if tensor.data.len() != tensor.len() {
        return Err(Error::Dimension(format!(
            "data length {} does not match dims {:?}",
            tensor.data.len(),
            tensor.dims
        )));
    }
    let mut out = vec![0u8, 0, 0x08, tensor.dims.len() as u8];
    for &d in &tensor.dims {
        let mut buf = [0u8; 4];
        BigEndian::write_u32(&mut buf, d as u32);
        out.extend_from_slice(&buf);
    }
    out.extend_from_slice(&tensor.data);
    Ok(out)
}

pub fn write_idx(tensor: &IdxTensor, path: &Path) -> Result<()> {
    std::fs::write(path, encode_idx(tensor)?)?;
    Ok(())
}
