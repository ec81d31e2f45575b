//! Self-describing `.ro3` container.
//!
//! ```text
//! offset size field
//!      0    4 magic "RO3C"
//!      4    1 version (1)
//!      5    1 flags (bit 0: deblur recommended)
//!      6    1 codec id
//!      7    1 basis id
//!      8    1 channels (1 or 3)
//!      9    3 reserved, zero
//!     12    4 original width,  u32 LE
//!     16    4 original height, u32 LE
//!     20    4 anchoring parameter, f32 LE
//!     24    8 payload length, u64 LE
//!     32    … payload
//! ```

use crate::error::{Error, Result};
use crate::wavelet::WaveletBasis;

pub const MAGIC: [u8; 4] = *b"RO3C";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 32;
pub const FLAG_DEBLUR_RECOMMENDED: u8 = 0b0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecId {
    Store,
    Jpeg,
    Jpeg2000,
    Png,
}

impl CodecId {
    pub fn to_u8(self) -> u8 {
        match self {
            CodecId::Store => 0,
            CodecId::Jpeg => 1,
            CodecId::Jpeg2000 => 2,
            CodecId::Png => 3,
        }
    }

    pub fn from_u8(id: u8) -> Result<Self> {
        match id {
            0 => Ok(CodecId::Store),
            1 => Ok(CodecId::Jpeg),
            2 => Ok(CodecId::Jpeg2000),
            3 => Ok(CodecId::Png),
            other => Err(Error::UnknownCodec(other)),
        }
    }
}

pub fn basis_to_u8(basis: WaveletBasis) -> u8 {
    match basis {
        WaveletBasis::Haar => 0,
        WaveletBasis::Daub4 => 1,
    }
}

pub fn basis_from_u8(id: u8) -> Result<WaveletBasis> {
    match id {
        0 => Ok(WaveletBasis::Haar),
        1 => Ok(WaveletBasis::Daub4),
        other => Err(Error::Container(format!("unknown basis id {other}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ro3Container {
    pub flags: u8,
    pub codec: CodecId,
    pub basis: WaveletBasis,
    pub channels: u8,
    pub orig_width: u32,
    pub orig_height: u32,
    pub ap: f32,
    pub payload: Vec<u8>,
}

impl Ro3Container {
    pub fn deblur_recommended(&self) -> bool {
        self.flags & FLAG_DEBLUR_RECOMMENDED != 0
    }

    /// Header plus payload.
    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn header_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..4].copy_from_slice(&MAGIC);
        h[4] = VERSION;
        h[5] = self.flags;
        h[6] = self.codec.to_u8();
        h[7] = basis_to_u8(self.basis);
        h[8] = self.channels;
        h[12..16].copy_from_slice(&self.orig_width.to_le_bytes());
        h[16..20].copy_from_slice(&self.orig_height.to_le_bytes());
        h[20..24].copy_from_slice(&self.ap.to_le_bytes());
        h[24..32].copy_from_slice(&(self.payload.len() as u64).to_le_bytes());
        h
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&self.header_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Container(format!(
                "{} bytes is shorter than the header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Container("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Container(format!(
                "unsupported version {}",
                bytes[4]
            )));
        }
        if bytes[9..12] != [0, 0, 0] {
            return Err(Error::Container("reserved bytes are not zero".into()));
        }
        let codec = CodecId::from_u8(bytes[6])?;
        let basis = basis_from_u8(bytes[7])?;
        let channels = bytes[8];
        if channels != 1 && channels != 3 {
            return Err(Error::Container(format!("{channels} channels")));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let orig_width = u32_at(12);
        let orig_height = u32_at(16);
        if orig_width == 0 || orig_height == 0 {
            return Err(Error::Container("zero original extent".into()));
        }
        let ap = f32::from_le_bytes(bytes[20..24].try_into().expect("4 bytes"));
        let payload_len = u64::from_le_bytes(bytes[24..32].try_into().expect("8 bytes"));
        let payload = &bytes[HEADER_LEN..];
        if payload.len() as u64 != payload_len {
            return Err(Error::Container(format!(
                "payload is {} bytes, header says {payload_len}",
                payload.len()
            )));
        }
        Ok(Self {
            flags: bytes[5],
            codec,
            basis,
            channels,
            orig_width,
            orig_height,
            ap,
            payload: payload.to_vec(),
        })
    }
}
