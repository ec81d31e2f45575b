use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// The bytes of an image file could not be decoded.
    #[error("malformed image: {0}")]
    Format(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numeric operation left its domain (e.g. a zero Ro3 denominator).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed container: {0}")]
    Container(String),

    #[error("unknown codec id {0}")]
    UnknownCodec(u8),

    #[error("codec error: {0}")]
    Codec(String),
}
