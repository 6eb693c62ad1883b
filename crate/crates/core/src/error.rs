use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("truncated pixel data: expected {expected} samples, got {actual}")]
    TruncatedData { expected: usize, actual: usize },

    #[error("invalid PGM maxval {0} (must be in 1..=65535)")]
    InvalidMaxval(u32),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("rectangle {rect:?} is outside the {width}x{height} image")]
    RectOutOfBounds {
        rect: crate::image::Rect,
        width: u32,
        height: u32,
    },

    #[error("{components} components do not fit into {bits}-bit labels; use 32-bit labels")]
    LabelOverflow { components: usize, bits: u32 },

    #[error("invalid segmentation parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),
}
