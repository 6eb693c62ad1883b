//! Image containers and the intensity primitives used by the threshold sweep.

use crate::error::{Error, Result};

/// Largest width or height accepted for an image. Keeps every in-image
/// rectangle representable by [`Rect`] without overflow.
pub const MAX_DIMENSION: u32 = i32::MAX as u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// Largest representable sample value.
    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    /// Smallest depth able to hold `value`.
    pub fn for_max_value(value: u32) -> Option<Self> {
        match value {
            0..=255 => Some(BitDepth::Eight),
            256..=65535 => Some(BitDepth::Sixteen),
            _ => None,
        }
    }
}

fn check_dimensions(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::InvalidImage(format!(
            "dimensions {width}x{height} exceed {MAX_DIMENSION}"
        )));
    }
    let expected = width as usize * height as usize;
    if len != expected {
        return Err(Error::InvalidImage(format!(
            "data length {len} does not match {width}x{height} = {expected}"
        )));
    }
    Ok(())
}

/// Single-channel image of unsigned intensities, stored row-major.
///
/// Samples are kept as `u16` for both depths; the depth bounds the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    depth: BitDepth,
    data: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, depth: BitDepth, data: Vec<u16>) -> Result<Self> {
        check_dimensions(width, height, data.len())?;
        let max = depth.max_value();
        if let Some(v) = data.iter().find(|&&v| v > max) {
            return Err(Error::InvalidImage(format!(
                "sample value {v} exceeds {}-bit range",
                depth.bits()
            )));
        }
        Ok(Self {
            width,
            height,
            depth,
            data,
        })
    }

    /// Image filled with a single value.
    pub fn filled(width: u32, height: u32, depth: BitDepth, value: u16) -> Result<Self> {
        let len = width as usize * height as usize;
        Self::new(width, height, depth, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u16> {
        self.data
    }

    /// Sample at column `x`, row `y`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u16 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> {
        self.data.chunks_exact(self.width as usize)
    }

    /// Rectangle covering the whole image.
    pub fn bounds(&self) -> Rect {
        Rect {
            x: 0,
            y: 0,
            w: self.width as i32,
            h: self.height as i32,
        }
    }
}

/// Foreground/background mask, one byte per pixel (0 or 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dimensions(width, height, data.len())?;
        if data.iter().any(|&v| v > 1) {
            return Err(Error::InvalidImage(
                "binary image values must be 0 or 1".to_string(),
            ));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a mask from any predicate over pixel coordinates.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y) as u8);
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn is_foreground(&self, x: u32, y: u32) -> bool {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.data[y as usize * self.width as usize + x as usize] != 0
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }
}

/// Axis-aligned pixel rectangle covering `x..x+w` by `y..y+h`.
///
/// Coordinates are `i32` and construction guarantees `x + w` and `y + h`
/// fit, so intersection arithmetic never wraps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    x: i32,
    y: i32,
    w: i32,
    h: i32,
}

impl Rect {
    /// Returns `None` for negative origins, empty extents, or extents whose
    /// far edge would not fit in `i32`.
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Option<Self> {
        if x < 0 || y < 0 || w < 1 || h < 1 {
            return None;
        }
        x.checked_add(w)?;
        y.checked_add(h)?;
        Some(Self { x, y, w, h })
    }

    /// Rectangle spanning inclusive pixel corners.
    pub fn from_corners(x0: i32, y0: i32, x1: i32, y1: i32) -> Option<Self> {
        Self::new(
            x0,
            y0,
            x1.checked_sub(x0)?.checked_add(1)?,
            y1.checked_sub(y0)?.checked_add(1)?,
        )
    }

    pub fn x(&self) -> i32 {
        self.x
    }

    pub fn y(&self) -> i32 {
        self.y
    }

    pub fn w(&self) -> i32 {
        self.w
    }

    pub fn h(&self) -> i32 {
        self.h
    }

    /// Exclusive right edge.
    pub fn right(&self) -> i32 {
        self.x + self.w
    }

    /// Exclusive bottom edge.
    pub fn bottom(&self) -> i32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Half-open point test: `x <= px < x + w` and `y <= py < y + h`.
    pub fn contains_point(&self, px: i32, py: i32) -> bool {
        px >= self.x && px < self.right() && py >= self.y && py < self.bottom()
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() as i64 <= width as i64 && self.bottom() as i64 <= height as i64
    }
}

/// Smallest and largest intensity in the image.
pub fn min_max(img: &GrayImage) -> (u16, u16) {
    img.data
        .iter()
        .fold((u16::MAX, u16::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Foreground wherever the intensity is strictly greater than `threshold`.
pub fn binarize(img: &GrayImage, threshold: f64) -> BinaryImage {
    let data = img
        .data
        .iter()
        .map(|&v| (f64::from(v) > threshold) as u8)
        .collect();
    BinaryImage {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Largest intensity inside `r`.
pub fn max_in_rect(img: &GrayImage, r: Rect) -> Result<u16> {
    if !r.fits_within(img.width, img.height) {
        return Err(Error::RectOutOfBounds {
            rect: r,
            width: img.width,
            height: img.height,
        });
    }
    let stride = img.width as usize;
    let (x0, x1) = (r.x as usize, r.right() as usize);
    let max = (r.y as usize..r.bottom() as usize)
        .flat_map(|y| img.data[y * stride + x0..y * stride + x1].iter().copied())
        .max()
        .unwrap_or(0);
    Ok(max)
}
