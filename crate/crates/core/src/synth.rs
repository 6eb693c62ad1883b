//! Synthetic disparity scenes: filled rectangles and disks painted over a
//! zero background.

use crate::error::{Error, Result};
use crate::image::{BitDepth, GrayImage, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    FilledRect(Rect),
    /// Closed disk: every pixel with `(px - x)^2 + (py - y)^2 <= radius^2`.
    FilledCircle {
        center: (i32, i32),
        radius: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub kind: ShapeKind,
    pub value: u16,
}

impl Shape {
    pub fn rect(x: i32, y: i32, w: i32, h: i32, value: u16) -> Self {
        Self {
            kind: ShapeKind::FilledRect(Rect::new(x, y, w, h).expect("valid rectangle")),
            value,
        }
    }

    pub fn circle(cx: i32, cy: i32, radius: u32, value: u16) -> Self {
        Self {
            kind: ShapeKind::FilledCircle {
                center: (cx, cy),
                radius,
            },
            value,
        }
    }

    /// Tight bounding box of the painted pixels.
    pub fn bbox(&self) -> Option<Rect> {
        match self.kind {
            ShapeKind::FilledRect(r) => Some(r),
            ShapeKind::FilledCircle { center, radius } => {
                let r = i32::try_from(radius).ok()?;
                let side = r.checked_mul(2)?.checked_add(1)?;
                Rect::new(
                    center.0.checked_sub(r)?,
                    center.1.checked_sub(r)?,
                    side,
                    side,
                )
            }
        }
    }
}

/// Image size, depth and shapes in paint order (later shapes overwrite
/// earlier ones).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub depth: BitDepth,
    pub shapes: Vec<Shape>,
}

pub fn render(spec: &SceneSpec) -> Result<GrayImage> {
    let mut img = GrayImage::filled(spec.width, spec.height, spec.depth, 0)?.into_data();
    let stride = spec.width as usize;
    for (i, shape) in spec.shapes.iter().enumerate() {
        if shape.value > spec.depth.max_value() {
            return Err(Error::InvalidScene(format!(
                "shape {i}: value {} exceeds {}-bit range",
                shape.value,
                spec.depth.bits()
            )));
        }
        if let ShapeKind::FilledCircle { radius: 0, .. } = shape.kind {
            return Err(Error::InvalidScene(format!(
                "shape {i}: radius must be at least 1"
            )));
        }
        let bbox = shape
            .bbox()
            .filter(|b| b.fits_within(spec.width, spec.height))
            .ok_or_else(|| Error::InvalidScene(format!("shape {i} lies outside the image")))?;
        for y in bbox.y()..bbox.bottom() {
            for x in bbox.x()..bbox.right() {
                let inside = match shape.kind {
                    ShapeKind::FilledRect(_) => true,
                    ShapeKind::FilledCircle { center, radius } => {
                        let (dx, dy) = ((x - center.0) as i64, (y - center.1) as i64);
                        dx * dx + dy * dy <= (radius as i64) * (radius as i64)
                    }
                };
                if inside {
                    img[y as usize * stride + x as usize] = shape.value;
                }
            }
        }
    }
    GrayImage::new(spec.width, spec.height, spec.depth, img)
}

/// Three filled rectangles at distinct disparities and a zero-valued
/// rectangle of failed disparity punched into the nearest one, 320x240.
/// Returns the scene and the number of objects it should yield.
pub fn testcase1() -> (SceneSpec, usize) {
    let spec = SceneSpec {
        width: 320,
        height: 240,
        depth: BitDepth::Eight,
        shapes: vec![
            Shape::rect(30, 40, 70, 60, 200),
            Shape::rect(140, 70, 50, 90, 150),
            Shape::rect(220, 30, 80, 80, 100),
            Shape::rect(50, 60, 25, 20, 0),
        ],
    };
    (spec, 3)
}

/// Three filled disks at distinct disparities, 320x240.
pub fn testcase2() -> (SceneSpec, usize) {
    let spec = SceneSpec {
        width: 320,
        height: 240,
        depth: BitDepth::Eight,
        shapes: vec![
            Shape::circle(65, 120, 30, 220),
            Shape::circle(160, 100, 25, 160),
            Shape::circle(255, 140, 35, 90),
        ],
    };
    (spec, 3)
}
