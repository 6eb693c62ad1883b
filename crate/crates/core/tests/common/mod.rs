//! Shared test helpers: a flood-fill labeling oracle and random image
//! generators. Nothing here calls into the labeling code under test.

#![allow(dead_code)]

use nbccl::synth::{render, SceneSpec, Shape};
use nbccl::{BinaryImage, BitDepth, Connectivity, GrayImage};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Oracle component: tight corners, pixel count, coordinate sums.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleComponent {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
    pub area: u64,
    pub centroid: (f64, f64),
}

/// Flood-fill labeling: every unlabeled foreground pixel met in raster order
/// seeds a new label that is spread to all reachable neighbours.
pub fn flood_fill(bin: &BinaryImage, conn: Connectivity) -> (Vec<u32>, Vec<OracleComponent>) {
    let (w, h) = (bin.width() as i64, bin.height() as i64);
    let fg = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w && y < h && bin.is_foreground(x as u32, y as u32)
    };
    let neighbours: &[(i64, i64)] = match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ],
    };
    let mut labels = vec![0u32; (w * h) as usize];
    let mut comps = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !fg(x, y) || labels[(y * w + x) as usize] != 0 {
                continue;
            }
            let label = comps.len() as u32 + 1;
            let mut pixels = Vec::new();
            let mut stack = vec![(x, y)];
            labels[(y * w + x) as usize] = label;
            while let Some((px, py)) = stack.pop() {
                pixels.push((px, py));
                for &(dx, dy) in neighbours {
                    let (nx, ny) = (px + dx, py + dy);
                    if fg(nx, ny) && labels[(ny * w + nx) as usize] == 0 {
                        labels[(ny * w + nx) as usize] = label;
                        stack.push((nx, ny));
                    }
                }
            }
            // statistics by rescanning the label image
            let (mut min_x, mut min_y, mut max_x, mut max_y) = (u32::MAX, u32::MAX, 0, 0);
            let (mut sx, mut sy, mut area) = (0u64, 0u64, 0u64);
            for yy in 0..h {
                for xx in 0..w {
                    if labels[(yy * w + xx) as usize] == label {
                        min_x = min_x.min(xx as u32);
                        min_y = min_y.min(yy as u32);
                        max_x = max_x.max(xx as u32);
                        max_y = max_y.max(yy as u32);
                        sx += xx as u64;
                        sy += yy as u64;
                        area += 1;
                    }
                }
            }
            assert_eq!(area, pixels.len() as u64);
            comps.push(OracleComponent {
                min_x,
                min_y,
                max_x,
                max_y,
                area,
                centroid: (sx as f64 / area as f64, sy as f64 / area as f64),
            });
        }
    }
    (labels, comps)
}

/// Renames labels to their order of first appearance, so two labelings of
/// the same partition compare equal.
pub fn canonical(labels: &[u32]) -> Vec<u32> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            if l == 0 {
                0
            } else {
                let next = map.len() as u32 + 1;
                *map.entry(l).or_insert(next)
            }
        })
        .collect()
}

pub fn random_binary(rng: &mut StdRng, width: u32, height: u32, density: f64) -> BinaryImage {
    BinaryImage::from_fn(width, height, |_, _| rng.random_bool(density)).unwrap()
}

/// Two-valued image of connected random blobs, each confined to its own
/// grid cell with a one pixel gutter, so no two blob bboxes intersect.
/// Returns the image and the nonzero mask.
pub fn random_blob_image(rng: &mut StdRng, size: u32, value: u16) -> (GrayImage, BinaryImage) {
    let cells = rng.random_range(2..=4u32);
    let cell = size / cells;
    let mut mask = vec![0u8; (size * size) as usize];
    for cy in 0..cells {
        for cx in 0..cells {
            if rng.random_bool(0.2) {
                continue;
            }
            // interior of the cell, leaving the last row and column free
            let (x0, y0) = (cx * cell, cy * cell);
            let inner = cell - 1;
            let (mut x, mut y) = (
                x0 + rng.random_range(0..inner),
                y0 + rng.random_range(0..inner),
            );
            let steps = rng.random_range(1..(inner * inner * 2));
            for _ in 0..steps {
                mask[(y * size + x) as usize] = 1;
                match rng.random_range(0..4) {
                    0 if x + 1 < x0 + inner => x += 1,
                    1 if x > x0 => x -= 1,
                    2 if y + 1 < y0 + inner => y += 1,
                    3 if y > y0 => y -= 1,
                    _ => {}
                }
            }
            mask[(y * size + x) as usize] = 1;
        }
    }
    let data = mask.iter().map(|&m| m as u16 * value).collect();
    let img = GrayImage::new(size, size, BitDepth::Eight, data).unwrap();
    (img, BinaryImage::new(size, size, mask).unwrap())
}

/// Overlapping rectangles and disks with random intensities in
/// `1..=max_value`, painted over a zero background.
pub fn random_scene(rng: &mut StdRng, width: u32, height: u32, max_value: u16) -> GrayImage {
    let n = rng.random_range(1..=8);
    let shapes = (0..n)
        .map(|_| {
            let value = rng.random_range(1..=max_value);
            if rng.random_bool(0.5) {
                let w = rng.random_range(1..=width as i32 / 2);
                let h = rng.random_range(1..=height as i32 / 2);
                let x = rng.random_range(0..=width as i32 - w);
                let y = rng.random_range(0..=height as i32 - h);
                Shape::rect(x, y, w, h, value)
            } else {
                let max_r = (width.min(height) / 4).max(1);
                let r = rng.random_range(1..=max_r);
                let cx = rng.random_range(r as i32..width as i32 - r as i32);
                let cy = rng.random_range(r as i32..height as i32 - r as i32);
                Shape::circle(cx, cy, r, value)
            }
        })
        .collect();
    render(&SceneSpec {
        width,
        height,
        depth: BitDepth::Eight,
        shapes,
    })
    .unwrap()
}

/// Random scene with a sprinkle of salt noise on top.
pub fn random_noisy_scene(rng: &mut StdRng, width: u32, height: u32) -> GrayImage {
    let base = random_scene(rng, width, height, 255);
    let data = base
        .data()
        .iter()
        .map(|&v| {
            if rng.random_bool(0.02) {
                rng.random_range(0..=255)
            } else {
                v
            }
        })
        .collect();
    GrayImage::new(width, height, BitDepth::Eight, data).unwrap()
}

pub fn random_gray(rng: &mut StdRng, width: u32, height: u32, depth: BitDepth) -> GrayImage {
    let max = depth.max_value();
    let data = (0..width * height)
        .map(|_| rng.random_range(0..=max))
        .collect();
    GrayImage::new(width, height, depth, data).unwrap()
}

/// `a * p + b` for every pixel.
pub fn affine(img: &GrayImage, a: u16, b: u16) -> GrayImage {
    let data = img.data().iter().map(|&v| v * a + b).collect();
    GrayImage::new(img.width(), img.height(), img.depth(), data).unwrap()
}
