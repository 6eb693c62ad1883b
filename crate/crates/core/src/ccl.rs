//! Binary connected component labeling.
//!
//! Classic two-pass scan: the first pass hands out provisional labels and
//! records equivalences in a union-find forest, the second pass resolves
//! every provisional label to its root and renumbers roots in raster-scan
//! order of first encounter. Per-component statistics are gathered during
//! the second pass.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Rect};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    /// Offsets of the already-visited neighbours in a raster scan.
    fn causal_offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1)],
            Connectivity::Eight => &[(-1, 0), (-1, -1), (0, -1), (1, -1)],
        }
    }
}

impl TryFrom<u32> for Connectivity {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        match value {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            v => Err(Error::InvalidParams(format!(
                "connectivity must be 4 or 8, got {v}"
            ))),
        }
    }
}

/// Storage width of component labels. Bounds the number of components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LabelWidth {
    #[default]
    U16,
    U32,
}

impl LabelWidth {
    pub fn bits(self) -> u32 {
        match self {
            LabelWidth::U16 => 16,
            LabelWidth::U32 => 32,
        }
    }

    pub fn max_label(self) -> u32 {
        match self {
            LabelWidth::U16 => u16::MAX as u32,
            LabelWidth::U32 => u32::MAX,
        }
    }
}

impl TryFrom<u32> for LabelWidth {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        match value {
            16 => Ok(LabelWidth::U16),
            32 => Ok(LabelWidth::U32),
            v => Err(Error::InvalidParams(format!(
                "label width must be 16 or 32, got {v}"
            ))),
        }
    }
}

/// Labeling algorithm selector. Only the two-pass union-find scan exists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CclAlgorithm {
    #[default]
    TwoPassUnionFind,
}

impl FromStr for CclAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-pass" | "two-pass-union-find" => Ok(CclAlgorithm::TwoPassUnionFind),
            other => Err(Error::InvalidParams(format!(
                "unknown CCL algorithm {other:?}"
            ))),
        }
    }
}

/// Per-pixel component labels, 0 for background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelImage {
    width: u32,
    height: u32,
    label_width: LabelWidth,
    num_components: u32,
    data: Vec<u32>,
}

impl LabelImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn label_width(&self) -> LabelWidth {
        self.label_width
    }

    pub fn num_components(&self) -> u32 {
        self.num_components
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.data[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStats {
    pub label: u32,
    /// Tight bounding box.
    pub bbox: Rect,
    /// Pixel count.
    pub area: u64,
    /// Mean pixel coordinate `(cx, cy)`.
    pub centroid: (f64, f64),
}

/// Disjoint-set forest with path halving and union by size.
struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // slot 0 is the background label and never joins a set
        Self {
            parent: vec![0],
            size: vec![0],
        }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.size.push(1);
        id
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let grandparent = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = grandparent;
            i = grandparent;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        big
    }
}

struct Accumulator {
    min_x: u32,
    min_y: u32,
    max_x: u32,
    max_y: u32,
    area: u64,
    sum_x: u64,
    sum_y: u64,
}

impl Accumulator {
    fn new(x: u32, y: u32) -> Self {
        Self {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
            area: 0,
            sum_x: 0,
            sum_y: 0,
        }
    }

    fn add(&mut self, x: u32, y: u32) {
        self.min_x = self.min_x.min(x);
        self.max_x = self.max_x.max(x);
        self.min_y = self.min_y.min(y);
        self.max_y = self.max_y.max(y);
        self.area += 1;
        self.sum_x += x as u64;
        self.sum_y += y as u64;
    }

    fn finish(&self, label: u32) -> ComponentStats {
        let bbox = Rect::from_corners(
            self.min_x as i32,
            self.min_y as i32,
            self.max_x as i32,
            self.max_y as i32,
        )
        .expect("image dimensions fit in i32");
        ComponentStats {
            label,
            bbox,
            area: self.area,
            centroid: (
                self.sum_x as f64 / self.area as f64,
                self.sum_y as f64 / self.area as f64,
            ),
        }
    }
}

fn first_pass(bin: &BinaryImage, conn: Connectivity) -> (Vec<u32>, UnionFind) {
    let (w, h) = (bin.width() as i32, bin.height() as i32);
    let src = bin.data();
    let mut provisional = vec![0u32; src.len()];
    let mut sets = UnionFind::new();
    let offsets = conn.causal_offsets();

    for y in 0..h {
        let row = y as usize * w as usize;
        for x in 0..w {
            let idx = row + x as usize;
            if src[idx] == 0 {
                continue;
            }
            let mut label = 0u32;
            for &(dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w {
                    continue;
                }
                let n = provisional[ny as usize * w as usize + nx as usize];
                if n == 0 {
                    continue;
                }
                label = if label == 0 { n } else { sets.union(label, n) };
            }
            provisional[idx] = if label == 0 { sets.make_set() } else { label };
        }
    }
    (provisional, sets)
}

fn label_impl(
    bin: &BinaryImage,
    conn: Connectivity,
    label_width: LabelWidth,
) -> Result<(LabelImage, Vec<ComponentStats>)> {
    let (mut labels, mut sets) = first_pass(bin, conn);
    let mut final_label = vec![0u32; sets.parent.len()];
    let mut acc: Vec<Accumulator> = Vec::new();
    let width = bin.width() as usize;

    for (idx, slot) in labels.iter_mut().enumerate() {
        if *slot == 0 {
            continue;
        }
        let (x, y) = ((idx % width) as u32, (idx / width) as u32);
        let root = sets.find(*slot) as usize;
        if final_label[root] == 0 {
            if acc.len() as u64 >= label_width.max_label() as u64 {
                return Err(Error::LabelOverflow {
                    components: count_roots(&mut sets),
                    bits: label_width.bits(),
                });
            }
            acc.push(Accumulator::new(x, y));
            final_label[root] = acc.len() as u32;
        }
        let label = final_label[root];
        acc[label as usize - 1].add(x, y);
        *slot = label;
    }

    let stats = acc
        .iter()
        .enumerate()
        .map(|(i, a)| a.finish(i as u32 + 1))
        .collect::<Vec<_>>();
    let image = LabelImage {
        width: bin.width(),
        height: bin.height(),
        label_width,
        num_components: stats.len() as u32,
        data: labels,
    };
    Ok((image, stats))
}

fn count_roots(sets: &mut UnionFind) -> usize {
    (1..sets.parent.len() as u32)
        .filter(|&i| sets.find(i) == i)
        .count()
}

/// Labels the 4- or 8-connected foreground regions of `bin`.
///
/// Labels are `1..=n` in raster-scan order of each component's first pixel.
/// Fails with [`Error::LabelOverflow`] when `n` exceeds what `label_width`
/// can represent.
pub fn label_components(
    bin: &BinaryImage,
    conn: Connectivity,
    label_width: LabelWidth,
) -> Result<LabelImage> {
    label_impl(bin, conn, label_width).map(|(labels, _)| labels)
}

/// Bounding box, area and centroid of every component, ordered by label.
pub fn components_with_stats(
    bin: &BinaryImage,
    conn: Connectivity,
    label_width: LabelWidth,
) -> Result<Vec<ComponentStats>> {
    label_impl(bin, conn, label_width).map(|(_, stats)| stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(rows: &[&str]) -> BinaryImage {
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        BinaryImage::from_fn(w, h, |x, y| rows[y as usize].as_bytes()[x as usize] == b'#').unwrap()
    }

    #[test]
    fn empty_image() {
        let bin = mask(&["....", "...."]);
        let labels = label_components(&bin, Connectivity::Eight, LabelWidth::U16).unwrap();
        assert_eq!(labels.num_components(), 0);
        assert!(labels.data().iter().all(|&l| l == 0));
    }

    #[test]
    fn diagonal_pixels() {
        let bin = mask(&["#.", ".#"]);
        let eight = label_components(&bin, Connectivity::Eight, LabelWidth::U16).unwrap();
        let four = label_components(&bin, Connectivity::Four, LabelWidth::U16).unwrap();
        assert_eq!(eight.num_components(), 1);
        assert_eq!(four.num_components(), 2);
        assert_eq!(four.data(), &[1, 0, 0, 2]);
    }

    #[test]
    fn anti_diagonal_merges_under_eight() {
        // the up-right neighbour is what joins these
        let bin = mask(&[".#", "#."]);
        let eight = label_components(&bin, Connectivity::Eight, LabelWidth::U16).unwrap();
        assert_eq!(eight.num_components(), 1);
    }

    #[test]
    fn u_shape_needs_equivalence_resolution() {
        let bin = mask(&["#.#", "#.#", "###"]);
        let labels = label_components(&bin, Connectivity::Four, LabelWidth::U16).unwrap();
        assert_eq!(labels.num_components(), 1);
        assert!(labels.data().iter().all(|&l| l <= 1));
    }

    #[test]
    fn raster_first_encounter_order() {
        let bin = mask(&["..#", "#..", "..."]);
        let labels = label_components(&bin, Connectivity::Four, LabelWidth::U16).unwrap();
        assert_eq!(labels.get(2, 0), 1);
        assert_eq!(labels.get(0, 1), 2);
    }

    #[test]
    fn square_stats() {
        let bin = BinaryImage::from_fn(5, 5, |x, y| x < 3 && y < 3).unwrap();
        let stats = components_with_stats(&bin, Connectivity::Eight, LabelWidth::U16).unwrap();
        assert_eq!(stats.len(), 1);
        assert_eq!(stats[0].bbox, Rect::new(0, 0, 3, 3).unwrap());
        assert_eq!(stats[0].area, 9);
        assert_eq!(stats[0].centroid, (1.0, 1.0));
    }

    #[test]
    fn single_pixel_stats() {
        let bin = BinaryImage::from_fn(6, 4, |x, y| x == 4 && y == 2).unwrap();
        let stats = components_with_stats(&bin, Connectivity::Four, LabelWidth::U16).unwrap();
        assert_eq!(stats[0].bbox, Rect::new(4, 2, 1, 1).unwrap());
        assert_eq!(stats[0].area, 1);
        assert_eq!(stats[0].centroid, (4.0, 2.0));
    }

    #[test]
    fn sixteen_bit_label_overflow() {
        // checkerboard of isolated pixels under 4-connectivity: 2 * 182 * 182 = 66248
        let bin = BinaryImage::from_fn(364, 364, |x, y| (x + y) % 2 == 0).unwrap();
        match components_with_stats(&bin, Connectivity::Four, LabelWidth::U16) {
            Err(Error::LabelOverflow { components, bits }) => {
                assert_eq!(bits, 16);
                assert_eq!(components, 364 * 364 / 2);
            }
            other => panic!("expected overflow, got {:?}", other.map(|s| s.len())),
        }
        let stats = components_with_stats(&bin, Connectivity::Four, LabelWidth::U32).unwrap();
        assert_eq!(stats.len(), 364 * 364 / 2);
        // under 8-connectivity the whole checkerboard is one blob
        let stats = components_with_stats(&bin, Connectivity::Eight, LabelWidth::U16).unwrap();
        assert_eq!(stats.len(), 1);
    }

    #[test]
    fn selectors_parse() {
        assert_eq!(Connectivity::try_from(4).unwrap(), Connectivity::Four);
        assert!(Connectivity::try_from(6).is_err());
        assert_eq!(LabelWidth::try_from(32).unwrap(), LabelWidth::U32);
        assert!(LabelWidth::try_from(8).is_err());
        assert!("grana".parse::<CclAlgorithm>().is_err());
        assert_eq!(
            "two-pass".parse::<CclAlgorithm>().unwrap(),
            CclAlgorithm::TwoPassUnionFind
        );
    }
}
