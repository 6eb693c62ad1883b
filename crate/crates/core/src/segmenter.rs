//! Threshold-sweep segmentation of disparity images.
//!
//! The sweep starts just below the maximum intensity and lowers the
//! threshold by a fixed fraction of the intensity range per iteration. Every
//! level is binarized and labeled; each blob that passes the size filter is
//! then checked against the stored objects, in this order:
//!
//! 1. mostly inside a stored object: it lies behind it, discard;
//! 2. touches no stored object: a new object, add it;
//! 3. covers the centers of two or more stored objects: objects merged, discard;
//! 4. mostly covers a stored object and its center: that object grew, take
//!    over the blob's box and center;
//! 5. anything else is an ambiguous overlap and is discarded.
//!
//! Stored objects are never removed, so nearer objects win over whatever
//! shows up at lower thresholds.

use crate::ccl::{components_with_stats, CclAlgorithm, ComponentStats, Connectivity, LabelWidth};
use crate::error::{Error, Result};
use crate::image::{binarize, max_in_rect, min_max, GrayImage, Rect};

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationParams {
    /// Threshold decrement as a fraction of `max - min` intensity, in `(0, 1]`.
    pub threshold_step_size: f64,
    /// Stop after this many consecutive iterations without an add or a
    /// growth. 0 sweeps the whole range.
    pub num_same_iterations_to_stop: u8,
    /// Both bbox sides must be at least this long.
    pub min_obj_dimension: u32,
    /// Both bbox sides must be at most this long. Clamped to one less than
    /// the shorter image side.
    pub max_obj_dimension: u32,
    /// Containment ratio at which a new blob counts as background of a
    /// stored object.
    pub common_area_to_consider_background: f64,
    /// Containment ratio at which a stored object counts as grown into a
    /// new blob.
    pub common_area_to_consider_growing: f64,
    pub connectivity: Connectivity,
    pub label_width: LabelWidth,
    pub ccl_algorithm: CclAlgorithm,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            threshold_step_size: 0.05,
            num_same_iterations_to_stop: 0,
            min_obj_dimension: 10,
            max_obj_dimension: 400,
            common_area_to_consider_background: 0.9,
            common_area_to_consider_growing: 0.9,
            connectivity: Connectivity::Eight,
            label_width: LabelWidth::U16,
            ccl_algorithm: CclAlgorithm::TwoPassUnionFind,
        }
    }
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParams(format!(
            "{name} must be within [0, 1], got {value}"
        )));
    }
    Ok(())
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        check_fraction("threshold_step_size", self.threshold_step_size)?;
        if self.threshold_step_size == 0.0 {
            return Err(Error::InvalidParams(
                "threshold_step_size must be positive".to_string(),
            ));
        }
        check_fraction(
            "common_area_to_consider_background",
            self.common_area_to_consider_background,
        )?;
        check_fraction(
            "common_area_to_consider_growing",
            self.common_area_to_consider_growing,
        )?;
        if self.min_obj_dimension > self.max_obj_dimension {
            return Err(Error::InvalidParams(format!(
                "min_obj_dimension {} exceeds max_obj_dimension {}",
                self.min_obj_dimension, self.max_obj_dimension
            )));
        }
        Ok(())
    }

    /// Upper size bound actually applied to a `width` x `height` image.
    pub fn effective_max_dimension(&self, width: u32, height: u32) -> u32 {
        self.max_obj_dimension.min(width.min(height) - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DetectedObject {
    /// Component centroid rounded to the nearest pixel.
    pub center: (i32, i32),
    /// Maximum intensity inside `bbox`.
    pub disparity: u16,
    pub bbox: Rect,
}

/// What the object list does with one candidate blob.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    DiscardedBackground,
    Added,
    DiscardedMerge,
    /// The stored object at this index takes over the candidate's box and center.
    Grew(usize),
    DiscardedAmbiguous,
}

/// Overlap of two rectangles, `None` if they share no pixel.
pub fn intersect(a: Rect, b: Rect) -> Option<Rect> {
    let x0 = a.x().max(b.x());
    let y0 = a.y().max(b.y());
    let x1 = a.right().min(b.right());
    let y1 = a.bottom().min(b.bottom());
    if x1 <= x0 || y1 <= y0 {
        return None;
    }
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

/// Fraction of `inner`'s area that lies inside `outer`.
pub fn containment_ratio(inner: Rect, outer: Rect) -> f64 {
    intersect(inner, outer).map_or(0.0, |common| common.area() as f64 / inner.area() as f64)
}

fn center_of(stats: &ComponentStats) -> (i32, i32) {
    (
        stats.centroid.0.round() as i32,
        stats.centroid.1.round() as i32,
    )
}

pub fn classify_candidate(
    candidate: &ComponentStats,
    stored: &[DetectedObject],
    params: &SegmentationParams,
) -> UpdateOutcome {
    let bbox = candidate.bbox;

    if stored
        .iter()
        .any(|s| containment_ratio(bbox, s.bbox) >= params.common_area_to_consider_background)
    {
        return UpdateOutcome::DiscardedBackground;
    }

    if stored.iter().all(|s| intersect(bbox, s.bbox).is_none()) {
        return UpdateOutcome::Added;
    }

    let centers_inside = stored
        .iter()
        .filter(|s| bbox.contains_point(s.center.0, s.center.1))
        .count();
    if centers_inside > 1 {
        return UpdateOutcome::DiscardedMerge;
    }

    stored
        .iter()
        .position(|s| {
            containment_ratio(s.bbox, bbox) >= params.common_area_to_consider_growing
                && bbox.contains_point(s.center.0, s.center.1)
        })
        .map_or(UpdateOutcome::DiscardedAmbiguous, UpdateOutcome::Grew)
}

/// True when no early stop is configured, so every threshold level is known
/// up front and the labeling runs may execute concurrently.
pub fn parallel_sweep_available(params: &SegmentationParams) -> bool {
    params.num_same_iterations_to_stop == 0
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationReport {
    /// Detected objects, nearest (highest disparity) first.
    pub objects: Vec<DetectedObject>,
    /// Threshold levels processed before the sweep ended.
    pub iterations: usize,
}

/// Threshold levels of the sweep, highest first.
///
/// Level `k` marks a pixel `p` as foreground when `(max - p) / (max - min)`
/// is below `k * step`, i.e. `p > max - k * step * (max - min)`. The
/// normalized form is evaluated in floating point from exact integers, so
/// affinely rescaled images produce identical masks. Each level is returned
/// as the integral threshold for [`binarize`].
/// Ties closer than this are treated as exact, so decimal step sizes such as
/// 0.05 land on the thresholds exact arithmetic would give.
const TIE_TOLERANCE: f64 = 1e-12;

struct Levels {
    max: u16,
    range: u32,
    step: f64,
    k: u64,
}

impl Levels {
    fn new(min: u16, max: u16, step: f64) -> Self {
        Self {
            max,
            range: u32::from(max - min),
            step,
            k: 0,
        }
    }
}

impl Iterator for Levels {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.k += 1;
        let reach = self.k as f64 * self.step;
        if reach >= 1.0 - TIE_TOLERANCE {
            return None;
        }
        let range = self.range as f64;
        let inside = |depth: u32| (depth as f64 / range) < reach - TIE_TOLERANCE;
        if !inside(0) {
            // step too small to admit even the maximum
            return Some(f64::from(self.max));
        }
        // largest depth below max still counted as foreground
        let mut depth = ((reach * range).floor() as u32).min(self.range);
        while depth > 0 && !inside(depth) {
            depth -= 1;
        }
        while depth < self.range && inside(depth + 1) {
            depth += 1;
        }
        Some(f64::from(self.max) - f64::from(depth) - 1.0)
    }
}

fn candidates_at(
    img: &GrayImage,
    threshold: f64,
    params: &SegmentationParams,
) -> Result<Vec<ComponentStats>> {
    let CclAlgorithm::TwoPassUnionFind = params.ccl_algorithm;
    let min = params.min_obj_dimension;
    let max = params.effective_max_dimension(img.width(), img.height());
    let fits = |side: i32| (min..=max).contains(&(side as u32));
    let mut stats = components_with_stats(
        &binarize(img, threshold),
        params.connectivity,
        params.label_width,
    )?;
    stats.retain(|c| fits(c.bbox.w()) && fits(c.bbox.h()));
    Ok(stats)
}

/// Applies one level's candidates in label order. Returns whether any object
/// was added or grew.
fn update_stored(
    stored: &mut Vec<DetectedObject>,
    candidates: &[ComponentStats],
    params: &SegmentationParams,
) -> bool {
    let mut changed = false;
    for candidate in candidates {
        match classify_candidate(candidate, stored, params) {
            UpdateOutcome::Added => {
                stored.push(DetectedObject {
                    center: center_of(candidate),
                    disparity: 0,
                    bbox: candidate.bbox,
                });
                changed = true;
            }
            UpdateOutcome::Grew(i) => {
                stored[i].bbox = candidate.bbox;
                stored[i].center = center_of(candidate);
                changed = true;
            }
            UpdateOutcome::DiscardedBackground
            | UpdateOutcome::DiscardedMerge
            | UpdateOutcome::DiscardedAmbiguous => {}
        }
    }
    changed
}

fn finish(img: &GrayImage, mut objects: Vec<DetectedObject>) -> Result<Vec<DetectedObject>> {
    for obj in &mut objects {
        obj.disparity = max_in_rect(img, obj.bbox)?;
    }
    objects.sort_by(|a, b| {
        b.disparity
            .cmp(&a.disparity)
            .then_with(|| b.bbox.area().cmp(&a.bbox.area()))
            .then_with(|| a.bbox.y().cmp(&b.bbox.y()))
            .then_with(|| a.bbox.x().cmp(&b.bbox.x()))
            .then_with(|| a.bbox.w().cmp(&b.bbox.w()))
    });
    Ok(objects)
}

/// Runs the sweep one level at a time. Always available; the reference for
/// the concurrent path.
pub fn segment_serial(img: &GrayImage, params: &SegmentationParams) -> Result<SegmentationReport> {
    params.validate()?;
    let (min, max) = min_max(img);
    if min == max {
        return Ok(SegmentationReport {
            objects: Vec::new(),
            iterations: 0,
        });
    }

    let mut stored = Vec::new();
    let mut iterations = 0;
    let mut unchanged = 0u32;
    let mut cached: Option<(f64, Vec<ComponentStats>)> = None;

    for threshold in Levels::new(min, max, params.threshold_step_size) {
        iterations += 1;
        let candidates = match cached.take() {
            Some((t, c)) if t == threshold => c,
            _ => candidates_at(img, threshold, params)?,
        };
        if update_stored(&mut stored, &candidates, params) {
            unchanged = 0;
        } else {
            unchanged += 1;
        }
        cached = Some((threshold, candidates));
        let stop = u32::from(params.num_same_iterations_to_stop);
        if stop > 0 && unchanged >= stop {
            break;
        }
    }

    Ok(SegmentationReport {
        objects: finish(img, stored)?,
        iterations,
    })
}

/// Labels all threshold levels concurrently, then classifies serially in
/// descending threshold order. Output is identical to [`segment_serial`].
///
/// Falls back to the serial sweep when an early stop is configured.
#[cfg(feature = "parallel")]
pub fn segment_parallel(
    img: &GrayImage,
    params: &SegmentationParams,
) -> Result<SegmentationReport> {
    use rayon::prelude::*;

    if !parallel_sweep_available(params) {
        return segment_serial(img, params);
    }
    params.validate()?;
    let (min, max) = min_max(img);
    if min == max {
        return Ok(SegmentationReport {
            objects: Vec::new(),
            iterations: 0,
        });
    }

    let thresholds: Vec<f64> = Levels::new(min, max, params.threshold_step_size).collect();
    let mut distinct = thresholds.clone();
    distinct.dedup();
    let per_level: Vec<Result<Vec<ComponentStats>>> = distinct
        .par_iter()
        .map(|&t| candidates_at(img, t, params))
        .collect();
    let per_level = per_level.into_iter().collect::<Result<Vec<_>>>()?;

    let mut stored = Vec::new();
    let mut slot = 0;
    for (i, threshold) in thresholds.iter().enumerate() {
        if i > 0 && *threshold != thresholds[i - 1] {
            slot += 1;
        }
        debug_assert_eq!(distinct[slot], *threshold);
        update_stored(&mut stored, &per_level[slot], params);
    }

    Ok(SegmentationReport {
        objects: finish(img, stored)?,
        iterations: thresholds.len(),
    })
}

/// Segments `img` and reports how many threshold levels were processed.
pub fn segment_with_report(
    img: &GrayImage,
    params: &SegmentationParams,
) -> Result<SegmentationReport> {
    #[cfg(feature = "parallel")]
    if parallel_sweep_available(params) {
        return segment_parallel(img, params);
    }
    segment_serial(img, params)
}

/// Detected objects sorted by disparity, highest first. Ties go to the
/// larger box, then to the box whose origin comes first in raster order.
pub fn segment(img: &GrayImage, params: &SegmentationParams) -> Result<Vec<DetectedObject>> {
    segment_with_report(img, params).map(|report| report.objects)
}
