//! Adaptive non-binary connected component labeling.
//!
//! Segments a grayscale (typically stereo disparity) image into
//! bounding-boxed objects. A binarizing threshold is swept from the highest
//! intensity downwards; at every level a binary connected component labeling
//! runs and the resulting blobs are merged into a list of stored objects.
//! Nearer objects (higher disparity) are found first and are never replaced
//! by blobs that appear at lower thresholds.
//!
//! ```
//! use nbccl::{segment, synth, SegmentationParams};
//!
//! let (scene, expected) = synth::testcase1();
//! let image = synth::render(&scene).unwrap();
//! let objects = segment(&image, &SegmentationParams::default()).unwrap();
//! assert_eq!(objects.len(), expected);
//! ```

pub mod ccl;
pub mod cli;
mod error;
pub mod image;
pub mod pgm;
pub mod segmenter;
pub mod synth;

pub use ccl::{
    components_with_stats, label_components, CclAlgorithm, ComponentStats, Connectivity,
    LabelImage, LabelWidth,
};
pub use error::{Error, Result};
pub use image::{binarize, max_in_rect, min_max, BinaryImage, BitDepth, GrayImage, Rect};
pub use pgm::{load_pgm, read_pgm, save_pgm, write_pgm};
#[cfg(feature = "parallel")]
pub use segmenter::segment_parallel;
pub use segmenter::{
    classify_candidate, containment_ratio, intersect, parallel_sweep_available, segment,
    segment_serial, segment_with_report, DetectedObject, SegmentationParams, SegmentationReport,
    UpdateOutcome,
};
