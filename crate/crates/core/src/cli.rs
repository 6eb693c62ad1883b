//! Command-line frontend.
//!
//! Exit codes: 0 success (also when nothing is found), 1 bad arguments or
//! out-of-range parameters, 2 input/output failure or unreadable image,
//! 3 segmentation failure such as a label overflow.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::ccl::{CclAlgorithm, Connectivity, LabelWidth};
use crate::error::{Error, Result};
use crate::image::{min_max, BitDepth, GrayImage, Rect};
use crate::pgm::load_pgm;
use crate::segmenter::{segment_with_report, DetectedObject, SegmentationParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const DEFAULTS: SegmentationParams = SegmentationParams {
    threshold_step_size: 0.05,
    num_same_iterations_to_stop: 0,
    min_obj_dimension: 10,
    max_obj_dimension: 400,
    common_area_to_consider_background: 0.9,
    common_area_to_consider_growing: 0.9,
    connectivity: Connectivity::Eight,
    label_width: LabelWidth::U16,
    ccl_algorithm: CclAlgorithm::TwoPassUnionFind,
};

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not within [0, 1]"))
    }
}

fn parse_connectivity(s: &str) -> std::result::Result<Connectivity, String> {
    let v: u32 = s.parse().map_err(|e| format!("{e}"))?;
    Connectivity::try_from(v).map_err(|e| e.to_string())
}

fn parse_label_width(s: &str) -> std::result::Result<LabelWidth, String> {
    let v: u32 = s.parse().map_err(|e| format!("{e}"))?;
    LabelWidth::try_from(v).map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> std::result::Result<CclAlgorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Segment a disparity image (PGM) into objects by an adaptive threshold sweep.
#[derive(Debug, Parser)]
#[command(name = "nbccl", version)]
pub struct CliConfig {
    /// Input disparity image (PGM, P2 or P5, 8 or 16 bit).
    #[arg(long)]
    pub input: PathBuf,

    /// Write the detected objects as JSON.
    #[arg(long = "json-out")]
    pub json_out: Option<PathBuf>,

    /// Write the input with red bounding boxes as a binary PPM.
    #[arg(long = "annotated-out")]
    pub annotated_out: Option<PathBuf>,

    /// Threshold step as a fraction of the intensity range, in (0, 1].
    #[arg(long = "threshold-step", default_value_t = DEFAULTS.threshold_step_size, value_parser = parse_fraction)]
    pub threshold_step: f64,

    /// Stop after this many unchanged iterations (0 = full sweep).
    #[arg(long = "stop-iterations", default_value_t = DEFAULTS.num_same_iterations_to_stop)]
    pub stop_iterations: u8,

    /// Minimum bounding box side in pixels.
    #[arg(long = "min-dim")]
    pub min_dim: Option<u32>,

    /// Maximum bounding box side in pixels [default: 400, at most the
    /// shorter image side minus one].
    #[arg(long = "max-dim")]
    pub max_dim: Option<u32>,

    /// Containment ratio at which a new blob is treated as background.
    #[arg(long = "bg-ratio", default_value_t = DEFAULTS.common_area_to_consider_background, value_parser = parse_fraction)]
    pub bg_ratio: f64,

    /// Containment ratio at which a stored object is treated as grown.
    #[arg(long = "grow-ratio", default_value_t = DEFAULTS.common_area_to_consider_growing, value_parser = parse_fraction)]
    pub grow_ratio: f64,

    /// Pixel connectivity, 4 or 8.
    #[arg(long, default_value = "8", value_parser = parse_connectivity)]
    pub connectivity: Connectivity,

    /// Label width in bits, 16 or 32.
    #[arg(long = "label-bits", default_value = "16", value_parser = parse_label_width)]
    pub label_bits: LabelWidth,

    /// Connected component labeling algorithm.
    #[arg(long = "ccl-algorithm", default_value = "two-pass", value_parser = parse_algorithm)]
    pub ccl_algorithm: CclAlgorithm,

    /// More output; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl CliConfig {
    pub fn params(&self) -> SegmentationParams {
        SegmentationParams {
            threshold_step_size: self.threshold_step,
            num_same_iterations_to_stop: self.stop_iterations,
            min_obj_dimension: self.min_dim.unwrap_or(DEFAULTS.min_obj_dimension),
            max_obj_dimension: self.max_dim.unwrap_or(DEFAULTS.max_obj_dimension),
            common_area_to_consider_background: self.bg_ratio,
            common_area_to_consider_growing: self.grow_ratio,
            connectivity: self.connectivity,
            label_width: self.label_bits,
            ccl_algorithm: self.ccl_algorithm,
        }
    }

    /// Explicit dimension flags must lie in `[0, max(width, height) - 1]`.
    fn check_dimensions(&self, img: &GrayImage) -> std::result::Result<(), String> {
        let limit = img.width().max(img.height()) - 1;
        for (flag, value) in [("--min-dim", self.min_dim), ("--max-dim", self.max_dim)] {
            if let Some(v) = value.filter(|&v| v > limit) {
                return Err(format!(
                    "{flag} {v} is outside [0, {limit}] for a {}x{} image",
                    img.width(),
                    img.height()
                ));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonBox {
    x: i32,
    y: i32,
    w: i32,
    h: i32,
}

#[derive(Serialize, Deserialize)]
struct JsonObject {
    center: [i32; 2],
    disparity: u16,
    bbox: JsonBox,
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    objects: Vec<JsonObject>,
}

/// Serializes objects as `{"objects":[{"center":[x,y],"disparity":d,"bbox":{...}}]}`.
pub fn to_json(objects: &[DetectedObject]) -> String {
    let doc = JsonDocument {
        objects: objects
            .iter()
            .map(|o| JsonObject {
                center: [o.center.0, o.center.1],
                disparity: o.disparity,
                bbox: JsonBox {
                    x: o.bbox.x(),
                    y: o.bbox.y(),
                    w: o.bbox.w(),
                    h: o.bbox.h(),
                },
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn from_json(text: &str) -> Result<Vec<DetectedObject>> {
    let doc: JsonDocument = serde_json::from_str(text)
        .map_err(|e| Error::Io(io::Error::new(io::ErrorKind::InvalidData, e)))?;
    doc.objects
        .into_iter()
        .map(|o| {
            let bbox = Rect::new(o.bbox.x, o.bbox.y, o.bbox.w, o.bbox.h).ok_or_else(|| {
                Error::Io(io::Error::new(io::ErrorKind::InvalidData, "invalid bbox"))
            })?;
            Ok(DetectedObject {
                center: (o.center[0], o.center[1]),
                disparity: o.disparity,
                bbox,
            })
        })
        .collect()
}

pub fn write_json(objects: &[DetectedObject], path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(to_json(objects).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn tone_map(img: &GrayImage) -> Vec<u8> {
    match img.depth() {
        BitDepth::Eight => img.data().iter().map(|&v| v as u8).collect(),
        BitDepth::Sixteen => {
            let (_, max) = min_max(img);
            let max = u32::from(max.max(1));
            img.data()
                .iter()
                .map(|&v| ((u32::from(v) * 255 + max / 2) / max) as u8)
                .collect()
        }
    }
}

/// RGB raster of the grayscale input with every bbox outlined in red.
pub fn annotate(img: &GrayImage, objects: &[DetectedObject]) -> Vec<u8> {
    let mut rgb: Vec<u8> = tone_map(img).into_iter().flat_map(|v| [v, v, v]).collect();
    let stride = img.width() as usize;
    let mut paint = |x: i32, y: i32| {
        let i = 3 * (y as usize * stride + x as usize);
        rgb[i..i + 3].copy_from_slice(&[255, 0, 0]);
    };
    for r in objects.iter().map(|o| o.bbox) {
        let (x1, y1) = (r.right() - 1, r.bottom() - 1);
        for x in r.x()..=x1 {
            paint(x, r.y());
            paint(x, y1);
        }
        for y in r.y()..=y1 {
            paint(r.x(), y);
            paint(x1, y);
        }
    }
    rgb
}

/// Writes a binary `P6` PPM. Bboxes must lie inside the image.
pub fn write_annotated(
    img: &GrayImage,
    objects: &[DetectedObject],
    path: impl AsRef<Path>,
) -> Result<()> {
    if let Some(o) = objects
        .iter()
        .find(|o| !o.bbox.fits_within(img.width(), img.height()))
    {
        return Err(Error::RectOutOfBounds {
            rect: o.bbox,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P6\n{} {}\n255\n", img.width(), img.height())?;
    out.write_all(&annotate(img, objects))?;
    out.flush()?;
    Ok(())
}

/// Runs the tool with `std::env::args`-style arguments and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&config, out, err) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(
    config: &CliConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<(), (i32, String)> {
    let params = config.params();
    params.validate().map_err(|e| (EXIT_USAGE, e.to_string()))?;

    let img = load_pgm(&config.input)
        .map_err(|e| (EXIT_IO, format!("{}: {e}", config.input.display())))?;
    config
        .check_dimensions(&img)
        .map_err(|msg| (EXIT_USAGE, msg))?;

    if config.verbose > 0 {
        let (lo, hi) = min_max(&img);
        let _ = writeln!(
            err,
            "{}: {}x{}, {}-bit, intensities {lo}..={hi}",
            config.input.display(),
            img.width(),
            img.height(),
            img.depth().bits()
        );
        let _ = writeln!(err, "{params:?}");
    }

    let report = segment_with_report(&img, &params).map_err(|e| (EXIT_INTERNAL, e.to_string()))?;
    let objects = &report.objects;

    if config.verbose > 0 {
        let _ = writeln!(err, "{} threshold levels processed", report.iterations);
    }
    let _ = writeln!(out, "{} objects", objects.len());
    for o in objects {
        let _ = writeln!(
            out,
            "center=({}, {}) disparity={} bbox=({}, {}, {}, {})",
            o.center.0,
            o.center.1,
            o.disparity,
            o.bbox.x(),
            o.bbox.y(),
            o.bbox.w(),
            o.bbox.h()
        );
    }

    if let Some(path) = &config.json_out {
        write_json(objects, path).map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &config.annotated_out {
        write_annotated(&img, objects, path)
            .map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
