//! Security metrics for cipher images: histogram, Shannon entropy,
//! adjacent-pixel correlation, NPCR and UACI, plus a report bundling them.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::GrayImage;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("images differ in size: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("buffers differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} correlation undefined: one side of the pixel pairs has zero variance")]
    DegenerateVariance(Direction),
    #[error("{0} correlation needs at least two pixel pairs")]
    TooFewPairs(Direction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Horizontal, Direction::Vertical, Direction::Diagonal];

    fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        })
    }
}

pub fn histogram_of(bytes: &[u8]) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    counts
}

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    histogram_of(img.pixels())
}

/// Shannon entropy in bits per symbol; 0 for an empty buffer.
pub fn entropy_of(bytes: &[u8]) -> f64 {
    if bytes.is_empty() {
        return 0.0;
    }
    let total = bytes.len() as f64;
    histogram_of(bytes)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

pub fn entropy(img: &GrayImage) -> f64 {
    entropy_of(img.pixels())
}

/// Pearson correlation of every adjacent pixel pair in `direction`,
/// with population (1/N) moments.
pub fn correlation(img: &GrayImage, direction: Direction) -> Result<f64, MetricsError> {
    let (dr, dc) = direction.offset();
    let (w, h) = (img.width(), img.height());
    let rows = h - dr;
    let cols = w - dc;
    let n = rows * cols;
    if n < 2 {
        return Err(MetricsError::TooFewPairs(direction));
    }
    let pairs = || {
        (0..rows).flat_map(move |r| {
            (0..cols).map(move |c| (img.get(r, c) as f64, img.get(r + dr, c + dc) as f64))
        })
    };
    let nf = n as f64;
    let (sx, sy) = pairs().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / nf, sy / nf);
    let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in pairs() {
        let (ex, ey) = (x - mx, y - my);
        vx += ex * ex;
        vy += ey * ey;
        cov += ex * ey;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(MetricsError::DegenerateVariance(direction));
    }
    Ok((cov / nf) / ((vx / nf) * (vy / nf)).sqrt())
}

/// Percentage of positions where the two buffers differ.
pub fn npcr_of(c1: &[u8], c2: &[u8]) -> Result<f64, MetricsError> {
    if c1.len() != c2.len() {
        return Err(MetricsError::LengthMismatch(c1.len(), c2.len()));
    }
    if c1.is_empty() {
        return Ok(0.0);
    }
    let changed = c1.iter().zip(c2).filter(|(a, b)| a != b).count();
    Ok(100.0 * changed as f64 / c1.len() as f64)
}

/// Mean absolute difference as a percentage of 255.
pub fn uaci_of(c1: &[u8], c2: &[u8]) -> Result<f64, MetricsError> {
    if c1.len() != c2.len() {
        return Err(MetricsError::LengthMismatch(c1.len(), c2.len()));
    }
    if c1.is_empty() {
        return Ok(0.0);
    }
    let sum: u64 = c1
        .iter()
        .zip(c2)
        .map(|(&a, &b)| (a as i32 - b as i32).unsigned_abs() as u64)
        .sum();
    Ok(100.0 * sum as f64 / (255.0 * c1.len() as f64))
}

fn check_dims(c1: &GrayImage, c2: &GrayImage) -> Result<(), MetricsError> {
    if c1.same_dims(c2) {
        Ok(())
    } else {
        Err(MetricsError::DimensionMismatch(
            c1.width(),
            c1.height(),
            c2.width(),
            c2.height(),
        ))
    }
}

pub fn npcr(c1: &GrayImage, c2: &GrayImage) -> Result<f64, MetricsError> {
    check_dims(c1, c2)?;
    npcr_of(c1.pixels(), c2.pixels())
}

pub fn uaci(c1: &GrayImage, c2: &GrayImage) -> Result<f64, MetricsError> {
    check_dims(c1, c2)?;
    uaci_of(c1.pixels(), c2.pixels())
}

/// Correlation in one direction, or why it could not be computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalCorrelation {
    pub direction: Direction,
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub width: usize,
    pub height: usize,
    pub entropy: f64,
    pub correlations: Vec<DirectionalCorrelation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub npcr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uaci: Option<f64>,
    pub histogram: Vec<u64>,
}

pub fn build_report(img: &GrayImage, pair: Option<&GrayImage>) -> Result<SecurityReport, MetricsError> {
    let (npcr_v, uaci_v) = match pair {
        Some(other) => (Some(npcr(img, other)?), Some(uaci(img, other)?)),
        None => (None, None),
    };
    let correlations = Direction::ALL
        .iter()
        .map(|&direction| match correlation(img, direction) {
            Ok(r) => DirectionalCorrelation {
                direction,
                r: Some(r),
                reason: None,
            },
            Err(e) => DirectionalCorrelation {
                direction,
                r: None,
                reason: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SecurityReport {
        width: img.width(),
        height: img.height(),
        entropy: entropy(img),
        correlations,
        npcr: npcr_v,
        uaci: uaci_v,
        histogram: histogram(img).to_vec(),
    })
}

impl SecurityReport {
    pub fn correlation(&self, direction: Direction) -> Option<f64> {
        self.correlations
            .iter()
            .find(|c| c.direction == direction)
            .and_then(|c| c.r)
    }

    /// One `name value` line per metric.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "size {}x{}", self.width, self.height);
        let _ = writeln!(out, "entropy {:.6}", self.entropy);
        for c in &self.correlations {
            match (c.r, &c.reason) {
                (Some(r), _) => {
                    let _ = writeln!(out, "corr_{} {:.6}", c.direction, r);
                }
                (None, reason) => {
                    let _ = writeln!(
                        out,
                        "corr_{} n/a ({})",
                        c.direction,
                        reason.as_deref().unwrap_or("undefined")
                    );
                }
            }
        }
        if let Some(v) = self.npcr {
            let _ = writeln!(out, "npcr {v:.4}");
        }
        if let Some(v) = self.uaci {
            let _ = writeln!(out, "uaci {v:.4}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The 256 histogram counts, comma-separated on one line.
    pub fn histogram_csv(&self) -> String {
        let mut line = self
            .histogram
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        line.push('\n');
        line
    }
}
