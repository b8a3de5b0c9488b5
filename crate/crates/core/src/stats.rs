//! Plot-ready summaries: histograms with explicit bin edges and boxplot
//! five-number summaries.
//!
//! Quartiles use the inclusive median-of-halves (Tukey hinge) method: the
//! sorted values are split at the median, and for an odd count the median
//! itself belongs to both halves. Q1 and Q3 are the medians of the halves.

use serde::Serialize;

/// Bins `[edges[i], edges[i+1])`; the last bin also includes its upper edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Histogram {
    /// One unit-width bin per integer between the observed min and max.
    pub fn integer(values: &[usize]) -> Histogram {
        let (Some(&lo), Some(&hi)) = (values.iter().min(), values.iter().max()) else {
            return Histogram {
                edges: Vec::new(),
                counts: Vec::new(),
                total: 0,
            };
        };
        let mut counts = vec![0; hi - lo + 1];
        for &v in values {
            counts[v - lo] += 1;
        }
        Histogram {
            edges: (lo..=hi + 1).map(|e| e as f64).collect(),
            counts,
            total: values.len(),
        }
    }

    /// `bins` equal-width bins over `[lo, hi]`. Values outside the range
    /// are clamped into the end bins.
    pub fn uniform(values: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
        assert!(bins > 0 && hi > lo, "invalid histogram range");
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0; bins];
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = if idx.is_nan() { 0 } else { (idx.max(0.0) as usize).min(bins - 1) };
            counts[idx] += 1;
        }
        Histogram {
            edges: (0..=bins).map(|i| lo + width * i as f64).collect(),
            counts,
            total: values.len(),
        }
    }

    pub fn count_sum(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Summary {
    Ok {
        count: usize,
        mean: f64,
        #[serde(flatten)]
        five: FiveNumber,
    },
    NoData,
}

fn median_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let half = n.div_ceil(2);
    let lower = &sorted[..half];
    let upper = &sorted[n - half..];
    Some(FiveNumber {
        min: sorted[0],
        q1: median_sorted(lower),
        median: median_sorted(&sorted),
        q3: median_sorted(upper),
        max: sorted[n - 1],
    })
}

pub fn summarize(values: &[f64]) -> Summary {
    match five_number(values) {
        Some(five) => Summary::Ok {
            count: values.len(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            five,
        },
        None => Summary::NoData,
    }
}
