use std::fmt;

use super::table::SweepTable;
use super::AnalysisError;

/// Relative threshold below which a change in `M` between neighbouring rows
/// counts as zero.
pub const SLOPE_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Flat,
    Increasing,
    Decreasing,
    UnimodalMax,
    UnimodalMin,
    Multimodal,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Flat => "flat",
            Shape::Increasing => "increasing",
            Shape::Decreasing => "decreasing",
            Shape::UnimodalMax => "unimodal_max",
            Shape::UnimodalMin => "unimodal_min",
            Shape::Multimodal => "multimodal",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Shape::Flat,
            Shape::Increasing,
            Shape::Decreasing,
            Shape::UnimodalMax,
            Shape::UnimodalMin,
            Shape::Multimodal,
        ]
        .into_iter()
        .find(|sh| sh.as_str() == s)
        .ok_or_else(|| format!("unknown profile shape '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileClass {
    pub shape: Shape,
    pub n_interior_maxima: usize,
    pub n_interior_minima: usize,
    pub n_sign_changes_of_slope: usize,
    pub argmax_d: f64,
}

impl ProfileClass {
    pub fn is_unimodal(&self) -> bool {
        self.shape == Shape::UnimodalMax
    }
}

pub fn classify_profile(t: &SweepTable) -> Result<ProfileClass, AnalysisError> {
    classify_values(&t.d_values(), &t.m_values())
}

/// Classifies the sequence `m` sampled at ascending `d`.
pub fn classify_values(d: &[f64], m: &[f64]) -> Result<ProfileClass, AnalysisError> {
    if m.len() < 5 || d.len() != m.len() {
        return Err(AnalysisError::TooFewPoints { got: m.len().min(d.len()) });
    }
    let (lo, hi) = m
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let threshold = SLOPE_RTOL * (hi - lo);
    let signs: Vec<i8> = m
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|delta| delta.abs() > threshold)
        .map(|delta| if delta > 0.0 { 1 } else { -1 })
        .collect();

    let mut maxima = 0;
    let mut minima = 0;
    for w in signs.windows(2) {
        match (w[0], w[1]) {
            (1, -1) => maxima += 1,
            (-1, 1) => minima += 1,
            _ => {}
        }
    }
    let changes = maxima + minima;
    let shape = match (signs.first(), changes) {
        (None, _) => Shape::Flat,
        (Some(1), 0) => Shape::Increasing,
        (Some(_), 0) => Shape::Decreasing,
        (Some(1), 1) => Shape::UnimodalMax,
        (Some(_), 1) => Shape::UnimodalMin,
        _ => Shape::Multimodal,
    };
    let argmax = m
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > m[best] { i } else { best });
    Ok(ProfileClass {
        shape,
        n_interior_maxima: maxima,
        n_interior_minima: minima,
        n_sign_changes_of_slope: changes,
        argmax_d: d[argmax],
    })
}
