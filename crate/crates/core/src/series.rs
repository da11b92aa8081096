use serde::{Deserialize, Serialize};
use std::fmt;

/// Order of logarithm and ensemble average.
///
/// * `AL`: average over centers of the log of each center's Gaussian average.
/// * `LA`: log of the average over all centers and samples.
/// * `LL`: average over all centers and samples of the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AveragingScheme {
    AL,
    LA,
    LL,
}

impl AveragingScheme {
    pub const ALL: [AveragingScheme; 3] = [
        AveragingScheme::AL,
        AveragingScheme::LA,
        AveragingScheme::LL,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AveragingScheme::AL => "AL",
            AveragingScheme::LA => "LA",
            AveragingScheme::LL => "LL",
        }
    }
}

impl fmt::Display for AveragingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AveragingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "al" => Ok(AveragingScheme::AL),
            "la" => Ok(AveragingScheme::LA),
            "ll" => Ok(AveragingScheme::LL),
            other => Err(format!("unknown scheme '{other}' (expected al, la or ll)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesSource {
    /// Gaussian ensembles around centers.
    Classical,
    /// Uniform sampling of the whole torus.
    PhaseSpace,
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub r: f64,
    /// `ħ` for quantum series, `ħ_c` for classical ones; `None` for phase-space averages.
    pub hbar: Option<f64>,
    pub n_centers: usize,
    pub samples_per_center: usize,
    pub seed: u64,
    pub prefactor: bool,
    /// `(sample, t)` pairs dropped because `∂x(t)/∂x(0)` was exactly zero.
    pub excluded: u64,
}

/// Log-OTOC values at integer steps `0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocSeries {
    pub scheme: AveragingScheme,
    pub source: SeriesSource,
    pub times: Vec<usize>,
    pub values: Vec<f64>,
    pub meta: SeriesMeta,
}

impl OtocSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, t: usize) -> Option<f64> {
        self.times
            .iter()
            .position(|&s| s == t)
            .map(|i| self.values[i])
    }

    pub fn max_time(&self) -> Option<usize> {
        self.times.last().copied()
    }
}
