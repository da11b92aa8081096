//! Run drivers behind the `trimap` binary. Each `run_*` returns datasets;
//! writing them out is left to [`output`].

pub mod config;
pub mod output;

use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;

use trimap::analysis::{fit_growth_rate, matched_classical_r, ComparisonRecord, GrowthFit};
use trimap::classical_otoc::{otoc_classical_all, GaussianEnsembleSpec};
use trimap::dynamics::{return_time_stats, ReturnTimeModel};
use trimap::lyapunov::{lyapunov_series, LyapunovEstimates, DEFAULT_SERIES_TOL};
use trimap::quantum::{otoc_quantum, FloquetSpec, QuantumOtocJob};
use trimap::rng::uniform_centers;
use trimap::OtocSeries;

pub use config::{Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<trimap::Error> for CliError {
    fn from(e: trimap::Error) -> Self {
        match e {
            trimap::Error::InvalidArgument(_) | trimap::Error::SizeLimit { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Fits and summary values recorded in the metadata file.
    pub extra: serde_json::Value,
}

impl Dataset {
    fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            extra: json!({}),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

pub fn hbar_of_dim(dim: usize) -> f64 {
    2.0 / (PI * dim as f64)
}

fn fit_record(
    series: &OtocSeries,
    window: Option<(usize, usize)>,
) -> Result<Option<GrowthFit>, CliError> {
    window
        .map(|w| fit_growth_rate(series, w).map_err(CliError::from))
        .transpose()
}

pub fn run(config: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    config.validate()?;
    match config.command {
        Command::Lyapunov => Ok(vec![run_lyapunov(config)?]),
        Command::ClassicalOtoc => Ok(vec![run_classical_otoc(config)?]),
        Command::QuantumOtoc => Ok(vec![run_quantum_otoc(config)?]),
        Command::Compare => run_compare(config),
        Command::ReturnTimes => Ok(vec![run_return_times(config)?]),
        Command::Sweep => Ok(vec![run_sweep(config)?]),
    }
}

pub fn run_lyapunov(config: &RunConfig) -> Result<Dataset, CliError> {
    let mut ds = Dataset::new(
        "lyapunov",
        &[
            "r",
            "lambda_numerical",
            "lambda_series",
            "lambda_simple",
            "lambda_max",
            "lambda_star",
        ],
    );
    if config.r.is_empty() {
        return Err(CliError::Validation("r list is empty".into()));
    }
    for &r in &config.r {
        let e = LyapunovEstimates::compute(
            &config.params(r)?,
            config.traj_steps,
            config.trajectories,
            config.seed,
        )?;
        ds.push(vec![
            r.into(),
            e.lambda_numerical.into(),
            e.lambda_series.into(),
            e.lambda_simple.into(),
            e.lambda_max.into(),
            e.lambda_star.into(),
        ]);
    }
    Ok(ds)
}

fn classical_hbar_sweep(
    config: &RunConfig,
    r: f64,
    hbars: &[f64],
    mut emit: impl FnMut(f64, &trimap::ClassicalOtoc),
) -> Result<(), CliError> {
    let params = config.params(r)?;
    let centers = uniform_centers(config.centers, config.seed);
    for &hbar_c in hbars {
        let spec = GaussianEnsembleSpec::new(centers.clone(), hbar_c, config.samples, config.seed)?
            .with_prefactor(config.prefactor);
        emit(hbar_c, &otoc_classical_all(&spec, &params, config.steps)?);
    }
    Ok(())
}

pub fn run_classical_otoc(config: &RunConfig) -> Result<Dataset, CliError> {
    let mut ds = Dataset::new("classical_otoc", &["scheme", "hbar_c", "t", "value"]);
    let hbars: Vec<f64> = config
        .hbar_exp
        .iter()
        .map(|&n| 1.0 / (PI * 2f64.powi(n as i32)))
        .collect();
    let mut fits = Vec::new();
    let mut fit_err = None;
    classical_hbar_sweep(config, config.r[0], &hbars, |hbar_c, all| {
        for scheme in config.schemes() {
            let s = all.get(scheme);
            for (&t, &v) in s.times.iter().zip(&s.values) {
                ds.push(vec![
                    scheme.as_str().into(),
                    hbar_c.into(),
                    t.into(),
                    v.into(),
                ]);
            }
            match fit_record(s, config.fit_window) {
                Ok(Some(f)) => fits.push(json!({"scheme": scheme, "hbar_c": hbar_c, "fit": f})),
                Ok(None) => {}
                Err(e) => fit_err = Some(e),
            }
        }
    })?;
    if let Some(e) = fit_err {
        return Err(e);
    }
    ds.extra = json!({ "r": config.r[0], "fits": fits });
    Ok(ds)
}

pub fn run_quantum_otoc(config: &RunConfig) -> Result<Dataset, CliError> {
    let mut ds = Dataset::new("quantum_otoc", &["r", "hbar", "dim", "t", "al_q"]);
    let mut radii = vec![config.r[0]];
    if config.companion {
        radii.push(config::COMPANION_R);
    }
    let centers = uniform_centers(config.centers, config.seed);
    let mut fits = Vec::new();
    for dim in config.dims() {
        for &r in &radii {
            let spec = FloquetSpec::new(dim, config.params(r)?)?;
            let hbar = spec.hbar();
            let s = otoc_quantum(&QuantumOtocJob::new(
                spec,
                centers.clone(),
                config.steps,
                config.seed,
            )?)?;
            for (&t, &v) in s.times.iter().zip(&s.values) {
                ds.push(vec![r.into(), hbar.into(), dim.into(), t.into(), v.into()]);
            }
            if let Some(f) = fit_record(&s, config.fit_window)? {
                fits.push(json!({"r": r, "hbar": hbar, "dim": dim, "fit": f}));
            }
        }
    }
    ds.extra = json!({ "fits": fits });
    Ok(ds)
}

/// Quantum series at `r = 0` and its classical partner at `r = 1/√D`,
/// `ħ_c = ħ`. `lambda` sets the Ehrenfest estimate.
#[derive(Debug, Clone)]
pub struct ComparisonPair {
    pub dim: usize,
    pub quantum: OtocSeries,
    pub classical: OtocSeries,
    pub lambda: f64,
}

pub fn run_compare(config: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let centers = uniform_centers(config.centers, config.seed);
    let mut pairs = Vec::new();
    for dim in config.dims() {
        let spec = FloquetSpec::new(dim, config.params(0.0)?)?;
        let hbar = spec.hbar();
        let q = otoc_quantum(&QuantumOtocJob::new(
            spec,
            centers.clone(),
            config.steps,
            config.seed,
        )?)?;
        let r_c = matched_classical_r(dim)?;
        let ens = GaussianEnsembleSpec::new(centers.clone(), hbar, config.samples, config.seed)?
            .with_prefactor(config.prefactor);
        let params_c = config.params(r_c)?;
        let classical = otoc_classical_all(&ens, &params_c, config.steps)?.al;
        let lambda = lyapunov_series(&params_c, DEFAULT_SERIES_TOL)?;
        pairs.push(ComparisonPair {
            dim,
            quantum: q,
            classical,
            lambda,
        });
    }
    compare_datasets(&pairs, &config.t0)
}

/// Series and `Δ_qc` tables for prepared pairs.
pub fn compare_datasets(pairs: &[ComparisonPair], t0s: &[usize]) -> Result<Vec<Dataset>, CliError> {
    let mut series = Dataset::new(
        "compare",
        &["hbar", "dim", "r_classical", "t", "al_q", "al_c"],
    );
    let mut delta = Dataset::new("delta_qc", &["hbar", "dim", "t0", "delta_qc", "ehrenfest"]);
    let mut records = Vec::new();
    for pair in pairs {
        let (dim, q, c) = (pair.dim, &pair.quantum, &pair.classical);
        let hbar = hbar_of_dim(dim);
        for t0 in t0s {
            if q.value_at(*t0).is_none() || c.value_at(*t0).is_none() {
                return Err(CliError::Validation(format!(
                    "t0 = {t0} is beyond the series range"
                )));
            }
        }
        let rec = ComparisonRecord::build(q, c, dim, hbar, t0s, pair.lambda)?;
        for ((&t, &vq), &vc) in q.times.iter().zip(&q.values).zip(&c.values) {
            series.push(vec![
                hbar.into(),
                dim.into(),
                c.meta.r.into(),
                t.into(),
                vq.into(),
                vc.into(),
            ]);
        }
        for &(t0, d) in &rec.delta_qc {
            delta.push(vec![
                hbar.into(),
                dim.into(),
                t0.into(),
                d.into(),
                rec.ehrenfest.into(),
            ]);
        }
        records.push(rec);
    }
    delta.extra = json!({ "records": records });
    Ok(vec![series, delta])
}

pub fn run_return_times(config: &RunConfig) -> Result<Dataset, CliError> {
    let mut ds = Dataset::new(
        "return_times",
        &["r", "tau", "count", "empirical_pmf", "geometric_pmf"],
    );
    let mut summary = Vec::new();
    for &r in &config.r {
        let params = config.params(r)?;
        let model = ReturnTimeModel::new(&params)?;
        let hist = return_time_stats(&params, config.trajectories, config.traj_steps, config.seed)?;
        for tau in 1..hist.counts.len() {
            ds.push(vec![
                r.into(),
                tau.into(),
                hist.count(tau).into(),
                hist.pmf(tau).into(),
                model.pmf(tau).into(),
            ]);
        }
        summary.push(
            json!({"r": r, "total": hist.total, "mean": hist.mean(), "tau_bar": model.tau_bar}),
        );
    }
    ds.extra = json!({ "summary": summary });
    Ok(ds)
}

/// Classical schemes and the quantum `AL_q` for every `(r, ħ)` pair.
pub fn run_sweep(config: &RunConfig) -> Result<Dataset, CliError> {
    let mut ds = Dataset::new("sweep", &["r", "hbar", "source", "scheme", "t", "value"]);
    let centers = uniform_centers(config.centers, config.seed);
    let mut fits = Vec::new();
    for &r in &config.r {
        for dim in config.dims() {
            let hbar = hbar_of_dim(dim);
            let mut err = None;
            classical_hbar_sweep(config, r, &[hbar], |_, all| {
                for scheme in config.schemes() {
                    let s = all.get(scheme);
                    for (&t, &v) in s.times.iter().zip(&s.values) {
                        ds.push(vec![
                            r.into(),
                            hbar.into(),
                            "classical".into(),
                            scheme.as_str().into(),
                            t.into(),
                            v.into(),
                        ]);
                    }
                    match fit_record(s, config.fit_window) {
                        Ok(Some(f)) => fits.push(json!({"r": r, "hbar": hbar, "source": "classical", "scheme": scheme, "fit": f})),
                        Ok(None) => {}
                        Err(e) => err = Some(e),
                    }
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            let spec = FloquetSpec::new(dim, config.params(r)?)?;
            let q = otoc_quantum(&QuantumOtocJob::new(
                spec,
                centers.clone(),
                config.steps,
                config.seed,
            )?)?;
            for (&t, &v) in q.times.iter().zip(&q.values) {
                ds.push(vec![
                    r.into(),
                    hbar.into(),
                    "quantum".into(),
                    "AL".into(),
                    t.into(),
                    v.into(),
                ]);
            }
            if let Some(f) = fit_record(&q, config.fit_window)? {
                fits.push(
                    json!({"r": r, "hbar": hbar, "source": "quantum", "scheme": "AL", "fit": f}),
                );
            }
        }
    }
    ds.extra = json!({ "fits": fits });
    Ok(ds)
}
