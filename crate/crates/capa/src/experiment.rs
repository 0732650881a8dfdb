//! Config-driven, seeded Monte Carlo sweeps over transmit power, user
//! count, and aperture size, for the continuous array and the discrete
//! baseline, with CSV trend tables as output.
//!
//! Determinism contract: rows are a pure function of the configuration.
//! Per-trial randomness comes from independent RNG streams keyed by
//! `(seed, trial_index)`, trials run in parallel but are reduced in trial
//! order, and rows are sorted before emission, so serial and parallel runs
//! produce byte-identical CSV.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::beamforming::{PowerProfile, Scheme};
use crate::error::{Error, Result};
use crate::geometry::{
    sample_user_positions, Aperture, UserLayout, UserRegion, WaveParams, FREE_SPACE_IMPEDANCE,
    SPEED_OF_LIGHT,
};
use crate::linalg::positive;
use crate::metrics::report;
use crate::quadrature::{tensor_grid, ChannelMatrix, CorrelationMatrix};
use crate::spda::{discretize, spda_channels, SpdaArray};

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Power,
    Users,
    Aperture,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::Power => "power",
            SweepKind::Users => "users",
            SweepKind::Aperture => "aperture",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Receive-array variant under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrayKind {
    Capa,
    Spda,
}

impl ArrayKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArrayKind::Capa => "capa",
            ArrayKind::Spda => "spda",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "capa" => Ok(ArrayKind::Capa),
            "spda" => Ok(ArrayKind::Spda),
            other => Err(Error::Config(format!(
                "unknown array '{other}' (expected capa or spda)"
            ))),
        }
    }
}

impl fmt::Display for ArrayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Complete experiment configuration; the defaults are the reference
/// scenario of [`crate::scenario::Scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub users: usize,
    pub frequency: f64,
    pub speed_of_light: f64,
    pub impedance: f64,
    /// Per-user transmit power shared by all users.
    pub power: f64,
    /// Optional explicit per-user powers (forbidden while sweeping power
    /// or users).
    pub powers: Option<Vec<f64>>,
    pub noise_variance: f64,
    pub aperture_area: f64,
    pub region_half_x: f64,
    pub region_half_y: f64,
    pub region_z_min: f64,
    pub region_z_max: f64,
    /// Per-user aperture area; `None` means `lambda^2 / (4 pi)`.
    pub user_aperture_area: Option<f64>,
    pub quad_order: usize,
    pub spda_spacing_over_wavelength: f64,
    pub arrays: Vec<ArrayKind>,
    pub schemes: Vec<Scheme>,
    /// Sweep values; `None` selects the per-sweep defaults.
    pub sweep_values: Option<Vec<f64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 50,
            users: 8,
            frequency: 2.4e9,
            speed_of_light: SPEED_OF_LIGHT,
            impedance: FREE_SPACE_IMPEDANCE,
            power: 40e-3,
            powers: None,
            noise_variance: 5.6e-3,
            aperture_area: 0.25,
            region_half_x: 5.0,
            region_half_y: 5.0,
            region_z_min: 15.0,
            region_z_max: 30.0,
            user_aperture_area: None,
            quad_order: 30,
            spda_spacing_over_wavelength: 0.5,
            arrays: vec![ArrayKind::Capa, ArrayKind::Spda],
            schemes: vec![Scheme::Mrc, Scheme::Zf, Scheme::Mmse],
            sweep_values: None,
        }
    }
}

/// Flat key-value TOML schema; every key is optional and overlays the
/// defaults. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    trials: Option<usize>,
    users: Option<usize>,
    frequency_hz: Option<f64>,
    speed_of_light: Option<f64>,
    impedance_ohm: Option<f64>,
    power: Option<f64>,
    powers: Option<Vec<f64>>,
    noise_variance: Option<f64>,
    aperture_area_m2: Option<f64>,
    user_region_half_x: Option<f64>,
    user_region_half_y: Option<f64>,
    user_region_z_min: Option<f64>,
    user_region_z_max: Option<f64>,
    user_aperture_area_m2: Option<f64>,
    quad_order: Option<usize>,
    spda_spacing_over_wavelength: Option<f64>,
    arrays: Option<Vec<String>>,
    schemes: Option<Vec<String>>,
    sweep_values: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// Overlay a flat-key TOML document on the defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        let mut cfg = Self::default();
        macro_rules! take {
            ($field:ident, $raw:ident) => {
                if let Some(v) = raw.$raw {
                    cfg.$field = v;
                }
            };
        }
        take!(seed, seed);
        take!(trials, trials);
        take!(users, users);
        take!(frequency, frequency_hz);
        take!(speed_of_light, speed_of_light);
        take!(impedance, impedance_ohm);
        take!(power, power);
        take!(noise_variance, noise_variance);
        take!(aperture_area, aperture_area_m2);
        take!(region_half_x, user_region_half_x);
        take!(region_half_y, user_region_half_y);
        take!(region_z_min, user_region_z_min);
        take!(region_z_max, user_region_z_max);
        take!(quad_order, quad_order);
        take!(spda_spacing_over_wavelength, spda_spacing_over_wavelength);
        cfg.powers = raw.powers;
        cfg.user_aperture_area = raw.user_aperture_area_m2;
        cfg.sweep_values = raw.sweep_values;
        if let Some(arrays) = raw.arrays {
            cfg.arrays = arrays
                .iter()
                .map(|s| ArrayKind::parse(s))
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(schemes) = raw.schemes {
            cfg.schemes = schemes
                .iter()
                .map(|s| Scheme::parse(s))
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn wave(&self) -> Result<WaveParams> {
        WaveParams::with_constants(self.frequency, self.speed_of_light, self.impedance)
    }

    pub fn region(&self) -> Result<UserRegion> {
        UserRegion::new(
            self.region_half_x,
            self.region_half_y,
            self.region_z_min,
            self.region_z_max,
        )
    }

    /// Built-in sweep values: decades of the base power, even user counts
    /// 2..=16, and aperture areas 0.05..=0.5 m².
    pub fn default_sweep_values(&self, kind: SweepKind) -> Vec<f64> {
        match kind {
            SweepKind::Power => [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
                .iter()
                .map(|m| m * self.power)
                .collect(),
            SweepKind::Users => (1..=8).map(|k| (2 * k) as f64).collect(),
            SweepKind::Aperture => vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
        }
    }

    /// Field-level validation of everything a sweep of `kind` will use.
    pub fn validate(&self, kind: SweepKind) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if self.users == 0 {
            return Err(Error::Config("users: must be at least 1".into()));
        }
        for (name, v) in [
            ("power", self.power),
            ("noise_variance", self.noise_variance),
            ("aperture_area_m2", self.aperture_area),
            ("frequency_hz", self.frequency),
            (
                "spda_spacing_over_wavelength",
                self.spda_spacing_over_wavelength,
            ),
        ] {
            if !positive(v) {
                return Err(Error::Config(format!("{name}: must be positive, got {v}")));
            }
        }
        if self.quad_order == 0 {
            return Err(Error::Config("quad_order: must be at least 1".into()));
        }
        if let Some(area) = self.user_aperture_area {
            if !positive(area) {
                return Err(Error::Config(format!(
                    "user_aperture_area_m2: must be positive, got {area}"
                )));
            }
        }
        self.region()?;
        self.wave()?;
        if self.arrays.is_empty() {
            return Err(Error::Config("arrays: must not be empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes: must not be empty".into()));
        }
        let mut arrays = self.arrays.clone();
        arrays.sort();
        arrays.dedup();
        if arrays.len() != self.arrays.len() {
            return Err(Error::Config("arrays: duplicate entries".into()));
        }
        let mut schemes = self.schemes.clone();
        schemes.sort();
        schemes.dedup();
        if schemes.len() != self.schemes.len() {
            return Err(Error::Config("schemes: duplicate entries".into()));
        }
        if let Some(powers) = &self.powers {
            match kind {
                SweepKind::Power => {
                    return Err(Error::Config(
                        "powers: per-user powers conflict with a power sweep".into(),
                    ))
                }
                SweepKind::Users => {
                    return Err(Error::Config(
                        "powers: per-user powers conflict with a user-count sweep".into(),
                    ))
                }
                SweepKind::Aperture => {
                    if powers.len() != self.users {
                        return Err(Error::Config(format!(
                            "powers: {} entries for {} users",
                            powers.len(),
                            self.users
                        )));
                    }
                    if !powers.iter().all(|p| positive(*p)) {
                        return Err(Error::Config("powers: must all be positive".into()));
                    }
                }
            }
        }
        if let Some(values) = &self.sweep_values {
            validate_sweep_values(kind, values)?;
        }
        Ok(())
    }
}

fn validate_sweep_values(kind: SweepKind, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config("sweep_values: must not be empty".into()));
    }
    for &v in values {
        if !positive(v) {
            return Err(Error::Config(format!(
                "sweep_values: entries must be positive, got {v}"
            )));
        }
        if kind == SweepKind::Users && (v.fract() != 0.0 || v < 1.0) {
            return Err(Error::Config(format!(
                "sweep_values: user counts must be positive integers, got {v}"
            )));
        }
    }
    Ok(())
}

/// One aggregated output row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep: SweepKind,
    pub value: f64,
    pub array: ArrayKind,
    pub scheme: Scheme,
    pub mean_sum_rate: f64,
    pub mean_sum_mse: f64,
    pub mean_per_user_rate: f64,
    /// Mean over users and trials of the effective channel gain
    /// `a_k (1 - alpha_k)`.
    pub mean_eff_gain: f64,
    pub trials: usize,
    pub seed: u64,
}

struct SweepPoint {
    aperture: Aperture,
    users: usize,
    powers: Vec<f64>,
    spda: Option<SpdaArray>,
}

fn sweep_point(cfg: &ExperimentConfig, kind: SweepKind, value: f64) -> Result<SweepPoint> {
    let (aperture_area, users, shared_power) = match kind {
        SweepKind::Power => (cfg.aperture_area, cfg.users, value),
        SweepKind::Users => (cfg.aperture_area, value as usize, cfg.power),
        SweepKind::Aperture => (value, cfg.users, cfg.power),
    };
    let aperture = Aperture::square_with_area(aperture_area)?;
    let powers = match (&cfg.powers, kind) {
        (Some(list), SweepKind::Aperture) => list.clone(),
        _ => vec![shared_power; users],
    };
    let wave = cfg.wave()?;
    let spda = if cfg.arrays.contains(&ArrayKind::Spda) {
        Some(discretize(
            &aperture,
            cfg.spda_spacing_over_wavelength * wave.wavelength(),
            wave.isotropic_aperture_area(),
        )?)
    } else {
        None
    };
    Ok(SweepPoint {
        aperture,
        users,
        powers,
        spda,
    })
}

struct ComboMetrics {
    sum_rate: f64,
    sum_mse: f64,
    eff_gain_mean: f64,
}

/// Run one full sweep: for every value, `trials` seeded channel draws per
/// array and scheme, reduced to per-combination means. Rows come back
/// sorted by `(value, array, scheme)`.
pub fn run_sweep(cfg: &ExperimentConfig, kind: SweepKind) -> Result<Vec<ResultRow>> {
    cfg.validate(kind)?;
    let values = match &cfg.sweep_values {
        Some(v) => {
            validate_sweep_values(kind, v)?;
            v.clone()
        }
        None => cfg.default_sweep_values(kind),
    };
    let wave = cfg.wave()?;
    let region = cfg.region()?;
    let combos: Vec<(ArrayKind, Scheme)> = cfg
        .arrays
        .iter()
        .flat_map(|a| cfg.schemes.iter().map(move |s| (*a, *s)))
        .collect();

    let mut rows = Vec::with_capacity(values.len() * combos.len());
    for &value in &values {
        let point = sweep_point(cfg, kind, value)?;
        let grid = tensor_grid(&point.aperture, cfg.quad_order, cfg.quad_order)?;
        let user_area = cfg
            .user_aperture_area
            .unwrap_or_else(|| wave.isotropic_aperture_area());

        let trial_results: Vec<Vec<ComboMetrics>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<Vec<ComboMetrics>> {
                let positions = sample_user_positions(cfg.seed, trial as u64, point.users, &region);
                let layout = UserLayout::new(
                    positions,
                    vec![user_area; point.users],
                    point.powers.clone(),
                    cfg.noise_variance,
                )?;
                let profile = PowerProfile::from_layout(&layout)?;
                let mut capa_r: Option<CorrelationMatrix> = None;
                let mut spda_r: Option<CorrelationMatrix> = None;
                let mut out = Vec::with_capacity(combos.len());
                for (array, scheme) in &combos {
                    let r = match array {
                        ArrayKind::Capa => {
                            if capa_r.is_none() {
                                let h = ChannelMatrix::sample(&layout, &wave, &grid)?;
                                capa_r = Some(CorrelationMatrix::from_channel(&h)?);
                            }
                            capa_r.as_ref().expect("filled above")
                        }
                        ArrayKind::Spda => {
                            if spda_r.is_none() {
                                let arr = point.spda.as_ref().expect("spda array prepared");
                                let ch = spda_channels(&layout, &wave, arr)?;
                                spda_r = Some(ch.correlation().clone());
                            }
                            spda_r.as_ref().expect("filled above")
                        }
                    };
                    let rep = report(*scheme, r, &profile)?;
                    let eff_gain_mean = rep.effective_gain.iter().sum::<f64>() / point.users as f64;
                    out.push(ComboMetrics {
                        sum_rate: rep.sum_rate,
                        sum_mse: rep.sum_mse,
                        eff_gain_mean,
                    });
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;

        // reduce in trial order so thread scheduling cannot move rounding
        for (ci, (array, scheme)) in combos.iter().enumerate() {
            let mut sum_rate = 0.0;
            let mut sum_mse = 0.0;
            let mut eff = 0.0;
            for tr in &trial_results {
                sum_rate += tr[ci].sum_rate;
                sum_mse += tr[ci].sum_mse;
                eff += tr[ci].eff_gain_mean;
            }
            let n = cfg.trials as f64;
            rows.push(ResultRow {
                sweep: kind,
                value,
                array: *array,
                scheme: *scheme,
                mean_sum_rate: sum_rate / n,
                mean_sum_mse: sum_mse / n,
                mean_per_user_rate: sum_rate / n / point.users as f64,
                mean_eff_gain: eff / n,
                trials: cfg.trials,
                seed: cfg.seed,
            });
        }
    }

    rows.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.array.as_str().cmp(b.array.as_str()))
            .then_with(|| a.scheme.as_str().cmp(b.scheme.as_str()))
    });
    Ok(rows)
}

/// CSV header shared by every sweep.
pub const CSV_HEADER: &str =
    "sweep,value,array,scheme,mean_sum_rate,mean_sum_mse,mean_per_user_rate,mean_eff_gain,trials,seed";

fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write rows as CSV: UTF-8, '.' decimal separator, 12 significant digits.
pub fn emit_csv<W: Write>(rows: &[ResultRow], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.sweep,
            fmt_sig(r.value),
            r.array,
            r.scheme,
            fmt_sig(r.mean_sum_rate),
            fmt_sig(r.mean_sum_mse),
            fmt_sig(r.mean_per_user_rate),
            fmt_sig(r.mean_eff_gain),
            r.trials,
            r.seed
        )?;
    }
    Ok(())
}

/// CSV as an owned string (used for determinism checks and stdout).
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}
