//! Receive aperture geometry, wave parameters, user placement, and the
//! free-space line-of-sight channel model.
//!
//! The receive surface is a planar rectangle in the x-y plane centered at
//! the origin. Each user is a point source; its spatial response at a point
//! `r` on the aperture is
//!
//! ```text
//! g(r, s) = (-j k0 eta / (4 pi ||r - s||)) * exp(-j k0 ||r - s||)
//! ```
//!
//! and the effective channel scales this by the square root of the user's
//! aperture area. All types are immutable after construction and all
//! functions are pure, so channel evaluation can be shared freely across
//! parallel Monte Carlo trials.
//!
//! # Example
//!
//! ```
//! use capa::geometry::{spatial_response, WaveParams};
//! use nalgebra::Vector3;
//!
//! let wave = WaveParams::new(2.4e9).unwrap();
//! let g = spatial_response(&Vector3::zeros(), &Vector3::new(0.0, 0.0, 15.0), &wave).unwrap();
//! let expected_mag = wave.wavenumber() * wave.impedance() / (4.0 * std::f64::consts::PI * 15.0);
//! assert!((g.norm() - expected_mag).abs() < 1e-9 * expected_mag);
//! ```

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{positive, C64};

/// Exact SI speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wave impedance `120*pi`, Ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 120.0 * PI;

/// Planar rectangular receive aperture in the x-y plane, centered at the
/// origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    lx: f64,
    ly: f64,
}

impl Aperture {
    pub fn new(lx: f64, ly: f64) -> Result<Self> {
        if !(positive(lx) && positive(ly)) {
            return Err(Error::InvalidParameter(format!(
                "aperture side lengths must be positive, got {lx} x {ly}"
            )));
        }
        Ok(Self { lx, ly })
    }

    /// Square aperture with the given area in m².
    pub fn square_with_area(area: f64) -> Result<Self> {
        if !positive(area) {
            return Err(Error::InvalidParameter(format!(
                "aperture area must be positive, got {area}"
            )));
        }
        let side = area.sqrt();
        Self::new(side, side)
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
}

/// Carrier frequency and the derived wave quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    frequency: f64,
    speed_of_light: f64,
    impedance: f64,
}

impl WaveParams {
    /// Wave parameters with the exact SI speed of light and `120*pi` Ohm
    /// impedance.
    pub fn new(frequency: f64) -> Result<Self> {
        Self::with_constants(frequency, SPEED_OF_LIGHT, FREE_SPACE_IMPEDANCE)
    }

    pub fn with_constants(frequency: f64, speed_of_light: f64, impedance: f64) -> Result<Self> {
        for (name, v) in [
            ("frequency", frequency),
            ("speed_of_light", speed_of_light),
            ("impedance", impedance),
        ] {
            if !positive(v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            frequency,
            speed_of_light,
            impedance,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    pub fn impedance(&self) -> f64 {
        self.impedance
    }

    pub fn wavelength(&self) -> f64 {
        self.speed_of_light / self.frequency
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    /// Effective aperture area of an isotropic antenna, `lambda^2 / (4*pi)`.
    pub fn isotropic_aperture_area(&self) -> f64 {
        let lambda = self.wavelength();
        lambda * lambda / (4.0 * PI)
    }
}

/// Axis-aligned box that users are drawn from: `|x| <= half_x`,
/// `|y| <= half_y`, `z_min <= z <= z_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRegion {
    half_x: f64,
    half_y: f64,
    z_min: f64,
    z_max: f64,
}

impl UserRegion {
    pub fn new(half_x: f64, half_y: f64, z_min: f64, z_max: f64) -> Result<Self> {
        if !(positive(half_x) && positive(half_y)) {
            return Err(Error::Config(format!(
                "region half-extents must be positive, got {half_x} x {half_y}"
            )));
        }
        if !(positive(z_min) && z_min <= z_max && z_max.is_finite()) {
            return Err(Error::Config(format!(
                "region depth must satisfy 0 < z_min <= z_max, got [{z_min}, {z_max}]"
            )));
        }
        Ok(Self {
            half_x,
            half_y,
            z_min,
            z_max,
        })
    }

    pub fn half_x(&self) -> f64 {
        self.half_x
    }

    pub fn half_y(&self) -> f64 {
        self.half_y
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        p.x.abs() <= self.half_x
            && p.y.abs() <= self.half_y
            && p.z >= self.z_min
            && p.z <= self.z_max
    }
}

/// The K users of one channel realization: positions, per-user aperture
/// areas, transmit powers, and the receiver noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct UserLayout {
    positions: Vec<Vector3<f64>>,
    aperture_areas: Vec<f64>,
    powers: Vec<f64>,
    noise_variance: f64,
}

impl UserLayout {
    pub fn new(
        positions: Vec<Vector3<f64>>,
        aperture_areas: Vec<f64>,
        powers: Vec<f64>,
        noise_variance: f64,
    ) -> Result<Self> {
        let k = positions.len();
        if k == 0 {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        if aperture_areas.len() != k || powers.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} positions but {} aperture areas and {} powers",
                k,
                aperture_areas.len(),
                powers.len()
            )));
        }
        if !aperture_areas.iter().all(|a| positive(*a)) {
            return Err(Error::InvalidParameter(
                "user aperture areas must be positive".into(),
            ));
        }
        if !powers.iter().all(|p| positive(*p)) {
            return Err(Error::InvalidParameter(
                "transmit powers must be positive".into(),
            ));
        }
        if !positive(noise_variance) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if positions[i] == positions[j] {
                    return Err(Error::InvalidParameter(format!(
                        "users {i} and {j} share the same position"
                    )));
                }
            }
        }
        Ok(Self {
            positions,
            aperture_areas,
            powers,
            noise_variance,
        })
    }

    /// Layout with one shared aperture area and transmit power for all users.
    pub fn uniform(
        positions: Vec<Vector3<f64>>,
        aperture_area: f64,
        power: f64,
        noise_variance: f64,
    ) -> Result<Self> {
        let k = positions.len();
        Self::new(
            positions,
            vec![aperture_area; k],
            vec![power; k],
            noise_variance,
        )
    }

    pub fn num_users(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, k: usize) -> &Vector3<f64> {
        &self.positions[k]
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn aperture_area(&self, k: usize) -> f64 {
        self.aperture_areas[k]
    }

    pub fn power(&self, k: usize) -> f64 {
        self.powers[k]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Per-user power-to-noise ratios `P_k / sigma^2`.
    pub fn power_ratios(&self) -> Vec<f64> {
        self.powers
            .iter()
            .map(|p| p / self.noise_variance)
            .collect()
    }
}

/// Free-space line-of-sight spatial response between a source at `s` and an
/// aperture point `r`.
pub fn spatial_response(r: &Vector3<f64>, s: &Vector3<f64>, wave: &WaveParams) -> Result<C64> {
    let dist = (r - s).norm();
    if dist == 0.0 {
        return Err(Error::Singularity(
            "spatial response evaluated at the source point".into(),
        ));
    }
    let k0 = wave.wavenumber();
    let mag = k0 * wave.impedance() / (4.0 * PI * dist);
    // -j * exp(-j k0 d) = exp(-j (k0 d + pi/2))
    let phase = -(k0 * dist + PI / 2.0);
    Ok(C64::from_polar(mag, phase))
}

/// Effective channel of user `k` at aperture point `r`:
/// `h_k(r) = g(r, s_k) * sqrt(|A_k|)`.
pub fn effective_channel(
    r: &Vector3<f64>,
    k: usize,
    layout: &UserLayout,
    wave: &WaveParams,
) -> Result<C64> {
    if k >= layout.num_users() {
        return Err(Error::InvalidParameter(format!(
            "user index {k} out of range for {} users",
            layout.num_users()
        )));
    }
    let g = spatial_response(r, layout.position(k), wave)?;
    Ok(g * layout.aperture_area(k).sqrt())
}

/// Draw `k` user positions uniformly from `region`.
///
/// The draw is a pure function of `(seed, trial_index)`: trial streams are
/// independent ChaCha8 streams of the same seed, so increasing the trial
/// count never reshuffles earlier trials.
pub fn sample_user_positions(
    seed: u64,
    trial_index: u64,
    k: usize,
    region: &UserRegion,
) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let x = rng.random_range(-region.half_x..=region.half_x);
        let y = rng.random_range(-region.half_y..=region.half_y);
        let z = if region.z_min == region.z_max {
            region.z_min
        } else {
            rng.random_range(region.z_min..=region.z_max)
        };
        out.push(Vector3::new(x, y, z));
    }
    out
}
