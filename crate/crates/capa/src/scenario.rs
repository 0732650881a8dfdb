//! The reference simulation setup used by the examples, the CLI defaults,
//! and the acceptance experiments: a 0.25 m² square receive surface at
//! 2.4 GHz serving 8 users drawn from a 10 m x 10 m x [15, 30] m box, each
//! transmitting 40e-3 power units into noise of variance 5.6e-3, with
//! isotropic-antenna user apertures.

use crate::beamforming::PowerProfile;
use crate::error::Result;
use crate::geometry::{sample_user_positions, Aperture, UserLayout, UserRegion, WaveParams};
use crate::quadrature::{tensor_grid, ChannelMatrix, CorrelationMatrix, QuadratureGrid};

/// A complete, immutable description of one simulation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub aperture: Aperture,
    pub wave: WaveParams,
    pub region: UserRegion,
    pub users: usize,
    /// Per-user transmit power (shared by all users).
    pub power: f64,
    pub noise_variance: f64,
    /// Per-user aperture area; `None` means the isotropic value
    /// `lambda^2 / (4 pi)`.
    pub user_aperture_area: Option<f64>,
    pub quad_order: usize,
    /// Element spacing of the discrete baseline array, in wavelengths.
    pub spda_spacing_over_wavelength: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            aperture: Aperture::square_with_area(0.25).expect("positive area"),
            wave: WaveParams::new(2.4e9).expect("positive frequency"),
            region: UserRegion::new(5.0, 5.0, 15.0, 30.0).expect("valid region"),
            users: 8,
            power: 40e-3,
            noise_variance: 5.6e-3,
            user_aperture_area: None,
            quad_order: 30,
            spda_spacing_over_wavelength: 0.5,
        }
    }
}

impl Scenario {
    pub fn user_aperture_area(&self) -> f64 {
        self.user_aperture_area
            .unwrap_or_else(|| self.wave.isotropic_aperture_area())
    }

    /// Per-user power-to-noise ratio `P / sigma^2`.
    pub fn power_ratio(&self) -> f64 {
        self.power / self.noise_variance
    }

    pub fn power_profile(&self) -> Result<PowerProfile> {
        PowerProfile::uniform(self.power_ratio(), self.users)
    }

    pub fn grid(&self) -> Result<QuadratureGrid> {
        tensor_grid(&self.aperture, self.quad_order, self.quad_order)
    }

    /// User layout for Monte Carlo trial `trial` of stream `seed`.
    pub fn layout_for_trial(&self, seed: u64, trial: u64) -> Result<UserLayout> {
        let positions = sample_user_positions(seed, trial, self.users, &self.region);
        UserLayout::uniform(
            positions,
            self.user_aperture_area(),
            self.power,
            self.noise_variance,
        )
    }

    /// Sampled channels and their correlation matrix for one trial.
    pub fn channel_for_trial(
        &self,
        seed: u64,
        trial: u64,
        grid: &QuadratureGrid,
    ) -> Result<(UserLayout, ChannelMatrix, CorrelationMatrix)> {
        let layout = self.layout_for_trial(seed, trial)?;
        let h = ChannelMatrix::sample(&layout, &self.wave, grid)?;
        let r = CorrelationMatrix::from_channel(&h)?;
        Ok((layout, h, r))
    }
}
