//! Spatially discrete baseline array: the aperture discretized into a
//! lattice of point elements, with its matched beamformers and SINRs.
//!
//! The discrete array reuses the entire algebraic engine of the continuous
//! one: stacking the sampled channels into `Hhat` (M x K) gives the Gram
//! matrix `Rhat = Hhat^H Hhat`, and feeding `Rhat` through the beamforming
//! and metrics modules yields the discrete weights `W = Hhat * A` and
//! SINRs with no duplicated formula paths.

use nalgebra::Vector3;

use crate::beamforming::{
    mmse_weights, mrc_weights, zf_weights, PowerProfile, Scheme, WeightMatrix,
};
use crate::error::{Error, Result};
use crate::geometry::{spatial_response, Aperture, UserLayout, WaveParams};
use crate::linalg::{hermitize, positive, CMat};
use crate::metrics::sinr_closed_form;
use crate::quadrature::CorrelationMatrix;

/// Lattice of discrete antenna elements covering the aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdaArray {
    spacing: f64,
    element_area: f64,
    nx: usize,
    ny: usize,
    centers: Vec<Vector3<f64>>,
}

impl SpdaArray {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn element_area(&self) -> f64 {
        self.element_area
    }

    pub fn num_elements(&self) -> usize {
        self.centers.len()
    }

    pub fn counts(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn center(&self, m: usize) -> &Vector3<f64> {
        &self.centers[m]
    }

    pub fn centers(&self) -> &[Vector3<f64>] {
        &self.centers
    }
}

/// Discretize the aperture into `ceil(Lx/d) x ceil(Ly/d)` elements with
/// centers `((mx-1) d - Lx/2, (my-1) d - Ly/2, 0)`.
pub fn discretize(aperture: &Aperture, spacing: f64, element_area: f64) -> Result<SpdaArray> {
    if !positive(spacing) {
        return Err(Error::InvalidParameter(format!(
            "element spacing must be positive, got {spacing}"
        )));
    }
    if spacing > aperture.lx().min(aperture.ly()) {
        return Err(Error::InvalidParameter(format!(
            "element spacing {spacing} exceeds the aperture side {}",
            aperture.lx().min(aperture.ly())
        )));
    }
    if !positive(element_area) {
        return Err(Error::InvalidParameter(format!(
            "element area must be positive, got {element_area}"
        )));
    }
    let nx = (aperture.lx() / spacing).ceil() as usize;
    let ny = (aperture.ly() / spacing).ceil() as usize;
    let mut centers = Vec::with_capacity(nx * ny);
    for mx in 1..=nx {
        for my in 1..=ny {
            centers.push(Vector3::new(
                (mx - 1) as f64 * spacing - aperture.lx() / 2.0,
                (my - 1) as f64 * spacing - aperture.ly() / 2.0,
                0.0,
            ));
        }
    }
    Ok(SpdaArray {
        spacing,
        element_area,
        nx,
        ny,
        centers,
    })
}

/// Half-wavelength lattice with isotropic-antenna element areas, the
/// conventional baseline configuration.
pub fn half_wavelength_array(aperture: &Aperture, wave: &WaveParams) -> Result<SpdaArray> {
    discretize(
        aperture,
        wave.wavelength() / 2.0,
        wave.isotropic_aperture_area(),
    )
}

/// Stacked discrete channel matrix `Hhat` (M x K, column `k` is
/// `sqrt(|S|) * [h_k(r_1), ..., h_k(r_M)]`) and its Gram matrix `Rhat`.
#[derive(Debug, Clone)]
pub struct SpdaChannel {
    hhat: CMat,
    rhat: CorrelationMatrix,
}

impl SpdaChannel {
    pub fn matrix(&self) -> &CMat {
        &self.hhat
    }

    pub fn correlation(&self) -> &CorrelationMatrix {
        &self.rhat
    }

    pub fn num_elements(&self) -> usize {
        self.hhat.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.hhat.ncols()
    }

    /// `||hhat_k||^2`, the discrete channel gain of user `k`.
    pub fn gain(&self, k: usize) -> f64 {
        self.rhat.gain(k)
    }
}

/// Sample every user's effective channel at the element centers.
pub fn spda_channels(
    layout: &UserLayout,
    wave: &WaveParams,
    array: &SpdaArray,
) -> Result<SpdaChannel> {
    let m = array.num_elements();
    let k = layout.num_users();
    let scale = array.element_area().sqrt();
    let mut hhat = CMat::zeros(m, k);
    for ku in 0..k {
        let area = layout.aperture_area(ku).sqrt();
        for mm in 0..m {
            let g = spatial_response(array.center(mm), layout.position(ku), wave)?;
            hhat[(mm, ku)] = g * area * scale;
        }
    }
    let mut gram = hhat.adjoint() * &hhat;
    hermitize(&mut gram);
    let rhat = CorrelationMatrix::from_matrix(gram)?;
    Ok(SpdaChannel { hhat, rhat })
}

/// Scheme weights for the discrete array, expressed (like the continuous
/// case) as a K x K coefficient matrix over the stacked channels, plus the
/// per-user SINRs. The full M x K beamformer is `Hhat * A`.
pub fn spda_weights(
    scheme: Scheme,
    channel: &SpdaChannel,
    p: &PowerProfile,
) -> Result<(WeightMatrix, Vec<f64>)> {
    let rhat = channel.correlation();
    let weights = match scheme {
        Scheme::Mrc => mrc_weights(rhat.dim()),
        Scheme::Zf => zf_weights(rhat)?,
        Scheme::Mmse => mmse_weights(rhat, p)?,
    };
    let sinrs = (0..rhat.dim())
        .map(|k| sinr_closed_form(scheme, rhat, p, k))
        .collect::<Result<Vec<f64>>>()?;
    Ok((weights, sinrs))
}
