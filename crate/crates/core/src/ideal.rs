//! MSD of the ideal (infinite box) thermalized free particle.
//!
//! `msd(t) = d (hbar/m) (sqrt(t^2 + t_b^2) - t_b)`: ballistic `k_B T t^2 / 2m`
//! for `t << t_b`, diffusive `2 D_q t` for `t >> t_b`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curve::{CurveParams, Method, MsdCurve};
use crate::error::{require_nonnegative, require_positive, MsdError, Result};
use crate::grid::TimeGrid;
use crate::units::{derive_scales, PhysicalSystem, HBAR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealMsdParams {
    /// kg
    pub mass: f64,
    /// s
    pub t_b: f64,
    pub dimensionality: u8,
}

impl IdealMsdParams {
    pub fn new(mass: f64, t_b: f64, dimensionality: u8) -> Result<Self> {
        require_positive("mass", mass)?;
        require_positive("t_b", t_b)?;
        if !(1..=3).contains(&dimensionality) {
            return Err(MsdError::invalid("dimensionality", "must be 1, 2 or 3"));
        }
        Ok(IdealMsdParams {
            mass,
            t_b,
            dimensionality,
        })
    }

    pub fn from_system(sys: &PhysicalSystem) -> Result<Self> {
        let s = derive_scales(sys)?;
        Self::new(sys.mass, s.t_b, sys.dimensionality)
    }
}

/// Ideal-particle MSD in m^2 at time `t` (s).
pub fn msd_ideal(p: &IdealMsdParams, t: f64) -> Result<f64> {
    require_nonnegative("t", t)?;
    Ok(msd_ideal_unchecked(p.mass, p.t_b, p.dimensionality, t))
}

/// sqrt(t^2 + t_b^2) - t_b written as t^2 / (sqrt(t^2 + t_b^2) + t_b), which
/// keeps full precision for t << t_b.
#[inline]
pub(crate) fn sqrt_excess(t: f64, t_b: f64) -> f64 {
    let t2 = t * t;
    t2 / (t.hypot(t_b) + t_b)
}

#[inline]
pub(crate) fn msd_ideal_unchecked(mass: f64, t_b: f64, dim: u8, t: f64) -> f64 {
    f64::from(dim) * (HBAR / mass) * sqrt_excess(t, t_b)
}

pub fn msd_ideal_curve(p: &IdealMsdParams, grid: &TimeGrid) -> MsdCurve {
    let values = grid
        .times()
        .par_iter()
        .map(|&t| msd_ideal_unchecked(p.mass, p.t_b, p.dimensionality, t))
        .collect();
    MsdCurve {
        times: grid.times().to_vec(),
        values,
        method: Method::IdealAnalytic,
        params: CurveParams::default(),
    }
}

/// Complex squared length `v_T^2 t^2 - 2 i D_q t` of the ideal-gas pair
/// correlation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSquaredLength(pub Complex64);

impl ComplexSquaredLength {
    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

pub fn complex_squared_length(v_t: f64, d_q: f64, t: f64) -> Result<ComplexSquaredLength> {
    require_nonnegative("t", t)?;
    Ok(ComplexSquaredLength(Complex64::new(
        v_t * v_t * t * t,
        -2.0 * d_q * t,
    )))
}
