//! Physical constants, boundary unit conversions and characteristic scales.
//!
//! Everything inside the crate is SI double precision. User-facing
//! constructors take atomic mass units, kelvin, picometres and femtoseconds
//! and convert once.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{require_positive, MsdError, Result};

/// Boltzmann constant, J/K (exact since the 2019 SI redefinition).
pub const K_B: f64 = 1.380649e-23;
/// Planck constant, J s (exact).
pub const H: f64 = 6.62607015e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = H / (2.0 * PI);
/// Unified atomic mass unit, kg (CODATA 2018).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Elementary charge, C (exact). Only used for meV output.
pub const E_CHARGE: f64 = 1.602176634e-19;

/// Compiled-in constant set, bundled for code that wants to pass them around.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub k_b: f64,
    pub h: f64,
    pub hbar: f64,
    pub amu: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    k_b: K_B,
    h: H,
    hbar: HBAR,
    amu: AMU,
};

pub fn u_to_kg(u: f64) -> f64 {
    u * AMU
}

pub fn kg_to_u(kg: f64) -> f64 {
    kg / AMU
}

pub fn pm_to_m(pm: f64) -> f64 {
    pm * 1e-12
}

pub fn m_to_pm(m: f64) -> f64 {
    m * 1e12
}

pub fn fs_to_s(fs: f64) -> f64 {
    fs * 1e-15
}

pub fn s_to_fs(s: f64) -> f64 {
    s * 1e15
}

pub fn joule_to_mev(e: f64) -> f64 {
    e / E_CHARGE * 1e3
}

/// A particle of given mass at temperature `temperature`, moving in a
/// periodic super-cell of `n_cells` lattice cells of length `lattice_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    /// kg
    pub mass: f64,
    /// K
    pub temperature: f64,
    /// m
    pub lattice_a: f64,
    pub n_cells: usize,
    pub dimensionality: u8,
}

impl PhysicalSystem {
    /// Builds a validated system from SI values.
    pub fn new(
        mass: f64,
        temperature: f64,
        lattice_a: f64,
        n_cells: usize,
        dimensionality: u8,
    ) -> Result<Self> {
        let sys = PhysicalSystem {
            mass,
            temperature,
            lattice_a,
            n_cells,
            dimensionality,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Builds a system from mass in u, temperature in K and lattice constant in pm.
    pub fn from_user_units(
        mass_u: f64,
        temperature_k: f64,
        lattice_pm: f64,
        n_cells: usize,
        dimensionality: u8,
    ) -> Result<Self> {
        Self::new(
            u_to_kg(mass_u),
            temperature_k,
            pm_to_m(lattice_pm),
            n_cells,
            dimensionality,
        )
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("mass", self.mass)?;
        require_positive("temperature", self.temperature)?;
        require_positive("lattice_a", self.lattice_a)?;
        if self.n_cells == 0 {
            return Err(MsdError::invalid("n_cells", "must be at least 1"));
        }
        if !(1..=3).contains(&self.dimensionality) {
            return Err(MsdError::invalid(
                "dimensionality",
                format!("must be 1, 2 or 3, got {}", self.dimensionality),
            ));
        }
        Ok(())
    }

    /// Super-cell length L = N a.
    pub fn cell_length(&self) -> f64 {
        self.n_cells as f64 * self.lattice_a
    }

    pub fn beta(&self) -> f64 {
        1.0 / (K_B * self.temperature)
    }

    /// Same particle and temperature, different super-cell size.
    pub fn with_cells(&self, n_cells: usize) -> Self {
        PhysicalSystem { n_cells, ..*self }
    }
}

/// Time, length and velocity scales derived from a [`PhysicalSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicScales {
    /// 1/J
    pub beta: f64,
    /// Thermal time hbar beta, s.
    pub t_b: f64,
    /// Collision time L sqrt(m beta), s.
    pub t_c: f64,
    /// Thermal velocity 1/sqrt(beta m), m/s.
    pub v_t: f64,
    /// Thermal de Broglie wavelength sqrt(hbar^2 beta / (2 pi m)), m.
    pub lambda_t: f64,
    /// hbar / 2m, m^2/s.
    pub d_q: f64,
    /// Continuum estimate of the partition function, L / (2 pi lambda_T).
    pub q_approx: f64,
}

pub fn derive_scales(sys: &PhysicalSystem) -> Result<CharacteristicScales> {
    sys.validate()?;
    let beta = sys.beta();
    let m = sys.mass;
    let l = sys.cell_length();
    Ok(CharacteristicScales {
        beta,
        t_b: HBAR * beta,
        t_c: l * (m * beta).sqrt(),
        v_t: 1.0 / (beta * m).sqrt(),
        lambda_t: (HBAR * HBAR * beta / (2.0 * PI * m)).sqrt(),
        d_q: HBAR / (2.0 * m),
        q_approx: l * (m / (2.0 * PI * beta * HBAR * HBAR)).sqrt(),
    })
}
