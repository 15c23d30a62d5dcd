//! Truncated plane-wave eigenbasis of the free particle in a periodic
//! super-cell of length L.
//!
//! States are `phi_n(x) = exp(-i q_n x)/sqrt(L)` with `q_n = 2 pi n / L` and
//! `E_n = hbar^2 q_n^2 / 2m`, for `n` in `-M..=M`. The position matrix is never
//! stored; its elements have a closed form.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{require_positive, MsdError, Result};
use crate::units::{PhysicalSystem, HBAR};

/// Default upper bound on the Boltzmann weight of the outermost basis state.
pub const DEFAULT_EDGE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct EigenBasis {
    /// `-M..=M`
    pub indices: Vec<i64>,
    /// 1/m
    pub q: Vec<f64>,
    /// J
    pub energies: Vec<f64>,
    /// exp(-beta E_n)
    pub weights: Vec<f64>,
    /// Super-cell length, m.
    pub l: f64,
    pub mass: f64,
    pub beta: f64,
    /// Set when the edge weight exceeds the requested cutoff.
    pub edge_warning: Option<String>,
}

impl EigenBasis {
    /// Basis size K = 2M + 1.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest index M.
    pub fn max_index(&self) -> i64 {
        *self.indices.last().unwrap_or(&0)
    }

    /// Weight of the outermost state, `w_M`.
    pub fn edge_weight(&self) -> f64 {
        *self.weights.last().unwrap_or(&1.0)
    }

    /// Energy quantum `hbar^2 (2 pi / L)^2 / 2m`; `E_n = epsilon n^2`.
    pub fn energy_quantum(&self) -> f64 {
        let dq = 2.0 * PI / self.l;
        HBAR * HBAR * dq * dq / (2.0 * self.mass)
    }

    /// `|x_nj|^2` for `|n - j| = d > 0`: `(L / 2 pi d)^2`.
    #[inline]
    pub fn x_sq_at_gap(&self, d: usize) -> f64 {
        let s = self.l / (2.0 * PI * d as f64);
        s * s
    }
}

/// Builds the symmetric basis with `K = funcs_per_cell * N` rounded up to odd.
pub fn build_basis(sys: &PhysicalSystem, funcs_per_cell: usize) -> Result<EigenBasis> {
    build_basis_with_cutoff(sys, funcs_per_cell, DEFAULT_EDGE_CUTOFF)
}

pub fn build_basis_with_cutoff(
    sys: &PhysicalSystem,
    funcs_per_cell: usize,
    edge_cutoff: f64,
) -> Result<EigenBasis> {
    sys.validate()?;
    if funcs_per_cell == 0 {
        return Err(MsdError::invalid("funcs_per_cell", "must be at least 1"));
    }
    require_positive("edge_cutoff", edge_cutoff)?;
    let requested = funcs_per_cell * sys.n_cells;
    let k = if requested.is_multiple_of(2) {
        requested + 1
    } else {
        requested
    };
    let m = (k / 2) as i64;
    build_basis_with_max_index(sys, m, edge_cutoff)
}

/// Builds the basis `n = -max_index..=max_index` directly.
pub fn build_basis_with_max_index(
    sys: &PhysicalSystem,
    max_index: i64,
    edge_cutoff: f64,
) -> Result<EigenBasis> {
    sys.validate()?;
    if max_index < 0 {
        return Err(MsdError::invalid("max_index", "must be nonnegative"));
    }
    let l = sys.cell_length();
    let beta = sys.beta();
    let indices: Vec<i64> = (-max_index..=max_index).collect();
    let q: Vec<f64> = indices.iter().map(|&n| 2.0 * PI * n as f64 / l).collect();
    let energies: Vec<f64> = q
        .iter()
        .map(|&qn| HBAR * HBAR * qn * qn / (2.0 * sys.mass))
        .collect();
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * e).exp()).collect();
    let mut basis = EigenBasis {
        indices,
        q,
        energies,
        weights,
        l,
        mass: sys.mass,
        beta,
        edge_warning: None,
    };
    let edge = basis.edge_weight();
    if edge > edge_cutoff {
        let msg = format!(
            "basis truncation: edge weight w_M = {edge:.3e} exceeds cutoff {edge_cutoff:.1e} (K = {})",
            basis.len()
        );
        log::warn!("{msg}");
        basis.edge_warning = Some(msg);
    }
    Ok(basis)
}

/// Position matrix element `<phi_n|x|phi_j>` for the plane-wave basis:
/// `i (-1)^(n-j+1) / (q_n - q_j)` off the diagonal, zero on it.
pub fn x_element(n: i64, j: i64, l: f64) -> Complex64 {
    if n == j {
        return Complex64::new(0.0, 0.0);
    }
    let d = n - j;
    let sign = if (d + 1).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    Complex64::new(0.0, sign * l / (2.0 * PI * d as f64))
}

/// `X(q) = L (2 sin(Lq/2) / (Lq)^2 - cos(Lq/2) / (Lq))`, the analytic
/// continuation of `|x_nj|` off the lattice of momentum gaps. At
/// `q = q_n - q_j` it satisfies `X^2 = 1/(q_n - q_j)^2`.
pub fn x_element_general(q: f64, l: f64) -> f64 {
    let z = 0.5 * l * q;
    // X = (L / 2 z^2) (sin z - z cos z)
    if z.abs() < 0.5 {
        // sin z - z cos z = sum_{k>=1} (-1)^(k+1) 2k z^(2k+1) / (2k+1)!
        let z2 = z * z;
        // accumulated already divided by z^2
        let mut term = z / 3.0;
        let mut sum = term;
        for k in 2..12u32 {
            let kf = f64::from(k);
            // ratio of consecutive terms: -z^2 * (2k / (2k-2)) / ((2k)(2k+1))
            term *= -z2 / ((2.0 * kf - 2.0) * (2.0 * kf + 1.0));
            sum += term;
        }
        0.5 * l * sum
    } else {
        0.5 * l * (z.sin() - z * z.cos()) / (z * z)
    }
}

/// Canonical partition function, summed from the smallest weights upwards.
pub fn partition_function(basis: &EigenBasis) -> f64 {
    let k = basis.len();
    let mid = k / 2;
    let mut q = 0.0;
    for off in (1..=mid).rev() {
        q += basis.weights[mid + off] + basis.weights[mid - off];
    }
    q + basis.weights[mid]
}
