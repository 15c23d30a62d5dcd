//! Ideal-gas scattering observables built on the complex squared length
//! `delta^2(t) = v_T^2 t^2 - 2 i D_q t`.
//!
//! ```text
//! G_s(x, t) = exp(-x^2 / (2 delta^2)) / sqrt(2 pi delta^2)
//! I(q, t)   = exp(-delta^2 q^2 / 4) / sqrt(2 pi)
//! S(q, w)   = exp(-(w - D_q q^2)^2 / (2 v_T^2 q^2)) / sqrt(2 pi v_T^2 q^2)
//! phi(q, t) = D_q t q^2 / 2
//! ```
//!
//! `I` is `(2 pi)^(-1/2) int G_s(x, t) exp(i q x / sqrt 2) dx` and `S` is
//! `(2 pi)^(-1) int exp(-i w t) sqrt(2 pi) I(sqrt(2) q, t) dt`; the tests
//! check both transforms numerically.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{require_nonnegative, require_positive, MsdError, Result};
use crate::ideal::complex_squared_length;
use crate::units::{derive_scales, PhysicalSystem, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringParams {
    /// Thermal velocity, m/s.
    pub v_t: f64,
    /// Quantum diffusion coefficient `hbar / 2m`, m^2/s.
    pub d_q: f64,
    /// Momentum transfer, 1/m.
    pub q: f64,
}

impl ScatteringParams {
    pub fn new(v_t: f64, d_q: f64, q: f64) -> Result<Self> {
        require_positive("v_t", v_t)?;
        require_positive("d_q", d_q)?;
        if !q.is_finite() {
            return Err(MsdError::invalid("q", format!("must be finite, got {q}")));
        }
        Ok(ScatteringParams { v_t, d_q, q })
    }

    pub fn from_system(sys: &PhysicalSystem, q: f64) -> Result<Self> {
        let s = derive_scales(sys)?;
        Self::new(s.v_t, s.d_q, q)
    }

    /// Peak position of the DSF, `D_q q^2`, in rad/s.
    pub fn recoil_frequency(&self) -> f64 {
        self.d_q * self.q * self.q
    }

    /// Recoil energy `hbar D_q q^2 = hbar^2 q^2 / 2m`, J.
    pub fn recoil_energy(&self) -> f64 {
        HBAR * self.recoil_frequency()
    }

    /// Time after which the ISF phase has advanced by `2 pi`.
    pub fn phase_period(&self) -> Result<f64> {
        if self.q == 0.0 {
            return Err(MsdError::invalid("q", "phase does not advance at q = 0"));
        }
        Ok(4.0 * PI / (self.d_q * self.q * self.q))
    }
}

/// Self part of the pair correlation function, 1/m. `t` must be positive.
pub fn pair_correlation_self(p: &ScatteringParams, x: f64, t: f64) -> Result<Complex64> {
    require_positive("t", t)?;
    let d2 = complex_squared_length(p.v_t, p.d_q, t)?.0;
    let norm = (2.0 * PI * d2).sqrt();
    Ok((-x * x / (2.0 * d2)).exp() / norm)
}

/// Dynamic structure factor, s. Rejects `q = 0`.
pub fn dsf(p: &ScatteringParams, omega: f64) -> Result<f64> {
    if p.q == 0.0 {
        return Err(MsdError::invalid(
            "q",
            "dynamic structure factor needs q != 0",
        ));
    }
    let var = p.v_t * p.v_t * p.q * p.q;
    let d = omega - p.recoil_frequency();
    Ok((-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

/// Intermediate scattering function, dimensionless.
pub fn isf(p: &ScatteringParams, t: f64) -> Result<Complex64> {
    require_nonnegative("t", t)?;
    let d2 = complex_squared_length(p.v_t, p.d_q, t)?.0;
    Ok((-d2 * p.q * p.q / 4.0).exp() / (2.0 * PI).sqrt())
}

/// Unwrapped ISF phase, rad.
pub fn isf_phase(p: &ScatteringParams, t: f64) -> Result<f64> {
    require_nonnegative("t", t)?;
    Ok(p.d_q * t * p.q * p.q / 2.0)
}

/// Inverts the phase relation: the `D_q` implied by phase `phi` at time `t`.
pub fn diffusion_from_phase(phi: f64, t: f64, q: f64) -> Result<f64> {
    require_positive("t", t)?;
    if q == 0.0 || !q.is_finite() {
        return Err(MsdError::invalid("q", "must be finite and nonzero"));
    }
    Ok(2.0 * phi / (t * q * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{msd_ideal, IdealMsdParams};
    use crate::quadrature::{integrate, integrate_real_line};
    use crate::units::joule_to_mev;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    /// Reduced units: `v_T = 1`, `D_q = 1/2`, hence `t_b = 1`.
    fn reduced(q: f64) -> ScatteringParams {
        ScatteringParams::new(1.0, 0.5, q).unwrap()
    }

    fn xenon() -> ScatteringParams {
        let sys = PhysicalSystem::from_user_units(131.0, 105.0, 256.0, 1, 1).unwrap();
        ScatteringParams::from_system(&sys, 1e10).unwrap()
    }

    fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, tol: f64) -> Complex64 {
        let re = integrate_real_line(|x| f(x).re, tol).value;
        let im = integrate_real_line(|x| f(x).im, tol).value;
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(ScatteringParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ScatteringParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ScatteringParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(pair_correlation_self(&reduced(1.0), 0.0, 0.0).is_err());
        assert!(dsf(&reduced(0.0), 0.0).is_err());
        assert!(isf(&reduced(1.0), -1.0).is_err());
        assert!(reduced(0.0).phase_period().is_err());
    }

    #[test]
    fn pair_correlation_moments() {
        let p = reduced(1.0);
        for t in [0.3, 1.0, 4.0] {
            let norm = integrate_complex(|x| pair_correlation_self(&p, x, t).unwrap(), 1e-12);
            assert!(
                (norm.re - 1.0).abs() < 1e-8 && norm.im.abs() < 1e-8,
                "t = {t}"
            );
            let second =
                integrate_complex(|x| x * x * pair_correlation_self(&p, x, t).unwrap(), 1e-12);
            let d2 = complex_squared_length(p.v_t, p.d_q, t).unwrap().0;
            assert!((second - d2).norm() / d2.norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn pair_correlation_becomes_real() {
        let p = reduced(1.0);
        let ratio = |t: f64| {
            let g = pair_correlation_self(&p, 0.0, t).unwrap();
            g.im.abs() / g.re.abs()
        };
        assert!(ratio(1.0) > 0.4);
        assert!(ratio(100.0) < 1e-2);
        assert!(ratio(1e4) < 1e-4);
        // principal root keeps G_s decaying
        assert!(pair_correlation_self(&p, 30.0, 2.0).unwrap().norm() < 1e-20);
    }

    #[test]
    fn dsf_shape() {
        let p = reduced(1.7);
        let w0 = p.recoil_frequency();
        let norm = integrate_real_line(|w| dsf(&p, w).unwrap(), 1e-13).value;
        assert!((norm - 1.0).abs() < 1e-10);
        let peak = dsf(&p, w0).unwrap();
        assert!(peak > dsf(&p, w0 + 1e-3).unwrap() && peak > dsf(&p, w0 - 1e-3).unwrap());
        // bisect for the half-maximum point above the peak
        let (mut lo, mut hi) = (w0, w0 + 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dsf(&p, mid).unwrap() > 0.5 * peak {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let fwhm = 2.0 * (lo - w0);
        let expect = 2.0 * (2.0 * 2f64.ln()).sqrt() * p.v_t * p.q.abs();
        assert!((fwhm / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xenon_recoil() {
        let p = xenon();
        let mev = joule_to_mev(p.recoil_energy());
        assert!((mev / 0.016 - 1.0).abs() < 0.03, "{mev} meV");
        // hbar^2 q^2 / 2m independently
        let m = crate::units::u_to_kg(131.0);
        let direct = HBAR * HBAR * 1e20 / (2.0 * m);
        assert!((p.recoil_energy() / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isf_values() {
        let p = reduced(2.0);
        let z = isf(&p, 0.0).unwrap();
        assert!((z.re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16 && z.im == 0.0);
        for t in [0.1, 0.7, 1.3] {
            let z = isf(&p, t).unwrap() * (2.0 * PI).sqrt();
            let amp = (-p.v_t * p.v_t * t * t * p.q * p.q / 4.0).exp();
            assert!((z.norm() / amp - 1.0).abs() < 1e-14);
            let phi = isf_phase(&p, t).unwrap();
            let wrapped = (z.arg() - phi).rem_euclid(2.0 * PI);
            assert!(wrapped.min(2.0 * PI - wrapped) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn space_transform_of_pair_correlation_is_isf() {
        for q in [0.5, 1.0, 3.0] {
            let p = reduced(q);
            for t in [0.2, 1.0, 2.5] {
                let k = q / SQRT_2;
                let ft = integrate_complex(
                    |x| {
                        pair_correlation_self(&p, x, t).unwrap() * Complex64::from_polar(1.0, k * x)
                    },
                    1e-12,
                ) / (2.0 * PI).sqrt();
                let i = isf(&p, t).unwrap();
                assert!((ft - i).norm() < 1e-6, "q = {q}, t = {t}");
            }
        }
    }

    #[test]
    fn time_transform_of_isf_is_dsf() {
        // the integrand is Gaussian in t with width 1/(v_T q); [0, 12/(v_T q)]
        // captures it to far below the tolerance
        let p = reduced(1.3);
        let wide = ScatteringParams {
            q: SQRT_2 * p.q,
            ..p
        };
        let t_max = 12.0 / (p.v_t * p.q);
        let w0 = p.recoil_frequency();
        for dw in [-2.0, -0.5, 0.0, 0.3, 1.0, 3.0] {
            let w = w0 + dw;
            let half = integrate(
                |t| {
                    let g = isf(&wide, t).unwrap() * (2.0 * PI).sqrt();
                    (Complex64::from_polar(1.0, -w * t) * g).re
                },
                0.0,
                t_max,
                1e-12,
            )
            .value;
            // the integrand over negative t is the complex conjugate
            let s = half / PI;
            assert!((s - dsf(&p, w).unwrap()).abs() < 1e-5, "w = {w}");
        }
    }

    #[test]
    fn phase_recovers_diffusion_coefficient() {
        let p = xenon();
        let period = p.phase_period().unwrap();
        assert!((isf_phase(&p, period).unwrap() - 2.0 * PI).abs() < 1e-12);
        let t = 3.7e-12;
        let phi = isf_phase(&p, t).unwrap();
        assert!((diffusion_from_phase(phi, t, p.q).unwrap() / p.d_q - 1.0).abs() < 1e-14);
        // the same D_q sets the long-time MSD slope
        let sys = PhysicalSystem::from_user_units(131.0, 105.0, 256.0, 1, 1).unwrap();
        let ip = IdealMsdParams::from_system(&sys).unwrap();
        let (t1, t2) = (1e6 * ip.t_b, 2e6 * ip.t_b);
        let slope = (msd_ideal(&ip, t2).unwrap() - msd_ideal(&ip, t1).unwrap()) / (t2 - t1);
        assert!((slope / (2.0 * p.d_q) - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn phase_is_linear_and_quadratic_in_q(q in 0.01f64..10.0, t in 0.0f64..100.0) {
            let p = reduced(q);
            let p2 = reduced(2.0 * q);
            let a = isf_phase(&p, t).unwrap();
            prop_assert!((isf_phase(&p2, t).unwrap() - 4.0 * a).abs() <= 1e-12 * a.max(1e-300));
            prop_assert!((isf_phase(&p, 2.0 * t).unwrap() - 2.0 * a).abs() <= 1e-12 * a.max(1e-300));
            prop_assert!((a - p.d_q * q * q * t / 2.0).abs() <= 1e-14 * a.max(1e-300));
        }

        #[test]
        fn isf_amplitude_is_gaussian_in_time(q in 0.1f64..5.0, t in 0.0f64..3.0) {
            let p = reduced(q);
            let log_amp = (isf(&p, t).unwrap().norm() * (2.0 * PI).sqrt()).ln();
            prop_assert!((log_amp + t * t * q * q / 4.0).abs() <= 1e-12 * (1.0 + t * t * q * q));
        }
    }
}
