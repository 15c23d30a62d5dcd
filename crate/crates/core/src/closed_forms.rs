//! Analytic special functions and closed formulas: `erf`, `J(y)`, `I(a, b)`,
//! the closed decohered plateau and the velocity-averaged collision model.

use std::f64::consts::PI;

use crate::error::{require_nonnegative, require_positive, Result};
use crate::ideal::sqrt_excess;
use crate::units::{derive_scales, CharacteristicScales, PhysicalSystem, HBAR};

/// `J(0) = sqrt(2) pi / 12`.
pub const J_AT_ZERO: f64 = std::f64::consts::SQRT_2 * PI / 12.0;

/// Error function, `2/sqrt(pi) int_0^x exp(-y^2) dy`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, accurate for large `x`.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

// Below z = 1/(2y) = SERIES_Z the two halves of J cancel to leading order and
// the power series in z is used instead.
const SERIES_Z: f64 = 0.25;

/// ```text
/// J(y) = (sqrt(2) pi / 12) erf(1/sqrt(2y))
///      + (2 sqrt(pi)/3) sqrt(y) ((1 - e^{-1/2y}) y - (3 - e^{-1/2y}) / 4)
/// ```
pub fn j_function(y: f64) -> Result<f64> {
    require_nonnegative("y", y)?;
    Ok(j_unchecked(y))
}

pub(crate) fn j_unchecked(y: f64) -> f64 {
    if y == 0.0 {
        return J_AT_ZERO;
    }
    if y.is_infinite() {
        return 0.0;
    }
    let z = 0.5 / y;
    if z < SERIES_Z {
        return j_series(z);
    }
    let e = (-z).exp();
    // (1 - e^{-z}) y = -expm1(-z) y
    let first = -(-z).exp_m1() * y;
    J_AT_ZERO * erf(z.sqrt()) + 2.0 * PI.sqrt() / 3.0 * y.sqrt() * (first - (3.0 - e) / 4.0)
}

/// Large-`y` expansion in `z = 1/(2y)`:
/// `J = sqrt(2 pi) sum_k (-1)^k z^(k+1/2) c_k` with
/// `c_k = (1/k!) (1/(6(2k+1)) - 1/(6(k+1)(k+2)) - 1/(12(k+1)))`.
/// `c_0 = 0`, so the leading term is `sqrt(2 pi) z^(3/2) / 72`.
fn j_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = z; // z^k / k!, starting at k = 1
    for k in 1..40u32 {
        let kf = f64::from(k);
        let c = 1.0 / (6.0 * (2.0 * kf + 1.0))
            - 1.0 / (6.0 * (kf + 1.0) * (kf + 2.0))
            - 1.0 / (12.0 * (kf + 1.0));
        let term = if k % 2 == 0 { zk * c } else { -zk * c };
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        zk *= z / (kf + 1.0);
    }
    (2.0 * PI).sqrt() * z.sqrt() * sum
}

/// `I(a, b) = int_0^inf e^{-b x^2} (1 - e^{-a x^2}) / x^2 dx = sqrt(pi) (sqrt(a+b) - sqrt(b))`,
/// written as `sqrt(pi) a / (sqrt(a+b) + sqrt(b))` to avoid cancellation for `a << b`.
pub fn i_ab(a: f64, b: f64) -> Result<f64> {
    require_nonnegative("a", a)?;
    require_positive("b", b)?;
    Ok(PI.sqrt() * a / ((a + b).sqrt() + b.sqrt()))
}

/// Closed-form decohered plateau `L hbar sqrt(2 beta / (pi m)) J(hbar^2 beta / (2 m L^2))`, m^2.
pub fn breve_closed(sys: &PhysicalSystem, scales: &CharacteristicScales) -> f64 {
    let l = sys.cell_length();
    let m = sys.mass;
    let beta = scales.beta;
    let y = HBAR * HBAR * beta / (2.0 * m * l * l);
    l * HBAR * (2.0 * beta / (PI * m)).sqrt() * j_unchecked(y)
}

/// Parameters of the velocity-averaged collision model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionModelParams {
    pub alpha: f64,
    /// m
    pub l: f64,
    /// m/s
    pub v_t: f64,
    /// s
    pub t_b: f64,
}

impl CollisionModelParams {
    pub fn new(alpha: f64, l: f64, v_t: f64, t_b: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        require_positive("L", l)?;
        require_positive("v_T", v_t)?;
        require_positive("t_b", t_b)?;
        Ok(CollisionModelParams { alpha, l, v_t, t_b })
    }

    pub fn from_system(sys: &PhysicalSystem, alpha: f64) -> Result<Self> {
        let s = derive_scales(sys)?;
        Self::new(alpha, sys.cell_length(), s.v_t, s.t_b)
    }

    /// Post-collision plateau `v_T t_b L sqrt(2/pi) J((v_T t_b / L)^2 / 2)`.
    pub fn plateau(&self) -> f64 {
        let r = self.v_t * self.t_b / self.l;
        self.v_t * self.t_b * self.l * (2.0 / PI).sqrt() * j_unchecked(0.5 * r * r)
    }

    /// Pre-collision free MSD `v_T^2 t_b^2 (sqrt((t/t_b)^2 + 1) - 1)`.
    pub fn free(&self, t: f64) -> f64 {
        self.v_t * self.v_t * self.t_b * sqrt_excess(t, self.t_b)
    }

    /// Limit of the model for `t -> inf`. The erf weight of the free term
    /// decays like `1/t` while the free term grows like `t`, leaving
    /// `v_T t_b L sqrt(2/pi) alpha` on top of the plateau.
    pub fn asymptote(&self) -> f64 {
        self.plateau() + self.v_t * self.t_b * self.l * (2.0 / PI).sqrt() * self.alpha
    }
}

/// Velocity-averaged MSD: particles with speed below `alpha L / t` have not
/// collided yet and contribute the free MSD, faster ones the plateau.
pub fn msd_collision_model(p: &CollisionModelParams, t: f64) -> Result<f64> {
    require_nonnegative("t", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = p.alpha * p.l / (2f64.sqrt() * p.v_t * t);
    Ok(erf(x) * p.free(t) + erfc(x) * p.plateau())
}

/// One-dimensional Maxwell-Boltzmann speed density on `v >= 0`, s/m.
pub fn maxwell_boltzmann_pdf(v: f64, v_t: f64) -> Result<f64> {
    require_nonnegative("v", v)?;
    require_positive("v_T", v_t)?;
    let r = v / v_t;
    Ok((2.0 / PI).sqrt() * (-0.5 * r * r).exp() / v_t)
}
