//! Coherent double-sum MSD of the quasi-ideal particle and its decohered
//! plateau.
//!
//! ```text
//! msd(t) = 4/Q^2 sum_{n != j} w_n w_j |x_nj|^2 sin^2((E_n - E_j) t / 2 hbar)
//! breve  = 2/Q^2 sum_{n != j} w_n w_j |x_nj|^2
//! ```
//!
//! Both sums are symmetric under n <-> j, so only ordered pairs n < j are
//! visited. The kernel uses `sin(a - b) = sin a cos b - cos a sin b` with
//! per-state phases, so the inner loop is pure multiply-add. Rows are grouped
//! in blocks of [`ROW_BLOCK`]; block results are combined in index order,
//! which makes the result independent of the thread count.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::basis::EigenBasis;
use crate::curve::{CurveParams, Method, MsdCurve};
use crate::error::{require_nonnegative, require_positive, Result};
use crate::grid::TimeGrid;
use crate::summation::{lane_sum_by, pairwise_sum, ROW_BLOCK};
use crate::units::HBAR;

/// `1/d^2` for `d = 0..k` (entry 0 unused).
fn inverse_gap_squares(k: usize) -> Vec<f64> {
    (0..k)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64 * d as f64)
            }
        })
        .collect()
}

/// Deterministic blocked reduction of `row(i)` over `0..k`.
fn sum_rows<F>(k: usize, row: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_blocks = k.div_ceil(ROW_BLOCK);
    let block_sums: Vec<f64> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * ROW_BLOCK;
            let hi = (lo + ROW_BLOCK).min(k);
            let rows: Vec<f64> = (lo..hi).map(&row).collect();
            pairwise_sum(&rows)
        })
        .collect();
    pairwise_sum(&block_sums)
}

/// Weighted sum over pairs `i < j` of `w_j g[j-i] (s_i c_j - c_i s_j)^2`,
/// each row scaled by `w_i`.
fn coherent_pair_sum(w: &[f64], s: &[f64], c: &[f64], g: &[f64]) -> f64 {
    let k = w.len();
    sum_rows(k, |i| {
        let len = k - i - 1;
        if len == 0 {
            return 0.0;
        }
        let (si, ci) = (s[i], c[i]);
        let wj = &w[i + 1..];
        let sj = &s[i + 1..];
        let cj = &c[i + 1..];
        let gj = &g[1..=len];
        let inner = lane_sum_by(len, |m| {
            let d = si * cj[m] - ci * sj[m];
            wj[m] * gj[m] * d * d
        });
        w[i] * inner
    })
}

fn decohered_pair_sum(w: &[f64], g: &[f64]) -> f64 {
    let k = w.len();
    sum_rows(k, |i| {
        let len = k - i - 1;
        if len == 0 {
            return 0.0;
        }
        let wj = &w[i + 1..];
        let gj = &g[1..=len];
        w[i] * lane_sum_by(len, |m| wj[m] * gj[m])
    })
}

/// Precomputed arrays for repeated evaluations on one basis.
#[derive(Debug, Clone)]
pub struct ExactMsd<'a> {
    basis: &'a EigenBasis,
    partition: f64,
    inv_gap_sq: Vec<f64>,
    /// `E_n / 2 hbar` in 1/s
    half_freq: Vec<f64>,
}

impl<'a> ExactMsd<'a> {
    pub fn new(basis: &'a EigenBasis, partition: f64) -> Result<Self> {
        require_positive("partition_function", partition)?;
        let eps = basis.energy_quantum();
        let half_freq = basis
            .indices
            .iter()
            .map(|&n| {
                let n2 = (n * n) as f64;
                eps * n2 / (2.0 * HBAR)
            })
            .collect();
        Ok(ExactMsd {
            basis,
            partition,
            inv_gap_sq: inverse_gap_squares(basis.len()),
            half_freq,
        })
    }

    /// `(L / 2 pi)^2 / Q^2`
    fn scale(&self) -> f64 {
        let s = self.basis.l / (2.0 * PI);
        s * s / (self.partition * self.partition)
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        require_nonnegative("t", t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let (s, c): (Vec<f64>, Vec<f64>) =
            self.half_freq.iter().map(|&f| (f * t).sin_cos()).unzip();
        let sum = coherent_pair_sum(&self.basis.weights, &s, &c, &self.inv_gap_sq);
        // 4/Q^2 over ordered pairs = 8/Q^2 over n < j
        Ok(8.0 * self.scale() * sum)
    }

    pub fn curve(&self, grid: &TimeGrid) -> MsdCurve {
        let values = grid
            .times()
            .par_iter()
            .map(|&t| self.at(t).expect("grid times are nonnegative"))
            .collect();
        MsdCurve {
            times: grid.times().to_vec(),
            values,
            method: Method::ExactSum,
            params: CurveParams {
                basis_size: Some(self.basis.len()),
                row_block: Some(ROW_BLOCK),
                ..CurveParams::default()
            },
        }
    }

    pub fn breve(&self) -> f64 {
        // 2/Q^2 over ordered pairs = 4/Q^2 over n < j
        4.0 * self.scale() * decohered_pair_sum(&self.basis.weights, &self.inv_gap_sq)
    }
}

/// Exact MSD (m^2) at time `t` for the basis with partition function `q`.
pub fn msd_exact(basis: &EigenBasis, q: f64, t: f64) -> Result<f64> {
    ExactMsd::new(basis, q)?.at(t)
}

pub fn msd_exact_curve(basis: &EigenBasis, q: f64, grid: &TimeGrid) -> Result<MsdCurve> {
    Ok(ExactMsd::new(basis, q)?.curve(grid))
}

/// Time-independent decohered plateau (m^2).
pub fn breve_sum(basis: &EigenBasis, q: f64) -> Result<f64> {
    Ok(ExactMsd::new(basis, q)?.breve())
}

/// Reference evaluation of the full double sum over all ordered pairs with
/// the textbook summand. O(K^2) sequential; meant for small bases.
pub fn msd_exact_full_sum(basis: &EigenBasis, q: f64, t: f64) -> f64 {
    let k = basis.len();
    let mut acc = 0.0;
    for n in 0..k {
        for j in 0..k {
            if n == j {
                continue;
            }
            let x = crate::basis::x_element(basis.indices[n], basis.indices[j], basis.l);
            let arg = (basis.energies[n] - basis.energies[j]) * t / (2.0 * HBAR);
            let s = arg.sin();
            acc += basis.weights[n] * basis.weights[j] * x.norm_sqr() * s * s;
        }
    }
    4.0 * acc / (q * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, build_basis_with_max_index, partition_function};
    use crate::units::{derive_scales, PhysicalSystem};

    fn co(n_cells: usize) -> PhysicalSystem {
        PhysicalSystem::from_user_units(28.0, 190.0, 256.0, n_cells, 1).unwrap()
    }

    #[test]
    fn zero_at_time_zero() {
        let b = build_basis(&co(2), 50).unwrap();
        let q = partition_function(&b);
        assert_eq!(msd_exact(&b, q, 0.0).unwrap(), 0.0);
        assert!(msd_exact(&b, q, -1.0).is_err());
        assert!(msd_exact(&b, 0.0, 1.0).is_err());
        let g = TimeGrid::new(vec![0.0]).unwrap();
        assert_eq!(msd_exact_curve(&b, q, &g).unwrap().values, vec![0.0]);
    }

    #[test]
    fn folded_sum_matches_full_double_sum() {
        let sys = co(1);
        let t_b = derive_scales(&sys).unwrap().t_b;
        for m in [3, 10, 25] {
            let b = build_basis_with_max_index(&sys, m, 1.0).unwrap();
            let q = partition_function(&b);
            for x in [0.1, 1.0, 7.3, 40.0] {
                let a = msd_exact(&b, q, x * t_b).unwrap();
                let r = msd_exact_full_sum(&b, q, x * t_b);
                assert!(((a - r) / r).abs() < 1e-12, "M={m} t={x} t_b: {a} vs {r}");
            }
        }
    }

    #[test]
    fn breve_is_sin_squared_replaced_by_half() {
        let sys = co(1);
        let b = build_basis_with_max_index(&sys, 20, 1.0).unwrap();
        let q = partition_function(&b);
        let mut acc = 0.0;
        for n in 0..b.len() {
            for j in 0..b.len() {
                if n != j {
                    let x = crate::basis::x_element(b.indices[n], b.indices[j], b.l);
                    acc += b.weights[n] * b.weights[j] * x.norm_sqr() * 0.5;
                }
            }
        }
        let reference = 4.0 * acc / (q * q);
        let got = breve_sum(&b, q).unwrap();
        assert!(((got - reference) / reference).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let sys = co(4);
        let b = build_basis(&sys, 100).unwrap();
        let q = partition_function(&b);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let grid = TimeGrid::linear(0.0, 50.0 * t_b, 11).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| msd_exact_curve(&b, q, &grid).unwrap());
        let c = four.install(|| msd_exact_curve(&b, q, &grid).unwrap());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.values), bits(&c.values));
        assert_eq!(a.params.row_block, Some(ROW_BLOCK));
    }

    #[test]
    fn bounded_by_breve() {
        let sys = co(10);
        let b = build_basis(&sys, 100).unwrap();
        let q = partition_function(&b);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let ex = ExactMsd::new(&b, q).unwrap();
        let breve = ex.breve();
        let a2 = sys.lattice_a * sys.lattice_a;
        assert!(
            (breve / a2 - 0.11).abs() < 0.005,
            "breve = {} a^2",
            breve / a2
        );
        // 100 pseudo-random times up to 3000 t_b
        let mut x = 0.5f64;
        for _ in 0..100 {
            x = (x * 9301.0 + 0.49297).fract();
            let v = ex.at(x * 3000.0 * t_b).unwrap();
            assert!(v <= 1.05 * breve);
        }
    }

    #[test]
    fn settles_on_breve_after_several_crossing_times() {
        let sys = co(10);
        let t_c = derive_scales(&sys).unwrap().t_c;
        let b = build_basis(&sys, 100).unwrap();
        let ex = ExactMsd::new(&b, partition_function(&b)).unwrap();
        let n = 40;
        let mean = (0..n)
            .map(|i| {
                ex.at(t_c * (4.0 + 4.0 * i as f64 / (n - 1) as f64))
                    .unwrap()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean / ex.breve() - 1.0).abs() < 0.05);
    }

    #[test]
    fn plateau_doubles_with_l() {
        let b10 = build_basis(&co(10), 100).unwrap();
        let b20 = build_basis(&co(20), 100).unwrap();
        let r = breve_sum(&b20, partition_function(&b20)).unwrap()
            / breve_sum(&b10, partition_function(&b10)).unwrap();
        assert!((r - 2.0).abs() < 0.04, "ratio {r}");
    }

    #[test]
    fn basis_doubling_converges() {
        let sys = co(10);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let b1 = build_basis(&sys, 100).unwrap();
        let b2 = build_basis(&sys, 200).unwrap();
        let e1 = ExactMsd::new(&b1, partition_function(&b1)).unwrap();
        let e2 = ExactMsd::new(&b2, partition_function(&b2)).unwrap();
        for x in [0.1, 1.0, 5.0, 10.0, 20.0] {
            let (a, c) = (e1.at(x * t_b).unwrap(), e2.at(x * t_b).unwrap());
            assert!(((a - c) / c).abs() < 1e-3, "t = {x} t_b");
        }
    }
}
