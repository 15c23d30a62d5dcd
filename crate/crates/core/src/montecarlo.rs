//! Random-phase thermal wave packets as a stochastic check on the analytic
//! phase averages.
//!
//! A member of the thermal ensemble is
//! `psi = sum_n exp(-beta E_n / 2 + i theta_n) / sqrt(Q) phi_n` with independent
//! uniform phases. Each member is propagated coherently, its position
//! expectation value is tracked and squared displacements are averaged over
//! members.
//!
//! Member `i` draws its phases from a ChaCha8 stream selected by `(seed, i)`,
//! so results do not depend on evaluation order or thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::basis::{x_element, EigenBasis};
use crate::error::{require_positive, MsdError, Result};
use crate::grid::TimeGrid;
use crate::summation::{pairwise_sum, pairwise_sum_by};
use crate::units::HBAR;

/// One sampled thermal wave packet.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalMember {
    pub phases: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl ThermalMember {
    /// Builds `c_n = exp(-beta E_n / 2 + i theta_n) / sqrt(Q)`.
    pub fn new(basis: &EigenBasis, q: f64, phases: Vec<f64>) -> Result<Self> {
        require_positive("partition_function", q)?;
        if phases.len() != basis.len() {
            return Err(MsdError::BasisMismatch {
                member: phases.len(),
                basis: basis.len(),
            });
        }
        let norm = q.sqrt().recip();
        let amplitudes = basis
            .weights
            .iter()
            .zip(&phases)
            .map(|(&w, &th)| Complex64::from_polar(w.sqrt() * norm, th))
            .collect();
        Ok(ThermalMember { phases, amplitudes })
    }

    /// Draws uniform phases on `[0, 2 pi)`.
    pub fn sample<R: Rng>(basis: &EigenBasis, q: f64, rng: &mut R) -> Result<Self> {
        let phases = draw_phases(basis.len(), rng);
        Self::new(basis, q, phases)
    }

    /// `sum |c_n|^2`; one when `Q` belongs to the same basis.
    pub fn norm_sqr(&self) -> f64 {
        pairwise_sum_by(self.amplitudes.len(), |i| self.amplitudes[i].norm_sqr())
    }

    fn check_basis(&self, basis: &EigenBasis) -> Result<()> {
        if self.amplitudes.len() != basis.len() {
            return Err(MsdError::BasisMismatch {
                member: self.amplitudes.len(),
                basis: basis.len(),
            });
        }
        Ok(())
    }
}

fn draw_phases<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k).map(|_| rng.random::<f64>() * 2.0 * PI).collect()
}

/// RNG stream of member `index` under `seed`.
pub fn member_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `x(t) = Tr(x rho(t)) = sum_{n != j} rho_nj(t) x_jn` in metres, evaluated
/// as the full complex double sum. Negative `t` is allowed (time-reversal
/// checks). Fails if the imaginary residue exceeds `1e-10` of the summed
/// term magnitudes.
pub fn position_expectation(member: &ThermalMember, basis: &EigenBasis, t: f64) -> Result<f64> {
    member.check_basis(basis)?;
    let k = basis.len();
    let evolved: Vec<Complex64> = member
        .amplitudes
        .iter()
        .zip(&basis.energies)
        .map(|(&c, &e)| c * Complex64::from_polar(1.0, -e * t / HBAR))
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for n in 0..k {
        for j in 0..k {
            if n == j {
                continue;
            }
            // rho_nj(t) = c_n c_j^* exp(-i (E_n - E_j) t / hbar)
            let rho = evolved[n] * evolved[j].conj();
            let term = rho * x_element(basis.indices[j], basis.indices[n], basis.l);
            sum += term;
            scale += term.norm();
        }
    }
    if sum.im.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(MsdError::Numerical(format!(
            "position expectation has imaginary part {:e} (scale {:e})",
            sum.im, scale
        )));
    }
    Ok(sum.re)
}

/// Real-arithmetic evaluation of the same expectation value, folding the
/// `(n, j)` and `(j, n)` terms:
/// `x = -2 (L / 2 pi) sum_{n<j} ((-1)^(d+1) / d) (Im b_n Re b_j - Re b_n Im b_j)`
/// with `d = j - n` and `b_n = c_n exp(-i E_n t / hbar)`.
struct PositionKernel {
    /// `(-1)^(d+1) / d`, entry 0 unused
    signed_inv_gap: Vec<f64>,
    /// `E_n / hbar`
    freq: Vec<f64>,
    prefactor: f64,
}

impl PositionKernel {
    fn new(basis: &EigenBasis) -> Self {
        let k = basis.len();
        let signed_inv_gap = (0..k)
            .map(|d| match d {
                0 => 0.0,
                d if d % 2 == 1 => 1.0 / d as f64,
                d => -1.0 / d as f64,
            })
            .collect();
        PositionKernel {
            signed_inv_gap,
            freq: basis.energies.iter().map(|e| e / HBAR).collect(),
            prefactor: -2.0 * basis.l / (2.0 * PI),
        }
    }

    fn eval(&self, amps: &[Complex64], t: f64, re: &mut Vec<f64>, im: &mut Vec<f64>) -> f64 {
        re.clear();
        im.clear();
        for (c, &f) in amps.iter().zip(&self.freq) {
            let b = c * Complex64::from_polar(1.0, -f * t);
            re.push(b.re);
            im.push(b.im);
        }
        let k = amps.len();
        let g = &self.signed_inv_gap;
        let rows: Vec<f64> = (0..k)
            .map(|n| {
                let (rn, yn) = (re[n], im[n]);
                let rj = &re[n + 1..];
                let yj = &im[n + 1..];
                let gj = &g[1..k - n];
                let mut acc = 0.0;
                for m in 0..rj.len() {
                    acc += gj[m] * (yn * rj[m] - rn * yj[m]);
                }
                acc
            })
            .collect();
        self.prefactor * pairwise_sum(&rows)
    }
}

/// Ensemble average of `(x(t) - x(0))^2` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub mean_msd: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_members: usize,
    pub seed: u64,
}

/// Mean and standard error of the mean.
fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = pairwise_sum(samples) / n;
    let dev: Vec<f64> = samples.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check_members(n_members: usize) -> Result<()> {
    if n_members < 2 {
        return Err(MsdError::invalid(
            "members",
            "need at least 2 ensemble members",
        ));
    }
    Ok(())
}

/// Monte-Carlo estimate of the MSD: independent random-phase members,
/// each propagated coherently from `t = 0`.
pub fn sample_msd(
    basis: &EigenBasis,
    q: f64,
    grid: &TimeGrid,
    n_members: usize,
    seed: u64,
) -> Result<EnsembleResult> {
    check_members(n_members)?;
    require_positive("partition_function", q)?;
    let kernel = PositionKernel::new(basis);
    let times = grid.times();
    let per_member: Vec<Vec<f64>> = (0..n_members)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(re, im), i| {
                let mut rng = member_rng(seed, i as u64);
                let member = ThermalMember::sample(basis, q, &mut rng)?;
                let x0 = kernel.eval(&member.amplitudes, 0.0, re, im);
                Ok(times
                    .iter()
                    .map(|&t| {
                        let d = kernel.eval(&member.amplitudes, t, re, im) - x0;
                        d * d
                    })
                    .collect())
            },
        )
        .collect::<Result<_>>()?;

    let mut mean_msd = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    let mut column = vec![0.0; n_members];
    for ti in 0..times.len() {
        for (slot, row) in column.iter_mut().zip(&per_member) {
            *slot = row[ti];
        }
        let (m, s) = mean_and_stderr(&column);
        mean_msd.push(m);
        stderr.push(s);
    }
    Ok(EnsembleResult {
        times: times.to_vec(),
        mean_msd,
        stderr,
        n_members,
        seed,
    })
}

/// Estimate of the decohered plateau with stderr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RerandomizedEstimate {
    /// Time at which the "after" packet was evaluated, s.
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n_members: usize,
    pub seed: u64,
}

/// Like [`sample_msd`], but the packet at time `t` and the packet at time 0
/// carry independent phase sets, as after a decohering collision. The
/// average is independent of `t`.
pub fn sample_msd_rerandomized(
    basis: &EigenBasis,
    q: f64,
    n_members: usize,
    seed: u64,
    t: f64,
) -> Result<RerandomizedEstimate> {
    check_members(n_members)?;
    require_positive("partition_function", q)?;
    let kernel = PositionKernel::new(basis);
    let samples: Vec<f64> = (0..n_members)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(re, im), i| {
                let mut rng = member_rng(seed, i as u64);
                let after = ThermalMember::sample(basis, q, &mut rng)?;
                let before = ThermalMember::sample(basis, q, &mut rng)?;
                let d = kernel.eval(&after.amplitudes, t, re, im)
                    - kernel.eval(&before.amplitudes, 0.0, re, im);
                Ok(d * d)
            },
        )
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_and_stderr(&samples);
    Ok(RerandomizedEstimate {
        t,
        mean,
        stderr,
        n_members,
        seed,
    })
}

/// Fast real-arithmetic position expectation, exposed for tests and tools.
pub fn position_expectation_folded(
    member: &ThermalMember,
    basis: &EigenBasis,
    t: f64,
) -> Result<f64> {
    member.check_basis(basis)?;
    let kernel = PositionKernel::new(basis);
    Ok(kernel.eval(&member.amplitudes, t, &mut Vec::new(), &mut Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, build_basis_with_max_index, partition_function};
    use crate::exact::{breve_sum, msd_exact};
    use crate::quadrature::integrate;
    use crate::units::{derive_scales, PhysicalSystem};

    fn co(n_cells: usize) -> PhysicalSystem {
        PhysicalSystem::from_user_units(28.0, 190.0, 256.0, n_cells, 1).unwrap()
    }

    fn small() -> (EigenBasis, f64, f64) {
        let sys = co(1);
        let b = build_basis_with_max_index(&sys, 10, 1.0).unwrap();
        let q = partition_function(&b);
        (b, q, derive_scales(&sys).unwrap().t_b)
    }

    /// `<x>` from the real-space density `|psi(x, t)|^2` on the cell, with
    /// `phi_n(x) = exp(-i q_n x) / sqrt(L)`.
    fn position_by_quadrature(member: &ThermalMember, basis: &EigenBasis, t: f64) -> f64 {
        let l = basis.l;
        let density = |x: f64| {
            let mut psi = Complex64::new(0.0, 0.0);
            for i in 0..basis.len() {
                let phase = -basis.energies[i] * t / HBAR - basis.q[i] * x;
                psi += member.amplitudes[i] * Complex64::from_polar(1.0, phase);
            }
            x * psi.norm_sqr() / l
        };
        integrate(density, -0.5 * l, 0.5 * l, 1e-15 * l).value
    }

    #[test]
    fn amplitudes_are_normalized() {
        let (b, q, _) = small();
        let m = ThermalMember::sample(&b, q, &mut member_rng(1, 0)).unwrap();
        assert!((m.norm_sqr() - 1.0).abs() < 1e-13);
        assert!(m.phases.iter().all(|&p| (0.0..2.0 * PI).contains(&p)));
        assert!(ThermalMember::new(&b, q, vec![0.0; 3]).is_err());
        assert!(ThermalMember::new(&b, 0.0, vec![0.0; b.len()]).is_err());
    }

    #[test]
    fn mismatched_member_is_rejected() {
        let (b, _, _) = small();
        let other = build_basis_with_max_index(&co(1), 5, 1.0).unwrap();
        let m = ThermalMember::sample(&other, partition_function(&other), &mut member_rng(1, 0))
            .unwrap();
        assert!(matches!(
            position_expectation(&m, &b, 0.0),
            Err(MsdError::BasisMismatch {
                member: 11,
                basis: 21
            })
        ));
        assert!(position_expectation_folded(&m, &b, 0.0).is_err());
    }

    #[test]
    fn zero_phases_sit_at_the_origin() {
        let (b, q, _) = small();
        let m = ThermalMember::new(&b, q, vec![0.0; b.len()]).unwrap();
        assert!(position_expectation(&m, &b, 0.0).unwrap().abs() < 1e-14 * b.l);
        assert!(position_by_quadrature(&m, &b, 0.0).abs() < 1e-13 * b.l);
    }

    #[test]
    fn matrix_sum_matches_real_space_integral() {
        let (b, q, t_b) = small();
        for i in 0..4 {
            let m = ThermalMember::sample(&b, q, &mut member_rng(7, i)).unwrap();
            for x in [0.0, 0.3, 2.0, 11.0] {
                let t = x * t_b;
                let sum = position_expectation(&m, &b, t).unwrap();
                let quad = position_by_quadrature(&m, &b, t);
                assert!((sum - quad).abs() < 1e-11 * b.l, "member {i}, t = {x} t_b");
                let folded = position_expectation_folded(&m, &b, t).unwrap();
                assert!((sum - folded).abs() < 1e-13 * b.l);
            }
        }
    }

    #[test]
    fn time_reversal() {
        let (b, q, t_b) = small();
        let k = b.len();
        let m = ThermalMember::sample(&b, q, &mut member_rng(3, 0)).unwrap();
        let negated = ThermalMember::new(&b, q, m.phases.iter().map(|p| -p).collect()).unwrap();
        // conjugating psi maps phi_n to phi_{-n}
        let mirrored =
            ThermalMember::new(&b, q, (0..k).map(|i| -m.phases[k - 1 - i]).collect()).unwrap();
        for x in [0.5, 3.0, 17.0] {
            let t = x * t_b;
            let back = position_expectation(&m, &b, -t).unwrap();
            let neg = position_expectation(&negated, &b, t).unwrap();
            let mir = position_expectation(&mirrored, &b, t).unwrap();
            assert!((back + neg).abs() < 1e-13 * b.l);
            assert!((back - mir).abs() < 1e-13 * b.l);
        }
    }

    #[test]
    fn random_phase_average_identity() {
        let n = 40_000;
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for i in 0..n {
            let th = draw_phases(4, &mut member_rng(11, i));
            let e = |a: f64| Complex64::from_polar(1.0, a);
            // (n, j, n', j') = (0, 1, 1, 0): paired, average one
            acc[0] += e(th[0] - th[1] + th[1] - th[0]);
            // (0, 1, 2, 3) and (0, 1, 0, 1): unpaired, average zero
            acc[1] += e(th[0] - th[1] + th[2] - th[3]);
            acc[2] += e(th[0] - th[1] + th[0] - th[1]);
        }
        let nf = n as f64;
        assert!((acc[0] / nf - 1.0).norm() < 1e-12);
        assert!((acc[1] / nf).norm() < 4.0 / nf.sqrt());
        assert!((acc[2] / nf).norm() < 4.0 / nf.sqrt());
    }

    #[test]
    fn ensemble_matches_exact_sum() {
        let sys = co(2);
        let b = build_basis(&sys, 100).unwrap();
        assert_eq!(b.len(), 201);
        let q = partition_function(&b);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let grid = TimeGrid::new(vec![0.0, 1.0 * t_b, 5.0 * t_b, 30.0 * t_b]).unwrap();
        let r = sample_msd(&b, q, &grid, 3000, 42).unwrap();
        assert_eq!(r.mean_msd[0], 0.0);
        for i in 1..grid.len() {
            let ex = msd_exact(&b, q, grid.times()[i]).unwrap();
            let z = (r.mean_msd[i] - ex) / r.stderr[i];
            assert!(z.abs() < 4.0, "t = {} t_b: z = {z}", grid.times()[i] / t_b);
        }
    }

    #[test]
    fn rerandomized_ensemble_estimates_the_plateau() {
        let sys = co(2);
        let b = build_basis(&sys, 100).unwrap();
        let q = partition_function(&b);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let breve = breve_sum(&b, q).unwrap();
        for t in [0.0, 3.0 * t_b] {
            let r = sample_msd_rerandomized(&b, q, 4000, 9, t).unwrap();
            assert!(((r.mean - breve) / r.stderr).abs() < 4.0, "t = {t}");
        }
    }

    #[test]
    fn stderr_shrinks_as_inverse_root_members() {
        let sys = co(2);
        let b = build_basis(&sys, 20).unwrap();
        let q = partition_function(&b);
        let small = sample_msd_rerandomized(&b, q, 2000, 5, 0.0).unwrap();
        let large = sample_msd_rerandomized(&b, q, 8000, 6, 0.0).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio / 2.0 - 1.0).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sys = co(1);
        let b = build_basis(&sys, 30).unwrap();
        let q = partition_function(&b);
        let t_b = derive_scales(&sys).unwrap().t_b;
        let grid = TimeGrid::linear(0.0, 10.0 * t_b, 5).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let three = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let a = one.install(|| sample_msd(&b, q, &grid, 200, 17).unwrap());
        let c = three.install(|| sample_msd(&b, q, &grid, 200, 17).unwrap());
        assert_eq!(a, c);
        let d = sample_msd(&b, q, &grid, 200, 18).unwrap();
        assert_ne!(a.mean_msd, d.mean_msd);
        assert!(sample_msd(&b, q, &grid, 1, 17).is_err());
    }
}
