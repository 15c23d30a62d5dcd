//! One function per subcommand. Each computes its results, writes the
//! requested files and returns a JSON summary for the metadata file.

use serde_json::{json, Value};

use super::config::RunConfig;
use super::output::Artifacts;
use super::svg::{Plot, Scale, Series};
use super::CliError;
use crate::basis::{build_basis, partition_function, EigenBasis};
use crate::closed_forms::{breve_closed, msd_collision_model, CollisionModelParams};
use crate::exact::ExactMsd;
use crate::grid::TimeGrid;
use crate::ideal::{msd_ideal_curve, IdealMsdParams};
use crate::montecarlo::{sample_msd, sample_msd_rerandomized};
use crate::scattering::{dsf, isf, isf_phase, ScatteringParams};
use crate::units::{derive_scales, joule_to_mev, CharacteristicScales, PhysicalSystem, HBAR};

/// Cell counts of the super-cell comparison figure.
pub const FIGURE2_CELLS: [usize; 3] = [10, 20, 40];

const COLORS: [&str; 3] = ["#1f3a93", "#b03a2e", "#1e8449"];
const DASHES: [&str; 3] = ["8 4", "3 3", "8 3 3 3"];

struct Setup {
    sys: PhysicalSystem,
    scales: CharacteristicScales,
    grid: TimeGrid,
}

impl Setup {
    fn new(cfg: &RunConfig) -> Result<Setup, CliError> {
        let sys = cfg.system.physical()?;
        let scales = derive_scales(&sys)?;
        let grid = cfg.grid.build(scales.t_b)?;
        Ok(Setup { sys, scales, grid })
    }

    fn in_tb(&self) -> Vec<f64> {
        self.grid
            .times()
            .iter()
            .map(|t| t / self.scales.t_b)
            .collect()
    }

    fn a2(&self) -> f64 {
        self.sys.lattice_a * self.sys.lattice_a
    }
}

/// Basis and partition function, with the truncation warning surfaced.
fn basis_for(sys: &PhysicalSystem, cfg: &RunConfig) -> Result<(EigenBasis, f64), CliError> {
    let basis = build_basis(sys, cfg.funcs_per_cell)?;
    if let Some(w) = &basis.edge_warning {
        eprintln!("warning: {w}");
    }
    let q = partition_function(&basis);
    Ok((basis, q))
}

fn scaled(values: &[f64], by: f64) -> Vec<f64> {
    values.iter().map(|v| v / by).collect()
}

fn msd_plot(title: String, series: Vec<Series>, x_scale: Scale, y_scale: Scale) -> Plot {
    Plot {
        title,
        x_label: "t / t_b".into(),
        y_label: "MSD / a^2".into(),
        x_scale,
        y_scale,
        series,
        markers: vec![(1.0, "t_b".into())],
    }
}

fn x_scale_for(cfg: &RunConfig) -> Scale {
    match cfg.grid.kind {
        crate::grid::GridKind::Linear => Scale::Linear,
        crate::grid::GridKind::Geometric => Scale::Log,
    }
}

pub fn scales(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let sys = cfg.system.physical()?;
    let s = derive_scales(&sys)?;
    println!("thermal time t_b      {:.6e} s", s.t_b);
    println!(
        "collision time t_c    {:.6e} s  ({:.2} t_b)",
        s.t_c,
        s.t_c / s.t_b
    );
    println!("thermal velocity v_T  {:.6e} m/s", s.v_t);
    println!("de Broglie lambda_T   {:.6e} m", s.lambda_t);
    println!("quantum diffusion D_q {:.6e} m^2/s", s.d_q);
    println!(
        "partition function Q  {:.6e} (continuum estimate)",
        s.q_approx
    );
    let values = [s.t_b, s.t_c, s.v_t, s.lambda_t, s.d_q, s.q_approx, s.beta];
    art.csv(
        "scales.csv",
        &["order: t_b[s],t_c[s],v_t[m/s],lambda_t[m],d_q[m^2/s],q_approx[1],beta[1/J]".into()],
        &[("value", &values)],
    )?;
    Ok(json!({ "scales": s }))
}

pub fn ideal(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let p = IdealMsdParams::from_system(&st.sys)?;
    let curve = msd_ideal_curve(&p, &st.grid);
    let x = st.in_tb();
    let y = scaled(&curve.values, st.a2());
    art.csv(
        "ideal.csv",
        &[format!("method={}", curve.method.tag())],
        &[
            ("t_over_tb", &x),
            ("t_s", &curve.times),
            ("msd_m2", &curve.values),
            ("msd_over_a2", &y),
        ],
    )?;
    let series = vec![Series {
        label: "ideal".into(),
        xs: x,
        ys: y,
        color: "black",
        dash: None,
    }];
    art.svg(
        "ideal.svg",
        &msd_plot(
            "Ideal particle".into(),
            series,
            x_scale_for(cfg),
            Scale::Linear,
        ),
    )?;
    println!(
        "ideal MSD on {} points, final value {:.6e} m^2",
        curve.len(),
        curve.values.last().unwrap()
    );
    Ok(json!({ "scales": st.scales, "points": curve.len() }))
}

pub fn exact(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let (basis, q) = basis_for(&st.sys, cfg)?;
    let ex = ExactMsd::new(&basis, q)?;
    let curve = ex.curve(&st.grid);
    curve.check().map_err(CliError::Numerical)?;
    let breve = ex.breve();
    let x = st.in_tb();
    let y = scaled(&curve.values, st.a2());
    let n = st.sys.n_cells;
    art.csv(
        &format!("exact_L{n}a.csv"),
        &[format!(
            "method={} basis_size={} row_block={}",
            curve.method.tag(),
            basis.len(),
            curve.params.row_block.unwrap_or_default()
        )],
        &[
            ("t_over_tb", &x),
            ("t_s", &curve.times),
            ("msd_m2", &curve.values),
            ("msd_over_a2", &y),
        ],
    )?;
    let series = vec![
        Series {
            label: format!("exact L={n}a"),
            xs: x.clone(),
            ys: y,
            color: COLORS[0],
            dash: Some(DASHES[0]),
        },
        flat_series("plateau", &x, breve / st.a2(), "gray"),
    ];
    art.svg(
        &format!("exact_L{n}a.svg"),
        &msd_plot(
            format!("Quasi-ideal particle, L = {n} a"),
            series,
            x_scale_for(cfg),
            Scale::Linear,
        ),
    )?;
    println!("basis size K = {}, Q = {:.6e}", basis.len(), q);
    println!(
        "plateau (sum) = {:.6e} m^2 = {:.4} a^2",
        breve,
        breve / st.a2()
    );
    Ok(json!({
        "scales": st.scales,
        "basis_size": basis.len(),
        "row_block": curve.params.row_block,
        "partition_function": q,
        "edge_weight": basis.edge_weight(),
        "breve_sum_m2": breve,
    }))
}

fn flat_series(label: &str, xs: &[f64], value: f64, color: &'static str) -> Series {
    let x0 = xs.iter().copied().find(|v| *v > 0.0).unwrap_or(0.0);
    let x1 = xs.last().copied().unwrap_or(1.0);
    Series {
        label: label.into(),
        xs: vec![x0, x1],
        ys: vec![value, value],
        color,
        dash: Some("1 3"),
    }
}

pub fn breve(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let sys = cfg.system.physical()?;
    let s = derive_scales(&sys)?;
    let (basis, q) = basis_for(&sys, cfg)?;
    let summed = ExactMsd::new(&basis, q)?.breve();
    let closed = breve_closed(&sys, &s);
    let a2 = sys.lattice_a * sys.lattice_a;
    art.csv(
        "breve.csv",
        &[],
        &[
            ("n_cells", &[sys.n_cells as f64]),
            ("basis_size", &[basis.len() as f64]),
            ("breve_sum_m2", &[summed]),
            ("breve_closed_m2", &[closed]),
            ("breve_sum_over_a2", &[summed / a2]),
            ("breve_closed_over_a2", &[closed / a2]),
        ],
    )?;
    println!(
        "L = {} a: plateau sum {:.4} a^2, closed form {:.4} a^2 (K = {})",
        sys.n_cells,
        summed / a2,
        closed / a2,
        basis.len()
    );
    Ok(json!({ "breve_sum_m2": summed, "breve_closed_m2": closed, "basis_size": basis.len() }))
}

fn collision_curve(p: &CollisionModelParams, grid: &TimeGrid) -> Result<Vec<f64>, CliError> {
    grid.times()
        .iter()
        .map(|&t| msd_collision_model(p, t).map_err(CliError::from))
        .collect()
}

pub fn collision(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let p = CollisionModelParams::from_system(&st.sys, cfg.alpha)?;
    let values = collision_curve(&p, &st.grid)?;
    let x = st.in_tb();
    let y = scaled(&values, st.a2());
    art.csv(
        "collision.csv",
        &[format!("method=collision-model alpha={}", cfg.alpha)],
        &[
            ("t_over_tb", &x),
            ("t_s", st.grid.times()),
            ("msd_m2", &values),
            ("msd_over_a2", &y),
        ],
    )?;
    let series = vec![
        Series {
            label: format!("model alpha={}", cfg.alpha),
            xs: x.clone(),
            ys: y,
            color: COLORS[1],
            dash: Some(DASHES[0]),
        },
        flat_series("plateau", &x, p.plateau() / st.a2(), "gray"),
    ];
    art.svg(
        "collision.svg",
        &msd_plot(
            format!("Collision model, L = {} a", st.sys.n_cells),
            series,
            x_scale_for(cfg),
            Scale::Linear,
        ),
    )?;
    println!(
        "plateau term {:.4} a^2, long-time limit {:.4} a^2",
        p.plateau() / st.a2(),
        p.asymptote() / st.a2()
    );
    Ok(json!({ "plateau_m2": p.plateau(), "asymptote_m2": p.asymptote(), "alpha": cfg.alpha }))
}

pub fn mc_verify(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let (basis, q) = basis_for(&st.sys, cfg)?;
    let ex = ExactMsd::new(&basis, q)?;
    let mc = sample_msd(&basis, q, &st.grid, cfg.members, cfg.seed)?;
    let exact: Vec<f64> = st
        .grid
        .times()
        .iter()
        .map(|&t| ex.at(t))
        .collect::<crate::Result<_>>()?;
    let z: Vec<f64> = mc
        .mean_msd
        .iter()
        .zip(&exact)
        .zip(&mc.stderr)
        .map(|((m, e), s)| {
            if *s > 0.0 {
                (m - e) / s
            } else if m == e {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let breve = ex.breve();
    let rr = sample_msd_rerandomized(&basis, q, cfg.members, cfg.seed, 0.0)?;
    let rr_z = (rr.mean - breve) / rr.stderr;
    let within = z.iter().filter(|v| v.abs() <= 3.0).count();
    let x = st.in_tb();
    art.csv(
        "mc_verify.csv",
        &[format!(
            "members={} seed={} basis_size={}",
            cfg.members,
            cfg.seed,
            basis.len()
        )],
        &[
            ("t_over_tb", &x),
            ("t_s", st.grid.times()),
            ("mc_mean_m2", &mc.mean_msd),
            ("mc_stderr_m2", &mc.stderr),
            ("exact_m2", &exact),
            ("z_score", &z),
        ],
    )?;
    let a2 = st.a2();
    let series = vec![
        Series {
            label: "exact sum".into(),
            xs: x.clone(),
            ys: scaled(&exact, a2),
            color: "black",
            dash: None,
        },
        Series {
            label: "Monte Carlo".into(),
            xs: x.clone(),
            ys: scaled(&mc.mean_msd, a2),
            color: COLORS[0],
            dash: Some(DASHES[1]),
        },
        flat_series("plateau", &x, breve / a2, "gray"),
    ];
    art.svg(
        "mc_verify.svg",
        &msd_plot(
            "Random-phase ensemble vs exact sum".into(),
            series,
            x_scale_for(cfg),
            Scale::Linear,
        ),
    )?;
    println!(
        "{within}/{} grid points within 3 stderr of the exact sum",
        z.len()
    );
    println!(
        "decohered ensemble {:.6e} +- {:.1e} m^2 vs plateau {:.6e} m^2 (z = {:.2})",
        rr.mean, rr.stderr, breve, rr_z
    );
    Ok(json!({
        "basis_size": basis.len(),
        "members": cfg.members,
        "seed": cfg.seed,
        "points_within_3_stderr": within,
        "points": z.len(),
        "max_abs_z": z.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        "rerandomized": rr,
        "breve_sum_m2": breve,
        "rerandomized_z": rr_z,
    }))
}

pub fn scattering(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let x = st.in_tb();
    let mut isf_cols: [Vec<f64>; 5] = Default::default();
    let mut dsf_cols: [Vec<f64>; 4] = Default::default();
    let mut phase_series = Vec::new();
    let mut dsf_series = Vec::new();
    let mut per_q = Vec::new();
    for (i, &q_ang) in cfg.q_per_angstrom.iter().enumerate() {
        let p = ScatteringParams::from_system(&st.sys, q_ang * 1e10)?;
        let mut phases = Vec::with_capacity(x.len());
        for (&t, &xt) in st.grid.times().iter().zip(&x) {
            let phi = isf_phase(&p, t)?;
            isf_cols[0].push(q_ang);
            isf_cols[1].push(xt);
            isf_cols[2].push(t);
            isf_cols[3].push(isf(&p, t)?.norm());
            isf_cols[4].push(phi);
            phases.push(phi);
        }
        let centre = p.recoil_frequency();
        let width = p.v_t * p.q.abs();
        let mut mev = Vec::new();
        let mut s_vals = Vec::new();
        for k in 0..=400 {
            let w = centre + width * (-6.0 + 12.0 * k as f64 / 400.0);
            let s = dsf(&p, w)?;
            dsf_cols[0].push(q_ang);
            dsf_cols[1].push(w);
            dsf_cols[2].push(joule_to_mev(HBAR * w));
            dsf_cols[3].push(s);
            mev.push(joule_to_mev(HBAR * w));
            s_vals.push(s);
        }
        let color = COLORS[i % COLORS.len()];
        phase_series.push(Series {
            label: format!("q = {q_ang} 1/A"),
            xs: x.clone(),
            ys: phases,
            color,
            dash: None,
        });
        let peak = s_vals.iter().cloned().fold(0.0, f64::max);
        dsf_series.push(Series {
            label: format!("q = {q_ang} 1/A"),
            xs: mev,
            ys: s_vals.iter().map(|s| s / peak).collect(),
            color,
            dash: None,
        });
        let recoil_mev = joule_to_mev(p.recoil_energy());
        println!(
            "q = {q_ang} 1/A: recoil {recoil_mev:.6} meV, ISF phase period {:.6e} s",
            p.phase_period()?
        );
        per_q.push(json!({
            "q_per_angstrom": q_ang,
            "recoil_energy_meV": recoil_mev,
            "recoil_frequency_rad_per_s": centre,
            "dsf_width_rad_per_s": width,
            "isf_phase_period_s": p.phase_period()?,
            "d_q_m2_per_s": p.d_q,
        }));
    }
    art.csv(
        "scattering_isf.csv",
        &[],
        &[
            ("q_per_angstrom", &isf_cols[0]),
            ("t_over_tb", &isf_cols[1]),
            ("t_s", &isf_cols[2]),
            ("isf_abs", &isf_cols[3]),
            ("isf_phase_rad", &isf_cols[4]),
        ],
    )?;
    art.csv(
        "scattering_dsf.csv",
        &[],
        &[
            ("q_per_angstrom", &dsf_cols[0]),
            ("omega_rad_per_s", &dsf_cols[1]),
            ("hbar_omega_meV", &dsf_cols[2]),
            ("dsf_s", &dsf_cols[3]),
        ],
    )?;
    art.svg(
        "scattering_isf_phase.svg",
        &Plot {
            title: "ISF phase".into(),
            x_label: "t / t_b".into(),
            y_label: "phase / rad".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: phase_series,
            markers: vec![],
        },
    )?;
    art.svg(
        "scattering_dsf.svg",
        &Plot {
            title: "Dynamic structure factor (peak normalized)".into(),
            x_label: "hbar omega / meV".into(),
            y_label: "S / S_max".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: dsf_series,
            markers: vec![],
        },
    )?;
    Ok(json!({ "scales": st.scales, "momentum_transfers": per_q }))
}

pub fn figure1(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let p = IdealMsdParams::from_system(&st.sys)?;
    let curve = msd_ideal_curve(&p, &st.grid);
    let unit = HBAR * st.scales.t_b / st.sys.mass;
    let x = st.in_tb();
    let y = scaled(&curve.values, unit);
    let asym: Vec<f64> = st
        .grid
        .times()
        .iter()
        .map(|t| 2.0 * st.scales.d_q * t / unit)
        .collect();
    art.csv(
        "figure1.csv",
        &[],
        &[
            ("t_over_tb", &x),
            ("msd_over_hbar_tb_per_m", &y),
            ("asymptote_over_hbar_tb_per_m", &asym),
        ],
    )?;
    let plot = Plot {
        title: "Ideal thermal particle".into(),
        x_label: "t / t_b".into(),
        y_label: "MSD / (hbar t_b / m)".into(),
        x_scale: x_scale_for(cfg),
        y_scale: x_scale_for(cfg),
        series: vec![
            Series {
                label: "MSD".into(),
                xs: x.clone(),
                ys: y,
                color: "black",
                dash: None,
            },
            Series {
                label: "2 D_q t".into(),
                xs: x,
                ys: asym,
                color: "black",
                dash: Some("6 4"),
            },
        ],
        markers: vec![(1.0, "t_b".into())],
    };
    art.svg("figure1.svg", &plot)?;
    println!(
        "figure 1: {} points, t_b = {:.4e} s",
        curve.len(),
        st.scales.t_b
    );
    Ok(json!({ "scales": st.scales, "unit_m2": unit }))
}

pub fn figure2(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let st = Setup::new(cfg)?;
    let a2 = st.a2();
    let x = st.in_tb();
    let ideal = msd_ideal_curve(&IdealMsdParams::from_system(&st.sys)?, &st.grid);
    let ideal_y = scaled(&ideal.values, a2);
    art.csv(
        "figure2_ideal.csv",
        &[],
        &[("t_over_tb", &x), ("msd_over_a2", &ideal_y)],
    )?;

    let mut series = vec![Series {
        label: "ideal".into(),
        xs: x.clone(),
        ys: ideal_y,
        color: "black",
        dash: None,
    }];
    let mut plateau_rows: [Vec<f64>; 4] = Default::default();
    let mut per_l = Vec::new();
    for (i, &n) in FIGURE2_CELLS.iter().enumerate() {
        let sys = st.sys.with_cells(n);
        let scales = derive_scales(&sys)?;
        let (basis, q) = basis_for(&sys, cfg)?;
        let ex = ExactMsd::new(&basis, q)?;
        let curve = ex.curve(&st.grid);
        curve.check().map_err(CliError::Numerical)?;
        let breve = ex.breve();
        let closed = breve_closed(&sys, &scales);
        let model = CollisionModelParams::from_system(&sys, cfg.alpha)?;
        let coll = collision_curve(&model, &st.grid)?;

        let ey = scaled(&curve.values, a2);
        let cy = scaled(&coll, a2);
        art.csv(
            &format!("figure2_exact_L{n}a.csv"),
            &[format!(
                "basis_size={} row_block={}",
                basis.len(),
                curve.params.row_block.unwrap_or_default()
            )],
            &[("t_over_tb", &x), ("msd_over_a2", &ey)],
        )?;
        art.csv(
            &format!("figure2_collision_L{n}a.csv"),
            &[format!("alpha={}", cfg.alpha)],
            &[("t_over_tb", &x), ("msd_over_a2", &cy)],
        )?;
        plateau_rows[0].push(n as f64);
        plateau_rows[1].push(basis.len() as f64);
        plateau_rows[2].push(breve / a2);
        plateau_rows[3].push(closed / a2);
        println!(
            "L = {n} a: K = {}, plateau sum {:.4} a^2, closed {:.4} a^2",
            basis.len(),
            breve / a2,
            closed / a2
        );
        series.push(Series {
            label: format!("exact L={n}a"),
            xs: x.clone(),
            ys: ey,
            color: "black",
            dash: Some(DASHES[i]),
        });
        series.push(Series {
            label: format!("model L={n}a"),
            xs: x.clone(),
            ys: cy,
            color: "#c0392b",
            dash: Some(DASHES[i]),
        });
        series.push(flat_series(
            &format!("plateau L={n}a"),
            &x,
            breve / a2,
            "gray",
        ));
        per_l.push(json!({
            "n_cells": n,
            "basis_size": basis.len(),
            "partition_function": q,
            "breve_sum_over_a2": breve / a2,
            "breve_closed_over_a2": closed / a2,
            "collision_time_over_tb": scales.t_c / scales.t_b,
        }));
    }
    art.csv(
        "figure2_breve.csv",
        &[],
        &[
            ("n_cells", &plateau_rows[0]),
            ("basis_size", &plateau_rows[1]),
            ("breve_sum_over_a2", &plateau_rows[2]),
            ("breve_closed_over_a2", &plateau_rows[3]),
        ],
    )?;
    let y_scale = if cfg.grid.kind == crate::grid::GridKind::Geometric {
        Scale::Log
    } else {
        Scale::Linear
    };
    art.svg(
        "figure2.svg",
        &msd_plot(
            format!(
                "m = {} u, T = {} K, a = {} pm",
                cfg.system.mass_u, cfg.system.temperature_k, cfg.system.lattice_pm
            ),
            series,
            x_scale_for(cfg),
            y_scale,
        ),
    )?;
    Ok(json!({ "scales": st.scales, "alpha": cfg.alpha, "super_cells": per_l }))
}
