use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-msd"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--no-timestamp")
        .output()
        .expect("binary runs")
}

/// Parses a CSV written by the tool into its header and numeric rows.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn meta(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn figure1_shape() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["figure1"], dir.path()).status.success());
    let (header, rows) = read_csv(&dir.path().join("figure1.csv"));
    assert_eq!(
        header,
        [
            "t_over_tb",
            "msd_over_hbar_tb_per_m",
            "asymptote_over_hbar_tb_per_m"
        ]
    );
    assert_eq!(rows.len(), 512);
    assert_eq!(rows[0], [0.0, 0.0, 0.0]);
    let last = rows.last().unwrap();
    assert!((last[0] - 10.0).abs() < 1e-12);
    // below the asymptote by sqrt(101) - 1 - 10 + 10 = 11 - sqrt(101) in these units
    let gap = last[2] - last[1];
    assert!((gap - (11.0 - 101f64.sqrt())).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    let svg = fs::read_to_string(dir.path().join("figure1.svg")).unwrap();
    assert!(svg.contains(">t_b</text>"));
    assert!(!svg.contains("generated at"));
}

#[test]
fn figure2_plateaus_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure2", "--grid", "geometric:0.05:3000:40"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, plateaus) = read_csv(&dir.path().join("figure2_breve.csv"));
    let sums: Vec<f64> = plateaus.iter().map(|r| r[2]).collect();
    assert!(sums[0] < sums[1] && sums[1] < sums[2]);
    for (s, reference) in sums.iter().zip([0.11, 0.22, 0.44]) {
        assert!((s / reference - 1.0).abs() < 0.05);
    }
    let (_, ideal) = read_csv(&dir.path().join("figure2_ideal.csv"));
    for (i, n) in [10, 20, 40].iter().enumerate() {
        let (_, exact) = read_csv(&dir.path().join(format!("figure2_exact_L{n}a.csv")));
        let (_, model) = read_csv(&dir.path().join(format!("figure2_collision_L{n}a.csv")));
        for k in 0..ideal.len() {
            let (t, id) = (ideal[k][0], ideal[k][1]);
            if t <= 1.0 {
                assert!((exact[k][1] / id - 1.0).abs() < 0.02, "L={n}a t={t}");
            }
            let (lo, hi) = if id < sums[i] {
                (id, sums[i])
            } else {
                (sums[i], id)
            };
            // 1e-3 absorbs the gap between the summed and closed plateaus
            assert!(model[k][1] >= lo * (1.0 - 1e-3) && model[k][1] <= hi * (1.0 + 1e-3));
        }
    }
    let m = meta(&dir.path().join("figure2.meta.json"));
    assert_eq!(m["results"]["super_cells"].as_array().unwrap().len(), 3);
    assert_eq!(m["config"]["alpha"], 0.35);
}

#[test]
fn scattering_xenon_preset() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["scattering", "--preset", "xe-pt111"], dir.path())
        .status
        .success());
    let m = meta(&dir.path().join("scattering.meta.json"));
    let recoil = m["results"]["momentum_transfers"][0]["recoil_energy_meV"]
        .as_f64()
        .unwrap();
    assert!((recoil / 0.016 - 1.0).abs() < 0.03);
    let (_, isf) = read_csv(&dir.path().join("scattering_isf.csv"));
    // phase is linear in time
    let slope = isf[1][4] / isf[1][2];
    for r in &isf[1..] {
        assert!((r[4] / (slope * r[2]) - 1.0).abs() < 1e-10);
    }
    let (_, dsf) = read_csv(&dir.path().join("scattering_dsf.csv"));
    let peak = dsf.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((peak[2] / recoil - 1.0).abs() < 1e-9);
}

#[test]
fn formats_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "n-cells = 3\nformats = \"csv\"\ngrid = \"linear:0:5:6\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&["exact", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success());
    let names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["exact_L3a.csv"]);
    let (_, rows) = read_csv(&out.join("exact_L3a.csv"));
    assert_eq!(rows.len(), 6);
    let text = fs::read_to_string(out.join("exact_L3a.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert!(text.contains("basis_size=301"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = run(&["ideal", "--mass-u=-3"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&bad.stderr).contains("mass-u must be positive and finite, got -3")
    );
    assert_eq!(
        run(&["ideal", "--grid", "cubic:0:1:3"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["figure9"], dir.path()).status.code(), Some(2));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let io = run(&["ideal"], &blocker.join("sub"));
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn breve_and_mc_verify_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["breve"], dir.path());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.1088 a^2"));
    let o = run(
        &["mc-verify", "--members", "500", "--seed", "3"],
        dir.path(),
    );
    assert!(o.status.success());
    let m = meta(&dir.path().join("mc-verify.meta.json"));
    assert_eq!(m["results"]["basis_size"], 201);
    assert_eq!(m["results"]["points"], 20);
}
