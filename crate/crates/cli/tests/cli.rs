use std::path::Path;
use std::process::{Command, Output};

fn stargraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stargraph")).args(args).output().expect("binary runs")
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn simulate_writes_outputs_and_echoes_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "coupling = \"delta\"\nstrength = 2.0\nv = 4.0\nlabel = \"from-file\"\n").unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = stargraph(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--v",
        "5",
        "--label",
        "cli",
        "--output-dir",
        out_dir,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("cli");
    let manifest = std::fs::read_to_string(run.join("manifest.toml")).unwrap();
    assert!(manifest.contains("v = 5.0"));
    assert!(manifest.contains("strength = 2.0"));
    assert!(manifest.contains("coupling = \"delta\""));
    assert_eq!(header(&run.join("trace.csv")), "t,mass,energy,mass_edge1,mass_edge2,mass_edge3,far_end_mass");
    assert!(header(&run.join("summary.csv")).contains("r_tilde_re,r_tilde_im,t_tilde_re,t_tilde_im"));
    let bytes = std::fs::read(run.join("final_state.gnls")).unwrap();
    assert_eq!(&bytes[..4], b"GNLS");

    let plots = dir.path().join("plots");
    let out = stargraph(&["plotdata", "--run", run.to_str().unwrap(), "--output-dir", plots.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(header(&plots.join("ratio_vs_t.csv")).starts_with("t,ratio_edge1"));
    assert_eq!(header(&plots.join("error_vs_t.csv")), "t,e3");
}

#[test]
fn invalid_parameters_map_to_exit_codes() {
    assert_eq!(stargraph(&["simulate", "--v", "0.5"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(stargraph(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(5));
    assert_eq!(stargraph(&["sweep", "--v-list", "8,16"]).status.code(), Some(2));
    assert_eq!(stargraph(&["plotdata"]).status.code(), Some(1));
}

#[test]
fn truncation_violation_exits_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = stargraph(&[
        "simulate",
        "--v",
        "6",
        "--far-end-mass-threshold",
        "1e-14",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn empty_sweep_succeeds_with_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = stargraph(&["sweep", "--couplings", "", "--label", "none", "--output-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = dir.path().join("none").join("sweep.csv");
    assert!(header(&sweep).starts_with("v,coupling,strength,status"));
    let manifest = std::fs::read_to_string(dir.path().join("none").join("manifest.toml")).unwrap();
    assert!(manifest.contains("couplings = []"));
}

#[test]
fn small_sweep_then_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap();
    let out =
        stargraph(&["sweep", "--v-list", "4,5,6", "--couplings", "kirchhoff", "--label", "s", "--output-dir", root]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = dir.path().join("s").join("sweep.csv");
    assert_eq!(std::fs::read_to_string(&sweep).unwrap().lines().count(), 4);
    let plots = dir.path().join("p");
    let out = stargraph(&["plotdata", "--sweep", sweep.to_str().unwrap(), "--output-dir", plots.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(plots.join("error_vs_v.csv")).unwrap().lines().count(), 4);
    assert!(header(&plots.join("fits.csv")).starts_with("coupling,points,e1_slope"));
}

#[test]
fn verify_reports_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("checks.csv");
    let out = stargraph(&["verify", "--suite", "unitarity,kernels,tail", "--output", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert_eq!(header(&csv), "suite,name,passed,value,threshold,comparison");
    let json = stargraph(&["verify", "--suite", "tail", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    assert_eq!(stargraph(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn kernels_tabulates_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let out = stargraph(&[
        "kernels",
        "--coupling",
        "kirchhoff",
        "--points",
        "5",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("scattering.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
    let row: Vec<f64> = table.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((row[1], row[3]), (-1.0 / 3.0, 2.0 / 3.0));
    assert_eq!(header(&dir.path().join("resolvent.csv")), "k_re,k_im,x,y,i,j,g_re,g_im");
}
