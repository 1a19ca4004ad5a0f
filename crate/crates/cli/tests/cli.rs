use std::fs;
use std::process::Command;

use cloaksim::commands::{cmd_cloak, cmd_ite, cmd_mesh, cmd_sweep};
use cloaksim::config::Selection;
use cloaksim::pipeline::{run_cloak, run_ite, run_sweep, Axis, SweepOutcome};
use cloaksim::presets::{apply, PRESETS};
use cloaksim::RunConfig;
use cloaksim_core::geometry::{import_mesh, Shape};
use cloaksim_core::scatter::MediumMode;
use cloaksim_core::CavityBc;

fn preset(name: &str) -> RunConfig {
    apply(name, &RunConfig::default()).unwrap()
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cloaksim"));
    c.arg("--log-level").arg("warn");
    c
}

#[test]
fn defaults_are_the_reference_settings() {
    let c = RunConfig::default();
    assert_eq!(c.ite.n_c, 16.0);
    assert_eq!(c.fem.h, 0.1);
    assert_eq!((c.lossy.gamma, c.lossy.tau, c.lossy.alpha, c.lossy.beta, c.lossy.n_a), (1.0, 0.01, 1.0, 0.3, 12.0));
    assert_eq!(c.scatter.pml_exponent, 3);
    assert_eq!(c.scatter.pml_r0, (-16.0f64).exp());
    assert_eq!((c.geometry.box_halfwidth, c.geometry.pml_thickness), (2.2, 0.6));
    c.validate().unwrap();
}

#[test]
fn config_round_trip() {
    let mut all: Vec<RunConfig> = PRESETS.iter().map(|p| preset(p)).collect();
    let mut odd = RunConfig::default();
    odd.geometry.core = Some(Shape::Ellipse { a: 0.2, b: 0.25 });
    odd.geometry.outer = Shape::Ellipse { a: 1.0, b: 1.2 };
    odd.geometry.cavity = Shape::Ellipse { a: 0.5, b: 0.6 };
    odd.herglotz.r = 3.7e-11;
    odd.scatter.modes = vec![MediumMode::Lossy1, MediumMode::IdealizedNeumann];
    odd.ite.selection = Selection::ComplexNear;
    all.push(odd);
    for c in all {
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c, "{text}");
    }
}

#[test]
fn partial_files_and_overrides() {
    let base = preset("fig4");
    let c = base.merge_toml("[lossy]\ntau = 0.03\n[fem]\nh = 0.05\n").unwrap();
    assert_eq!(c.lossy.tau, 0.03);
    assert_eq!(c.fem.h, 0.05);
    assert_eq!(c.scatter.kappa, Some(1.890939));
    assert_eq!(c.ite.cavity_bc, CavityBc::Neumann);

    let c = base.set("herglotz.r=1e-10").unwrap().set("ite.cavity_bc=dirichlet").unwrap();
    assert_eq!(c.herglotz.r, 1e-10);
    assert_eq!(c.ite.cavity_bc, CavityBc::Dirichlet);
    let c = base.set("geometry.outer=ellipse:1,1.2").unwrap();
    assert_eq!(c.geometry.outer, Shape::Ellipse { a: 1.0, b: 1.2 });

    assert!(base.merge_toml("[fem]\nsize = 0.1\n").is_err());
    assert!(base.merge_toml("[ite]\ncavity_bc = \"robin\"\n").is_err());
    assert!(base.set("herglotz.r").is_err());
    assert!(base.set("scatter.modes=[\"lossy3\"]").is_err());
    assert!(apply("table9", &base).is_err());
}

#[test]
fn validation_rejects_bad_values() {
    let ok = preset("fig1");
    let bad = [
        ok.set("fem.h=-0.1").unwrap(),
        ok.set("fem.degree=3").unwrap(),
        ok.set("ite.count=0").unwrap(),
        ok.set("herglotz.gamma_prime_scale=1.2").unwrap(),
        ok.set("geometry.box_halfwidth=1.5").unwrap(),
        ok.set("lossy.tau=0").unwrap(),
        ok.set("scatter.modes=[\"penetrable\"]").unwrap(),
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
}

#[test]
fn presets_encode_the_reference_runs() {
    let t4 = preset("table4");
    assert_eq!(t4.ite.resolved_selection(), Selection::Near);
    assert_eq!((t4.ite.target, t4.ite.count), (2.0, 6));
    let mut t5 = preset("table5");
    t5.ite.cavity_bc = CavityBc::Neumann;
    assert_eq!(t5.ite.resolved_selection(), Selection::Smallest);
    assert_eq!(preset("table2").ite.resolved_selection(), Selection::ComplexNear);
    let f11 = preset("fig11");
    assert_eq!(f11.scatter.modes, vec![MediumMode::Lossy1]);
    assert_eq!(f11.scatter.kappa, Some(2.097681));
    assert_eq!(f11.geometry.outer, Shape::Ellipse { a: 1.0, b: 1.2 });
    for p in PRESETS {
        preset(p).validate().unwrap();
    }
}

#[test]
fn table1_at_h_0_1_matches_the_reference_row() {
    let c = preset("table1");
    let run = run_ite(&c).unwrap();
    let mut k: Vec<f64> = run.pairs.iter().map(|p| p.kappa.re).collect();
    k.sort_by(f64::total_cmp);
    let reference = [0.353965, 0.354349, 0.517122, 0.517444, 0.738215];
    for (a, b) in k.iter().zip(reference) {
        assert!((a - b).abs() / b <= 0.01, "{k:?}");
    }
}

#[test]
fn table5_neumann_returns_six_genuine_values() {
    let mut c = preset("table5");
    c.ite.cavity_bc = CavityBc::Neumann;
    let run = run_ite(&c).unwrap();
    assert_eq!(run.pairs.len(), 6);
    assert!(run.pairs.iter().all(|p| p.kappa.re >= 0.05 && p.residual <= 1e-8));
    assert!(run.pairs.windows(2).all(|w| w[0].kappa.re <= w[1].kappa.re));
}

#[test]
fn circle_neumann_cloak_is_nearly_invisible() {
    let run = run_cloak(&preset("fig4")).unwrap();
    assert_eq!(run.rows.len(), 1);
    let r = &run.rows[0];
    assert_eq!(r.mode, MediumMode::IdealizedNeumann);
    assert!(r.ratio <= 0.05, "{}", r.ratio);
    assert!((r.kappa - 1.890939).abs() / 1.890939 <= 0.05);
    assert!(r.dofs > 0 && r.fit_residual > 0.0);
}

#[test]
fn cloak_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = preset("fig1").set("fem.h=0.2").unwrap();
    c.scatter.grid_n = 9;
    c.scatter.modes = vec![MediumMode::IdealizedDirichlet, MediumMode::Lossy1];
    let outputs = |sub: &str| {
        let mut c = c.clone();
        c.output_dir = dir.path().join(sub);
        cmd_cloak(&c).unwrap();
        ["ratio.csv", "kernel.csv", "fields_idealized_dirichlet.csv", "fields_lossy1.csv", "config.toml"]
            .map(|f| fs::read_to_string(c.output_dir.join(f)).unwrap())
    };
    let a = outputs("a");
    let b = outputs("b");
    assert_eq!(a[..4], b[..4]);
    let ratio: Vec<&str> = a[0].lines().collect();
    assert_eq!(ratio[0], "kappa,mode,ratio,fit_residual,dofs,h");
    assert_eq!(ratio.len(), 3);
    assert!(ratio[1].contains(",idealized_dirichlet,") && ratio[2].contains(",lossy1,"));
    let fields = &a[2];
    assert_eq!(fields.lines().count(), 82);
    assert!(fields.lines().any(|l| l.ends_with(",,,,,1")), "idealized dump masks the cavity");
    assert!(a[3].lines().skip(1).all(|l| l.ends_with(",0")), "lossy dump covers the cavity");
    let reparsed = RunConfig::from_toml(&a[4]).unwrap();
    assert_eq!(reparsed.output_dir, dir.path().join("a"));
}

#[test]
fn ite_command_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = preset("table2").set("fem.h=0.2").unwrap();
    c.output_dir = dir.path().to_path_buf();
    let pairs = cmd_ite(&c).unwrap();
    assert_eq!(pairs.len(), 2);
    assert!((pairs[0].kappa - pairs[1].kappa.conj()).norm() <= 1e-6);
    let csv = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("index,re_kappa,im_kappa,residual"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn sweeps_keep_order_and_record_failures() {
    let c = preset("table1");
    let results = run_sweep(&c, Axis::H, &[0.2, -1.0, 0.1]).unwrap();
    assert_eq!(results.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0.2, -1.0, 0.1]);
    assert!(results[1].1.is_err());
    for i in [0, 2] {
        match &results[i].1 {
            Ok(SweepOutcome::Ite(p)) => assert_eq!(p.len(), 5),
            _ => panic!("row {i} failed"),
        }
    }
    assert!(run_sweep(&c, Axis::Tau, &[0.1]).is_err(), "tau needs scatter modes");
    assert!(Axis::M.apply(&c, 2.5).is_err());

    let dir = tempfile::tempdir().unwrap();
    let mut c = c;
    c.output_dir = dir.path().to_path_buf();
    let csv = cmd_sweep(&c, Axis::H, &[0.2, -1.0]).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "h,status,kappa_1,kappa_2,kappa_3,kappa_4,kappa_5");
    assert!(lines[1].starts_with("0.2,ok,") && lines[1].split(',').count() == 7);
    assert!(lines[2].starts_with("-1,error: "));
    assert_eq!(fs::read_to_string(dir.path().join("sweep_h.csv")).unwrap(), csv);
}

#[test]
fn lossy_sweeps_target_independence() {
    let c = preset("fig10");
    let results = run_sweep(&c, Axis::NA, &[2.0, 12.0, 30.0]).unwrap();
    for (v, r) in &results {
        match r {
            Ok(SweepOutcome::Cloak(rows)) => assert!(rows[0].ratio <= 0.05, "n_a = {v}: {}", rows[0].ratio),
            _ => panic!("n_a = {v} failed"),
        }
    }
}

#[test]
fn mesh_command_exports_a_readable_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = preset("fig9").set("fem.h=0.2").unwrap();
    c.output_dir = dir.path().to_path_buf();
    let mesh = cmd_mesh(&c, true).unwrap();
    let back = import_mesh(dir.path().join("mesh.txt")).unwrap();
    assert_eq!(back.triangles.len(), mesh.triangles.len());
    assert!(back.regions.contains(&cloaksim_core::geometry::Region::Core));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = bin().args(["ite", "--preset", "table1", "--h", "0.2", "--out", out]).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).lines().count(), 5);
    assert!(dir.path().join("eigenvalues.csv").exists());

    let bad_bc = bin().args(["ite", "--preset", "table1", "--bc", "robin"]).output().unwrap();
    assert!(!bad_bc.status.success());
    assert!(String::from_utf8_lossy(&bad_bc.stderr).contains("robin"));
    let bad_preset = bin().args(["ite", "--preset", "table7", "--out", out]).output().unwrap();
    assert!(!bad_preset.status.success());

    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[fem]\nh = 0.2\n[scatter]\ngrid_n = 0\n").unwrap();
    let cloak = bin()
        .args(["cloak", "--preset", "fig4", "--config", cfg.to_str().unwrap(), "--out", out])
        .output()
        .unwrap();
    assert!(cloak.status.success(), "{}", String::from_utf8_lossy(&cloak.stderr));
    assert!(dir.path().join("ratio.csv").exists());
    let written = RunConfig::from_toml(&fs::read_to_string(dir.path().join("config.toml")).unwrap()).unwrap();
    assert_eq!((written.fem.h, written.scatter.grid_n, written.scatter.kappa), (0.2, 0, Some(1.890939)));
}

#[test]
fn validate_quick_passes_and_detects_mass_perturbation() {
    let ok = bin().args(["validate", "--quick"]).output().unwrap();
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(ok.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9);
    let bad = bin().args(["validate", "--quick", "--perturb-mass", "0.01"]).output().unwrap();
    assert!(!bad.status.success());
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.lines().any(|l| l.starts_with("FAIL element_p1_matrices")));
    assert!(text.lines().any(|l| l.starts_with("FAIL global_mass_area")));
}

#[test]
fn logs_carry_module_tags() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cloaksim"))
        .args(["--log-level", "info", "cloak", "--preset", "fig1", "--h", "0.2", "--set", "scatter.grid_n=0"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let log = String::from_utf8_lossy(&out.stderr);
    for tag in ["[cli]", "[ite]", "[herglotz]", "[scatter]"] {
        assert!(log.contains(tag), "missing {tag} in\n{log}");
    }
}
