use cloaksim_core::fem::{build_dofmap, Degree};
use cloaksim_core::geometry::{generate_mesh, BoundaryTag, GeometrySpec};
use cloaksim_core::herglotz::{default_gamma_prime, fit_eigenfunction, FitConfig, HerglotzKernel, PlaneWave};
use cloaksim_core::ite::{assemble_blocks, solve_near};
use cloaksim_core::oracles::{mie_scatter, MieKind};
use cloaksim_core::scatter::{
    assemble_scatter, export_fields, flux_on_gamma, gamma_points, pml_stretch, sample_on_gamma, scatter,
    solve_scatter, write_ratio_report, Coefficients, GridSpec, LossyParams, MediumMode, MediumSpec, PmlConfig,
    RatioRow, ScatterProblem,
};
use cloaksim_core::{CavityBc, C64};

fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn sound_soft(h: f64, kappa: f64) -> ScatterProblem {
    let med = MediumSpec::idealized(MediumMode::IdealizedDirichlet, 1.0).unwrap();
    ScatterProblem::new(&GeometrySpec::circle(), h, Degree::P2, med, kappa).unwrap()
}

/// ITE eigenfunction nearest `target`, its Herglotz fit, and κ_h.
fn fitted_incident(spec: &GeometrySpec, bc: CavityBc, target: f64, h: f64) -> (f64, HerglotzKernel) {
    let mesh = generate_mesh(spec, h, false).unwrap();
    let dm = build_dofmap(&mesh, Degree::P2, bc).unwrap();
    let sys = assemble_blocks(&mesh, &dm, 16.0).unwrap();
    let pair = solve_near(&sys, C64::new(target, 0.0), 1).unwrap().remove(0);
    let fit = fit_eigenfunction(&pair, &sys, &mesh, &dm, &default_gamma_prime(&spec.outer), FitConfig::default()).unwrap();
    (pair.kappa.re, fit.kernel)
}

#[test]
fn pml_profile() {
    let cfg = PmlConfig::default();
    let kappa = 2.0;
    assert_eq!(pml_stretch([1.5, -2.1], &cfg, kappa), [C64::new(1.0, 0.0); 2]);
    let d = cfg.thickness;
    assert!((cfg.sigma_max() - 32.0 / d).abs() < 1e-12);
    let edge = pml_stretch([cfg.box_halfwidth + d, 0.3], &cfg, kappa);
    assert!((edge[0] - C64::new(1.0, 32.0 / (d * kappa))).norm() < 1e-12);
    assert_eq!(edge[1], C64::new(1.0, 0.0));
    let corner = pml_stretch([-2.5, 2.6], &cfg, kappa);
    assert!(corner[0].im > 0.0 && corner[1].im > 0.0);
    assert!(PmlConfig { box_halfwidth: 1.7, ..cfg }.validate().is_err());
    assert!(PmlConfig { thickness: 0.0, ..cfg }.validate().is_err());
}

#[test]
fn medium_parameters() {
    let m = MediumSpec::lossy(MediumMode::Lossy2, LossyParams::default(), 16.0).unwrap();
    assert!((m.lossy.sigma - 1e-4).abs() < 1e-18);
    assert!((m.lossy.n - C64::new(1e-4, 3e-5)).norm() < 1e-18);
    assert_eq!(m.core, Coefficients::real(1.0, 12.0));
    assert_eq!(m.shell, Coefficients::real(1.0, 16.0));
    let m = MediumSpec::lossy(MediumMode::Lossy1, LossyParams::default(), 16.0).unwrap();
    assert!((m.lossy.sigma - 1e4).abs() < 1e-8);
    assert!((m.lossy.n - C64::new(1.0, 3e3)).norm() < 1e-8);
    assert!(MediumSpec::lossy(MediumMode::IdealizedDirichlet, LossyParams::default(), 16.0).is_err());
    assert!(MediumSpec::idealized(MediumMode::Lossy1, 16.0).is_err());
    assert!(MediumSpec::lossy(MediumMode::Lossy1, LossyParams { tau: 0.0, ..LossyParams::default() }, 16.0).is_err());
    assert!(MediumSpec::penetrable(Coefficients { sigma: 1.0, n: C64::new(2.0, -0.1) }, Coefficients::VACUUM).is_err());
    for mode in ["idealized_dirichlet", "idealized_neumann", "lossy1", "lossy2", "penetrable"] {
        assert_eq!(mode.parse::<MediumMode>().unwrap().to_string(), mode);
    }
    assert!("lossy3".parse::<MediumMode>().is_err());
}

#[test]
fn no_scatterer_gives_zero_field() {
    let med = MediumSpec::penetrable(Coefficients::VACUUM, Coefficients::VACUUM).unwrap();
    let p = ScatterProblem::new(&GeometrySpec::circle(), 0.2, Degree::P2, med, 1.5).unwrap();
    let pw = PlaneWave::new(1.5, [0.6, 0.8]).unwrap();
    let sys = assemble_scatter(&p, &pw).unwrap();
    assert!(sys.rhs.iter().all(|v| *v == C64::new(0.0, 0.0)));
    let sol = solve_scatter(&p, &sys).unwrap();
    assert!(sol.us.iter().all(|v| *v == C64::new(0.0, 0.0)));
    assert_eq!(sol.ratio, 0.0);
}

#[test]
fn galerkin_matrix_is_complex_symmetric() {
    let p = sound_soft(0.2, 3.0);
    let pw = PlaneWave::new(3.0, [1.0, 0.0]).unwrap();
    let sys = assemble_scatter(&p, &pw).unwrap();
    assert!(sys.matrix.symmetry_error() <= 1e-13, "{}", sys.matrix.symmetry_error());
}

#[test]
fn dirichlet_constraint_cancels_incident_on_cavity() {
    let p = sound_soft(0.1, 3.0);
    let pw = PlaneWave::new(3.0, [0.0, 1.0]).unwrap();
    let sol = scatter(&p, &pw).unwrap();
    let on_dd: Vec<usize> = (0..p.dofmap.len()).filter(|&d| p.dofmap.has_tag(d, BoundaryTag::DD)).collect();
    assert!(!on_dd.is_empty());
    for d in on_dd {
        assert_eq!(sol.us[d] + sol.ui[d], C64::new(0.0, 0.0));
    }
    for d in (0..p.dofmap.len()).filter(|&d| p.dofmap.has_tag(d, BoundaryTag::Box)) {
        assert_eq!(sol.us[d], C64::new(0.0, 0.0));
    }
    assert!(sol.residual <= 1e-10, "{}", sol.residual);
    assert!(sol.us.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
}

#[test]
fn mie_validation() {
    let gamma = gamma_points();
    let pw = PlaneWave::new(3.0, [1.0, 0.0]).unwrap();
    let p = sound_soft(0.05, 3.0);
    let sol = scatter(&p, &pw).unwrap();
    let exact = mie_scatter(MieKind::SoundSoft, 0.5, 1.0, 3.0, [1.0, 0.0], &gamma).unwrap();
    let err = relative_l2(&sample_on_gamma(&p, &sol.us).unwrap(), &exact);
    assert!(err <= 0.02, "sound-soft error {err}");

    let med = MediumSpec::idealized(MediumMode::IdealizedNeumann, 1.0).unwrap();
    let p = ScatterProblem::new(&GeometrySpec::circle(), 0.05, Degree::P2, med, 3.0).unwrap();
    let sol = scatter(&p, &pw).unwrap();
    let exact = mie_scatter(MieKind::SoundHard, 0.5, 1.0, 3.0, [1.0, 0.0], &gamma).unwrap();
    let err = relative_l2(&sample_on_gamma(&p, &sol.us).unwrap(), &exact);
    assert!(err <= 0.02, "sound-hard error {err}");

    let c = Coefficients::real(1.0, 16.0);
    let med = MediumSpec::penetrable(c, c).unwrap();
    let p = ScatterProblem::new(&GeometrySpec::circle(), 0.05, Degree::P2, med, 1.0).unwrap();
    let pw = PlaneWave::new(1.0, [1.0, 0.0]).unwrap();
    let sol = scatter(&p, &pw).unwrap();
    let exact = mie_scatter(MieKind::Penetrable, 1.0, 16.0, 1.0, [1.0, 0.0], &gamma).unwrap();
    let err = relative_l2(&sample_on_gamma(&p, &sol.us).unwrap(), &exact);
    assert!(err <= 0.02, "penetrable error {err}");
}

#[test]
fn lossless_flux_vanishes() {
    let kappa = 3.0;
    let p = sound_soft(0.1, kappa);
    let pw = PlaneWave::new(kappa, [1.0, 0.0]).unwrap();
    let sol = scatter(&p, &pw).unwrap();
    let (flux, mass) = flux_on_gamma(&p, &sol.total()).unwrap();
    assert!(flux.abs() <= 1e-3 * mass * kappa, "flux {flux} vs {}", 1e-3 * mass * kappa);
}

#[test]
fn pml_thickness_doubling_barely_moves_the_ratio() {
    let spec = GeometrySpec::circle();
    let (kappa, kernel) = fitted_incident(&spec, CavityBc::Dirichlet, 0.354349, 0.1);
    let med = MediumSpec::idealized(MediumMode::IdealizedDirichlet, 16.0).unwrap();
    let ratio = |d: f64| {
        let spec = GeometrySpec { pml_thickness: d, ..spec };
        let p = ScatterProblem::new(&spec, 0.1, Degree::P2, med, kappa).unwrap();
        scatter(&p, &kernel).unwrap().ratio
    };
    let (r1, r2) = (ratio(0.6), ratio(1.2));
    assert!(r1 <= 0.05, "{r1}");
    assert!((r1 - r2).abs() <= 0.01 * r1, "{r1} vs {r2}");
}

#[test]
fn lossy_layer_trend_and_target_independence() {
    let spec = GeometrySpec::circle();
    let (kappa, kernel) = fitted_incident(&spec, CavityBc::Neumann, 1.890939, 0.1);
    let ratio = |mode: MediumMode, params: LossyParams| {
        let med = if mode.is_idealized() {
            MediumSpec::idealized(mode, 16.0).unwrap()
        } else {
            MediumSpec::lossy(mode, params, 16.0).unwrap()
        };
        let p = ScatterProblem::new(&spec, 0.1, Degree::P2, med, kappa).unwrap();
        scatter(&p, &kernel).unwrap().ratio
    };
    let d = LossyParams::default();
    // The τ → 0 limit is the idealized cavity with the same incident wave.
    let floor = ratio(MediumMode::IdealizedNeumann, d);
    let r: Vec<f64> = [0.1, 0.03, 0.01].iter().map(|&tau| ratio(MediumMode::Lossy2, LossyParams { tau, ..d })).collect();
    for w in r.windows(2) {
        assert!(w[1] <= w[0].max(floor), "{r:?}, floor {floor}");
    }
    for n_a in [2.0, 12.0, 30.0] {
        let v = ratio(MediumMode::Lossy2, LossyParams { n_a, ..d });
        assert!(v <= 0.05, "n_a = {n_a}: {v}");
    }
}

#[test]
fn problem_validation_errors() {
    let spec = GeometrySpec::circle();
    let ideal = MediumSpec::idealized(MediumMode::IdealizedDirichlet, 16.0).unwrap();
    let pw = PlaneWave::new(1.0, [1.0, 0.0]).unwrap();
    let p = ScatterProblem::new(&spec, 0.2, Degree::P1, ideal, 2.0).unwrap();
    assert!(assemble_scatter(&p, &pw).is_err(), "κ mismatch must be rejected");
    assert!(ScatterProblem::new(&spec, 0.2, Degree::P1, ideal, 0.0).is_err());

    let full = generate_mesh(&spec, 0.2, true).unwrap();
    assert!(ScatterProblem::from_mesh(full.clone(), Degree::P1, ideal, PmlConfig::default(), 1.0).is_err());
    let lossy = MediumSpec::lossy(MediumMode::Lossy2, LossyParams::default(), 16.0).unwrap();
    let hollow = full.submesh(|r| !r.in_cavity());
    assert!(ScatterProblem::from_mesh(hollow, Degree::P1, lossy, PmlConfig::default(), 1.0).is_err());
    let bounded = generate_mesh(&spec, 0.2, false).unwrap();
    assert!(ScatterProblem::from_mesh(bounded, Degree::P1, lossy, PmlConfig::default(), 1.0).is_err());
    let wrong_box = PmlConfig { thickness: 0.8, ..PmlConfig::default() };
    assert!(ScatterProblem::from_mesh(full, Degree::P1, lossy, wrong_box, 1.0).is_err());
}

#[test]
fn field_export_format() {
    let p = sound_soft(0.2, 2.0);
    let pw = PlaneWave::new(2.0, [1.0, 0.0]).unwrap();
    let sol = scatter(&p, &pw).unwrap();
    let mut buf = Vec::new();
    let grid = GridSpec { x: [-0.1, 1.5], y: [0.0, 0.0], nx: 2, ny: 1 };
    assert_eq!(export_fields(&p, &sol, &grid, &mut buf).unwrap(), 2);
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,re_us,im_us,re_ui,im_ui,masked");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "-0.1,0,,,,,1");
    let f: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(f[6], "0");
    let ui = C64::new(f[4].parse().unwrap(), f[5].parse().unwrap());
    assert!((ui - C64::new(0.0, 3.0).exp()).norm() < 1e-3);

    let total = sol.total();
    for d in (0..p.dofmap.len()).step_by(97) {
        assert_eq!(total[d], sol.us[d] + sol.ui[d]);
    }
    let wide = GridSpec::square(2.5, 3);
    assert!(export_fields(&p, &sol, &wide, &mut Vec::new()).is_err());
}

#[test]
fn ratio_report_format() {
    let rows = [RatioRow { kappa: 0.354349, mode: MediumMode::Lossy2, ratio: 0.0123, fit_residual: 1e-3, dofs: 1000, h: 0.1 }];
    let mut buf = Vec::new();
    write_ratio_report(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kappa,mode,ratio,fit_residual,dofs,h");
    assert!(lines[1].starts_with("0.354349000,lossy2,0.012300000,"));
    assert!(lines[1].ends_with(",1000,0.1"));
}

#[test]
fn scatter_solves_are_deterministic() {
    let p = sound_soft(0.2, 2.5);
    let pw = PlaneWave::new(2.5, [0.6, -0.8]).unwrap();
    let a = scatter(&p, &pw).unwrap();
    let b = scatter(&p, &pw).unwrap();
    assert_eq!(a.us, b.us);
    assert_eq!(a.ratio, b.ratio);
}

#[test]
fn sequential_path_matches_parallel() {
    let pw = PlaneWave::new(2.5, [0.6, -0.8]).unwrap();
    cloaksim_core::par::set_sequential(true);
    let seq = scatter(&sound_soft(0.2, 2.5), &pw);
    cloaksim_core::par::set_sequential(false);
    let (seq, par) = (seq.unwrap(), scatter(&sound_soft(0.2, 2.5), &pw).unwrap());
    assert_eq!(seq.us, par.us);
    assert_eq!(seq.ratio, par.ratio);
}
