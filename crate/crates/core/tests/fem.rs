use std::f64::consts::PI;

use cloaksim_core::fem::{
    assemble, build_dofmap, element_matrices, shape_functions, Degree, FieldEvaluator, Form,
};
use cloaksim_core::geometry::{generate_mesh, BoundaryTag, GeometrySpec, Mesh, Region};
use cloaksim_core::ite::{arnoldi, start_vector, ArnoldiConfig};
use cloaksim_core::linalg::{CsrMatrix, SparseLu};
use cloaksim_core::{CavityBc, C64};
use faer::{Mat, Side};
use proptest::prelude::*;

const UNIT: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

#[test]
fn p1_unit_triangle_matrices() {
    let lm = element_matrices(UNIT, Degree::P1, 1.0).unwrap();
    let k = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    let m = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]].map(|r| r.map(|v| v / 24.0));
    for a in 0..3 {
        for b in 0..3 {
            assert!((lm.stiffness[a][b] - k[a][b]).abs() < 1e-15);
            assert!((lm.mass[a][b] - m[a][b]).abs() < 1e-15);
        }
    }
}

#[test]
fn p2_unit_triangle_matrices() {
    let lm = element_matrices(UNIT, Degree::P2, 1.0).unwrap();
    // Exact P2 mass on the reference triangle: vertex-vertex 6/360 and
    // −1/360, vertex-edge 0 and −4/360, edge-edge 32/360 and 16/360.
    let mut total = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            total += lm.mass[a][b];
        }
    }
    assert!((total - 0.5).abs() < 1e-14);
    assert!((lm.mass[0][0] - 6.0 / 360.0).abs() < 1e-14);
    assert!((lm.mass[0][1] + 1.0 / 360.0).abs() < 1e-14);
    assert!((lm.mass[0][4] + 4.0 / 360.0).abs() < 1e-14);
    assert!((lm.mass[0][3]).abs() < 1e-14);
    assert!((lm.mass[3][3] - 32.0 / 360.0).abs() < 1e-14);
    assert!((lm.mass[3][4] - 16.0 / 360.0).abs() < 1e-14);
    // Stiffness of the P2 vertex function at the right angle is 1, the edge bubble on the hypotenuse 8/3.
    assert!((lm.stiffness[0][0] - 1.0).abs() < 1e-14);
    assert!((lm.stiffness[4][4] - 8.0 / 3.0).abs() < 1e-14);
}

#[test]
fn degenerate_triangle_is_rejected() {
    assert!(element_matrices([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], Degree::P1, 1.0).is_err());
}

#[test]
fn shape_functions_partition_unity() {
    for deg in [Degree::P1, Degree::P2] {
        for xi in [[0.1, 0.2], [0.5, 0.5], [0.0, 0.0], [0.3, 0.6]] {
            let (n, g) = shape_functions(deg, xi);
            let s: f64 = n.iter().sum();
            let gs = g.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
            assert!((s - 1.0).abs() < 1e-14 && gs[0].abs() < 1e-13 && gs[1].abs() < 1e-13);
        }
    }
}

fn tri_strategy() -> impl Strategy<Value = [[f64; 2]; 3]> {
    (-2.0f64..2.0, -2.0f64..2.0, 0.2f64..1.5, 0.2f64..1.5, 0.3f64..2.8, -1.0f64..1.0).prop_map(
        |(x, y, a, b, th, skew)| [[x, y], [x + a, y], [x + skew * b + b * th.cos() * 0.3, y + b + 0.2 * th.sin()]],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn local_matrices_symmetric_with_constant_kernel(v in tri_strategy(), c in 0.1f64..30.0) {
        for deg in [Degree::P1, Degree::P2] {
            let lm = element_matrices(v, deg, c).unwrap();
            let base = element_matrices(v, deg, 1.0).unwrap();
            let n = lm.n;
            let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
            let mut msum = 0.0;
            for a in 0..n {
                let row: f64 = lm.stiffness[a][..n].iter().sum();
                prop_assert!(row.abs() < 1e-12 * (1.0 + lm.stiffness[a][a].abs()));
                for b in 0..n {
                    prop_assert!((lm.stiffness[a][b] - lm.stiffness[b][a]).abs() < 1e-13);
                    prop_assert!((lm.mass[a][b] - lm.mass[b][a]).abs() < 1e-13);
                    prop_assert!((lm.mass[a][b] - c * base.mass[a][b]).abs() < 1e-12 * c);
                    prop_assert_eq!(lm.stiffness[a][b], base.stiffness[a][b]);
                    msum += lm.mass[a][b];
                }
            }
            prop_assert!((msum - c * area).abs() < 1e-12 * c * area.max(1.0));
        }
    }
}

fn mass_total(m: &CsrMatrix<f64>) -> f64 {
    m.triplets().iter().map(|t| t.2).sum()
}

#[test]
fn global_mass_totals_match_areas() {
    for deg in [Degree::P1, Degree::P2] {
        let mesh = generate_mesh(&GeometrySpec::circle(), 0.05, false).unwrap();
        let dm = build_dofmap(&mesh, deg, CavityBc::Dirichlet).unwrap();
        let m = assemble(&mesh, &dm, Form::Mass, |r| r.in_omega(), |_| 1.0).unwrap();
        assert!((mass_total(&m) - PI).abs() / PI < 5.0 * 0.05 * 0.05);
        let m = assemble(&mesh, &dm, Form::Mass, |r| r == Region::Shell, |_| 16.0).unwrap();
        let exact = 16.0 * PI * 0.75;
        assert!((mass_total(&m) - exact).abs() / exact < 5.0 * 0.05 * 0.05);
        let polygon = mesh.region_area(Region::Shell) * 16.0;
        assert!((mass_total(&m) - polygon).abs() < 1e-10);
    }
}

#[test]
fn global_stiffness_kills_constants_and_is_symmetric() {
    for deg in [Degree::P1, Degree::P2] {
        let mesh = generate_mesh(&GeometrySpec::ellipse(), 0.1, false).unwrap();
        let dm = build_dofmap(&mesh, deg, CavityBc::Neumann).unwrap();
        for filter in [Region::in_omega as fn(Region) -> bool, |r: Region| r == Region::Shell] {
            let s = assemble(&mesh, &dm, Form::Stiffness, filter, |_| 1.0).unwrap();
            let y = s.matvec(&vec![1.0; dm.len()]);
            assert!(y.iter().all(|v| v.abs() < 1e-10));
            assert!(s.symmetry_error() <= 1e-13);
            let m = assemble(&mesh, &dm, Form::Mass, filter, |_| 16.0).unwrap();
            assert!(m.symmetry_error() <= 1e-13);
        }
    }
}

#[test]
fn dofmap_counts() {
    let mesh = generate_mesh(&GeometrySpec::circle(), 0.1, false).unwrap();
    let nodes = mesh.nodes.len();
    let mut edges = std::collections::HashSet::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let n_bd = mesh.edge_tags.iter().filter(|&&t| t == BoundaryTag::DOmega).count();
    let n_dd = mesh.edge_tags.iter().filter(|&&t| t == BoundaryTag::DD).count();
    for (deg, factor) in [(Degree::P1, 1), (Degree::P2, 2)] {
        let d = build_dofmap(&mesh, deg, CavityBc::Dirichlet).unwrap();
        let n = build_dofmap(&mesh, deg, CavityBc::Neumann).unwrap();
        let total = if deg == Degree::P1 { nodes } else { nodes + edges.len() };
        assert_eq!(d.len(), total);
        assert_eq!(d.boundary.len(), factor * n_bd);
        assert_eq!(d.cavity_boundary.len(), factor * n_dd);
        assert_eq!(d.interior.len() + d.boundary.len(), total);
        assert_eq!(n.v_space.len() - d.v_space.len(), d.cavity_boundary.len());
        assert!(d.v_space.iter().all(|&i| !d.has_tag(i, BoundaryTag::DD) && !d.has_tag(i, BoundaryTag::DOmega)));
    }
}

#[test]
fn single_triangle_dofmap() {
    let mesh = Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        vec![[0, 1, 2]],
        vec![Region::Shell],
        vec![[0, 1], [1, 2], [2, 0]],
        vec![BoundaryTag::DOmega; 3],
        1.0,
    )
    .unwrap();
    let d = build_dofmap(&mesh, Degree::P2, CavityBc::Neumann).unwrap();
    assert_eq!(d.len(), 6);
    assert_eq!(d.boundary.len(), 6);
    assert!(d.interior.is_empty() && d.v_space.is_empty());
    assert_eq!(d.coords[3], [0.5, 0.0]);
    assert_eq!(d.coords[4], [0.5, 0.5]);
}

#[test]
fn mesh_without_outer_boundary_is_rejected() {
    let mesh = Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        vec![[0, 1, 2]],
        vec![Region::Shell],
        vec![],
        vec![],
        1.0,
    )
    .unwrap();
    assert!(build_dofmap(&mesh, Degree::P1, CavityBc::Dirichlet).is_err());
}

/// Smallest Dirichlet Laplacian eigenvalue on the unit disc is j₀,₁² = 5.7832.
#[test]
fn disc_dirichlet_laplacian_patch_test() {
    let mesh = generate_mesh(&GeometrySpec::circle(), 0.05, false).unwrap();
    for deg in [Degree::P1, Degree::P2] {
        let dm = build_dofmap(&mesh, deg, CavityBc::Dirichlet).unwrap();
        let s = assemble(&mesh, &dm, Form::Stiffness, |r| r.in_omega(), |_| 1.0).unwrap();
        let m = assemble(&mesh, &dm, Form::Mass, |r| r.in_omega(), |_| 1.0).unwrap();
        let s = s.submatrix(&dm.interior, &dm.interior).map(|v| C64::new(v, 0.0));
        let m = m.submatrix(&dm.interior, &dm.interior);
        let lu = SparseLu::new(&s).unwrap();
        let op = |x: &[C64]| lu.solve(&m.matvec_c(x));
        let cfg = ArnoldiConfig::for_count(1);
        let k = arnoldi(op, &start_vector(dm.interior.len()), cfg, |r| r[0].estimate < 1e-10).unwrap();
        let lambda = 1.0 / k.ritz[0].mu.re;
        let exact = 2.404_825_557_695_773f64.powi(2);
        assert!((lambda - exact).abs() / exact < 0.02, "{deg}: {lambda}");
    }
}

#[test]
fn mass_principal_submatrices_positive_definite() {
    let mesh = generate_mesh(&GeometrySpec::square(), 0.1, false).unwrap();
    let dm = build_dofmap(&mesh, Degree::P2, CavityBc::Dirichlet).unwrap();
    let m = assemble(&mesh, &dm, Form::Mass, |r| r.in_omega(), |_| 1.0).unwrap();
    let mut state = 12345u64;
    for _ in 0..20 {
        let idx: Vec<usize> = (0..12)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                (state >> 33) as usize % dm.len()
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let sub = m.submatrix(&idx, &idx);
        let d = Mat::<f64>::from_fn(idx.len(), idx.len(), |i, j| sub.get(i, j));
        let evs = d.self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert!(evs.iter().all(|&v| v > 0.0), "{evs:?}");
    }
}

#[test]
fn field_evaluation_reproduces_quadratics() {
    let mesh = generate_mesh(&GeometrySpec::circle(), 0.1, false).unwrap();
    let dm = build_dofmap(&mesh, Degree::P2, CavityBc::Dirichlet).unwrap();
    let f = |p: [f64; 2]| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1] + p[1] * p[1];
    let u: Vec<C64> = dm.coords.iter().map(|&p| C64::new(f(p), -f(p))).collect();
    let ev = FieldEvaluator::new(&mesh, &dm);
    for p in [[0.1, 0.2], [-0.7, 0.3], [0.0, -0.95], [0.55, 0.55]] {
        let (v, g) = ev.value_and_gradient(&u, p, 0.0).unwrap();
        assert!((v - C64::new(f(p), -f(p))).norm() < 1e-12);
        let gx = 2.0 + 0.5 * p[1];
        let gy = -1.0 + 0.5 * p[0] + 2.0 * p[1];
        assert!((g[0] - C64::new(gx, -gx)).norm() < 1e-11 && (g[1] - C64::new(gy, -gy)).norm() < 1e-11);
    }
    assert!(ev.value(&u, [3.0, 0.0], 0.0).is_none());
}
