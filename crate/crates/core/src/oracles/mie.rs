//! Partial-wave series for plane-wave scattering by a disc centred at the origin.

use crate::oracles::bessel::{bessel_j_all, hankel1_all};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MieKind {
    /// u = 0 on the disc boundary.
    SoundSoft,
    /// ∂u/∂ρ = 0 on the disc boundary.
    SoundHard,
    /// Homogeneous disc with refractive index n_inside, continuous u and ∂u/∂ρ.
    Penetrable,
}

/// Default truncation ⌈κa⌉ + 20.
pub fn mie_order(kappa: f64, radius: f64) -> usize {
    (kappa * radius).ceil() as usize + 20
}

/// Scattered field at `points` for the incident wave e^{iκ x·d}.
pub fn mie_scatter(
    kind: MieKind,
    radius: f64,
    n_inside: f64,
    kappa: f64,
    direction: [f64; 2],
    points: &[[f64; 2]],
) -> Result<Vec<C64>> {
    mie_scatter_with_order(kind, radius, n_inside, kappa, direction, points, mie_order(kappa, radius))
}

pub fn mie_scatter_with_order(
    kind: MieKind,
    radius: f64,
    n_inside: f64,
    kappa: f64,
    direction: [f64; 2],
    points: &[[f64; 2]],
    order: usize,
) -> Result<Vec<C64>> {
    if !(radius > 0.0 && kappa > 0.0) {
        return Err(Error::Domain("radius and wavenumber must be positive".into()));
    }
    if kind == MieKind::Penetrable && !(n_inside > 0.0) {
        return Err(Error::Domain("n_inside must be positive".into()));
    }
    let coeffs = coefficients(kind, radius, n_inside, kappa, order);
    let theta_d = direction[1].atan2(direction[0]);
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let rho = p[0].hypot(p[1]);
        if rho < radius * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies inside the disc",
                p[0], p[1]
            )));
        }
        let phi = p[1].atan2(p[0]) - theta_d;
        let h = hankel1_all(order, kappa * rho);
        let mut sum = C64::new(0.0, 0.0);
        for m in 0..=order {
            let eps = if m == 0 { 1.0 } else { 2.0 };
            sum += coeffs[m] * h[m] * (eps * (m as f64 * phi).cos());
        }
        out.push(sum);
    }
    Ok(out)
}

/// i^m b_m with u^s = Σ ε_m i^m b_m H_m(κρ) cos mφ.
fn coefficients(kind: MieKind, a: f64, n_inside: f64, kappa: f64, order: usize) -> Vec<C64> {
    let x = kappa * a;
    let j = bessel_j_all(order + 1, x);
    let h = hankel1_all(order + 1, x);
    let dj = |m: usize| if m == 0 { -j[1] } else { 0.5 * (j[m - 1] - j[m + 1]) };
    let dh = |m: usize| if m == 0 { -h[1] } else { (h[m - 1] - h[m + 1]) * 0.5 };
    let k1 = kappa * n_inside.sqrt();
    let (j1, dj1) = if kind == MieKind::Penetrable {
        let t = bessel_j_all(order + 1, k1 * a);
        let d: Vec<f64> = (0..=order)
            .map(|m| if m == 0 { -t[1] } else { 0.5 * (t[m - 1] - t[m + 1]) })
            .collect();
        (t, d)
    } else {
        (Vec::new(), Vec::new())
    };
    let mut i_m = C64::new(1.0, 0.0);
    (0..=order)
        .map(|m| {
            let b = match kind {
                MieKind::SoundSoft => -j[m] / h[m],
                MieKind::SoundHard => -dj(m) / dh(m),
                MieKind::Penetrable => {
                    let num = kappa * dj(m) * j1[m] - k1 * dj1[m] * j[m];
                    let den = h[m] * (k1 * dj1[m]) - dh(m) * (kappa * j1[m]);
                    C64::new(num, 0.0) / den
                }
            };
            let c = i_m * b;
            i_m *= C64::new(0.0, 1.0);
            c
        })
        .collect()
}
