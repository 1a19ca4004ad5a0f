use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::{Error, Result, C64};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Above this argument Y₀ and Y₁ come from the Hankel asymptotic expansion.
const ASYMPTOTIC_X: f64 = 30.0;
/// Below this argument J is summed from its ascending series.
const SERIES_X: f64 = 2.0;
const DOMAIN_MAX: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

/// Checked entry point: J on [0, 100], Y on (0, 100].
pub fn bessel(kind: BesselKind, m: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || !(0.0..=DOMAIN_MAX).contains(&x) {
        return Err(Error::Domain(format!("bessel argument {x} outside [0, 100]")));
    }
    match kind {
        BesselKind::J => Ok(bessel_j(m, x)),
        BesselKind::Y if x == 0.0 => Err(Error::Domain("Y is singular at x = 0".into())),
        BesselKind::Y => Ok(bessel_y(m, x)),
    }
}

pub fn bessel_j(m: u32, x: f64) -> f64 {
    bessel_j_all(m as usize, x)[m as usize]
}

pub fn bessel_y(m: u32, x: f64) -> f64 {
    bessel_y_all(m as usize, x)[m as usize]
}

/// J_m′(x).
pub fn bessel_jp(m: u32, x: f64) -> f64 {
    let j = bessel_j_all(m as usize + 1, x);
    deriv(&j, m as usize)
}

/// Y_m′(x).
pub fn bessel_yp(m: u32, x: f64) -> f64 {
    let y = bessel_y_all(m as usize + 1, x);
    deriv(&y, m as usize)
}

/// Z_m′ from a table of Z_0..Z_{m+1} (any cylinder function).
fn deriv(z: &[f64], m: usize) -> f64 {
    if m == 0 {
        -z[1]
    } else {
        0.5 * (z[m - 1] - z[m + 1])
    }
}

/// J_0(x) .. J_mmax(x).
pub fn bessel_j_all(mmax: usize, x: f64) -> Vec<f64> {
    let x = x.abs();
    let mut out = vec![0.0; mmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_X {
        for (m, o) in out.iter_mut().enumerate() {
            *o = j_series(m, x);
        }
        return out;
    }
    miller(mmax, x, &mut out);
    out
}

/// Ascending series Σ (−x²/4)^k (x/2)^m / (k! (m+k)!).
fn j_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut t = 1.0;
    for j in 1..=m {
        t *= half / j as f64;
        if t == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = t;
    for k in 1..200 {
        t *= q / (k as f64 * (m + k) as f64);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence normalised by J₀ + 2 Σ J_{2k} = 1.
fn miller(mmax: usize, x: f64, out: &mut [f64]) {
    let top = mmax.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut jp1 = 0.0;
    let mut j = 1e-300_f64.sqrt();
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k <= mmax {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e200 {
            let s = 1e-200;
            j *= s;
            jp1 *= s;
            norm *= s;
            for o in out.iter_mut().skip(k) {
                *o *= s;
            }
        }
    }
    for o in out.iter_mut() {
        *o /= norm;
    }
}

/// Y_0(x) .. Y_mmax(x) for x > 0 by upward recurrence from Y₀, Y₁.
pub fn bessel_y_all(mmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; mmax.max(1) + 1];
    let (y0, y1) = y01(x);
    out[0] = y0;
    out[1] = y1;
    for m in 1..mmax {
        out[m + 1] = 2.0 * m as f64 / x * out[m] - out[m - 1];
    }
    out.truncate(mmax + 1);
    out
}

fn y01(x: f64) -> (f64, f64) {
    if x > ASYMPTOTIC_X {
        return (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1);
    }
    // Neumann series in even-order J's and its derivative.
    let n = 2 * (x as usize + 40);
    let j = bessel_j_all(n + 1, x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 1..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
    }
    let y0 = 2.0 / PI * (lg * j[0] - 2.0 * s0);
    let y1 = 2.0 / PI * (lg * j[1] - j[0] / x + s1);
    (y0, y1)
}

/// (J_ν, Y_ν) from the Hankel expansion, ν ∈ {0, 1}.
fn hankel_asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..80 {
        let kf = k as f64;
        if k > 0 {
            let odd = 2.0 * kf - 1.0;
            term *= (mu - odd * odd) / (kf * 8.0 * x);
        }
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (nu as f64 * FRAC_PI_2 + FRAC_PI_4);
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// H⁽¹⁾_0(x) .. H⁽¹⁾_mmax(x).
pub fn hankel1_all(mmax: usize, x: f64) -> Vec<C64> {
    let j = bessel_j_all(mmax, x);
    let y = bessel_y_all(mmax, x);
    j.iter().zip(&y).map(|(&a, &b)| C64::new(a, b)).collect()
}
