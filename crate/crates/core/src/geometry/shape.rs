use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A closed convex curve centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Circle { r: f64 },
    /// Semi-axes a along x¹ and b along x².
    Ellipse { a: f64, b: f64 },
    Square { half: f64 },
}

impl Shape {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Circle { r } => r > 0.0 && r.is_finite(),
            Shape::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            Shape::Square { half } => half > 0.0 && half.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!("non-positive size in {self}")))
        }
    }

    /// Gauge function: < 1 inside, 1 on the curve, > 1 outside.
    pub fn level(&self, p: [f64; 2]) -> f64 {
        match *self {
            Shape::Circle { r } => p[0].hypot(p[1]) / r,
            Shape::Ellipse { a, b } => (p[0] / a).hypot(p[1] / b),
            Shape::Square { half } => p[0].abs().max(p[1].abs()) / half,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.level(p) < 1.0
    }

    /// Unsigned distance to the curve; first-order accurate for the ellipse,
    /// exact otherwise.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            Shape::Circle { r } => (p[0].hypot(p[1]) - r).abs(),
            Shape::Ellipse { a, b } => {
                let g = (p[0] / a).hypot(p[1] / b);
                if g == 0.0 {
                    return a.min(b);
                }
                let grad = (p[0] / (a * a)).hypot(p[1] / (b * b)) / g;
                (g - 1.0).abs() / grad
            }
            Shape::Square { half } => {
                let (x, y) = (p[0].abs(), p[1].abs());
                if x <= half && y <= half {
                    (half - x).min(half - y)
                } else {
                    (x - half).max(0.0).hypot((y - half).max(0.0))
                }
            }
        }
    }

    /// Distance of a point that should lie on the curve from the curve,
    /// computed without the first-order ellipse approximation.
    pub fn on_curve_error(&self, p: [f64; 2]) -> f64 {
        match *self {
            Shape::Ellipse { a, b } => {
                let t = (p[1] * a).atan2(p[0] * b);
                (p[0] - a * t.cos()).hypot(p[1] - b * t.sin())
            }
            _ => self.distance(p),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Shape::Circle { r } => PI * r * r,
            Shape::Ellipse { a, b } => PI * a * b,
            Shape::Square { half } => 4.0 * half * half,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            Shape::Circle { r } => 2.0 * PI * r,
            Shape::Square { half } => 8.0 * half,
            Shape::Ellipse { a, b } => {
                // Trapezoidal rule is spectrally accurate for this periodic integrand.
                let n = 4096;
                let dt = 2.0 * PI / n as f64;
                (0..n)
                    .map(|i| {
                        let (s, c) = (i as f64 * dt).sin_cos();
                        (a * s).hypot(b * c)
                    })
                    .sum::<f64>()
                    * dt
            }
        }
    }

    /// Largest |x| over the curve.
    pub fn circumradius(&self) -> f64 {
        match *self {
            Shape::Circle { r } => r,
            Shape::Ellipse { a, b } => a.max(b),
            Shape::Square { half } => half * 2f64.sqrt(),
        }
    }

    /// Smallest |x| over the curve.
    pub fn inradius(&self) -> f64 {
        match *self {
            Shape::Circle { r } => r,
            Shape::Ellipse { a, b } => a.min(b),
            Shape::Square { half } => half,
        }
    }

    pub fn scaled(&self, s: f64) -> Shape {
        match *self {
            Shape::Circle { r } => Shape::Circle { r: r * s },
            Shape::Ellipse { a, b } => Shape::Ellipse { a: a * s, b: b * s },
            Shape::Square { half } => Shape::Square { half: half * s },
        }
    }

    /// Point at boundary parameter t ∈ [0, 1): polar angle 2πt for the circle
    /// and ellipse, counter-clockwise arclength from (half, 0) for the square.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        match *self {
            Shape::Circle { r } => {
                let (s, c) = (2.0 * PI * t).sin_cos();
                [r * c, r * s]
            }
            Shape::Ellipse { a, b } => {
                let (s, c) = (2.0 * PI * t).sin_cos();
                [a * c, b * s]
            }
            Shape::Square { half } => {
                let u = t.rem_euclid(1.0) * 8.0;
                if u < 1.0 {
                    [half, u * half]
                } else if u < 3.0 {
                    [half - (u - 1.0) * half, half]
                } else if u < 5.0 {
                    [-half, half - (u - 3.0) * half]
                } else if u < 7.0 {
                    [-half + (u - 5.0) * half, -half]
                } else {
                    [half, -half + (u - 7.0) * half]
                }
            }
        }
    }

    /// Closed counter-clockwise polygon with every vertex on the curve and every
    /// chord no longer than h. Square corners are always vertices.
    pub fn boundary_points(&self, h: f64) -> Vec<[f64; 2]> {
        match *self {
            Shape::Circle { r } => {
                let n = ((2.0 * PI * r / h).ceil() as usize).max(8);
                (0..n)
                    .map(|i| {
                        let (s, c) = (2.0 * PI * i as f64 / n as f64).sin_cos();
                        [r * c, r * s]
                    })
                    .collect()
            }
            Shape::Ellipse { a, b } => ellipse_points(a, b, h),
            Shape::Square { half } => {
                let n = ((2.0 * half / h).ceil() as usize).max(2);
                let step = 2.0 * half / n as f64;
                let corners = [[half, -half], [half, half], [-half, half], [-half, -half]];
                let dirs = [[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]];
                let mut out = Vec::with_capacity(4 * n);
                for (c, d) in corners.iter().zip(dirs) {
                    for i in 0..n {
                        let s = i as f64 * step;
                        out.push([c[0] + d[0] * s, c[1] + d[1] * s]);
                    }
                }
                out
            }
        }
    }
}

fn ellipse_points(a: f64, b: f64, h: f64) -> Vec<[f64; 2]> {
    let fine = 20_000;
    let mut cum = Vec::with_capacity(fine + 1);
    cum.push(0.0);
    let mut prev = [a, 0.0];
    for i in 1..=fine {
        let (s, c) = (2.0 * PI * i as f64 / fine as f64).sin_cos();
        let p = [a * c, b * s];
        let last = *cum.last().unwrap();
        cum.push(last + (p[0] - prev[0]).hypot(p[1] - prev[1]));
        prev = p;
    }
    let total = cum[fine];
    let n = ((total / h).ceil() as usize).max(8);
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        let t = 2.0 * PI * (j as f64 + frac) / fine as f64;
        let (s, c) = t.sin_cos();
        out.push([a * c, b * s]);
    }
    out
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::Circle { r } => write!(f, "circle:{r}"),
            Shape::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            Shape::Square { half } => write!(f, "square:{half}"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// `circle:R`, `ellipse:A,B` or `square:HALF`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Geometry(format!("cannot parse shape '{s}'"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let shape = match (kind.trim(), nums.as_slice()) {
            ("circle", [r]) => Shape::Circle { r: *r },
            ("ellipse", [a, b]) => Shape::Ellipse { a: *a, b: *b },
            ("square", [h]) => Shape::Square { half: *h },
            _ => return Err(bad()),
        };
        shape.validate()?;
        Ok(shape)
    }
}
