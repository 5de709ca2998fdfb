//! Quadrature rules: trapezoidal Fourier analysis on circles, Gauss–Legendre,
//! and tensor area rules for interior, exterior and disk-shaped regions.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::geometry::ExteriorMap;
use crate::{Error, Result, C64};

/// Laurent coefficients `c_p` of `f(w) = Σ c_p w^p` from equispaced samples
/// `f(R e^{2πia/M})`, `a = 0..M`, by the trapezoidal rule.
///
/// Exact (up to rounding) when the powers present in `f` differ pairwise
/// by less than `M`.
pub fn laurent_coefficients(samples: &[C64], radius: f64, powers: &[i64]) -> Vec<C64> {
    let m = samples.len();
    let twiddle: Vec<C64> = (0..m).map(|a| C64::from_polar(1.0, -2.0 * PI * a as f64 / m as f64)).collect();
    powers
        .iter()
        .map(|&p| {
            let step = p.rem_euclid(m as i64) as usize;
            let mut idx = 0usize;
            let mut acc = C64::zero();
            for f in samples {
                acc += f * twiddle[idx];
                idx += step;
                if idx >= m {
                    idx -= m;
                }
            }
            acc / m as f64 * radius.powi(-(p as i32))
        })
        .collect()
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut t = ((4 * i + 3) as f64 * PI / (4 * n + 2) as f64).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d.is_finite() {
            dp = d;
        }
        x.push(t);
        w.push(2.0 / ((1.0 - t * t) * dp * dp));
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|v| v * half).collect())
}

/// Planar quadrature: `∫ f dA ≈ Σ weights[i] f(points[i])`.
#[derive(Debug, Clone, Default)]
pub struct AreaRule {
    pub points: Vec<C64>,
    pub weights: Vec<f64>,
}

impl AreaRule {
    pub fn integrate(&self, mut f: impl FnMut(C64) -> C64) -> C64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| f(*z) * *w).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: AreaRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Tensor rule for the interior `D`, parameterised as `z = c_0 + t·(φ(e^{iθ}) − c_0)`.
///
/// Requires `D` to be star-shaped with respect to `c_0`; exact for
/// polynomials once the node counts exceed the degrees in `t` and `θ`.
pub fn interior_rule(map: &ExteriorMap, angular: usize, radial: usize) -> Result<AreaRule> {
    let center = map.laurent_coeffs()[0];
    let (ts, tw) = gauss_legendre_on(radial, 0.0, 1.0);
    let dtheta = 2.0 * PI / angular as f64;
    let mut rule = AreaRule::default();
    for a in 0..angular {
        let theta = dtheta * a as f64;
        let w = C64::from_polar(1.0, theta);
        let b = map.phi_unchecked(w) - center;
        // db/dθ = i w φ'(w)
        let db = C64::i() * w * map.phi_prime_unchecked(w);
        let jac = (b.conj() * db).im;
        if !(jac > 0.0) {
            return Err(Error::InvalidParameter("interior is not star-shaped about the map centre"));
        }
        for (t, wt) in ts.iter().zip(&tw) {
            rule.points.push(center + b * *t);
            rule.weights.push(wt * t * jac * dtheta);
        }
    }
    Ok(rule)
}

/// Tensor rule for `∫_O f(z) |Φ(z)|^{-2s} dA(z)` pulled back to the `w`-plane
/// and written in `t = 1/|w|`; the weight `|Φ|^{-2s}` is folded into the
/// returned weights.
pub fn exterior_rule(map: &ExteriorMap, s: f64, angular: usize, radial: usize) -> AreaRule {
    let (ts, tw) = gauss_legendre_on(radial, 0.0, 1.0);
    let dtheta = 2.0 * PI / angular as f64;
    let mut rule = AreaRule::default();
    for a in 0..angular {
        let theta = dtheta * a as f64;
        for (t, wt) in ts.iter().zip(&tw) {
            let w = C64::from_polar(1.0 / t, theta);
            // dA(w) = r dr dθ = t^{-3} dt dθ
            let jac = map.phi_prime_unchecked(w).norm_sqr() / (t * t * t);
            rule.points.push(map.phi_unchecked(w));
            rule.weights.push(wt * dtheta * jac * t.powf(2.0 * s));
        }
    }
    rule
}

/// Tensor rule for `∫_C f(z) P_K^{-2s}(z) dA`; `s = ∞` keeps only the interior.
pub fn weighted_plane_rule(map: &ExteriorMap, s: f64, angular: usize, radial: usize) -> Result<AreaRule> {
    let mut rule = interior_rule(map, angular, radial)?;
    if s.is_finite() {
        rule.extend(exterior_rule(map, s, angular, radial));
    }
    Ok(rule)
}

/// Polar rule for the disk `|z − center| ≤ radius`, with `panels` equal
/// radial Gauss–Legendre panels of `radial` nodes each.
pub fn disk_region_rule(center: C64, radius: f64, angular: usize, radial: usize, panels: usize) -> AreaRule {
    let mut rule = AreaRule::default();
    if radius <= 0.0 {
        return rule;
    }
    let dtheta = 2.0 * PI / angular as f64;
    let panels = panels.max(1);
    for pnl in 0..panels {
        let lo = radius * pnl as f64 / panels as f64;
        let hi = radius * (pnl + 1) as f64 / panels as f64;
        let (rs, rw) = gauss_legendre_on(radial, lo, hi);
        for a in 0..angular {
            let e = C64::from_polar(1.0, dtheta * a as f64);
            for (r, w) in rs.iter().zip(&rw) {
                rule.points.push(center + e * *r);
                rule.weights.push(w * r * dtheta);
            }
        }
    }
    rule
}
