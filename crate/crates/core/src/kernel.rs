//! Reproducing kernels `K_{N,s}`, their weighted versions, the Bergman
//! kernel, and the boundary scaling limits `H_ℓ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::geometry::{BigPhi, DomainSpec, ExteriorMap};
use crate::moments::{moments, MomentOptions};
use crate::ortho::{orthonormalize, OrthoPolySet};
use crate::quadrature::weighted_plane_rule;
use crate::{Error, Result, C64};

/// A kernel value with the parameters it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: C64,
    pub n: usize,
    pub s: f64,
    pub weighted: bool,
}

/// Largest admissible `N` for weight exponent `s`: `⌊s − 1⌋`.
pub fn max_kernel_size(s: f64) -> usize {
    if s.is_infinite() {
        usize::MAX
    } else {
        (s - 1.0).floor().max(0.0) as usize
    }
}

fn check_size(polys: &OrthoPolySet, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("kernel size must be positive"));
    }
    if n > polys.n_max() + 1 {
        return Err(Error::InvalidParameter("kernel size exceeds the available polynomials"));
    }
    if n > max_kernel_size(polys.s()) {
        return Err(Error::DegreeTooLarge { degree: n - 1, s: polys.s() });
    }
    Ok(())
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `K_{N,s}(z,u) = Σ_{n<N} π_n(z) conj(π_n(u))`.
pub fn kernel_sum(polys: &OrthoPolySet, n: usize, z: C64, u: C64) -> Result<C64> {
    check_size(polys, n)?;
    let pz = polys.eval_all(z);
    let pu = if u == z { pz.clone() } else { polys.eval_all(u) };
    Ok(dot(&pz[..n], &pu[..n]))
}

/// `P_K^{-s}(z)`; for `s = ∞` the indicator of `K`.
pub fn weight_root(map: &ExteriorMap, s: f64, z: C64) -> Result<f64> {
    let p = map.equilibrium_potential(z)?;
    Ok(if s.is_infinite() {
        if p <= 1.0 {
            1.0
        } else {
            0.0
        }
    } else {
        p.powf(-s)
    })
}

/// `K̃_{N,s}(z,u) = P_K^{-s}(z) P_K^{-s}(u) K_{N,s}(z,u)`.
pub fn weighted_kernel(polys: &OrthoPolySet, n: usize, z: C64, u: C64) -> Result<C64> {
    let wz = weight_root(polys.map(), polys.s(), z)?;
    let wu = weight_root(polys.map(), polys.s(), u)?;
    if wz == 0.0 || wu == 0.0 {
        check_size(polys, n)?;
        return Ok(C64::zero());
    }
    Ok(kernel_sum(polys, n, z, u)? * (wz * wu))
}

pub fn kernel_eval(polys: &OrthoPolySet, n: usize, z: C64, u: C64, weighted: bool) -> Result<KernelEval> {
    let value = if weighted { weighted_kernel(polys, n, z, u)? } else { kernel_sum(polys, n, z, u)? };
    Ok(KernelEval { value, n, s: polys.s(), weighted })
}

/// Below this `|1 − v|` the closed form loses digits to cancellation and the
/// finite power sum is used instead.
const KERNEL_SERIES_RADIUS: f64 = 0.25;

/// `Σ_{n<N} (n+1)(1 − (n+1)/s) vⁿ`, summed in closed form away from `v = 1`.
pub fn disk_kernel_profile(n: usize, s: f64, v: C64) -> C64 {
    let inv_s = if s.is_infinite() { 0.0 } else { 1.0 / s };
    let nf = n as f64;
    let one = C64::new(1.0, 0.0);
    if (one - v).norm() < KERNEL_SERIES_RADIUS {
        let mut acc = C64::zero();
        for k in (0..n).rev() {
            let k1 = (k + 1) as f64;
            acc = acc * v + (k1 - k1 * k1 * inv_s);
        }
        return acc;
    }
    let d = one - v;
    let vn = v.powu(n as u32);
    let vn1 = vn * v;
    let vn2 = vn1 * v;
    let first = (-(vn * (nf + 1.0)) / d + (one - vn1) / (d * d)) * (1.0 - (nf + 1.0) * inv_s);
    let second = ((one + vn1) * (nf + 2.0) / (d * d) - (one - vn2) * 2.0 / (d * d * d)) * inv_s;
    first + second
}

fn outside_point(map: &ExteriorMap, z: C64) -> Result<C64> {
    match map.big_phi(z)? {
        BigPhi::Outside(w) => Ok(w),
        BigPhi::Inside => Err(Error::InsidePoint { z }),
    }
}

/// Boundary asymptotics of `K_{N,s}(z,u)` for `z, u` in the closure of `O`:
/// `Φ'(z) conj(Φ'(u))/π` times the disk profile in `v = Φ(z) conj(Φ(u))`.
pub fn kernel_asymptotic(map: &ExteriorMap, n: usize, s: f64, z: C64, u: C64) -> Result<C64> {
    let wz = outside_point(map, z)?;
    let wu = outside_point(map, u)?;
    let dz = map.phi_prime_unchecked(wz).inv();
    let du = map.phi_prime_unchecked(wu).inv();
    Ok(dz * du.conj() / PI * disk_kernel_profile(n, s, wz * wu.conj()))
}

/// Diagonal boundary asymptotics
/// `(|Φ'|²/π)[N(N+1)/2 (1 − (N+1)/s) + N(N+1)(N+2)/(6s)]` at `z = φ(e^{iθ})`.
pub fn kernel_diagonal_asymptotic(map: &ExteriorMap, n: usize, s: f64, theta: f64) -> f64 {
    let d = map.phi_prime_unchecked(C64::from_polar(1.0, theta)).norm_sqr().recip();
    let nf = n as f64;
    let inv_s = if s.is_infinite() { 0.0 } else { 1.0 / s };
    d / PI * (nf * (nf + 1.0) / 2.0 * (1.0 - (nf + 1.0) * inv_s) + nf * (nf + 1.0) * (nf + 2.0) / 6.0 * inv_s)
}

/// Bergman kernel value with the truncation that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergmanEval {
    pub value: C64,
    /// Number of Carleman polynomials summed; 0 for the closed form.
    pub terms: usize,
}

const BERGMAN_TOL: f64 = 1e-8;
const BERGMAN_MAX_TERMS: usize = 512;

/// `K_D(z,u)` for `z, u` in the interior. Closed form on the disk; otherwise
/// `K_{M,∞}` with `M` doubled until successive values agree to `1e-8`.
pub fn bergman_kernel(domain: &DomainSpec, z: C64, u: C64) -> Result<BergmanEval> {
    let map = domain.exterior_map()?;
    for p in [z, u] {
        if map.equilibrium_potential(p)? > 1.0 {
            return Err(Error::InvalidParameter("Bergman kernel needs interior points"));
        }
    }
    if let DomainSpec::Disk = domain {
        let d = C64::new(1.0, 0.0) - z * u.conj();
        return Ok(BergmanEval { value: (d * d).inv() / PI, terms: 0 });
    }
    let opts = MomentOptions { verify: false, ..MomentOptions::default() };
    let mut prev: Option<C64> = None;
    let mut m = 16;
    loop {
        let table = moments(&map, m - 1, f64::INFINITY, &opts)?;
        let polys = orthonormalize(&map, &table)?;
        let value = kernel_sum(&polys, m, z, u)?;
        if let Some(p) = prev {
            if (value - p).norm() <= BERGMAN_TOL * value.norm().max(1.0) {
                return Ok(BergmanEval { value, terms: m });
            }
        }
        if m >= BERGMAN_MAX_TERMS {
            return Err(Error::QuadratureNonConvergence { coarse: prev.unwrap_or(value), fine: value, nodes: m });
        }
        prev = Some(value);
        m *= 2;
    }
}

/// Below this `|τ|` the `H` functions are summed from their Taylor series.
const H_SERIES_RADIUS: f64 = 1.0;
const H_SERIES_TERMS: usize = 40;

/// `Σ_k c_k τ^k` with `c_k = (k+1)/(k+shift)!`.
fn h_series(tau: C64, shift: usize) -> C64 {
    let mut coeffs = [0.0; H_SERIES_TERMS];
    let mut fact = (1..=shift).map(|v| v as f64).product::<f64>();
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = (k + 1) as f64 / fact;
        fact *= (k + shift + 1) as f64;
    }
    coeffs.iter().rev().fold(C64::zero(), |acc, c| acc * tau + c)
}

/// `H_0(τ) = 2(e^τ(τ−1) + 1)/τ²`.
pub fn h0(tau: C64) -> C64 {
    if tau.norm() < H_SERIES_RADIUS {
        return h_series(tau, 2) * 2.0;
    }
    (tau.exp() * (tau - 1.0) + 1.0) * 2.0 / (tau * tau)
}

/// `H_1(τ) = 6(e^τ(τ−2) + τ + 2)/τ³`.
pub fn h1(tau: C64) -> C64 {
    if tau.norm() < H_SERIES_RADIUS {
        return h_series(tau, 3) * 6.0;
    }
    (tau.exp() * (tau - 2.0) + tau + 2.0) * 6.0 / (tau * tau * tau)
}

/// Weights `((3−3ℓ)/(3−2ℓ), ℓ/(3−2ℓ))` of `H_0` and `H_1` in `H_ℓ`.
pub fn h_weights(ell: f64) -> (f64, f64) {
    let d = 3.0 - 2.0 * ell;
    ((3.0 - 3.0 * ell) / d, ell / d)
}

/// `H_ℓ(τ)`, the convex combination of `H_0` and `H_1`.
pub fn h_limit(ell: f64, tau: C64) -> C64 {
    let (w0, w1) = h_weights(ell);
    let mut out = C64::zero();
    if w0 != 0.0 {
        out += h0(tau) * w0;
    }
    if w1 != 0.0 {
        out += h1(tau) * w1;
    }
    out
}

/// Direct (non-series) formulas, exposed for the branch-agreement check.
pub fn h_limit_direct(ell: f64, tau: C64) -> C64 {
    let (w0, w1) = h_weights(ell);
    let a = (tau.exp() * (tau - 1.0) + 1.0) * 2.0 / (tau * tau);
    let b = (tau.exp() * (tau - 2.0) + tau + 2.0) * 6.0 / (tau * tau * tau);
    a * w0 + b * w1
}

/// Boundary point `z = φ(e^{iθ})`.
pub fn boundary_point(map: &ExteriorMap, theta: f64) -> C64 {
    map.boundary_point(theta)
}

/// `τ(a,z) = a Φ'(z) conj(Φ(z))` at `z = φ(e^{iθ})`.
pub fn tau_of(map: &ExteriorMap, a: C64, theta: f64) -> C64 {
    let w = C64::from_polar(1.0, theta);
    a / map.phi_prime_unchecked(w) * w.conj()
}

/// `ω(a,z) = exp(−Re τ/ℓ)` when `Re τ > 0`, else 1. At `ℓ = 0` this is the
/// limit: 0 for outward `a`, 1 otherwise.
pub fn omega_of(map: &ExteriorMap, a: C64, theta: f64, ell: f64) -> f64 {
    let re = tau_of(map, a, theta).re;
    if re > 0.0 {
        if ell > 0.0 {
            (-re / ell).exp()
        } else {
            0.0
        }
    } else {
        1.0
    }
}

/// `K(z + a/N, z + b/N)/K(z, z)` at `z = φ(e^{iθ})`; the weighted kernel
/// when `weighted` is set.
pub fn scaled_ratio(polys: &OrthoPolySet, n: usize, theta: f64, a: C64, b: C64, weighted: bool) -> Result<C64> {
    let z = polys.map().boundary_point(theta);
    let nf = n as f64;
    let za = z + a / nf;
    let zb = z + b / nf;
    let k = |x, y| if weighted { weighted_kernel(polys, n, x, y) } else { kernel_sum(polys, n, x, y) };
    Ok(k(za, zb)? / k(z, z)?)
}

/// Limit predicted for [`scaled_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingPrediction {
    Value(C64),
    /// The weighted `ℓ = 0` limit with `Re τ = 0`, which the theory leaves open.
    Undefined,
}

impl ScalingPrediction {
    pub fn value(self) -> Option<C64> {
        match self {
            ScalingPrediction::Value(v) => Some(v),
            ScalingPrediction::Undefined => None,
        }
    }
}

/// `|Re τ|` below this counts as tangential.
const TANGENT_TOL: f64 = 1e-12;

pub fn scaling_predictor(map: &ExteriorMap, theta: f64, a: C64, b: C64, ell: f64, weighted: bool) -> ScalingPrediction {
    let ta = tau_of(map, a, theta);
    let tb = tau_of(map, b, theta);
    let h = h_limit(ell, ta + tb.conj());
    if !weighted {
        return ScalingPrediction::Value(h);
    }
    if ell > 0.0 {
        return ScalingPrediction::Value(h * omega_of(map, a, theta, ell) * omega_of(map, b, theta, ell));
    }
    if ta.re > TANGENT_TOL || tb.re > TANGENT_TOL {
        ScalingPrediction::Value(C64::zero())
    } else if ta.re.abs() <= TANGENT_TOL || tb.re.abs() <= TANGENT_TOL {
        ScalingPrediction::Undefined
    } else {
        ScalingPrediction::Value(h)
    }
}

/// Christoffel bound `K(z,z) ≥ |p(z)|²/‖p‖²` for each trial polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelReport {
    pub kernel: f64,
    /// `|p(z)|²/‖p‖²` per trial.
    pub ratios: Vec<f64>,
    pub holds: bool,
}

/// Node counts for the area quadrature of the invariant checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaNodes {
    pub angular: usize,
    pub radial: usize,
}

impl Default for AreaNodes {
    fn default() -> Self {
        AreaNodes { angular: 128, radial: 48 }
    }
}

/// Checks the Christoffel principle at `z` for trial polynomials of degree
/// `< N` (ascending monomial coefficients), with norms from area quadrature.
pub fn christoffel_check(
    polys: &OrthoPolySet,
    n: usize,
    z: C64,
    trials: &[Vec<C64>],
    nodes: AreaNodes,
) -> Result<ChristoffelReport> {
    let kernel = kernel_sum(polys, n, z, z)?.re;
    let rule = weighted_plane_rule(polys.map(), polys.s(), nodes.angular, nodes.radial)?;
    let mut ratios = Vec::with_capacity(trials.len());
    for p in trials {
        if p.len() > n {
            return Err(Error::InvalidParameter("trial polynomial degree must be below N"));
        }
        let norm = rule.integrate(|u| C64::new(crate::faber::horner(p, u).norm_sqr(), 0.0)).re;
        ratios.push(crate::faber::horner(p, z).norm_sqr() / norm);
    }
    let holds = ratios.iter().all(|r| *r <= kernel * (1.0 + 1e-10));
    Ok(ChristoffelReport { kernel, ratios, holds })
}

/// `|p(z) − ∫ p(u) K_{N,s}(z,u) P_K^{-2s}(u) dA(u)|` for a polynomial of degree
/// `< N` (ascending monomial coefficients).
pub fn reproducing_check(polys: &OrthoPolySet, n: usize, p: &[C64], z: C64, nodes: AreaNodes) -> Result<f64> {
    check_size(polys, n)?;
    if p.len() > n {
        return Err(Error::InvalidParameter("polynomial degree must be below N"));
    }
    let rule = weighted_plane_rule(polys.map(), polys.s(), nodes.angular, nodes.radial)?;
    let pz = polys.eval_all(z);
    let integral = rule.integrate(|u| {
        let pu = polys.eval_all(u);
        crate::faber::horner(p, u) * dot(&pz[..n], &pu[..n])
    });
    Ok((crate::faber::horner(p, z) - integral).norm())
}
