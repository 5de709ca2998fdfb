//! Orthonormal polynomials `π_{n,s}` for the weight `P_K^{-2s}`, built in the
//! Faber basis, together with closed forms and asymptotic predictors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::faber::{faber_all, FaberBasis};
use crate::geometry::{BigPhi, DomainSpec, ExteriorMap};
use crate::linalg::CMatrix;
use crate::moments::{check_degree, disk_moment, EpsilonTable, MomentTable};
use crate::{Error, Result, C64};

/// `π_{0,s}, …, π_{n_max,s}` as combinations of Faber polynomials.
#[derive(Debug, Clone)]
pub struct OrthoPolySet {
    s: f64,
    basis: FaberBasis,
    /// Row `n` holds the Faber coefficients of `π_n`; lower triangular.
    faber_coeffs: CMatrix,
    kappas: Vec<f64>,
}

impl OrthoPolySet {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_max(&self) -> usize {
        self.kappas.len() - 1
    }

    pub fn map(&self) -> &ExteriorMap {
        self.basis.map()
    }

    pub fn faber_coeffs(&self) -> &CMatrix {
        &self.faber_coeffs
    }

    /// Leading monomial coefficients `κ_{n,s}`.
    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn kappa(&self, n: usize) -> f64 {
        self.kappas[n]
    }

    /// `π_0(z), …, π_{n_max}(z)`.
    pub fn eval_all(&self, z: C64) -> Vec<C64> {
        let f = self.basis.eval_all(z);
        (0..=self.n_max())
            .map(|n| self.faber_coeffs.row(n)[..=n].iter().zip(&f).map(|(c, v)| c * v).sum())
            .collect()
    }

    pub fn eval(&self, n: usize, z: C64) -> C64 {
        self.eval_all(z)[n]
    }

    /// Ascending monomial coefficients of `π_n`.
    pub fn mono_coeffs(&self, n: usize) -> Vec<C64> {
        let fabers = faber_all(self.map(), n);
        let mut out = vec![C64::zero(); n + 1];
        for (j, f) in fabers.iter().enumerate() {
            let c = self.faber_coeffs[(n, j)];
            for (i, a) in f.mono_coeffs.iter().enumerate() {
                out[i] += c * a;
            }
        }
        out
    }

    /// Closed-form set for the disk and ellipses, where `π_n` is a multiple of
    /// `F_n`.
    pub fn from_closed_form(domain: &DomainSpec, n_max: usize, s: f64) -> Result<Self> {
        check_degree(n_max, s)?;
        let q = domain
            .ellipse_parameter()
            .ok_or(Error::InvalidParameter("no closed form for a custom map"))?;
        let map = domain.exterior_map()?;
        let scale: Vec<f64> = (0..=n_max).map(|n| ellipse_scale(q, n, s)).collect();
        let faber_coeffs = CMatrix::from_fn(n_max + 1, n_max + 1, |i, j| {
            if i == j {
                C64::new(scale[i], 0.0)
            } else {
                C64::zero()
            }
        });
        Ok(OrthoPolySet { s, basis: FaberBasis::new(&map, n_max), faber_coeffs, kappas: scale })
    }

    /// Largest `|⟨π_j, π_k⟩ − δ_{jk}|` measured with the given moments.
    pub fn orthonormality_residual(&self, moments: &MomentTable) -> f64 {
        let n = self.n_max().min(moments.n_max);
        let g = moments.gram(n);
        let c = CMatrix::from_fn(n + 1, n + 1, |i, j| self.faber_coeffs[(i, j)]);
        let prod = c.matmul(&g).matmul(&c.adjoint());
        let mut worst = 0.0_f64;
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - want).norm());
            }
        }
        worst
    }
}

/// Orthonormalises the Faber basis against `moments` by a Cholesky
/// factorisation of the Gram matrix, rescaled so that it is `I + O(ε)`.
pub fn orthonormalize(map: &ExteriorMap, moments: &MomentTable) -> Result<OrthoPolySet> {
    let n = moments.n_max;
    let s = moments.s;
    let root: Vec<f64> = (0..=n).map(|k| disk_moment(k, s).sqrt()).collect();
    let g = moments.gram(n);
    let scaled = CMatrix::from_fn(n + 1, n + 1, |j, k| g[(j, k)] / (root[j] * root[k]));
    let inv = scaled.cholesky()?.lower_inverse();
    let faber_coeffs = CMatrix::from_fn(n + 1, n + 1, |i, j| inv[(i, j)] / root[j]);
    let cap = map.capacity();
    let kappas = (0..=n).map(|i| faber_coeffs[(i, i)].re * cap.powi(-(i as i32 + 1))).collect();
    Ok(OrthoPolySet { s, basis: FaberBasis::new(map, n), faber_coeffs, kappas })
}

/// Faber coefficients of `π_n` from the bordered determinant
/// `det[[m_{k,j}]_{k<n}; [F_j]] / sqrt(D_{n−1} D_n)`.
pub fn orthopoly_det(moments: &MomentTable, n: usize) -> Result<Vec<C64>> {
    if n > moments.n_max {
        return Err(Error::InvalidParameter("degree exceeds the moment table"));
    }
    let d_prev = if n == 0 { 1.0 } else { moments.entries.leading(n).determinant().re };
    let d_n = moments.entries.leading(n + 1).determinant().re;
    if !(d_prev > 0.0 && d_n > 0.0) {
        return Err(Error::NotPositiveDefinite { index: n, pivot: d_n.min(d_prev) });
    }
    let norm = (d_prev * d_n).sqrt();
    Ok((0..=n)
        .map(|j| {
            let minor = CMatrix::from_fn(n, n, |r, col| {
                let c = if col < j { col } else { col + 1 };
                moments.entries[(r, c)]
            })
            .determinant();
            let sign = if (n + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let minor = if n == 0 { C64::new(1.0, 0.0) } else { minor };
            minor * (sign / norm)
        })
        .collect())
}

/// `Δ_{n,s} = det[δ_{kj} + ε_{k,j}]_{k,j ≤ n}`.
pub fn delta_det(eps: &EpsilonTable, n: usize) -> f64 {
    let m = CMatrix::from_fn(n + 1, n + 1, |k, j| {
        let d = if k == j { C64::new(1.0, 0.0) } else { C64::zero() };
        d + eps.entry(k, j)
    });
    m.determinant().re
}

/// `sqrt(((n+1)/π)(1 − (n+1)/s))`, the disk normalisation.
pub fn disk_scale(n: usize, s: f64) -> f64 {
    let n1 = (n + 1) as f64;
    let tail = if s.is_infinite() { 1.0 } else { 1.0 - n1 / s };
    (n1 / PI * tail).sqrt()
}

/// Normalising constant of `π_{n,s} = c·F_n` on the ellipse `w + q/w`.
fn ellipse_scale(q: f64, n: usize, s: f64) -> f64 {
    let n1 = (n + 1) as f64;
    let ratio = if s.is_infinite() { 1.0 } else { (s - n1) / (s + n1) };
    disk_scale(n, s) / (1.0 - q.powi(2 * n as i32 + 2) * ratio).sqrt()
}

/// Leading-coefficient predictor `γ^{-(n+1)} sqrt(((n+1)/π)(1−(n+1)/s))`.
pub fn kappa_asymptotic(n: usize, s: f64, map: &ExteriorMap) -> f64 {
    map.capacity().powi(-(n as i32 + 1)) * disk_scale(n, s)
}

/// Exterior predictor `sqrt(((n+1)/π)(1−(n+1)/s)) Φⁿ(z) Φ'(z)`.
pub fn exterior_asymptotic(n: usize, s: f64, map: &ExteriorMap, z: C64) -> Result<C64> {
    let w = match map.big_phi(z)? {
        BigPhi::Outside(w) => w,
        BigPhi::Inside => return Err(Error::InsidePoint { z }),
    };
    Ok(w.powu(n as u32) / map.phi_prime_unchecked(w) * disk_scale(n, s))
}

/// Boundary regularity used to select an error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    /// Analytic boundary with `φ` univalent beyond radius `rho < 1`.
    Analytic { rho: f64 },
    /// `C^{p+1,α}` boundary.
    Holder { p: u32, alpha: f64 },
}

/// How `n` and `s` grow together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `limsup n/s < 1`.
    RatioBelowOne,
    /// `n/s → 1`.
    RatioOne,
}

fn check_smoothness(smooth: Smoothness) -> Result<()> {
    match smooth {
        Smoothness::Analytic { rho } if !(rho > 0.0 && rho < 1.0) => {
            Err(Error::InvalidParameter("rho must lie in (0, 1)"))
        }
        Smoothness::Holder { p, alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                Err(Error::InvalidParameter("alpha must lie in (0, 1)"))
            } else if p as f64 + alpha <= 0.5 {
                Err(Error::InvalidParameter("p + alpha must exceed 1/2"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// Error scale `Σ_n` of the exterior asymptotics.
pub fn sigma_model(n: usize, smooth: Smoothness, regime: Regime) -> Result<f64> {
    check_smoothness(smooth)?;
    let nf = n as f64;
    match smooth {
        Smoothness::Analytic { rho } => Ok(rho.powi(n as i32)),
        Smoothness::Holder { p, alpha } => match (p, regime) {
            (p, _) if p >= 2 => Ok(nf.ln() / nf.powf(p as f64 + alpha)),
            (1, Regime::RatioBelowOne) => Ok(nf.ln() / nf.powf(1.0 + alpha)),
            (1, Regime::RatioOne) => Ok(nf.powf(-2.0 * alpha)),
            (_, Regime::RatioBelowOne) => Ok(nf.powf(1.0 - 2.0 * alpha)),
            (_, Regime::RatioOne) => Err(Error::NotCovered("p = 0 with n/s → 1")),
        },
    }
}

/// Error scale of the leading-coefficient asymptotics: `ρ^{2n}` or
/// `n^{−2(p+α)}`.
pub fn kappa_sigma_model(n: usize, smooth: Smoothness) -> Result<f64> {
    check_smoothness(smooth)?;
    Ok(match smooth {
        Smoothness::Analytic { rho } => rho.powi(2 * n as i32),
        Smoothness::Holder { p, alpha } => (n as f64).powf(-2.0 * (p as f64 + alpha)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub kappa_pred: f64,
    pub exterior_value_pred: C64,
    pub sigma: f64,
}

pub fn predict(
    n: usize,
    s: f64,
    map: &ExteriorMap,
    z: C64,
    smooth: Smoothness,
    regime: Regime,
) -> Result<AsymptoticPrediction> {
    Ok(AsymptoticPrediction {
        kappa_pred: kappa_asymptotic(n, s, map),
        exterior_value_pred: exterior_asymptotic(n, s, map, z)?,
        sigma: sigma_model(n, smooth, regime)?,
    })
}

/// Domains with explicit orthonormal polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormDomain {
    Disk,
    Ellipse { q: f64 },
    /// The segment `[−2, 2]`, the degenerate ellipse `q = 1`.
    Interval,
}

/// Explicit `π_{n,s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub domain: ClosedFormDomain,
    pub n: usize,
    pub s: f64,
    /// `π_n = scale · U_n` with `U_n` the Chebyshev-type polynomial of the domain.
    pub scale: f64,
    /// Set for the interval, which the asymptotic theory does not cover.
    pub outside_theorem_scope: bool,
}

pub fn closed_form(domain: ClosedFormDomain, n: usize, s: f64) -> Result<ClosedForm> {
    check_degree(n, s)?;
    let (scale, outside) = match domain {
        ClosedFormDomain::Disk => (disk_scale(n, s), false),
        ClosedFormDomain::Ellipse { q } => {
            if !(0.0..1.0).contains(&q) {
                return Err(Error::InvalidParameter("ellipse parameter must lie in [0, 1)"));
            }
            (ellipse_scale(q, n, s), false)
        }
        ClosedFormDomain::Interval => {
            if s.is_infinite() {
                return Err(Error::InvalidParameter("the interval has no area measure"));
            }
            let n1 = (n + 1) as f64;
            (((s * s - n1 * n1) / (2.0 * PI * s)).sqrt(), true)
        }
    };
    Ok(ClosedForm { domain, n, s, scale, outside_theorem_scope: outside })
}

impl ClosedForm {
    fn q(&self) -> f64 {
        match self.domain {
            ClosedFormDomain::Disk => 0.0,
            ClosedFormDomain::Ellipse { q } => q,
            ClosedFormDomain::Interval => 1.0,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.scale
    }

    /// `U_{k+1} = z U_k − q U_{k−1}` with `U_0 = 1`, `U_1 = z`.
    pub fn eval(&self, z: C64) -> C64 {
        let q = self.q();
        let mut prev = C64::new(1.0, 0.0);
        if self.n == 0 {
            return prev * self.scale;
        }
        let mut cur = z;
        for _ in 1..self.n {
            let next = z * cur - prev * q;
            prev = cur;
            cur = next;
        }
        cur * self.scale
    }

    /// Interval evaluator through the branch `(w₊^{n+1} − w₋^{n+1})/(w₊ − w₋)`,
    /// `w± = (z ± sqrt(z²−4))/2`, with the root positive for large real `z`.
    pub fn eval_branch(&self, z: C64) -> C64 {
        let q = self.q();
        let mut root = (z * z - 4.0 * q).sqrt();
        // principal sqrt; flip so that root ~ z at infinity
        if (root.conj() * z).re < 0.0 {
            root = -root;
        }
        let wp = (z + root) * 0.5;
        let wm = (z - root) * 0.5;
        let k = self.n as u32 + 1;
        if root.norm() < 1e-12 {
            // double root: U_n = (n+1) w^n
            return wp.powu(self.n as u32) * ((self.n + 1) as f64 * self.scale);
        }
        (wp.powu(k) - wm.powu(k)) / root * self.scale
    }
}
