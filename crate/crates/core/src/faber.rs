//! Faber polynomials `F_n` associated with `Φ'`: the polynomial part of
//! `Φⁿ Φ'`, and their remainders `E_n = F_n − Φⁿ Φ'` on the exterior.
//!
//! The classical Faber polynomials `F̃_n` (polynomial part of `Φⁿ`) obey a
//! recurrence in the Laurent coefficients of `φ`,
//!
//! ```text
//! cap·F̃_{n+1} = (z − c_0) F̃_n − Σ_{k=1..n} c_k F̃_{n−k} − n c_n ,
//! ```
//!
//! and `(n+1) F_n = F̃'_{n+1}`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::geometry::{BigPhi, ExteriorMap};
use crate::quadrature::laurent_coefficients;
use crate::{Error, Result, C64};

/// `F_n` in the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FaberPolynomial {
    pub degree: usize,
    /// Ascending monomial coefficients, length `degree + 1`.
    pub mono_coeffs: Vec<C64>,
}

impl FaberPolynomial {
    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.mono_coeffs, z)
    }

    pub fn leading(&self) -> C64 {
        self.mono_coeffs[self.degree]
    }
}

/// `E_n(z)` with the two terms it is assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderEval {
    pub value: C64,
    pub faber: C64,
    /// `Φⁿ(z) Φ'(z)`.
    pub principal: C64,
}

pub(crate) fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::zero(), |acc, c| acc * z + c)
}

/// Faber polynomials `F_0, …, F_{n_max}` in the monomial basis.
pub fn faber_all(map: &ExteriorMap, n_max: usize) -> Vec<FaberPolynomial> {
    let classical = classical_faber_coeffs(map, n_max + 1);
    (0..=n_max)
        .map(|n| {
            let next = &classical[n + 1];
            let scale = 1.0 / (n + 1) as f64;
            let mono_coeffs = (1..next.len()).map(|i| next[i] * (i as f64 * scale)).collect();
            FaberPolynomial { degree: n, mono_coeffs }
        })
        .collect()
}

/// Classical Faber polynomials `F̃_0, …, F̃_{n_max}` (monomial coefficients).
pub fn classical_faber_coeffs(map: &ExteriorMap, n_max: usize) -> Vec<Vec<C64>> {
    let c = map.laurent_coeffs();
    let m = map.degree();
    let inv_cap = 1.0 / map.capacity();
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(n_max + 1);
    out.push(vec![C64::new(1.0, 0.0)]);
    for n in 0..n_max {
        let mut next = vec![C64::zero(); n + 2];
        for (i, &a) in out[n].iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * c[0];
        }
        for k in 1..=n.min(m) {
            for (i, &a) in out[n - k].iter().enumerate() {
                next[i] -= a * c[k];
            }
        }
        if n >= 1 && n <= m {
            next[0] -= c[n] * n as f64;
        }
        for v in next.iter_mut() {
            *v *= inv_cap;
        }
        out.push(next);
    }
    out
}

/// Pointwise evaluator for the Faber family via the three-term-style
/// recurrence, avoiding the monomial basis.
#[derive(Debug, Clone)]
pub struct FaberBasis {
    map: ExteriorMap,
    n_max: usize,
}

impl FaberBasis {
    pub fn new(map: &ExteriorMap, n_max: usize) -> Self {
        FaberBasis { map: map.clone(), n_max }
    }

    pub fn map(&self) -> &ExteriorMap {
        &self.map
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `F_0(z), …, F_{n_max}(z)`.
    pub fn eval_all(&self, z: C64) -> Vec<C64> {
        self.eval_with_antiderivatives(z).0
    }

    /// `(F_n(z), F̃_{n+1}(z)/(n+1))` for `n = 0..=n_max`; the second family are
    /// antiderivatives of the first.
    pub fn eval_with_antiderivatives(&self, z: C64) -> (Vec<C64>, Vec<C64>) {
        let c = self.map.laurent_coeffs();
        let m = self.map.degree();
        let inv_cap = 1.0 / self.map.capacity();
        let len = self.n_max + 2;
        let mut t = Vec::with_capacity(len);
        let mut d = Vec::with_capacity(len);
        t.push(C64::new(1.0, 0.0));
        d.push(C64::zero());
        let shifted = z - c[0];
        for n in 0..len - 1 {
            let mut tn = shifted * t[n];
            let mut dn = t[n] + shifted * d[n];
            for k in 1..=n.min(m) {
                tn -= c[k] * t[n - k];
                dn -= c[k] * d[n - k];
            }
            if n >= 1 && n <= m {
                tn -= c[n] * n as f64;
            }
            t.push(tn * inv_cap);
            d.push(dn * inv_cap);
        }
        let mut f = Vec::with_capacity(self.n_max + 1);
        let mut g = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            let s = 1.0 / (n + 1) as f64;
            f.push(d[n + 1] * s);
            g.push(t[n + 1] * s);
        }
        (f, g)
    }
}

/// Brute-force coefficients of `F_n`, independent of the recurrence.
///
/// Samples `h(w) = wⁿ/φ'(w) = (ΦⁿΦ')(φ(w))` on `|w| = 2`, recovers its Laurent
/// coefficients by the trapezoidal rule, and solves the triangular system
/// matching the powers `wⁿ, …, w⁰` of `Σ α_i φ(w)^i` (the remainder only has
/// powers `≤ w⁻²`).
pub fn faber_oracle_coeffs(map: &ExteriorMap, n: usize) -> Vec<C64> {
    const RADIUS: f64 = 2.0;
    let nodes = 256.max(4 * (n + 1) * (map.degree() + 1)).next_power_of_two();
    let samples = |f: &dyn Fn(C64) -> C64| -> Vec<C64> {
        (0..nodes)
            .map(|a| {
                let w = C64::from_polar(RADIUS, 2.0 * core::f64::consts::PI * a as f64 / nodes as f64);
                f(w)
            })
            .collect()
    };
    let powers: Vec<i64> = (0..=n as i64).collect();
    let h = laurent_coefficients(
        &samples(&|w| w.powu(n as u32) / map.phi_prime_unchecked(w)),
        RADIUS,
        &powers,
    );
    // Laurent coefficients of φ(w)^i at powers 0..=n.
    let phi_pows: Vec<Vec<C64>> = (0..=n)
        .map(|i| laurent_coefficients(&samples(&|w| map.phi_unchecked(w).powu(i as u32)), RADIUS, &powers))
        .collect();
    let mut alpha = vec![C64::zero(); n + 1];
    for p in (0..=n).rev() {
        let mut rhs = h[p];
        for i in p + 1..=n {
            rhs -= alpha[i] * phi_pows[i][p];
        }
        alpha[p] = rhs / phi_pows[p][p];
    }
    alpha
}

/// Laurent coefficients of `E_n(φ(w)) φ'(w) = Σ_{p ≤ −2} e_{n,p} wᵖ`.
///
/// For a finite Laurent map this is a Laurent polynomial with lowest power
/// `−((n+1)m + 1)`; the coefficients come from the trapezoidal rule on the
/// unit circle and are exact once the node count exceeds the bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSeries {
    nodes: usize,
    /// `coeffs[n][i]` multiplies `w^{−(i+2)}`.
    coeffs: Vec<Vec<C64>>,
}

impl RemainderSeries {
    /// Smallest power-of-two node count free of aliasing up to degree `n_max`.
    pub fn required_nodes(map: &ExteriorMap, n_max: usize) -> usize {
        ((n_max + 1) * (map.degree() + 1) + 2).next_power_of_two().max(64)
    }

    pub fn compute(basis: &FaberBasis, nodes: usize) -> Self {
        let map = basis.map();
        let m = map.degree();
        let n_max = basis.n_max();
        if m == 0 {
            return RemainderSeries { nodes, coeffs: vec![Vec::new(); n_max + 1] };
        }
        let mut samples: Vec<Vec<C64>> = vec![Vec::with_capacity(nodes); n_max + 1];
        for a in 0..nodes {
            let w = C64::from_polar(1.0, 2.0 * core::f64::consts::PI * a as f64 / nodes as f64);
            let dphi = map.phi_prime_unchecked(w);
            let vals = basis.eval_all(map.phi_unchecked(w));
            let mut wn = C64::new(1.0, 0.0);
            for (n, v) in vals.iter().enumerate() {
                samples[n].push(v * dphi - wn);
                wn *= w;
            }
        }
        let coeffs = samples
            .iter()
            .enumerate()
            .map(|(n, samp)| {
                let lowest = ((n + 1) * m + 1) as i64;
                let powers: Vec<i64> = (2..=lowest).map(|p| -p).collect();
                laurent_coefficients(samp, 1.0, &powers)
            })
            .collect();
        RemainderSeries { nodes, coeffs }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients of `w^{−2}, w^{−3}, …` for degree `n`.
    pub fn coeffs(&self, n: usize) -> &[C64] {
        &self.coeffs[n]
    }

    /// `E_n(φ(w)) φ'(w)`.
    pub fn eval(&self, n: usize, w: C64) -> C64 {
        let inv = w.inv();
        let tail = self.coeffs[n].iter().rev().fold(C64::zero(), |acc, c| acc * inv + c);
        tail * inv * inv
    }
}

/// `E_n(z) = F_n(z) − Φⁿ(z)Φ'(z)` for `z` in the closure of `O`.
///
/// The value is summed from the remainder's Laurent series in `w = Φ(z)`,
/// which stays accurate far from `K` where the two recorded terms cancel
/// catastrophically. Near `T` (distance below about `1e-8`) the recorded terms
/// themselves carry the precision loss of `Φ`.
pub fn remainder_eval(map: &ExteriorMap, basis: &FaberBasis, n: usize, z: C64) -> Result<RemainderEval> {
    if n > basis.n_max() {
        return Err(Error::InvalidParameter("degree exceeds the Faber basis"));
    }
    let w = match map.big_phi(z)? {
        BigPhi::Outside(w) => w,
        BigPhi::Inside => return Err(Error::InsidePoint { z }),
    };
    let faber = basis.eval_all(z)[n];
    let dphi = map.phi_prime_unchecked(w);
    let principal = w.powu(n as u32) / dphi;
    let single = FaberBasis::new(map, n);
    let series = RemainderSeries::compute(&single, RemainderSeries::required_nodes(map, n));
    let value = series.eval(n, w) / dphi;
    Ok(RemainderEval { value, faber, principal })
}
