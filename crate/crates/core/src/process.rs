//! Determinantal point process statistics: correlation functions, gap
//! probabilities, the scaled boundary correlations, and an exact sampler for
//! the rotation-invariant disk ensemble.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::ExteriorMap;
use crate::kernel::{h_limit, omega_of, tau_of, weight_root, weighted_kernel};
use crate::linalg::CMatrix;
use crate::ortho::OrthoPolySet;
use crate::quadrature::disk_region_rule;
use crate::{Error, Result, C64};

/// `R_n` at a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrValue {
    pub value: f64,
    /// More points than `N`: the kernel matrix has rank at most `N`, so the
    /// value is zero up to rounding.
    pub rank_deficient: bool,
}

/// `R_n(λ_1, …, λ_n) = det[K̃_{N,s}(λ_j, λ_k)]`.
pub fn corr_fn(polys: &OrthoPolySet, n: usize, points: &[C64]) -> Result<CorrValue> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("at least one point is needed"));
    }
    let k = points.len();
    let mut m = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = weighted_kernel(polys, n, points[i], points[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(CorrValue { value: m.determinant().re, rank_deficient: k > n })
}

/// `H̃_ℓ(a,b) = ω(a)ω(b) H_ℓ(τ(a) + conj τ(b))` at `z = φ(e^{iθ})`; at `ℓ = 0`
/// the weight `ω` is 0 for outward offsets.
pub fn h_tilde(map: &ExteriorMap, theta: f64, ell: f64, a: C64, b: C64) -> C64 {
    let tau = tau_of(map, a, theta) + tau_of(map, b, theta).conj();
    h_limit(ell, tau) * (omega_of(map, a, theta, ell) * omega_of(map, b, theta, ell))
}

/// Scaled density `R_1^ℓ(a) = H̃_ℓ(a,a)`.
pub fn scaled_r1(map: &ExteriorMap, theta: f64, ell: f64, a: C64) -> f64 {
    h_tilde(map, theta, ell, a, a).re
}

/// Scaled pair correlation `R_2^ℓ(a,b) = H̃(a,a)H̃(b,b) − |H̃(a,b)|²`.
pub fn scaled_r2(map: &ExteriorMap, theta: f64, ell: f64, a: C64, b: C64) -> f64 {
    let ab = h_tilde(map, theta, ell, a, b);
    scaled_r1(map, theta, ell, a) * scaled_r1(map, theta, ell, b) - ab.norm_sqr()
}

/// Scaled correlation of order `a.len()` (1 or 2).
pub fn scaled_corr(map: &ExteriorMap, theta: f64, ell: f64, a: &[C64]) -> Result<f64> {
    match a {
        [x] => Ok(scaled_r1(map, theta, ell, *x)),
        [x, y] => Ok(scaled_r2(map, theta, ell, *x, *y)),
        _ => Err(Error::InvalidParameter("scaled correlations are provided for orders 1 and 2")),
    }
}

/// Pair correlation of the sine process, `1 − (2 sin((a−b)/2)/(a−b))²`.
pub fn sine_corr(a: f64, b: f64) -> f64 {
    let d = a - b;
    let s = if d.abs() < 1e-8 { 1.0 - d * d / 24.0 } else { 2.0 * (d / 2.0).sin() / d };
    1.0 - s * s
}

/// Quadrature resolution for gap probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapNodes {
    pub angular: usize,
    pub radial: usize,
    /// Equal radial panels; place a panel edge on `T` when the region
    /// crosses it.
    pub panels: usize,
}

impl Default for GapNodes {
    fn default() -> Self {
        GapNodes { angular: 64, radial: 24, panels: 1 }
    }
}

/// Disagreement between the base and refined quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWarning {
    pub coarse: f64,
    pub fine: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `Σ_n (−1)ⁿ/n! ∫_{Eⁿ} R_n`, summed term by term.
    pub value: f64,
    /// The same sum with every node count doubled.
    pub refined: f64,
    /// `det(I − G)` on the base nodes; equals `value` algebraically.
    pub determinant: f64,
    /// `|(1/n!) ∫_{Eⁿ} R_n|` for `n = 0..=N`.
    pub terms: Vec<f64>,
    pub warning: Option<GapWarning>,
}

const GAP_REFINE_TOL: f64 = 1e-8;

/// Gram matrix `G_{mn} = ∫_E φ_n conj(φ_m)` of `φ_n = P_K^{-s} π_n` over the
/// region; its spectrum is that of `K̃` restricted to `E`.
fn region_gram(polys: &OrthoPolySet, n: usize, center: C64, radius: f64, nodes: GapNodes) -> Result<CMatrix> {
    let rule = disk_region_rule(center, radius, nodes.angular, nodes.radial, nodes.panels);
    let mut g = CMatrix::zeros(n, n);
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        let scale = weight_root(polys.map(), polys.s(), *x)?;
        if scale == 0.0 {
            continue;
        }
        let vals = polys.eval_all(*x);
        let wt = w * scale * scale;
        for a in 0..n {
            let ca = vals[a].conj() * wt;
            for b in 0..n {
                g[(a, b)] += vals[b] * ca;
            }
        }
    }
    Ok(g)
}

fn fredholm_terms(g: &CMatrix) -> (f64, Vec<f64>) {
    let e = g.elementary_symmetric();
    let mut value = 0.0;
    let mut terms = Vec::with_capacity(e.len());
    for (k, ek) in e.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * ek.re;
        terms.push(ek.re.abs());
    }
    (value, terms)
}

/// Probability that the disk `|λ − center| < radius` holds no points.
pub fn gap_probability(polys: &OrthoPolySet, n: usize, center: C64, radius: f64, nodes: GapNodes) -> Result<GapReport> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter("radius must be non-negative"));
    }
    if n == 0 || n > polys.n_max() + 1 {
        return Err(Error::InvalidParameter("kernel size out of range"));
    }
    crate::kernel::kernel_sum(polys, n, center, center)?;
    if radius == 0.0 {
        let mut terms = alloc::vec![0.0; n + 1];
        terms[0] = 1.0;
        return Ok(GapReport { value: 1.0, refined: 1.0, determinant: 1.0, terms, warning: None });
    }
    let g = region_gram(polys, n, center, radius, nodes)?;
    let (value, terms) = fredholm_terms(&g);
    let mut ig = CMatrix::identity(n);
    for a in 0..n {
        for b in 0..n {
            ig[(a, b)] -= g[(a, b)];
        }
    }
    let determinant = ig.determinant().re;
    let fine_nodes = GapNodes { angular: 2 * nodes.angular, radial: 2 * nodes.radial, panels: nodes.panels };
    let (refined, _) = fredholm_terms(&region_gram(polys, n, center, radius, fine_nodes)?);
    let warning = ((value - refined).abs() > GAP_REFINE_TOL).then_some(GapWarning { coarse: value, fine: refined });
    Ok(GapReport { value, refined, determinant, terms, warning })
}

/// `P(R_n ≤ r)` for the radius with density `∝ r^{2n+1} max(1,r)^{-2s}`.
pub fn radial_cdf(n: usize, s: f64, r: f64) -> f64 {
    let n1 = (n + 1) as f64;
    if r <= 0.0 {
        return 0.0;
    }
    if s.is_infinite() {
        return r.min(1.0).powf(2.0 * n1);
    }
    if r <= 1.0 {
        r.powf(2.0 * n1) * (s - n1) / s
    } else {
        1.0 - n1 / s * r.powf(-2.0 * (s - n1))
    }
}

/// Inverse of [`radial_cdf`].
pub fn radial_quantile(n: usize, s: f64, u: f64) -> f64 {
    let n1 = (n + 1) as f64;
    if s.is_infinite() {
        return u.powf(1.0 / (2.0 * n1));
    }
    let inner = (s - n1) / s;
    if u <= inner {
        (u / inner).powf(1.0 / (2.0 * n1))
    } else {
        (n1 / s / (1.0 - u)).powf(1.0 / (2.0 * (s - n1)))
    }
}

/// Gap probability of `|λ| < ρ` on the disk ensemble: `Π_{n<N} (1 − F_n(ρ))`.
pub fn disk_gap_product(n: usize, s: f64, rho: f64) -> f64 {
    (0..n).map(|k| 1.0 - radial_cdf(k, s, rho)).product()
}

/// One draw of the disk ensemble with weight `max(1,|λ|)^{-2s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenConfiguration {
    pub points: Vec<C64>,
    pub seed: u64,
    /// ChaCha stream index the draw used.
    pub stream: u64,
    pub n: usize,
    pub s: f64,
}

fn check_sampler(n: usize, s: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive"));
    }
    if !(s > n as f64) {
        return Err(Error::InvalidParameter("the sampler needs s > N"));
    }
    Ok(())
}

/// Exact draw: independent radii by inverse CDF, uniform angles. The
/// generator is ChaCha8 seeded with `seed` on stream `stream`; radius and
/// angle of level `n` consume draws `2n` and `2n+1`.
pub fn sample_disk_stream(n: usize, s: f64, seed: u64, stream: u64) -> Result<EigenConfiguration> {
    check_sampler(n, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let points = (0..n)
        .map(|k| {
            let u: f64 = rng.random();
            let t: f64 = rng.random();
            C64::from_polar(radial_quantile(k, s, u), 2.0 * PI * t)
        })
        .collect();
    Ok(EigenConfiguration { points, seed, stream, n, s })
}

pub fn sample_disk(n: usize, s: f64, seed: u64) -> Result<EigenConfiguration> {
    sample_disk_stream(n, s, seed, 0)
}

/// `count` configurations on streams `0..count`.
pub fn sample_disk_batch(n: usize, s: f64, seed: u64, count: usize) -> Result<Vec<EigenConfiguration>> {
    (0..count as u64).map(|i| sample_disk_stream(n, s, seed, i)).collect()
}

/// Annulus bin of a radial density estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBin {
    pub lo: f64,
    pub hi: f64,
    /// Mean number of points per unit area in the annulus.
    pub density: f64,
    pub stderr: f64,
}

impl RadialBin {
    pub fn area(&self) -> f64 {
        PI * (self.hi * self.hi - self.lo * self.lo)
    }
}

/// Mean and standard error of a per-configuration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountEstimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialHistogram {
    pub bins: Vec<RadialBin>,
    /// Points beyond the last edge, per configuration.
    pub overflow: CountEstimate,
    /// Points with `|λ| > 1`, per configuration.
    pub outside_unit: CountEstimate,
    pub samples: usize,
}

impl RadialHistogram {
    /// `∫ R_1` estimated from the bins plus overflow.
    pub fn integrated(&self) -> f64 {
        self.bins.iter().map(|b| b.density * b.area()).sum::<f64>() + self.overflow.mean
    }
}

/// Running mean/variance of per-configuration counts.
#[derive(Debug, Clone, Copy, Default)]
struct Moments2 {
    sum: f64,
    sum_sq: f64,
}

impl Moments2 {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn estimate(&self, count: usize) -> CountEstimate {
        let m = count as f64;
        let mean = self.sum / m;
        let var = if count > 1 { ((self.sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
        CountEstimate { mean, stderr: (var / m).sqrt() }
    }
}

/// Radial histogram estimate of `R_1` with per-configuration standard errors.
/// `edges` must be increasing radii starting at 0 or above.
pub fn empirical_r1(samples: &[EigenConfiguration], edges: &[f64]) -> Result<RadialHistogram> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples"));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
        return Err(Error::InvalidParameter("bin edges must be increasing and non-negative"));
    }
    let nb = edges.len() - 1;
    let mut acc = alloc::vec![Moments2::default(); nb];
    let mut overflow = Moments2::default();
    let mut outside = Moments2::default();
    let mut counts = alloc::vec![0usize; nb];
    for cfg in samples {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut over = 0usize;
        let mut out = 0usize;
        for p in &cfg.points {
            let r = p.norm();
            if r > 1.0 {
                out += 1;
            }
            if r >= edges[nb] {
                over += 1;
            } else if r >= edges[0] {
                let idx = edges.partition_point(|e| *e <= r) - 1;
                counts[idx] += 1;
            }
        }
        for (a, c) in acc.iter_mut().zip(&counts) {
            a.push(*c as f64);
        }
        overflow.push(over as f64);
        outside.push(out as f64);
    }
    let m = samples.len();
    let bins = (0..nb)
        .map(|i| {
            let area = PI * (edges[i + 1] * edges[i + 1] - edges[i] * edges[i]);
            let est = acc[i].estimate(m);
            RadialBin { lo: edges[i], hi: edges[i + 1], density: est.mean / area, stderr: est.stderr / area }
        })
        .collect();
    Ok(RadialHistogram { bins, overflow: overflow.estimate(m), outside_unit: outside.estimate(m), samples: m })
}
