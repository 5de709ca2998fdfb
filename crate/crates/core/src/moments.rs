//! Gram matrices of the Faber basis under the weight `P_K^{-2s}`.
//!
//! Writing `F_n(φ(w)) φ'(w) = wⁿ + Σ_{p ≤ −2} e_{n,p} wᵖ`, both halves of the
//! moment integral reduce to sums over Fourier modes. The interior part is
//! the Cauchy–Green contour integral over `|w| = 1`, the exterior part is the
//! `w`-plane integral against `|w|^{-2s}`, and each mode integrates in
//! closed form:
//!
//! ```text
//! ∫_D F_j conj(F_k) dA        = π [δ_{jk}/(k+1)   + Σ_p e_{j,p} conj(e_{k,p})/(p+1)]
//! ∫_O F_j conj(F_k) |Φ|^{-2s} = π [δ_{jk}/(s−k−1) + Σ_p e_{j,p} conj(e_{k,p})/(s−p−1)]
//! ```
//!
//! The only discretisation is the trapezoidal rule that produces `e_{n,p}`,
//! which is exact once the node count exceeds the Laurent bandwidth. The
//! result is still checked by doubling the node count.

use core::f64::consts::PI;

use num_traits::Zero;

use crate::faber::{FaberBasis, RemainderSeries};
use crate::geometry::ExteriorMap;
use crate::linalg::CMatrix;
use crate::{Error, Result, C64};

/// Quadrature controls for [`moments`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    /// Trapezoidal nodes on the unit circle; raised to the aliasing-free
    /// minimum when too small.
    pub angular_nodes: usize,
    /// Recompute at twice the nodes and compare.
    pub verify: bool,
    /// Largest allowed change under doubling.
    pub tol: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { angular_nodes: 256, verify: true, tol: 1e-11 }
    }
}

/// `m^s_{k,j} = ∫ F_j conj(F_k) P_K^{-2s} dA`, indexed `(k, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub n_max: usize,
    /// Weight exponent; `f64::INFINITY` for the area measure on `K`.
    pub s: f64,
    pub entries: CMatrix,
    pub interior_part: CMatrix,
    pub exterior_part: CMatrix,
    /// Angular nodes actually used.
    pub angular_nodes: usize,
    /// Largest change seen under node doubling (0 when not verified).
    pub doubling_change: f64,
}

impl MomentTable {
    pub fn entry(&self, k: usize, j: usize) -> C64 {
        self.entries[(k, j)]
    }

    /// Gram matrix `G[j][k] = ⟨F_j, F_k⟩ = m_{k,j}` of the first `n + 1`
    /// Faber polynomials.
    pub fn gram(&self, n: usize) -> CMatrix {
        CMatrix::from_fn(n + 1, n + 1, |j, k| self.entries[(k, j)])
    }
}

/// `ε^s_{k,j} = m^s_{k,j}(k+1)(s−k−1)/(sπ) − δ_{kj}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonTable {
    pub s: f64,
    pub entries: CMatrix,
    interior: CMatrix,
    exterior: CMatrix,
}

impl EpsilonTable {
    pub fn n_max(&self) -> usize {
        self.entries.rows() - 1
    }

    pub fn entry(&self, k: usize, j: usize) -> C64 {
        self.entries[(k, j)]
    }

    /// Interior defect `(k+1)/π · ∫_D F_j conj(F_k) − δ_{kj}`.
    pub fn interior_defect(&self, k: usize, j: usize) -> C64 {
        self.interior[(k, j)]
    }

    /// Exterior defect `(s−k−1)/π · ∫_O F_j conj(F_k)|Φ|^{-2s} − δ_{kj}`;
    /// zero when `s = ∞`.
    pub fn exterior_defect(&self, k: usize, j: usize) -> C64 {
        self.exterior[(k, j)]
    }
}

/// Checks `n_max ≤ s − 2`, the range where every moment converges.
pub fn check_degree(n_max: usize, s: f64) -> Result<()> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::InvalidParameter("s must exceed 1"));
    }
    if s.is_finite() && (n_max as f64) > s - 2.0 {
        return Err(Error::DegreeTooLarge { degree: n_max, s });
    }
    Ok(())
}

fn delta(k: usize, j: usize) -> f64 {
    if k == j {
        1.0
    } else {
        0.0
    }
}

/// Mode sum `Σ_i e_{j,i} conj(e_{k,i}) · f(i)` where mode `i` is the power
/// `w^{−(i+2)}`.
fn mode_sum(series: &RemainderSeries, k: usize, j: usize, f: impl Fn(usize) -> f64) -> C64 {
    series
        .coeffs(j)
        .iter()
        .zip(series.coeffs(k))
        .enumerate()
        .map(|(i, (ej, ek))| ej * ek.conj() * f(i))
        .sum()
}

fn interior_from_series(series: &RemainderSeries) -> CMatrix {
    let n = series.n_max() + 1;
    // p + 1 = −(i + 1)
    CMatrix::from_fn(n, n, |k, j| {
        (mode_sum(series, k, j, |i| -1.0 / (i + 1) as f64) + delta(k, j) / (k + 1) as f64) * PI
    })
}

fn exterior_from_series(series: &RemainderSeries, s: f64) -> CMatrix {
    let n = series.n_max() + 1;
    if s.is_infinite() {
        return CMatrix::zeros(n, n);
    }
    // s − p − 1 = s + i + 1
    CMatrix::from_fn(n, n, |k, j| {
        (mode_sum(series, k, j, |i| 1.0 / (s + (i + 1) as f64)) + delta(k, j) / (s - (k + 1) as f64)) * PI
    })
}

fn series_pair(basis: &FaberBasis, opts: &MomentOptions) -> (RemainderSeries, Option<RemainderSeries>) {
    let nodes = opts.angular_nodes.max(RemainderSeries::required_nodes(basis.map(), basis.n_max()));
    let coarse = RemainderSeries::compute(basis, nodes);
    let fine = opts.verify.then(|| RemainderSeries::compute(basis, 2 * nodes));
    (coarse, fine)
}

/// Largest entrywise change; errors when it exceeds `tol` relative to the
/// entry scale.
fn compare(coarse: &CMatrix, fine: &CMatrix, nodes: usize, tol: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    let mut at = (0, 0);
    for k in 0..coarse.rows() {
        for j in 0..coarse.cols() {
            let d = (coarse[(k, j)] - fine[(k, j)]).norm();
            if d > worst {
                worst = d;
                at = (k, j);
            }
        }
    }
    if !(worst <= tol) {
        return Err(Error::QuadratureNonConvergence { coarse: coarse[at], fine: fine[at], nodes: 2 * nodes });
    }
    Ok(worst)
}

/// `∫_D F_j conj(F_k) dA` for `j, k ≤ n_max`, indexed `(k, j)`.
pub fn interior_gram(basis: &FaberBasis, opts: &MomentOptions) -> Result<CMatrix> {
    let (coarse, fine) = series_pair(basis, opts);
    let table = interior_from_series(&coarse);
    if let Some(fine) = fine {
        compare(&table, &interior_from_series(&fine), coarse.nodes(), opts.tol)?;
    }
    Ok(table)
}

/// `∫_O F_j conj(F_k) |Φ|^{-2s} dA` for `j, k ≤ n_max`, indexed `(k, j)`.
pub fn exterior_gram(basis: &FaberBasis, s: f64, opts: &MomentOptions) -> Result<CMatrix> {
    check_degree(basis.n_max(), s)?;
    let (coarse, fine) = series_pair(basis, opts);
    let table = exterior_from_series(&coarse, s);
    if let Some(fine) = fine {
        compare(&table, &exterior_from_series(&fine, s), coarse.nodes(), opts.tol)?;
    }
    Ok(table)
}

/// Full moment table; `s = ∞` keeps only the interior part.
pub fn moments(map: &ExteriorMap, n_max: usize, s: f64, opts: &MomentOptions) -> Result<MomentTable> {
    check_degree(n_max, s)?;
    let basis = FaberBasis::new(map, n_max);
    let (coarse, fine) = series_pair(&basis, opts);
    let assemble = |series: &RemainderSeries| {
        let interior = interior_from_series(series);
        let exterior = exterior_from_series(series, s);
        let n = n_max + 1;
        let entries = CMatrix::from_fn(n, n, |k, j| interior[(k, j)] + exterior[(k, j)]);
        (entries, interior, exterior)
    };
    let (entries, interior_part, exterior_part) = assemble(&coarse);
    let doubling_change = match fine {
        Some(fine) => compare(&entries, &assemble(&fine).0, coarse.nodes(), opts.tol)?,
        None => 0.0,
    };
    Ok(MomentTable {
        n_max,
        s,
        entries,
        interior_part,
        exterior_part,
        angular_nodes: coarse.nodes(),
        doubling_change,
    })
}

/// Normalisation `sπ/((k+1)(s−k−1))` of the disk moments, `π/(k+1)` at `s = ∞`.
pub fn disk_moment(k: usize, s: f64) -> f64 {
    let k1 = (k + 1) as f64;
    if s.is_infinite() {
        PI / k1
    } else {
        s * PI / (k1 * (s - k1))
    }
}

pub fn epsilon_table(moments: &MomentTable) -> EpsilonTable {
    let s = moments.s;
    let n = moments.n_max + 1;
    let entries = CMatrix::from_fn(n, n, |k, j| moments.entries[(k, j)] / disk_moment(k, s) - delta(k, j));
    let interior =
        CMatrix::from_fn(n, n, |k, j| moments.interior_part[(k, j)] * ((k + 1) as f64 / PI) - delta(k, j));
    let exterior = CMatrix::from_fn(n, n, |k, j| {
        if s.is_infinite() {
            C64::zero()
        } else {
            moments.exterior_part[(k, j)] * ((s - (k + 1) as f64) / PI) - delta(k, j)
        }
    });
    EpsilonTable { s, entries, interior, exterior }
}

/// Literal Cauchy–Green evaluation of the interior table,
/// `(1/2i)∮_T F_j conj(G_k) dz` with `G_k' = F_k`, on `nodes` equispaced
/// points of `θ`. Used as an independent cross-check.
pub fn interior_gram_contour(basis: &FaberBasis, nodes: usize) -> CMatrix {
    let map = basis.map();
    let n = basis.n_max() + 1;
    let mut table = CMatrix::zeros(n, n);
    for a in 0..nodes {
        let w = C64::from_polar(1.0, 2.0 * PI * a as f64 / nodes as f64);
        let z = map.phi_unchecked(w);
        // dz = i w φ'(w) dθ, and 1/(2i) · i = 1/2
        let dz = w * map.phi_prime_unchecked(w) * (PI / nodes as f64);
        let (f, g) = basis.eval_with_antiderivatives(z);
        for k in 0..n {
            let gk = g[k].conj() * dz;
            for j in 0..n {
                table[(k, j)] += f[j] * gk;
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn custom() -> ExteriorMap {
        ExteriorMap::new(1.0, vec![c(0.0, 0.0), c(0.2, 0.0), c(0.0, 0.1)]).unwrap()
    }

    #[test]
    fn disk_examples() {
        let d = ExteriorMap::disk();
        let opts = MomentOptions::default();
        let basis = FaberBasis::new(&d, 3);
        let inner = interior_gram(&basis, &opts).unwrap();
        assert!((inner[(0, 0)].re - PI).abs() < 1e-14);
        assert!((inner[(2, 2)].re - PI / 3.0).abs() < 1e-14);
        let outer = exterior_gram(&FaberBasis::new(&d, 0), 2.0, &opts).unwrap();
        assert!((outer[(0, 0)].re - PI).abs() < 1e-14);
        let outer = exterior_gram(&basis, 7.5, &opts).unwrap();
        assert!(outer[(1, 0)].norm() < 1e-15);
        let m = moments(&d, 2, 4.0, &opts).unwrap();
        assert!((m.entry(1, 1).re - PI).abs() < 1e-14);
        let m = moments(&d, 3, f64::INFINITY, &opts).unwrap();
        assert!((m.entry(3, 3).re - PI / 4.0).abs() < 1e-14);
        let eps = epsilon_table(&moments(&d, 5, 9.0, &opts).unwrap());
        for k in 0..6 {
            for j in 0..6 {
                assert!(eps.entry(k, j).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ellipse_examples() {
        let q: f64 = 0.5;
        let e = ExteriorMap::ellipse(q).unwrap();
        let opts = MomentOptions::default();
        let basis = FaberBasis::new(&e, 1);
        let inner = interior_gram(&basis, &opts).unwrap();
        assert!((inner[(1, 1)].re - PI / 2.0 * 0.9375).abs() < 1e-13);
        let outer = exterior_gram(&basis, 3.0, &opts).unwrap();
        assert!((outer[(0, 0)].re - PI * 0.5625).abs() < 1e-13);
        let m = moments(&e, 1, 3.0, &opts).unwrap();
        assert!((m.entry(0, 0).re - 1.3125 * PI).abs() < 1e-13);
        let eps = epsilon_table(&m);
        assert!((eps.entry(0, 0).re + 0.125).abs() < 1e-13);
        let s = 30.0;
        let eps = epsilon_table(&moments(&e, 12, s, &opts).unwrap());
        for k in 0..=12 {
            for j in 0..=12 {
                if k == j {
                    let n = k as f64;
                    let want = -q.powi(2 * k as i32 + 2) * (s - n - 1.0) / (s + n + 1.0);
                    assert!((eps.entry(k, k).re - want).abs() < 1e-13);
                } else {
                    assert!(eps.entry(k, j).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn tables_are_hermitian_and_match_the_contour_rule() {
        let map = custom();
        let m = moments(&map, 10, 15.0, &MomentOptions::default()).unwrap();
        assert!(m.entries.hermitian_defect() < 1e-12);
        assert!(m.gram(10).cholesky().is_ok());
        let literal = interior_gram_contour(&FaberBasis::new(&map, 10), 512);
        for k in 0..=10 {
            for j in 0..=10 {
                assert!((literal[(k, j)] - m.interior_part[(k, j)]).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn defects_recombine_into_epsilon() {
        let s = 12.0;
        let m = moments(&custom(), 6, s, &MomentOptions::default()).unwrap();
        let eps = epsilon_table(&m);
        for k in 0..=6 {
            for j in 0..=6 {
                let k1 = (k + 1) as f64;
                let combo = eps.interior_defect(k, j) * ((s - k1) / s) + eps.exterior_defect(k, j) * (k1 / s);
                assert!((combo - eps.entry(k, j)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn degree_precondition() {
        let d = ExteriorMap::disk();
        let opts = MomentOptions::default();
        assert!(matches!(moments(&d, 3, 4.5, &opts), Err(Error::DegreeTooLarge { .. })));
        assert!(moments(&d, 2, 4.0, &opts).is_ok());
        assert!(moments(&d, 2, 1.0, &opts).is_err());
    }
}
