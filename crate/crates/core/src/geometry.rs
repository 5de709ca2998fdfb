//! The compact set `K`, described through its exterior conformal map.
//!
//! `φ(w) = cap·w + c_0 + Σ_{k=1..m} c_k w^{-k}` maps `{|w| > 1}` onto the
//! exterior `O` of `K`; its inverse is `Φ`, and the equilibrium potential is
//! `P_K = max(1, |Φ|)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::linalg::polynomial_roots;
use crate::{Error, Result, C64, INSIDE_TOL};

/// Slack allowed below `|w| = 1` when evaluating `φ`.
const DOMAIN_SLACK: f64 = 1e-12;
/// Newton iteration cap for `Φ`.
pub const MAX_NEWTON_ITER: usize = 64;
/// Points on the boundary grid used to validate univalence.
const BOUNDARY_GRID: usize = 512;

/// Laurent representation of the exterior map `φ = Φ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorMap {
    cap: f64,
    coeffs: Vec<C64>,
    univalence_radius: f64,
}

/// Result of inverting the exterior map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BigPhi {
    /// `z ∈ O ∪ T`, with `w = Φ(z)`, `|w| ≥ 1 − tol`.
    Outside(C64),
    /// `z` lies in the interior of `K`.
    Inside,
}

impl BigPhi {
    pub fn outside(self) -> Option<C64> {
        match self {
            BigPhi::Outside(w) => Some(w),
            BigPhi::Inside => None,
        }
    }
}

impl ExteriorMap {
    /// Builds and validates `φ(w) = cap·w + coeffs[0] + Σ coeffs[k] w^{-k}`.
    ///
    /// Rejects maps with a critical point in `|w| ≥ 1` or whose boundary
    /// curve `φ(e^{iθ})` self-intersects.
    pub fn new(cap: f64, coeffs: Vec<C64>) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(Error::InvalidMap("capacity must be positive and finite"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidMap("Laurent coefficients must be finite"));
        }
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(C64::zero());
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let mut map = ExteriorMap { cap, coeffs, univalence_radius: 0.0 };

        let critical = map.critical_radius();
        if critical >= 1.0 - 1e-9 {
            return Err(Error::InvalidMap("φ' vanishes on or outside the unit circle"));
        }
        // φ' on the closed exterior, sampled over 1 ≤ |w| ≤ 4.
        for ring in 0..8 {
            let r = 1.0 + 3.0 * ring as f64 / 7.0;
            for k in 0..BOUNDARY_GRID {
                let w = C64::from_polar(r, 2.0 * PI * k as f64 / BOUNDARY_GRID as f64);
                if map.phi_prime_unchecked(w).norm() <= 1e-12 * cap {
                    return Err(Error::InvalidMap("φ' vanishes on the exterior grid"));
                }
            }
        }
        if !map.level_curve_is_simple(1.0) {
            return Err(Error::InvalidMap("boundary curve self-intersects"));
        }
        map.univalence_radius = map.estimate_univalence_radius(critical);
        Ok(map)
    }

    /// The unit disk, `φ(w) = w`.
    pub fn disk() -> Self {
        ExteriorMap { cap: 1.0, coeffs: vec![C64::zero()], univalence_radius: 0.0 }
    }

    /// The ellipse `φ(w) = w + q/w`, `0 ≤ q < 1`.
    pub fn ellipse(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParameter("ellipse parameter q must lie in [0, 1)"));
        }
        if q == 0.0 {
            return Ok(Self::disk());
        }
        Ok(ExteriorMap {
            cap: 1.0,
            coeffs: vec![C64::zero(), C64::new(q, 0.0)],
            univalence_radius: q.sqrt(),
        })
    }

    /// Logarithmic capacity `γ_K`.
    pub fn capacity(&self) -> f64 {
        self.cap
    }

    /// `c_0, c_1, …, c_m`.
    pub fn laurent_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Number of negative powers `m`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `ρ(T)`: `φ` extends univalently to `|w| > ρ(T)`.
    pub fn univalence_radius(&self) -> f64 {
        self.univalence_radius
    }

    /// `φ(w)`, valid for `|w| ≥ 1`.
    pub fn phi(&self, w: C64) -> Result<C64> {
        self.check_domain(w)?;
        Ok(self.phi_unchecked(w))
    }

    /// `φ'(w) = cap − Σ k c_k w^{-k-1}`, valid for `|w| ≥ 1`.
    pub fn phi_prime(&self, w: C64) -> Result<C64> {
        self.check_domain(w)?;
        Ok(self.phi_prime_unchecked(w))
    }

    /// Boundary point `φ(e^{iθ})`.
    pub fn boundary_point(&self, theta: f64) -> C64 {
        self.phi_unchecked(C64::from_polar(1.0, theta))
    }

    /// Laurent evaluation without the `|w| ≥ 1` check; meaningful wherever the
    /// series is (`w ≠ 0`).
    pub fn phi_unchecked(&self, w: C64) -> C64 {
        let inv = w.inv();
        let mut tail = C64::zero();
        for c in self.coeffs[1..].iter().rev() {
            tail = (tail + c) * inv;
        }
        w * self.cap + self.coeffs[0] + tail
    }

    pub fn phi_prime_unchecked(&self, w: C64) -> C64 {
        let inv = w.inv();
        let mut acc = C64::zero();
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = (acc + c * k as f64) * inv;
        }
        C64::new(self.cap, 0.0) - acc * inv
    }

    /// `Φ(z)`, or [`BigPhi::Inside`] for interior points of `K`.
    pub fn big_phi(&self, z: C64) -> Result<BigPhi> {
        if self.coeffs.len() == 1 {
            let w = (z - self.coeffs[0]) / self.cap;
            return Ok(if w.norm() < 1.0 - INSIDE_TOL { BigPhi::Inside } else { BigPhi::Outside(w) });
        }
        let scale = 1e-12 * (1.0 + z.norm());
        let start = (z - self.coeffs[0]) / self.cap;
        let first = self.newton(z, start, scale);
        match first {
            Ok(w) if w.norm() >= 1.0 - INSIDE_TOL => return Ok(BigPhi::Outside(w)),
            Ok(_) if self.winding_number(z) != 0 => return Ok(BigPhi::Inside),
            Err(_) if self.winding_number(z) != 0 => return Ok(BigPhi::Inside),
            _ => {}
        }
        // Converged to a non-principal preimage (or stalled) although the
        // boundary polygon puts z outside: restart from a ring of guesses.
        let base = start / start.norm().max(1e-300);
        for r in [1.05, 1.5, 3.0] {
            for k in 0..8 {
                let guess = base * C64::from_polar(r, 2.0 * PI * k as f64 / 8.0);
                if let Ok(w) = self.newton(z, guess, scale) {
                    if w.norm() >= 1.0 - INSIDE_TOL {
                        return Ok(BigPhi::Outside(w));
                    }
                }
            }
        }
        match first {
            Ok(_) => Ok(BigPhi::Inside),
            Err(e) => Err(e),
        }
    }

    /// `Φ'(z) = 1/φ'(Φ(z))` for `z` in the closure of `O`.
    pub fn big_phi_prime(&self, z: C64) -> Result<C64> {
        match self.big_phi(z)? {
            BigPhi::Outside(w) => Ok(self.phi_prime_unchecked(w).inv()),
            BigPhi::Inside => Err(Error::InsidePoint { z }),
        }
    }

    /// `P_K(z) = max(1, |Φ(z)|)`; exactly 1 within [`INSIDE_TOL`] of `K`.
    pub fn equilibrium_potential(&self, z: C64) -> Result<f64> {
        Ok(match self.big_phi(z)? {
            BigPhi::Inside => 1.0,
            BigPhi::Outside(w) => {
                let r = w.norm();
                if r - 1.0 <= INSIDE_TOL {
                    1.0
                } else {
                    r
                }
            }
        })
    }

    /// Winding number of the boundary polygon around `z` (nonzero ⇒ inside).
    pub fn winding_number(&self, z: C64) -> i32 {
        const N: usize = 4096;
        let mut total = 0.0;
        let mut prev = self.boundary_point(0.0) - z;
        for k in 1..=N {
            let cur = self.boundary_point(2.0 * PI * k as f64 / N as f64) - z;
            total += (cur / prev).arg();
            prev = cur;
        }
        (total / (2.0 * PI)).round() as i32
    }

    fn check_domain(&self, w: C64) -> Result<()> {
        if w.norm() < 1.0 - DOMAIN_SLACK {
            Err(Error::OutsideDomain { w })
        } else {
            Ok(())
        }
    }

    fn newton(&self, z: C64, start: C64, scale: f64) -> Result<C64> {
        let floor = 0.5 * self.univalence_radius.max(1e-3);
        let mut w = start;
        let mut resid = (self.phi_unchecked(w) - z).norm();
        for it in 0..MAX_NEWTON_ITER {
            if resid <= scale {
                return Ok(w);
            }
            let step = (self.phi_unchecked(w) - z) / self.phi_prime_unchecked(w);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = w - step * t;
                if cand.norm() > floor {
                    let r = (self.phi_unchecked(cand) - z).norm();
                    if r < resid || r <= scale {
                        w = cand;
                        resid = r;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(Error::NonConvergence { z, last: w, iterations: it + 1 });
            }
        }
        if resid <= scale {
            Ok(w)
        } else {
            Err(Error::NonConvergence { z, last: w, iterations: MAX_NEWTON_ITER })
        }
    }

    /// Largest modulus of a zero of `φ'`.
    fn critical_radius(&self) -> f64 {
        let m = self.degree();
        if m == 0 {
            return 0.0;
        }
        // w^{m+1} φ'(w) = cap w^{m+1} − Σ_k k c_k w^{m-k}
        let mut poly = vec![C64::zero(); m + 2];
        poly[m + 1] = C64::new(self.cap, 0.0);
        for k in 1..=m {
            poly[m - k] = -self.coeffs[k] * k as f64;
        }
        polynomial_roots(&poly).iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    fn level_curve_is_simple(&self, r: f64) -> bool {
        let pts: Vec<C64> = (0..BOUNDARY_GRID)
            .map(|k| self.phi_unchecked(C64::from_polar(r, 2.0 * PI * k as f64 / BOUNDARY_GRID as f64)))
            .collect();
        polygon_is_simple(&pts)
    }

    fn estimate_univalence_radius(&self, critical: f64) -> f64 {
        if self.degree() == 0 {
            return 0.0;
        }
        // Scan level curves inward from the boundary; the first one that is
        // not simple (or the critical radius) bounds the univalent extension.
        let steps = 32;
        let mut last_good = 1.0;
        for i in 1..=steps {
            let r = 1.0 - (1.0 - critical) * i as f64 / steps as f64;
            if r <= critical || !self.level_curve_is_simple(r) {
                break;
            }
            last_good = r;
        }
        if last_good <= critical + (1.0 - critical) / steps as f64 {
            critical
        } else {
            last_good
        }
    }
}

fn polygon_is_simple(pts: &[C64]) -> bool {
    let n = pts.len();
    let cross = |a: C64, b: C64| a.re * b.im - a.im * b.re;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            let d1 = cross(b - a, c - a);
            let d2 = cross(b - a, d - a);
            let d3 = cross(d - c, a - c);
            let d4 = cross(d - c, b - c);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return false;
            }
        }
    }
    true
}

/// Which compact set is studied.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk,
    /// `φ(w) = w + q/w`, `q ∈ [0, 1)`.
    Ellipse { q: f64 },
    Custom(ExteriorMap),
}

impl DomainSpec {
    pub fn exterior_map(&self) -> Result<ExteriorMap> {
        match self {
            DomainSpec::Disk => Ok(ExteriorMap::disk()),
            DomainSpec::Ellipse { q } => ExteriorMap::ellipse(*q),
            DomainSpec::Custom(map) => Ok(map.clone()),
        }
    }

    /// Ellipse parameter when the domain has Chebyshev closed forms
    /// (`Some(0)` for the disk).
    pub fn ellipse_parameter(&self) -> Option<f64> {
        match self {
            DomainSpec::Disk => Some(0.0),
            DomainSpec::Ellipse { q } => Some(*q),
            DomainSpec::Custom(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn custom() -> ExteriorMap {
        ExteriorMap::new(1.0, vec![c(0.0, 0.0), c(0.2, 0.0), c(0.0, 0.1)]).unwrap()
    }

    #[test]
    fn phi_examples() {
        let e = ExteriorMap::ellipse(0.5).unwrap();
        assert_relative_eq!(e.phi(c(1.0, 0.0)).unwrap().re, 1.5);
        let v = e.phi(c(0.0, 2.0)).unwrap();
        assert!((v - c(0.0, 1.75)).norm() < 1e-15);
        let d = ExteriorMap::disk();
        assert_eq!(d.phi(c(2.0, 1.0)).unwrap(), c(2.0, 1.0));
        assert!(matches!(d.phi(c(0.5, 0.0)), Err(Error::OutsideDomain { .. })));
        // slack just below the unit circle is tolerated
        assert!(d.phi(c(1.0 - 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn phi_prime_examples() {
        let e = ExteriorMap::ellipse(0.5).unwrap();
        assert_relative_eq!(e.phi_prime(c(1.0, 0.0)).unwrap().re, 0.5);
        assert_relative_eq!(e.phi_prime(c(2.0, 0.0)).unwrap().re, 0.875);
        assert_eq!(ExteriorMap::disk().phi_prime(c(3.0, -1.0)).unwrap(), c(1.0, 0.0));
        // finite difference check on the custom map
        let m = custom();
        let w = c(1.3, 0.4);
        let h = 1e-6;
        let fd = (m.phi_unchecked(w + h) - m.phi_unchecked(w - h)) / (2.0 * h);
        assert!((fd - m.phi_prime_unchecked(w)).norm() < 1e-9);
    }

    #[test]
    fn big_phi_examples() {
        let d = ExteriorMap::disk();
        assert_eq!(d.big_phi(c(3.0, 0.0)).unwrap(), BigPhi::Outside(c(3.0, 0.0)));
        let e = ExteriorMap::ellipse(0.5).unwrap();
        let w = e.big_phi(c(1.5, 0.0)).unwrap().outside().unwrap();
        assert!((w - c(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(e.big_phi(c(0.0, 0.0)).unwrap(), BigPhi::Inside);
        assert_eq!(e.big_phi(c(0.3, 0.2)).unwrap(), BigPhi::Inside);
    }

    #[test]
    fn potential_examples() {
        let d = ExteriorMap::disk();
        assert_eq!(d.equilibrium_potential(c(2.0, 0.0)).unwrap(), 2.0);
        assert_eq!(d.equilibrium_potential(c(0.2, 0.1)).unwrap(), 1.0);
        let e = ExteriorMap::ellipse(0.5).unwrap();
        assert_relative_eq!(e.equilibrium_potential(c(2.25, 0.0)).unwrap(), 2.0, epsilon = 1e-12);
        for map in [d, e, custom()] {
            for k in 0..16 {
                let z = map.boundary_point(0.3 + k as f64);
                assert_eq!(map.equilibrium_potential(z).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(ExteriorMap::disk().capacity(), 1.0);
        assert_eq!(ExteriorMap::ellipse(0.7).unwrap().capacity(), 1.0);
        let m = ExteriorMap::new(2.5, vec![c(0.1, 0.0), c(0.3, 0.0)]).unwrap();
        assert_eq!(m.capacity(), 2.5);
    }

    #[test]
    fn round_trip_on_exterior_grid() {
        for map in [ExteriorMap::disk(), ExteriorMap::ellipse(0.5).unwrap(), custom()] {
            for i in 0..64 {
                for j in 0..8 {
                    let r = 1.0 + 0.5 * j as f64;
                    let w = C64::from_polar(r, 2.0 * PI * i as f64 / 64.0);
                    let z = map.phi(w).unwrap();
                    let back = map.big_phi(z).unwrap().outside().expect("outside");
                    assert!((back - w).norm() < 1e-10, "{w} -> {z} -> {back}");
                    if j == 0 {
                        assert!((back.norm() - 1.0).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn potential_grows_like_inverse_capacity() {
        let m = ExteriorMap::new(2.0, vec![c(0.5, -0.2), c(0.3, 0.1), c(0.0, 0.05)]).unwrap();
        for k in 0..8 {
            let z = C64::from_polar(1e6, k as f64);
            let p = m.equilibrium_potential(z).unwrap();
            assert!((p / z.norm() - 0.5).abs() < 1e-4 * 0.5);
        }
    }

    #[test]
    fn rejects_non_conformal_maps() {
        assert!(ExteriorMap::new(0.0, vec![]).is_err());
        assert!(ExteriorMap::new(-1.0, vec![]).is_err());
        // φ(w) = w + 1.2/w has critical points at |w| = sqrt(1.2) > 1
        assert!(ExteriorMap::new(1.0, vec![c(0.0, 0.0), c(1.2, 0.0)]).is_err());
        assert!(ExteriorMap::ellipse(1.0).is_err());
    }

    #[test]
    fn univalence_radius_of_ellipse() {
        let generic = ExteriorMap::new(1.0, vec![c(0.0, 0.0), c(0.25, 0.0)]).unwrap();
        assert!((generic.univalence_radius() - 0.5).abs() < 0.02);
        assert!(custom().univalence_radius() < 1.0);
    }
}
