//! Sector geometry of a linearized hyperbolic singularity.
//!
//! Leaves through a point with multiplier eta = a + ib, b > 0, live over the
//! angular sector S = {v > 0, b u + a v > 0} in the zeta = u + iv plane. The
//! conformal straightening Phi(zeta) = zeta^gamma, with gamma = pi / theta
//! and theta the opening of S, maps S onto the upper half-plane; everything
//! downstream (harmonic extensions, trace-mass integrals, flux certificates)
//! is phrased in the straightened coordinates computed here.
//!
//! Scaled coordinates: a point zeta in S is written zeta = s (zeta* + r)
//! with s = v, zeta* = u* + i the unit-height point on the bisecting ray
//! u = u* v, and r = u/v - u* > 0. Phi is homogeneous of degree gamma, so
//! Phi(zeta) = s^gamma Phi(zeta* + r) and the unit-height image Phi(zeta* + r)
//! carries all the shape information.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Multiplier data for one hyperbolic singularity, with the derived sector
/// constants cached.
#[derive(Clone, Copy, Debug)]
pub struct Hyperbolicity {
    /// Real part of the multiplier eta.
    pub a: f64,
    /// Imaginary part of the multiplier eta; must be positive.
    pub b: f64,
    /// Slope offset u* = -a/b: the ray {u = u* v} bisects nothing special,
    /// but zeta* = u* + i is the unit-height reference point of the sector.
    pub u_star: f64,
    /// Opening angle of S, in (0, pi).
    pub theta: f64,
    /// Straightening exponent gamma = pi / theta, always > 1.
    pub gamma: f64,
    /// rho = |zeta*|^gamma = -Phi(zeta*), the depth of the reference point
    /// in the straightened plane.
    pub rho: f64,
    /// Slope of r -> Im Phi(zeta* + r) at r = 0: beta = gamma rho^(1 - 2/gamma).
    pub beta: f64,
}

impl Hyperbolicity {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Error::check(a.is_finite(), "a", a, "must be finite")?;
        Error::check(b.is_finite() && b > 0.0, "b", b, "must be finite and positive")?;
        let u_star = -a / b;
        // theta = angle of the ray through zeta* = u* + i, in (0, pi).
        let theta = 1.0_f64.atan2(u_star);
        let gamma = std::f64::consts::PI / theta;
        let rho = (u_star * u_star + 1.0).powf(0.5 * gamma);
        let beta = gamma * rho.powf(1.0 - 2.0 / gamma);
        Ok(Hyperbolicity { a, b, u_star, theta, gamma, rho, beta })
    }

    /// The multiplier eta = a + ib.
    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// Unit-height reference point zeta* = u* + i.
    pub fn zeta_star(&self) -> Complex64 {
        Complex64::new(self.u_star, 1.0)
    }

    /// True if u + iv lies in the closed sector cl(S).
    pub fn in_closed_sector(&self, u: f64, v: f64) -> bool {
        v >= 0.0 && self.b * u + self.a * v >= 0.0
    }

    /// True if u + iv lies in the open sector S.
    pub fn in_sector(&self, u: f64, v: f64) -> bool {
        v > 0.0 && self.b * u + self.a * v > 0.0
    }

    /// Straightening map Phi(zeta) = zeta^gamma on the closed sector.
    ///
    /// The branch fixes arg zeta in [0, pi], so cl(S) lands in the closed
    /// upper half-plane with the two sector edges going to the two halves of
    /// the real axis. Rejects points outside cl(S); Phi(0) = 0.
    pub fn phi(&self, zeta: Complex64) -> Result<Complex64> {
        Error::check(
            self.in_closed_sector(zeta.re, zeta.im),
            "zeta",
            zeta.im,
            "must lie in the closed sector",
        )?;
        Ok(self.uhp_power(zeta))
    }

    // zeta^gamma for arg zeta in [0, pi]; caller guarantees Im zeta >= 0.
    fn uhp_power(&self, zeta: Complex64) -> Complex64 {
        let m = zeta.norm();
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(m.powf(self.gamma), self.gamma * zeta.arg())
    }

    /// Unit-height image Phi(zeta* + r) for r >= 0.
    pub fn phi_unit(&self, r: f64) -> Complex64 {
        // zeta* + r stays at height 1, so the branch condition holds for
        // every finite r.
        self.uhp_power(Complex64::new(self.u_star + r, 1.0))
    }

    /// Scaled coordinates of an open-sector point given as u + iv.
    pub fn coords_from_uv(&self, u: f64, v: f64) -> Result<SectorCoords> {
        Error::check(v > 0.0, "v", v, "must be positive")?;
        Error::check(
            self.b * u + self.a * v > 0.0,
            "u",
            u,
            "must satisfy b u + a v > 0",
        )?;
        let s = v;
        let r = u / v - self.u_star;
        let big = self.uhp_power(Complex64::new(u, v));
        let unit = self.phi_unit(r);
        Ok(SectorCoords {
            u,
            v,
            r,
            s,
            big_u: big.re,
            big_v: big.im,
            unit_u: unit.re,
            unit_v: unit.im,
        })
    }

    /// Scaled coordinates from (r, s) with r > 0, s > 0.
    pub fn coords_from_rs(&self, r: f64, s: f64) -> Result<SectorCoords> {
        Error::check(r > 0.0 && r.is_finite(), "r", r, "must be positive and finite")?;
        Error::check(s > 0.0 && s.is_finite(), "s", s, "must be positive and finite")?;
        self.coords_from_uv(s * (self.u_star + r), s)
    }

    /// Point on the leaf through alpha at leaf-parameter zeta.
    ///
    /// The leaf is parametrized as
    ///   z1 = alpha exp(i eta w),  z2 = exp(i w),  w = zeta + ln|alpha| / b,
    /// which keeps |z1| = exp(-(b u + a v)) and |z2| = exp(-v) independent of
    /// alpha. Requires 0 < |alpha| <= 1 and zeta in cl(S), so both moduli
    /// stay at most 1.
    pub fn leaf_point(&self, alpha: Complex64, zeta: Complex64) -> Result<(Complex64, Complex64)> {
        let am = alpha.norm();
        Error::check(
            am > 0.0 && am <= 1.0,
            "alpha",
            am,
            "modulus must lie in (0, 1]",
        )?;
        Error::check(
            self.in_closed_sector(zeta.re, zeta.im),
            "zeta",
            zeta.im,
            "must lie in the closed sector",
        )?;
        let w = zeta + Complex64::new(am.ln() / self.b, 0.0);
        let z1 = alpha * (Complex64::i() * self.eta() * w).exp();
        let z2 = (Complex64::i() * w).exp();
        Ok((z1, z2))
    }

    /// Misalignment between the leaf tangent and the direction field
    /// (eta z1, z2) at the leaf point: |dz1 z2 - dz2 eta z1| with
    /// dz = d/d zeta of the parametrization. Zero in exact arithmetic.
    pub fn tangency_residual(&self, alpha: Complex64, zeta: Complex64) -> Result<f64> {
        let (z1, z2) = self.leaf_point(alpha, zeta)?;
        let eta = self.eta();
        let d1 = Complex64::i() * eta * z1;
        let d2 = Complex64::i() * z2;
        let cross = d1 * z2 - d2 * (eta * z1);
        Ok(cross.norm())
    }

    /// Region of the sector whose leaf points land in the bidisc of radius
    /// delta: both |z1| < delta and |z2| < delta.
    pub fn preimage_region(&self, delta: f64) -> Result<BidiscPreimage> {
        Error::check(
            delta > 0.0 && delta <= 1.0,
            "delta",
            delta,
            "must lie in (0, 1]",
        )?;
        Ok(BidiscPreimage { t: -delta.ln(), a: self.a, b: self.b })
    }
}

/// Scaled coordinates of a sector point: raw (u, v), shape/height pair
/// (r, s), straightened image (big_u, big_v) and its unit-height version
/// (unit_u, unit_v). The two images satisfy
/// (big_u, big_v) = s^gamma (unit_u, unit_v).
#[derive(Clone, Copy, Debug)]
pub struct SectorCoords {
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub s: f64,
    pub big_u: f64,
    pub big_v: f64,
    pub unit_u: f64,
    pub unit_v: f64,
}

impl SectorCoords {
    /// Straightened image as a complex number.
    pub fn phi(&self) -> Complex64 {
        Complex64::new(self.big_u, self.big_v)
    }

    /// Unit-height image as a complex number.
    pub fn phi_unit(&self) -> Complex64 {
        Complex64::new(self.unit_u, self.unit_v)
    }
}

/// Sub-region {v > t, b u + a v > t} of the sector: exactly the leaf
/// parameters whose leaf point lies in the open bidisc of radius e^{-t}.
#[derive(Clone, Copy, Debug)]
pub struct BidiscPreimage {
    /// Log cutoff t = -ln(delta), >= 0.
    pub t: f64,
    a: f64,
    b: f64,
}

impl BidiscPreimage {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        v > self.t && self.b * u + self.a * v > self.t
    }
}
