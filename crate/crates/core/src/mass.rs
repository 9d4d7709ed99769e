//! Trace mass of the harmonic extension over shrinking bidisc preimages.
//!
//! The region of integration is the sector slab `{v > t, bu + av > t}` with
//! `t = -ln(delta)`, expressed in leaf coordinates `(r, s)` where `u = (r +
//! u*) s`, `v = s`, so `du dv = s dr ds` and `bu + av = b s r`. The integrand
//! is the extension value along the scaled curve times the pullback density
//!
//! ```text
//! (2/pi) ((a^2 + b^2) e^{-2bsr} + e^{-2s})
//! ```
//!
//! The slab is split along the interior ray `b r = split` (default 1). On the
//! outer half `{b r >= split}` the integral is iterated with `s` outside; on
//! the inner half the substitution `l = b s r` turns the slab into `{l > t,
//! s > max(l/split, t)}` with measure `dl ds / b`, which keeps both the
//! integrand and the truncation certificates exponentially controlled.
//!
//! Every truncated range carries an explicit tail bound built from the
//! envelope machinery on [`BoundaryData`]: the pointwise height bound
//! `4 v m(d/2) / (pi d^2) + env((d / 2 sqrt 2)^{1/gamma})` is bracketed by
//! monotone closed forms in each region and then integrated exactly. The
//! reported `err` therefore covers quadrature error, discarded tails, and the
//! tolerance of the pointwise extension evaluations.

use std::cell::RefCell;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::poisson_extend;
use crate::geometry::Hyperbolicity;
use crate::profiles::{BoundaryData, EpsilonProfile};
use crate::quad::{integrate_to_infinity, Estimate, QuadratureSpec};

/// Pullback of the ambient area form through the linearizing projection,
/// as a density against `du dv` at `zeta = u + iv`.
///
/// The caller is responsible for staying inside the closed sector; the
/// formula itself is finite everywhere.
pub fn trace_density(h: &Hyperbolicity, zeta: Complex64) -> f64 {
    let (u, v) = (zeta.re, zeta.im);
    let q2 = h.a * h.a + h.b * h.b;
    (2.0 / PI) * (q2 * (-2.0 * (h.b * u + h.a * v)).exp() + (-2.0 * v).exp())
}

/// One row of a mass scan: the trace integral over the preimage of the
/// `delta`-bidisc together with its error bound and the two normalized
/// ratios read off by the decay experiments.
#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub delta: f64,
    /// Slab offset, `-ln(delta)`.
    pub t: f64,
    /// Trace integral value.
    pub mass: f64,
    /// Quadrature error plus every discarded-tail certificate.
    pub err: f64,
    /// `mass / delta^2`; drifts to zero exactly when the point mass at the
    /// singularity vanishes.
    pub ratio_lelong: f64,
    /// `mass / (delta^2 eps(delta))`; bounded below when the data profile
    /// saturates the decay envelope.
    pub ratio_sharp: f64,
}

/// Closed-form truncation certificates for one half of the split slab.
///
/// All bounds are derived from the even data window bound `m(x)` (with
/// `m(x)/x` non-increasing) and the decreasing envelope tail `E(c)`:
/// on `{b r >= split}` the curve modulus sits between `(r/2)^gamma` and
/// `(1.6 r)^gamma` once `r >= r_t`, and on `{b r <= split}` it sits between
/// `1` and `mhat^gamma` with the height bounded by `beta_bar * r`.
struct Certificates<'a> {
    bd: &'a BoundaryData,
    gamma: f64,
    b: f64,
    /// Coefficient of the `e^{-2bsr}` density piece (`a^2 + b^2`, or zero
    /// for the upward-decay-only variant).
    hcoef: f64,
    split: f64,
    /// Interior boundary `split / b` in the `r` variable.
    r_lo: f64,
    /// Radius past which the outer-half modulus brackets hold.
    r_t: f64,
    /// Fixed split between the windowed segment and the far tail in the
    /// outer-half `s`-truncation bound.
    r0: f64,
    /// Max curve modulus over `[r_lo, r0]`.
    z2: f64,
    c2: f64,
    c6: f64,
    /// `(8 gamma / pi) * 10.24^gamma`, the outer-half window constant.
    w_win: f64,
    /// Slope bound for the curve height on `[0, r_lo]`.
    beta_bar: f64,
    /// `mhat / 2^{1/gamma}`; `(chat s)^gamma` caps the half-window width.
    chat: f64,
}

impl<'a> Certificates<'a> {
    fn new(h: &Hyperbolicity, bd: &'a BoundaryData, split: f64, horizontal: bool) -> Self {
        let gamma = h.gamma;
        let r_lo = split / h.b;
        let r_t = (2.0 * h.u_star.abs() + 2.0)
            .max(4.0 * gamma)
            .max(2.0)
            .max(r_lo);
        let r0 = r_t.max(r_lo + 1.0);
        let modulus = |r: f64| ((h.u_star + r) * (h.u_star + r) + 1.0).powf(gamma / 2.0);
        let c2 = (2.0 * SQRT_2).powf(-1.0 / gamma);
        let mhat = ((h.u_star.abs() + r_lo) * (h.u_star.abs() + r_lo) + 1.0).sqrt();
        Certificates {
            bd,
            gamma,
            b: h.b,
            hcoef: if horizontal { h.a * h.a + h.b * h.b } else { 0.0 },
            split,
            r_lo,
            r_t,
            r0,
            z2: modulus(r_lo).max(modulus(r0)),
            c2,
            c6: 0.5 * c2,
            w_win: (8.0 * gamma / PI) * 10.24_f64.powf(gamma),
            beta_bar: gamma * mhat.powf(gamma - 1.0),
            chat: mhat * 0.5_f64.powf(1.0 / gamma),
        }
    }

    /// Bound on the outer-half inner integral past radius `r`, at height `s`.
    ///
    /// Valid for `r >= r_t`: there the window term of the height bound is at
    /// most `(8 gamma / pi) 6.4^gamma (rs)^{-gamma} r^{-1} m((1.6 rs)^gamma)`
    /// and the envelope argument is at least `c6 r s`.
    fn tail1(&self, s: f64, r: f64) -> f64 {
        if r < self.r_t {
            return f64::INFINITY;
        }
        let pref = (2.0 / PI) * (1.0 + self.hcoef) * (-2.0 * s).exp();
        let win = self.w_win * s * self.bd.window_tail_integral(1.6 * s * r, self.gamma + 1.0);
        let env = self.bd.tau_envelope_tail(self.c6 * s * r) / self.c6;
        pref * (win + env)
    }

    /// Pointwise height bound on the segment `r in [r_lo, r0]`, decreasing
    /// in `s`; the curve modulus there lies in `[s^gamma, z2 s^gamma]`.
    fn segment_height_sup(&self, s: f64) -> f64 {
        let sg = s.powf(self.gamma);
        (4.0 / PI) * self.bd.windowed_mass_bound(0.5 * self.z2 * sg) / sg
            + self.bd.tau_envelope(self.c2 * s)
    }

    /// Bound on the outer-half integral past height `s` (both `r`-ranges).
    fn outer_tail1(&self, s: f64) -> f64 {
        let pref = (2.0 / PI) * (1.0 + self.hcoef);
        let e2s = (-2.0 * s).exp();
        // int_s^inf x e^{-2x} dx = e^{-2s} (s/2 + 1/4)
        let lin = e2s * (0.5 * s + 0.25);
        let segment = (self.r0 - self.r_lo) * self.segment_height_sup(s) * lin;
        let far_win =
            self.w_win * self.bd.window_tail_integral(1.6 * s * self.r0, self.gamma + 1.0) * lin;
        let far_env = 0.5 * e2s * self.bd.tau_envelope_tail(self.c6 * s * self.r0) / self.c6;
        pref * (segment + far_win + far_env)
    }

    /// Pointwise height bound on the inner half (`r <= r_lo`), decreasing in
    /// `s` for fixed `l`.
    fn inner_height_sup(&self, l: f64, s: f64) -> f64 {
        let sg = s.powf(self.gamma);
        (4.0 / PI) * self.beta_bar * (l / self.b)
            * self.bd.windowed_mass_bound((self.chat * s).powf(self.gamma))
            / (sg * s)
            + self.bd.tau_envelope(self.c2 * s)
    }

    /// Bound on the inner-half `s` integral past `s`, at fixed `l`.
    ///
    /// Valid whenever `s >= l / split`, so that the height-slope bound
    /// applies along the whole remaining ray.
    fn tail2(&self, l: f64, s: f64) -> f64 {
        let g_int = (4.0 * self.beta_bar * l / (PI * self.b))
            * self.chat.powf(self.gamma)
            * self.bd.window_tail_integral(self.chat * s, self.gamma + 1.0)
            + self.bd.tau_envelope_tail(self.c2 * s) / self.c2;
        (2.0 / (PI * self.b))
            * (self.hcoef * (-2.0 * l).exp() * g_int
                + 0.5 * (-2.0 * s).exp() * self.inner_height_sup(l, s))
    }

    /// Bound on the inner-half integral past `l`, requiring `l >= split * t`
    /// so the inner range starts at `l / split`.
    fn outer_tail2(&self, l: f64, t: f64) -> f64 {
        if l < self.split * t {
            return f64::INFINITY;
        }
        let c = self.split;
        let y = self.chat * l / c;
        let e2l = (-2.0 * l).exp();
        let piece1 = self.hcoef
            * ((4.0 * self.beta_bar / (PI * self.b))
                * self.chat.powf(self.gamma)
                * self.bd.window_tail_integral(y, self.gamma + 1.0)
                * e2l
                * (0.5 * l + 0.25)
                + 0.5 * e2l * self.bd.tau_envelope_tail(self.c2 * l / c) / self.c2);
        let phi = self.bd.windowed_mass_bound(y.powf(self.gamma)) / y.powf(self.gamma);
        let piece2 = 0.25 * c * (-2.0 * l / c).exp()
            * ((4.0 / PI) * (self.beta_bar * c / self.b) * self.chat.powf(self.gamma) * phi
                + self.bd.tau_envelope(self.c2 * l / c));
        (2.0 / (PI * self.b)) * (piece1 + piece2)
    }
}

/// Density factor shared by both halves in leaf coordinates; `hcoef` is
/// `a^2 + b^2` or zero. Equals [`trace_density`] at `u = (r + u*) s, v = s`.
fn density_rs(h: &Hyperbolicity, hcoef: f64, r: f64, s: f64) -> f64 {
    (2.0 / PI) * (hcoef * (-2.0 * h.b * s * r).exp() + (-2.0 * s).exp())
}

struct SectorIntegrator<'a> {
    h: &'a Hyperbolicity,
    bd: &'a BoundaryData,
    certs: Certificates<'a>,
    q_in1: QuadratureSpec,
    q_in2: QuadratureSpec,
    q_out: QuadratureSpec,
    q_pt: QuadratureSpec,
    /// First extension failure, surfaced after the aborted integral unwinds.
    slot: RefCell<Option<Error>>,
    /// Worst ratio of an inner estimate's error to its own tolerance; the
    /// final error bound scales the pointwise-error cover by this.
    kappa: RefCell<f64>,
    /// Radius where the unit-height curve crosses the vertical axis, a
    /// quadrature break when it lies inside the integrated range.
    r_axis: f64,
}

impl<'a> SectorIntegrator<'a> {
    fn new(
        h: &'a Hyperbolicity,
        bd: &'a BoundaryData,
        split: f64,
        horizontal: bool,
        q: &QuadratureSpec,
    ) -> Self {
        let certs = Certificates::new(h, bd, split, horizontal);
        let mut q_in1 = q.clone();
        // start the radial growth where the far certificates switch on
        q_in1.tail_cutoff_t = certs.r_t - certs.r_lo + 1.0;
        let mut q_in2 = q.clone();
        q_in2.tail_cutoff_t = 4.0;
        let mut q_out = q.clone();
        q_out.tail_cutoff_t = 4.0;
        SectorIntegrator {
            h,
            bd,
            certs,
            q_in1,
            q_in2,
            q_out,
            q_pt: q.tightened(0.1),
            slot: RefCell::new(None),
            kappa: RefCell::new(1.0),
            r_axis: (PI / (2.0 * h.gamma)).tan().recip() - h.u_star,
        }
    }

    fn height(&self, r: f64, sg: f64) -> f64 {
        let z = self.h.phi_unit(r);
        match poisson_extend(self.bd, sg * z.re, sg * z.im, &self.q_pt) {
            Ok(est) => est.value,
            Err(err) => {
                self.slot.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    }

    fn note(&self, est: &Estimate, q: &QuadratureSpec) {
        let denom = q.tol_abs + q.tol_rel * est.value.abs();
        if denom > 0.0 {
            let k = est.error / denom;
            let mut worst = self.kappa.borrow_mut();
            if k > *worst {
                *worst = k;
            }
        }
    }

    fn surface(&self, res: Result<Estimate>) -> Result<Estimate> {
        let captured = self.slot.borrow_mut().take();
        match (res, captured) {
            (_, Some(err)) => Err(err),
            (other, None) => other,
        }
    }

    /// Inner radial integral of the outer half at height `s`.
    fn outer_half_inner(&self, s: f64) -> f64 {
        let sg = s.powf(self.certs.gamma);
        let f = |r: f64| density_rs(self.h, self.certs.hcoef, r, s) * self.height(r, sg) * s;
        // density boundary layer plus the two curve landmarks
        let mut breaks = vec![self.certs.r_lo + 1.0 / (self.h.b * (s + 1.0))];
        if self.r_axis > self.certs.r_lo {
            breaks.push(self.r_axis);
        }
        if -self.h.u_star > self.certs.r_lo {
            breaks.push(-self.h.u_star);
        }
        match integrate_to_infinity(f, self.certs.r_lo, |r| self.certs.tail1(s, r), &breaks, &self.q_in1)
        {
            Ok(est) => {
                self.note(&est, &self.q_in1);
                est.value
            }
            Err(err) => {
                self.slot.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    }

    /// Outer half `{b r >= split}`, iterated with `s` outside.
    fn outer_half(&self, t: f64) -> Result<Estimate> {
        let res = integrate_to_infinity(
            |s| self.outer_half_inner(s),
            t,
            |s| self.certs.outer_tail1(s),
            &[],
            &self.q_out,
        );
        self.surface(res)
    }

    /// Inner height integral of the inner half at slab coordinate `l`.
    fn inner_half_inner(&self, l: f64, t: f64) -> f64 {
        let lo = (l / self.certs.split).max(t);
        let f = |s: f64| {
            let r = l / (self.h.b * s);
            density_rs(self.h, self.certs.hcoef, r, s) * self.height(r, s.powf(self.certs.gamma))
                / self.h.b
        };
        let mut breaks = Vec::new();
        if self.r_axis > 0.0 && self.r_axis < self.certs.r_lo {
            // height where the curve point crosses the vertical axis
            breaks.push(l / (self.h.b * self.r_axis));
        }
        match integrate_to_infinity(f, lo, |s| self.certs.tail2(l, s), &breaks, &self.q_in2) {
            Ok(est) => {
                self.note(&est, &self.q_in2);
                est.value
            }
            Err(err) => {
                self.slot.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    }

    /// Inner half `{b r <= split}` in slab coordinates `(l, s)`.
    fn inner_half(&self, t: f64) -> Result<Estimate> {
        let res = integrate_to_infinity(
            |l| self.inner_half_inner(l, t),
            t,
            |l| self.certs.outer_tail2(l, t),
            &[],
            &self.q_out,
        );
        self.surface(res)
    }
}

fn validate_inputs(
    h: &Hyperbolicity,
    bd: &BoundaryData,
    delta: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    q.validate()?;
    Error::check(
        delta.is_finite() && delta > 0.0 && delta <= 1.0,
        "delta",
        delta,
        "must lie in (0, 1]",
    )?;
    Error::check(
        (bd.gamma() - h.gamma).abs() <= 1e-9 * h.gamma,
        "gamma",
        bd.gamma(),
        "data exponent must match the sector exponent",
    )?;
    Error::check(
        bd.tau_envelope_tail(1.0).is_finite(),
        "boundary_data",
        f64::INFINITY,
        "data envelope must have a finite tail integral",
    )?;
    Ok((-delta.ln()).max(0.0))
}

/// The two halves of the slab integral, split along the ray `b r = split`.
///
/// Exposed so the decomposition can be cross-checked at different split
/// radii; `mass_bidisc` uses `split = 1`. Requires `split >= 1` so the
/// outer-half density comparison `e^{-2bsr} <= e^{-2s}` stays available to
/// the truncation certificates.
pub fn bidisc_mass_parts(
    h: &Hyperbolicity,
    bd: &BoundaryData,
    delta: f64,
    split: f64,
    q: &QuadratureSpec,
) -> Result<(Estimate, Estimate)> {
    let t = validate_inputs(h, bd, delta, q)?;
    Error::check(
        split.is_finite() && (1.0..=1e3).contains(&split),
        "split",
        split,
        "must lie in [1, 1e3]",
    )?;
    let integrator = SectorIntegrator::new(h, bd, split, true, q);
    let outer = integrator.outer_half(t)?;
    let inner = integrator.inner_half(t)?;
    let kappa = *integrator.kappa.borrow();
    let spread = |e: Estimate| {
        // cover for the pointwise error of the inner estimates and of the
        // extension evaluations, which the outer quadrature integrates blindly
        let cover = (kappa + 0.2) * (q.tol_rel * e.value.abs() + 256.0 * q.tol_abs);
        e.padded(cover)
    };
    Ok((spread(outer), spread(inner)))
}

/// Outer-half integral with only the `e^{-2s}` density piece.
///
/// A lower bound for the full mass (both discarded pieces are nonnegative);
/// with profile data it already carries the `delta^2 eps(delta)` decay.
pub fn vertical_mass_term(
    h: &Hyperbolicity,
    bd: &BoundaryData,
    delta: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let t = validate_inputs(h, bd, delta, q)?;
    let integrator = SectorIntegrator::new(h, bd, 1.0, false, q);
    let outer = integrator.outer_half(t)?;
    let kappa = *integrator.kappa.borrow();
    Ok(outer.padded((kappa + 0.2) * (q.tol_rel * outer.value.abs() + 256.0 * q.tol_abs)))
}

/// Trace mass of the extension over the preimage of the `delta`-bidisc,
/// with the normalized ratios against the supplied comparison profile.
///
/// `delta = 1` is accepted and gives the mass of the full unit bidisc
/// preimage. Constant data is rejected: its slab integral diverges.
pub fn mass_bidisc(
    h: &Hyperbolicity,
    bd: &BoundaryData,
    ep: &EpsilonProfile,
    delta: f64,
    q: &QuadratureSpec,
) -> Result<MassReport> {
    let (outer, inner) = bidisc_mass_parts(h, bd, delta, 1.0, q)?;
    let mass = outer.value + inner.value;
    let err = outer.error + inner.error;
    let t = (-delta.ln()).max(0.0);
    let eps = ep.eval(delta);
    Ok(MassReport {
        delta,
        t,
        mass,
        err,
        ratio_lelong: mass / (delta * delta),
        ratio_sharp: mass / (delta * delta * eps),
    })
}

/// One report per `delta`, computed in parallel; failures stay per-entry so
/// one bad radius does not abort the scan. Order follows the input.
pub fn mass_scan(
    h: &Hyperbolicity,
    bd: &BoundaryData,
    ep: &EpsilonProfile,
    deltas: &[f64],
    q: &QuadratureSpec,
) -> Vec<Result<MassReport>> {
    deltas
        .par_iter()
        .map(|&delta| mass_bidisc(h, bd, ep, delta, q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q_loose() -> QuadratureSpec {
        QuadratureSpec {
            tol_rel: 1e-5,
            tol_abs: 1e-10,
            ..QuadratureSpec::default()
        }
    }

    fn right_angle() -> Hyperbolicity {
        Hyperbolicity::new(0.0, 1.0).unwrap()
    }

    fn power_data(gamma: f64, p: f64, amp: f64) -> BoundaryData {
        BoundaryData::profile(EpsilonProfile::power(p, amp).unwrap(), gamma).unwrap()
    }

    #[test]
    fn trace_density_pinned_values() {
        let h = right_angle();
        // at u = v = 1 both exponents are 2: (2/pi)(e^{-2} + e^{-2}) = (4/pi) e^{-2}
        assert_relative_eq!(
            trace_density(&h, Complex64::new(1.0, 1.0)),
            0.172314234414789,
            max_relative = 1e-12
        );
        let tilted = Hyperbolicity::new(1.0, 1.0).unwrap();
        // (2/pi)(2 e^{-2} + e^{-2}) = (6/pi) e^{-2}
        assert_relative_eq!(
            trace_density(&tilted, Complex64::new(0.0, 1.0)),
            0.258471351622184,
            max_relative = 1e-12
        );
        // deep inside the slab both exponentials are dead
        assert!(trace_density(&h, Complex64::new(40.0, 40.0)) < 1e-30);
    }

    #[test]
    fn leaf_density_matches_plane_density() {
        let h = Hyperbolicity::new(-1.0, 1.0).unwrap();
        let q2 = h.a * h.a + h.b * h.b;
        for (r, s) in [(0.3, 0.9), (2.0, 1.7), (0.05, 4.0), (11.0, 0.2)] {
            let c = h.coords_from_rs(r, s).unwrap();
            assert_relative_eq!(
                density_rs(&h, q2, r, s),
                trace_density(&h, Complex64::new(c.u, c.v)),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn outer_half_density_comparison_on_grid() {
        // on {b r >= 1} the slab coordinate dominates the height coordinate
        for h in [right_angle(), Hyperbolicity::new(-1.0, 1.0).unwrap()] {
            for i in 1..=10 {
                let r = i as f64 / h.b;
                for j in 1..=10 {
                    let s = 0.3 * j as f64;
                    assert!((-2.0 * h.b * s * r).exp() <= (-2.0 * s).exp() * (1.0 + 1e-15));
                }
            }
        }
    }

    #[test]
    fn split_radius_does_not_move_the_total() {
        let h = right_angle();
        let bd = power_data(2.0, 1.0, 2.0);
        let q = q_loose();
        let (o1, i1) = bidisc_mass_parts(&h, &bd, 0.5, 1.0, &q).unwrap();
        let (o2, i2) = bidisc_mass_parts(&h, &bd, 0.5, 2.0, &q).unwrap();
        let m1 = o1.value + i1.value;
        let m2 = o2.value + i2.value;
        let budget = o1.error + i1.error + o2.error + i2.error;
        assert!(
            (m1 - m2).abs() <= budget + 1e-12,
            "split moved mass: {m1} vs {m2}, budget {budget}"
        );
        // both decompositions put real weight in both halves
        assert!(o1.value > 0.0 && i1.value > 0.0);
    }

    #[test]
    fn mass_grows_with_the_bidisc() {
        let h = right_angle();
        let bd = power_data(2.0, 1.0, 2.0);
        let ep = EpsilonProfile::power(1.0, 1.0).unwrap();
        let q = q_loose();
        let small = mass_bidisc(&h, &bd, &ep, 0.35, &q).unwrap();
        let large = mass_bidisc(&h, &bd, &ep, 0.6, &q).unwrap();
        assert!(
            small.mass <= large.mass + small.err + large.err,
            "nested regions lost mass: {} vs {}",
            small.mass,
            large.mass
        );
        assert!(small.mass > 0.0);
        // error accounting stays a small fraction of the value
        assert!(small.err <= 0.05 * small.mass);
        assert!(large.err <= 0.05 * large.mass);
    }

    #[test]
    fn vertical_term_is_a_lower_bound() {
        let h = right_angle();
        let bd = power_data(2.0, 1.0, 2.0);
        let ep = EpsilonProfile::power(1.0, 1.0).unwrap();
        let q = q_loose();
        let report = mass_bidisc(&h, &bd, &ep, 0.5, &q).unwrap();
        let vert = vertical_mass_term(&h, &bd, 0.5, &q).unwrap();
        assert!(vert.value > 0.0);
        assert!(
            vert.value <= report.mass + vert.error + report.err,
            "lower bound exceeds mass: {} vs {}",
            vert.value,
            report.mass
        );
    }

    #[test]
    fn report_fields_are_consistent() {
        let h = right_angle();
        let bd = power_data(2.0, 0.5, 10.0);
        let ep = EpsilonProfile::power(0.5, 10.0).unwrap();
        let q = q_loose();
        let r = mass_bidisc(&h, &bd, &ep, 0.5, &q).unwrap();
        assert_relative_eq!(r.t, std::f64::consts::LN_2, max_relative = 1e-15);
        assert_relative_eq!(r.ratio_lelong, r.mass / 0.25, max_relative = 1e-15);
        assert_relative_eq!(
            r.ratio_sharp,
            r.mass / (0.25 * ep.eval(0.5)),
            max_relative = 1e-15
        );
        assert!(r.mass > 0.0 && r.err > 0.0);
    }

    #[test]
    fn bidisc_mass_matches_independent_panel_quadrature() {
        // reference values from a fixed-panel Gauss integrator built apart
        // from the adaptive stack (geometric panels in s and r, dense
        // kernel-matrix extension); its two finest resolutions agreed to
        // better than 4e-3, and the band here leaves threefold headroom
        let q = QuadratureSpec {
            tol_rel: 1e-5,
            ..QuadratureSpec::default()
        };
        for (a, amp, delta, want) in [
            (0.0, 2.0, 0.5, 0.086209851),
            (-1.0, 10.0, 0.5, 0.097524315),
            (-1.0, 10.0, 0.1, 0.00045734822),
        ] {
            let h = Hyperbolicity::new(a, 1.0).unwrap();
            let ep = EpsilonProfile::power(1.0, amp).unwrap();
            let bd = BoundaryData::profile(ep.clone(), h.gamma).unwrap();
            let rep = mass_bidisc(&h, &bd, &ep, delta, &q).unwrap();
            assert!(
                (rep.mass - want).abs() <= 0.02 * want,
                "(a = {a}, delta = {delta}): {} vs reference {}",
                rep.mass,
                want
            );
        }
    }

    #[test]
    fn scan_keeps_order_and_offsets() {
        let h = right_angle();
        let bd = power_data(2.0, 1.0, 2.0);
        let ep = EpsilonProfile::power(1.0, 1.0).unwrap();
        let q = q_loose();
        let deltas = [(-1.0_f64).exp(), (-2.0_f64).exp()];
        let rows = mass_scan(&h, &bd, &ep, &deltas, &q);
        assert_eq!(rows.len(), 2);
        let r0 = rows[0].as_ref().unwrap();
        let r1 = rows[1].as_ref().unwrap();
        assert_relative_eq!(r0.t, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r1.t, 2.0, max_relative = 1e-12);
        assert!(r1.mass <= r0.mass);
    }

    #[test]
    fn rejections() {
        let h = right_angle();
        let bd = power_data(2.0, 1.0, 1.0);
        let ep = EpsilonProfile::power(1.0, 1.0).unwrap();
        let q = QuadratureSpec::default();
        for bad in [0.0, -0.5, 1.0 + 1e-9, f64::NAN] {
            assert!(mass_bidisc(&h, &bd, &ep, bad, &q).is_err(), "accepted {bad}");
        }
        // constant data diverges on the slab
        let flat = BoundaryData::constant(1.0, 2.0).unwrap();
        assert!(matches!(
            mass_bidisc(&h, &flat, &ep, 0.5, &q),
            Err(Error::InvalidParameter { .. })
        ));
        // exponent mismatch between data and sector
        let wrong = power_data(4.0, 1.0, 1.0);
        assert!(mass_bidisc(&h, &wrong, &ep, 0.5, &q).is_err());
        // split outside the certified range
        assert!(bidisc_mass_parts(&h, &bd, 0.5, 0.5, &q).is_err());
    }
}
