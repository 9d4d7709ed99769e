//! Harmonic extension of even boundary data to the upper half plane.
//!
//! The extension is the Poisson integral
//!
//!   H(u + iv) = (1/pi) integral of data(x) v / (v^2 + (u - x)^2) dx
//!
//! evaluated in the tau parametrization x = +-tau^gamma, which turns each
//! half line into
//!
//!   integral of gamma tau^{gamma-1} data(tau) K(u -+ tau^gamma) dtau,
//!
//! with certified truncation bounds. Two evaluation paths: a direct one, and
//! a near-boundary split that peels off the kernel peak analytically once v
//! is small against 1 + |u|. Both return a value together with a rigorous
//! error bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Hyperbolicity;
use crate::profiles::BoundaryData;
use crate::quad::{
    grow_cutoff, integrate_with_breaks, integrate_to_infinity, Estimate, QuadratureSpec,
};

/// Below v = NEAR_BOUNDARY_RATIO * (1 + |u|) the kernel peak is too narrow
/// for direct quadrature and the split path takes over.
pub const NEAR_BOUNDARY_RATIO: f64 = 1e-4;

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Pos,
    Neg,
}

impl Side {
    fn x(self, tau_pow_gamma: f64) -> f64 {
        match self {
            Side::Pos => tau_pow_gamma,
            Side::Neg => -tau_pow_gamma,
        }
    }

    // tau position of the kernel peak on this half line, if the peak falls
    // on it.
    fn peak(self, u: f64, gamma: f64) -> Option<f64> {
        let on_side = match self {
            Side::Pos => u > 0.0,
            Side::Neg => u < 0.0,
        };
        on_side.then(|| u.abs().powf(1.0 / gamma))
    }
}

fn side_integrand(bd: &BoundaryData, side: Side, u: f64, v: f64, tau: f64) -> f64 {
    let g = bd.gamma();
    let d = u - side.x(tau.powf(g));
    g * tau.powf(g - 1.0) * bd.tau_data(tau) * v / (v * v + d * d)
}

// Integral of the side integrand over [lo, hi], without the 1/pi.
//
// Below tau = 1 the substitution tau = sigma^3 absorbs the tau^{gamma-1}
// endpoint nonsmoothness (3 sigma^{3 gamma - 1} has three continuous
// derivatives for every gamma > 1); above 1 the integrand is smooth and is
// taken directly. Break hints: data kinks and the kernel peak.
fn tau_piece(
    bd: &BoundaryData,
    side: Side,
    u: f64,
    v: f64,
    lo: f64,
    hi: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    if lo >= hi {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let mut breaks = bd.tau_breaks();
    if let Some(peak) = side.peak(u, bd.gamma()) {
        breaks.push(peak);
    }
    let mut est = Estimate::new(0.0, 0.0);
    let mid = hi.min(1.0);
    if lo < mid {
        let sigma_breaks: Vec<f64> = breaks.iter().map(|t| t.cbrt()).collect();
        let part = integrate_with_breaks(
            |sigma| 3.0 * sigma * sigma * side_integrand(bd, side, u, v, sigma * sigma * sigma),
            lo.cbrt(),
            mid.cbrt(),
            &sigma_breaks,
            q,
        )?;
        est = est.plus(part);
    }
    let mid = lo.max(1.0);
    if mid < hi {
        let part = integrate_with_breaks(
            |tau| side_integrand(bd, side, u, v, tau),
            mid,
            hi,
            &breaks,
            q,
        )?;
        est = est.plus(part);
    }
    Ok(est)
}

// Integral of the side integrand over [lo, infinity), without the 1/pi.
//
// Past a cutoff T with T^gamma >= 2|u| the kernel is at most 4 v tau^{-2 gamma},
// so the tail is bounded by 4 v env(T) T^{-gamma}; the cutoff grows until that
// fits the budget and the remainder is added to the error bound.
fn tau_halfline(
    bd: &BoundaryData,
    side: Side,
    u: f64,
    v: f64,
    lo: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let g = bd.gamma();
    let peak = side.peak(u, g).unwrap_or(0.0);
    let t0 = (lo + q.tail_cutoff_t)
        .max(1.1 * (2.0 * u.abs()).powf(1.0 / g))
        .max(2.0 * peak)
        .max(1.0);
    let mut est = tau_piece(bd, side, u, v, lo, t0, q)?;
    let tail = |cut: f64| 4.0 * v * bd.tau_envelope(cut) * cut.powf(-g);
    let budget = 0.5 * q.tol_abs.max(q.tol_rel * est.value.abs());
    let t1 = grow_cutoff(&tail, t0, budget);
    if t1 > t0 {
        est = est.plus(tau_piece(bd, side, u, v, t0, t1, q)?);
    }
    Ok(est.padded(tail(t1)))
}

// Exterior piece  integral over { x >= c } of data(x) K(u - x) dx,
// without the 1/pi.
fn halfline_from(
    bd: &BoundaryData,
    u: f64,
    v: f64,
    c: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let g = bd.gamma();
    if c >= 0.0 {
        tau_halfline(bd, Side::Pos, u, v, c.powf(1.0 / g), q)
    } else {
        let inner = tau_piece(bd, Side::Neg, u, v, 0.0, (-c).powf(1.0 / g), q)?;
        Ok(inner.plus(tau_halfline(bd, Side::Pos, u, v, 0.0, q)?))
    }
}

// Mirror image: integral over { x <= c }.
fn halfline_to(
    bd: &BoundaryData,
    u: f64,
    v: f64,
    c: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let g = bd.gamma();
    if c <= 0.0 {
        tau_halfline(bd, Side::Neg, u, v, (-c).powf(1.0 / g), q)
    } else {
        let inner = tau_piece(bd, Side::Pos, u, v, 0.0, c.powf(1.0 / g), q)?;
        Ok(inner.plus(tau_halfline(bd, Side::Neg, u, v, 0.0, q)?))
    }
}

fn extend_far(bd: &BoundaryData, u: f64, v: f64, q: &QuadratureSpec) -> Result<Estimate> {
    let pos = tau_halfline(bd, Side::Pos, u, v, 0.0, q)?;
    let neg = tau_halfline(bd, Side::Neg, u, v, 0.0, q)?;
    Ok(pos.plus(neg).scaled(1.0 / std::f64::consts::PI))
}

// Near-boundary split. On the window |x - u| <= W the kernel mass is taken
// exactly against the frozen value data(u); the window remainder integrates
// data(x) - data(u), which kills the peak; outside the window the tau
// parametrization applies as usual.
fn extend_near(bd: &BoundaryData, u: f64, v: f64, q: &QuadratureSpec) -> Result<Estimate> {
    let g = bd.gamma();
    let w_half = 1.0_f64.min(0.5 * (1.0 + u.abs()));
    let gu = bd.value_on_line(u);

    let exact = 2.0 * gu * (w_half / v).atan();

    let (x_lo, x_hi) = (u - w_half, u + w_half);
    let mut breaks = vec![u];
    if x_lo < 0.0 && 0.0 < x_hi {
        breaks.push(0.0);
    }
    for tb in bd.tau_breaks() {
        let xb = tb.powf(g);
        for cand in [xb, -xb] {
            if x_lo < cand && cand < x_hi {
                breaks.push(cand);
            }
        }
    }
    let window = integrate_with_breaks(
        |x| {
            let d = u - x;
            (bd.value_on_line(x) - gu) * v / (v * v + d * d)
        },
        x_lo,
        x_hi,
        &breaks,
        q,
    )?;

    let right = halfline_from(bd, u, v, x_hi, q)?;
    let left = halfline_to(bd, u, v, x_lo, q)?;

    Ok(Estimate::new(exact, 0.0)
        .plus(window)
        .plus(right)
        .plus(left)
        .scaled(1.0 / std::f64::consts::PI))
}

/// Poisson extension of the boundary data at u + iv, v > 0.
///
/// The error field of the returned estimate covers quadrature error and the
/// truncated tails.
pub fn poisson_extend(
    bd: &BoundaryData,
    u: f64,
    v: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    Error::check(u.is_finite(), "u", u, "must be finite")?;
    Error::check(v.is_finite() && v > 0.0, "v", v, "must be finite and positive")?;
    if v < NEAR_BOUNDARY_RATIO * (1.0 + u.abs()) {
        extend_near(bd, u, v, q)
    } else {
        extend_far(bd, u, v, q)
    }
}

/// Extension evaluated at the sector point (r, s), that is at Phi of
/// zeta = s (u* + r + i). The data must carry the same exponent as the
/// sector.
pub fn h_on_sector(
    hy: &Hyperbolicity,
    bd: &BoundaryData,
    r: f64,
    s: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    Error::check(
        (bd.gamma() - hy.gamma).abs() <= 1e-9 * hy.gamma,
        "gamma",
        bd.gamma(),
        "boundary data exponent must match the sector",
    )?;
    let c = hy.coords_from_rs(r, s)?;
    poisson_extend(bd, c.big_u, c.big_v, q)
}

/// Certified pointwise upper bound on the extension, cheap enough to sit in
/// integral tail estimates.
///
/// With d = |u + iv|, the kernel is at most 4 v / d^2 on the window
/// |x| <= d/2 (there v^2 + (u - x)^2 >= d^2 / 4), which contributes the
/// window mass term; outside the window the data is at most its tau envelope
/// at (d/2)^{1/gamma} and the kernel has unit mass. Both factors are built
/// from non-increasing envelopes, so along any ray
/// (u, v) -> (s^gamma u, s^gamma v) the bound is non-increasing in s.
pub fn htilde_bound(bd: &BoundaryData, u: f64, v: f64) -> f64 {
    debug_assert!(v > 0.0);
    let g = bd.gamma();
    let d = u.hypot(v);
    if d == 0.0 {
        return f64::INFINITY;
    }
    let window = 4.0 * v / (std::f64::consts::PI * d * d) * bd.windowed_mass_bound(0.5 * d);
    let cut = (d / (2.0 * std::f64::consts::SQRT_2)).powf(1.0 / g);
    window + bd.tau_envelope(cut)
}

/// Discrepancy between the extension at `center` and its average over n
/// equally spaced points of the circle of the given radius. Small residuals
/// witness harmonicity; the circle must stay inside the upper half plane.
pub fn mean_value_residual(
    bd: &BoundaryData,
    center: Complex64,
    radius: f64,
    n: usize,
    q: &QuadratureSpec,
) -> Result<f64> {
    Error::check(n >= 8, "n", n as f64, "need at least 8 sample points")?;
    Error::check(
        radius.is_finite() && radius > 0.0 && center.im > radius,
        "radius",
        radius,
        "circle must stay inside the upper half plane",
    )?;
    let at_center = poisson_extend(bd, center.re, center.im, q)?;
    let mut acc = 0.0;
    for k in 0..n {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let p = center + Complex64::from_polar(radius, ang);
        acc += poisson_extend(bd, p.re, p.im, q)?.value;
    }
    Ok((acc / n as f64 - at_center.value).abs())
}

/// Kernel mass of the unit-height sector slice against a pole at x':
///
///   I(x') = integral over [r_lo, inf) of
///           V(r) / (V(r)^2 + (U(r) - x')^2) dr,
///
/// with U + iV = Phi(zeta* + r). Diverges logarithmically when r_lo = 0 and
/// x' = -rho (the pole sits at the image of zeta*), which surfaces as a
/// quadrature non-convergence error.
pub fn kernel_integral(
    hy: &Hyperbolicity,
    x_prime: f64,
    r_lo: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    Error::check(x_prime.is_finite(), "x_prime", x_prime, "must be finite")?;
    Error::check(
        r_lo.is_finite() && r_lo >= 0.0,
        "r_lo",
        r_lo,
        "must be finite and non-negative",
    )?;
    let g = hy.gamma;
    // Past r_tail: the argument of Phi is under 1/2, so U >= 0.877 (r/2)^gamma
    // dominates 2|x'|, while V <= 2^{gamma/2} (1.5 r)^gamma; the integrand is
    // then at most c7 r^{-gamma}.
    let r_tail = (2.0 * hy.u_star.abs() + 2.0)
        .max(4.0 * g)
        .max(2.0)
        .max(2.0 * (2.3 * (x_prime.abs() + 1.0)).powf(1.0 / g))
        .max(r_lo + 1.0);
    let c7 = 4.0 * 2.0_f64.powf(0.5 * g) * 1.5_f64.powf(g) * 2.0_f64.powf(2.0 * g) / 0.769;
    let tail = |cut: f64| {
        if cut >= r_tail {
            c7 * cut.powf(1.0 - g) / (g - 1.0)
        } else {
            f64::INFINITY
        }
    };
    let breaks = pole_crossings(hy, x_prime, r_lo, r_tail);
    integrate_to_infinity(
        |r| {
            let w = hy.phi_unit(r);
            let d = w.re - x_prime;
            w.im / (w.im * w.im + d * d)
        },
        r_lo,
        tail,
        &breaks,
        q,
    )
}

// Solutions of U(r) = x' on [lo, hi], located by a sign scan plus bisection.
// These are the sharp kernel ridges; handing them to the quadrature as
// breaks keeps the first pass honest.
fn pole_crossings(hy: &Hyperbolicity, x_prime: f64, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 256;
    let h = |r: f64| hy.phi_unit(r).re - x_prime;
    let mut roots = Vec::new();
    let step = (hi - lo) / SCAN as f64;
    let mut prev_r = lo;
    let mut prev_h = h(lo);
    for k in 1..=SCAN {
        let r = lo + step * k as f64;
        let cur = h(r);
        if prev_h == 0.0 {
            roots.push(prev_r);
        } else if prev_h * cur < 0.0 {
            let (mut a, mut b) = (prev_r, r);
            let mut ha = prev_h;
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let hm = h(m);
                if ha * hm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ha = hm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_r = r;
        prev_h = cur;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::EpsilonProfile;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn power_data(gamma: f64, p: f64, amplitude: f64) -> BoundaryData {
        let prof = EpsilonProfile::power(p, amplitude).unwrap();
        BoundaryData::profile(prof, gamma).unwrap()
    }

    fn assert_pin(est: Estimate, pin: f64) {
        let tol = 5e-8 * pin.abs() + 1e-12;
        assert!(
            (est.value - pin).abs() <= tol + est.error,
            "value {} vs pin {} (err bound {})",
            est.value,
            pin,
            est.error
        );
        assert!(est.error <= 1e-6 * (1.0 + pin.abs()), "error bound too loose: {}", est.error);
    }

    #[test]
    fn matches_reference_values_for_square_exponent() {
        let bd = power_data(2.0, 0.5, 10.0);
        assert_pin(poisson_extend(&bd, 0.0, 1.0, &q()).unwrap(), 1.44307651657);
        assert_pin(poisson_extend(&bd, 4.0, 1.0, &q()).unwrap(), 0.911462314781);
        assert_pin(poisson_extend(&bd, -4.0, 0.5, &q()).unwrap(), 0.91874363954);
        assert_pin(poisson_extend(&bd, 2.0, 3.0, &q()).unwrap(), 0.97547941163);
        assert_pin(poisson_extend(&bd, -25.0, 10.0, &q()).unwrap(), 0.253443465039);
        assert_pin(poisson_extend(&bd, 100.0, 0.3, &q()).unwrap(), 0.0172316570308);
    }

    #[test]
    fn matches_reference_values_for_quartic_exponent() {
        let bd = power_data(4.0, 0.5, 10.0);
        assert_pin(poisson_extend(&bd, 0.0, 1.0, &q()).unwrap(), 0.745470246452);
        assert_pin(poisson_extend(&bd, 16.0, 2.0, &q()).unwrap(), 0.459146317902);
        assert_pin(poisson_extend(&bd, -4.0, 1.0, &q()).unwrap(), 0.610794186764);
        assert_pin(poisson_extend(&bd, -256.0, 32.0, &q()).unwrap(), 0.171994849301);
    }

    #[test]
    fn matches_reference_value_below_quadratic_exponent() {
        let bd = power_data(4.0 / 3.0, 0.5, 10.0);
        assert_pin(poisson_extend(&bd, 0.0, 1.0, &q()).unwrap(), 2.10155236022);
    }

    #[test]
    fn tent_extension_matches_closed_form_at_unit_height() {
        // (1/pi) integral of (1-|x|)_+ / (1+x^2) dx = (pi/2 - ln 2) / pi
        let bd = BoundaryData::tent(2.0).unwrap();
        let h = poisson_extend(&bd, 0.0, 1.0, &q()).unwrap();
        assert_pin(h, 0.2793643998473484066);
    }

    #[test]
    fn constant_data_extends_to_the_same_constant() {
        let bd = BoundaryData::constant(0.75, 3.0).unwrap();
        for (u, v) in [(0.0, 1.0), (3.0, 0.2), (-7.0, 2.5)] {
            let h = poisson_extend(&bd, u, v, &q()).unwrap();
            assert!(
                (h.value - 0.75).abs() <= 1e-7 + h.error,
                "H({u},{v}) = {} should be 0.75",
                h.value
            );
        }
    }

    #[test]
    fn extension_is_even_in_u() {
        let bd = power_data(2.0, 1.0, 3.0);
        for (u, v) in [(1.0, 0.5), (6.0, 2.0), (11.0, 0.01)] {
            let hp = poisson_extend(&bd, u, v, &q()).unwrap().value;
            let hm = poisson_extend(&bd, -u, v, &q()).unwrap().value;
            assert!(
                (hp - hm).abs() <= 1e-11 * hp.abs(),
                "H({u},{v}) = {hp} vs H({},{v}) = {hm}",
                -u
            );
        }
    }

    #[test]
    fn near_and_far_paths_agree_at_the_crossover() {
        let bd = power_data(2.0, 0.5, 10.0);
        for u in [0.0_f64, 0.7, -3.0, 20.0] {
            let v = 5e-5 * (1.0 + u.abs());
            let near = extend_near(&bd, u, v, &q()).unwrap();
            let far = extend_far(&bd, u, v, &q()).unwrap();
            assert!(
                (near.value - far.value).abs()
                    <= 1e-6 * near.value.abs() + near.error + far.error,
                "near {} vs far {} at u = {u}",
                near.value,
                far.value
            );
        }
    }

    #[test]
    fn extension_attains_the_boundary_data() {
        let bd = power_data(2.0, 0.5, 10.0);
        for u in [0.5, -2.0, 9.0] {
            let h = poisson_extend(&bd, u, 1e-10, &q()).unwrap();
            let g = bd.value_on_line(u);
            assert!(
                (h.value - g).abs() <= 1e-6 * (1.0 + g),
                "H({u}, 1e-10) = {} vs data {g}",
                h.value
            );
        }
    }

    #[test]
    fn high_pass_data_drops_the_extension_near_the_origin() {
        let prof = EpsilonProfile::power(0.5, 10.0).unwrap();
        let full = BoundaryData::profile(prof.clone(), 2.0).unwrap();
        let cut = BoundaryData::high_pass(prof, 2.0, 4.0).unwrap();
        // over the dead window the drop is drastic
        let hf = poisson_extend(&full, 0.0, 0.5, &q()).unwrap().value;
        let hc = poisson_extend(&cut, 0.0, 0.5, &q()).unwrap().value;
        assert!(hc < 0.2 * hf, "hc = {hc} vs hf = {hf}");
        // far away only the removed share of the total mass is missing
        let hf = poisson_extend(&full, 400.0, 1.0, &q()).unwrap().value;
        let hc = poisson_extend(&cut, 400.0, 1.0, &q()).unwrap().value;
        assert!(hc < hf && hc > 0.7 * hf, "hc = {hc} vs hf = {hf}");
    }

    #[test]
    fn satisfies_the_mean_value_property() {
        // the circle must stay well inside the analyticity disk of the
        // extension (radius im(center) around the center) for the n-point
        // average to converge: radius 1 against distance 2 gives 2^-n decay
        let bd = power_data(2.0, 0.5, 10.0);
        let h = poisson_extend(&bd, -1.0, 2.0, &q()).unwrap();
        let res =
            mean_value_residual(&bd, Complex64::new(-1.0, 2.0), 1.0, 24, &q()).unwrap();
        assert!(res <= 1e-6 * (1.0 + h.value.abs()), "residual {res}");
    }

    #[test]
    fn mean_value_rejects_circles_touching_the_boundary() {
        let bd = power_data(2.0, 0.5, 10.0);
        assert!(mean_value_residual(&bd, Complex64::new(0.0, 1.0), 1.0, 16, &q()).is_err());
        assert!(mean_value_residual(&bd, Complex64::new(0.0, 2.0), 0.5, 4, &q()).is_err());
    }

    #[test]
    fn rejects_points_outside_the_open_half_plane() {
        let bd = power_data(2.0, 0.5, 10.0);
        assert!(poisson_extend(&bd, 0.0, 0.0, &q()).is_err());
        assert!(poisson_extend(&bd, 0.0, -1.0, &q()).is_err());
        assert!(poisson_extend(&bd, f64::NAN, 1.0, &q()).is_err());
    }

    #[test]
    fn sector_evaluation_requires_matching_exponents() {
        let hy = Hyperbolicity::new(0.0, 1.0).unwrap(); // gamma = 2
        let bd = power_data(4.0, 0.5, 10.0);
        assert!(h_on_sector(&hy, &bd, 1.0, 1.0, &q()).is_err());
    }

    #[test]
    fn sector_evaluation_matches_direct_evaluation_at_the_image_point() {
        let hy = Hyperbolicity::new(0.0, 1.0).unwrap();
        let bd = power_data(2.0, 0.5, 10.0);
        // r = 1, s = 1: zeta = 1 + i, Phi = (1+i)^2 = 2i
        let on_sector = h_on_sector(&hy, &bd, 1.0, 1.0, &q()).unwrap();
        let direct = poisson_extend(&bd, 0.0, 2.0, &q()).unwrap();
        assert!((on_sector.value - direct.value).abs() <= 1e-12 + on_sector.error + direct.error);
    }

    #[test]
    fn pointwise_bound_dominates_the_extension() {
        for (gamma, prof) in [
            (2.0, EpsilonProfile::power(0.5, 10.0).unwrap()),
            (4.0, EpsilonProfile::power(1.0, 10.0).unwrap()),
            (4.0, EpsilonProfile::log_power(1.0, 10.0).unwrap()),
        ] {
            let bd = BoundaryData::profile(prof, gamma).unwrap();
            for u in [-40.0, -2.0, 0.5, 3.0, 17.0, 250.0] {
                for v in [0.05, 1.0, 8.0] {
                    let h = poisson_extend(&bd, u, v, &q()).unwrap();
                    let hb = htilde_bound(&bd, u, v);
                    assert!(
                        h.value <= hb + h.error,
                        "H({u},{v}) = {} exceeds bound {hb} (gamma {gamma})",
                        h.value
                    );
                }
            }
        }
    }

    #[test]
    fn pointwise_bound_is_monotone_along_rays() {
        let bd = power_data(4.0, 0.5, 10.0);
        let gamma = 4.0;
        for (u0, v0) in [(1.0, 0.5), (-3.0, 1.0), (0.0, 1.0), (10.0, 0.1)] {
            let mut prev = f64::INFINITY;
            for k in 0..60 {
                let s = 0.25 * 1.2_f64.powi(k);
                let scale = s.powf(gamma);
                let cur = htilde_bound(&bd, u0 * scale, v0 * scale);
                assert!(
                    cur <= prev * (1.0 + 1e-12),
                    "bound grew along the ray at s = {s}: {cur} > {prev}"
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn kernel_integral_matches_closed_forms() {
        // a = 0, b = 1: Phi(r + i) = (r+i)^2, so U = r^2 - 1, V = 2r and the
        // integral reduces to an arctangent in w = r^2.
        let hy = Hyperbolicity::new(0.0, 1.0).unwrap();
        let cases = [
            (4.0, 0.0, 0.55357435889704525151),
            (2.0, 0.0, 0.675510858856039963),
            (100.0, 0.0, 0.147112767430373459),
            (1e4, 0.0, 0.0156079666010823138),
            (-4.0, 0.0, 0.274653072167027423), // ln(9) / 8
            (1.0, 1.0, 0.553574358897045252),
            (100.0, 1.0, 0.147013777260757624),
            (1e4, 1.0, 0.0156079566020824138),
        ];
        for (xp, r_lo, pin) in cases {
            let est = kernel_integral(&hy, xp, r_lo, &q()).unwrap();
            assert!(
                (est.value - pin).abs() <= 1e-7 * pin + est.error,
                "I({xp}) from {r_lo}: {} vs {pin}",
                est.value
            );
        }
    }

    #[test]
    fn kernel_integral_diverges_logarithmically_at_the_vertex_image() {
        let hy = Hyperbolicity::new(0.0, 1.0).unwrap();
        // At x' = -rho the integrand behaves like 1/r near the vertex: the
        // full integral must surface as a non-convergence error, and the
        // truncated ones grow like (1/4) ln(1/r_lo).
        match kernel_integral(&hy, -1.0, 0.0, &q()) {
            Err(Error::QuadratureNonConvergence { .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
        let i2 = kernel_integral(&hy, -1.0, 0.01, &q()).unwrap();
        let i3 = kernel_integral(&hy, -1.0, 0.001, &q()).unwrap();
        assert!((i2.value - 2.6491649331958946).abs() <= 1e-7 + i2.error);
        assert!((i3.value - 3.8004512922710334).abs() <= 1e-7 + i3.error);
        // truncating at r_lo grows the value like (1/4) ln(1/r_lo^2)
        let rate = i3.value - i2.value;
        assert!(
            (rate - 0.5 * 10.0_f64.ln()).abs() <= 1e-4,
            "log rate off: {rate}"
        );
    }
}
