//! Growth profiles for the boundary data and the boundary data itself.
//!
//! A profile eps maps delta in (0, 1] to a positive modulus, strictly
//! increasing and concave with eps -> 0 at 0+. The boundary data fed to the
//! harmonic extension lives on the real line of the straightened plane and
//! is built from a profile via the tau parametrization x = +-tau^gamma:
//!
//!   data(tau) = gamma^{-1} A e^{-tau} eps'(e^{-tau})
//!
//! with A the amplitude knob. Everything downstream needs three hooks per
//! profile: the weight w(tau) = e^{-tau} eps'(e^{-tau}), a non-increasing
//! envelope dominating w from tau onward, and a certified bound on the
//! remaining integral of w past a cutoff. All three are exact closed forms
//! for the built-in families.

use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, Estimate, QuadratureSpec};
use crate::special::gamma_fn;
use std::path::Path;

/// Strictly increasing concave modulus on (0, 1] with eps(0+) = 0.
#[derive(Clone, Debug)]
pub struct EpsilonProfile {
    kind: ProfileKind,
    amplitude: f64,
}

#[derive(Clone, Debug)]
enum ProfileKind {
    /// eps(delta) = delta^p, p in (0, 1].
    Power { p: f64 },
    /// eps(delta) = (1 - ln delta)^{-alpha} below the concavity cap,
    /// extended linearly (C^1) above it. The cap is located numerically.
    LogPower {
        alpha: f64,
        delta_cap: f64,
        cap_value: f64,
        cap_slope: f64,
    },
    /// Concave majorant of a finite sample table.
    Majorant(Majorant),
}

impl EpsilonProfile {
    /// Pure power law delta^p.
    pub fn power(p: f64, amplitude: f64) -> Result<Self> {
        Error::check(
            p.is_finite() && p > 0.0 && p <= 1.0,
            "p",
            p,
            "must lie in (0, 1]",
        )?;
        check_amplitude(amplitude)?;
        Ok(EpsilonProfile { kind: ProfileKind::Power { p }, amplitude })
    }

    /// Logarithmic power law (1 - ln delta)^{-alpha}.
    ///
    /// The raw formula is concave only below some cap delta_cap; the cap is
    /// found by bisecting on the local concavity of the derivative, and the
    /// profile continues above it as the tangent line at the cap, keeping
    /// the whole profile C^1, concave, and strictly increasing.
    pub fn log_power(alpha: f64, amplitude: f64) -> Result<Self> {
        Error::check(
            alpha.is_finite() && alpha > 0.0 && alpha <= 20.0,
            "alpha",
            alpha,
            "must lie in (0, 20]",
        )?;
        check_amplitude(amplitude)?;
        let raw_deriv = |d: f64| -> f64 {
            let l = 1.0 - d.ln();
            alpha * l.powf(-alpha - 1.0) / d
        };
        // Concave where the derivative is locally decreasing. True near 0,
        // false at 1; bisect the switch point.
        let concave_at = |d: f64| -> bool {
            let h = 1e-5 * d;
            raw_deriv(d + h) <= raw_deriv(d - h)
        };
        let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
        debug_assert!(concave_at(lo) && !concave_at(hi));
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if concave_at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let delta_cap = 0.5 * (lo + hi);
        let cap_value = (1.0 - delta_cap.ln()).powf(-alpha);
        let cap_slope = raw_deriv(delta_cap);
        Ok(EpsilonProfile {
            kind: ProfileKind::LogPower { alpha, delta_cap, cap_value, cap_slope },
            amplitude,
        })
    }

    /// Concave majorant of sampled (delta, eps) pairs.
    ///
    /// The result dominates every sample, is strictly increasing and concave
    /// on (0, 1], has a continuous derivative, and vanishes at 0+. Kinks of
    /// the underlying piecewise-linear hull are rounded quadratically over
    /// windows small enough not to overlap, and the whole curve is then
    /// lifted multiplicatively to restore domination lost to the rounding.
    pub fn concave_majorant(samples: &[(f64, f64)], amplitude: f64) -> Result<Self> {
        check_amplitude(amplitude)?;
        let m = Majorant::build(samples)?;
        Ok(EpsilonProfile { kind: ProfileKind::Majorant(m), amplitude })
    }

    /// Load a two-column CSV (header `delta,eps`) and majorize it.
    pub fn from_csv_path(path: &Path, amplitude: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::TableLoad(e.to_string()))?;
        let mut samples = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::TableLoad(e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::TableLoad(format!(
                    "row {} has {} fields, need 2",
                    samples.len() + 2,
                    rec.len()
                )));
            }
            let d: f64 = rec[0]
                .parse()
                .map_err(|_| Error::TableLoad(format!("bad delta field {:?}", &rec[0])))?;
            let e: f64 = rec[1]
                .parse()
                .map_err(|_| Error::TableLoad(format!("bad eps field {:?}", &rec[1])))?;
            samples.push((d, e));
        }
        Self::concave_majorant(&samples, amplitude)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// eps(delta) on (0, 1]. The amplitude is not applied here; it scales
    /// the boundary data, not the modulus.
    pub fn eval(&self, delta: f64) -> f64 {
        assert!(
            delta > 0.0 && delta <= 1.0,
            "profile evaluated outside (0, 1]: {delta}"
        );
        match &self.kind {
            ProfileKind::Power { p } => delta.powf(*p),
            ProfileKind::LogPower { alpha, delta_cap, cap_value, cap_slope } => {
                if delta <= *delta_cap {
                    (1.0 - delta.ln()).powf(-alpha)
                } else {
                    cap_value + cap_slope * (delta - delta_cap)
                }
            }
            ProfileKind::Majorant(m) => m.eval(delta),
        }
    }

    /// d eps / d delta on (0, 1].
    pub fn deriv(&self, delta: f64) -> f64 {
        assert!(
            delta > 0.0 && delta <= 1.0,
            "profile derivative outside (0, 1]: {delta}"
        );
        match &self.kind {
            ProfileKind::Power { p } => p * delta.powf(p - 1.0),
            ProfileKind::LogPower { alpha, delta_cap, cap_slope, .. } => {
                if delta <= *delta_cap {
                    let l = 1.0 - delta.ln();
                    alpha * l.powf(-alpha - 1.0) / delta
                } else {
                    *cap_slope
                }
            }
            ProfileKind::Majorant(m) => m.deriv(delta),
        }
    }

    /// w(tau) = e^{-tau} eps'(e^{-tau}) for tau >= 0.
    pub fn tau_weight(&self, tau: f64) -> f64 {
        assert!(tau >= 0.0, "tau must be non-negative: {tau}");
        match &self.kind {
            ProfileKind::Power { p } => p * (-p * tau).exp(),
            ProfileKind::LogPower { alpha, cap_slope, .. } => {
                let tau_cap = self.log_power_tau_cap();
                if tau >= tau_cap {
                    alpha * (1.0 + tau).powf(-1.0 - alpha)
                } else {
                    cap_slope * (-tau).exp()
                }
            }
            ProfileKind::Majorant(_) => {
                let d = (-tau).exp();
                d * self.deriv(d)
            }
        }
    }

    /// Non-increasing envelope dominating `tau_weight` on [tau, infinity).
    pub fn tau_weight_envelope(&self, tau: f64) -> f64 {
        match &self.kind {
            // Both built-in weights are already non-increasing.
            ProfileKind::Power { .. } | ProfileKind::LogPower { .. } => self.tau_weight(tau),
            // eps' <= steepest hull slope, so w <= m_max e^{-tau}.
            ProfileKind::Majorant(m) => m.max_slope() * (-tau).exp(),
        }
    }

    /// Certified upper bound on the integral of `tau_weight` over
    /// [cutoff, infinity).
    pub fn tau_weight_tail(&self, cutoff: f64) -> f64 {
        assert!(cutoff >= 0.0, "cutoff must be non-negative: {cutoff}");
        match &self.kind {
            ProfileKind::Power { p } => (-p * cutoff).exp(),
            ProfileKind::LogPower { alpha, cap_slope, .. } => {
                let tau_cap = self.log_power_tau_cap();
                if cutoff >= tau_cap {
                    (1.0 + cutoff).powf(-alpha)
                } else {
                    // exact split: exponential piece up to the cap, then the
                    // power tail.
                    cap_slope * ((-cutoff).exp() - (-tau_cap).exp())
                        + (1.0 + tau_cap).powf(-alpha)
                }
            }
            ProfileKind::Majorant(m) => m.max_slope() * (-cutoff).exp(),
        }
    }

    /// tau values where the weight has a kink; quadrature break hints.
    pub fn tau_weight_breaks(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Power { .. } => Vec::new(),
            ProfileKind::LogPower { .. } => vec![self.log_power_tau_cap()],
            ProfileKind::Majorant(m) => m.tau_breaks(),
        }
    }

    fn log_power_tau_cap(&self) -> f64 {
        match &self.kind {
            ProfileKind::LogPower { delta_cap, .. } => -delta_cap.ln(),
            _ => unreachable!("tau cap only exists for the log-power family"),
        }
    }

    // Upper bound on the partial moment
    //   integral of tau^{gamma-1} w_env(tau) over [0, X],
    // amplitude not applied. Closed form per family; `gamma_fn` caps the
    // exponential branches.
    pub(crate) fn partial_weight_moment(&self, gamma: f64, x_cut: f64) -> f64 {
        debug_assert!(x_cut >= 0.0);
        match &self.kind {
            ProfileKind::Power { p } => {
                let full = gamma_fn(gamma) * p.powf(1.0 - gamma);
                full.min(p * x_cut.powf(gamma) / gamma)
            }
            ProfileKind::LogPower { alpha, cap_slope, .. } => {
                let head = cap_slope * gamma_fn(gamma).min(x_cut.powf(gamma) / gamma);
                let c = gamma - 1.0 - alpha;
                let psi = if c > 1e-12 {
                    ((1.0 + x_cut).powf(c) - 1.0) / c
                } else if c >= -1e-12 {
                    (1.0 + x_cut).ln()
                } else {
                    (1.0 / -c).min(x_cut)
                };
                head + alpha * psi
            }
            ProfileKind::Majorant(m) => {
                m.max_slope() * gamma_fn(gamma).min(x_cut.powf(gamma) / gamma)
            }
        }
    }

    // The same moment over [0, infinity); infinite when the envelope tail is
    // too slow (log-power with alpha <= gamma - 1).
    pub(crate) fn full_weight_moment(&self, gamma: f64) -> f64 {
        match &self.kind {
            ProfileKind::Power { p } => gamma_fn(gamma) * p.powf(1.0 - gamma),
            ProfileKind::LogPower { alpha, cap_slope, .. } => {
                if *alpha > gamma - 1.0 {
                    cap_slope * gamma_fn(gamma) + alpha / (alpha + 1.0 - gamma)
                } else {
                    f64::INFINITY
                }
            }
            ProfileKind::Majorant(m) => m.max_slope() * gamma_fn(gamma),
        }
    }

    // Upper bound on  integral over [y, inf) of z^{-q} * partial_weight_moment(gamma, z) dz.
    // Finite whenever q > gamma - alpha_envelope, which holds for the uses
    // here (q = gamma or gamma + 1).
    pub(crate) fn weight_moment_tail(&self, gamma: f64, y: f64, q: f64) -> f64 {
        debug_assert!(y > 0.0 && q > 1.0);
        let full = self.full_weight_moment(gamma);
        if full.is_finite() {
            return full * y.powf(1.0 - q) / (q - 1.0);
        }
        if y < 1.0 {
            // split at 1; the partial moment is monotone in its cut
            let head = self.partial_weight_moment(gamma, 1.0) * (y.powf(1.0 - q) - 1.0) / (q - 1.0);
            return head + self.weight_moment_tail(gamma, 1.0, q);
        }
        // log-power with c = gamma - 1 - alpha >= 0
        let ProfileKind::LogPower { alpha, cap_slope, .. } = &self.kind else {
            unreachable!("only the log-power family has an infinite moment")
        };
        let c = gamma - 1.0 - alpha;
        let head = cap_slope * gamma_fn(gamma) * y.powf(1.0 - q) / (q - 1.0);
        let tail = if c > 1e-12 {
            debug_assert!(q - 1.0 - c > 0.0);
            // (1+z)^c <= (2z)^c for z >= 1
            2.0_f64.powf(c) / c * y.powf(c + 1.0 - q) / (q - 1.0 - c)
        } else {
            // ln(1+z) <= ln 2 + ln z
            let base = y.powf(1.0 - q);
            base * (2.0 * y).ln() / (q - 1.0) + base / ((q - 1.0) * (q - 1.0))
        };
        head + alpha * tail
    }
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    Error::check(
        amplitude.is_finite() && amplitude > 0.0,
        "amplitude",
        amplitude,
        "must be finite and positive",
    )
}

// Piecewise description of the majorant: hull vertices (xs, ys) with
// xs[0] = 0, ys[0] = 0, xs.last() = 1; slopes[i] on [xs[i], xs[i+1]],
// positive and non-increasing; half[k] > 0 marks a quadratic rounding
// window [xs[k] - half[k], xs[k] + half[k]] at an interior kink; `lift`
// is the multiplicative correction restoring sample domination.
#[derive(Clone, Debug)]
struct Majorant {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    half: Vec<f64>,
    lift: f64,
}

impl Majorant {
    fn build(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::BadProfileTable("no samples".into()));
        }
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(samples.len() + 2);
        for &(x, y) in samples {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::BadProfileTable(format!("non-finite sample ({x}, {y})")));
            }
            if x <= 0.0 || x > 1.0 {
                return Err(Error::BadProfileTable(format!("abscissa {x} outside (0, 1]")));
            }
            if y < 0.0 {
                return Err(Error::BadProfileTable(format!("negative value {y} at {x}")));
            }
            pts.push((x, y));
        }
        if pts.iter().all(|p| p.1 == 0.0) {
            return Err(Error::BadProfileTable("all sample values are zero".into()));
        }
        pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        // equal abscissae: keep the largest value (list is sorted, last wins)
        pts.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 = prev.1.max(next.1);
                true
            } else {
                false
            }
        });
        pts.insert(0, (0.0, 0.0));

        // Upper concave hull, left to right: pop while the middle point is
        // on or below the chord.
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for &p in &pts {
            while hull.len() >= 2 {
                let p1 = hull[hull.len() - 2];
                let p2 = hull[hull.len() - 1];
                let cross = (p2.0 - p1.0) * (p.1 - p1.1) - (p2.1 - p1.1) * (p.0 - p1.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }

        let ymax = hull.iter().fold(0.0_f64, |m, p| m.max(p.1));
        let slope_min = 1e-9 * ymax;

        let mut xs: Vec<f64> = hull.iter().map(|p| p.0).collect();
        let mut slopes: Vec<f64> = hull
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).max(slope_min))
            .collect();
        // extend the last slope out to delta = 1 so the domain is covered
        if *xs.last().unwrap() < 1.0 {
            xs.push(1.0);
            slopes.push(*slopes.last().unwrap());
        }
        // flooring can only raise values, so domination survives this pass
        let mut ys = vec![0.0_f64; xs.len()];
        for i in 0..slopes.len() {
            ys[i + 1] = ys[i] + slopes[i] * (xs[i + 1] - xs[i]);
        }

        // quadratic rounding half-widths at interior kinks; windows cover at
        // most a quarter of each adjacent segment, so they never overlap
        let n = xs.len();
        let mut half = vec![0.0_f64; n];
        for k in 1..n - 1 {
            if slopes[k - 1] - slopes[k] > 1e-12 * (1.0 + slopes[k - 1]) {
                half[k] = 0.25 * (xs[k] - xs[k - 1]).min(xs[k + 1] - xs[k]);
            }
        }

        let mut m = Majorant { xs, ys, slopes, half, lift: 1.0 };
        // rounding dips below the hull at each kink; a multiplicative lift
        // (concavity- and monotonicity-preserving) restores domination
        let mut lift = 1.0_f64;
        for &(x, y) in &pts[1..] {
            let v = m.eval(x);
            if v < y {
                lift = lift.max(y / v);
            }
        }
        m.lift = lift;
        Ok(m)
    }

    fn max_slope(&self) -> f64 {
        self.slopes[0] * self.lift
    }

    // segment index i with xs[i] <= x <= xs[i+1]
    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&v| v < x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        // rounding window of the right kink, then of the left kink
        for k in [i + 1, i] {
            if k > 0 && k < self.xs.len() - 1 && self.half[k] > 0.0 {
                let h = self.half[k];
                if (x - self.xs[k]).abs() <= h {
                    let ml = self.slopes[k - 1];
                    let mr = self.slopes[k];
                    let xl = self.xs[k] - h;
                    let yl = self.ys[k] - ml * h;
                    let d = x - xl;
                    return self.lift * (yl + ml * d + (mr - ml) / (4.0 * h) * d * d);
                }
            }
        }
        self.lift * (self.ys[i] + self.slopes[i] * (x - self.xs[i]))
    }

    fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        for k in [i + 1, i] {
            if k > 0 && k < self.xs.len() - 1 && self.half[k] > 0.0 {
                let h = self.half[k];
                if (x - self.xs[k]).abs() <= h {
                    let ml = self.slopes[k - 1];
                    let mr = self.slopes[k];
                    let d = x - (self.xs[k] - h);
                    return self.lift * (ml + (mr - ml) * d / (2.0 * h));
                }
            }
        }
        self.lift * self.slopes[i]
    }

    fn tau_breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..self.xs.len() - 1 {
            for edge in [self.xs[k] - self.half[k], self.xs[k] + self.half[k]] {
                if edge > 0.0 && edge < 1.0 {
                    out.push(-edge.ln());
                }
            }
        }
        out
    }
}

/// Boundary data on the real line of the straightened plane.
///
/// Values are even in x. Profile-backed data uses data(tau) at x = +-tau^gamma;
/// the analytic fixtures (constant, tent) exist to cross-check the extension
/// machinery against closed forms, and the high-pass wrapper zeroes the data
/// near the origin for split-off comparisons.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    gamma: f64,
    kind: BoundaryKind,
}

#[derive(Clone, Debug)]
enum BoundaryKind {
    Profile(EpsilonProfile),
    Constant(f64),
    Tent,
    HighPass { profile: EpsilonProfile, min_abs: f64 },
}

impl BoundaryData {
    pub fn profile(profile: EpsilonProfile, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(BoundaryData { gamma, kind: BoundaryKind::Profile(profile) })
    }

    pub fn constant(c: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Error::check(c.is_finite() && c >= 0.0, "c", c, "must be finite and non-negative")?;
        Ok(BoundaryData { gamma, kind: BoundaryKind::Constant(c) })
    }

    pub fn tent(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(BoundaryData { gamma, kind: BoundaryKind::Tent })
    }

    pub fn high_pass(profile: EpsilonProfile, gamma: f64, min_abs: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Error::check(
            min_abs.is_finite() && min_abs > 0.0,
            "min_abs",
            min_abs,
            "must be finite and positive",
        )?;
        Ok(BoundaryData { gamma, kind: BoundaryKind::HighPass { profile, min_abs } })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The underlying profile, when there is one.
    pub fn profile_ref(&self) -> Option<&EpsilonProfile> {
        match &self.kind {
            BoundaryKind::Profile(p) | BoundaryKind::HighPass { profile: p, .. } => Some(p),
            _ => None,
        }
    }

    /// Boundary value at a point x of the real line.
    pub fn value_on_line(&self, x: f64) -> f64 {
        match &self.kind {
            BoundaryKind::Profile(p) => {
                let tau = x.abs().powf(1.0 / self.gamma);
                p.amplitude() / self.gamma * p.tau_weight(tau)
            }
            BoundaryKind::Constant(c) => *c,
            BoundaryKind::Tent => (1.0 - x.abs()).max(0.0),
            BoundaryKind::HighPass { profile, min_abs } => {
                if x.abs() >= *min_abs {
                    let tau = x.abs().powf(1.0 / self.gamma);
                    profile.amplitude() / self.gamma * profile.tau_weight(tau)
                } else {
                    0.0
                }
            }
        }
    }

    /// Boundary value at x = +-tau^gamma, computed directly in tau.
    pub fn tau_data(&self, tau: f64) -> f64 {
        match &self.kind {
            BoundaryKind::Profile(p) => p.amplitude() / self.gamma * p.tau_weight(tau),
            _ => self.value_on_line(tau.powf(self.gamma)),
        }
    }

    /// Non-increasing envelope of `tau_data` on [tau, infinity).
    pub fn tau_envelope(&self, tau: f64) -> f64 {
        match &self.kind {
            BoundaryKind::Profile(p) => p.amplitude() / self.gamma * p.tau_weight_envelope(tau),
            BoundaryKind::Constant(c) => *c,
            BoundaryKind::Tent => (1.0 - tau.powf(self.gamma)).max(0.0),
            BoundaryKind::HighPass { profile, .. } => {
                profile.amplitude() / self.gamma * profile.tau_weight_envelope(tau)
            }
        }
    }

    /// Upper bound on  integral of tau_envelope over [cut, infinity).
    /// Infinite for constant data.
    pub fn tau_envelope_tail(&self, cut: f64) -> f64 {
        match &self.kind {
            BoundaryKind::Profile(p) | BoundaryKind::HighPass { profile: p, .. } => {
                p.amplitude() / self.gamma * p.tau_weight_tail(cut)
            }
            BoundaryKind::Constant(c) => {
                if *c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            BoundaryKind::Tent => {
                if cut >= 1.0 {
                    0.0
                } else {
                    let g = self.gamma;
                    (1.0 - cut) - (1.0 - cut.powf(g + 1.0)) / (g + 1.0)
                }
            }
        }
    }

    /// Kink positions of `tau_data`, as quadrature break hints.
    pub fn tau_breaks(&self) -> Vec<f64> {
        match &self.kind {
            BoundaryKind::Profile(p) => p.tau_weight_breaks(),
            BoundaryKind::Constant(_) => Vec::new(),
            BoundaryKind::Tent => vec![1.0],
            BoundaryKind::HighPass { profile, min_abs } => {
                let mut v = profile.tau_weight_breaks();
                v.push(min_abs.powf(1.0 / self.gamma));
                v
            }
        }
    }

    /// Upper bound on the weighted line moment
    /// integral of data(x) |x|^{-1 + 1/gamma} dx over the whole line,
    /// when finite. Closed form for profile data: 2 A eps(1).
    pub fn weighted_moment_bound(&self) -> Option<f64> {
        match &self.kind {
            BoundaryKind::Profile(p) => Some(2.0 * p.amplitude() * p.eval(1.0)),
            BoundaryKind::Constant(_) => None,
            BoundaryKind::Tent => {
                let g = self.gamma;
                Some(2.0 * g * g / (g + 1.0))
            }
            BoundaryKind::HighPass { profile, .. } => {
                Some(2.0 * profile.amplitude() * profile.eval(1.0))
            }
        }
    }

    /// Upper bound on the window mass  integral of data(x) over |x| <= x_abs.
    ///
    /// Built from the non-increasing tau envelope of the data, which makes
    /// x -> bound(x)/x non-increasing; the pointwise extension bound leans on
    /// that to stay monotone along rays.
    pub fn windowed_mass_bound(&self, x_abs: f64) -> f64 {
        debug_assert!(x_abs >= 0.0);
        let tau_cut = x_abs.powf(1.0 / self.gamma);
        match &self.kind {
            BoundaryKind::Profile(p) | BoundaryKind::HighPass { profile: p, .. } => {
                // x = tau^gamma turns the window mass into
                //   2 (A/gamma) integral of gamma tau^{gamma-1} w(tau), tau in [0, cut].
                2.0 * p.amplitude() * p.partial_weight_moment(self.gamma, tau_cut)
            }
            BoundaryKind::Constant(c) => 2.0 * c * x_abs,
            BoundaryKind::Tent => {
                if x_abs >= 1.0 {
                    1.0
                } else {
                    2.0 * x_abs - x_abs * x_abs
                }
            }
        }
    }

    /// Upper bound on  integral over [y, inf) of
    /// zeta^{-q} windowed_mass_bound(zeta^gamma) d zeta,  for y >= 1.
    ///
    /// This is the tail weight the mass certificates integrate against.
    /// Infinite for constant data, whose window mass grows like zeta^gamma.
    pub fn window_tail_integral(&self, y: f64, q_pow: f64) -> f64 {
        debug_assert!(y > 0.0 && q_pow > 1.0);
        match &self.kind {
            BoundaryKind::Profile(p) | BoundaryKind::HighPass { profile: p, .. } => {
                2.0 * p.amplitude() * p.weight_moment_tail(self.gamma, y, q_pow)
            }
            BoundaryKind::Constant(_) => f64::INFINITY,
            BoundaryKind::Tent => y.powf(1.0 - q_pow) / (q_pow - 1.0),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    Error::check(
        gamma.is_finite() && gamma > 1.0,
        "gamma",
        gamma,
        "must be finite and exceed 1",
    )
}

/// Certified identity tying the weighted tail moment of the boundary data to
/// the profile itself: for data built from a profile eps with amplitude A,
///
///   integral over { x >= t^gamma } of data(x) x^{-1 + 1/gamma} dx
///     = A eps(e^{-t})
///
/// (plus the mirror image on the negative axis for the |x| version).
/// Returns the quadrature estimate of the left side and the closed-form
/// right side. Errors for data without a profile: the constant fixture makes
/// the left side diverge.
pub fn tail_moment_identity(
    bd: &BoundaryData,
    t: f64,
    q: &QuadratureSpec,
) -> Result<(Estimate, f64)> {
    Error::check(t.is_finite() && t >= 0.0, "t", t, "must be finite and non-negative")?;
    let p = match &bd.kind {
        BoundaryKind::Profile(p) => p,
        _ => return Err(Error::ProfileRequired { op: "tail_moment_identity" }),
    };
    // In tau the left side is exactly  A integral of w(tau) over [t, inf).
    let amp = p.amplitude();
    let breaks = p.tau_weight_breaks();
    let lhs = integrate_to_infinity(
        |tau| amp * p.tau_weight(tau),
        t,
        |cut| amp * p.tau_weight_tail(cut),
        &breaks,
        q,
    )?;
    let rhs = amp * p.eval((-t).exp());
    Ok((lhs, rhs))
}
