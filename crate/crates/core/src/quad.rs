//! Adaptive one-dimensional quadrature with explicit error accounting.
//!
//! The workhorse is a Gauss-Kronrod 7/15 rule driven by worst-first interval
//! bisection. Every result is an [`Estimate`] carrying a certified error
//! bound; non-convergence is a structured error, never a silent NaN. Tail
//! truncation of semi-infinite integrals is always paid for by an explicit
//! caller-supplied envelope bound that is added to the reported error.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances and budgets for one quadrature call.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Relative tolerance on the accumulated value.
    pub tol_rel: f64,
    /// Absolute tolerance floor.
    pub tol_abs: f64,
    /// Cap on interval bisections before giving up.
    pub max_subdivisions: u32,
    /// Initial truncation horizon for integrals over a decaying tail,
    /// in units of the integration variable past the lower limit. The
    /// horizon is extended automatically until the certified tail bound
    /// fits the error budget, so this only sets where extension starts.
    pub tail_cutoff_t: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tol_rel: 1e-8,
            tol_abs: 1e-12,
            max_subdivisions: 2000,
            tail_cutoff_t: 60.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        Error::check(
            self.tol_rel.is_finite() && self.tol_rel >= 1e-15,
            "tol_rel",
            self.tol_rel,
            "must be finite and at least 1e-15",
        )?;
        Error::check(
            self.tol_abs.is_finite() && self.tol_abs > 0.0,
            "tol_abs",
            self.tol_abs,
            "must be finite and positive",
        )?;
        Error::check(
            self.max_subdivisions >= 1,
            "max_subdivisions",
            self.max_subdivisions as f64,
            "must be at least 1",
        )?;
        Error::check(
            self.tail_cutoff_t.is_finite() && self.tail_cutoff_t > 0.0,
            "tail_cutoff_t",
            self.tail_cutoff_t,
            "must be finite and positive",
        )
    }

    /// Same budgets with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            tol_rel: (self.tol_rel * factor).max(1e-15),
            tol_abs: (self.tol_abs * factor).max(f64::MIN_POSITIVE),
            ..*self
        }
    }
}

/// A value together with a certified absolute error bound.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    /// Sum of two estimates; error bounds add.
    pub fn plus(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }

    /// Scale by a constant; the error bound scales by its magnitude.
    pub fn scaled(self, c: f64) -> Estimate {
        Estimate {
            value: c * self.value,
            error: c.abs() * self.error,
        }
    }

    /// Widen the error bound by `extra` without moving the value.
    pub fn padded(self, extra: f64) -> Estimate {
        Estimate {
            value: self.value,
            error: self.error + extra,
        }
    }
}

// 7-point Gauss / 15-point Kronrod node and weight table, nodes in
// descending order of magnitude on [-1, 1]. Gauss nodes sit at the odd
// indices of `XGK`.
pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_21,
    0.949_107_912_342_758_524_53,
    0.864_864_423_359_769_072_79,
    0.741_531_185_599_394_439_86,
    0.586_087_235_467_691_130_29,
    0.405_845_151_377_397_166_91,
    0.207_784_955_007_898_467_6,
    0.0,
];
pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_964,
    0.063_092_092_629_978_553_291,
    0.104_790_010_322_250_183_84,
    0.140_653_259_715_525_918_75,
    0.169_004_726_639_267_902_83,
    0.190_350_578_064_785_409_91,
    0.204_432_940_075_298_892_41,
    0.209_482_141_084_727_828_01,
];
pub(crate) const WG: [f64; 4] = [
    0.129_484_966_168_869_693_27,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_95,
    0.417_959_183_673_469_387_76,
];

/// One Gauss-Kronrod 7/15 application on [lo, hi].
///
/// Returns (value, error bound, integral of |f|). Errors if the integrand
/// returns a non-finite value.
fn gk15(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64, f64)> {
    let center = 0.5 * (lo + hi);
    let hl = 0.5 * (hi - lo);

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: center });
    }

    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();

    for j in 0..7 {
        let x = hl * XGK[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        if !v1.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: center - x });
        }
        if !v2.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: center + x });
        }
        fv1[j] = v1;
        fv2[j] = v2;
        let sum = v1 + v2;
        resk += WGK[j] * sum;
        resabs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * hl;
    let resabs = resabs * hl.abs();
    let resasc = resasc * hl.abs();
    let mut err = ((resk - resg) * hl).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let epmach = f64::EPSILON;
    if resabs > f64::MIN_POSITIVE / (50.0 * epmach) {
        err = err.max(50.0 * epmach * resabs);
    }
    Ok((value, err, resabs))
}

// Work item for the worst-first refinement queue. Ordering: larger error
// first; ties broken by insertion sequence so the schedule is deterministic.
struct Seg {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Adaptive integral of `f` over [lo, hi].
pub fn integrate(f: impl FnMut(f64) -> f64, lo: f64, hi: f64, q: &QuadratureSpec) -> Result<Estimate> {
    integrate_with_breaks(f, lo, hi, &[], q)
}

/// Adaptive integral with forced initial subdivision points.
///
/// Breaks outside (lo, hi) are ignored. Use breaks at known kinks or sharp
/// peaks of the integrand so the first pass already resolves them.
pub fn integrate_with_breaks(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    q: &QuadratureSpec,
) -> Result<Estimate> {
    q.validate()?;
    Error::check(lo.is_finite(), "lo", lo, "must be finite")?;
    Error::check(hi.is_finite(), "hi", hi, "must be finite")?;
    if lo == hi {
        return Ok(Estimate::new(0.0, 0.0));
    }
    Error::check(lo < hi, "hi", hi, "must exceed the lower limit")?;

    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.insert(0, lo);
    cuts.push(hi);

    let mut heap: BinaryHeap<Seg> = BinaryHeap::new();
    // Segments too narrow to bisect are parked here and keep their error.
    let mut frozen: Vec<Seg> = Vec::new();
    let mut seq = 0_u64;
    let mut total_value = 0.0;
    let mut total_error = 0.0;

    let push = |heap: &mut BinaryHeap<Seg>,
                f: &mut dyn FnMut(f64) -> f64,
                a: f64,
                b: f64,
                seq: &mut u64|
     -> Result<(f64, f64)> {
        let (value, error, _) = gk15(f, a, b)?;
        heap.push(Seg { lo: a, hi: b, value, error, seq: *seq });
        *seq += 1;
        Ok((value, error))
    };

    for w in cuts.windows(2) {
        let (v, e) = push(&mut heap, &mut f, w[0], w[1], &mut seq)?;
        total_value += v;
        total_error += e;
    }

    let mut subdivisions = 0_u32;
    loop {
        let tol = q.tol_abs.max(q.tol_rel * total_value.abs());
        if total_error <= tol {
            break;
        }
        if subdivisions >= q.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                partial: total_value,
                error_bound: total_error,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else {
            // Every segment is frozen at machine width and the error still
            // exceeds the tolerance: the integrand is not resolvable.
            return Err(Error::QuadratureNonConvergence {
                partial: total_value,
                error_bound: total_error,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            frozen.push(worst);
            continue;
        }
        total_value -= worst.value;
        total_error -= worst.error;
        let (v1, e1) = push(&mut heap, &mut f, worst.lo, mid, &mut seq)?;
        let (v2, e2) = push(&mut heap, &mut f, mid, worst.hi, &mut seq)?;
        total_value += v1 + v2;
        total_error += e1 + e2;
        subdivisions += 1;
    }

    // Deterministic final accumulation: sum in left-to-right interval order
    // regardless of the refinement history.
    let mut segs: Vec<Seg> = heap.into_vec();
    segs.extend(frozen);
    segs.sort_by(|p, r| p.lo.total_cmp(&r.lo));
    let mut value = 0.0;
    let mut error = 0.0;
    for s in &segs {
        value += s.value;
        error += s.error;
    }
    Ok(Estimate { value, error })
}

/// Integral of `f` over [lo, infinity) for an integrand with a certified
/// decaying tail.
///
/// `tail_bound(t)` must bound the magnitude of the remaining integral past
/// `t` for every `t >= lo`. The range is extended in doubling blocks until
/// the tail bound fits inside the error budget; the final bound is added to
/// the reported error, so the estimate stays honest even when extension
/// stops at the iteration cap.
pub fn integrate_to_infinity(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    tail_bound: impl Fn(f64) -> f64,
    breaks: &[f64],
    q: &QuadratureSpec,
) -> Result<Estimate> {
    q.validate()?;
    Error::check(lo.is_finite(), "lo", lo, "must be finite")?;

    let mut cut = lo + q.tail_cutoff_t;
    let mut acc = integrate_with_breaks(&mut f, lo, cut, breaks, q)?;
    for _ in 0..60 {
        let tail = tail_bound(cut);
        let tol = q.tol_abs.max(q.tol_rel * acc.value.abs());
        if tail <= 0.5 * tol {
            return Ok(acc.padded(tail));
        }
        let next = 2.0 * cut.max(1.0);
        let block = integrate_with_breaks(&mut f, cut, next, &[], q)?;
        acc = acc.plus(block);
        cut = next;
    }
    Ok(acc.padded(tail_bound(cut)))
}

/// Smallest cutoff of the form `start * 2^k` (k <= 60) whose tail bound is
/// at most `budget`. Falls back to the largest candidate if none qualifies.
pub fn grow_cutoff(tail_bound: impl Fn(f64) -> f64, start: f64, budget: f64) -> f64 {
    let mut t = start.max(f64::MIN_POSITIVE);
    for _ in 0..60 {
        if tail_bound(t) <= budget {
            return t;
        }
        t *= 2.0;
    }
    t
}
