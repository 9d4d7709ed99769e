//! Small special-function helpers.

// Lanczos approximation, g = 7, 9 terms. Accurate to ~1e-13 relative for
// positive arguments, which is all the certificates here need.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for x > 0.5 (the only range used here).
pub(crate) fn gamma_fn(x: f64) -> f64 {
    debug_assert!(x > 0.5, "gamma_fn needs x > 0.5, got {x}");
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_matches_reference_values() {
        assert_relative_eq!(gamma_fn(1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(2.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(4.0), 6.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(0.75), 1.225_416_702_465_177_6, max_relative = 1e-12);
        // Gamma(4/3)
        assert_relative_eq!(
            gamma_fn(4.0 / 3.0),
            0.892_979_511_569_249_2,
            max_relative = 1e-12
        );
        // Gamma(1/2 + 10) via the recurrence from sqrt(pi)
        let mut expect = std::f64::consts::PI.sqrt();
        for k in 0..10 {
            expect *= 0.5 + k as f64;
        }
        assert_relative_eq!(gamma_fn(10.5), expect, max_relative = 1e-12);
    }
}
