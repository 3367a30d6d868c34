//! Digamma and Hurwitz zeta for real arguments, used to sum the tails of
//! the generating-function product in closed form.

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// ψ(x) for x > 0.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate().take(8) {
        let n = 2.0 * (j as f64 + 1.0);
        series += b / n * pow;
        pow *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

/// Σ_{n≥0} (scale / (n + x))^s for integer s ≥ 2 and x > 0.
///
/// With `scale = 1` this is the Hurwitz zeta function ζ(s, x). The scale
/// lets callers keep terms near unity when both x and s are large, where
/// x^{-s} alone would underflow.
pub fn hurwitz_zeta_scaled(s: u32, x: f64, scale: f64) -> f64 {
    debug_assert!(s >= 2 && x > 0.0 && scale > 0.0);
    let sf = s as f64;
    let start = (sf + 24.0 - x).max(0.0).ceil() as usize;
    let mut acc = 0.0;
    for n in 0..start {
        acc += (scale / (x + n as f64)).powi(s as i32);
    }
    // Euler–Maclaurin remainder at y, factored as (scale/y)^s · [...].
    let y = x + start as f64;
    let lead = (scale / y).powi(s as i32);
    if lead == 0.0 {
        return acc;
    }
    let mut bracket = y / (sf - 1.0) + 0.5;
    // rising = (s)_{2j-1} / (2j)!, inv = y^{1-2j}
    let mut rising_over_fact = sf / 2.0;
    let mut inv = 1.0 / y;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * rising_over_fact * inv;
        bracket += term;
        if term.abs() < 1e-18 * bracket.abs() {
            break;
        }
        let k = 2.0 * (j as f64 + 1.0);
        rising_over_fact *= (sf + k - 1.0) * (sf + k) / ((k + 1.0) * (k + 2.0));
        inv /= y * y;
    }
    acc + lead * bracket
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_known_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        // ψ(1/2) = −γ − 2 ln 2
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-13);
        // recurrence ψ(x+1) = ψ(x) + 1/x
        for &x in &[0.3, 2.7, 19.5, 150.25, 1.0e5] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-12);
        }
    }

    #[test]
    fn hurwitz_matches_direct_sums() {
        // ζ(2, 1) = π²/6, ζ(4, 1) = π⁴/90
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta_scaled(2, 1.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta_scaled(4, 1.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // ζ(2, 1/2) = π²/2
        assert!((hurwitz_zeta_scaled(2, 0.5, 1.0) - pi * pi / 2.0).abs() < 1e-13);
        // brute force at a large shift
        let x = 1000.25;
        let brute: f64 = (0..2_000_000).map(|n| (x + n as f64).powi(-3)).sum::<f64>()
            + 0.5 / (x + 2.0e6).powi(2);
        let got = hurwitz_zeta_scaled(3, x, 1.0);
        assert!(((got - brute) / brute).abs() < 1e-10, "{got} vs {brute}");
    }

    #[test]
    fn hurwitz_scaled_high_order() {
        let x = 5.0e4;
        let s = 80;
        let got = hurwitz_zeta_scaled(s, x, x);
        let brute: f64 = (0..400_000)
            .map(|n| (x / (x + n as f64)).powi(s as i32))
            .sum();
        assert!(((got - brute) / brute).abs() < 1e-12, "{got} vs {brute}");
    }
}
