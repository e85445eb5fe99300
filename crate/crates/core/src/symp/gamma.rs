use num_complex::Complex64;
use std::f64::consts::PI;

use super::SympError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0
}

/// Complex Gamma function (Lanczos, `g = 7`, reflection for `Re s < 1/2`).
pub fn gamma(s: Complex64) -> Result<Complex64, SympError> {
    if is_pole(s) {
        return Err(SympError::PoleInput(s.to_string()));
    }
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi / ((pi * s).sin() * gamma_unchecked(1.0 - s));
    }
    let z = s - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Relative deviation of `Gamma(s) Gamma(s + 1/2) 2^(2s-1) / sqrt(pi)` from
/// `Gamma(2s)`.
pub fn duplication_check(s: Complex64) -> Result<f64, SympError> {
    for probe in [s, 2.0 * s, s + 0.5] {
        if is_pole(probe) {
            return Err(SympError::PoleInput(s.to_string()));
        }
    }
    let lhs = gamma_unchecked(2.0 * s);
    let rhs = gamma_unchecked(s)
        * gamma_unchecked(s + 0.5)
        * Complex64::new(2.0, 0.0).powc(2.0 * s - 1.0)
        / PI.sqrt();
    Ok((lhs - rhs).norm() / lhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!((gamma(c(5.0)).unwrap().re - 24.0).abs() < 1e-11);
        assert!((gamma(c(0.5)).unwrap().re - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(c(-0.5)).unwrap().re + 2.0 * PI.sqrt()).abs() < 1e-12);
        assert!(matches!(gamma(c(-3.0)), Err(SympError::PoleInput(_))));
    }

    #[test]
    fn duplication() {
        for s in [Complex64::new(1.0, 0.0), Complex64::new(2.5, 0.0), Complex64::new(0.3, 4.0)] {
            assert!(duplication_check(s).unwrap() < 1e-10, "{s}");
        }
        assert!(duplication_check(Complex64::new(0.0, 0.0)).is_err());
        assert!(duplication_check(Complex64::new(-0.5, 0.0)).is_err());
    }
}
