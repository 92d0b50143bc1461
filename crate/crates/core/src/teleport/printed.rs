//! Closed-form fidelities exactly as published, including forms that the
//! quadrature oracle shows to be wrong. Nothing here is corrected silently;
//! the `*_variant` functions hold candidate corrections that are only ever
//! reported next to the printed value.

/// Coherent input, squeezed-vacuum resource.
pub fn coherent_tmsv(lambda: f64, gamma: f64) -> f64 {
    let (l, g) = (lambda, gamma);
    (2.0 - 2.0 * l * l) / (3.0 + g * g - 4.0 * l * g - l * l * (1.0 - g * g))
}

fn nongaussian_bracket(lp: f64, g: f64) -> f64 {
    1.0 + g - lp * (1.0 + g * g) - lp * lp * (1.0 - g)
}

/// Coherent input, subtracted resource.
pub fn coherent_nongaussian(lambda_prime: f64, gamma: f64) -> f64 {
    let (l, g) = (lambda_prime, gamma);
    let num = (1.0 - l * l).powi(3) * ((1.0 + g).powi(2) - l * (1.0 + g) * (1.0 + g * g) + l * l * (1.0 + g * g));
    num / ((1.0 + l * l) * nongaussian_bracket(l, g).powi(3))
}

/// Unit-gain limit of [`coherent_nongaussian`].
pub fn coherent_nongaussian_unit_gain(lambda_prime: f64) -> f64 {
    let l = lambda_prime;
    (1.0 + l).powi(3) * (l * l - 2.0 * l + 2.0) / (4.0 * (1.0 + l * l))
}

pub fn a_coeffs(gamma: f64) -> [f64; 5] {
    let g = gamma;
    let a0 = 5.0 + 2.0 * g * g + g.powi(4);
    let a1 = -8.0 * g - 8.0 * g.powi(3);
    let a2 = -6.0 + 20.0 * g * g + 2.0 * g.powi(4);
    [a0, a1, a2, a1, a0]
}

fn single_photon_tmsv_parts(l: f64, g: f64) -> (f64, f64) {
    let a = a_coeffs(g);
    let poly = a.iter().rev().fold(0.0, |acc, c| acc * l + c);
    let den = 3.0 + g * g - 4.0 * l * g - l * l + l * l * g * g;
    (2.0 * (1.0 - l * l) * poly, den)
}

/// Single-photon input, squeezed-vacuum resource. Gives 4 at `lambda = 0,
/// gamma = 1` where the true fidelity is 1/4.
pub fn single_photon_tmsv(lambda: f64, gamma: f64) -> f64 {
    let (num, den) = single_photon_tmsv_parts(lambda, gamma);
    num / den
}

/// Candidate correction: the same expression with the denominator cubed.
pub fn single_photon_tmsv_variant(lambda: f64, gamma: f64) -> f64 {
    let (num, den) = single_photon_tmsv_parts(lambda, gamma);
    num / den.powi(3)
}

pub fn b_coeffs(gamma: f64) -> [f64; 7] {
    let g = gamma;
    let p = |k: i32| g.powi(k);
    [
        1.0 + 2.0 * g + 2.0 * p(2) + 2.0 * p(3) + p(4),
        1.0 - 3.0 * g - 6.0 * p(2) - 6.0 * p(3) - 7.0 * p(4) - 3.0 * p(5),
        -8.0 * g + 19.0 * p(2) + 24.0 * p(3) + 10.0 * p(4) + 8.0 * p(5) + 3.0 * p(6),
        3.0 - 27.0 * g - 21.0 * p(2) - 35.0 * p(3) - 27.0 * p(4) - 9.0 * p(5) - 3.0 * p(6) - p(7),
        12.0 + 20.0 * g + 55.0 * p(2) + 30.0 * p(3) + 22.0 * p(4) + 10.0 * p(5) + 3.0 * p(6),
        -7.0 - 27.0 * g - 18.0 * p(2) - 30.0 * p(3) - 11.0 * p(4) - 3.0 * p(5),
        1.0 + 4.0 * g + 14.0 * p(2) + 4.0 * p(3) + p(4),
    ]
}

fn single_photon_nongaussian_parts(l: f64, g: f64) -> (f64, f64) {
    let poly = b_coeffs(g).iter().rev().fold(0.0, |acc, c| acc * l + c);
    let prefactor = (1.0 + l * l) * (1.0 - l * l).powi(-3);
    (poly / prefactor, nongaussian_bracket(l, g))
}

/// Single-photon input, subtracted resource.
pub fn single_photon_nongaussian(lambda_prime: f64, gamma: f64) -> f64 {
    let (num, bracket) = single_photon_nongaussian_parts(lambda_prime, gamma);
    num / bracket
}

/// Candidate correction: the trailing bracket raised to the fifth power.
pub fn single_photon_nongaussian_variant(lambda_prime: f64, gamma: f64) -> f64 {
    let (num, bracket) = single_photon_nongaussian_parts(lambda_prime, gamma);
    num / bracket.powi(5)
}

pub fn c0(lambda: f64, gamma: f64) -> f64 {
    let (l, g) = (lambda, gamma);
    (1.0 + g * g - 4.0 * l * g + l * l * (1.0 + g * g)) / (2.0 - 2.0 * l * l)
}

/// Squeezed-vacuum input with real squeezing `xi`, squeezed-vacuum resource.
pub fn squeezed_tmsv(lambda: f64, gamma: f64, xi: f64) -> f64 {
    let c = c0(lambda, gamma);
    (1.0 + 2.0 * c * (2.0 * xi).cosh() + c * c).powf(-0.5)
}

/// `d0..d8` in order.
pub fn d_coeffs(lambda_prime: f64, gamma: f64, xi: f64) -> [f64; 9] {
    let (l, g) = (lambda_prime, gamma);
    let p = |k: i32| g.powi(k);
    let c2 = (2.0 * xi).cosh();
    let c4 = (4.0 * xi).cosh();
    let common = g - l - l * g * g + l * l * g;
    [
        2.0 + 8.0 * p(2) + 2.0 * p(4) + 8.0 * (g + p(3)) * c2 + 4.0 * p(2) * c4,
        -12.0 * g - 18.0 * p(3) - 6.0 * p(5) - 6.0 * (1.0 + 4.0 * p(2) + 3.0 * p(4)) * c2 - 6.0 * (g + p(3)) * c4,
        2.0 + 15.0 * p(2) + 22.0 * p(4) + 6.0 * p(6) + 8.0 * (2.0 * g + 9.0 * p(3) + 3.0 * p(5)) * c2
            + (2.0 + 7.0 * g + 2.0 * p(4)) * c4,
        4.0 * g - 12.0 * p(3) - 18.0 * p(5) - 2.0 * p(7) + 2.0 * (1.0 - 7.0 * p(2) - 9.0 * p(4) - p(6)) * c2
            - 2.0 * (g + p(3)) * c4,
        -5.0 - 6.0 * p(2) + 15.0 * p(4) + 6.0 * p(6) + (1.0 + 4.0 * p(2) + p(4)) * c4,
        2.0 * g - 4.0 * p(3) - 6.0 * p(5) + 2.0 * (1.0 + 4.0 * p(2) + 3.0 * p(4)) * c2 - 4.0 * (g + p(3)) * c4,
        2.0 + p(2) + 2.0 * p(4) - 4.0 * (g + p(3)) * c2 + 3.0 * p(2) * c4,
        common + (1.0 - l * l) * (2.0 * xi).exp(),
        common + (1.0 - l * l) * (-2.0 * xi).exp(),
    ]
}

/// Squeezed-vacuum input, subtracted resource.
pub fn squeezed_nongaussian(lambda_prime: f64, gamma: f64, xi: f64) -> f64 {
    let l = lambda_prime;
    let d = d_coeffs(l, gamma, xi);
    let poly = d[..7].iter().rev().fold(0.0, |acc, c| acc * l + c);
    poly / (2.0 * (1.0 + l * l) * (1.0 - l * l).powi(-3) * (d[7] * d[8]).powf(2.5))
}

/// Polynomial coefficients `(A, B)` of the subtracted resource's
/// characteristic function `(1 + A t + B t^2) exp(k t)`, `t = |alpha|^2`.
pub fn nongaussian_slice_coeffs(lambda_prime: f64, gamma: f64) -> (f64, f64, f64) {
    let (l, g) = (lambda_prime, gamma);
    let a = l * (1.0 + g * g + 3.0 * l * l - 6.0 * l * g + 3.0 * l * l * g * g - 2.0 * l.powi(3) * g) / (1.0 - l.powi(4));
    let b = l * l * (l - g).powi(2) * (1.0 - l * g).powi(2) / ((1.0 + l * l) * (1.0 - l * l).powi(2));
    let k = (1.0 - l * g) * (l - g) / (1.0 - l * l);
    (a, b, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        assert_relative_eq!(coherent_tmsv(0.683_016_770_591_247_5, 0.975_180_456_784_443), 0.844_227_8, epsilon = 1e-7);
        assert_relative_eq!(coherent_nongaussian(0.676_184_736_181_490_2, 0.975_180_456_784_443), 0.896_230_1, epsilon = 1e-7);
        assert_relative_eq!(coherent_nongaussian_unit_gain(0.676_184_736_181_490_2), 0.892_656_986_8, epsilon = 1e-9);
    }

    #[test]
    fn classical_limits() {
        assert_eq!(coherent_tmsv(0.0, 1.0), 0.5);
        assert_eq!(coherent_nongaussian_unit_gain(0.0), 0.5);
        assert_eq!(single_photon_tmsv(0.0, 1.0), 4.0);
        assert_eq!(single_photon_tmsv_variant(0.0, 1.0), 0.25);
        for l in [0.0, 0.3, 0.683, 0.9] {
            assert!((squeezed_tmsv(l, 1.0, 0.0) - (1.0 + l) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_gain_limit() {
        for i in 0..50 {
            let l = 0.9 * i as f64 / 49.0;
            assert!((coherent_nongaussian(l, 1.0) - coherent_nongaussian_unit_gain(l)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_a_coefficients() {
        let a = a_coeffs(0.9);
        assert_eq!(a[0], a[4]);
        assert_eq!(a[1], a[3]);
    }
}
