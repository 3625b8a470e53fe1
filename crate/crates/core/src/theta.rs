//! Jacobi theta function `theta_1` for the square lattice (`tau = i`).
//!
//! `theta_1(pi z)` vanishes simply on the integer lattice, so products of its
//! powers give holomorphic functions with prescribed zeros and poles on the
//! torus. Its modulus reproduces the Green function and its argument the
//! multivalued vortex phase.

use std::f64::consts::PI;

use num_complex::Complex64;

const PRODUCT_TERMS: i32 = 10;

/// Nome `q = exp(i pi tau) = exp(-pi)`.
pub const NOME: f64 = 0.04321391826377226;

/// `theta_1(w) = 2 q^(1/4) sin w prod_n (1 - q^2n)(1 - 2 q^2n cos 2w + q^4n)`.
pub fn theta1(w: Complex64) -> Complex64 {
    let mut acc = w.sin() * (2.0 * NOME.powf(0.25));
    let c2 = (2.0 * w).cos();
    for n in 1..=PRODUCT_TERMS {
        let q2n = NOME.powi(2 * n);
        acc *= (1.0 - q2n) * (Complex64::new(1.0 + q2n * q2n, 0.0) - 2.0 * q2n * c2);
    }
    acc
}

/// `theta_1'(0) = 2 q^(1/4) prod_n (1 - q^2n)^3`.
pub fn theta1_prime0() -> f64 {
    let mut acc = 2.0 * NOME.powf(0.25);
    for n in 1..=PRODUCT_TERMS {
        acc *= (1.0 - NOME.powi(2 * n)).powi(3);
    }
    acc
}

/// `arg theta_1(pi (x + i y))` for an unreduced displacement `(x, y)`.
pub fn phase(x: f64, y: f64) -> f64 {
    theta1(Complex64::new(PI * x, PI * y)).arg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nome_value() {
        assert_abs_diff_eq!(NOME, (-PI).exp(), epsilon = 1e-17);
    }

    #[test]
    fn quasi_periodicity() {
        // theta_1(w + pi) = -theta_1(w), theta_1(w + pi tau) = -q^-1 e^(-2iw) theta_1(w)
        let w = Complex64::new(0.37, -0.21);
        let a = theta1(w + PI);
        assert_abs_diff_eq!((a + theta1(w)).norm(), 0.0, epsilon = 1e-14);
        let b = theta1(w + Complex64::new(0.0, PI));
        let expect = -theta1(w) * (Complex64::new(0.0, -2.0) * w).exp() / NOME;
        assert!((b - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn derivative_at_zero() {
        let h = 1e-6;
        let d = (theta1(Complex64::new(h, 0.0)) - theta1(Complex64::new(-h, 0.0))) / (2.0 * h);
        assert_abs_diff_eq!(d.re, theta1_prime0(), epsilon = 1e-8);
    }
}
