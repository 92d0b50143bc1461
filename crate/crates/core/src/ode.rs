//! Fixed-step classical Runge-Kutta for small complex systems.

use num_complex::Complex64 as C64;

/// Integrates `y' = f(y)` over `[0, t_end]` with `steps` equal RK4 steps.
/// `on_step` sees the state after each step and may abort by returning false.
pub fn rk4<const N: usize>(
    f: impl Fn(&[C64; N]) -> [C64; N],
    y0: [C64; N],
    t_end: f64,
    steps: usize,
    mut on_step: impl FnMut(&[C64; N]) -> bool,
) -> Option<[C64; N]> {
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let axpy = |y: &[C64; N], k: &[C64; N], s: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += k[i] * s;
        }
        out
    };
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, &k1, h / 2.0));
        let k3 = f(&axpy(&y, &k2, h / 2.0));
        let k4 = f(&axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if !on_step(&y) {
            return None;
        }
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let k = C64::new(-1.0, 2.0);
        let y = rk4(|y: &[C64; 1]| [k * y[0]], [C64::new(1.0, 0.0)], 1.0, 1000, |_| true).unwrap();
        assert!((y[0] - k.exp()).norm() < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let f = |y: &[C64; 1]| [-y[0]];
        let err = |n| (rk4(f, [C64::new(1.0, 0.0)], 2.0, n, |_| true).unwrap()[0].re - (-2.0f64).exp()).abs();
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }
}
