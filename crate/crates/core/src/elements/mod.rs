//! Element kernels: layered shell and fiber beam.
//!
//! Both are pure functions of (geometry, element displacements, committed
//! point states) returning a tangent, an internal force and trial states.

pub mod beam;
pub mod shell;

pub use beam::{beam_response, BeamResponse, BeamState};
pub use shell::{shell_response, shell_stresses, ShellResponse, ShellState};

/// Gauss-Legendre points and weights on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `out += a^T * b * c` for an `r x n` matrix `a`, an `r x r` `b` and `r x n` `c`,
/// all row-major, scaled by `s`.
pub(crate) fn add_atbc(out: &mut [f64], a: &[f64], b: &[f64], c: &[f64], r: usize, n: usize, s: f64) {
    let mut bc = vec![0.0; r * n];
    for i in 0..r {
        for k in 0..r {
            let bik = b[i * r + k];
            if bik == 0.0 {
                continue;
            }
            for j in 0..n {
                bc[i * n + j] += bik * c[k * n + j];
            }
        }
    }
    for i in 0..r {
        for p in 0..n {
            let aip = a[i * n + p] * s;
            if aip == 0.0 {
                continue;
            }
            let row = &mut out[p * n..(p + 1) * n];
            for (o, v) in row.iter_mut().zip(&bc[i * n..(i + 1) * n]) {
                *o += aip * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in 1..=10 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact up to degree 2n - 1
            let deg = 2 * n - 2;
            let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((num - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(w.iter().all(|w| (w - 1.0).abs() < 1e-15));
    }
}
