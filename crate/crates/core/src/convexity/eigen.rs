use std::f64::consts::PI;

use crate::jet::{max_abs, Mat3};

/// Eigenvalues of a symmetric 3×3 matrix in ascending order, by the
/// trigonometric solution of the characteristic cubic. Only the upper
/// triangle is read.
pub fn eigenvalues_sym3(m: &Mat3) -> [f64; 3] {
    let scale = max_abs(m);
    if scale == 0.0 || !scale.is_finite() {
        return if scale == 0.0 {
            [0.0; 3]
        } else {
            [f64::NAN; 3]
        };
    }
    let a00 = m[0][0] / scale;
    let a11 = m[1][1] / scale;
    let a22 = m[2][2] / scale;
    let a01 = m[0][1] / scale;
    let a02 = m[0][2] / scale;
    let a12 = m[1][2] / scale;

    let q = (a00 + a11 + a22) / 3.0;
    let off = a01 * a01 + a02 * a02 + a12 * a12;
    let (b00, b11, b22) = (a00 - q, a11 - q, a22 - q);
    let p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off;
    if p2 == 0.0 {
        return [q * scale; 3];
    }
    let p = (p2 / 6.0).sqrt();
    // det((A - qI)/p) / 2
    let det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02)
        + a02 * (a01 * a12 - b11 * a02);
    let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    [smallest * scale, middle * scale, largest * scale]
}

/// (λ_min, λ_max) of a symmetric 3×3 matrix.
pub fn min_max_eigenvalues_sym3(m: &Mat3) -> (f64, f64) {
    let ev = eigenvalues_sym3(m);
    (ev[0], ev[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_zero() {
        let d = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]];
        let (lo, hi) = min_max_eigenvalues_sym3(&d);
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
        assert_eq!(min_max_eigenvalues_sym3(&[[0.0; 3]; 3]), (0.0, 0.0));
    }

    #[test]
    fn multiple_of_identity() {
        let m = [[-2.5, 0.0, 0.0], [0.0, -2.5, 0.0], [0.0, 0.0, -2.5]];
        assert_eq!(eigenvalues_sym3(&m), [-2.5; 3]);
    }

    #[test]
    fn rank_one() {
        // v vᵀ with v = (1, 2, 2): eigenvalues 0, 0, 9
        let v = [1.0, 2.0, 2.0];
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = v[i] * v[j];
            }
        }
        let ev = eigenvalues_sym3(&m);
        assert!(ev[0].abs() < 1e-14 && ev[1].abs() < 1e-14);
        assert!((ev[2] - 9.0).abs() < 1e-13);
    }
}
