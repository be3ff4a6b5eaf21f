//! Second-order jets (value, gradient, Hessian) and the chain rule that moves
//! them between the specific variables (ρ, e) and the three coordinate systems
//! the certificates work in.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Value, gradient and Hessian of a scalar function of three coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub value: f64,
    pub grad: Vec3,
    pub hess: Mat3,
}

impl Jet3 {
    /// The coordinate function `x ↦ x[i]` at `x`.
    pub fn coordinate(x: Vec3, i: usize) -> Self {
        let mut grad = [0.0; 3];
        grad[i] = 1.0;
        Jet3 {
            value: x[i],
            grad,
            hess: [[0.0; 3]; 3],
        }
    }

    /// The ratio `x ↦ x[num] / x[den]` at `x` (`num != den`).
    pub fn ratio(x: Vec3, num: usize, den: usize) -> Self {
        debug_assert_ne!(num, den);
        let (a, b) = (x[num], x[den]);
        let mut grad = [0.0; 3];
        grad[num] = 1.0 / b;
        grad[den] = -a / (b * b);
        let mut hess = [[0.0; 3]; 3];
        hess[num][den] = -1.0 / (b * b);
        hess[den][num] = hess[num][den];
        hess[den][den] = 2.0 * a / (b * b * b);
        Jet3 {
            value: a / b,
            grad,
            hess,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        out.value *= factor;
        out.grad.iter_mut().for_each(|g| *g *= factor);
        out.hess
            .iter_mut()
            .flat_map(|row| row.iter_mut())
            .for_each(|h| *h *= factor);
        out
    }
}

/// Second-order jet of the specific entropy σ(ρ, e).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecificJet {
    pub sigma: f64,
    pub d_rho: f64,
    pub d_e: f64,
    pub d_rho_rho: f64,
    pub d_rho_e: f64,
    pub d_e_e: f64,
}

impl SpecificJet {
    pub fn gradient(&self) -> [f64; 2] {
        [self.d_rho, self.d_e]
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        [[self.d_rho_rho, self.d_rho_e], [self.d_rho_e, self.d_e_e]]
    }
}

/// Chain rule for `F(g_1(x), ..., g_K(x))` given the jet of `F` at the inner
/// values and the jets of the inner maps.
pub fn compose<const K: usize>(
    value: f64,
    outer_grad: [f64; K],
    outer_hess: [[f64; K]; K],
    inner: &[Jet3; K],
) -> Jet3 {
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for a in 0..K {
        for i in 0..3 {
            grad[i] += outer_grad[a] * inner[a].grad[i];
        }
        for i in 0..3 {
            for j in 0..3 {
                hess[i][j] += outer_grad[a] * inner[a].hess[i][j];
                for b in 0..K {
                    hess[i][j] += outer_hess[a][b] * inner[a].grad[i] * inner[b].grad[j];
                }
            }
        }
    }
    Jet3 { value, grad, hess }
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

pub fn norm(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat3) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_jet_matches_hand_derivatives() {
        let j = Jet3::ratio([2.0, 4.0, 1.0], 0, 1);
        assert_eq!(j.value, 0.5);
        assert_eq!(j.grad, [0.25, -0.125, 0.0]);
        assert_eq!(j.hess[0][1], -1.0 / 16.0);
        assert_eq!(j.hess[1][1], 4.0 / 64.0);
        assert_eq!(j.hess[0][0], 0.0);
    }

    #[test]
    fn compose_square_of_coordinate() {
        // F(y) = y², y = x0 / x2
        let x = [3.0, 0.0, 2.0];
        let y = Jet3::ratio(x, 0, 2);
        let j = compose(y.value * y.value, [2.0 * y.value], [[2.0]], &[y]);
        // f = x0²/x2²
        assert!((j.value - 2.25).abs() < 1e-15);
        assert!((j.grad[0] - 2.0 * 3.0 / 4.0).abs() < 1e-15);
        assert!((j.grad[2] + 2.0 * 9.0 / 8.0).abs() < 1e-15);
        assert!((j.hess[0][0] - 0.5).abs() < 1e-15);
        assert!((j.hess[2][2] - 6.0 * 9.0 / 16.0).abs() < 1e-15);
        assert!((j.hess[0][2] + 4.0 * 3.0 / 8.0).abs() < 1e-15);
    }
}
