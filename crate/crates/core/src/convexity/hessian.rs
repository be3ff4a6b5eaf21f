use crate::error::Result;
use crate::jet::{Mat3, Vec3};

/// Second-order central-difference Hessian of `f` at `x` with per-coordinate
/// steps `h`. Diagonal entries use the three-point stencil, off-diagonal ones
/// the four-point cross stencil; the result is symmetric by construction.
/// Any stencil evaluation error (typically a domain error) is returned.
pub fn hessian3<F>(f: F, x: Vec3, h: Vec3) -> Result<Mat3>
where
    F: Fn(Vec3) -> Result<f64>,
{
    let shifted = |di: [f64; 3]| -> Result<f64> { f([x[0] + di[0], x[1] + di[1], x[2] + di[2]]) };
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s * h[i];
        d
    };
    let f0 = f(x)?;
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        let fp = shifted(unit(i, 1.0))?;
        let fm = shifted(unit(i, -1.0))?;
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..3 {
            let d = |si: f64, sj: f64| {
                let mut v = unit(i, si);
                v[j] = sj * h[j];
                v
            };
            let cross = shifted(d(1.0, 1.0))? - shifted(d(1.0, -1.0))? - shifted(d(-1.0, 1.0))?
                + shifted(d(-1.0, -1.0))?;
            hess[i][j] = cross / (4.0 * h[i] * h[j]);
            hess[j][i] = hess[i][j];
        }
    }
    Ok(hess)
}

/// Steps `rel·(1 + |x_i|)`.
pub fn relative_steps(x: Vec3, rel: f64) -> Vec3 {
    x.map(|xi| rel * (1.0 + xi.abs()))
}
