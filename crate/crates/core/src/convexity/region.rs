use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Tensor grid including the interval end points.
    Grid,
    /// Seeded uniform sampling.
    Random { seed: u64 },
}

/// An axis-aligned box of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<const N: usize> {
    pub bounds: [(f64, f64); N],
    pub sample_count: usize,
    pub sampling: Sampling,
}

pub type Region2 = Region<2>;
pub type Region3 = Region<3>;

impl<const N: usize> Region<N> {
    pub fn new(bounds: [(f64, f64); N], sample_count: usize, sampling: Sampling) -> Result<Self> {
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidRegion(format!(
                    "axis {i} has non-finite bounds"
                )));
            }
            if !(lo < hi) {
                return Err(Error::InvalidRegion(format!(
                    "axis {i}: lower bound {lo} must be strictly below upper bound {hi}"
                )));
            }
        }
        if sample_count == 0 {
            return Err(Error::InvalidRegion("sample count must be positive".into()));
        }
        Ok(Region {
            bounds,
            sample_count,
            sampling,
        })
    }

    pub fn grid(bounds: [(f64, f64); N], sample_count: usize) -> Result<Self> {
        Self::new(bounds, sample_count, Sampling::Grid)
    }

    pub fn random(bounds: [(f64, f64); N], sample_count: usize, seed: u64) -> Result<Self> {
        Self::new(bounds, sample_count, Sampling::Random { seed })
    }

    /// Largest n with n^N ≤ sample_count.
    pub fn points_per_axis(&self) -> usize {
        let mut n = (self.sample_count as f64).powf(1.0 / N as f64).round() as usize;
        while n > 1 && n.pow(N as u32) > self.sample_count {
            n -= 1;
        }
        while (n + 1).pow(N as u32) <= self.sample_count {
            n += 1;
        }
        n.max(1)
    }

    pub fn points(&self) -> Vec<[f64; N]> {
        match self.sampling {
            Sampling::Grid => {
                let n = self.points_per_axis();
                let coord = |axis: usize, k: usize| {
                    let (lo, hi) = self.bounds[axis];
                    if n == 1 {
                        0.5 * (lo + hi)
                    } else if k == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * k as f64 / (n - 1) as f64
                    }
                };
                let total = n.pow(N as u32);
                (0..total)
                    .map(|mut idx| {
                        let mut p = [0.0; N];
                        for axis in (0..N).rev() {
                            p[axis] = coord(axis, idx % n);
                            idx /= n;
                        }
                        p
                    })
                    .collect()
            }
            Sampling::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..self.sample_count)
                    .map(|_| {
                        let mut p = [0.0; N];
                        for (axis, &(lo, hi)) in self.bounds.iter().enumerate() {
                            p[axis] = rng.random_range(lo..=hi);
                        }
                        p
                    })
                    .collect()
            }
        }
    }

    /// Mirror one axis, `[lo, hi] ↦ [-hi, -lo]`.
    pub fn reflect_axis(&self, axis: usize) -> Self {
        let mut out = self.clone();
        let (lo, hi) = self.bounds[axis];
        out.bounds[axis] = (-hi, -lo);
        out
    }

    /// Shrink every interval by `fraction` of its width on each side.
    pub fn inset(&self, fraction: f64) -> Result<Self> {
        let mut bounds = self.bounds;
        for b in bounds.iter_mut() {
            let w = b.1 - b.0;
            *b = (b.0 + fraction * w, b.1 - fraction * w);
        }
        Self::new(bounds, self.sample_count, self.sampling)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let r = Region3::grid([(0.5, 2.0); 3], 512).unwrap();
        assert_eq!(r.points_per_axis(), 8);
        let pts = r.points();
        assert_eq!(pts.len(), 512);
        assert_eq!(pts[0], [0.5, 0.5, 0.5]);
        assert_eq!(pts[511], [2.0, 2.0, 2.0]);
        let r2 = Region2::grid([(0.5, 2.0); 2], 512).unwrap();
        assert_eq!(r2.points_per_axis(), 22);
        assert_eq!(
            Region3::grid([(0.0, 1.0); 3], 7).unwrap().points(),
            vec![[0.5; 3]]
        );
    }

    #[test]
    fn random_is_seeded_and_inside() {
        let r = Region3::random([(0.0, 1.0), (-2.0, -1.0), (5.0, 6.0)], 100, 42).unwrap();
        let a = r.points();
        assert_eq!(a, r.points());
        assert!(a
            .iter()
            .all(|p| p[0] >= 0.0 && p[0] <= 1.0 && p[1] <= -1.0 && p[2] >= 5.0));
        let other = Region3::random(r.bounds, 100, 43).unwrap().points();
        assert_ne!(a, other);
    }

    #[test]
    fn rejects_malformed_bounds() {
        assert!(Region3::grid([(1.0, 1.0), (0.0, 1.0), (0.0, 1.0)], 8).is_err());
        assert!(Region2::grid([(2.0, 1.0), (0.0, 1.0)], 8).is_err());
        assert!(Region2::grid([(0.0, 1.0), (0.0, f64::NAN)], 8).is_err());
        assert!(Region2::grid([(0.0, 1.0), (0.0, 1.0)], 0).is_err());
    }

    #[test]
    fn reflect_and_inset() {
        let r = Region3::grid([(0.5, 2.0), (-1.0, 0.5), (1.0, 3.0)], 27).unwrap();
        assert_eq!(r.reflect_axis(1).bounds[1], (-0.5, 1.0));
        let i = r.inset(0.1).unwrap();
        assert!((i.bounds[0].0 - 0.65).abs() < 1e-15 && (i.bounds[0].1 - 1.85).abs() < 1e-15);
    }
}
