//! Axis-aligned windows and the deterministic low-discrepancy samples drawn
//! from them.

use serde::{Deserialize, Serialize};

/// Closed box `[lo_1, hi_1] × … × [lo_m, hi_m]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    axes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WindowError {
    #[error("window axis {axis} has lo > hi ({lo} > {hi})")]
    Inverted { axis: usize, lo: f64, hi: f64 },
    #[error("window axis {axis} is not finite")]
    NonFinite { axis: usize },
    #[error("window must have at least one axis")]
    Empty,
}

impl Window {
    pub fn new(axes: Vec<[f64; 2]>) -> Result<Self, WindowError> {
        if axes.is_empty() {
            return Err(WindowError::Empty);
        }
        for (axis, &[lo, hi]) in axes.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(WindowError::NonFinite { axis });
            }
            if lo > hi {
                return Err(WindowError::Inverted { axis, lo, hi });
            }
        }
        Ok(Self { axes })
    }

    /// The same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, WindowError> {
        Self::new(vec![[lo, hi]; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[[f64; 2]] {
        &self.axes
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.axes)
                .all(|(v, [lo, hi])| *lo <= *v && *v <= *hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.axes.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect()
    }

    /// Deterministic sample of `count` points: the corners (when the
    /// dimension is at most 10), the center, then a Halton sequence whose
    /// starting index is shifted by `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let m = self.dim();
        let mut out = Vec::with_capacity(count);
        if m <= 10 {
            for mask in 0..(1usize << m) {
                if out.len() >= count {
                    return out;
                }
                out.push(
                    self.axes
                        .iter()
                        .enumerate()
                        .map(|(i, [lo, hi])| if mask >> i & 1 == 1 { *hi } else { *lo })
                        .collect(),
                );
            }
        }
        if out.len() < count {
            out.push(self.center());
        }
        let primes = first_primes(m);
        let mut index = seed + 1;
        while out.len() < count {
            out.push(
                self.axes
                    .iter()
                    .zip(&primes)
                    .map(|([lo, hi], &b)| lo + (hi - lo) * radical_inverse(index, b))
                    .collect(),
            );
            index += 1;
        }
        out
    }

    /// `n` equally spaced points per axis (endpoints included), row-major.
    pub fn lattice(&self, n: usize) -> Vec<Vec<f64>> {
        let n = n.max(2);
        let m = self.dim();
        let total = n.pow(m as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; m];
                for axis in (0..m).rev() {
                    let k = idx % n;
                    idx /= n;
                    let [lo, hi] = self.axes[axis];
                    p[axis] = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                }
                p
            })
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| !c.is_multiple_of(p))
        {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_axis() {
        assert_eq!(
            Window::new(vec![[0.0, 1.0], [2.0, 1.0]]),
            Err(WindowError::Inverted {
                axis: 1,
                lo: 2.0,
                hi: 1.0
            })
        );
    }

    #[test]
    fn samples_are_deterministic_and_inside() {
        let w = Window::new(vec![[-1.0, 2.0], [0.0, 0.5], [3.0, 3.0]]).unwrap();
        let a = w.sample(500, 0);
        assert_eq!(a, w.sample(500, 0));
        assert_ne!(a, w.sample(500, 1));
        assert_eq!(a.len(), 500);
        assert!(a.iter().all(|p| w.contains(p)));
        assert!(a.contains(&vec![-1.0, 0.0, 3.0]));
        assert!(a.contains(&vec![2.0, 0.5, 3.0]));
    }

    #[test]
    fn halton_base_two_prefix() {
        let got: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn lattice_covers_endpoints() {
        let w = Window::new(vec![[0.0, 1.0], [-1.0, 1.0]]).unwrap();
        let pts = w.lattice(3);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![0.0, -1.0]);
        assert_eq!(pts[8], vec![1.0, 1.0]);
        assert_eq!(pts[1], vec![0.0, 0.0]);
    }
}
