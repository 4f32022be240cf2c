use serde::{Deserialize, Serialize};

use super::LocalTimeField;

/// Coefficient stencil defining the local stream.
///
/// With coefficients `(c_1, ..., c_k)` the stream felt at site `j` is
///
/// ```text
/// Δ(n, j) = Σ_{i=1..k} c_i · (ℓ(n, j-i+1) − ℓ(n, j+i))
/// ```
///
/// where edge `e` joins sites `e-1` and `e`. Edges left of the site push the
/// walker right and their mirror images push it left, so every kernel in this
/// representation is antisymmetric about the site.
///
/// The default two-coefficient kernel `(1, -α)` expands to
/// `−α ℓ(j−1) + ℓ(j) − ℓ(j+1) + α ℓ(j+2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionKernel {
    coefficients: Vec<f64>,
}

impl InteractionKernel {
    /// The four-edge kernel `(1, -alpha)`.
    pub fn nearest(alpha: f64) -> Self {
        Self {
            coefficients: vec![1.0, -alpha],
        }
    }

    /// A kernel from explicit coefficients; `None` when empty or non-finite.
    pub fn new(coefficients: Vec<f64>) -> Option<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return None;
        }
        Some(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Half-width `k`: the stream at a site reads `2k` edges.
    pub fn half_width(&self) -> usize {
        self.coefficients.len()
    }

    /// Largest one-step change of the stream at a fixed site.
    pub fn lipschitz_constant(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Stream at `site` under the given local times.
    #[inline]
    pub fn stream(&self, local_times: &LocalTimeField, site: i64) -> f64 {
        let mut acc = 0.0;
        for (i, &c) in self.coefficients.iter().enumerate() {
            let i = i as i64;
            let left = local_times.get(site - i) as i64;
            let right = local_times.get(site + i + 1) as i64;
            acc += c * (left - right) as f64;
        }
        acc
    }

    /// Stream at `site` of a real-valued profile given by `value(edge)`.
    pub fn stream_of<F: Fn(i64) -> f64>(&self, value: F, site: i64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let i = i as i64;
                c * (value(site - i) - value(site + i + 1))
            })
            .sum()
    }

    /// Change of the stream at each affected site when `edge` gains one visit.
    ///
    /// Yields `(site, increment)` pairs; a site can appear twice only for
    /// degenerate stencils.
    pub fn increments(&self, edge: i64) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coefficients.iter().enumerate().flat_map(move |(i, &c)| {
            let i = i as i64;
            // edge = site - i  (left side, +c)  and  edge = site + i + 1 (right side, -c)
            [(edge + i, c), (edge - i - 1, -c)]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_kernel_expansion() {
        let alpha = 0.37;
        let k = InteractionKernel::nearest(alpha);
        let mut lt = LocalTimeField::new();
        let counts = [(-1, 3u64), (0, 5), (1, 2), (2, 7), (3, 11)];
        for (e, c) in counts {
            for _ in 0..c {
                lt.increment(e);
            }
        }
        for j in -2..5 {
            let l = |e: i64| lt.get(e) as f64;
            let expect = -alpha * l(j - 1) + l(j) - l(j + 1) + alpha * l(j + 2);
            assert!((k.stream(&lt, j) - expect).abs() < 1e-12, "site {j}");
        }
    }

    #[test]
    fn increments_match_recomputation() {
        let k = InteractionKernel::new(vec![1.0, -0.5, 0.25]).unwrap();
        let mut lt = LocalTimeField::new();
        lt.increment(2);
        lt.increment(4);
        let before: Vec<f64> = (-6..10).map(|j| k.stream(&lt, j)).collect();
        lt.increment(3);
        let mut after = before.clone();
        for (site, d) in k.increments(3) {
            if (-6..10).contains(&site) {
                after[(site + 6) as usize] += d;
            }
        }
        for (idx, j) in (-6..10).enumerate() {
            assert_eq!(after[idx], k.stream(&lt, j));
        }
    }

    #[test]
    fn rejects_empty() {
        assert!(InteractionKernel::new(vec![]).is_none());
        assert!(InteractionKernel::new(vec![f64::NAN]).is_none());
        assert_eq!(InteractionKernel::nearest(2.0).lipschitz_constant(), 2.0);
    }
}
