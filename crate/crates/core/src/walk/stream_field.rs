use super::{InteractionKernel, LocalTimeField};

/// Streams at a fixed window of sites, updated incrementally as edges are
/// traversed.
///
/// For each site and kernel coefficient `c_i` the cache holds the integer
/// difference `ℓ(j−i) − ℓ(j+i+1)`; a traversal touches `2k` of them. Streams
/// are evaluated from these integers in the same order as
/// [`InteractionKernel::stream`], so cached and recomputed values agree
/// bit for bit.
#[derive(Clone, Debug)]
pub struct StreamField {
    kernel: InteractionKernel,
    first_site: i64,
    sites: usize,
    diffs: Vec<i64>,
}

impl StreamField {
    /// Zero streams over sites `first..=last`.
    pub fn new(kernel: InteractionKernel, first: i64, last: i64) -> Self {
        assert!(first <= last);
        let sites = (last - first + 1) as usize;
        let k = kernel.half_width();
        Self {
            kernel,
            first_site: first,
            sites,
            diffs: vec![0; sites * k],
        }
    }

    /// Initialized from an existing local-time field.
    pub fn from_local_times(
        kernel: InteractionKernel,
        first: i64,
        last: i64,
        lt: &LocalTimeField,
    ) -> Self {
        let mut field = Self::new(kernel, first, last);
        let k = field.kernel.half_width();
        for (s, site) in (first..=last).enumerate() {
            for i in 0..k {
                let o = i as i64;
                field.diffs[s * k + i] = lt.get(site - o) as i64 - lt.get(site + o + 1) as i64;
            }
        }
        field
    }

    /// Applies one traversal of `edge`.
    #[inline]
    pub fn record(&mut self, edge: i64) {
        let k = self.kernel.half_width();
        let sites = self.sites as i64;
        for i in 0..k {
            let o = i as i64;
            let left = edge + o - self.first_site;
            if (0..sites).contains(&left) {
                self.diffs[left as usize * k + i] += 1;
            }
            let right = edge - o - 1 - self.first_site;
            if (0..sites).contains(&right) {
                self.diffs[right as usize * k + i] -= 1;
            }
        }
    }

    /// Stream at `site`; panics outside the window.
    #[inline]
    pub fn get(&self, site: i64) -> f64 {
        let k = self.kernel.half_width();
        let s = (site - self.first_site) as usize;
        assert!(s < self.sites, "site {site} outside the stream window");
        let mut acc = 0.0;
        for (i, &c) in self.kernel.coefficients().iter().enumerate() {
            acc += c * self.diffs[s * k + i] as f64;
        }
        acc
    }

    /// Streams over the whole window, in site order.
    pub fn values(&self) -> Vec<f64> {
        (0..self.sites as i64)
            .map(|s| self.get(self.first_site + s))
            .collect()
    }

    pub fn first_site(&self) -> i64 {
        self.first_site
    }

    pub fn last_site(&self) -> i64 {
        self.first_site + self.sites as i64 - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::walk_rng;
    use crate::walk::{WalkParameters, WalkState};

    fn compare(alpha: f64) {
        let mut s = WalkState::new(WalkParameters::new(alpha, 1.0, 0).confined(4)).unwrap();
        let mut field = StreamField::new(s.params().kernel.clone(), -1, 6);
        let mut rng = walk_rng(17);
        for _ in 0..200_000 {
            let rec = s.step(&mut rng);
            field.record(if rec.dir > 0 { rec.position + 1 } else { rec.position });
        }
        for j in -1..=6 {
            let fresh = s.delta_at(j);
            assert_eq!(field.get(j).to_bits(), fresh.to_bits(), "site {j}");
        }
    }

    #[test]
    fn cache_matches_recomputation() {
        for alpha in [0.75, 0.5, 0.8, 0.43, 2.0] {
            compare(alpha);
        }
    }

    #[test]
    fn initialized_from_field() {
        let mut lt = LocalTimeField::new();
        for e in [1, 1, 2, 3, 3, 3, -1] {
            lt.increment(e);
        }
        let k = InteractionKernel::new(vec![1.0, -0.3, 0.1]).unwrap();
        let mut f = StreamField::from_local_times(k.clone(), -3, 6, &lt);
        for j in -3..=6 {
            assert_eq!(f.get(j), k.stream(&lt, j));
        }
        lt.increment(2);
        f.record(2);
        for j in -3..=6 {
            assert_eq!(f.get(j), k.stream(&lt, j));
        }
    }
}
