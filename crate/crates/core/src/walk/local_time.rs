use serde::{Deserialize, Serialize};

/// Edge local times: `count(j)` is the number of traversals of the
/// unoriented edge `{j-1, j}`.
///
/// Stored densely over a contiguous span of edges starting at `offset`; the
/// span grows geometrically towards whichever side the walk explores. Edges
/// outside the span read as zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalTimeField {
    offset: i64,
    counts: Vec<u64>,
    total: u64,
}

impl Default for LocalTimeField {
    fn default() -> Self {
        Self::new()
    }
}

impl LocalTimeField {
    pub fn new() -> Self {
        Self::with_span(-8, 8)
    }

    /// Preallocated over edges `first..=last`.
    pub fn with_span(first: i64, last: i64) -> Self {
        assert!(first <= last);
        Self {
            offset: first,
            counts: vec![0; (last - first + 1) as usize],
            total: 0,
        }
    }

    #[inline]
    pub fn get(&self, edge: i64) -> u64 {
        let idx = edge.wrapping_sub(self.offset);
        if idx >= 0 && (idx as usize) < self.counts.len() {
            self.counts[idx as usize]
        } else {
            0
        }
    }

    #[inline]
    pub fn increment(&mut self, edge: i64) {
        let idx = edge - self.offset;
        if idx < 0 || idx as usize >= self.counts.len() {
            self.grow_to(edge);
        }
        self.counts[(edge - self.offset) as usize] += 1;
        self.total += 1;
    }

    #[cold]
    fn grow_to(&mut self, edge: i64) {
        let len = self.counts.len() as i64;
        if edge < self.offset {
            let extra = (self.offset - edge).max(len);
            let mut counts = vec![0; extra as usize];
            counts.extend_from_slice(&self.counts);
            self.counts = counts;
            self.offset -= extra;
        } else {
            let needed = edge - self.offset + 1;
            let new_len = needed.max(2 * len);
            self.counts.resize(new_len as usize, 0);
        }
    }

    /// Total number of traversals, which equals the number of steps taken.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Smallest and largest edge with a nonzero count.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.counts.iter().position(|&c| c > 0)?;
        let last = self.counts.iter().rposition(|&c| c > 0)?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// `(edge, count)` over the support, zeros inside it included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let (lo, hi) = self.support().unwrap_or((1, 0));
        (lo..=hi).map(move |e| (e, self.get(e)))
    }

    /// Writes `count` for `edge` directly. Used for replaying edited logs.
    pub fn set(&mut self, edge: i64, count: u64) {
        let old = self.get(edge);
        if old == count {
            return;
        }
        let idx = edge - self.offset;
        if idx < 0 || idx as usize >= self.counts.len() {
            self.grow_to(edge);
        }
        self.counts[(edge - self.offset) as usize] = count;
        self.total = self.total - old + count;
    }
}
