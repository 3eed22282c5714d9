use crate::sampler::PointSet;

/// Per-axis critical values of a point set: the sorted distinct coordinates
/// followed by `1.0`, with each point's rank on every axis.
///
/// Because the value list holds exactly the coordinates that occur, a point
/// satisfies `p_i < values[i][r]` iff its rank is `< r`, so strict counts
/// at rank `r` equal closed counts at rank `r - 1`.
pub(crate) struct CandidateGrid {
    pub values: Vec<Vec<f64>>,
    /// Row-major `N x d` ranks into `values`.
    pub ranks: Vec<u32>,
    pub dim: usize,
    pub n: usize,
}

impl CandidateGrid {
    pub fn new(p: &PointSet) -> Self {
        let dim = p.dim();
        let n = p.len();
        let mut values = Vec::with_capacity(dim);
        let mut ranks = vec![0u32; n * dim];
        for axis in 0..dim {
            let mut v: Vec<f64> = p.points().map(|q| q[axis]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            for (i, q) in p.points().enumerate() {
                let r = v.partition_point(|&x| x < q[axis]);
                ranks[i * dim + axis] = r as u32;
            }
            v.push(1.0);
            values.push(v);
        }
        CandidateGrid { values, ranks, dim, n }
    }

    #[inline]
    pub fn rank(&self, point: usize, axis: usize) -> u32 {
        self.ranks[point * self.dim + axis]
    }

    /// Number of candidates on `axis` (distinct coordinates plus one).
    #[inline]
    pub fn len(&self, axis: usize) -> usize {
        self.values[axis].len()
    }

    pub fn corner(&self, idx: &[u32]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.values[a][i as usize]).collect()
    }

    /// Volume of `[0, corner)` as the sequential product over axes.
    #[inline]
    pub fn volume(&self, idx: &[u32]) -> f64 {
        idx.iter()
            .enumerate()
            .fold(1.0, |v, (a, &i)| v * self.values[a][i as usize])
    }
}

/// In-place inclusive prefix sums along every axis of a row-major tensor.
pub(crate) fn prefix_sum(t: &mut [u32], shape: &[usize], strides: &[usize]) {
    for (a, (&len, &inner)) in shape.iter().zip(strides).enumerate() {
        let outer: usize = shape[..a].iter().product();
        for o in 0..outer {
            let base = o * len * inner;
            for step in 1..len {
                let (done, rest) = t[base + (step - 1) * inner..].split_at_mut(inner);
                for (x, y) in rest[..inner].iter_mut().zip(done.iter()) {
                    *x += *y;
                }
            }
        }
    }
}
