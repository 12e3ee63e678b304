//! Least-recently-used cache of rows of the signed kernel matrix
//! `Q[i][j] = y_i y_j K(x_i, x_j)`.

use std::sync::Arc;

use crate::features::FeatureMatrix;
use crate::scalar::Scalar;

use super::kernel::KernelSpec;

pub(crate) struct QMatrix<'a, F> {
    data: &'a FeatureMatrix<F>,
    y: &'a [F],
    kernel: KernelSpec<F>,
    rows: Vec<Option<(Arc<[F]>, u64)>>,
    capacity: usize,
    cached: usize,
    clock: u64,
}

impl<'a, F: Scalar> QMatrix<'a, F> {
    pub fn new(data: &'a FeatureMatrix<F>, y: &'a [F], kernel: KernelSpec<F>, cache_bytes: usize) -> Self {
        let n = y.len();
        let row_bytes = std::mem::size_of_val(y).max(1);
        QMatrix {
            data,
            y,
            kernel,
            rows: vec![None; n],
            // the solver holds two rows at once
            capacity: (cache_bytes / row_bytes).clamp(2, n.max(2)),
            cached: 0,
            clock: 0,
        }
    }

    pub fn diagonal(&self) -> Vec<F> {
        (0..self.y.len())
            .map(|i| {
                let x = self.data.pattern(i);
                self.kernel.eval_unchecked(x, x)
            })
            .collect()
    }

    pub fn row(&mut self, i: usize) -> Arc<[F]> {
        self.clock += 1;
        if let Some((row, stamp)) = &mut self.rows[i] {
            *stamp = self.clock;
            return Arc::clone(row);
        }
        if self.cached == self.capacity {
            self.evict();
        }
        let xi = self.data.pattern(i);
        let yi = self.y[i];
        let row: Arc<[F]> = self
            .data
            .patterns()
            .zip(self.y)
            .map(|(xj, &yj)| yi * yj * self.kernel.eval_unchecked(xi, xj))
            .collect();
        self.rows[i] = Some((Arc::clone(&row), self.clock));
        self.cached += 1;
        row
    }

    fn evict(&mut self) {
        let oldest = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|(_, s)| (*s, i)))
            .min()
            .map(|(_, i)| i);
        if let Some(i) = oldest {
            self.rows[i] = None;
            self.cached -= 1;
        }
    }
}
