use std::rc::Rc;

use super::KernelSpec;
use crate::matrix::Matrix;

/// Least-recently-used cache of kernel-matrix rows.
///
/// `capacity_entries` bounds the number of cached `f64` values; at least two
/// rows are always kept so a working pair fits.
pub struct KernelCache<'a> {
    x: &'a Matrix,
    kernel: &'a KernelSpec,
    rows: Vec<Option<Rc<[f64]>>>,
    last_used: Vec<u64>,
    resident: Vec<usize>,
    max_rows: usize,
    clock: u64,
    misses: u64,
}

impl<'a> KernelCache<'a> {
    pub fn new(x: &'a Matrix, kernel: &'a KernelSpec, capacity_entries: usize) -> Self {
        let n = x.rows();
        let max_rows = (capacity_entries / n.max(1)).clamp(2, n.max(2));
        KernelCache {
            x,
            kernel,
            rows: vec![None; n],
            last_used: vec![0; n],
            resident: Vec::with_capacity(max_rows),
            max_rows,
            clock: 0,
            misses: 0,
        }
    }

    pub fn row(&mut self, i: usize) -> Rc<[f64]> {
        self.clock += 1;
        self.last_used[i] = self.clock;
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        self.misses += 1;
        if self.resident.len() == self.max_rows {
            let (pos, _) = self
                .resident
                .iter()
                .enumerate()
                .min_by_key(|(_, &r)| self.last_used[r])
                .expect("cache holds at least one row");
            let victim = self.resident.swap_remove(pos);
            self.rows[victim] = None;
        }
        let xi = self.x.row(i);
        let row: Rc<[f64]> = self
            .x
            .iter_rows()
            .map(|xj| self.kernel.eval(xi, xj))
            .collect();
        self.rows[i] = Some(Rc::clone(&row));
        self.resident.push(i);
        row
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }
}
