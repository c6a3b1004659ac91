//! Kernel row access for the solver.

use std::collections::HashMap;
use std::ops::Deref;
use std::rc::Rc;

use super::KernelMatrix;
use crate::error::Result;
use crate::kernel::{self, FeatureVector, KernelSpec};

pub(crate) enum Row<'m> {
    Borrowed(&'m [f64]),
    Shared(Rc<[f64]>),
}

impl Deref for Row<'_> {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        match self {
            Row::Borrowed(r) => r,
            Row::Shared(r) => r,
        }
    }
}

/// Least-recently-used cache of kernel rows.
pub(crate) struct LruRows<'m> {
    spec: KernelSpec,
    samples: &'m [FeatureVector],
    norms: Vec<f64>,
    capacity: usize,
    rows: HashMap<usize, (Rc<[f64]>, u64)>,
    clock: u64,
}

impl<'m> LruRows<'m> {
    fn new(spec: KernelSpec, samples: &'m [FeatureVector], budget_bytes: usize) -> Self {
        let row_bytes = samples.len().max(1) * std::mem::size_of::<f64>();
        // Two rows are live per solver step.
        let capacity = (budget_bytes / row_bytes).max(2);
        LruRows {
            spec,
            samples,
            norms: kernel::squared_norms(samples),
            capacity,
            rows: HashMap::new(),
            clock: 0,
        }
    }

    fn row(&mut self, i: usize) -> Result<Rc<[f64]>> {
        self.clock += 1;
        if let Some((row, stamp)) = self.rows.get_mut(&i) {
            *stamp = self.clock;
            return Ok(Rc::clone(row));
        }
        if self.rows.len() >= self.capacity {
            let oldest = self
                .rows
                .iter()
                .min_by_key(|(_, (_, stamp))| *stamp)
                .map(|(&k, _)| k);
            if let Some(k) = oldest {
                self.rows.remove(&k);
            }
        }
        let row: Rc<[f64]> = kernel::kernel_row(&self.spec, self.samples, &self.norms, i)?.into();
        self.rows.insert(i, (Rc::clone(&row), self.clock));
        Ok(row)
    }
}

pub(crate) enum Rows<'m> {
    Full(&'m kernel::GramMatrix),
    Cached(LruRows<'m>),
}

impl<'m> Rows<'m> {
    pub(crate) fn new(matrix: &'m KernelMatrix<'_>, budget_bytes: usize) -> Self {
        match matrix {
            KernelMatrix::Gram(g) => Rows::Full(g),
            KernelMatrix::OnDemand { spec, samples } => {
                Rows::Cached(LruRows::new(*spec, samples, budget_bytes))
            }
        }
    }

    pub(crate) fn row(&mut self, i: usize) -> Result<Row<'m>> {
        match self {
            Rows::Full(g) => Ok(Row::Borrowed(g.row(i))),
            Rows::Cached(c) => c.row(i).map(Row::Shared),
        }
    }
}
