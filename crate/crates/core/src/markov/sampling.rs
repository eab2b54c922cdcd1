//! Seeded ensemble sampling by inverse CDF on the quadrature kernels.
//!
//! Every uniform is addressed by `(seed, path, step)`: the path selects a
//! ChaCha stream and the step a position in it. Paths are therefore
//! independent of each other and of how the work is scheduled.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SamplePath, TimeGrid};
use crate::error::{Error, Result};
use crate::kernels::kernel_measure;
use crate::qcalc::{KernelCoordinates, ProcessParams};
use crate::quadrature::DiscreteMeasure;

/// The uniform on `[0, 1)` used by `path` at `step`.
pub fn uniform_draw(seed: u64, path: u64, step: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng.set_word_pos(u128::from(step) * 2);
    rng.gen::<f64>()
}

/// Nodes with cumulative weights.
struct InverseCdf {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl InverseCdf {
    fn new(measure: &DiscreteMeasure) -> Self {
        let mut acc = 0.0;
        let cumulative = measure
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { nodes: measure.nodes().to_vec(), cumulative }
    }

    /// Smallest node whose cumulative weight reaches `u`.
    fn draw(&self, u: f64) -> f64 {
        let i = self.cumulative.partition_point(|&c| c < u);
        self.nodes[i.min(self.nodes.len() - 1)]
    }
}

/// Paths of one ensemble, stored row-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub grid: TimeGrid,
    pub seed: u64,
    pub values: Vec<Vec<f64>>,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn path(&self, index: usize) -> SamplePath {
        SamplePath {
            grid: self.grid.clone(),
            values: self.values[index].clone(),
            seed: self.seed,
            index: index as u64,
        }
    }

    /// Values of every path at grid position `step`.
    pub fn column(&self, step: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[step]).collect()
    }
}

fn run<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("cannot build a thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Samples `paths` trajectories started at `X_0 = 0`.
///
/// At each grid time the kernels of all distinct current states are built
/// once (in parallel) and each path then draws from its state's kernel.
/// A grid time equal to 0 records the starting value 0. `threads` caps the
/// worker count; the output does not depend on it.
pub fn sample_paths(
    params: &ProcessParams,
    grid: &TimeGrid,
    seed: u64,
    paths: usize,
    nodes: usize,
    threads: Option<usize>,
) -> Result<PathEnsemble> {
    let values = run(threads, || sample_rows(params, grid, seed, paths, nodes))??;
    Ok(PathEnsemble { grid: grid.clone(), seed, values })
}

fn sample_rows(params: &ProcessParams, grid: &TimeGrid, seed: u64, paths: usize, nodes: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = vec![Vec::with_capacity(grid.len()); paths];
    let mut state = vec![0.0f64; paths];
    let mut prev_time = 0.0;
    for (step, &time) in grid.times().iter().enumerate() {
        if time > prev_time {
            let mut distinct: Vec<f64> = state.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup_by(|a, b| a.to_bits() == b.to_bits());
            let samplers: Vec<InverseCdf> = distinct
                .par_iter()
                .map(|&x| {
                    let coords = KernelCoordinates::new(x, prev_time, time)?;
                    Ok(InverseCdf::new(&kernel_measure(params, &coords, nodes)?))
                })
                .collect::<Result<_>>()?;
            let lookup: HashMap<u64, usize> = distinct.iter().enumerate().map(|(i, x)| (x.to_bits(), i)).collect();
            state.par_iter_mut().enumerate().for_each(|(path, x)| {
                let u = uniform_draw(seed, path as u64, step as u64);
                *x = samplers[lookup[&x.to_bits()]].draw(u);
            });
            prev_time = time;
        }
        for (row, &x) in rows.iter_mut().zip(&state) {
            row.push(x);
        }
    }
    Ok(rows)
}

/// Path 0 of the ensemble with the same seed.
pub fn sample_path(params: &ProcessParams, grid: &TimeGrid, seed: u64, nodes: usize) -> Result<SamplePath> {
    Ok(sample_paths(params, grid, seed, 1, nodes, None)?.path(0))
}
