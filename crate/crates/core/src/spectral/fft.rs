//! Unnormalized multi-dimensional FFT over the row-major wrapped layout.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;

type Plan = Arc<dyn Fft<f64>>;

fn plan(len: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let key = (len, direction == FftDirection::Forward);
    guard.entry(key).or_insert_with(|| FftPlanner::new().plan_fft(len, direction)).clone()
}

/// Lines handed to one rayon task; keeps short transforms batched.
fn lines_per_task(len: usize) -> usize {
    (8192 / len).max(1)
}

fn transform_lines(data: &mut [Complex64], fft: &Plan) {
    let len = fft.len();
    data.par_chunks_mut(len * lines_per_task(len)).for_each(|chunk| fft.process(chunk));
}

/// In-place `sum_j x_j e^{-+ 2 pi i j k / m}` along every axis, no scaling.
pub(crate) fn transform(data: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    assert_eq!(data.len(), grid.len());
    let m = grid.points();
    let fft = plan(m, direction);
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        if stride == 1 {
            transform_lines(data, &fft);
            continue;
        }
        // Transpose each (m x stride) block so the axis becomes contiguous.
        data.par_chunks_mut(m * stride).for_each(|block| {
            let mut lines = vec![Complex64::default(); m * stride];
            lines.par_chunks_mut(m).enumerate().for_each(|(c, line)| {
                for (r, slot) in line.iter_mut().enumerate() {
                    *slot = block[r * stride + c];
                }
            });
            transform_lines(&mut lines, &fft);
            block.par_chunks_mut(stride).enumerate().for_each(|(r, row)| {
                for (c, slot) in row.iter_mut().enumerate() {
                    *slot = lines[c * m + r];
                }
            });
        });
    }
}

pub(crate) fn forward(data: &mut [Complex64], grid: &GridSpec) {
    transform(data, grid, FftDirection::Forward);
}

pub(crate) fn inverse(data: &mut [Complex64], grid: &GridSpec) {
    transform(data, grid, FftDirection::Inverse);
}
