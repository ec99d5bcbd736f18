//! Three-dimensional complex FFT over a [`Lattice`].
//!
//! Layout is row-major with `z` fastest. The z pass runs on contiguous
//! lines; the y and x passes transpose into scratch so every 1-D transform
//! works on contiguous memory.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::exec::Exec;
use crate::freq::Lattice;

pub struct Fft3 {
    lattice: Lattice,
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("lattice", &self.lattice).finish()
    }
}

#[derive(Clone, Copy)]
enum Dir {
    Forward,
    Inverse,
}

impl Fft3 {
    pub fn new(lattice: Lattice) -> Self {
        let mut planner = FftPlanner::new();
        let [nx, ny, nz] = lattice.dims();
        Fft3 {
            lattice,
            fwd: [
                planner.plan_fft_forward(nx),
                planner.plan_fft_forward(ny),
                planner.plan_fft_forward(nz),
            ],
            inv: [
                planner.plan_fft_inverse(nx),
                planner.plan_fft_inverse(ny),
                planner.plan_fft_inverse(nz),
            ],
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Coefficients to grid values: `u(x) = sum_f c(f) e^{i f.x}`.
    pub fn inverse(&self, data: &mut [Complex64], exec: Exec) {
        self.transform(data, Dir::Inverse, exec);
    }

    /// Grid values to coefficients, normalised by `1/N`.
    pub fn forward(&self, data: &mut [Complex64], exec: Exec) {
        self.transform(data, Dir::Forward, exec);
        let s = 1.0 / self.lattice.len() as f64;
        exec.for_each_mut(data, |_, c| *c *= s);
    }

    fn transform(&self, data: &mut [Complex64], dir: Dir, exec: Exec) {
        let [nx, ny, nz] = self.lattice.dims();
        assert_eq!(data.len(), nx * ny * nz);
        let plans = match dir {
            Dir::Forward => &self.fwd,
            Dir::Inverse => &self.inv,
        };

        // z: contiguous lines, batched per x-slab.
        let pz = &plans[2];
        exec.for_each_chunk_mut(data, ny * nz, |_, slab| pz.process(slab));

        // y: transpose each x-slab (ny, nz) -> (nz, ny).
        let py = &plans[1];
        exec.for_each_chunk_mut(data, ny * nz, |_, slab| {
            let mut buf = vec![Complex64::default(); ny * nz];
            for iy in 0..ny {
                for iz in 0..nz {
                    buf[iz * ny + iy] = slab[iy * nz + iz];
                }
            }
            py.process(&mut buf);
            for iz in 0..nz {
                for iy in 0..ny {
                    slab[iy * nz + iz] = buf[iz * ny + iy];
                }
            }
        });

        // x: global transpose (nx, ny*nz) -> (ny*nz, nx).
        let px = &plans[0];
        let rest = ny * nz;
        let mut t = vec![Complex64::default(); data.len()];
        {
            let src: &[Complex64] = data;
            exec.for_each_chunk_mut(&mut t, nx, |r, row| {
                for (ix, v) in row.iter_mut().enumerate() {
                    *v = src[ix * rest + r];
                }
                px.process(row);
            });
        }
        let tt: &[Complex64] = &t;
        exec.for_each_chunk_mut(data, rest, |ix, plane| {
            for (r, v) in plane.iter_mut().enumerate() {
                *v = tt[r * nx + ix];
            }
        });
    }
}
