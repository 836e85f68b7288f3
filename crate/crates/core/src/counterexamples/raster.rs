//! Binary rasters of planar sets and their Euclidean dilations.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Squared distance standing in for "no occupied cell".
const FAR: f64 = 1e30;

/// Square-cell raster on `[x0, x0 + nx·h] × [y0, y0 + ny·h]`.
///
/// Cell `(i, j)` has centre `(x0 + (i + ½)h, y0 + (j + ½)h)`. Distances are
/// measured between centres.
#[derive(Debug, Clone)]
pub struct Raster2D {
    h: f64,
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    occupied: Vec<bool>,
    weight: Option<Vec<f64>>,
}

impl Raster2D {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && x1 > x0 && y1 > y0) {
            return Err(Error::InvalidArgument(format!(
                "bad raster window [{x0}, {x1}] × [{y0}, {y1}] with h = {h}"
            )));
        }
        let nx = ((x1 - x0) / h).round() as usize;
        let ny = ((y1 - y0) / h).round() as usize;
        Ok(Self {
            h,
            x0,
            y0,
            nx,
            ny,
            occupied: vec![false; nx * ny],
            weight: None,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.h,
            self.y0 + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occupied[j * self.nx + i]
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Marks cells whose centre lies in the convex polygon (either orientation).
    pub fn fill_convex_polygon(&mut self, vertices: &[(f64, f64)]) {
        let m = vertices.len();
        let area2: f64 = (0..m)
            .map(|k| {
                let (a, b) = (vertices[k], vertices[(k + 1) % m]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum();
        let orient = area2.signum();
        let tol = 1e-12;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.center(i, j);
                let inside = (0..m).all(|k| {
                    let (a, b) = (vertices[k], vertices[(k + 1) % m]);
                    orient * ((b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0)) >= -tol
                });
                if inside {
                    self.occupied[j * self.nx + i] = true;
                }
            }
        }
    }

    /// Marks every cell crossed by the segment `[p, q]`.
    pub fn draw_segment(&mut self, p: (f64, f64), q: (f64, f64)) {
        let len = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
        let steps = ((len / self.h) * 8.0).ceil() as usize + 1;
        for k in 0..=steps {
            let w = k as f64 / steps as f64;
            let (x, y) = (p.0 + w * (q.0 - p.0), p.1 + w * (q.1 - p.1));
            let i = ((x - self.x0) / self.h).floor();
            let j = ((y - self.y0) / self.h).floor();
            if i >= 0.0 && j >= 0.0 && (i as usize) < self.nx && (j as usize) < self.ny {
                self.occupied[j as usize * self.nx + i as usize] = true;
            }
        }
    }

    /// Per-cell density, evaluated at cell centres.
    pub fn set_weight(&mut self, w: impl Fn(f64, f64) -> f64 + Sync) {
        let nx = self.nx;
        let weight = (0..self.nx * self.ny)
            .into_par_iter()
            .map(|c| {
                let (x, y) = self.center(c % nx, c / nx);
                w(x, y)
            })
            .collect();
        self.weight = Some(weight);
    }

    /// Squared distance from each centre to the nearest occupied centre,
    /// in world units, by the exact two-pass lower-envelope transform.
    pub fn squared_distance(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut grid: Vec<f64> = self.occupied.iter().map(|&o| if o { 0.0 } else { FAR }).collect();
        // columns
        let columns: Vec<Vec<f64>> = (0..nx)
            .into_par_iter()
            .map(|i| edt_1d(&(0..ny).map(|j| grid[j * nx + i]).collect::<Vec<_>>()))
            .collect();
        for (i, col) in columns.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                grid[j * nx + i] = *v;
            }
        }
        // rows
        grid.par_chunks_mut(nx).for_each(|row| {
            let d = edt_1d(row);
            row.copy_from_slice(&d);
        });
        let h2 = self.h * self.h;
        grid.iter().map(|d| d * h2).collect()
    }

    /// `μ(A + t·B₂²)` for each `t`, counting cells whose centre is within `t`
    /// of an occupied centre, weighted by the density.
    pub fn dilated_measures(&self, ts: &[f64]) -> Vec<f64> {
        let d2 = self.squared_distance();
        let cell = self.h * self.h;
        ts.iter()
            .map(|&t| {
                let r2 = t * t * (1.0 + 1e-12);
                d2.par_iter()
                    .enumerate()
                    .filter(|(_, &d)| d <= r2)
                    .map(|(c, _)| self.weight.as_ref().map_or(1.0, |w| w[c]))
                    .sum::<f64>()
                    * cell
            })
            .collect()
    }
}

/// Squared-distance transform of a sampled function in one dimension
/// (lower envelope of parabolas).
fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let meet = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in 1..n {
        let mut s = meet(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = meet(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    let mut k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *dq = (q as f64 - p as f64).powi(2) + f[p];
    }
    d
}
