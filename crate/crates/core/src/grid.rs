//! MAC (staggered) layout on a rectangle.
//!
//! * u-faces: `(nx + 1) x ny`, x-velocity at `(i hx, (j + 1/2) hy)`
//! * v-faces: `nx x (ny + 1)`, y-velocity at `((i + 1/2) hx, j hy)`
//! * cells:   `nx x ny`, pressure and concentration at `((i + 1/2) hx, (j + 1/2) hy)`
//!
//! All arrays are row-major with `i` (the x index) fastest.

use crate::config::SimConfig;
use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub hx: f64,
    pub hy: f64,
}

impl StaggeredGrid {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self, ConfigError> {
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(ConfigError::constraint(format!(
                "domain extents must be positive, got ({lx}, {ly})"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(ConfigError::constraint(format!(
                "resolution must be positive, got ({nx}, {ny})"
            )));
        }
        Ok(StaggeredGrid {
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    /// Unit square with `n x n` cells.
    pub fn unit_square(n: usize) -> Self {
        Self::new(1.0, 1.0, n, n).expect("positive resolution")
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn u_count(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    #[inline]
    pub fn v_count(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn u_face(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn v_face(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_measure(&self) -> f64 {
        self.hx * self.hy
    }

    /// `|Omega| = Lx Ly`.
    pub fn measure(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    pub fn u_position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, (j as f64 + 0.5) * self.hy)
    }

    pub fn v_position(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, j as f64 * self.hy)
    }

    pub fn is_u_boundary(&self, i: usize) -> bool {
        i == 0 || i == self.nx
    }

    pub fn is_v_boundary(&self, j: usize) -> bool {
        j == 0 || j == self.ny
    }

    /// Quadrature weight of u-face `(i, j)`: half a cell on the walls.
    pub fn u_face_measure(&self, i: usize) -> f64 {
        if self.is_u_boundary(i) {
            0.5 * self.cell_measure()
        } else {
            self.cell_measure()
        }
    }

    pub fn v_face_measure(&self, j: usize) -> f64 {
        if self.is_v_boundary(j) {
            0.5 * self.cell_measure()
        } else {
            self.cell_measure()
        }
    }

    /// Evaluates `f` at every cell center.
    pub fn sample_cells(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cell_count());
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.cell_center(i, j);
                out.push(f(x, y));
            }
        }
        out
    }

    /// Discrete divergence of a face velocity at every cell.
    pub fn divergence(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut div = vec![0.0; self.cell_count()];
        for j in 0..self.ny {
            for i in 0..self.nx {
                div[self.cell(i, j)] = (u[self.u_face(i + 1, j)] - u[self.u_face(i, j)]) / self.hx
                    + (v[self.v_face(i, j + 1)] - v[self.v_face(i, j)]) / self.hy;
            }
        }
        div
    }

    pub fn max_divergence(&self, u: &[f64], v: &[f64]) -> f64 {
        self.divergence(u, v)
            .iter()
            .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Builds the grid described by `config`.
pub fn build_grid(config: &SimConfig) -> Result<StaggeredGrid, ConfigError> {
    let (lx, ly) = config.domain_extent;
    let (nx, ny) = config.resolution;
    StaggeredGrid::new(lx, ly, nx, ny)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_domain() {
        let g = StaggeredGrid::new(400.0, 200.0, 100, 50).unwrap();
        assert_eq!((g.hx, g.hy), (4.0, 4.0));
        assert_eq!(g.measure(), 80000.0);
        assert_eq!(build_grid(&SimConfig::reference()).unwrap(), g);
    }

    #[test]
    fn unit_square_two_by_two() {
        let g = StaggeredGrid::new(1.0, 1.0, 2, 2).unwrap();
        assert_eq!((g.hx, g.hy), (0.5, 0.5));
        assert_eq!(g.measure(), 1.0);
        assert_eq!((g.u_count(), g.v_count(), g.cell_count()), (6, 6, 4));
    }

    #[test]
    fn rejects_zero_resolution_and_bad_extent() {
        assert!(StaggeredGrid::new(1.0, 1.0, 0, 2).is_err());
        assert!(StaggeredGrid::new(-1.0, 1.0, 2, 2).is_err());
        assert!(StaggeredGrid::new(1.0, 0.0, 2, 2).is_err());
    }

    #[test]
    fn cell_measures_sum_to_domain() {
        for &(lx, ly, nx, ny) in &[
            (400.0, 200.0, 100, 50),
            (1.0, 1.0, 3, 7),
            (0.3, 2.5, 13, 11),
        ] {
            let g = StaggeredGrid::new(lx, ly, nx, ny).unwrap();
            let total: f64 = (0..g.cell_count()).map(|_| g.cell_measure()).sum();
            approx::assert_relative_eq!(total, g.measure(), max_relative = 1e-14);
            let u_total: f64 = (0..=nx).map(|i| g.u_face_measure(i) * ny as f64).sum();
            approx::assert_relative_eq!(u_total, g.measure(), max_relative = 1e-14);
        }
    }

    #[test]
    fn divergence_of_linear_field() {
        let g = StaggeredGrid::new(2.0, 1.0, 4, 3).unwrap();
        let mut u = vec![0.0; g.u_count()];
        let mut v = vec![0.0; g.v_count()];
        for j in 0..g.ny {
            for i in 0..=g.nx {
                u[g.u_face(i, j)] = 3.0 * g.u_position(i, j).0;
            }
        }
        for j in 0..=g.ny {
            for i in 0..g.nx {
                v[g.v_face(i, j)] = -g.v_position(i, j).1;
            }
        }
        for d in g.divergence(&u, &v) {
            approx::assert_abs_diff_eq!(d, 2.0, epsilon = 1e-12);
        }
    }
}
