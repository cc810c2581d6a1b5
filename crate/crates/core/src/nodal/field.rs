use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Zero-band fraction for closed-form fields.
pub const EPS_CLOSED_FORM: f64 = 1e-12;
/// Zero-band fraction for fields produced by quadrature or an eigen-solver.
pub const EPS_NUMERICAL: f64 = 1e-9;

/// Samples on a uniform grid with spacing `h` in both directions.
///
/// Sample `(i, j)` sits at `origin + h·(i, j)`; each sample carries an
/// activity flag (domain membership). Inactive samples have no value
/// semantics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarField2D {
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
    /// Samples with `|value| ≤ zero_band · max|value|` count as zero.
    pub zero_band: f64,
}

impl ScalarField2D {
    pub fn new(origin: [f64; 2], h: f64, nx: usize, ny: usize, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return domain("field needs at least 2×2 samples");
        }
        if !(h > 0.0) || !h.is_finite() {
            return domain("grid spacing must be positive");
        }
        if values.len() != nx * ny || mask.len() != nx * ny {
            return domain(format!("expected {} samples and mask flags", nx * ny));
        }
        Ok(ScalarField2D { origin, h, nx, ny, values, mask, zero_band: EPS_CLOSED_FORM })
    }

    /// Sample `f` on every grid point, all active.
    pub fn from_fn(origin: [f64; 2], h: f64, nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::from_fn_masked(origin, h, nx, ny, f, |_, _| true)
    }

    /// Sample `f` where `inside` holds; other points are inactive.
    pub fn from_fn_masked(
        origin: [f64; 2],
        h: f64,
        nx: usize,
        ny: usize,
        f: impl Fn(f64, f64) -> f64,
        inside: impl Fn(f64, f64) -> bool,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        let mut mask = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = (origin[0] + i as f64 * h, origin[1] + j as f64 * h);
                let active = inside(x, y);
                mask.push(active);
                values.push(if active { f(x, y) } else { 0.0 });
            }
        }
        Self::new(origin, h, nx, ny, values, mask)
    }

    pub fn with_zero_band(mut self, eps0: f64) -> Self {
        self.zero_band = eps0;
        self
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    #[inline]
    pub fn active(&self, i: usize, j: usize) -> bool {
        self.mask[self.index(i, j)]
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn active_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest magnitude over active samples.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.mask).filter(|(_, &m)| m).fold(0.0, |acc, (v, _)| acc.max(v.abs()))
    }

    /// Absolute zero-band threshold.
    pub fn threshold(&self) -> f64 {
        self.zero_band * self.max_abs()
    }

    /// `+1`, `−1`, or `0` for zero-band and inactive samples.
    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.sign_with(i, j, self.threshold())
    }

    #[inline]
    pub(crate) fn sign_with(&self, i: usize, j: usize, threshold: f64) -> i8 {
        let k = self.index(i, j);
        if !self.mask[k] {
            return 0;
        }
        let v = self.values[k];
        if v.abs() <= threshold {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Same grid and mask, values transformed pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().zip(&self.mask).for_each(|(v, &m)| *v = if m { f(*v) } else { 0.0 });
        out
    }

    /// Pointwise linear combination `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.nx != other.nx || self.ny != other.ny || self.h != other.h || self.origin != other.origin {
            return domain("fields live on different grids");
        }
        let mut out = self.clone();
        for k in 0..out.values.len() {
            out.mask[k] = self.mask[k] && other.mask[k];
            out.values[k] = if out.mask[k] { a * self.values[k] + b * other.values[k] } else { 0.0 };
        }
        Ok(out)
    }

    /// Write `x,y,value` rows for active samples.
    pub fn write_csv(&self, w: &mut impl std::io::Write, column: &str) -> std::io::Result<()> {
        writeln!(w, "x,y,{column}")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.active(i, j) {
                    let [x, y] = self.point(i, j);
                    writeln!(w, "{x:.16e},{y:.16e},{:.16e}", self.value(i, j))?;
                }
            }
        }
        Ok(())
    }

    /// Plain-text PGM raster of the mask (`255` active, `0` inactive), top row first.
    pub fn mask_pgm(&self) -> String {
        let mut s = format!("P2\n{} {}\n255\n", self.nx, self.ny);
        for j in (0..self.ny).rev() {
            let row: Vec<&str> = (0..self.nx).map(|i| if self.active(i, j) { "255" } else { "0" }).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}
