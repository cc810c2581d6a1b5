use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::mask_components;
use crate::error::{Error, Result};
use crate::nodal::{ScalarField2D, EPS_NUMERICAL};

const NONE: u32 = u32::MAX;

/// Residual bound `‖Au − λu‖/‖u‖` for accepted eigenpairs.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const MAX_COUNT: usize = 12;
const MAX_ITERATIONS: usize = 1000;
const EXTRA_VECTORS: usize = 8;
const START_SEED: u64 = 0x5eed;

/// Five-point Dirichlet Laplacian on the active points of a mask.
///
/// Stored as `S = h²·(−Δ_h)` (diagonal 4, off-diagonal −1) so the
/// factorization sees O(1) entries; eigenvalues are rescaled on output.
pub struct DiscreteOperator {
    pub h: f64,
    mask: ScalarField2D,
    /// Grid index of each unknown.
    cells: Vec<usize>,
    /// Unknown index of each of the four neighbours (`NONE` for Dirichlet).
    neighbours: Vec<[u32; 4]>,
    /// Whether every boundary lies on grid lines (no staircase).
    pub aligned: bool,
}

impl std::fmt::Debug for DiscreteOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteOperator").field("h", &self.h).field("dim", &self.dim()).finish()
    }
}

impl DiscreteOperator {
    /// Operator on the active points of `mask`; the active set must be
    /// 4-connected.
    pub fn new(mask: &ScalarField2D, aligned: bool) -> Result<Self> {
        let components = mask_components(mask);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        let (nx, ny) = (mask.nx, mask.ny);
        let mut row = vec![NONE; nx * ny];
        let mut cells = Vec::new();
        for (k, &a) in mask.mask().iter().enumerate() {
            if a {
                row[k] = cells.len() as u32;
                cells.push(k);
            }
        }
        let neighbours = cells
            .iter()
            .map(|&k| {
                let (i, j) = (k % nx, k / nx);
                let at = |ok: bool, idx: usize| if ok { row[idx] } else { NONE };
                [at(i + 1 < nx, k + 1), at(i > 0, k.wrapping_sub(1)), at(j + 1 < ny, k + nx), at(j > 0, k.wrapping_sub(nx))]
            })
            .collect();
        Ok(DiscreteOperator { h: mask.h, mask: mask.clone(), cells, neighbours, aligned })
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn mask(&self) -> &ScalarField2D {
        &self.mask
    }

    /// `y = S x` in scaled units.
    fn apply_scaled(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().zip(self.neighbours.par_iter()).enumerate().for_each(|(r, (out, nb))| {
            let mut acc = 4.0 * x[r];
            for &c in nb {
                if c != NONE {
                    acc -= x[c as usize];
                }
            }
            *out = acc;
        });
    }

    /// `y = −Δ_h x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply_scaled(x, &mut y);
        let s = 1.0 / (self.h * self.h);
        y.iter_mut().for_each(|v| *v *= s);
        y
    }

    /// Entry `(r, c)` of `−Δ_h`.
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        let s = 1.0 / (self.h * self.h);
        if r == c {
            4.0 * s
        } else if self.neighbours[r].contains(&(c as u32)) {
            -s
        } else {
            0.0
        }
    }

    /// Relative error estimate used to separate neighbouring eigenvalues:
    /// the leading stencil truncation term `λh²/12`.
    ///
    /// The first-order staircase shift is not included; it moves
    /// neighbouring eigenvalues together and would merge well-separated
    /// pairs (the annulus λ₁, λ₂ at 5% apart) into one cluster.
    pub fn relative_error_estimate(&self, lambda: f64) -> f64 {
        lambda * self.h * self.h / 12.0
    }

    /// Grid field holding `v` on the active points.
    pub fn to_field(&self, v: &[f64]) -> ScalarField2D {
        let mut values = vec![0.0; self.mask.nx * self.mask.ny];
        for (&k, &x) in self.cells.iter().zip(v) {
            values[k] = x;
        }
        ScalarField2D::new(self.mask.origin, self.h, self.mask.nx, self.mask.ny, values, self.mask.mask().to_vec())
            .expect("mask geometry is valid")
            .with_zero_band(EPS_NUMERICAL)
    }

    fn factor(&self) -> Result<faer::sparse::linalg::solvers::Llt<usize, f64>> {
        let n = self.dim();
        let mut triplets = Vec::with_capacity(3 * n);
        for (r, nb) in self.neighbours.iter().enumerate() {
            triplets.push(Triplet::new(r, r, 4.0));
            for &c in nb {
                if c != NONE && (c as usize) > r {
                    triplets.push(Triplet::new(c as usize, r, -1.0));
                }
            }
        }
        let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::NoConvergence(format!("sparse assembly failed: {e:?}")))?;
        matrix.sp_cholesky(Side::Lower).map_err(|e| Error::NoConvergence(format!("Cholesky factorization failed: {e:?}")))
    }
}

/// One discrete eigenpair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair2D {
    /// 1-based index in the ordered spectrum.
    pub index: usize,
    pub eigenvalue: f64,
    pub field: ScalarField2D,
    /// `‖Au − λu‖/‖u‖`.
    pub residual: f64,
    pub gap_below: Option<f64>,
    pub gap_above: f64,
    /// Index range (1-based, inclusive) of the cluster holding this pair.
    pub cluster: (usize, usize),
}

impl EigenPair2D {
    pub fn is_simple(&self) -> bool {
        self.cluster.0 == self.cluster.1
    }
}

/// Smallest eigenpairs of a [`DiscreteOperator`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair2D>,
    pub iterations: usize,
    pub h: f64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.eigenvalue).collect()
    }

    /// Pairs in the cluster holding the 1-based `index`.
    pub fn cluster_of(&self, index: usize) -> &[EigenPair2D] {
        let (a, b) = self.pairs[index - 1].cluster;
        &self.pairs[a - 1..b]
    }
}

fn orthonormalize(x: &mut Mat<f64>) {
    // two passes of modified Gram–Schmidt
    let p = x.ncols();
    for _ in 0..2 {
        for j in 0..p {
            for k in 0..j {
                let d: f64 = x.col_as_slice(k).iter().zip(x.col_as_slice(j)).map(|(a, b)| a * b).sum();
                let (left, mut right) = x.as_mut().split_at_col_mut(j);
                let src = left.col(k);
                for (r, v) in right.as_mut().col_mut(0).iter_mut().enumerate() {
                    *v -= d * src[r];
                }
            }
            let norm = x.col_as_slice(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            x.col_as_slice_mut(j).iter_mut().for_each(|v| *v /= norm);
        }
    }
}

/// The `count` smallest eigenpairs by block inverse subspace iteration with
/// Rayleigh–Ritz projection.
///
/// Start vectors come from a fixed seed, so repeated runs agree. Pairs whose
/// relative gap falls below ten times the operator's error estimate are
/// grouped into clusters.
pub fn eigen_smallest(op: &DiscreteOperator, count: usize) -> Result<Spectrum> {
    let out = subspace_iteration(op, count);
    clear_upper_simd();
    out
}

/// faer's wide SIMD kernels may return with the upper AVX state dirty, after
/// which every legacy-SSE instruction (libm's `sin`, say) pays a transition
/// penalty — an order-of-magnitude slowdown for unrelated code.
fn clear_upper_simd() {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx") {
        #[target_feature(enable = "avx")]
        unsafe fn zeroupper() {
            std::arch::x86_64::_mm256_zeroupper()
        }
        // SAFETY: AVX support was detected above.
        unsafe { zeroupper() }
    }
}

fn subspace_iteration(op: &DiscreteOperator, count: usize) -> Result<Spectrum> {
    let n = op.dim();
    if count == 0 || count > MAX_COUNT {
        return Err(Error::Precondition(format!("count must be in 1..={MAX_COUNT}, got {count}")));
    }
    if n < 10 * count {
        return Err(Error::Precondition(format!("operator dimension {n} is below 10·count = {}", 10 * count)));
    }
    // one extra pair so the last requested gap is known
    let want = count + 1;
    let p = (want + EXTRA_VECTORS).min(n);
    let llt = op.factor()?;
    let scale = 1.0 / (op.h * op.h);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x = Mat::<f64>::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
    let mut sx = Mat::<f64>::zeros(n, p);
    let mut theta = vec![0.0; p];
    let mut residuals = vec![f64::INFINITY; p];
    for iteration in 1..=MAX_ITERATIONS {
        llt.solve_in_place(x.as_mut());
        orthonormalize(&mut x);
        for j in 0..p {
            let (src, dst) = (x.col_as_slice(j), sx.col_as_slice_mut(j));
            op.apply_scaled(src, dst);
        }
        let mut hmat = Mat::<f64>::from_fn(p, p, |a, b| {
            x.col_as_slice(a).iter().zip(sx.col_as_slice(b)).map(|(u, v)| u * v).sum()
        });
        hmat = Mat::from_fn(p, p, |a, b| 0.5 * (hmat[(a, b)] + hmat[(b, a)]));
        let evd = hmat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::NoConvergence(format!("Ritz eigen-decomposition failed: {e:?}")))?;
        let v = evd.U().to_owned();
        x = &x * &v;
        sx = &sx * &v;
        for j in 0..p {
            theta[j] = evd.S()[j];
            let r: f64 = x
                .col_as_slice(j)
                .iter()
                .zip(sx.col_as_slice(j))
                .map(|(a, b)| (b - theta[j] * a).powi(2))
                .sum::<f64>()
                .sqrt();
            residuals[j] = r * scale;
        }
        if residuals[..want].iter().all(|&r| r <= RESIDUAL_TOLERANCE) {
            return Ok(assemble(op, &x, &theta, &residuals, count, iteration));
        }
    }
    Err(Error::NoConvergence(format!(
        "subspace iteration stopped after {MAX_ITERATIONS} sweeps; residuals {:?}",
        &residuals[..want]
    )))
}

fn assemble(op: &DiscreteOperator, x: &Mat<f64>, theta: &[f64], residuals: &[f64], count: usize, iterations: usize) -> Spectrum {
    let scale = 1.0 / (op.h * op.h);
    let lambda: Vec<f64> = theta.iter().map(|t| t * scale).collect();
    // cluster boundaries over the requested pairs plus the extra one
    let mut start = vec![0usize; count + 1];
    for i in 1..=count {
        let rel = (lambda[i] - lambda[i - 1]) / lambda[i - 1];
        start[i] = if rel < 10.0 * op.relative_error_estimate(lambda[i - 1]) { start[i - 1] } else { i };
    }
    let mut end = vec![count; count + 1];
    for i in (0..count).rev() {
        end[i] = if start[i + 1] == start[i] { end[i + 1] } else { i };
    }
    let norm = op.h;
    let pairs = (0..count)
        .map(|i| {
            let mut v: Vec<f64> = x.col_as_slice(i).to_vec();
            // deterministic sign: largest entry positive
            let pivot = v.iter().copied().fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
            let s = pivot.signum() / norm;
            v.iter_mut().for_each(|a| *a *= s);
            EigenPair2D {
                index: i + 1,
                eigenvalue: lambda[i],
                field: op.to_field(&v),
                residual: residuals[i],
                gap_below: (i > 0).then(|| lambda[i] - lambda[i - 1]),
                gap_above: lambda[i + 1] - lambda[i],
                cluster: (start[i] + 1, end[i].min(count - 1) + 1),
            }
        })
        .collect();
    Spectrum { pairs, iterations, h: op.h }
}

#[cfg(test)]
mod tests {
    use super::super::domain::{build_mask, DomainSpec};
    use super::*;
    use std::f64::consts::PI;

    fn spectrum(spec: &DomainSpec, h: f64, count: usize) -> Spectrum {
        let mask = build_mask(spec, h).unwrap();
        let op = DiscreteOperator::new(&mask, spec.boundary_aligned(h)).unwrap();
        eigen_smallest(&op, count).unwrap()
    }

    #[test]
    fn operator_is_symmetric_and_dominant() {
        let mask = build_mask(&DomainSpec::Disc { radius: 1.0 }, 0.1).unwrap();
        let op = DiscreteOperator::new(&mask, false).unwrap();
        for r in 0..op.dim() {
            let off: f64 = (0..op.dim()).filter(|&c| c != r).map(|c| op.entry(r, c).abs()).sum();
            assert!(op.entry(r, r) >= off);
            for c in 0..op.dim() {
                assert_eq!(op.entry(r, c), op.entry(c, r));
            }
        }
    }

    #[test]
    fn square_spectrum_is_discrete_sum_of_squares() {
        // exact discrete eigenvalues (4/h²)(sin²(mh/2) + sin²(nh/2))
        let h = PI / 40.0;
        let s = spectrum(&DomainSpec::Rect { a: PI, b: PI }, h, 6);
        let d = |m: f64| 4.0 / (h * h) * (m * h / 2.0).sin().powi(2);
        let exact = [d(1.0) * 2.0, d(1.0) + d(2.0), d(1.0) + d(2.0), 2.0 * d(2.0), d(1.0) + d(3.0), d(1.0) + d(3.0)];
        for (p, e) in s.pairs.iter().zip(exact) {
            assert!((p.eigenvalue - e).abs() < 1e-9 * e, "{} vs {e}", p.eigenvalue);
            assert!(p.residual <= RESIDUAL_TOLERANCE);
        }
        assert_eq!(s.pairs[1].cluster, (2, 3));
        assert!(s.pairs[0].is_simple() && s.pairs[3].is_simple());
        assert_eq!(s.pairs[5].cluster, (5, 6));
    }

    #[test]
    fn residuals_verified_independently() {
        let mask = build_mask(&DomainSpec::Disc { radius: 1.0 }, 1.0 / 24.0).unwrap();
        let op = DiscreteOperator::new(&mask, false).unwrap();
        let s = eigen_smallest(&op, 3).unwrap();
        for p in &s.pairs {
            let v: Vec<f64> = (0..mask.ny)
                .flat_map(|j| (0..mask.nx).map(move |i| (i, j)))
                .filter(|&(i, j)| mask.active(i, j))
                .map(|(i, j)| p.field.value(i, j))
                .collect();
            let av = op.apply(&v);
            let num: f64 = av.iter().zip(&v).map(|(a, b)| (a - p.eigenvalue * b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
            assert!(num / den <= RESIDUAL_TOLERANCE, "residual {}", num / den);
        }
        assert!(s.pairs.windows(2).all(|w| w[0].eigenvalue <= w[1].eigenvalue));
    }

    #[test]
    fn deterministic_across_runs() {
        let spec = DomainSpec::Disc { radius: 1.0 };
        let a = spectrum(&spec, 1.0 / 32.0, 4).eigenvalues();
        let b = spectrum(&spec, 1.0 / 32.0, 4).eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10 * x);
        }
    }

    #[test]
    fn preconditions() {
        let mask = build_mask(&DomainSpec::Disc { radius: 1.0 }, 0.25).unwrap();
        let op = DiscreteOperator::new(&mask, false).unwrap();
        assert!(matches!(eigen_smallest(&op, 13), Err(Error::Precondition(_))));
        assert!(matches!(eigen_smallest(&op, 5), Err(Error::Precondition(_))));
    }
}
