//! Wigner function evaluation on rectangular phase-space grids.
//!
//! Convention: `W(α) = (2/π) Tr[ρ D(α) P D†(α)]` with the photon-number
//! parity `P`, normalized so that `∫ W(α) d²α = 1` with `d²α = dRe dIm`.
//! Position and momentum marginals use `x = √2 Re α`, `p = √2 Im α`.
//!
//! Displacements along a grid axis commute, so the grid is evaluated by
//! stepping `D(δ)` along each axis and pairing the two axes with a trace:
//! `W(x + iy) = (2/π) Tr[(D(x)† ρ D(x)) (D(iy) P D(iy)†)]`. The state is
//! embedded into a larger working space first so that every requested grid
//! point stays truncation-safe.

use ndarray::prelude::*;
use rayon::prelude::*;

use crate::fock::{DensityMatrix, FockSpace};
use crate::linalg::dagger;
use crate::{C64, Error, Result};

/// Hard cap on the internal embedding dimension.
const MAX_EMBED_DIM: usize = 3000;

/// Sampled Wigner function on a rectangular grid.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[(j, k)] = W(re_axis[j] + i im_axis[k])`
    pub values: Array2<f64>,
}

impl WignerField {
    /// Trapezoid-rule integral over the sampled rectangle.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.re_axis);
        let wy = trapezoid_weights(&self.im_axis);
        let mut total = 0.0;
        for (j, &wj) in wx.iter().enumerate() {
            for (k, &wk) in wy.iter().enumerate() {
                total += wj * wk * self.values[(j, k)];
            }
        }
        total
    }

    /// Position marginal `P(x)` with `x = √2 Re α`, integrated over `Im α`.
    pub fn position_marginal(&self) -> (Vec<f64>, Vec<f64>) {
        let wy = trapezoid_weights(&self.im_axis);
        let xs: Vec<f64> = self.re_axis.iter().map(|r| r * std::f64::consts::SQRT_2).collect();
        let ps: Vec<f64> = (0..self.re_axis.len())
            .map(|j| {
                let row: f64 = wy
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| w * self.values[(j, k)])
                    .sum();
                row / std::f64::consts::SQRT_2
            })
            .collect();
        (xs, ps)
    }

    /// Location and value of the global grid maximum.
    pub fn argmax(&self) -> (C64, f64) {
        let mut best = (C64::from(0.0), f64::NEG_INFINITY);
        for (j, &re) in self.re_axis.iter().enumerate() {
            for (k, &im) in self.im_axis.iter().enumerate() {
                if self.values[(j, k)] > best.1 {
                    best = (C64::new(re, im), self.values[(j, k)]);
                }
            }
        }
        best
    }

    /// Grid points that strictly dominate their 8 neighbours.
    pub fn local_maxima(&self) -> Vec<(C64, f64)> {
        let (nx, ny) = self.values.dim();
        let mut out = Vec::new();
        for j in 1..nx - 1 {
            for k in 1..ny - 1 {
                let v = self.values[(j, k)];
                let mut is_max = true;
                for dj in -1i64..=1 {
                    for dk in -1i64..=1 {
                        if dj == 0 && dk == 0 {
                            continue;
                        }
                        if self.values[((j as i64 + dj) as usize, (k as i64 + dk) as usize)] >= v {
                            is_max = false;
                        }
                    }
                }
                if is_max {
                    out.push((C64::new(self.re_axis[j], self.im_axis[k]), v));
                }
            }
        }
        out
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    assert!(n >= 2, "axis needs at least two points");
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = axis[i + 1] - axis[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Uniformly spaced axis, inclusive of both endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
        .collect()
}

/// Smallest occupation capturing all but `1e-10` of the state's population.
fn effective_support(rho: &DensityMatrix) -> usize {
    let dim = rho.dim();
    let mut acc = 0.0;
    let total: f64 = rho.entries.diag().iter().map(|z| z.re).sum();
    for n in 0..dim {
        acc += rho.entries[(n, n)].re;
        if total - acc < 1e-10 {
            return n + 1;
        }
    }
    dim
}

fn embedding_dim(rho: &DensityMatrix, amax_sq: f64) -> Result<usize> {
    let n_eff = effective_support(rho) as f64;
    let sigma = (amax_sq * (2.0 * n_eff + 1.0) + n_eff + 1.0).sqrt();
    let need = (n_eff + amax_sq + 5.0 * sigma + 12.0).ceil() as usize;
    let dim_w = need.max(rho.dim());
    if dim_w > MAX_EMBED_DIM {
        return Err(Error::Truncation(format!(
            "grid reaches |alpha|^2 = {amax_sq:.1}, needs embedding dim {dim_w} > {MAX_EMBED_DIM}"
        )));
    }
    Ok(dim_w)
}

/// Evaluate the Wigner function of `rho` on the outer product of the two
/// axes. Fails with a truncation error when a grid point is too far out for
/// any reasonable embedding.
pub fn wigner(rho: &DensityMatrix, re_axis: &[f64], im_axis: &[f64]) -> Result<WignerField> {
    let amax_sq = re_axis
        .iter()
        .map(|r| r * r)
        .fold(0.0f64, f64::max)
        + im_axis.iter().map(|i| i * i).fold(0.0f64, f64::max);
    let dim_w = embedding_dim(rho, amax_sq)?;
    let space = FockSpace::new(dim_w.max(4));
    let dim0 = rho.dim();

    let mut rho_w = Array2::<C64>::zeros((dim_w, dim_w));
    rho_w.slice_mut(s![..dim0, ..dim0]).assign(&rho.entries);

    // B_j = D(x_j)† ρ D(x_j), stepped along the real axis.
    let bs = axis_sandwich(&space, &rho_w, re_axis, AxisKind::Real)?;
    // Q_k = D(i y_k) P D(i y_k)†, stepped along the imaginary axis.
    let parity = space.parity().into_matrix();
    let qs = axis_sandwich_forward(&space, &parity, im_axis, AxisKind::Imag)?;

    let nx = re_axis.len();
    let ny = im_axis.len();
    let mut values = Array2::<f64>::zeros((nx, ny));
    let rows: Vec<Vec<f64>> = bs
        .par_iter()
        .map(|b| {
            (0..ny)
                .map(|k| {
                    let q = &qs[k];
                    let mut tr = C64::from(0.0);
                    for m in 0..dim_w {
                        for n in 0..dim_w {
                            tr += b[(m, n)] * q[(n, m)];
                        }
                    }
                    (2.0 / std::f64::consts::PI) * tr.re
                })
                .collect()
        })
        .collect();
    for (j, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            values[(j, k)] = v;
        }
    }
    Ok(WignerField {
        re_axis: re_axis.to_vec(),
        im_axis: im_axis.to_vec(),
        values,
    })
}

enum AxisKind {
    Real,
    Imag,
}

fn axis_alpha(kind: &AxisKind, v: f64) -> C64 {
    match kind {
        AxisKind::Real => C64::new(v, 0.0),
        AxisKind::Imag => C64::new(0.0, v),
    }
}

/// M_j = D(axis_j)† M D(axis_j) for every axis value.
fn axis_sandwich(
    space: &FockSpace,
    m: &Array2<C64>,
    axis: &[f64],
    kind: AxisKind,
) -> Result<Vec<Array2<C64>>> {
    sandwich_impl(space, m, axis, kind, true)
}

/// M_k = D(axis_k) M D(axis_k)† for every axis value.
fn axis_sandwich_forward(
    space: &FockSpace,
    m: &Array2<C64>,
    axis: &[f64],
    kind: AxisKind,
) -> Result<Vec<Array2<C64>>> {
    sandwich_impl(space, m, axis, kind, false)
}

fn sandwich_impl(
    space: &FockSpace,
    m: &Array2<C64>,
    axis: &[f64],
    kind: AxisKind,
    adjoint_left: bool,
) -> Result<Vec<Array2<C64>>> {
    if axis.len() < 2 {
        return Err(Error::Quadrature("axis needs at least two points".into()));
    }
    let step = axis[1] - axis[0];
    for w in axis.windows(2) {
        if (w[1] - w[0] - step).abs() > 1e-9 * step.abs().max(1e-12) {
            return Err(Error::Quadrature("grid axes must be uniformly spaced".into()));
        }
    }
    let d0 = space.displacement_unchecked(axis_alpha(&kind, axis[0]));
    let dstep = space.displacement_unchecked(axis_alpha(&kind, step));
    let (d0, dstep) = (d0.into_matrix(), dstep.into_matrix());
    let sandwich = |u: &Array2<C64>, x: &Array2<C64>| -> Array2<C64> {
        if adjoint_left {
            dagger(u).dot(x).dot(u)
        } else {
            u.dot(x).dot(&dagger(u))
        }
    };
    let mut out = Vec::with_capacity(axis.len());
    out.push(sandwich(&d0, m));
    for j in 1..axis.len() {
        let prev = &out[j - 1];
        out.push(sandwich(&dstep, prev));
    }
    Ok(out)
}
