//! Vectorized Liouvillian machinery.
//!
//! With row-major flattening `v[i·dim + j] = ρ_ij`, the Lindblad generator
//! `L[ρ] = -i[H, ρ] + Σ κ (c ρ c† - ½{c†c, ρ})` conserves the charge
//! `(i - j) mod 3` whenever every operator shifts the Z3 sector by a fixed
//! amount (the Hamiltonian by 0, each jump by some `s_c`). The generator
//! then decomposes into three independent dense blocks of size `dim²/3`,
//! which is what makes steady states and long-horizon propagation cheap.

use ndarray::prelude::*;
use ndarray_linalg::{Solve, SVD};

use crate::fock::DensityMatrix;
use crate::linalg::{expm, hermitize};
use crate::{C64, Error, Result};

/// Sector shift of an operator: `s` such that all support lies on
/// `(row - col) mod 3 = s`. `None` if the support mixes shifts.
pub fn sector_shift(op: &Array2<C64>) -> Option<u8> {
    let dim = op.nrows();
    let mut shift: Option<u8> = None;
    for i in 0..dim {
        for j in 0..dim {
            if op[(i, j)] != C64::from(0.0) {
                let s = ((i + 3 * dim) as i64 - j as i64).rem_euclid(3) as u8;
                match shift {
                    None => shift = Some(s),
                    Some(prev) if prev != s => return None,
                    _ => {}
                }
            }
        }
    }
    shift.or(Some(0))
}

/// Index maps between flattened matrix entries and charge blocks.
pub struct ChargeLayout {
    pub dim: usize,
    /// flat indices (i·dim + j) belonging to each charge, i-major order
    pub indices: [Vec<usize>; 3],
    /// flat index -> (charge, position within block)
    pub position: Vec<(u8, usize)>,
}

impl ChargeLayout {
    pub fn new(dim: usize) -> Self {
        let mut indices: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut position = vec![(0u8, 0usize); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let c = ((i as i64 - j as i64).rem_euclid(3)) as usize;
                position[i * dim + j] = (c as u8, indices[c].len());
                indices[c].push(i * dim + j);
            }
        }
        ChargeLayout { dim, indices, position }
    }

    /// Scatter a density matrix into its three charge components.
    pub fn split(&self, rho: &Array2<C64>) -> [Array1<C64>; 3] {
        let flat = rho.as_slice().expect("contiguous");
        [0, 1, 2].map(|c| {
            Array1::from_iter(self.indices[c].iter().map(|&ix| flat[ix]))
        })
    }

    /// Reassemble a density matrix from charge components.
    pub fn assemble(&self, parts: &[Array1<C64>; 3]) -> Array2<C64> {
        let dim = self.dim;
        let mut rho = Array2::<C64>::zeros((dim, dim));
        {
            let flat = rho.as_slice_mut().expect("contiguous");
            for c in 0..3 {
                for (pos, &ix) in self.indices[c].iter().enumerate() {
                    flat[ix] = parts[c][pos];
                }
            }
        }
        rho
    }
}

/// The three dense charge blocks of a Lindblad generator.
pub struct BlockedLiouvillian {
    pub layout: ChargeLayout,
    pub blocks: [Array2<C64>; 3],
}

/// Build the charge-blocked generator. Fails with a structure error if any
/// operator mixes sector shifts (no charge conservation to exploit).
pub fn blocked_liouvillian(
    h: &Array2<C64>,
    jumps: &[(Array2<C64>, f64)],
) -> Result<BlockedLiouvillian> {
    let dim = h.nrows();
    if sector_shift(h) != Some(0) {
        return Err(Error::Structure { row: 0, col: 0 });
    }
    for (c, _) in jumps {
        if sector_shift(c).is_none() {
            return Err(Error::Structure { row: 0, col: 0 });
        }
    }
    let layout = ChargeLayout::new(dim);
    let mut blocks = [
        Array2::<C64>::zeros((layout.indices[0].len(), layout.indices[0].len())),
        Array2::<C64>::zeros((layout.indices[1].len(), layout.indices[1].len())),
        Array2::<C64>::zeros((layout.indices[2].len(), layout.indices[2].len())),
    ];
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    let mut add = |row_flat: usize, col_flat: usize, val: C64, layout: &ChargeLayout| {
        let (cr, pr) = layout.position[row_flat];
        let (cc, pc) = layout.position[col_flat];
        debug_assert_eq!(cr, cc, "charge-violating coupling");
        blocks[cr as usize][(pr, pc)] += val;
    };
    // -i H ρ  and  +i ρ H
    for kk in 0..dim {
        for ii in 0..dim {
            let hv = h[(kk, ii)];
            if hv == C64::from(0.0) {
                continue;
            }
            for l in 0..dim {
                add(kk * dim + l, ii * dim + l, minus_i * hv, &layout);
                // ρH term with H_{jl}: here reuse (kk, ii) as (j, l)
            }
        }
    }
    for jj in 0..dim {
        for l in 0..dim {
            let hv = h[(jj, l)];
            if hv == C64::from(0.0) {
                continue;
            }
            for kk in 0..dim {
                add(kk * dim + l, kk * dim + jj, plus_i * hv, &layout);
            }
        }
    }
    for (c, rate) in jumps {
        if *rate == 0.0 {
            continue;
        }
        let r = C64::from(*rate);
        // κ c ρ c†: c_{ki} conj(c_{lj}) couples (k,l) <- (i,j)
        let mut nz: Vec<(usize, usize, C64)> = Vec::new();
        for k in 0..dim {
            for i in 0..dim {
                if c[(k, i)] != C64::from(0.0) {
                    nz.push((k, i, c[(k, i)]));
                }
            }
        }
        for &(k, i, cki) in &nz {
            for &(l, j, clj) in &nz {
                add(k * dim + l, i * dim + j, r * cki * clj.conj(), &layout);
            }
        }
        // -κ/2 {c†c, ρ}
        let m = c.t().mapv(|z| z.conj()).dot(c);
        for k in 0..dim {
            for i in 0..dim {
                let mv = m[(k, i)];
                if mv == C64::from(0.0) {
                    continue;
                }
                for l in 0..dim {
                    add(k * dim + l, i * dim + l, -0.5 * r * mv, &layout);
                    add(l * dim + i, l * dim + k, -0.5 * r * mv.conj(), &layout);
                }
            }
        }
    }
    Ok(BlockedLiouvillian { layout, blocks })
}

impl BlockedLiouvillian {
    /// Apply the generator to split components.
    pub fn apply(&self, parts: &[Array1<C64>; 3]) -> [Array1<C64>; 3] {
        [0, 1, 2].map(|c| self.blocks[c].dot(&parts[c]))
    }

    /// Matrix exponentials `exp(L_c Δt)` of all three blocks.
    pub fn propagator(&self, dt: f64) -> Result<[Array2<C64>; 3]> {
        let p0 = expm(&self.blocks[0].mapv(|z| z * C64::from(dt)))?;
        let p1 = expm(&self.blocks[1].mapv(|z| z * C64::from(dt)))?;
        let p2 = expm(&self.blocks[2].mapv(|z| z * C64::from(dt)))?;
        Ok([p0, p1, p2])
    }

    /// Propagator for the charge-0 block only (enough when the initial
    /// state and all observables live at charge 0).
    pub fn propagator_c0(&self, dt: f64) -> Result<Array2<C64>> {
        expm(&self.blocks[0].mapv(|z| z * C64::from(dt)))
    }

    /// Null vector of the charge-0 block under the unit-trace constraint:
    /// one row is replaced by the trace functional and the system solved
    /// directly. Returns a hermitized, trace-normalized density matrix.
    pub fn steady_null(&self) -> Result<DensityMatrix> {
        let dim = self.layout.dim;
        let n0 = self.layout.indices[0].len();
        let mut a = self.blocks[0].clone();
        // positions of the diagonal entries (i, i) inside the c = 0 block
        for val in a.row_mut(0) {
            *val = C64::from(0.0);
        }
        for i in 0..dim {
            let (c, pos) = self.layout.position[i * dim + i];
            debug_assert_eq!(c, 0);
            a[(0, pos)] = C64::from(1.0);
        }
        let mut b = Array1::<C64>::zeros(n0);
        b[0] = C64::from(1.0);
        let x = a
            .solve(&b)
            .map_err(|e| Error::Numerical(format!("steady-state solve failed: {e}")))?;
        let zero1 = Array1::<C64>::zeros(self.layout.indices[1].len());
        let zero2 = Array1::<C64>::zeros(self.layout.indices[2].len());
        let mut rho = self.layout.assemble(&[x, zero1, zero2]);
        hermitize(&mut rho);
        let tr: C64 = rho.diag().iter().sum();
        let rho = rho.mapv(|z| z / tr);
        Ok(DensityMatrix::new(rho))
    }

    /// Count the near-null directions of every block (singular values below
    /// `tol` times the largest). A healthy dissipative generator has exactly
    /// one, at charge 0.
    pub fn nullity(&self, tol: f64) -> Result<usize> {
        let mut count = 0usize;
        for block in &self.blocks {
            let (_, sv, _) = block
                .svd(false, false)
                .map_err(|e| Error::Numerical(format!("svd failed: {e}")))?;
            let top = sv.iter().cloned().fold(0.0f64, f64::max);
            count += sv.iter().filter(|&&s| s < tol * top).count();
        }
        Ok(count)
    }
}

/// Dense unblocked Liouvillian (row-major flattening), for small systems and
/// cross-checks.
pub fn dense_liouvillian(h: &Array2<C64>, jumps: &[(Array2<C64>, f64)]) -> Array2<C64> {
    let dim = h.nrows();
    let n2 = dim * dim;
    let mut l = Array2::<C64>::zeros((n2, n2));
    let id = Array2::<C64>::eye(dim);
    let kron = |a: &Array2<C64>, b: &Array2<C64>| -> Array2<C64> {
        let mut out = Array2::<C64>::zeros((n2, n2));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for m in 0..dim {
                        out[(i * dim + k, j * dim + m)] = a[(i, j)] * b[(k, m)];
                    }
                }
            }
        }
        out
    };
    let minus_i = C64::new(0.0, -1.0);
    l = l + kron(h, &id).mapv(|z| minus_i * z);
    l = l + kron(&id, &h.t().to_owned()).mapv(|z| -minus_i * z);
    for (c, rate) in jumps {
        let r = C64::from(*rate);
        let cconj = c.mapv(|z| z.conj());
        let m = c.t().mapv(|z| z.conj()).dot(c);
        l = l + kron(c, &cconj).mapv(|z| r * z);
        l = l + kron(&m, &id).mapv(|z| -0.5 * r * z);
        l = l + kron(&id, &m.t().to_owned()).mapv(|z| -0.5 * r * z);
    }
    l
}
