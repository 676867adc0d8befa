//! Truncated Fock-space representation: states, operators, Gaussian
//! unitaries and fidelities.
//!
//! Operators are dense `dim x dim` complex matrices. Gaussian unitaries
//! (displacement, squeezing) are built by matrix exponential of the truncated
//! generator; they are exactly unitary only away from the truncation edge,
//! which is why a guard band of the top `3 * ceil(dim/10)` Fock levels is
//! excluded from unitarity checks.

use ndarray::prelude::*;

use crate::linalg::{self, dagger, expm, max_abs};
use crate::{C64, Error, Result};

/// Truncated bosonic Hilbert space with Fock levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    /// A space with `dim` Fock levels. Panics if `dim < 4`; the model couples
    /// `n <-> n±3` so anything smaller cannot hold a single pump matrix
    /// element.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 4, "FockSpace needs dim >= 4, got {dim}");
        FockSpace { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of guard levels at the top of the truncated space.
    pub fn guard(&self) -> usize {
        3 * self.dim.div_ceil(10)
    }

    /// Levels below the guard band; unitarity and conjugation contracts are
    /// only enforced here.
    pub fn interior(&self) -> usize {
        self.dim - self.guard()
    }

    /// Default truncation for a state of mean occupation
    /// `|alpha|^2 + sinh^2 r`: `max(60, ceil(9 (|alpha|^2 + sinh^2 r + 10)))`.
    pub fn for_occupation(alpha_sq: f64, sinh_sq: f64) -> Self {
        let dim = (9.0 * (alpha_sq + sinh_sq + 10.0)).ceil() as usize;
        FockSpace::new(dim.max(60))
    }

    /// Annihilation operator: entries `(n, n+1) = sqrt(n+1)`.
    pub fn annihilation(&self) -> OperatorMatrix {
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for n in 1..self.dim {
            m[(n - 1, n)] = C64::from((n as f64).sqrt());
        }
        OperatorMatrix::new(m)
    }

    /// Creation operator, the adjoint of [`FockSpace::annihilation`].
    pub fn creation(&self) -> OperatorMatrix {
        OperatorMatrix::new(dagger(self.annihilation().matrix()))
    }

    /// Number operator `a† a`.
    pub fn number(&self) -> OperatorMatrix {
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            m[(n, n)] = C64::from(n as f64);
        }
        OperatorMatrix::hermitian(m)
    }

    /// Discrete rotation `Z = exp(i 2π n̂ / 3)`, the generator of the Z3
    /// symmetry. Phases are computed from `n mod 3` so that equal-sector
    /// entries are bit-identical and `[H, Z]` vanishes exactly.
    pub fn z3_rotation(&self) -> OperatorMatrix {
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            m[(n, n)] = C64::new(0.0, 2.0 * std::f64::consts::PI * ((n % 3) as f64) / 3.0).exp();
        }
        OperatorMatrix::unitary_diagonal(m)
    }

    /// Projector onto the symmetry sector `n ≡ k (mod 3)`.
    pub fn sector_projector(&self, k: usize) -> OperatorMatrix {
        assert!(k < 3, "sector index must be 0, 1 or 2");
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            if n % 3 == k {
                m[(n, n)] = C64::from(1.0);
            }
        }
        OperatorMatrix::hermitian(m)
    }

    /// Photon-number parity `(-1)^n̂`.
    pub fn parity(&self) -> OperatorMatrix {
        let mut m = Array2::<C64>::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            m[(n, n)] = C64::from(if n % 2 == 0 { 1.0 } else { -1.0 });
        }
        OperatorMatrix::hermitian(m)
    }

    /// Displacement operator `D(α) = exp(α a† - α* a)`.
    ///
    /// Requires `|α|^2 <= dim/9` (truncation-safety heuristic matching the
    /// default-dimension rule).
    pub fn displacement(&self, alpha: C64) -> Result<OperatorMatrix> {
        if alpha.norm_sqr() > self.dim as f64 / 9.0 {
            return Err(Error::Truncation(format!(
                "displacement |alpha|^2 = {:.3} exceeds dim/9 = {:.3}",
                alpha.norm_sqr(),
                self.dim as f64 / 9.0
            )));
        }
        Ok(self.displacement_unchecked(alpha))
    }

    /// Displacement without the truncation-safety guard. Internal callers
    /// (e.g. Wigner evaluation) supply their own, tighter embedding bound.
    pub(crate) fn displacement_unchecked(&self, alpha: C64) -> OperatorMatrix {
        let a = self.annihilation();
        let gen = a.matrix().mapv(|z| -alpha.conj() * z) + dagger(a.matrix()).mapv(|z| alpha * z);
        OperatorMatrix::unitary_from_expm(expm(&gen).expect("displacement expm"))
    }

    /// Squeezing operator `S(ξ) = exp(ξ* a²/2 - ξ a†²/2)`, `ξ = r e^{iθ}`.
    ///
    /// A negative `r` is folded into a θ-shift by π. Requires
    /// `sinh^2 r <= dim/9`.
    pub fn squeeze(&self, r: f64, theta: f64) -> Result<OperatorMatrix> {
        if r.sinh().powi(2) > self.dim as f64 / 9.0 {
            return Err(Error::Truncation(format!(
                "squeeze sinh^2 r = {:.3} exceeds dim/9 = {:.3}",
                r.sinh().powi(2),
                self.dim as f64 / 9.0
            )));
        }
        let xi = C64::from(r) * C64::new(0.0, theta).exp();
        let a = self.annihilation().matrix().to_owned();
        let a2 = a.dot(&a);
        let adag2 = dagger(&a2);
        let gen = a2.mapv(|z| 0.5 * xi.conj() * z) - adag2.mapv(|z| 0.5 * xi * z);
        let mut op = OperatorMatrix::unitary_from_expm(expm(&gen).expect("squeeze expm"));
        // squeezing scales occupation by cosh 2r; the unitary flag is only
        // honest when the interior block's image fits below the truncation
        let interior = self.interior() as f64;
        let spread = 2.0 * interior.sqrt() * (2.0 * r).sinh().abs() + 10.0;
        op.unitary = interior * (2.0 * r).cosh() + spread <= self.dim as f64;
        Ok(op)
    }

    /// Displaced squeezed number state `D(α) S(ξ) |n⟩`, numerically
    /// renormalized.
    pub fn displaced_squeezed_number_state(
        &self,
        alpha: C64,
        r: f64,
        theta: f64,
        n: usize,
    ) -> Result<StateVector> {
        if n >= self.dim {
            return Err(Error::Truncation(format!("Fock index {n} >= dim {}", self.dim)));
        }
        let budget = alpha.norm_sqr() + (2 * n + 1) as f64 * r.sinh().powi(2) + n as f64;
        if budget > self.dim as f64 / 9.0 {
            return Err(Error::Truncation(format!(
                "combined occupation {budget:.3} exceeds dim/9 = {:.3}",
                self.dim as f64 / 9.0
            )));
        }
        let d = self.displacement(alpha)?;
        let s = self.squeeze(r, theta)?;
        let ket = self.fock_state(n);
        let v = d.matrix().dot(&s.matrix().dot(&ket.amplitudes));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Truncation(format!(
                "displaced squeezed state lost norm: {norm}"
            )));
        }
        Ok(StateVector {
            amplitudes: v.mapv(|z| z / C64::from(norm)),
        })
    }

    /// Fock basis state `|n⟩`.
    pub fn fock_state(&self, n: usize) -> StateVector {
        assert!(n < self.dim);
        let mut v = Array1::<C64>::zeros(self.dim);
        v[n] = C64::from(1.0);
        StateVector { amplitudes: v }
    }

    /// Coherent state from its closed-form Fock amplitudes (independent of
    /// the matrix-exponential path, useful as an oracle).
    pub fn coherent_state(&self, alpha: C64) -> StateVector {
        let mut v = Array1::<C64>::zeros(self.dim);
        let pref = (-0.5 * alpha.norm_sqr()).exp();
        let mut term = C64::from(pref);
        v[0] = term;
        for n in 1..self.dim {
            term *= alpha / C64::from((n as f64).sqrt());
            v[n] = term;
        }
        StateVector::normalized(v)
    }
}

/// Doubles the truncation and requires the target quantity to move by less
/// than `tol`; returns the converged value.
pub fn convergence_check<F>(space: FockSpace, tol: f64, f: F) -> Result<f64>
where
    F: Fn(FockSpace) -> Result<f64>,
{
    let coarse = f(space)?;
    let fine = f(FockSpace::new(space.dim() * 2))?;
    if (fine - coarse).abs() < tol {
        Ok(coarse)
    } else {
        Err(Error::Truncation(format!(
            "value moved by {:.3e} (> {tol:.1e}) when doubling dim from {}",
            (fine - coarse).abs(),
            space.dim()
        )))
    }
}

/// Pure state in the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Array1<C64>) -> Self {
        StateVector { amplitudes }
    }

    /// Construct and normalize; panics on a numerically zero vector.
    pub fn normalized(amplitudes: Array1<C64>) -> Self {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-300, "cannot normalize a zero vector");
        StateVector {
            amplitudes: amplitudes.mapv(|z| z / C64::from(norm)),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::dim_mismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Expectation value of a Hermitian operator.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<f64> {
        if self.dim() != op.dim() {
            return Err(Error::dim_mismatch(self.dim(), op.dim()));
        }
        let v = op.matrix().dot(&self.amplitudes);
        let e: C64 = self
            .amplitudes
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(e.re)
    }

    /// Pad with zeros into a larger space.
    pub fn embed(&self, space: FockSpace) -> StateVector {
        assert!(space.dim() >= self.dim());
        let mut v = Array1::<C64>::zeros(space.dim());
        v.slice_mut(s![..self.dim()]).assign(&self.amplitudes);
        StateVector { amplitudes: v }
    }
}

/// State-overlap fidelity `|⟨a|b⟩| ∈ [0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// Dense operator with optional structural flags.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Array2<C64>,
    pub hermitian: bool,
    pub unitary: bool,
}

impl OperatorMatrix {
    pub fn new(entries: Array2<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols());
        OperatorMatrix {
            entries,
            hermitian: false,
            unitary: false,
        }
    }

    /// Tag as Hermitian; debug builds verify `max |M - M†| < 1e-12`.
    pub fn hermitian(entries: Array2<C64>) -> Self {
        debug_assert!(max_abs(&(&entries - &dagger(&entries))) < 1e-12);
        OperatorMatrix {
            entries,
            hermitian: true,
            unitary: false,
        }
    }

    fn unitary_diagonal(entries: Array2<C64>) -> Self {
        OperatorMatrix {
            entries,
            hermitian: false,
            unitary: true,
        }
    }

    fn unitary_from_expm(entries: Array2<C64>) -> Self {
        OperatorMatrix {
            entries,
            hermitian: false,
            unitary: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: dagger(&self.entries),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// Apply to a state (no renormalization).
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.dim() != v.dim() {
            return Err(Error::dim_mismatch(self.dim(), v.dim()));
        }
        Ok(StateVector::new(self.entries.dot(&v.amplitudes)))
    }

    /// Verify the advertised flags: Hermiticity everywhere, unitarity on the
    /// interior block only (truncation corrupts the guard band).
    pub fn verify_flags(&self, space: FockSpace) -> Result<()> {
        if self.hermitian {
            let dev = max_abs(&(&self.entries - &dagger(&self.entries)));
            if dev > 1e-12 {
                return Err(Error::Numerical(format!("hermitian flag violated: {dev:.2e}")));
            }
        }
        if self.unitary {
            let m = interior_unitarity_defect(&self.entries, space.interior());
            if m > 1e-10 {
                return Err(Error::Numerical(format!("unitary flag violated: {m:.2e}")));
            }
        }
        Ok(())
    }
}

/// `max |(M†M - 1)_{ij}|` over the leading `interior x interior` block.
pub fn interior_unitarity_defect(m: &Array2<C64>, interior: usize) -> f64 {
    let prod = dagger(m).dot(m);
    let mut worst = 0.0f64;
    for i in 0..interior {
        for j in 0..interior {
            let target = if i == j { C64::from(1.0) } else { C64::from(0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Mixed state as a dense density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub entries: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(entries: Array2<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols());
        DensityMatrix { entries }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let n = psi.dim();
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = psi.amplitudes[i] * psi.amplitudes[j].conj();
            }
        }
        DensityMatrix { entries: m }
    }

    /// Maximally mixed state `1/dim`.
    pub fn maximally_mixed(space: FockSpace) -> Self {
        let d = space.dim();
        DensityMatrix {
            entries: Array2::eye(d).mapv(|z: C64| z / C64::from(d as f64)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().iter().sum()
    }

    pub fn purity(&self) -> f64 {
        let sq = self.entries.dot(&self.entries);
        sq.diag().iter().sum::<C64>().re
    }

    /// `⟨psi| rho |psi⟩`.
    pub fn population(&self, psi: &StateVector) -> Result<f64> {
        if self.dim() != psi.dim() {
            return Err(Error::dim_mismatch(self.dim(), psi.dim()));
        }
        let v = self.entries.dot(&psi.amplitudes);
        let e: C64 = psi
            .amplitudes
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(e.re)
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        if self.dim() != op.dim() {
            return Err(Error::dim_mismatch(self.dim(), op.dim()));
        }
        Ok(self.entries.dot(op.matrix()).diag().iter().sum())
    }

    /// Hermiticity / unit trace / positivity checks at the documented
    /// tolerances (1e-10, 1e-8, -1e-8).
    pub fn validate(&self) -> Result<()> {
        let herm = max_abs(&(&self.entries - &dagger(&self.entries)));
        if herm > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("hermiticity defect {herm:.2e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidDensityMatrix(format!("trace = {tr}")));
        }
        let (vals, _) = linalg::eigh_ascending(&self.entries)?;
        if vals[0] < -1e-8 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.2e}",
                vals[0]
            )));
        }
        Ok(())
    }

    /// Trace distance `0.5 ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::dim_mismatch(self.dim(), other.dim()));
        }
        let diff = &self.entries - &other.entries;
        let (vals, _) = linalg::eigh_ascending(&diff)?;
        Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
    }
}
