//! Dense complex linear-algebra helpers: matrix exponential, Hermitian
//! eigendecomposition wrappers and small norm utilities.
//!
//! Everything here works on `ndarray::Array2<Complex64>` and delegates the
//! heavy lifting (GEMM, LAPACK eigensolvers, LU) to the BLAS backend.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, Inverse, UPLO};

use crate::{C64, Error, Result};

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Largest absolute entry.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Maximum absolute column sum (the induced 1-norm).
pub fn one_norm(m: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for col in m.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Replace `m` by its Hermitian part `(m + m†)/2`.
pub fn hermitize(m: &mut Array2<C64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        let d = m[(i, i)];
        m[(i, i)] = C64::new(d.re, 0.0);
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn eigh_ascending(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    m.eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("zheev failed: {e}")))
}

// Pade approximant coefficients for expm, orders 3/5/7/9/13.
const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

fn pade_odd_even(m: &Array2<C64>, b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    // Horner-style evaluation in powers of m^2.
    let n = m.nrows();
    let m2 = m.dot(m);
    let id = Array2::<C64>::eye(n);
    let deg = b.len() - 1; // odd
    let mut u = &id * C64::from(b[deg]); // coefficient of highest odd power / m
    let mut v = &id * C64::from(b[deg - 1]);
    let mut k = deg - 2;
    loop {
        u = m2.dot(&u) + &id * C64::from(b[k]);
        v = m2.dot(&v) + &id * C64::from(b[k - 1]);
        if k < 3 {
            break;
        }
        k -= 2;
    }
    (m.dot(&u), v)
}

fn pade13(m: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let n = m.nrows();
    let id = Array2::<C64>::eye(n);
    let m2 = m.dot(m);
    let m4 = m2.dot(&m2);
    let m6 = m4.dot(&m2);
    let b = &B13;
    let u_hi = m6.dot(&(&m6 * C64::from(b[13]) + &m4 * C64::from(b[11]) + &m2 * C64::from(b[9])));
    let u_lo = &m6 * C64::from(b[7]) + &m4 * C64::from(b[5]) + &m2 * C64::from(b[3]) + &id * C64::from(b[1]);
    let u = m.dot(&(u_hi + u_lo));
    let v_hi = m6.dot(&(&m6 * C64::from(b[12]) + &m4 * C64::from(b[10]) + &m2 * C64::from(b[8])));
    let v = v_hi + &m6 * C64::from(b[6]) + &m4 * C64::from(b[4]) + &m2 * C64::from(b[2]) + &id * C64::from(b[0]);
    (u, v)
}

/// Matrix exponential by scaling-and-squaring with Pade approximants.
///
/// Accuracy is limited by the approximant order and the conditioning of the
/// denominator solve; for the generator norms used in this crate the result
/// is accurate to close to machine precision.
pub fn expm(m: &Array2<C64>) -> Result<Array2<C64>> {
    let norm = one_norm(m);
    let (u, v, squarings) = if norm <= THETA3 {
        let (u, v) = pade_odd_even(m, &B3);
        (u, v, 0)
    } else if norm <= THETA5 {
        let (u, v) = pade_odd_even(m, &B5);
        (u, v, 0)
    } else if norm <= THETA7 {
        let (u, v) = pade_odd_even(m, &B7);
        (u, v, 0)
    } else if norm <= THETA9 {
        let (u, v) = pade_odd_even(m, &B9);
        (u, v, 0)
    } else {
        let s = ((norm / THETA13).log2().ceil() as i32).max(0);
        let scaled = m.mapv(|z| z / C64::from(2f64.powi(s)));
        let (u, v) = pade13(&scaled);
        (u, v, s)
    };
    let num = &v + &u;
    let den = &v - &u;
    let den_inv = den
        .inv()
        .map_err(|e| Error::Numerical(format!("expm denominator solve failed: {e}")))?;
    let mut r = den_inv.dot(&num);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Frobenius norm of the difference of two matrices.
pub fn diff_fro(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Array2::<C64>::zeros((5, 5));
        let e = expm(&z).unwrap();
        assert!(diff_fro(&e, &Array2::eye(5)) < 1e-14);
    }

    #[test]
    fn expm_diagonal() {
        let mut d = Array2::<C64>::zeros((4, 4));
        for (i, lam) in [-0.3, 0.0, 1.7, 12.5].iter().enumerate() {
            d[(i, i)] = C64::new(0.0, *lam);
        }
        let e = expm(&d).unwrap();
        for (i, lam) in [-0.3, 0.0, 1.7, 12.5].iter().enumerate() {
            assert!((e[(i, i)] - C64::new(0.0, *lam).exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_antihermitian_is_unitary() {
        let n = 30;
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let v = C64::new(((i * 13 + j * 7) % 5) as f64 - 2.0, ((i + 2 * j) % 7) as f64 - 3.0);
                m[(i, j)] = v;
            }
        }
        let a = &m - &dagger(&m); // anti-Hermitian
        let u = expm(&a).unwrap();
        let should_be_id = dagger(&u).dot(&u);
        assert!(diff_fro(&should_be_id, &Array2::eye(n)) < 1e-10);
    }

    #[test]
    fn expm_matches_series_for_nilpotent() {
        // strictly upper triangular: series terminates exactly
        let n = 6;
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n - 1 {
            m[(i, i + 1)] = C64::new(1.5, -0.5);
        }
        let e = expm(&m).unwrap();
        let mut series = Array2::<C64>::eye(n);
        let mut term = Array2::<C64>::eye(n);
        for k in 1..n {
            term = term.dot(&m) / C64::from(k as f64);
            series = series + &term;
        }
        assert!(diff_fro(&e, &series) < 1e-12);
    }
}
