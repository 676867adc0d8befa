//! Single-photon and dephasing structure of the encoded qutrit: ladder
//! action on the well states, sector-projected excited states, transition
//! tables on the cat basis (closed form and brute force), leakage overlaps,
//! logical operators and Gell-Mann coordinates.

use ndarray::prelude::*;

use crate::fock::{FockSpace, StateVector};
use crate::semiclassical::ModelParams;
use crate::states::{self, GaussianParams};
use crate::{C64, Error, Result};

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

fn omega_pow(k: i64) -> C64 {
    C64::new(0.0, TWO_PI_3 * k as f64).exp()
}

/// The four overlaps between displaced squeezed number states with n ≤ 1:
/// `(s00, s10, s01, s11) = (⟨ζ_k|ζ_l⟩, ⟨ζ_k,1|ζ_l⟩, ⟨ζ_k|ζ_l,1⟩, ⟨ζ_k,1|ζ_l,1⟩)`.
#[derive(Debug, Clone, Copy)]
pub struct WellOverlaps {
    pub s00: C64,
    pub s10: C64,
    pub s01: C64,
    pub s11: C64,
}

/// `σ_{kl} = cosh²r - e^{i(θ_k - θ_l)} sinh²r`.
pub fn sigma(gp: &[GaussianParams; 3], k: usize, l: usize) -> C64 {
    let r = gp[0].r;
    C64::from(r.cosh().powi(2))
        - C64::new(0.0, gp[k].theta - gp[l].theta).exp() * C64::from(r.sinh().powi(2))
}

/// `η_{kl} = |α| cosh r (e^{iφ_k} - e^{iφ_l}) - |α| e^{iθ_k} sinh r (e^{-iφ_k} - e^{-iφ_l})`.
pub fn eta(gp: &[GaussianParams; 3], k: usize, l: usize) -> C64 {
    let r = gp[0].r;
    let m = C64::from(gp[0].alpha_mag);
    let e = |phi: f64| C64::new(0.0, phi).exp();
    m * C64::from(r.cosh()) * (e(gp[k].phi) - e(gp[l].phi))
        - m * e(gp[k].theta) * C64::from(r.sinh()) * (e(-gp[k].phi) - e(-gp[l].phi))
}

/// Closed-form evaluation of the n ≤ 1 overlaps between two well states.
///
/// `⟨ζ_k|ζ_l⟩` comes from the Gaussian-integral overlap; the single-photon
/// overlaps follow exactly from the ladder identities, which close into two
/// small linear systems. All four reproduce brute-force Fock inner products
/// to machine precision.
pub fn well_overlaps(gp: &[GaussianParams; 3], k: usize, l: usize) -> WellOverlaps {
    if k == l {
        return WellOverlaps {
            s00: C64::from(1.0),
            s10: C64::from(0.0),
            s01: C64::from(0.0),
            s11: C64::from(1.0),
        };
    }
    let r = gp[0].r;
    let (c, s) = (r.cosh(), r.sinh());
    let alpha = |j: usize| gp[j].alpha();
    let eth = |j: usize| C64::new(0.0, gp[j].theta).exp();
    let z = states::general_gaussian_overlap(&gp[k], &gp[l]);
    // first-photon pair: X = ⟨ζ_k,1|ζ_l⟩, Y = ⟨ζ_k|ζ_l,1⟩
    let u = C64::from(c) * (alpha(l) - alpha(k))
        + eth(k) * C64::from(s) * (alpha(l).conj() - alpha(k).conj());
    let v = C64::from(c) * (alpha(k).conj() - alpha(l).conj())
        + eth(l).conj() * C64::from(s) * (alpha(k) - alpha(l));
    let p = C64::from(c * s) * (eth(k) - eth(l));
    let q = C64::from(c * s) * (eth(l).conj() - eth(k).conj());
    let det = C64::from(1.0) - p * q;
    let x = (u + p * v) * z / det;
    let y = (v + q * u) * z / det;
    // second pair: X2 = ⟨ζ_k,1|ζ_l,1⟩ coupled to W = ⟨ζ_k|ζ_l,2⟩
    let a12 = C64::from(2f64.sqrt() * c * s) * (eth(l) - eth(k));
    let b1 = C64::from(c * c) * z
        + C64::from(c) * (alpha(l) - alpha(k)) * y
        - eth(k) * eth(l).conj() * C64::from(s * s) * z
        + eth(k) * C64::from(s) * (alpha(l).conj() - alpha(k).conj()) * y;
    let a21 = -C64::from(c * s / 2f64.sqrt()) * (eth(l).conj() - eth(k).conj());
    let b2 = C64::from(1.0 / 2f64.sqrt())
        * (C64::from(c) * (alpha(k).conj() - alpha(l).conj()) * y
            + eth(l).conj() * C64::from(s) * (alpha(k) - alpha(l)) * y);
    let det2 = C64::from(1.0) - a12 * a21;
    let x2 = (b1 - a12 * b2) / det2;
    WellOverlaps {
        s00: z,
        s10: x,
        s01: y,
        s11: x2,
    }
}

/// Closed-form modulus of the leakage overlap,
/// `|⟨ζ_0|ζ_1,1⟩| = 2 √((2cosh 2r - sinh 2r)/(5/3 + cosh 4r)) |α| A`.
pub fn leakage_overlap_modulus(p: &ModelParams) -> Result<f64> {
    let gp = states::squeezing_parameter(p)?;
    let (a, _) = states::overlap_squeezed_coherent(p)?;
    let r = gp[0].r;
    Ok(2.0 * ((2.0 * (2.0 * r).cosh() - (2.0 * r).sinh()) / (5.0 / 3.0 + (4.0 * r).cosh())).sqrt()
        * gp[0].alpha_mag
        * a)
}

/// Coefficients of the ladder action on a well state,
/// `a|ζ_k⟩ = α_k|ζ_k⟩ - e^{iθ_k} sinh r |ζ_k,1⟩` and
/// `a†|ζ_k⟩ = α_k*|ζ_k⟩ + cosh r |ζ_k,1⟩`.
#[derive(Debug, Clone, Copy)]
pub struct LadderAction {
    pub a_diag: C64,
    pub a_leak: C64,
    pub adag_diag: C64,
    pub adag_leak: C64,
    /// numerical residual of the two-term expansions
    pub residual: f64,
}

/// Verify the ladder decomposition numerically and return the coefficients.
pub fn ladder_action_on_zeta(p: &ModelParams, space: FockSpace, k: usize) -> Result<LadderAction> {
    let gp = states::squeezing_parameter(p)?;
    let r = gp[0].r;
    let zeta = space.displaced_squeezed_number_state(gp[k].alpha(), gp[k].r, gp[k].theta, 0)?;
    let zeta1 = space.displaced_squeezed_number_state(gp[k].alpha(), gp[k].r, gp[k].theta, 1)?;
    let a_op = space.annihilation();
    let eth = C64::new(0.0, gp[k].theta).exp();
    let coeffs = LadderAction {
        a_diag: gp[k].alpha(),
        a_leak: -eth * C64::from(r.sinh()),
        adag_diag: gp[k].alpha().conj(),
        adag_leak: C64::from(r.cosh()),
        residual: 0.0,
    };
    let az = a_op.apply(&zeta)?;
    let mut residual = 0.0f64;
    for i in 0..space.dim() {
        let expect = coeffs.a_diag * zeta.amplitudes[i] + coeffs.a_leak * zeta1.amplitudes[i];
        residual += (az.amplitudes[i] - expect).norm_sqr();
    }
    let adz = a_op.adjoint().apply(&zeta)?;
    let mut residual2 = 0.0f64;
    for i in 0..space.dim() {
        let expect = coeffs.adag_diag * zeta.amplitudes[i] + coeffs.adag_leak * zeta1.amplitudes[i];
        residual2 += (adz.amplitudes[i] - expect).norm_sqr();
    }
    let residual = residual.sqrt().max(residual2.sqrt());
    if residual > 1e-8 {
        return Err(Error::Truncation(format!(
            "ladder decomposition residual {residual:.2e}"
        )));
    }
    Ok(LadderAction { residual, ..coeffs })
}

/// Sector-projected displaced squeezed one-photon states
/// `|ψ_k^{(e,1)}⟩ ∝ Π_k |ζ_0,1⟩`, normalized numerically.
pub fn excited_sector_states(p: &ModelParams, space: FockSpace) -> Result<[StateVector; 3]> {
    let gp = states::squeezing_parameter(p)?;
    let zeta01 = space.displaced_squeezed_number_state(gp[0].alpha(), gp[0].r, gp[0].theta, 1)?;
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let projected = space.sector_projector(k).apply(&zeta01)?;
        if projected.norm() < 1e-12 {
            return Err(Error::Truncation(format!("sector {k} projection vanished")));
        }
        out.push(StateVector::normalized(projected.amplitudes));
    }
    Ok(out.try_into().unwrap())
}

/// 3×3 matrix elements of `a` and `a†` on the cat basis plus the per-k
/// leakage amplitudes onto the first excited sector states.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    /// `a_elems[(l, k)] = ⟨C_l|a|C_k⟩`
    pub a_elems: Array2<C64>,
    /// `adag_elems[(l, k)] = ⟨C_l|a†|C_k⟩`
    pub adag_elems: Array2<C64>,
    /// `leak_a[k] = ⟨ψ_{k-1}^{(e,1)}|a|C_k⟩`
    pub leak_a: [C64; 3],
    /// `leak_adag[k] = ⟨ψ_{k+1}^{(e,1)}|a†|C_k⟩`
    pub leak_adag: [C64; 3],
}

/// The closed-form and brute-force transition tables side by side.
#[derive(Debug, Clone)]
pub struct TransitionTables {
    pub closed: TransitionTable,
    pub brute: TransitionTable,
}

/// Build both tables. The closed form evaluates
/// `⟨C_{k∓1}|a^(†)|C_k⟩ = |α| N_k/N_{k∓1} + 6 (sinh|cosh) r N_k N_{k∓1}
/// Re(e^{-i2π(k+1|k)/3} ⟨ζ_0|ζ_1,1⟩)`; the brute force assembles the cat
/// states in the truncated Fock space and takes inner products.
pub fn transition_table(p: &ModelParams, space: FockSpace) -> Result<TransitionTables> {
    let gp = states::squeezing_parameter(p)?;
    let basis = states::cat_states(p, space)?;
    let excited = excited_sector_states(p, space)?;
    let r = gp[0].r;
    let amag = gp[0].alpha_mag;
    let n = &basis.norms;
    let ov01 = well_overlaps(&gp, 0, 1).s01;

    let mut closed_a = Array2::<C64>::zeros((3, 3));
    let mut closed_ad = Array2::<C64>::zeros((3, 3));
    for k in 0..3usize {
        let km = (k + 2) % 3;
        let kp = (k + 1) % 3;
        closed_a[(km, k)] = C64::from(
            amag * n[k] / n[km]
                + 6.0 * r.sinh() * n[k] * n[km] * (omega_pow(-(k as i64 + 1)) * ov01).re,
        );
        closed_ad[(kp, k)] = C64::from(
            amag * n[k] / n[kp]
                + 6.0 * r.cosh() * n[k] * n[kp] * (omega_pow(-(k as i64)) * ov01).re,
        );
    }

    let a_op = space.annihilation();
    let mut brute_a = Array2::<C64>::zeros((3, 3));
    let mut brute_ad = Array2::<C64>::zeros((3, 3));
    let mut leak_a = [C64::from(0.0); 3];
    let mut leak_ad = [C64::from(0.0); 3];
    for k in 0..3usize {
        let ac = a_op.apply(&basis.cats[k])?;
        let adc = a_op.adjoint().apply(&basis.cats[k])?;
        for l in 0..3usize {
            brute_a[(l, k)] = basis.cats[l].inner(&ac)?;
            brute_ad[(l, k)] = basis.cats[l].inner(&adc)?;
        }
        leak_a[k] = excited[(k + 2) % 3].inner(&ac)?;
        leak_ad[k] = excited[(k + 1) % 3].inner(&adc)?;
    }
    // the excited-state normalizations have no closed form, so the leakage
    // amplitudes are shared between the two tables
    Ok(TransitionTables {
        closed: TransitionTable {
            a_elems: closed_a,
            adag_elems: closed_ad,
            leak_a,
            leak_adag: leak_ad,
        },
        brute: TransitionTable {
            a_elems: brute_a,
            adag_elems: brute_ad,
            leak_a,
            leak_adag: leak_ad,
        },
    })
}

/// Diagonal dephasing elements `⟨C_k|a†a|C_k⟩` (closed form and brute force)
/// and the largest off-diagonal element (zero by sector arithmetic).
#[derive(Debug, Clone, Copy)]
pub struct DephasingElements {
    pub diag_closed: [f64; 3],
    pub diag_brute: [f64; 3],
    pub offdiag_max: f64,
}

pub fn dephasing_elements(p: &ModelParams, space: FockSpace) -> Result<DephasingElements> {
    let gp = states::squeezing_parameter(p)?;
    let basis = states::cat_states(p, space)?;
    let r = gp[0].r;
    let amag = gp[0].alpha_mag;
    let n = &basis.norms;
    let ov = well_overlaps(&gp, 0, 1);
    let mut diag_closed = [0.0; 3];
    for k in 0..3usize {
        let km = (k + 2) % 3;
        let w = omega_pow(-(k as i64 + 1));
        diag_closed[k] = (n[k] / n[km]).powi(2) * amag * amag
            + 3.0 * n[k] * n[k] * r.sinh().powi(2)
            + 12.0 * n[k] * n[k] * amag * r.sinh() * (w * ov.s01).re
            + 6.0 * n[k] * n[k] * r.sinh().powi(2) * (w * ov.s11).re;
    }
    let num = space.number();
    let mut diag_brute = [0.0; 3];
    let mut offdiag_max = 0.0f64;
    for k in 0..3usize {
        let nk = num.apply(&basis.cats[k])?;
        for l in 0..3usize {
            let elem = basis.cats[l].inner(&nk)?;
            if l == k {
                diag_brute[k] = elem.re;
            } else {
                offdiag_max = offdiag_max.max(elem.norm());
            }
        }
    }
    Ok(DephasingElements {
        diag_closed,
        diag_brute,
        offdiag_max,
    })
}

/// Logical operators on the cat-encoded qutrit.
#[derive(Debug, Clone)]
pub struct LogicalOperators {
    /// cat-basis restriction of `a/|α|` — a cyclic shift up to `O(A)` terms
    pub x_l: Array2<C64>,
    /// `diag(1, ω, ω²)`
    pub z_l: Array2<C64>,
    /// `|⟨ζ_k|ζ_{k+1}⟩|` at these parameters
    pub overlap_mag: f64,
}

/// Well-overlap limit beyond which the logical-operator construction is
/// refused (the dropped terms would exceed the percent level).
pub const WEAK_SEPARATION_LIMIT: f64 = 0.05;

pub fn logical_operators(p: &ModelParams, space: FockSpace) -> Result<LogicalOperators> {
    let (a, _) = states::overlap_squeezed_coherent(p)?;
    if a >= WEAK_SEPARATION_LIMIT {
        return Err(Error::WeakSeparation {
            overlap: a,
            limit: WEAK_SEPARATION_LIMIT,
        });
    }
    let tables = transition_table(p, space)?;
    let gp = states::squeezing_parameter(p)?;
    let x_l = tables.brute.a_elems.mapv(|z| z / C64::from(gp[0].alpha_mag));
    let mut z_l = Array2::<C64>::zeros((3, 3));
    for k in 0..3 {
        z_l[(k, k)] = omega_pow(k as i64);
    }
    Ok(LogicalOperators {
        x_l,
        z_l,
        overlap_mag: a,
    })
}

/// Cartesian qutrit coordinates from Gell-Mann expectation values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritCoords {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The eight Gell-Mann matrices in the standard λ₁..λ₈ ordering.
pub fn gell_mann() -> [Array2<C64>; 8] {
    let z = || Array2::<C64>::zeros((3, 3));
    let one = C64::from(1.0);
    let i = C64::new(0.0, 1.0);
    let mut l1 = z();
    l1[(0, 1)] = one;
    l1[(1, 0)] = one;
    let mut l2 = z();
    l2[(0, 1)] = -i;
    l2[(1, 0)] = i;
    let mut l3 = z();
    l3[(0, 0)] = one;
    l3[(1, 1)] = -one;
    let mut l4 = z();
    l4[(0, 2)] = one;
    l4[(2, 0)] = one;
    let mut l5 = z();
    l5[(0, 2)] = -i;
    l5[(2, 0)] = i;
    let mut l6 = z();
    l6[(1, 2)] = one;
    l6[(2, 1)] = one;
    let mut l7 = z();
    l7[(1, 2)] = -i;
    l7[(2, 1)] = i;
    let mut l8 = z();
    let s3 = C64::from(1.0 / 3f64.sqrt());
    l8[(0, 0)] = s3;
    l8[(1, 1)] = s3;
    l8[(2, 2)] = -2.0 * s3;
    [l1, l2, l3, l4, l5, l6, l7, l8]
}

/// `x = Tr(ρλ₃)`, `y = Tr(ρλ₈)`,
/// `z = √(Σ_{j≠3,8} Tr(ρλ_j)²)` for a 3×3 density matrix on the cat basis.
pub fn qutrit_coords(rho3: &Array2<C64>) -> Result<QutritCoords> {
    assert_eq!(rho3.dim(), (3, 3));
    let herm = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (rho3[(i, j)] - rho3[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    if herm > 1e-8 {
        return Err(Error::InvalidDensityMatrix(format!("hermiticity defect {herm:.1e}")));
    }
    let tr: C64 = rho3.diag().iter().sum();
    if (tr - C64::from(1.0)).norm() > 1e-8 {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    // positivity for a 3x3 via the characteristic-polynomial coefficients
    let sum2: C64 = rho3.dot(rho3).diag().iter().sum();
    let det = det3(rho3);
    let minor_sum = 0.5 * (tr * tr - sum2).re;
    if minor_sum < -1e-8 || det.re < -1e-8 {
        return Err(Error::InvalidDensityMatrix(format!(
            "not positive semidefinite (minor sum {minor_sum:.2e}, det {:.2e})",
            det.re
        )));
    }
    let lambdas = gell_mann();
    let expect = |m: &Array2<C64>| -> f64 { rho3.dot(m).diag().iter().sum::<C64>().re };
    let x = expect(&lambdas[2]);
    let y = expect(&lambdas[7]);
    let mut zsq = 0.0;
    for (j, m) in lambdas.iter().enumerate() {
        if j != 2 && j != 7 {
            let e = expect(m);
            zsq += e * e;
        }
    }
    Ok(QutritCoords { x, y, z: zsq.sqrt() })
}

fn det3(m: &Array2<C64>) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fidelity;
    use crate::states::squeezing_parameter;
    use approx::assert_abs_diff_eq;

    fn space_for(p: &ModelParams) -> FockSpace {
        let gp = squeezing_parameter(p).unwrap();
        FockSpace::for_occupation(gp[0].alpha_mag.powi(2), gp[0].r.sinh().powi(2))
    }

    #[test]
    fn ladder_action_decomposition() {
        let p = ModelParams::closed(1.5, 1.0, 2.2);
        let sp = space_for(&p);
        let gp = squeezing_parameter(&p).unwrap();
        for k in 0..3 {
            let act = ladder_action_on_zeta(&p, sp, k).unwrap();
            assert!(act.residual < 1e-8);
            assert!((act.a_diag - gp[k].alpha()).norm() < 1e-12);
        }
        // on the zero-squeezing curve only photon creation leaks
        let g = 1.0;
        let p0 = ModelParams::closed(-9.0 * g * g, 1.0, g);
        let sp0 = space_for(&p0);
        let act = ladder_action_on_zeta(&p0, sp0, 0).unwrap();
        assert!(act.a_leak.norm() < 1e-12);
        assert!((act.adag_leak - C64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn ladder_coefficients_saturate_at_large_pump() {
        // sinh r → √(3^{-1/2} - 2^{-1}) ≈ 0.28, cosh r → √(3^{-1/2} + 2^{-1})
        let p = ModelParams::closed(2.0, 1.0, 40.0);
        let gp = squeezing_parameter(&p).unwrap();
        let r = gp[0].r;
        assert!((r.sinh() - (3f64.powf(-0.5) - 0.5).sqrt()).abs() < 1e-3);
        assert!((r.cosh() - (3f64.powf(-0.5) + 0.5).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn excited_states_contracts() {
        let p = ModelParams::closed(1.5, 1.0, 2.2);
        let sp = space_for(&p);
        let excited = excited_sector_states(&p, sp).unwrap();
        let cats = states::cat_states(&p, sp).unwrap();
        let z = sp.z3_rotation();
        for k in 0..3 {
            assert!((excited[k].norm() - 1.0).abs() < 1e-12);
            let ze = z.apply(&excited[k]).unwrap();
            let lam = omega_pow(k as i64);
            let mut dev = 0.0f64;
            for (a, b) in ze.amplitudes.iter().zip(excited[k].amplitudes.iter()) {
                dev = dev.max((a - lam * b).norm());
            }
            assert!(dev < 1e-10);
            // sector orthogonality against cats of the other sectors; within
            // the same sector the overlap is a finite number worth recording
            for l in 0..3 {
                let ov = cats.cats[l].inner(&excited[k]).unwrap().norm();
                if l != k {
                    assert!(ov < 1e-10);
                }
            }
        }
    }

    #[test]
    fn well_overlaps_against_fock_oracle() {
        for (d, g) in [(1.5, 2.2), (-3.0, 2.0), (0.0, 1.2)] {
            let p = ModelParams::closed(d, 1.0, g);
            let gp = squeezing_parameter(&p).unwrap();
            let sp = space_for(&p);
            let ket = |k: usize, n: usize| {
                sp.displaced_squeezed_number_state(gp[k].alpha(), gp[k].r, gp[k].theta, n)
                    .unwrap()
            };
            for k in 0..3 {
                for l in 0..3 {
                    let ov = well_overlaps(&gp, k, l);
                    let pairs = [
                        (ov.s00, ket(k, 0).inner(&ket(l, 0)).unwrap()),
                        (ov.s10, ket(k, 1).inner(&ket(l, 0)).unwrap()),
                        (ov.s01, ket(k, 0).inner(&ket(l, 1)).unwrap()),
                        (ov.s11, ket(k, 1).inner(&ket(l, 1)).unwrap()),
                    ];
                    for (c, b) in pairs {
                        assert!(
                            (c - b).norm() < 1e-6,
                            "Δ={d}, G={g}, (k,l)=({k},{l}): {c} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn well_overlap_identities() {
        let p = ModelParams::closed(1.5, 1.0, 2.2);
        let gp = squeezing_parameter(&p).unwrap();
        let same = well_overlaps(&gp, 1, 1);
        assert!((same.s00 - C64::from(1.0)).norm() < 1e-14);
        assert!(same.s10.norm() < 1e-14 && same.s01.norm() < 1e-14);
        assert!((same.s11 - C64::from(1.0)).norm() < 1e-14);
        for (k, l) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let ov = well_overlaps(&gp, k, l);
            // ⟨ζ_k,1|ζ_l⟩ = ⟨ζ_k|ζ_l,1⟩ η_{lk}/η*_{kl}
            let ratio = eta(&gp, l, k) / eta(&gp, k, l).conj();
            assert!((ov.s10 - ov.s01 * ratio).norm() < 1e-10);
            // sigma is the conjugate-symmetric combination used throughout
            assert!((sigma(&gp, k, l) - sigma(&gp, l, k).conj()).norm() < 1e-14);
        }
        // conjugation relations between the leakage overlaps
        let a01 = well_overlaps(&gp, 0, 1).s01;
        let a02 = well_overlaps(&gp, 0, 2).s01;
        assert!((a01 - a02.conj()).norm() < 1e-12);
        let a12 = well_overlaps(&gp, 1, 2).s01;
        let a21 = well_overlaps(&gp, 2, 1).s01;
        assert!((a12 - a21.conj()).norm() < 1e-12);
        // closed-form modulus of the leakage overlap
        let lk = leakage_overlap_modulus(&p).unwrap();
        assert!((a01.norm() - lk).abs() < 1e-8 * lk.max(1e-12));
    }

    #[test]
    fn transition_tables_agree_and_obey_selection_rules() {
        for (d, g) in [(1.5, 2.2), (-3.0, 2.0)] {
            let p = ModelParams::closed(d, 1.0, g);
            let sp = space_for(&p);
            let t = transition_table(&p, sp).unwrap();
            let mut worst = 0.0f64;
            for k in 0..3 {
                for l in 0..3 {
                    worst = worst
                        .max((t.closed.a_elems[(l, k)] - t.brute.a_elems[(l, k)]).norm())
                        .max((t.closed.adag_elems[(l, k)] - t.brute.adag_elems[(l, k)]).norm());
                    if l != (k + 2) % 3 {
                        assert!(t.brute.a_elems[(l, k)].norm() < 1e-12);
                    }
                    if l != (k + 1) % 3 {
                        assert!(t.brute.adag_elems[(l, k)].norm() < 1e-12);
                    }
                    // Hermiticity: ⟨C_l|a|C_k⟩ = ⟨C_k|a†|C_l⟩*
                    assert!(
                        (t.brute.a_elems[(l, k)] - t.brute.adag_elems[(k, l)].conj()).norm() < 1e-10
                    );
                }
            }
            assert!(worst < 1e-6, "closed vs brute force: {worst:.2e}");
        }
    }

    #[test]
    fn norm_ratio_expansions() {
        // N ratios approach 1 with the stated O(A) corrections
        let p = ModelParams::closed(2.0, 1.0, 2.6);
        let sp = space_for(&p);
        let basis = states::cat_states(&p, sp).unwrap();
        let (a, th) = states::overlap_squeezed_coherent(&p).unwrap();
        let n = &basis.norms;
        let cases = [
            (n[0] / n[2], 1.0 - 3f64.sqrt() / 2.0 * (3f64.sqrt() * th.cos() + th.sin()) * a),
            (n[1] / n[0], 1.0 + 3f64.sqrt() / 2.0 * (3f64.sqrt() * th.cos() - th.sin()) * a),
            (n[2] / n[1], 1.0 + 3f64.sqrt() * th.sin() * a),
        ];
        for (exact, approx) in cases {
            assert!(
                (exact - approx).abs() < 10.0 * a * a,
                "ratio {exact} vs O(A) form {approx} (A = {a:.2e})"
            );
        }
    }

    #[test]
    fn dephasing_structure() {
        let p = ModelParams::closed(2.0, 1.0, 2.0);
        let sp = space_for(&p);
        let d = dephasing_elements(&p, sp).unwrap();
        assert!(d.offdiag_max < 1e-10);
        for k in 0..3 {
            assert!(
                (d.diag_closed[k] - d.diag_brute[k]).abs() < 1e-6,
                "k={k}: {} vs {}",
                d.diag_closed[k],
                d.diag_brute[k]
            );
        }
        // diagonal spread shrinks exponentially with pump
        let spread = |g: f64| {
            let p = ModelParams::closed(2.0, 1.0, g);
            let d = dephasing_elements(&p, space_for(&p)).unwrap();
            let lo = d.diag_brute.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = d.diag_brute.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        };
        let (s2, s3, s4) = (spread(2.0), spread(3.0), spread(4.0));
        assert!(s3 < 0.1 * s2 && s4 < 0.1 * s3, "spreads {s2:.2e} {s3:.2e} {s4:.2e}");
        // r = 0 case: only the displacement term survives
        let g = 1.0;
        let p0 = ModelParams::closed(-9.0 * g * g, 1.0, g);
        let d0 = dephasing_elements(&p0, space_for(&p0)).unwrap();
        let basis = states::cat_states(&p0, space_for(&p0)).unwrap();
        for k in 0..3usize {
            let expect = (basis.norms[k] / basis.norms[(k + 2) % 3]).powi(2) * 9.0 * g * g;
            assert_abs_diff_eq!(d0.diag_brute[k], expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn logical_operator_structure() {
        let p = ModelParams::closed(2.0, 1.0, 3.0);
        let sp = space_for(&p);
        let ops = logical_operators(&p, sp).unwrap();
        // Z_L³ = 1
        let z3 = ops.z_l.dot(&ops.z_l).dot(&ops.z_l);
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let t = if i == j { C64::from(1.0) } else { C64::from(0.0) };
                dev = dev.max((z3[(i, j)] - t).norm());
            }
        }
        assert!(dev < 1e-14);
        // X_L ≈ cyclic shift: C_0 → C_2 under a
        let mut e0 = Array1::<C64>::zeros(3);
        e0[0] = C64::from(1.0);
        let shifted = ops.x_l.dot(&e0);
        assert!((shifted[2] - C64::from(1.0)).norm() < 0.01);
        assert!(shifted[0].norm() < 0.01 && shifted[1].norm() < 0.01);
        for k in 0..3usize {
            for l in 0..3usize {
                let t = if l == (k + 2) % 3 { C64::from(1.0) } else { C64::from(0.0) };
                assert!((ops.x_l[(l, k)] - t).norm() < 0.01);
            }
        }
        // weak separation refused
        let pweak = ModelParams::closed(2.0, 1.0, 1.45);
        let a = states::overlap_squeezed_coherent(&pweak).unwrap().0;
        assert!(a >= WEAK_SEPARATION_LIMIT, "test point not weak: A = {a}");
        assert!(matches!(
            logical_operators(&pweak, sp),
            Err(Error::WeakSeparation { .. })
        ));
    }

    #[test]
    fn gell_mann_coordinates() {
        // maximally mixed at the origin
        let third = Array2::<C64>::eye(3).mapv(|z: C64| z / C64::from(3.0));
        let c = qutrit_coords(&third).unwrap();
        assert!(c.x.abs() < 1e-14 && c.y.abs() < 1e-14 && c.z.abs() < 1e-14);
        // pure |C_0⟩⟨C_0| at (1, 1/√3, 0)
        let mut rho = Array2::<C64>::zeros((3, 3));
        rho[(0, 0)] = C64::from(1.0);
        let c = qutrit_coords(&rho).unwrap();
        assert_abs_diff_eq!(c.x, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.y, 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.z, 0.0, epsilon = 1e-14);
        // pure (|C_0⟩ + |C_1⟩)/√2 at (0, 1/√3, 1)
        let mut rho = Array2::<C64>::zeros((3, 3));
        for i in 0..2 {
            for j in 0..2 {
                rho[(i, j)] = C64::from(0.5);
            }
        }
        let c = qutrit_coords(&rho).unwrap();
        assert_abs_diff_eq!(c.x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.y, 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.z, 1.0, epsilon = 1e-14);
        // invalid inputs rejected
        let mut bad = Array2::<C64>::zeros((3, 3));
        bad[(0, 0)] = C64::from(2.0);
        assert!(matches!(qutrit_coords(&bad), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn gell_mann_norm_bound_property() {
        // x² + y² ≤ 4/3 for any density matrix; sampled over pure/mixed blends
        let mut seed = 1234567u64;
        let mut rng = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 16) as f64 / (1u64 << 48) as f64) - 0.5
        };
        for _ in 0..200 {
            let mut v = [C64::from(0.0); 3];
            for x in v.iter_mut() {
                *x = C64::new(rng(), rng());
            }
            let norm_sq = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let w = rng() + 0.5;
            let mut rho = Array2::<C64>::zeros((3, 3));
            for i in 0..3 {
                for j in 0..3 {
                    rho[(i, j)] = C64::from(w) * v[i] * v[j].conj() / C64::from(norm_sq);
                }
            }
            for i in 0..3 {
                rho[(i, i)] += C64::from((1.0 - w) / 3.0);
            }
            let c = qutrit_coords(&rho).unwrap();
            assert!(c.x * c.x + c.y * c.y <= 4.0 / 3.0 + 1e-9);
            assert!(c.z >= 0.0);
        }
    }

    #[test]
    fn noise_bias_scalings() {
        // flips scale with |α|, leakage amplitudes with sinh r, and the
        // overlap-mediated corrections with A
        let p = ModelParams::closed(2.0, 1.0, 3.0);
        let sp = space_for(&p);
        let t = transition_table(&p, sp).unwrap();
        let gp = squeezing_parameter(&p).unwrap();
        let flip = t.brute.a_elems[(2, 0)].norm();
        assert!((flip - gp[0].alpha_mag).abs() / gp[0].alpha_mag < 0.01);
        for k in 0..3 {
            let leak = t.brute.leak_a[k].norm();
            assert!(
                (leak - gp[0].r.sinh().abs()).abs() < 0.05,
                "leak {leak} vs sinh r {}",
                gp[0].r.sinh()
            );
        }
        // at these parameters the cats faithfully represent the numerical
        // sector ground states, so the table lives on the physical manifold
        let basis = states::cat_states(&p, sp).unwrap();
        let s = crate::spectrum::spectrum(&p, sp).unwrap();
        for k in 0..3u8 {
            let f = fidelity(s.sector_ground(k).unwrap(), &basis.cats[k as usize]).unwrap();
            assert!(f > 0.99);
        }
    }
}
