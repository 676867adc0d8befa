//! Closed-form descriptions of the (quasi-)degenerate ground-state manifold:
//! the exact recurrence solutions on the degeneracy line `Δ = G²/U`, their
//! position-space Airy form, the quadratic-fluctuation (Gaussian) frame with
//! its displacement/squeezing parameters, squeezed coherent states, their
//! overlaps, and the three-legged squeezed cat basis.

use ndarray::prelude::*;

use crate::fock::{FockSpace, StateVector};
use crate::semiclassical::{self, ModelParams};
use crate::special;
use crate::{C64, Error, Result};

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Exact ground state `|φ_k⟩` of the factorized Hamiltonian at `Δ = G²/U`,
/// built from the three-term recurrence
/// `√(n(n-1)) c_n = g √(n-2) c_{n-3}` seeded at `|k⟩`, then normalized.
///
/// `k = 0, 1` are exact eigenstates for any pump; `k = 2` is the asymptotic
/// third member that joins the manifold only in the large-pump limit.
pub fn exact_ground_state(g: f64, k: usize, space: FockSpace) -> Result<StateVector> {
    assert!(g >= 0.0 && k < 3);
    let dim = space.dim();
    let coeff = |n: usize, prev: f64| -> f64 {
        let nf = n as f64;
        g * (nf - 2.0).sqrt() / (nf * (nf - 1.0)).sqrt() * prev
    };
    let mut c = Array1::<C64>::zeros(dim);
    let mut norm_sq = 0.0f64;
    let mut last = 1.0f64;
    c[k] = C64::from(1.0);
    norm_sq += 1.0;
    let mut n = k + 3;
    while n < dim {
        last = coeff(n, last);
        c[n] = C64::from(last);
        norm_sq += last * last;
        n += 3;
    }
    // tail-mass estimate: continue the recurrence beyond the truncation
    let mut tail = 0.0f64;
    let mut t = last;
    for _ in 0..120 {
        t = coeff(n, t);
        tail += t * t;
        n += 3;
        if t * t < 1e-40 * norm_sq {
            break;
        }
    }
    if tail > 1e-12 * norm_sq {
        return Err(Error::Truncation(format!(
            "series tail mass {:.2e} beyond dim {dim} at g = {g}",
            tail / norm_sq
        )));
    }
    Ok(StateVector::normalized(c))
}

/// `‖(a² - g a†)|ψ⟩‖` — zero exactly on the dark states `|φ_0⟩, |φ_1⟩`.
pub fn dark_state_residual(state: &StateVector, g: f64) -> f64 {
    let dim = state.dim();
    let space = FockSpace::new(dim);
    let a = space.annihilation();
    let a2 = a.matrix().dot(a.matrix());
    let adag = space.creation();
    let op = &a2 - &adag.matrix().mapv(|z| C64::from(g) * z);
    let v = op.dot(&state.amplitudes);
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Squared norms of the unnormalized `|φ_ℓ⟩` series, in closed form.
///
/// For ℓ = 0, 1 these are the modified-Bessel expressions
/// `3^{∓1/6} √π g^{±1/3} e^{g²/6} I_{∓1/6}(g²/6)`. For ℓ = 2 the matching
/// closed form is `½ ₂F₂(1, 1; 4/3, 5/3; g²/3)` (obtained from the term
/// ratio of the series; a ₁F₁ with these parameters does not reproduce it).
pub fn series_norm_closed_form(g: f64, ell: usize) -> f64 {
    match ell {
        0 => {
            3f64.powf(-1.0 / 6.0)
                * std::f64::consts::PI.sqrt()
                * g.powf(1.0 / 3.0)
                * (g * g / 6.0).exp()
                * special::bessel_i(-1.0 / 6.0, g * g / 6.0)
        }
        1 => {
            3f64.powf(1.0 / 6.0)
                * std::f64::consts::PI.sqrt()
                * g.powf(-1.0 / 3.0)
                * (g * g / 6.0).exp()
                * special::bessel_i(1.0 / 6.0, g * g / 6.0)
        }
        2 => 0.5 * special::hyp2f2(1.0, 1.0, 4.0 / 3.0, 5.0 / 3.0, g * g / 3.0),
        _ => panic!("ell must be 0, 1 or 2"),
    }
}

/// Squared norm of the raw `|φ_ℓ⟩` series summed numerically (no
/// normalization), for cross-checking the closed forms.
pub fn series_norm_numeric(g: f64, ell: usize, terms: usize) -> f64 {
    // seed with the printed n = 0 coefficient of each series
    let c0_sq = match ell {
        0 => (special::ln_gamma(1.0 / 3.0) - special::ln_gamma(2.0 / 3.0)).exp(),
        1 => (special::ln_gamma(2.0 / 3.0) - special::ln_gamma(4.0 / 3.0)).exp(),
        2 => 0.5,
        _ => panic!("ell must be 0, 1 or 2"),
    };
    let mut sum = 0.0;
    let mut c = c0_sq.sqrt();
    let mut n = ell;
    sum += c0_sq;
    for _ in 0..terms {
        let next = n + 3;
        c *= g * ((next - 2) as f64).sqrt() / ((next * (next - 1)) as f64).sqrt();
        sum += c * c;
        n = next;
        if c * c < 1e-30 * sum {
            break;
        }
    }
    sum
}

/// The two independent position-space solutions of the dark-state equation,
/// each a Gaussian times an Airy function, L²-normalized on the grid.
#[derive(Debug, Clone)]
pub struct AiryWavefunctions {
    pub x_grid: Vec<f64>,
    pub phi_a: Vec<f64>,
    pub phi_b: Vec<f64>,
    /// quadrature overlap ⟨φ_A|φ_B⟩ of the normalized pair
    pub cross_overlap: f64,
}

/// Evaluate and normalize the Airy-type wavefunctions on a uniform grid.
///
/// `φ_A ∝ e^{-(x+g̃)²/2} Ai[(4g̃)^{1/3}(x + g̃/4)]` with `g̃ = g/√2`, and the
/// same with Bi. Errors out if the grid is non-uniform, does not contain the
/// support, or is too coarse for the quadrature to be trusted.
pub fn airy_wavefunctions(g: f64, x_grid: &[f64]) -> Result<AiryWavefunctions> {
    assert!(g > 0.0);
    if x_grid.len() < 9 {
        return Err(Error::Quadrature("grid too short".into()));
    }
    let h = x_grid[1] - x_grid[0];
    for w in x_grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::Quadrature("grid must be uniform".into()));
        }
    }
    let gt = g / std::f64::consts::SQRT_2;
    let scale = (4.0 * gt).powf(1.0 / 3.0);
    let raw = |x: f64, second_kind: bool| -> f64 {
        let gauss = (-0.5 * (x + gt) * (x + gt)).exp();
        let arg = scale * (x + gt / 4.0);
        gauss
            * if second_kind {
                special::airy_bi(arg)
            } else {
                special::airy_ai(arg)
            }
    };
    let phi_a_raw: Vec<f64> = x_grid.iter().map(|&x| raw(x, false)).collect();
    let phi_b_raw: Vec<f64> = x_grid.iter().map(|&x| raw(x, true)).collect();
    let norm_sq = |v: &[f64], stride: usize| -> f64 {
        let mut s = 0.0;
        let mut i = 0;
        while i + stride < v.len() {
            s += 0.5 * (v[i] * v[i] + v[i + stride] * v[i + stride]) * h * stride as f64;
            i += stride;
        }
        s
    };
    for (name, v) in [("phi_A", &phi_a_raw), ("phi_B", &phi_b_raw)] {
        let full = norm_sq(v, 1);
        let coarse = norm_sq(v, 2);
        if (full - coarse).abs() > 1e-6 * full {
            return Err(Error::Quadrature(format!("{name}: grid too coarse")));
        }
        let edge = v[0].powi(2).max(v[v.len() - 1].powi(2));
        if edge * (x_grid[x_grid.len() - 1] - x_grid[0]) > 1e-10 * full {
            return Err(Error::Quadrature(format!("{name}: grid too narrow")));
        }
    }
    let na = norm_sq(&phi_a_raw, 1).sqrt();
    let nb = norm_sq(&phi_b_raw, 1).sqrt();
    let phi_a: Vec<f64> = phi_a_raw.iter().map(|v| v / na).collect();
    let phi_b: Vec<f64> = phi_b_raw.iter().map(|v| v / nb).collect();
    let mut cross = 0.0;
    for i in 0..x_grid.len() - 1 {
        cross += 0.5 * (phi_a[i] * phi_b[i] + phi_a[i + 1] * phi_b[i + 1]) * h;
    }
    Ok(AiryWavefunctions {
        x_grid: x_grid.to_vec(),
        phi_a,
        phi_b,
        cross_overlap: cross,
    })
}

/// Max residual of the dark-state ODE
/// `φ'' + 2(x+g̃) φ' + (x² - 2g̃x + 1) φ = 0`, relative to the local term
/// scale, via five-point finite differences on the uniform grid.
pub fn dark_ode_residual(g: f64, x_grid: &[f64], values: &[f64]) -> f64 {
    let h = x_grid[1] - x_grid[0];
    let gt = g / std::f64::consts::SQRT_2;
    let mut worst: f64 = 0.0;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 2..x_grid.len() - 2 {
        let x = x_grid[i];
        let d1 = (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h);
        let d2 = (-values[i + 2] + 16.0 * values[i + 1] - 30.0 * values[i] + 16.0 * values[i - 1]
            - values[i - 2])
            / (12.0 * h * h);
        let res = d2 + 2.0 * (x + gt) * d1 + (x * x - 2.0 * gt * x + 1.0) * values[i];
        let scale = d2.abs() + (2.0 * (x + gt) * d1).abs() + ((x * x - 2.0 * gt * x + 1.0) * values[i]).abs();
        worst = worst.max(res.abs() / scale.max(1e-8 * peak));
    }
    worst
}

/// Position wavefunction `⟨x|ψ⟩` of a Fock-basis state on a grid, via the
/// Hermite-function expansion.
pub fn position_wavefunction(state: &StateVector, x_grid: &[f64]) -> Vec<C64> {
    let dim = state.dim();
    x_grid
        .iter()
        .map(|&x| {
            let h = special::hermite_functions(dim, x);
            state
                .amplitudes
                .iter()
                .zip(h.iter())
                .map(|(c, hv)| c * C64::from(*hv))
                .sum()
        })
        .collect()
}

/// Which stationary branch the quadratic frame is expanded around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Quadratic-fluctuation frame parameters around a stationary amplitude.
#[derive(Debug, Clone, Copy)]
pub struct FrameParams {
    /// effective harmonic frequency ω = 4U|α|² + Δ
    pub omega: f64,
    /// two-photon amplitude λ = U|α| (|α| - 3G/U)
    pub lambda: f64,
    /// stability requirement ω > 2|λ|
    pub stable: bool,
}

/// `ω` and `λ` for the chosen branch, from the stationary amplitudes.
pub fn gaussian_frame_params(p: &ModelParams, branch: Branch) -> Result<FrameParams> {
    let amps = semiclassical::stationary_amplitudes(p)?;
    let mag = match branch {
        Branch::Plus => amps.mag_plus,
        Branch::Minus => amps.mag_minus,
    };
    let omega = 4.0 * p.kerr * mag * mag + p.delta;
    let lambda = p.kerr * mag * (mag - 3.0 * p.pump / p.kerr);
    Ok(FrameParams {
        omega,
        lambda,
        stable: omega > 2.0 * lambda.abs(),
    })
}

/// The same `ω_±, λ_±` written directly in `(G, Δ, U)`; must agree with
/// [`gaussian_frame_params`] to rounding.
pub fn gaussian_frame_params_explicit(p: &ModelParams, branch: Branch) -> Result<FrameParams> {
    let disc = p.discriminant();
    if disc < 0.0 {
        return Err(Error::NoFiniteStationaryPoint { discriminant: disc });
    }
    let root = disc.sqrt();
    let signed = match branch {
        Branch::Plus => root,
        Branch::Minus => -root,
    };
    let omega = -p.delta + 3.0 * p.pump * (3.0 * p.pump + signed) / (2.0 * p.kerr);
    let lambda = -0.5 * p.delta - 3.0 * p.pump * (3.0 * p.pump + signed) / (8.0 * p.kerr);
    Ok(FrameParams {
        omega,
        lambda,
        stable: omega > 2.0 * lambda.abs(),
    })
}

/// Displacement and squeezing parameters of one well state `|ζ_k⟩`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianParams {
    /// displacement magnitude |α|
    pub alpha_mag: f64,
    /// displacement phase φ_k
    pub phi: f64,
    /// signed squeezing magnitude; a sign flip is equivalent to θ → θ + π
    pub r: f64,
    /// squeezing phase θ_k
    pub theta: f64,
}

impl GaussianParams {
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.alpha_mag, self.phi)
    }
}

/// Squeezing magnitude from `tanh 2r = 9G|α| / (6G|α| - Δ) - 1`, signed:
/// positive (anti-squeezed along the displacement) for `Δ > -9G²/U`,
/// vanishing on that curve, negative beyond it.
pub fn squeezing_magnitude(p: &ModelParams) -> Result<f64> {
    let amps = semiclassical::stationary_amplitudes(p)?;
    let mag = amps.mag_plus;
    let t = 9.0 * p.pump * mag / (6.0 * p.pump * mag - p.delta) - 1.0;
    if t.abs() >= 1.0 {
        return Err(Error::Instability { ratio: t });
    }
    Ok(0.5 * t.atanh())
}

/// The displacement/squeezing table `(φ_k, θ_k)` of the three well states:
/// `φ_k = 2πk/3`, `θ_k = -π(2(k+1)+1)/3 → (π, π/3, -π/3)`.
pub fn squeezing_parameter(p: &ModelParams) -> Result<[GaussianParams; 3]> {
    let amps = semiclassical::stationary_amplitudes(p)?;
    let r = squeezing_magnitude(p)?;
    let thetas = [std::f64::consts::PI, std::f64::consts::FRAC_PI_3, -std::f64::consts::FRAC_PI_3];
    Ok([0, 1, 2].map(|k| GaussianParams {
        alpha_mag: amps.mag_plus,
        phi: TWO_PI_3 * k as f64,
        r,
        theta: thetas[k],
    }))
}

/// Manifold structure of the quadratic frame: the gap `Ω` and the absolute
/// quasi-energies of the degenerate manifolds.
#[derive(Debug, Clone, Copy)]
pub struct Manifold {
    pub omega: f64,
    /// manifold spacing Ω = √(ω² - 4λ²) = √(12 U²|α|⁴ - 3Δ²)
    pub big_omega: f64,
    /// meta-potential energy of the well, E(α₊)
    pub well_energy: f64,
}

impl Manifold {
    /// Absolute quasi-energy of manifold `n`: `E(α₊) + (ω - Ω)/2 - Ω n`.
    /// On the line Δ = G²/U this reproduces the exact eigenvalue `G²/U`.
    pub fn energy(&self, n: usize) -> f64 {
        self.well_energy + 0.5 * (self.omega - self.big_omega) - self.big_omega * n as f64
    }
}

/// Manifold frequency and energies; fails when the frame is unstable.
pub fn manifold_frequency(p: &ModelParams) -> Result<Manifold> {
    let fp = gaussian_frame_params(p, Branch::Plus)?;
    if !fp.stable {
        return Err(Error::Instability {
            ratio: 2.0 * fp.lambda / fp.omega,
        });
    }
    let amps = semiclassical::stationary_amplitudes(p)?;
    let big_omega = (fp.omega * fp.omega - 4.0 * fp.lambda * fp.lambda).sqrt();
    let well_energy =
        semiclassical::meta_potential(p, C64::from_polar(amps.mag_plus, 0.0));
    Ok(Manifold {
        omega: fp.omega,
        big_omega,
        well_energy,
    })
}

/// `Ω` from the parameter-space closed form `√(12 U²|α|⁴ - 3Δ²)`.
pub fn manifold_frequency_explicit(p: &ModelParams) -> Result<f64> {
    let amps = semiclassical::stationary_amplitudes(p)?;
    let a2 = amps.mag_plus * amps.mag_plus;
    let arg = 12.0 * p.kerr * p.kerr * a2 * a2 - 3.0 * p.delta * p.delta;
    if arg < 0.0 {
        return Err(Error::Instability { ratio: f64::NAN });
    }
    Ok(arg.sqrt())
}

/// The three squeezed coherent well states `|ζ_k⟩ = D(α_k) S(ξ_k) |0⟩`.
pub fn squeezed_coherent_kets(p: &ModelParams, space: FockSpace) -> Result<[StateVector; 3]> {
    let gp = squeezing_parameter(p)?;
    let build = |g: &GaussianParams| -> Result<StateVector> {
        space.displaced_squeezed_number_state(g.alpha(), g.r, g.theta, 0)
    };
    Ok([build(&gp[0])?, build(&gp[1])?, build(&gp[2])?])
}

/// Displaced squeezed number state `|ζ_k, n⟩` for the k-th well.
pub fn well_excited_state(
    p: &ModelParams,
    space: FockSpace,
    k: usize,
    n: usize,
) -> Result<StateVector> {
    let gp = squeezing_parameter(p)?;
    space.displaced_squeezed_number_state(gp[k].alpha(), gp[k].r, gp[k].theta, n)
}

/// Closed-form magnitude and phase of `⟨ζ_k|ζ_{k+1}⟩ = A e^{iΘ}`:
///
/// `A = 2^{3/4} (5 + 3cosh 4r)^{-1/4} exp(-3|α|² / (2cosh 2r + sinh 2r))`,
/// `Θ = 2√3 |α|² / (1 + 3e^{4r}) - ½ Arg(cosh²r + e^{iπ/3} sinh²r)`,
/// with the principal branch `(-1)^{1/3} = e^{iπ/3}`.
pub fn overlap_squeezed_coherent(p: &ModelParams) -> Result<(f64, f64)> {
    let r = squeezing_magnitude(p)?;
    let amps = semiclassical::stationary_amplitudes(p)?;
    let a2 = amps.mag_plus * amps.mag_plus;
    let mag = 2f64.powf(0.75) / (5.0 + 3.0 * (4.0 * r).cosh()).powf(0.25)
        * (-3.0 * a2 / (2.0 * (2.0 * r).cosh() + (2.0 * r).sinh())).exp();
    let branch = C64::new(0.0, std::f64::consts::FRAC_PI_3).exp();
    let inner = C64::from(r.cosh().powi(2)) + branch * C64::from(r.sinh().powi(2));
    let phase = 2.0 * 3f64.sqrt() * a2 / (1.0 + 3.0 * (4.0 * r).exp()) - 0.5 * inner.arg();
    Ok((mag, phase))
}

/// General overlap `⟨α', ξ'|α, ξ⟩` of two squeezed coherent states from the
/// position-representation Gaussian integral, with
/// `A(ξ) = (cosh r + e^{iθ} sinh r)/(cosh r - e^{iθ} sinh r)`:
///
/// `⟨α',ξ'|α,ξ⟩ = e^{-i(x p - x' p')/2} √(2/(A + A'*))
///   / √((cosh r' - e^{-iθ'} sinh r')(cosh r - e^{iθ} sinh r))
///   × exp(-½ [A A'*(x-x')² + (p-p')² - 2i(A x + A'* x')(p-p')]/(A + A'*))`.
pub fn general_gaussian_overlap(bra: &GaussianParams, ket: &GaussianParams) -> C64 {
    let s2 = std::f64::consts::SQRT_2;
    let (xk, pk) = (s2 * ket.alpha_mag * ket.phi.cos(), s2 * ket.alpha_mag * ket.phi.sin());
    let (xb, pb) = (s2 * bra.alpha_mag * bra.phi.cos(), s2 * bra.alpha_mag * bra.phi.sin());
    let gauss_ratio = |r: f64, theta: f64| -> C64 {
        let e = C64::new(0.0, theta).exp();
        (C64::from(r.cosh()) + e * C64::from(r.sinh())) / (C64::from(r.cosh()) - e * C64::from(r.sinh()))
    };
    let a_ket = gauss_ratio(ket.r, ket.theta);
    let a_bra_conj = gauss_ratio(bra.r, bra.theta).conj();
    let pref_phase = C64::new(0.0, -0.5 * (xk * pk - xb * pb)).exp();
    let denom_ket = C64::from(ket.r.cosh()) - C64::new(0.0, ket.theta).exp() * C64::from(ket.r.sinh());
    let denom_bra =
        C64::from(bra.r.cosh()) - C64::new(0.0, -bra.theta).exp() * C64::from(bra.r.sinh());
    let sum = a_ket + a_bra_conj;
    let dx = C64::from(xk - xb);
    let dp = C64::from(pk - pb);
    let num = a_ket * a_bra_conj * dx * dx + dp * dp
        - C64::new(0.0, 2.0) * (a_ket * C64::from(xk) + a_bra_conj * C64::from(xb)) * dp;
    let arg = -0.5 * num / sum;
    pref_phase * (C64::from(2.0) / sum).sqrt() / (denom_bra * denom_ket).sqrt() * arg.exp()
}

/// Orthonormal three-legged squeezed cat basis obtained by projecting
/// `|ζ_0⟩` onto the three symmetry sectors.
#[derive(Debug, Clone)]
pub struct CatBasis {
    pub cats: [StateVector; 3],
    /// closed-form normalizations N_k = [3(1 + 2A cos(Θ - 2πk/3))]^{-1/2}
    pub norms: [f64; 3],
    /// |⟨ζ_k|ζ_{k+1}⟩|
    pub overlap_mag: f64,
    /// arg ⟨ζ_k|ζ_{k+1}⟩
    pub overlap_phase: f64,
}

/// Build the cat basis `|C_k⟩ = 3 N_k Π_k |ζ_0⟩`.
pub fn cat_states(p: &ModelParams, space: FockSpace) -> Result<CatBasis> {
    let zeta0 = squeezed_coherent_kets(p, space)?[0].clone();
    let (a, theta) = overlap_squeezed_coherent(p)?;
    let mut cats = Vec::with_capacity(3);
    let mut norms = [0.0; 3];
    for k in 0..3 {
        let proj = space.sector_projector(k);
        let projected = proj.apply(&zeta0)?;
        norms[k] = 1.0 / (3.0 * (1.0 + 2.0 * a * (theta - TWO_PI_3 * k as f64).cos())).sqrt();
        let norm = projected.norm();
        if norm < 1e-12 {
            return Err(Error::Truncation(format!("sector {k} projection vanished")));
        }
        cats.push(StateVector::normalized(projected.amplitudes));
    }
    let cats: [StateVector; 3] = cats.try_into().unwrap();
    Ok(CatBasis {
        cats,
        norms,
        overlap_mag: a,
        overlap_phase: theta,
    })
}
