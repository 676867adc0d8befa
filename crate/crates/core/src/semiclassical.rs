//! Semiclassical analysis of the three-photon Kerr parametric oscillator:
//! the coherent-state meta-potential `E(α, α*) = ⟨α|H|α⟩`, its stationary
//! points, the multistability thresholds and the phase-diagram regions.

use crate::C64;
use crate::{Error, Result};

/// Physical parameters of the model, all in units of the Kerr strength.
///
/// `delta` is the pump-cavity detuning Δ, `kerr` the Kerr coefficient U > 0
/// (the natural unit), `pump` the three-photon pump amplitude G ≥ 0, `kappa`
/// the single-photon loss rate κ and `kappa_e` the engineered dissipation
/// rate κ_e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub delta: f64,
    pub kerr: f64,
    pub pump: f64,
    pub kappa: f64,
    pub kappa_e: f64,
}

impl ModelParams {
    /// Closed-system parameters (κ = κ_e = 0).
    pub fn closed(delta: f64, kerr: f64, pump: f64) -> Self {
        Self::new(delta, kerr, pump, 0.0, 0.0)
    }

    pub fn new(delta: f64, kerr: f64, pump: f64, kappa: f64, kappa_e: f64) -> Self {
        assert!(kerr > 0.0, "Kerr strength must be positive");
        assert!(pump >= 0.0, "pump amplitude must be nonnegative");
        assert!(kappa >= 0.0 && kappa_e >= 0.0, "loss rates must be nonnegative");
        ModelParams {
            delta,
            kerr,
            pump,
            kappa,
            kappa_e,
        }
    }

    /// `9 G² - 8 U Δ`, the discriminant deciding whether finite stationary
    /// amplitudes exist.
    pub fn discriminant(&self) -> f64 {
        9.0 * self.pump * self.pump - 8.0 * self.kerr * self.delta
    }
}

/// Character of a stationary point of the meta-potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Maximum,
    Minimum,
    Saddle,
    /// Hessian numerically degenerate (e.g. the spinodal point); the kind is
    /// inferred from the dominant eigenvalue or higher-order behaviour.
    DegenerateMaximum,
}

/// A classified stationary point of `E(α, α*)`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryPoint {
    pub amplitude: C64,
    pub kind: PointKind,
    pub energy: f64,
}

/// Number of local maxima of the meta-potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseRegion {
    SingleMaximum,
    FourMaxima,
    ThreeMaxima,
}

/// Threshold curves of the phase diagram (all in units of U).
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    /// Δ_th = 9 G² / (8U): above it only the origin remains.
    pub delta_th: f64,
    /// G_th = (2√2/3) √(ΔU) for Δ ≥ 0; zero for Δ < 0 (no threshold).
    pub g_th: f64,
    /// Δ = G²/U: four equal-energy maxima.
    pub fourfold_delta: f64,
    /// Δ = -9 G²/U: vanishing squeezing of the well fluctuations.
    pub zero_squeeze_delta: f64,
}

/// Magnitudes and phases of the finite stationary amplitudes.
#[derive(Debug, Clone)]
pub struct StationaryAmplitudes {
    /// |α₊| — the three local/global maxima.
    pub mag_plus: f64,
    /// |α₋| as given by the closed form `(3G - √disc)/(4U)`; negative for
    /// Δ < 0, where the sign is absorbed into the π-shifted saddle phases.
    pub mag_minus: f64,
    /// Phases of the maxima: 2πk/3.
    pub maxima_phases: [f64; 3],
    /// Phases of the saddle branch: 2πk/3 for Δ > 0, π(2k+1)/3 for Δ < 0.
    pub saddle_phases: [f64; 3],
}

/// Meta-potential `E(α, α*) = -Δ|α|² - U|α|⁴ + G(α³ + α*³)`.
///
/// On the rays arg α = 2πk/3 it reduces to
/// `E(|α|) = -|α|² (U|α|² - 2G|α| + Δ)`.
pub fn meta_potential(p: &ModelParams, alpha: C64) -> f64 {
    let n = alpha.norm_sqr();
    let cubic = (alpha * alpha * alpha).re;
    -p.delta * n - p.kerr * n * n + 2.0 * p.pump * cubic
}

/// Gradient of the meta-potential in (Re α, Im α).
pub fn meta_gradient(p: &ModelParams, alpha: C64) -> (f64, f64) {
    let (x, y) = (alpha.re, alpha.im);
    let n = x * x + y * y;
    let gx = -2.0 * p.delta * x - 4.0 * p.kerr * n * x + 6.0 * p.pump * (x * x - y * y);
    let gy = -2.0 * p.delta * y - 4.0 * p.kerr * n * y - 12.0 * p.pump * x * y;
    (gx, gy)
}

/// Hessian of the meta-potential in (Re α, Im α) as (E_xx, E_xy, E_yy).
pub fn meta_hessian(p: &ModelParams, alpha: C64) -> (f64, f64, f64) {
    let (x, y) = (alpha.re, alpha.im);
    let n = x * x + y * y;
    let exx = -2.0 * p.delta - 4.0 * p.kerr * (n + 2.0 * x * x) + 12.0 * p.pump * x;
    let eyy = -2.0 * p.delta - 4.0 * p.kerr * (n + 2.0 * y * y) - 12.0 * p.pump * x;
    let exy = -8.0 * p.kerr * x * y - 12.0 * p.pump * y;
    (exx, exy, eyy)
}

/// Threshold curves for the given pump strength.
pub fn thresholds(p: &ModelParams) -> Thresholds {
    let g2u = p.pump * p.pump / p.kerr;
    let g_th = if p.delta >= 0.0 {
        2.0 * 2f64.sqrt() / 3.0 * (p.delta * p.kerr).sqrt()
    } else {
        0.0
    };
    Thresholds {
        delta_th: 9.0 / 8.0 * g2u,
        g_th,
        fourfold_delta: g2u,
        zero_squeeze_delta: -9.0 * g2u,
    }
}

/// Magnitudes `|α±| = (3G ± √(9G² - 8UΔ))/(4U)` and branch phases.
pub fn stationary_amplitudes(p: &ModelParams) -> Result<StationaryAmplitudes> {
    let disc = p.discriminant();
    if disc < 0.0 {
        return Err(Error::NoFiniteStationaryPoint { discriminant: disc });
    }
    let root = disc.sqrt();
    let mag_plus = (3.0 * p.pump + root) / (4.0 * p.kerr);
    let mag_minus = (3.0 * p.pump - root) / (4.0 * p.kerr);
    let thirds = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / 3.0;
    let shifted = |k: usize| std::f64::consts::PI * (2 * k + 1) as f64 / 3.0;
    let saddle_phases = if p.delta < 0.0 {
        [shifted(0), shifted(1), shifted(2)]
    } else {
        [thirds(0), thirds(1), thirds(2)]
    };
    Ok(StationaryAmplitudes {
        mag_plus,
        mag_minus,
        maxima_phases: [thirds(0), thirds(1), thirds(2)],
        saddle_phases,
    })
}

/// Phase-diagram region by the threshold formulas. Boundary conventions:
/// Δ = Δ_th counts as `FourMaxima`, Δ = 0 as `ThreeMaxima`.
pub fn classify_phase(p: &ModelParams) -> PhaseRegion {
    let th = thresholds(p);
    if p.delta > th.delta_th {
        PhaseRegion::SingleMaximum
    } else if p.delta > 0.0 {
        PhaseRegion::FourMaxima
    } else {
        PhaseRegion::ThreeMaxima
    }
}

const HESSIAN_DEGENERACY_TOL: f64 = 1e-9;

fn classify_point(p: &ModelParams, alpha: C64) -> StationaryPoint {
    let (exx, exy, eyy) = meta_hessian(p, alpha);
    // eigenvalues of the symmetric 2x2 Hessian
    let tr = exx + eyy;
    let det = exx * eyy - exy * exy;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let (l1, l2) = (0.5 * tr + disc, 0.5 * tr - disc);
    let tol = HESSIAN_DEGENERACY_TOL * p.kerr * p.kerr * (1.0 + alpha.norm_sqr());
    let kind = if l1.abs() < tol && l2.abs() < tol {
        // fully degenerate Hessian (origin at Δ = 0): cubic term dominates
        PointKind::Saddle
    } else if l1.abs() < tol || l2.abs() < tol {
        // one flat direction (spinodal merger): take the dominant sign
        let dominant = if l1.abs() > l2.abs() { l1 } else { l2 };
        if dominant < 0.0 {
            PointKind::DegenerateMaximum
        } else {
            PointKind::Minimum
        }
    } else if l1 < 0.0 && l2 < 0.0 {
        PointKind::Maximum
    } else if l1 > 0.0 && l2 > 0.0 {
        PointKind::Minimum
    } else {
        PointKind::Saddle
    };
    StationaryPoint {
        amplitude: alpha,
        kind,
        energy: meta_potential(p, alpha),
    }
}

/// All stationary points of the meta-potential (origin plus up to six finite
/// ones), Hessian-classified, with their energies.
pub fn classify_stationary_points(p: &ModelParams) -> Vec<StationaryPoint> {
    let mut pts = vec![classify_point(p, C64::from(0.0))];
    if let Ok(amps) = stationary_amplitudes(p) {
        if amps.mag_plus > 1e-12 {
            for phi in amps.maxima_phases {
                let alpha = C64::from_polar(amps.mag_plus, phi);
                pts.push(classify_point(p, alpha));
            }
        }
        let mag = amps.mag_minus.abs();
        if mag > 1e-12 {
            for phi in amps.saddle_phases {
                let alpha = C64::from_polar(mag, phi);
                pts.push(classify_point(p, alpha));
            }
        }
    }
    pts
}

/// `|E(α₊) - E(α₋)|`, the semiclassical energy barrier confining states in
/// the wells; the excited-spectrum envelope in the triplet-degenerate regime.
pub fn energy_barrier(p: &ModelParams) -> Result<f64> {
    let amps = stationary_amplitudes(p)?;
    let e_plus = meta_potential(p, C64::from_polar(amps.mag_plus, 0.0));
    let phi = if p.delta < 0.0 { std::f64::consts::PI / 3.0 } else { 0.0 };
    let e_minus = meta_potential(p, C64::from_polar(amps.mag_minus.abs(), phi));
    Ok((e_plus - e_minus).abs())
}
