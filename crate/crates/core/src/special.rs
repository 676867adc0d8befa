//! Scalar special functions needed by the closed-form state expressions:
//! Airy functions, the modified Bessel function of the first kind at small
//! argument, hypergeometric series, the log-gamma function and Hermite
//! oscillator eigenfunctions.
//!
//! The Airy pair is assembled from three representations chosen by argument:
//! the Maclaurin series where it is cancellation-free, the large-|x|
//! asymptotic expansions, and — for `Ai` in the awkward window between them —
//! Taylor stepping of the defining ODE `y'' = x y` downward from a seed where
//! the asymptotics are reliable. Downward stepping keeps the solution stable
//! against contamination by the growing companion solution.

/// Ai(0) = 3^{-2/3} / Γ(2/3)
const AI0: f64 = 0.355_028_053_887_817_24;
/// -Ai'(0) = 3^{-1/3} / Γ(1/3)
const AIP0: f64 = 0.258_819_403_792_806_8;

// Branch boundaries are placed where the methods on both sides agree to
// ~1e-11 or better, so that finite differences across a seam stay quiet.
// The Maclaurin series loses ~e^{(4/3)|x|^{3/2}} digits to cancellation on
// the negative axis; on the positive axis the Ai combination cancels even
// faster, so Ai switches to downward Taylor stepping already at x = 1.
const SERIES_NEG_EDGE: f64 = -7.25;
const AI_SERIES_POS_EDGE: f64 = 1.0;
const AI_TAYLOR_SEED: f64 = 12.0;

/// Maclaurin pair (f, g, f', g') of the standard Airy building blocks.
fn airy_fg(x: f64) -> (f64, f64, f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut fp) = (1.0, 0.0);
    let (mut g, mut gp) = (x, 1.0);
    let mut tf = 1.0;
    let mut tg = x;
    let mut k = 0usize;
    loop {
        let kf = 3 * k;
        tf *= x3 / (((kf + 2) * (kf + 3)) as f64);
        tg *= x3 / (((kf + 3) * (kf + 4)) as f64);
        k += 1;
        f += tf;
        g += tg;
        if x != 0.0 {
            fp += tf * (3 * k) as f64 / x;
            gp += tg * (3 * k + 1) as f64 / x;
        }
        if tf.abs() < 1e-18 * f.abs() && tg.abs() < 1e-18 * g.abs().max(1e-300) || k > 400 {
            break;
        }
    }
    (f, g, fp, gp)
}

/// Asymptotic u_k, v_k coefficient pair sums, truncated at the smallest term.
fn asymptotic_sums(zeta: f64, alternate: bool) -> (f64, f64) {
    let mut u = 1.0f64;
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut prev = 1.0f64;
    for k in 1..=40usize {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let term = u / zeta.powi(k as i32);
        if term.abs() > prev.abs() {
            break; // divergent tail reached
        }
        prev = term;
        let sgn = if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
        su += sgn * term;
        sv += sgn * term * (6.0 * kf + 1.0) / (1.0 - 6.0 * kf);
        if term.abs() < 1e-18 {
            break;
        }
    }
    (su, sv)
}

/// (Ai, Ai') from the x -> +inf expansion.
fn airy_ai_asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (su, sv) = asymptotic_sums(zeta, true);
    let pref = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    (pref / x.powf(0.25) * su, -pref * x.powf(0.25) * sv)
}

/// (Bi, Bi') from the x -> +inf expansion.
fn airy_bi_asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (su, sv) = asymptotic_sums(zeta, false);
    let pref = zeta.exp() / std::f64::consts::PI.sqrt();
    (pref / x.powf(0.25) * su, pref * x.powf(0.25) * sv)
}

/// (Ai, Bi) from the oscillatory x -> -inf expansion.
fn airy_asymptotic_neg(x: f64) -> (f64, f64) {
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    // split the u-series into even and odd parts with alternating signs
    let mut u = 1.0f64;
    let (mut p, mut q) = (1.0, 0.0);
    let mut prev = 1.0f64;
    for k in 1..=40usize {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let term = u / zeta.powi(k as i32);
        if term.abs() > prev.abs() {
            break;
        }
        prev = term;
        let sgn = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
        if k % 2 == 0 {
            p += sgn * term;
        } else {
            q += sgn * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let pref = 1.0 / (std::f64::consts::PI.sqrt() * z.powf(0.25));
    let arg = zeta - std::f64::consts::FRAC_PI_4;
    let ai = pref * (arg.cos() * p + arg.sin() * q);
    let bi = pref * (-arg.sin() * p + arg.cos() * q);
    (ai, bi)
}

/// Taylor-step the solution of `y'' = x y` from `(x0, y, yp)` to `x0 + h`.
fn airy_taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    const TERMS: usize = 32;
    let mut c = [0.0f64; TERMS];
    c[0] = y;
    c[1] = yp;
    for m in 0..TERMS - 2 {
        let lower = if m == 0 { 0.0 } else { c[m - 1] };
        c[m + 2] = (x0 * c[m] + lower) / (((m + 1) * (m + 2)) as f64);
    }
    let mut val = 0.0;
    let mut der = 0.0;
    for m in (0..TERMS).rev() {
        val = val * h + c[m];
        if m > 0 {
            der = der * h + c[m] * m as f64;
        }
    }
    // der currently holds sum m c_m h^{m-1} via Horner in h
    (val, der)
}

/// Airy function of the first kind.
pub fn airy_ai(x: f64) -> f64 {
    if x < SERIES_NEG_EDGE {
        airy_asymptotic_neg(x).0
    } else if x <= AI_SERIES_POS_EDGE {
        let (f, g, _, _) = airy_fg(x);
        AI0 * f - AIP0 * g
    } else if x < AI_TAYLOR_SEED {
        let (mut y, mut yp) = airy_ai_asymptotic_pos(AI_TAYLOR_SEED);
        let mut pos = AI_TAYLOR_SEED;
        while pos - x > 1e-14 {
            let h = -(pos - x).min(0.75);
            let (ny, nyp) = airy_taylor_step(pos, y, yp, h);
            y = ny;
            yp = nyp;
            pos += h;
        }
        y
    } else {
        airy_ai_asymptotic_pos(x).0
    }
}

/// Airy function of the second kind.
pub fn airy_bi(x: f64) -> f64 {
    if x < SERIES_NEG_EDGE {
        airy_asymptotic_neg(x).1
    } else if x <= 30.0 {
        // all series terms share one sign for x > 0, so no cancellation
        let (f, g, _, _) = airy_fg(x);
        3.0f64.sqrt() * (AI0 * f + AIP0 * g)
    } else {
        airy_bi_asymptotic_pos(x).0
    }
}

/// Derivatives (Ai', Bi') — only exposed for the Wronskian self-test.
pub fn airy_ai_prime(x: f64) -> f64 {
    if x < SERIES_NEG_EDGE {
        // central difference is good enough outside the library's hot path
        let h = 1e-5;
        return (airy_ai(x + h) - airy_ai(x - h)) / (2.0 * h);
    }
    if x <= AI_SERIES_POS_EDGE {
        let (_, _, fp, gp) = airy_fg(x);
        AI0 * fp - AIP0 * gp
    } else if x < AI_TAYLOR_SEED {
        let (mut y, mut yp) = airy_ai_asymptotic_pos(AI_TAYLOR_SEED);
        let mut pos = AI_TAYLOR_SEED;
        while pos - x > 1e-14 {
            let h = -(pos - x).min(0.75);
            let (ny, nyp) = airy_taylor_step(pos, y, yp, h);
            y = ny;
            yp = nyp;
            pos += h;
        }
        yp
    } else {
        airy_ai_asymptotic_pos(x).1
    }
}

pub fn airy_bi_prime(x: f64) -> f64 {
    if x < SERIES_NEG_EDGE {
        let h = 1e-5;
        return (airy_bi(x + h) - airy_bi(x - h)) / (2.0 * h);
    }
    if x <= 30.0 {
        let (_, _, fp, gp) = airy_fg(x);
        3.0f64.sqrt() * (AI0 * fp + AIP0 * gp)
    } else {
        airy_bi_asymptotic_pos(x).1
    }
}

/// Log-gamma by the Lanczos approximation (g = 7, 9 terms), |error| < 1e-13
/// for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let xm = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (xm + (i + 1) as f64);
    }
    let t = xm + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (xm + 0.5) * t.ln() - t + acc.ln()
}

/// Modified Bessel function of the first kind by its power series;
/// adequate for the small arguments used by the normalization cross-checks.
pub fn bessel_i(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut sum = 0.0;
    let mut log_m_fact = 0.0;
    for m in 0..200 {
        if m > 0 {
            log_m_fact += (m as f64).ln();
        }
        let log_term = (2.0 * m as f64 + nu) * half.ln() - log_m_fact - ln_gamma(m as f64 + nu + 1.0);
        let term = log_term.exp();
        sum += term;
        if m > 4 && term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z) by series.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..500 {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        if n > 4 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Generalized hypergeometric ₂F₂(a1, a2; b1, b2; z) by series.
pub fn hyp2f2(a1: f64, a2: f64, b1: f64, b2: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..500 {
        let nf = n as f64;
        term *= (a1 + nf) * (a2 + nf) / ((b1 + nf) * (b2 + nf)) * z / (nf + 1.0);
        sum += term;
        if n > 4 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Normalized harmonic-oscillator eigenfunctions h_0..h_{nmax-1} at `x`
/// (weight e^{-x²/2}; orthonormal on the real line).
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(nmax);
    if nmax == 0 {
        return h;
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    h.push(h0);
    if nmax == 1 {
        return h;
    }
    h.push(std::f64::consts::SQRT_2 * x * h0);
    for n in 1..nmax - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values computed with 30-digit arithmetic
    const AIRY_REF: [(f64, f64, f64, f64, f64); 17] = [
        (-30.0, -0.087968188456842163, -0.22444694220056632, 1.2286206026374851, -0.48369472582768149),
        (-25.0, 0.16352657883042947, -0.19214681569037802, 0.96237885138769741, 0.81571971575460586),
        (-15.0, 0.27821749087082893, -0.069126594531010061, 0.27237420430864202, 1.0764297530843748),
        (-9.6, 0.31465158331169333, -0.060912927360113707, 0.19695044232125804, 0.97349917954711328),
        (-7.3, 0.33577037051514728, 0.070874113769896474, -0.18009580448329366, 0.90998427043632458),
        (-4.2, 0.089210763239450718, 0.38346736127094463, -0.7822156078624519, 0.20575691122112291),
        (-1.0, 0.53556088329235212, 0.10399738949694461, -0.010160567116645209, 0.59237562642279235),
        (0.0, 0.35502805388781724, 0.61492662744600074, -0.2588194037928068, 0.44828835735382636),
        (0.5, 0.23169360648083349, 0.85427704310315549, -0.22491053266468389, 0.5445725641405923),
        (2.0, 0.034924130423274379, 3.2980949999782147, -0.053090384433653632, 4.1006820499328899),
        (4.5, 0.00033025032351430898, 227.58808183559972, -0.00071786656755750889, 469.1350773279664),
        (6.0, 9.9476943602528896e-6, 6536.4461048098635, -2.4765200397034955e-5, 15725.602621930477),
        (8.5, 1.0997009755195507e-8, 4965319.541471302, -3.2377254404476023e-8, 14326301.030662058),
        (11.0, 4.2262758649603596e-12, 11355782530.430476, -1.4111441246628517e-11, 37400168196.926977),
        (13.0, 3.9817760788333354e-15, 11086706719059.405, -1.4432080573972626e-14, 39757544969908.345),
        (20.0, 1.6916728686705403e-27, 2.1037650496511038e25, -7.586391625748355e-27, 9.3818393361339643e25),
        (33.0, 1.528368213265634e-56, 1.8127464087787362e54, -8.7913476199906379e-56, 1.0399656741063776e55),
    ];

    #[test]
    fn airy_reference_values() {
        for &(x, ai, bi, aip, bip) in AIRY_REF.iter() {
            let scale_ai = ai.abs().max(1e-300);
            let scale_bi = bi.abs().max(1e-300);
            assert!(
                (airy_ai(x) - ai).abs() / scale_ai < 1e-10,
                "Ai({x}): {} vs {ai}",
                airy_ai(x)
            );
            assert!(
                (airy_bi(x) - bi).abs() / scale_bi < 1e-10,
                "Bi({x}): {} vs {bi}",
                airy_bi(x)
            );
            if x >= SERIES_NEG_EDGE {
                assert!((airy_ai_prime(x) - aip).abs() / aip.abs() < 1e-9, "Ai'({x})");
                assert!((airy_bi_prime(x) - bip).abs() / bip.abs() < 1e-9, "Bi'({x})");
            }
        }
    }

    #[test]
    fn airy_wronskian() {
        // Ai Bi' - Ai' Bi = 1/pi everywhere
        let target = 1.0 / std::f64::consts::PI;
        for i in 0..82 {
            let x = -7.1 + 0.2 * i as f64;
            let w = airy_ai(x) * airy_bi_prime(x) - airy_ai_prime(x) * airy_bi(x);
            assert!(
                (w - target).abs() < 1e-10 * target * airy_bi(x).abs().max(1.0),
                "Wronskian off at x={x}: {w}"
            );
        }
    }

    #[test]
    fn ln_gamma_reference() {
        for (z, expect) in [
            (0.3333333333333333, 0.98542064692776713),
            (4.3, 2.1810210463671689),
            (11.75, 16.89437797963419),
            (1.0, 0.0),
            (2.0, 0.0),
        ] {
            assert!((ln_gamma(z) - expect).abs() < 1e-12, "lngamma({z})");
        }
    }

    #[test]
    fn bessel_reference() {
        for (nu, x, expect) in [
            (-1.0 / 6.0, 0.1666666, 1.3516445075913787),
            (1.0 / 6.0, 2.6666666, 3.7084430173512392),
            (-1.0 / 6.0, 2.6666666, 3.7248201354519038),
            (1.0 / 6.0, 0.04, 0.56178561487011286),
        ] {
            assert!(
                (bessel_i(nu, x) - expect).abs() / expect < 1e-13,
                "I_{nu}({x}) = {} vs {expect}",
                bessel_i(nu, x)
            );
        }
    }

    #[test]
    fn hypergeometric_sanity() {
        // 1F1(a;a;z) = e^z
        assert!((hyp1f1(0.7, 0.7, 1.3) - 1.3f64.exp()).abs() < 1e-12);
        // 2F2 with matching upper/lower pair reduces to 1F1
        let a = hyp2f2(1.0, 0.9, 0.9, 1.5, 0.8);
        let b = hyp1f1(1.0, 1.5, 0.8);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn hermite_functions_orthonormal() {
        // quadrature check of orthonormality on a wide grid
        let n = 6;
        let xs: Vec<f64> = (0..4001).map(|i| -20.0 + 0.01 * i as f64).collect();
        let mut gram = vec![vec![0.0; n]; n];
        for &x in &xs {
            let h = hermite_functions(n, x);
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += h[i] * h[j] * 0.01;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expect).abs() < 1e-8, "gram[{i}][{j}] = {}", gram[i][j]);
            }
        }
    }
}
