//! Stability predicates, closed-form eigenvalues, and an independent
//! numeric classifier for the linearized attitude system.
//!
//! The predicate route works purely on the inertia ratios; the numeric route
//! computes the eigenvalues of A itself (characteristic polynomial plus root
//! finder) and compares algebraic against geometric multiplicities, so the
//! two can cross-validate each other.

use crate::error::{Error, Result};
use crate::model::{OrbitalRate, SigmaTriple, SystemMatrices};
use crate::smallmat::{poly_roots, Complex, ComplexMatrix, PolyCoeffs};

/// Default tolerance for the stability predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The two derived quantities the stability conditions are written in,
/// plus the discriminant of the quartic factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPair {
    /// sigma1 * sigma3
    pub phi1: f64,
    /// 3 sigma1 + sigma3 sigma1 + 1
    pub phi2: f64,
    /// phi2^2 - 16 phi1
    pub delta: f64,
}

/// Derived condition quantities for a ratio triple.
pub fn phis(s: &SigmaTriple) -> PhiPair {
    let phi1 = s.sigma1 * s.sigma3;
    let phi2 = 3.0 * s.sigma1 + s.sigma3 * s.sigma1 + 1.0;
    PhiPair {
        phi1,
        phi2,
        delta: phi2 * phi2 - 16.0 * phi1,
    }
}

/// Three-way stability verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Unstable,
    PolynomiallyStableOnly,
    LyapunovStable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Unstable => "Unstable",
            Verdict::PolynomiallyStableOnly => "PolynomiallyStableOnly",
            Verdict::LyapunovStable => "LyapunovStable",
        }
    }

    pub fn from_name(s: &str) -> Option<Verdict> {
        match s {
            "Unstable" => Some(Verdict::Unstable),
            "PolynomiallyStableOnly" => Some(Verdict::PolynomiallyStableOnly),
            "LyapunovStable" => Some(Verdict::LyapunovStable),
            _ => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict plus a flag marking that some tested quantity sat within
/// tolerance of zero, i.e. the configuration is numerically on a boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityClass {
    pub verdict: Verdict,
    pub boundary: bool,
}

/// All eigenvalues have non-positive real parts: sigma2 >= 0, phi1 >= 0,
/// phi2 >= 0, delta >= 0, each tested against -tol.
pub fn is_polynomially_stable(s: &SigmaTriple, tol: f64) -> bool {
    debug_assert!(tol >= 0.0);
    let p = phis(s);
    s.sigma2 >= -tol && p.phi1 >= -tol && p.phi2 >= -tol && p.delta >= -tol
}

/// Lyapunov (neutral) stability: the same four quantities strictly positive,
/// each tested against +tol.
pub fn is_lyapunov_stable(s: &SigmaTriple, tol: f64) -> bool {
    debug_assert!(tol >= 0.0);
    let p = phis(s);
    s.sigma2 > tol && p.phi1 > tol && p.phi2 > tol && p.delta > tol
}

/// Predicate-based classification with a boundary flag.
pub fn classify(s: &SigmaTriple, tol: f64) -> StabilityClass {
    let p = phis(s);
    let boundary =
        s.sigma2.abs() <= tol || p.phi1.abs() <= tol || p.phi2.abs() <= tol || p.delta.abs() <= tol;
    let verdict = if is_lyapunov_stable(s, tol) {
        Verdict::LyapunovStable
    } else if is_polynomially_stable(s, tol) {
        Verdict::PolynomiallyStableOnly
    } else {
        Verdict::Unstable
    };
    StabilityClass { verdict, boundary }
}

/// The six eigenvalues in closed form, as three +/- pairs on the imaginary
/// axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSet {
    values: [Complex; 6],
}

impl EigenSet {
    pub fn values(&self) -> &[Complex; 6] {
        &self.values
    }

    /// The three nonnegative imaginary magnitudes (pitch pair first).
    pub fn pair_magnitudes(&self) -> [f64; 3] {
        [self.values[0].im, self.values[2].im, self.values[4].im]
    }
}

/// Closed-form eigenvalues, valid exactly when the non-strict conditions
/// hold (checked with zero tolerance; outside them the formula is wrong and
/// a `NotApplicable` error is returned).
pub fn closed_form_eigenvalues(s: &SigmaTriple, w: &OrbitalRate) -> Result<EigenSet> {
    if !is_polynomially_stable(s, 0.0) {
        return Err(Error::NotApplicable(
            "closed-form eigenvalues require the non-strict stability conditions".into(),
        ));
    }
    let p = phis(s);
    let w0 = w.omega0();
    let m1 = (3.0 * s.sigma2).max(0.0).sqrt() * w0;
    let sq = p.delta.max(0.0).sqrt();
    let m2 = ((p.phi2 + sq) / 2.0).max(0.0).sqrt() * w0;
    let m3 = ((p.phi2 - sq) / 2.0).max(0.0).sqrt() * w0;
    Ok(EigenSet {
        values: [
            Complex::new(0.0, m1),
            Complex::new(0.0, -m1),
            Complex::new(0.0, m2),
            Complex::new(0.0, -m2),
            Complex::new(0.0, m3),
            Complex::new(0.0, -m3),
        ],
    })
}

/// The characteristic polynomial of the rate-free matrix A0, factored as
/// (lambda^2 + 3 sigma2) * (lambda^4 + phi2 lambda^2 + 4 phi1).
pub fn factored_char_poly(s: &SigmaTriple) -> (PolyCoeffs, PolyCoeffs) {
    let p = phis(s);
    let quad = PolyCoeffs::new(vec![3.0 * s.sigma2, 0.0, 1.0]).expect("monic");
    let quart = PolyCoeffs::new(vec![4.0 * p.phi1, 0.0, p.phi2, 0.0, 1.0]).expect("monic");
    (quad, quart)
}

/// Numeric-oracle classification of a concrete system matrix.
///
/// Roots of det(lambda I - A) come from the characteristic polynomial and the
/// iterative root finder; any real part above `tol * omega0` means unstable;
/// otherwise imaginary-axis roots are clustered within `10 * tol * omega0`
/// and each cluster's algebraic multiplicity is compared with the geometric
/// multiplicity `6 - rank(lambda I - A)`, computed by complex elimination.
/// The boundary flag reports a repeated imaginary-axis eigenvalue.
pub fn classify_numeric(s: &SystemMatrices, tol: f64) -> Result<StabilityClass> {
    assert!(tol > 0.0, "tolerance must be positive");
    let cp = s.a().char_poly();
    let mut roots = poly_roots(&cp)?;
    let scale = if s.omega0() > 0.0 { s.omega0() } else { 1.0 };
    let re_tol = tol * scale;
    let cluster_radius = 10.0 * tol * scale;

    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });

    if roots.iter().any(|r| r.re > re_tol) {
        return Ok(StabilityClass {
            verdict: Verdict::Unstable,
            boundary: false,
        });
    }

    // Greedy clustering of the computed roots (running-mean centers).
    let mut centers: Vec<Complex> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &r in &roots {
        match centers
            .iter()
            .position(|c| (r - *c).abs() <= cluster_radius)
        {
            Some(i) => {
                let k = counts[i] as f64;
                centers[i] = (centers[i] * k + r) * (1.0 / (k + 1.0));
                counts[i] += 1;
            }
            None => {
                centers.push(r);
                counts.push(1);
            }
        }
    }

    let n = s.a().rows();
    let mut boundary = false;
    let mut lyapunov = true;
    for (center, &alg) in centers.iter().zip(&counts) {
        if center.re.abs() > re_tol {
            continue;
        }
        if alg > 1 {
            boundary = true;
        }
        let shifted = ComplexMatrix::shifted_from_real(s.a(), *center);
        let geom = n - shifted.numeric_rank(tol);
        if geom != alg {
            lyapunov = false;
        }
    }
    let verdict = if lyapunov {
        Verdict::LyapunovStable
    } else {
        Verdict::PolynomiallyStableOnly
    };
    Ok(StabilityClass { verdict, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, SpacecraftInertia};

    fn sig(jx: f64, jy: f64, jz: f64) -> SigmaTriple {
        SpacecraftInertia::new(jx, jy, jz).unwrap().sigmas()
    }

    #[test]
    fn phi_examples() {
        let p = phis(&sig(100.0, 120.0, 80.0));
        assert!((p.phi1 - 0.1).abs() < 1e-15);
        assert!((p.phi2 - 2.3).abs() < 1e-15);
        assert!((p.delta - 3.69).abs() < 1e-14);

        let p = phis(&SigmaTriple::new(0.0, 0.0, 0.0));
        assert_eq!((p.phi1, p.phi2, p.delta), (0.0, 1.0, 1.0));

        let p = phis(&sig(100.0, 95.0, 99.0));
        assert!((p.phi1 - 0.00202020202020202).abs() < 1e-15);
        assert!((p.phi2 - 0.8820202020202021).abs() < 1e-15);
        assert!((p.delta - 0.745637).abs() < 1e-6);
        assert!((p.delta - (p.phi2 * p.phi2 - 16.0 * p.phi1)).abs() < 1e-16);
    }

    #[test]
    fn predicate_examples() {
        let tol = 1e-9;
        assert!(is_polynomially_stable(&sig(100.0, 120.0, 80.0), tol));
        assert!(is_lyapunov_stable(&sig(100.0, 120.0, 80.0), tol));

        let zero = SigmaTriple::new(0.0, 0.0, 0.0);
        assert!(is_polynomially_stable(&zero, tol));
        assert!(!is_lyapunov_stable(&zero, tol));

        // sigma2 = -1/6 < 0
        assert!(!is_polynomially_stable(&sig(80.0, 120.0, 100.0), tol));
        assert!(!is_lyapunov_stable(&sig(80.0, 120.0, 100.0), tol));

        assert!(is_lyapunov_stable(&sig(100.0, 95.0, 99.0), tol));
    }

    #[test]
    fn classify_examples() {
        let tol = 1e-9;
        let c = classify(&sig(100.0, 120.0, 80.0), tol);
        assert_eq!(c.verdict, Verdict::LyapunovStable);
        assert!(!c.boundary);

        let c = classify(&sig(1.0, 1.0, 1.0), tol);
        assert_eq!(c.verdict, Verdict::PolynomiallyStableOnly);
        assert!(c.boundary);

        let c = classify(&sig(80.0, 120.0, 100.0), tol);
        assert_eq!(c.verdict, Verdict::Unstable);
    }

    #[test]
    fn closed_form_values() {
        let w = OrbitalRate::new(1.0).unwrap();
        let e = closed_form_eigenvalues(&sig(100.0, 120.0, 80.0), &w).unwrap();
        let mags = e.pair_magnitudes();
        assert!((mags[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((mags[1] - 1.4527452067086393).abs() < 1e-14);
        assert!((mags[2] - 0.43535200055251017).abs() < 1e-14);
        for pair in e.values().chunks(2) {
            assert_eq!(pair[0].re, 0.0);
            assert_eq!(pair[1].im, -pair[0].im);
        }

        let e = closed_form_eigenvalues(&SigmaTriple::new(0.0, 0.0, 0.0), &w).unwrap();
        let mags = e.pair_magnitudes();
        assert_eq!(mags[0], 0.0);
        assert!((mags[1] - 1.0).abs() < 1e-15);
        assert_eq!(mags[2], 0.0);

        // linear in omega0
        let e1 = closed_form_eigenvalues(&sig(100.0, 120.0, 80.0), &w).unwrap();
        let e2 = closed_form_eigenvalues(&sig(100.0, 120.0, 80.0), &OrbitalRate::new(2.0).unwrap())
            .unwrap();
        for (a, b) in e1.values().iter().zip(e2.values()) {
            assert!((b.im - 2.0 * a.im).abs() < 1e-14);
        }

        assert!(matches!(
            closed_form_eigenvalues(&sig(80.0, 120.0, 100.0), &w),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn factored_polynomials() {
        let (quad, quart) = factored_char_poly(&sig(100.0, 120.0, 80.0));
        assert_eq!(quad.coeffs(), &[0.5, 0.0, 1.0]);
        let q = quart.coeffs();
        assert!((q[0] - 0.4).abs() < 1e-15);
        assert_eq!(q[1], 0.0);
        assert!((q[2] - 2.3).abs() < 1e-15);
        assert_eq!(q[3], 0.0);
        assert_eq!(q[4], 1.0);

        let (quad, quart) = factored_char_poly(&SigmaTriple::new(0.0, 0.0, 0.0));
        assert_eq!(quad.coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(quart.coeffs(), &[0.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn factored_product_matches_block_char_poly() {
        use crate::model::block_decompose;
        let j = SpacecraftInertia::new(100.0, 120.0, 80.0).unwrap();
        let (quad, quart) = factored_char_poly(&j.sigmas());
        let product = quad.mul(&quart);
        let direct = block_decompose(&j).a0().char_poly();
        for (a, b) in product.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn numeric_classifier_examples() {
        let w = OrbitalRate::new(1.0).unwrap();
        let tol = 1e-9;

        let s = build_system(&SpacecraftInertia::new(100.0, 120.0, 80.0).unwrap(), &w);
        let c = classify_numeric(&s, tol).unwrap();
        assert_eq!(c.verdict, Verdict::LyapunovStable);
        assert!(!c.boundary);

        // symmetric body: zero eigenvalue with algebraic multiplicity 4 but
        // geometric multiplicity 3 (rank(A) = 3)
        let s = build_system(&SpacecraftInertia::new(1.0, 1.0, 1.0).unwrap(), &w);
        let c = classify_numeric(&s, tol).unwrap();
        assert_eq!(c.verdict, Verdict::PolynomiallyStableOnly);
        assert!(c.boundary);

        let s = build_system(&SpacecraftInertia::new(80.0, 120.0, 100.0).unwrap(), &w);
        let c = classify_numeric(&s, tol).unwrap();
        assert_eq!(c.verdict, Verdict::Unstable);
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [
            Verdict::Unstable,
            Verdict::PolynomiallyStableOnly,
            Verdict::LyapunovStable,
        ] {
            assert_eq!(Verdict::from_name(v.as_str()), Some(v));
        }
        assert_eq!(Verdict::from_name("bogus"), None);
    }
}
