use super::complex::Complex;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;
const STEP_TOL: f64 = 1e-14;
// Close root pairs keep the update chatter above STEP_TOL even after the
// roots have fully converged; a stalled iteration is accepted once every
// residual sits well inside the promised |p(r)| <= 1e-10 max|c| bound.
const STALL_WINDOW: usize = 64;
const RESIDUAL_ACCEPT: f64 = 3e-11;

/// Real polynomial coefficients in ascending degree order with a nonzero
/// leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(
                "polynomial coefficients must be finite".into(),
            ));
        }
        if *coeffs.last().unwrap() == 0.0 {
            return Err(Error::Domain("leading coefficient must be nonzero".into()));
        }
        Ok(PolyCoeffs { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::ZERO, |acc, &c| acc * x + Complex::from_re(c))
    }

    /// Product of two polynomials (coefficient convolution).
    pub fn mul(&self, other: &PolyCoeffs) -> PolyCoeffs {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyCoeffs { coeffs: out }
    }
}

/// Both roots of a degree-2 polynomial, in closed form. Real-discriminant
/// roots come back with exact zero imaginary parts; the stable Kahan form
/// avoids cancellation in the smaller root.
pub fn solve_quadratic(p: &PolyCoeffs) -> (Complex, Complex) {
    assert_eq!(p.degree(), 2, "solve_quadratic needs degree 2");
    let (c0, c1, c2) = (p.coeffs[0], p.coeffs[1], p.coeffs[2]);
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (c1 + c1.signum() * sq);
        if q == 0.0 {
            // c1 == 0 and disc == 0: double root at zero
            return (Complex::ZERO, Complex::ZERO);
        }
        (Complex::from_re(q / c2), Complex::from_re(c0 / q))
    } else {
        let re = -c1 / (2.0 * c2);
        let im = (-disc).sqrt() / (2.0 * c2);
        (Complex::new(re, im), Complex::new(re, -im))
    }
}

/// All complex roots by Durand-Kerner simultaneous iteration.
///
/// Exact zero trailing coefficients are deflated first, so exact zero roots
/// (including multiple ones) come back exactly. Initial guesses sit on a
/// circle of radius `1 + max|c_i/c_n|` with a fixed phase offset; iteration
/// stops when the largest update falls below 1e-14 of the current iterate
/// scale, and errors out past the iteration cap.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<Complex>> {
    assert!(p.degree() >= 1, "poly_roots needs degree >= 1");
    let mut coeffs = p.coeffs.clone();
    let mut roots = Vec::with_capacity(p.degree());
    while coeffs.len() > 1 && coeffs[0] == 0.0 {
        roots.push(Complex::ZERO);
        coeffs.remove(0);
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(Complex::from_re(-coeffs[0] / coeffs[1]));
        return Ok(roots);
    }

    let cn = coeffs[n];
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / cn).abs())
            .fold(0.0, f64::max);
    // Fixed phase offset keeps the start asymmetric to the real axis, which
    // real root pairs would otherwise lock onto.
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            Complex::from_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.7) * radius
        })
        .collect();
    let eval = |x: Complex| -> Complex {
        coeffs
            .iter()
            .rev()
            .fold(Complex::ZERO, |acc, &c| acc * x + Complex::from_re(c))
    };

    let max_c = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let accept_residual = RESIDUAL_ACCEPT * max_c;
    let mut steps = vec![Complex::ZERO; n];
    let mut best_step = f64::INFINITY;
    let mut stalled = 0usize;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            let mut denom = Complex::from_re(cn);
            for j in 0..n {
                if j != i {
                    denom = denom * (z[i] - z[j]);
                }
            }
            steps[i] = if denom == Complex::ZERO {
                Complex::ZERO
            } else {
                eval(z[i]) / denom
            };
        }
        let mut max_step: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            z[i] = z[i] - steps[i];
            if !z[i].is_finite() {
                return Err(Error::Convergence(MAX_ITERATIONS));
            }
            max_step = max_step.max(steps[i].abs());
            scale = scale.max(z[i].abs());
        }
        if max_step <= STEP_TOL * scale.max(1e-300) {
            roots.extend_from_slice(&z);
            return Ok(roots);
        }
        if max_step < 0.5 * best_step {
            best_step = max_step;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                if z.iter().all(|&zi| eval(zi).abs() <= accept_residual) {
                    roots.extend_from_slice(&z);
                    return Ok(roots);
                }
                stalled = 0;
            }
        }
    }
    Err(Error::Convergence(MAX_ITERATIONS))
}
