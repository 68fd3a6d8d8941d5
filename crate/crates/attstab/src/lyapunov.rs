//! The complete parametric family of solutions to A^T P + P A = 0, the
//! parameter constraint tying the family together, the diagonal special
//! member, and a deterministic grid search for a positive definite member.

use crate::error::{Error, Result};
use crate::model::{build_system, transform_matrices, OrbitalRate, SpacecraftInertia};
use crate::smallmat::Matrix;

/// Ratios with magnitude at or below this count as degenerate for the
/// solution family (the block matrices lose invertibility).
const SIGMA_DEGENERACY_TOL: f64 = 1e-12;

/// Relative tolerance on the parameter constraint residual.
const CONSTRAINT_TOL: f64 = 1e-12;

/// The four free scalars of the solution family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha13: f64,
}

impl AlphaParams {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, alpha13: f64) -> Self {
        AlphaParams {
            alpha1,
            alpha2,
            alpha3,
            alpha13,
        }
    }

    /// Largest parameter magnitude, used to scale the constraint tolerance.
    pub fn max_abs(&self) -> f64 {
        self.alpha1
            .abs()
            .max(self.alpha2.abs())
            .max(self.alpha3.abs())
            .max(self.alpha13.abs())
    }

    /// Completes (alpha2, alpha3, alpha13) by solving the constraint for
    /// alpha1. Requires sigma1 != 1.
    pub fn solving_constraint(
        j: &SpacecraftInertia,
        alpha2: f64,
        alpha3: f64,
        alpha13: f64,
    ) -> Result<Self> {
        let s = j.sigmas();
        let one_minus = 1.0 - s.sigma1;
        if one_minus.abs() <= SIGMA_DEGENERACY_TOL {
            return Err(Error::Degenerate(
                "sigma1 = 1: alpha1 is unconstrained, pick it directly".into(),
            ));
        }
        let alpha1 = j.jx_over_jz() * alpha3 - (4.0 * s.sigma1 - s.sigma3) * alpha13 / one_minus;
        Ok(AlphaParams::new(alpha1, alpha2, alpha3, alpha13))
    }
}

/// One member of the solution family: the three 2x2 blocks, the assembled
/// block-diagonal P0, the full P = H^T P0 H, and residual metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovSolution {
    pub(crate) p1: Matrix,
    pub(crate) p2: Matrix,
    pub(crate) p3: Matrix,
    pub(crate) p0: Matrix,
    pub(crate) p: Matrix,
    pub(crate) params: AlphaParams,
    pub(crate) is_pd: bool,
    pub(crate) residual: f64,
    pub(crate) omega0: f64,
}

impl LyapunovSolution {
    pub fn p1(&self) -> &Matrix {
        &self.p1
    }

    pub fn p2(&self) -> &Matrix {
        &self.p2
    }

    pub fn p3(&self) -> &Matrix {
        &self.p3
    }

    pub fn p0(&self) -> &Matrix {
        &self.p0
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn params(&self) -> &AlphaParams {
        &self.params
    }

    pub fn is_pd(&self) -> bool {
        self.is_pd
    }

    /// Infinity norm of A^T P + P A, recorded at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

/// Residual of the parameter constraint
/// (1 - sigma1)(alpha1 - (Jx/Jz) alpha3) + (4 sigma1 - sigma3) alpha13.
pub fn constraint_residual(j: &SpacecraftInertia, alpha1: f64, alpha3: f64, alpha13: f64) -> f64 {
    let s = j.sigmas();
    (1.0 - s.sigma1) * (alpha1 - j.jx_over_jz() * alpha3) + (4.0 * s.sigma1 - s.sigma3) * alpha13
}

fn check_nondegenerate(j: &SpacecraftInertia) -> Result<()> {
    let s = j.sigmas();
    for (name, v) in [
        ("sigma1", s.sigma1),
        ("sigma2", s.sigma2),
        ("sigma3", s.sigma3),
    ] {
        if v.abs() <= SIGMA_DEGENERACY_TOL {
            return Err(Error::Degenerate(format!(
                "{name} = {v} is zero within tolerance; the solution family requires sigma1 sigma2 sigma3 != 0"
            )));
        }
    }
    Ok(())
}

fn family_blocks(j: &SpacecraftInertia, params: &AlphaParams) -> (Matrix, Matrix, Matrix) {
    let s = j.sigmas();
    let a = params;
    let p2 = Matrix::from_rows(&[&[3.0 * s.sigma2 * a.alpha2, 0.0], &[0.0, a.alpha2]]);
    let p1 = Matrix::from_rows(&[
        &[
            s.sigma3 * (a.alpha3 + (1.0 - s.sigma1) * a.alpha13),
            -s.sigma3 * a.alpha13,
        ],
        &[-s.sigma3 * a.alpha13, a.alpha1],
    ]);
    let p3 = Matrix::from_rows(&[
        &[
            4.0 * s.sigma1 * (a.alpha1 + (1.0 - s.sigma3) * a.alpha13),
            4.0 * s.sigma1 * a.alpha13,
        ],
        &[4.0 * s.sigma1 * a.alpha13, a.alpha3],
    ]);
    (p1, p2, p3)
}

fn blocks_are_pd(p1: &Matrix, p2: &Matrix, p3: &Matrix) -> bool {
    // 2x2 symmetric blocks by construction; Sylvester on leading minors.
    let pd2 = |m: &Matrix| m[(0, 0)] > 0.0 && m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] > 0.0;
    pd2(p1) && pd2(p2) && pd2(p3)
}

/// Constructs the family member for the given parameters, verifying the
/// constraint, assembling P = H^T P0 H, and recording the equation residual.
pub fn solution_family(
    j: &SpacecraftInertia,
    w: &OrbitalRate,
    params: &AlphaParams,
) -> Result<LyapunovSolution> {
    check_nondegenerate(j)?;
    let res = constraint_residual(j, params.alpha1, params.alpha3, params.alpha13);
    let allowed = CONSTRAINT_TOL * params.max_abs().max(1.0);
    if res.abs() > allowed {
        return Err(Error::Constraint(format!(
            "parameter constraint residual {res:e} exceeds {allowed:e}"
        )));
    }
    let (p1, p2, p3) = family_blocks(j, params);
    let mut p0 = Matrix::zeros(6, 6);
    for i in 0..2 {
        for c in 0..2 {
            p0[(i, c)] = p2[(i, c)];
            p0[(2 + i, 2 + c)] = p1[(i, c)];
            p0[(4 + i, 4 + c)] = p3[(i, c)];
        }
    }
    let t = transform_matrices(w)?;
    let p = assemble_full(&p0, t.h())?;
    let sys = build_system(j, w);
    let res_lyap = residual(&p, sys.a())?;
    let is_pd = blocks_are_pd(&p1, &p2, &p3);
    Ok(LyapunovSolution {
        p1,
        p2,
        p3,
        p0,
        p,
        params: *params,
        is_pd,
        residual: res_lyap,
        omega0: w.omega0(),
    })
}

/// The diagonal special member: alpha13 = 0 and alpha1 = (Jx/Jz) alpha3,
/// which satisfies the constraint identically.
pub fn special_solution(
    j: &SpacecraftInertia,
    w: &OrbitalRate,
    alpha2: f64,
    alpha3: f64,
) -> Result<LyapunovSolution> {
    let params = AlphaParams::new(j.jx_over_jz() * alpha3, alpha2, alpha3, 0.0);
    solution_family(j, w, &params)
}

/// Range metadata for a failed positive-definite search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanInfo {
    /// Number of candidate parameter points examined.
    pub candidates: usize,
    /// Magnitude range of the scanned alpha13 grid.
    pub alpha13_abs_range: (f64, f64),
}

/// Outcome of [`find_positive_definite`].
#[derive(Clone, Debug, PartialEq)]
pub enum PdSearch {
    Found(Box<LyapunovSolution>),
    NotFound(ScanInfo),
}

impl PdSearch {
    pub fn found(self) -> Option<LyapunovSolution> {
        match self {
            PdSearch::Found(sol) => Some(*sol),
            PdSearch::NotFound(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, PdSearch::Found(_))
    }
}

const SCAN_POINTS_PER_SIGN: usize = 60;
const SCAN_ABS_MIN: f64 = 1e-3;
const SCAN_ABS_MAX: f64 = 1e3;

fn alpha13_candidates() -> Vec<f64> {
    let mut out = Vec::with_capacity(1 + 2 * SCAN_POINTS_PER_SIGN);
    out.push(0.0);
    let (lo, hi) = (SCAN_ABS_MIN.log10(), SCAN_ABS_MAX.log10());
    for k in 0..SCAN_POINTS_PER_SIGN {
        let mag = 10f64.powf(lo + (hi - lo) * k as f64 / (SCAN_POINTS_PER_SIGN - 1) as f64);
        out.push(mag);
        out.push(-mag);
    }
    out
}

/// Deterministic search for a positive definite family member.
///
/// With alpha2 = alpha3 = 1 fixed and alpha1 eliminated through the
/// constraint, alpha13 is scanned over zero plus a signed logarithmic grid
/// (1e-3 to 1e3, 60 points per sign); the first candidate whose three blocks
/// are positive definite wins. When sigma1 = 1 the constraint forces
/// alpha13 = 0 and (alpha1, alpha3) are scanned over a positive grid
/// instead. The search never consults the stability predicates, so it stays
/// an independent existence test.
pub fn find_positive_definite(j: &SpacecraftInertia, w: &OrbitalRate) -> Result<PdSearch> {
    check_nondegenerate(j)?;
    let s = j.sigmas();
    let mut tried = 0usize;

    if (1.0 - s.sigma1).abs() > SIGMA_DEGENERACY_TOL {
        for alpha13 in alpha13_candidates() {
            tried += 1;
            let params = AlphaParams::solving_constraint(j, 1.0, 1.0, alpha13)?;
            let (p1, p2, p3) = family_blocks(j, &params);
            if blocks_are_pd(&p1, &p2, &p3) {
                let sol = solution_family(j, w, &params)?;
                return Ok(PdSearch::Found(Box::new(sol)));
            }
        }
    } else {
        // sigma1 = 1 forces alpha13 = 0 (then sigma3 = 1 and 4 sigma1 - sigma3
        // = 3 != 0), leaving alpha1 and alpha3 free.
        let grid: Vec<f64> = (0..25)
            .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 24.0))
            .collect();
        for &alpha1 in &grid {
            for &alpha3 in &grid {
                tried += 1;
                let params = AlphaParams::new(alpha1, 1.0, alpha3, 0.0);
                if constraint_residual(j, alpha1, alpha3, 0.0).abs()
                    > CONSTRAINT_TOL * params.max_abs().max(1.0)
                {
                    continue;
                }
                let (p1, p2, p3) = family_blocks(j, &params);
                if blocks_are_pd(&p1, &p2, &p3) {
                    let sol = solution_family(j, w, &params)?;
                    return Ok(PdSearch::Found(Box::new(sol)));
                }
            }
        }
    }
    Ok(PdSearch::NotFound(ScanInfo {
        candidates: tried,
        alpha13_abs_range: (SCAN_ABS_MIN, SCAN_ABS_MAX),
    }))
}

/// Infinity norm of a^T p + p a.
pub fn residual(p: &Matrix, a: &Matrix) -> Result<f64> {
    if !p.is_square() || !a.is_square() || p.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "residual needs equal square shapes, got {}x{} and {}x{}",
            p.rows(),
            p.cols(),
            a.rows(),
            a.cols()
        )));
    }
    let lhs = a.transpose().mul(p)?.add(&p.mul(a)?)?;
    Ok(lhs.inf_norm())
}

/// Congruence assembly h^T p0 h; preserves symmetry and definiteness for
/// invertible h.
pub fn assemble_full(p0: &Matrix, h: &Matrix) -> Result<Matrix> {
    if !p0.is_square() || !h.is_square() || p0.rows() != h.rows() {
        return Err(Error::Shape(format!(
            "congruence needs equal square shapes, got {}x{} and {}x{}",
            p0.rows(),
            p0.cols(),
            h.rows(),
            h.cols()
        )));
    }
    h.transpose().mul(p0)?.mul(h)
}
