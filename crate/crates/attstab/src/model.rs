//! Construction of the linearized gravity-gradient attitude system: inertia
//! ratios, orbital rate, the 6x6/6x3 state-space matrices, the scaling
//! transform pair, and the rate-free block form.

use crate::error::{Error, Result};
use crate::smallmat::Matrix;

/// Earth gravitational parameter, m^3/s^2.
pub const MU_EARTH: f64 = 3.986e14;

/// Principal moments of inertia, kg m^2, all strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacecraftInertia {
    jx: f64,
    jy: f64,
    jz: f64,
}

impl SpacecraftInertia {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Result<Self> {
        for (name, v) in [("jx", jx), ("jy", jy), ("jz", jz)] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "inertia {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(SpacecraftInertia { jx, jy, jz })
    }

    /// Like [`SpacecraftInertia::new`] but additionally requires the rigid-body
    /// triangle inequalities, which every physically realizable body satisfies.
    pub fn new_physical(jx: f64, jy: f64, jz: f64) -> Result<Self> {
        let j = Self::new(jx, jy, jz)?;
        if jx + jy <= jz || jy + jz <= jx || jx + jz <= jy {
            return Err(Error::Domain(
                "inertia triple violates the rigid-body triangle inequalities".into(),
            ));
        }
        Ok(j)
    }

    pub fn jx(&self) -> f64 {
        self.jx
    }

    pub fn jy(&self) -> f64 {
        self.jy
    }

    pub fn jz(&self) -> f64 {
        self.jz
    }

    pub fn jx_over_jz(&self) -> f64 {
        self.jx / self.jz
    }

    /// The dimensionless inertia ratios determining stability.
    pub fn sigmas(&self) -> SigmaTriple {
        SigmaTriple {
            sigma1: (self.jy - self.jz) / self.jx,
            sigma2: (self.jx - self.jz) / self.jy,
            sigma3: (self.jy - self.jx) / self.jz,
        }
    }
}

/// Dimensionless inertia ratios (sigma1, sigma2, sigma3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaTriple {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

impl SigmaTriple {
    /// Direct construction from already-computed ratios.
    pub fn new(sigma1: f64, sigma2: f64, sigma3: f64) -> Self {
        SigmaTriple {
            sigma1,
            sigma2,
            sigma3,
        }
    }
}

/// Ratios from the two shape scalars beta1 = Jx/Jy, beta2 = Jy/Jz.
pub fn sigmas_from_beta(beta1: f64, beta2: f64) -> Result<SigmaTriple> {
    if beta1.min(beta2) <= 0.0 || !beta1.is_finite() || !beta2.is_finite() {
        return Err(Error::Domain(format!(
            "beta ratios must be finite and positive, got ({beta1}, {beta2})"
        )));
    }
    Ok(SigmaTriple {
        sigma1: 1.0 / beta1 - 1.0 / (beta1 * beta2),
        sigma2: beta1 - 1.0 / beta2,
        sigma3: beta2 - beta1 * beta2,
    })
}

/// Orbital rate omega0 (rad/s), optionally remembering the semimajor axis it
/// came from. omega0 = 0 is accepted as the degenerate no-orbit edge; the
/// scaling transform rejects it where division by omega0 occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitalRate {
    omega0: f64,
    semimajor: Option<f64>,
}

impl OrbitalRate {
    pub fn new(omega0: f64) -> Result<Self> {
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(Error::Domain(format!(
                "orbital rate must be finite and non-negative, got {omega0}"
            )));
        }
        Ok(OrbitalRate {
            omega0,
            semimajor: None,
        })
    }

    /// omega0 = sqrt(mu / r^3) for a circular orbit of semimajor axis r (m).
    pub fn from_semimajor(r: f64) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::Domain(format!(
                "semimajor axis must be finite and positive, got {r}"
            )));
        }
        Ok(OrbitalRate {
            omega0: (MU_EARTH / (r * r * r)).sqrt(),
            semimajor: Some(r),
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn semimajor(&self) -> Option<f64> {
        self.semimajor
    }
}

/// Orbital rate from a semimajor axis in meters.
pub fn orbital_rate(r: f64) -> Result<OrbitalRate> {
    OrbitalRate::from_semimajor(r)
}

/// The 6x6 state matrix A and 6x3 input matrix B at a given orbital rate,
/// with the inertia they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrices {
    pub(crate) a: Matrix,
    pub(crate) b: Matrix,
    pub(crate) omega0: f64,
    pub(crate) inertia: SpacecraftInertia,
}

impl SystemMatrices {
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn inertia(&self) -> &SpacecraftInertia {
        &self.inertia
    }
}

/// Builds A and B: rows 1-3 are the kinematic identity half, row 4 carries
/// the roll stiffness and roll-yaw coupling, row 5 the pitch stiffness, row 6
/// the yaw stiffness and coupling; B's lower block is diag(1/Jx, 1/Jy, 1/Jz).
pub fn build_system(j: &SpacecraftInertia, w: &OrbitalRate) -> SystemMatrices {
    let s = j.sigmas();
    let w0 = w.omega0();
    let mut a = Matrix::zeros(6, 6);
    a[(0, 3)] = 1.0;
    a[(1, 4)] = 1.0;
    a[(2, 5)] = 1.0;
    a[(3, 0)] = -4.0 * w0 * w0 * s.sigma1;
    a[(3, 5)] = w0 * (1.0 - s.sigma1);
    a[(4, 1)] = -3.0 * w0 * w0 * s.sigma2;
    a[(5, 2)] = -w0 * w0 * s.sigma3;
    a[(5, 3)] = w0 * (s.sigma3 - 1.0);
    let mut b = Matrix::zeros(6, 3);
    b[(3, 0)] = 1.0 / j.jx();
    b[(4, 1)] = 1.0 / j.jy();
    b[(5, 2)] = 1.0 / j.jz();
    SystemMatrices {
        a,
        b,
        omega0: w0,
        inertia: *j,
    }
}

/// The scaling transform pair (H, L) at a fixed orbital rate, with the
/// analytically known inverse of H. H is a permutation with 1/omega0 scaling
/// on the rate coordinates, so its inverse is written down directly.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformPair {
    pub(crate) h: Matrix,
    pub(crate) h_inv: Matrix,
    pub(crate) l: Matrix,
    pub(crate) omega0: f64,
}

impl TransformPair {
    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn h_inv(&self) -> &Matrix {
        &self.h_inv
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
}

/// Builds (H, L) for omega0 > 0.
pub fn transform_matrices(w: &OrbitalRate) -> Result<TransformPair> {
    let w0 = w.omega0();
    if w0 <= 0.0 {
        return Err(Error::Domain(
            "transform matrices require omega0 > 0 (H divides by omega0)".into(),
        ));
    }
    let iw = 1.0 / w0;
    let mut h = Matrix::zeros(6, 6);
    h[(0, 1)] = 1.0;
    h[(1, 4)] = iw;
    h[(2, 2)] = 1.0;
    h[(3, 3)] = iw;
    h[(4, 0)] = 1.0;
    h[(5, 5)] = iw;
    let mut h_inv = Matrix::zeros(6, 6);
    h_inv[(0, 4)] = 1.0;
    h_inv[(1, 0)] = 1.0;
    h_inv[(2, 2)] = 1.0;
    h_inv[(3, 3)] = w0;
    h_inv[(4, 1)] = w0;
    h_inv[(5, 5)] = w0;
    let w2 = w0 * w0;
    let mut l = Matrix::zeros(3, 3);
    l[(0, 1)] = w2;
    l[(1, 0)] = w2;
    l[(2, 2)] = w2;
    Ok(TransformPair {
        h,
        h_inv,
        l,
        omega0: w0,
    })
}

/// Rate-free block decomposition: the three 2x2 blocks A1, A2, A3 and
/// input columns B1, B2, B3, plus the assembled A0 = diag(A2, [[0,A1],[A3,0]])
/// and B0 = diag(B2, B1, B3).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockForm {
    pub(crate) a1: Matrix,
    pub(crate) a2: Matrix,
    pub(crate) a3: Matrix,
    pub(crate) b1: Matrix,
    pub(crate) b2: Matrix,
    pub(crate) b3: Matrix,
    pub(crate) a0: Matrix,
    pub(crate) b0: Matrix,
    pub(crate) inertia: SpacecraftInertia,
}

impl BlockForm {
    pub fn a1(&self) -> &Matrix {
        &self.a1
    }

    pub fn a2(&self) -> &Matrix {
        &self.a2
    }

    pub fn a3(&self) -> &Matrix {
        &self.a3
    }

    pub fn b1(&self) -> &Matrix {
        &self.b1
    }

    pub fn b2(&self) -> &Matrix {
        &self.b2
    }

    pub fn b3(&self) -> &Matrix {
        &self.b3
    }

    pub fn a0(&self) -> &Matrix {
        &self.a0
    }

    pub fn b0(&self) -> &Matrix {
        &self.b0
    }

    pub fn inertia(&self) -> &SpacecraftInertia {
        &self.inertia
    }
}

pub fn block_decompose(j: &SpacecraftInertia) -> BlockForm {
    let s = j.sigmas();
    let a1 = Matrix::from_rows(&[&[0.0, 1.0], &[-4.0 * s.sigma1, 1.0 - s.sigma1]]);
    let a2 = Matrix::from_rows(&[&[0.0, 1.0], &[-3.0 * s.sigma2, 0.0]]);
    let a3 = Matrix::from_rows(&[&[0.0, 1.0], &[-s.sigma3, s.sigma3 - 1.0]]);
    let b1 = Matrix::from_rows(&[&[0.0], &[1.0 / j.jx()]]);
    let b2 = Matrix::from_rows(&[&[0.0], &[1.0 / j.jy()]]);
    let b3 = Matrix::from_rows(&[&[0.0], &[1.0 / j.jz()]]);

    let mut a0 = Matrix::zeros(6, 6);
    for i in 0..2 {
        for c in 0..2 {
            a0[(i, c)] = a2[(i, c)];
            a0[(2 + i, 4 + c)] = a1[(i, c)];
            a0[(4 + i, 2 + c)] = a3[(i, c)];
        }
    }
    let mut b0 = Matrix::zeros(6, 3);
    for i in 0..2 {
        b0[(i, 0)] = b2[(i, 0)];
        b0[(2 + i, 1)] = b1[(i, 0)];
        b0[(4 + i, 2)] = b3[(i, 0)];
    }
    BlockForm {
        a1,
        a2,
        a3,
        b1,
        b2,
        b3,
        a0,
        b0,
        inertia: *j,
    }
}

/// Residuals of the similarity identities H A H^-1 = omega0 A0 and
/// H B L = omega0 B0, in the infinity norm. Both sides must come from the
/// same inertia.
pub fn verify_similarity(s: &SystemMatrices, b: &BlockForm) -> Result<(f64, f64)> {
    if s.inertia != b.inertia {
        return Err(Error::Consistency(
            "system matrices and block form come from different inertia".into(),
        ));
    }
    let w = OrbitalRate::new(s.omega0)?;
    let t = transform_matrices(&w)?;
    let lhs_a = t.h.mul(&s.a)?.mul(&t.h_inv)?;
    let res_a = lhs_a.sub(&b.a0.scale(s.omega0))?.inf_norm();
    let lhs_b = t.h.mul(&s.b)?.mul(&t.l)?;
    let res_b = lhs_b.sub(&b.b0.scale(s.omega0))?.inf_norm();
    Ok((res_a, res_b))
}
