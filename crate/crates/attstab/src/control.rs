//! Open-loop and saturated-feedback simulation of the attitude system with
//! quadratic-energy bookkeeping.
//!
//! The feedback law is u = sat(-kappa B^T P x), the passivity choice whose
//! energy derivative along the flow is -2 (B^T P x)^T sat(kappa B^T P x),
//! a sum of same-sign products. Integration is classical RK4 with the
//! feedback evaluated at every stage.

use crate::error::{Error, Result};
use crate::model::SystemMatrices;
use crate::smallmat::Matrix;

/// Saturated linear state feedback: gain, per-axis torque limits, and the
/// positive definite weight defining the monitored energy.
#[derive(Clone, Debug, PartialEq)]
pub struct SaturatedFeedback {
    p: Matrix,
    kappa: f64,
    u_max: [f64; 3],
}

impl SaturatedFeedback {
    /// Validates that `p` is 6x6 positive definite, `kappa > 0`, and the
    /// torque limits are positive.
    pub fn new(p: Matrix, kappa: f64, u_max: [f64; 3]) -> Result<Self> {
        if p.rows() != 6 || p.cols() != 6 {
            return Err(Error::Domain(format!(
                "feedback weight must be 6x6, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        if !p.is_positive_definite()? {
            return Err(Error::Domain(
                "feedback weight must be positive definite".into(),
            ));
        }
        if kappa <= 0.0 || !kappa.is_finite() {
            return Err(Error::Domain(format!("gain must be positive, got {kappa}")));
        }
        if u_max.iter().any(|u| *u <= 0.0 || !u.is_finite()) {
            return Err(Error::Domain(format!(
                "torque limits must be positive, got {u_max:?}"
            )));
        }
        Ok(SaturatedFeedback { p, kappa, u_max })
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn u_max(&self) -> [f64; 3] {
        self.u_max
    }
}

/// Saturated control torque for the current state:
/// u_i = clamp(-kappa (B^T P x)_i, -u_max_i, u_max_i).
pub fn feedback(x: &[f64; 6], fb: &SaturatedFeedback, b: &Matrix) -> [f64; 3] {
    let px = mat_vec6(fb.p(), x);
    let mut u = [0.0; 3];
    for (col, out) in u.iter_mut().enumerate() {
        let mut btpx = 0.0;
        for row in 0..6 {
            btpx += b[(row, col)] * px[row];
        }
        *out = (-fb.kappa() * btpx).clamp(-fb.u_max[col], fb.u_max[col]);
    }
    u
}

/// Quadratic form x^T p x.
pub fn energy(x: &[f64; 6], p: &Matrix) -> f64 {
    let px = mat_vec6(p, x);
    x.iter().zip(px.iter()).map(|(a, b)| a * b).sum()
}

fn mat_vec6(m: &Matrix, x: &[f64; 6]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            acc += m[(i, j)] * xj;
        }
        *o = acc;
    }
    out
}

/// Uniformly sampled trajectory: times, states, applied controls, and
/// energies V(t_k) = x^T P x under the monitoring weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 6]>,
    pub controls: Vec<[f64; 3]>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrates the system over `horizon` seconds at fixed step `dt` with
/// classical RK4, evaluating the optional feedback at every stage.
///
/// Energies use `energy_p` when given, else the feedback weight, else the
/// identity. The step must satisfy dt <= 0.01/omega0 so the fastest mode is
/// resolved; a non-finite state aborts with the failure time.
pub fn simulate(
    sys: &SystemMatrices,
    fb: Option<&SaturatedFeedback>,
    energy_p: Option<&Matrix>,
    x0: [f64; 6],
    dt: f64,
    horizon: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::StepSize(format!("dt must be positive, got {dt}")));
    }
    let w0 = sys.omega0();
    if w0 > 0.0 {
        let limit = 0.01 / w0;
        if dt > limit * (1.0 + 1e-9) {
            return Err(Error::StepSize(format!(
                "dt = {dt} exceeds the resolution guard 0.01/omega0 = {limit}"
            )));
        }
    }
    if horizon < dt || !horizon.is_finite() {
        return Err(Error::StepSize(format!(
            "horizon {horizon} must be at least one step {dt}"
        )));
    }

    let identity;
    let p_mon: &Matrix = match (energy_p, fb) {
        (Some(p), _) => p,
        (None, Some(f)) => f.p(),
        (None, None) => {
            identity = Matrix::identity(6);
            &identity
        }
    };

    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let control_of = |x: &[f64; 6]| -> [f64; 3] {
        match fb {
            Some(f) => feedback(x, f, sys.b()),
            None => [0.0; 3],
        }
    };
    let deriv = |x: &[f64; 6]| -> [f64; 6] {
        let u = control_of(x);
        let mut dx = mat_vec6(sys.a(), x);
        for (row, d) in dx.iter_mut().enumerate() {
            for (col, uc) in u.iter().enumerate() {
                *d += sys.b()[(row, col)] * uc;
            }
        }
        dx
    };
    let axpy = |x: &[f64; 6], c: f64, k: &[f64; 6]| -> [f64; 6] {
        let mut out = *x;
        for i in 0..6 {
            out[i] += c * k[i];
        }
        out
    };

    let mut x = x0;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        energies: Vec::with_capacity(steps + 1),
    };
    traj.times.push(0.0);
    traj.states.push(x);
    traj.controls.push(control_of(&x));
    traj.energies.push(energy(&x, p_mon));

    for k in 0..steps {
        let k1 = deriv(&x);
        let k2 = deriv(&axpy(&x, 0.5 * dt, &k1));
        let k3 = deriv(&axpy(&x, 0.5 * dt, &k2));
        let k4 = deriv(&axpy(&x, dt, &k3));
        for i in 0..6 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = (k + 1) as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: t });
        }
        traj.times.push(t);
        traj.states.push(x);
        traj.controls.push(control_of(&x));
        traj.energies.push(energy(&x, p_mon));
    }
    Ok(traj)
}
