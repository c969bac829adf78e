//! Lindblad master equation for the 6×6 density matrix.
//!
//! The generator is
//! 𝓛ρ = −i[H, ρ] + Σⱼ(2LⱼρLⱼ† − {Lⱼ†Lⱼ, ρ}), with H in rad/s.
//!
//! It is evaluated in the form −i(H_eff ρ − ρH_eff†) + Σⱼ 2LⱼρLⱼ† with
//! H_eff = H − iΣⱼLⱼ†Lⱼ. For Hermitian ρ the second product is the adjoint of the first.
//!
//! The time step applies the Liouvillian frozen at the step midpoint. The exponential is
//! applied with a scaled Taylor series acting directly on ρ. The dense 36×36 superoperator
//! from [`liouvillian`] is kept as an independent oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Complex64, Error, Mat6, Result};

pub type DensityMatrix = Mat6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pure state |i⟩⟨i|.
pub fn pure_state(i: usize) -> DensityMatrix {
    let mut r = Mat6::zeros();
    r[(i, i)] = Complex64::new(1.0, 0.0);
    r
}

pub fn max_abs(m: &Mat6) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

pub fn is_finite(m: &Mat6) -> bool {
    m.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// ‖ρ − ρ†‖∞ (max-abs entry).
pub fn hermiticity_error(m: &Mat6) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace_error(m: &Mat6) -> f64 {
    (m.trace() - Complex64::new(1.0, 0.0)).norm()
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &Mat6) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn hermitize(m: &Mat6) -> Mat6 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
enum Jump {
    /// 2LρL† for L = s|lower⟩⟨upper| is 2|s|²ρ_uu|lower⟩⟨lower|.
    Rank1 { lower: usize, upper: usize, rate2: f64 },
    Dense(Mat6),
}

/// Precomputed dissipator: ΣL†L and the sandwich terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Dissipator {
    k: Mat6,
    jumps: Vec<Jump>,
}

impl Dissipator {
    pub fn new(l_ops: &[Mat6]) -> Self {
        let mut k = Mat6::zeros();
        let mut jumps = Vec::with_capacity(l_ops.len());
        for l in l_ops {
            k += l.adjoint() * l;
            let nz: Vec<(usize, usize)> = (0..6)
                .flat_map(|i| (0..6).map(move |j| (i, j)))
                .filter(|&(i, j)| l[(i, j)] != Complex64::new(0.0, 0.0))
                .collect();
            match nz.as_slice() {
                [] => {}
                [(i, j)] => jumps.push(Jump::Rank1 { lower: *i, upper: *j, rate2: 2.0 * l[(*i, *j)].norm_sqr() }),
                _ => jumps.push(Jump::Dense(*l)),
            }
        }
        Self { k, jumps }
    }

    /// Σ 2LρL†.
    fn sandwich(&self, rho: &Mat6, out: &mut Mat6) {
        for j in &self.jumps {
            match j {
                Jump::Rank1 { lower, upper, rate2 } => {
                    out[(*lower, *lower)] += rho[(*upper, *upper)] * *rate2;
                }
                Jump::Dense(l) => *out += l * rho * l.adjoint() * Complex64::new(2.0, 0.0),
            }
        }
    }

    /// Dissipative part alone: Σ(2LρL† − {L†L, ρ}).
    pub fn apply(&self, rho: &Mat6) -> Mat6 {
        let mut out = -(self.k * rho + rho * self.k);
        self.sandwich(rho, &mut out);
        out
    }

    fn sandwich_norm(&self) -> f64 {
        self.jumps
            .iter()
            .map(|j| match j {
                Jump::Rank1 { rate2, .. } => *rate2,
                Jump::Dense(l) => 2.0 * l.norm_squared(),
            })
            .sum()
    }
}

/// Liouvillian for one Hamiltonian, applied in matrix form.
#[derive(Clone, Debug)]
pub struct Generator<'a> {
    h_eff: Mat6,
    diss: &'a Dissipator,
}

impl<'a> Generator<'a> {
    pub fn new(h: &Mat6, diss: &'a Dissipator) -> Self {
        Self { h_eff: h - diss.k * I, diss }
    }

    /// 𝓛ρ for arbitrary (not necessarily Hermitian) ρ.
    pub fn apply(&self, rho: &Mat6) -> Mat6 {
        let mut out = (self.h_eff * rho - rho * self.h_eff.adjoint()) * (-I);
        self.diss.sandwich(rho, &mut out);
        out
    }

    /// 𝓛ρ for Hermitian ρ; the result is Hermitian to the last bit.
    pub fn apply_hermitian(&self, rho: &Mat6) -> Mat6 {
        let x = self.h_eff * rho;
        let mut out = Mat6::zeros();
        for j in 0..6 {
            for i in 0..6 {
                let d = x[(i, j)] - x[(j, i)].conj();
                out[(i, j)] = Complex64::new(d.im, -d.re);
            }
        }
        self.diss.sandwich(rho, &mut out);
        out
    }

    /// Upper bound on the Frobenius-induced norm of 𝓛.
    pub fn norm_bound(&self) -> f64 {
        2.0 * self.h_eff.norm() + self.diss.sandwich_norm()
    }
}

/// Largest scaled norm ‖𝓛‖·t/s per Taylor sub-step.
const TAYLOR_THETA: f64 = 2.0;
const TAYLOR_MAX_TERMS: usize = 80;

fn is_exactly_hermitian(m: &Mat6) -> bool {
    (0..6).all(|j| (0..=j).all(|i| m[(i, j)] == m[(j, i)].conj()))
}

/// exp(𝓛t)ρ by a truncated Taylor series over ⌈‖𝓛‖t/θ⌉ sub-steps.
pub fn expm_action(generator: &Generator<'_>, rho: &Mat6, t: f64) -> Mat6 {
    let herm = is_exactly_hermitian(rho);
    let steps = ((generator.norm_bound() * t.abs() / TAYLOR_THETA).ceil() as usize).max(1);
    let h = t / steps as f64;
    let mut v = *rho;
    for _ in 0..steps {
        let mut term = v;
        let mut prev = f64::INFINITY;
        for k in 1..=TAYLOR_MAX_TERMS {
            let next = if herm { generator.apply_hermitian(&term) } else { generator.apply(&term) };
            term = next * Complex64::new(h / k as f64, 0.0);
            v += term;
            let tn = max_abs(&term);
            let vn = max_abs(&v);
            if tn + prev <= f64::EPSILON * vn * 0.5 || tn == 0.0 {
                break;
            }
            prev = tn;
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtdStep {
    pub rho: DensityMatrix,
    pub error: f64,
}

/// One midpoint-frozen exponential step with a step-doubling error estimate.
///
/// ρ′ is the full step and ρ″ two half steps. Returns (4ρ″ − ρ′)/3, re-Hermitized and
/// trace-renormalized, with the error estimate ‖ρ′ − ρ″‖∞.
pub fn etd_step<F>(rho: &DensityMatrix, h: F, diss: &Dissipator, tau: f64, dt: f64) -> Result<EtdStep>
where
    F: Fn(f64) -> Mat6,
{
    if !(dt > 0.0) {
        return Err(Error::Numerical { tau, dt, message: "step size must be > 0".into() });
    }
    let full = expm_action(&Generator::new(&h(tau + 0.5 * dt), diss), rho, dt);
    let half = expm_action(&Generator::new(&h(tau + 0.25 * dt), diss), rho, 0.5 * dt);
    let half = expm_action(&Generator::new(&h(tau + 0.75 * dt), diss), &half, 0.5 * dt);
    let error = max_abs(&(full - half));
    // The midpoint step is symmetric, so its local error is odd in dt and this combination
    // cancels the dt³ term.
    let extrapolated = (half * Complex64::new(4.0, 0.0) - full) / Complex64::new(3.0, 0.0);
    let mut out = hermitize(&extrapolated);
    let tr = out.trace().re;
    if (tr - 1.0).abs() > 1e-12 {
        out /= Complex64::new(tr, 0.0);
    }
    if !is_finite(&out) || !error.is_finite() {
        return Err(Error::Numerical { tau, dt, message: "non-finite density matrix".into() });
    }
    Ok(EtdStep { rho: out, error })
}

/// Classical fourth-order Runge–Kutta step of the same master equation.
pub fn rk4_reference<F>(rho: &DensityMatrix, h: F, diss: &Dissipator, tau: f64, dt: f64) -> Result<DensityMatrix>
where
    F: Fn(f64) -> Mat6,
{
    let f = |t: f64, r: &Mat6| Generator::new(&h(t), diss).apply(r);
    let c = |x: f64| Complex64::new(x, 0.0);
    let k1 = f(tau, rho);
    let k2 = f(tau + 0.5 * dt, &(rho + k1 * c(0.5 * dt)));
    let k3 = f(tau + 0.5 * dt, &(rho + k2 * c(0.5 * dt)));
    let k4 = f(tau + dt, &(rho + k3 * c(dt)));
    let out = rho + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
    if !is_finite(&out) {
        return Err(Error::Numerical { tau, dt, message: "non-finite density matrix".into() });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// s
    pub dt_min: f64,
    /// s
    pub dt_max: f64,
    /// s
    pub dt_initial: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-9, dt_min: 1e-13, dt_max: 1e-9, dt_initial: 1e-10 }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Validation("rel_tol and abs_tol must be > 0".into()));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_initial && self.dt_initial <= self.dt_max) {
            return Err(Error::Validation("step sizes must satisfy 0 < dt_min <= dt_initial <= dt_max".into()));
        }
        if !self.dt_max.is_finite() {
            return Err(Error::Validation("dt_max must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDecision {
    pub accept: bool,
    pub dt_next: f64,
    pub tol: f64,
}

/// Proportional step controller with exponent 1/3.
///
/// `rho_norm` is ‖ρ‖∞ of the state being advanced. The returned error carries `tau = NaN`;
/// callers that know the time attach it.
pub fn adapt_step(error: f64, rho_norm: f64, dt: f64, ctrl: &StepControl) -> Result<StepDecision> {
    let tol = ctrl.abs_tol + ctrl.rel_tol * rho_norm;
    let factor = if error == 0.0 { 5.0 } else { (0.9 * (tol / error).cbrt()).clamp(0.2, 5.0) };
    let dt_next = (dt * factor).clamp(ctrl.dt_min, ctrl.dt_max);
    let accept = error <= tol;
    if !accept && dt <= ctrl.dt_min * (1.0 + 1e-12) {
        return Err(Error::Numerical {
            tau: f64::NAN,
            dt,
            message: format!("step size fell below dt_min = {:e} s (error {error:e} > tol {tol:e})", ctrl.dt_min),
        });
    }
    if error.is_nan() {
        return Err(Error::Numerical { tau: f64::NAN, dt, message: "error estimate is NaN".into() });
    }
    Ok(StepDecision { accept, dt_next, tol })
}

/// Adaptive ETD integration of one density matrix, landing exactly on each time in `samples`.
///
/// `samples` must be ascending and lie in [t0, ∞). Returns ρ at each sample time.
pub fn integrate_adaptive<F>(
    rho0: &DensityMatrix,
    h: F,
    diss: &Dissipator,
    t0: f64,
    samples: &[f64],
    ctrl: &StepControl,
) -> Result<Vec<DensityMatrix>>
where
    F: Fn(f64) -> Mat6,
{
    ctrl.validate()?;
    let mut rho = *rho0;
    let mut t = t0;
    let mut dt = ctrl.dt_initial;
    let mut out = Vec::with_capacity(samples.len());
    for &ts in samples {
        while ts - t > 1e-9 * ctrl.dt_min {
            let trial = dt.min(ts - t);
            let step = etd_step(&rho, &h, diss, t, trial)?;
            let d = adapt_step(step.error, max_abs(&rho), trial, ctrl).map_err(|e| with_tau(e, t))?;
            if d.accept {
                rho = step.rho;
                t += trial;
                // A step shortened to hit a sample says little about the next full step.
                if trial >= dt {
                    dt = d.dt_next;
                }
            } else {
                dt = d.dt_next;
            }
        }
        t = ts;
        out.push(rho);
    }
    Ok(out)
}

/// Fixed-step RK4 integration sampled at `samples` (each must be a multiple of `dt` from `t0`
/// up to rounding; the last partial step is shortened).
pub fn integrate_rk4<F>(
    rho0: &DensityMatrix,
    h: F,
    diss: &Dissipator,
    t0: f64,
    samples: &[f64],
    dt: f64,
) -> Result<Vec<DensityMatrix>>
where
    F: Fn(f64) -> Mat6,
{
    let mut rho = *rho0;
    let mut t = t0;
    let mut out = Vec::with_capacity(samples.len());
    for &ts in samples {
        let n = ((ts - t) / dt).round().max(0.0) as usize;
        let step = if n > 0 { (ts - t) / n as f64 } else { 0.0 };
        for k in 0..n {
            rho = rk4_reference(&rho, &h, diss, t + k as f64 * step, step)?;
        }
        t = ts;
        out.push(rho);
    }
    Ok(out)
}

pub(crate) fn with_tau(e: Error, tau: f64) -> Error {
    match e {
        Error::Numerical { dt, message, .. } => Error::Numerical { tau, dt, message },
        other => other,
    }
}

/// Column-stacked vec(ρ): index = col·6 + row.
pub fn vectorize(m: &Mat6) -> DVector<Complex64> {
    DVector::from_iterator(36, m.iter().copied())
}

pub fn unvectorize(v: &DVector<Complex64>) -> Mat6 {
    Mat6::from_iterator(v.iter().copied())
}

/// Dense 36×36 superoperator acting on column-stacked ρ.
pub fn liouvillian(h: &Mat6, l_ops: &[Mat6]) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(6, 6);
    let hd = DMatrix::from_iterator(6, 6, h.iter().copied());
    let mut out = (id.kronecker(&hd) - hd.transpose().kronecker(&id)) * (-I);
    for l in l_ops {
        let ld = DMatrix::from_iterator(6, 6, l.iter().copied());
        let ll = ld.adjoint() * &ld;
        out += ld.conjugate().kronecker(&ld) * Complex64::new(2.0, 0.0);
        out -= id.kronecker(&ll);
        out -= ll.transpose().kronecker(&id);
    }
    out
}

/// Dense exponential exp(𝓛t)ρ via Padé scaling-and-squaring of the superoperator.
pub fn expm_dense(liou: &DMatrix<Complex64>, rho: &Mat6, t: f64) -> Mat6 {
    let e = (liou * Complex64::new(t, 0.0)).exp();
    unvectorize(&(e * vectorize(rho)))
}

/// Stationary state 𝓛ρ = 0 with unit trace, from a direct linear solve.
pub fn steady_state(h: &Mat6, l_ops: &[Mat6]) -> Result<DensityMatrix> {
    let mut a = liouvillian(h, l_ops);
    let mut b = DVector::<Complex64>::zeros(36);
    for j in 0..36 {
        a[(0, j)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..6 {
        a[(0, i * 6 + i)] = Complex64::new(1.0, 0.0);
    }
    b[0] = Complex64::new(1.0, 0.0);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Domain("Liouvillian has no unique stationary state".into()))?;
    Ok(unvectorize(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn decay(gamma: f64, upper: usize, lower: usize) -> Mat6 {
        let mut l = Mat6::zeros();
        l[(lower, upper)] = c((0.5 * gamma).sqrt());
        l
    }

    #[test]
    fn zero_superoperator() {
        let l = liouvillian(&Mat6::zeros(), &[]);
        assert!(l.iter().all(|x| *x == c(0.0)));
    }

    #[test]
    fn single_channel_decay() {
        let gamma = 3.6e7;
        let ops = [decay(gamma, 2, 0)];
        let diss = Dissipator::new(&ops);
        let rho = pure_state(2);
        let dt = 3e-8;
        let s = etd_step(&rho, |_| Mat6::zeros(), &diss, 0.0, dt).unwrap();
        assert!((s.rho[(2, 2)].re - (-gamma * dt).exp()).abs() < 1e-10);
    }

    #[test]
    fn resonant_rabi_flop() {
        let w = 2.0e7;
        let mut h = Mat6::zeros();
        h[(2, 0)] = c(-w);
        h[(0, 2)] = c(-w);
        let diss = Dissipator::new(&[]);
        let period = std::f64::consts::PI / w;
        let n = 400;
        let mut rho = pure_state(0);
        for k in 0..n {
            rho = etd_step(&rho, |_| h, &diss, 0.0, period / n as f64).unwrap().rho;
            let t = (k + 1) as f64 * period / n as f64;
            assert!((rho[(2, 2)].re - (w * t).sin().powi(2)).abs() < 1e-8);
        }
    }

    #[test]
    fn rk4_zero_generator_is_identity() {
        let diss = Dissipator::new(&[]);
        let rho = pure_state(3);
        assert_eq!(rk4_reference(&rho, |_| Mat6::zeros(), &diss, 0.0, 1e-9).unwrap(), rho);
    }

    #[test]
    fn adapt_step_examples() {
        let ctrl = StepControl::default();
        let d = adapt_step(0.0, 1.0, 1e-10, &ctrl).unwrap();
        assert!(d.accept);
        assert_eq!(d.dt_next, 5e-10);
        let d = adapt_step(0.0, 1.0, 1e-9, &ctrl).unwrap();
        assert_eq!(d.dt_next, ctrl.dt_max);
        let tol = ctrl.abs_tol + ctrl.rel_tol;
        let d = adapt_step(tol, 1.0, 1e-10, &ctrl).unwrap();
        assert!(d.accept);
        assert!((d.dt_next / 0.9e-10 - 1.0).abs() < 1e-12);
        let d = adapt_step(1.0, 1.0, 1e-10, &ctrl).unwrap();
        assert!(!d.accept);
        assert!((d.dt_next - 2e-11).abs() < 1e-24);
        assert!(adapt_step(1.0, 1.0, ctrl.dt_min, &ctrl).is_err());
    }

    #[test]
    fn steady_state_two_level() {
        let (w, gamma) = (1.3e7, 3.6e7);
        let mut h = Mat6::zeros();
        h[(2, 0)] = c(-w);
        h[(0, 2)] = c(-w);
        let ops: Vec<Mat6> = (1..6).map(|u| decay(gamma, u, 0)).collect();
        let s = steady_state(&h, &ops).unwrap();
        let want = w * w / (gamma * gamma / 4.0 + 2.0 * w * w);
        assert!((s[(2, 2)].re - want).abs() < 1e-12);
        assert!(trace_error(&s) < 1e-12);
    }
}
