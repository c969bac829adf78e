//! Dressed ground state, the 6×6 polariton eigenproblem, the closed-form dark mode
//! and the polariton group velocity.
//!
//! Basis order of the polariton vector: (σ^{a+}, σ^{c+}, σ^{f+}, σ^{d+}, a†, b†).
//! The collective operators σ^{x+} take an atom from the dressed ground state |+⟩ to |x⟩.
//! All frequencies are in rad/s.
//!
//! # Mixing angle
//!
//! |+⟩ is the E₊ eigenvector of ħ[[−Δ₃, −Ω₃], [−Ω₃, 0]] in the basis {e, b}. The branch is
//! chosen with c_b > 0, which gives c_e ≤ 0 for Ω₃ > 0. The angle θ ∈ [0, π/2] is defined by
//! sin θ = c_b and cos θ = |c_e|, so tan 2θ = −2Ω₃/Δ₃. The dressed couplings are
//! g_d = g sin θ and g_d′ = g′ cos θ. For weak Ω₃ this makes |+⟩ ≈ |b⟩, with the probe-a
//! coupling almost undressed and the probe-b coupling strongly suppressed.

use nalgebra::{SymmetricEigen, Vector6};

use crate::constants::{C, HBAR};
use crate::{Complex64, Error, Mat6, Result};

pub type ModeVector = Vector6<Complex64>;

/// Ratio |Ω₁/Δ₁| above which the closed-form dark mode is refused.
pub const ANALYTIC_RATIO_LIMIT: f64 = 0.2;
/// Ratio |Ω₁/Δ₁| above which the closed-form dark mode logs a warning.
pub const ANALYTIC_RATIO_WARN: f64 = 0.1;
/// Darkness gap below which the two darkest modes are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedState {
    pub c_b: f64,
    pub c_e: f64,
    pub theta: f64,
    /// J
    pub e_plus: f64,
    pub omega3: f64,
    pub delta3: f64,
}

pub fn dressed_state(omega3: f64, delta3: f64) -> Result<DressedState> {
    if !(delta3 > 0.0 && delta3.is_finite()) {
        return Err(Error::Domain(format!("dressed state needs delta3 > 0, got {delta3}")));
    }
    if !omega3.is_finite() {
        return Err(Error::Domain("omega3 must be finite".into()));
    }
    let root = (delta3 * delta3 + 4.0 * omega3 * omega3).sqrt();
    // (−Δ + √(Δ² + 4Ω²))/2 rewritten without cancellation.
    let e = 2.0 * omega3 * omega3 / (delta3 + root);
    let r = omega3 / (delta3 + e);
    let c_b = 1.0 / (1.0 + r * r).sqrt();
    let c_e = -r * c_b;
    Ok(DressedState { c_b, c_e, theta: c_b.atan2(c_e.abs()), e_plus: HBAR * e, omega3, delta3 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolaritonParams {
    pub omega: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub omega3: Complex64,
    pub delta1: f64,
    pub delta3: f64,
    /// Bare collective coupling of probe a.
    pub g: f64,
    /// Bare collective coupling of probe b.
    pub g_prime: f64,
    /// ω_c′ = ω_c − E₊/ħ.
    pub omega_c_prime: f64,
    pub ck: f64,
}

impl PolaritonParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega.re,
            self.omega.im,
            self.omega1.re,
            self.omega1.im,
            self.omega2.re,
            self.omega2.im,
            self.omega3.re,
            self.omega3.im,
            self.delta1,
            self.omega_c_prime,
            self.ck,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("polariton parameters must be finite".into()));
        }
        if !(self.delta3 > 0.0 && self.delta3.is_finite()) {
            return Err(Error::Domain(format!("delta3 must be > 0, got {}", self.delta3)));
        }
        if !(self.g > 0.0 && self.g.is_finite()) || !(self.g_prime > 0.0 && self.g_prime.is_finite()) {
            return Err(Error::Domain("bare couplings g and g' must be > 0".into()));
        }
        Ok(())
    }

    pub fn dressed(&self) -> Result<DressedState> {
        self.validate()?;
        dressed_state(self.omega3.norm(), self.delta3)
    }

    /// (g_d, g_d′) = (g sin θ, g′ cos θ).
    pub fn dressed_couplings(&self) -> Result<(f64, f64)> {
        let d = self.dressed()?;
        Ok((self.g * d.c_b, self.g_prime * d.c_e.abs()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolaritonMode {
    pub phi: ModeVector,
    pub omega: f64,
    /// |φ²| of the unit vector, equal to A for the closed-form mode.
    pub norm_a: f64,
    pub darkness: f64,
}

impl PolaritonMode {
    fn from_vector(phi: ModeVector, omega: f64) -> Self {
        let darkness = phi[0].norm_sqr() + phi[2].norm_sqr() + phi[3].norm_sqr();
        Self { norm_a: phi[1].norm(), phi, omega, darkness: darkness.clamp(0.0, 1.0) }
    }

    /// |⟨self|other⟩| for unit vectors.
    pub fn overlap(&self, other: &PolaritonMode) -> f64 {
        self.phi.dotc(&other.phi).norm()
    }

    /// ‖(M − ω)φ‖₂.
    pub fn residual(&self, m: &Mat6) -> f64 {
        (m * self.phi - self.phi * Complex64::new(self.omega, 0.0)).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarkModeSearch {
    pub mode: PolaritonMode,
    /// Runner-up whose darkness lies within [`DEGENERACY_GAP`] of the selected mode.
    pub degenerate_with: Option<PolaritonMode>,
    /// All six eigenfrequencies, ascending.
    pub spectrum: [f64; 6],
}

impl DarkModeSearch {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_with.is_some()
    }
}

/// The Hermitian polariton matrix with rows/columns (σ^{a+}, σ^{c+}, σ^{f+}, σ^{d+}, a†, b†).
pub fn build_polariton_matrix(p: &PolaritonParams) -> Result<Mat6> {
    let (gd, gdp) = p.dressed_couplings()?;
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let (w, w1, w2) = (p.omega, p.omega1, p.omega2);
    let (gd, gdp) = (r(gd), r(gdp));
    let wc = p.omega_c_prime;
    #[rustfmt::skip]
    let m = Mat6::new(
        r(wc),  -w.conj(), z,            z,          -gd.conj(), z,
        -w,     r(wc),     -w1,          z,          z,          z,
        z,      -w1.conj(), r(wc - p.delta1), -w2,   z,          z,
        z,      z,         -w2.conj(),   r(wc),      z,          -gdp.conj(),
        -gd,    z,         z,            z,          r(p.ck),    z,
        z,      z,         z,            -gdp,       z,          r(p.ck),
    );
    Ok(m)
}

fn fix_phase(mut v: ModeVector) -> ModeVector {
    let pivot = if v[1].norm() > 1e-300 {
        v[1]
    } else {
        let k = (0..6).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap_or(0);
        v[k]
    };
    if pivot.norm() > 0.0 {
        v *= pivot.conj() / pivot.norm();
    }
    v / Complex64::new(v.norm(), 0.0)
}

/// Diagonalizes `m` and returns the eigenvector with the least excited-state weight.
pub fn find_dark_mode(m: &Mat6) -> Result<DarkModeSearch> {
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Domain("polariton matrix has non-finite entries".into()));
    }
    let asym = (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!("polariton matrix is not Hermitian (asymmetry {asym:e})")));
    }
    let eig = SymmetricEigen::new(*m);
    let mut modes: Vec<PolaritonMode> = (0..6)
        .map(|k| PolaritonMode::from_vector(fix_phase(eig.eigenvectors.column(k).into_owned()), eig.eigenvalues[k]))
        .collect();
    modes.sort_by(|a, b| a.darkness.total_cmp(&b.darkness).then(a.omega.abs().total_cmp(&b.omega.abs())));
    let mut spectrum: [f64; 6] = eig.eigenvalues.into();
    spectrum.sort_by(f64::total_cmp);
    let mut it = modes.into_iter();
    let first = it.next().expect("six modes");
    let second = it.next().expect("six modes");
    if second.darkness - first.darkness < DEGENERACY_GAP {
        Ok(DarkModeSearch { mode: first, degenerate_with: Some(second), spectrum })
    } else {
        Ok(DarkModeSearch { mode: first, degenerate_with: None, spectrum })
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den.abs()
    }
}

/// Closed-form far-detuned dark mode, normalized.
///
/// Components (0, 1, −Ω₁*/Δ₁, 0, −Ω*/g_d, Ω₂*Ω₁*/(Δ₁g_d′)) times A. The `omega` field is the
/// Rayleigh quotient with the polariton matrix, which includes the residual light shift.
pub fn analytic_dark_mode(p: &PolaritonParams) -> Result<PolaritonMode> {
    let (gd, gdp) = p.dressed_couplings()?;
    let r1 = ratio(p.omega1.norm(), p.delta1);
    if !(r1 < ANALYTIC_RATIO_LIMIT) {
        return Err(Error::Validity(format!(
            "|omega1/delta1| = {r1:.4} exceeds the far-detuned limit {ANALYTIC_RATIO_LIMIT}"
        )));
    }
    if r1 > ANALYTIC_RATIO_WARN {
        log::warn!("|omega1/delta1| = {r1:.4}: closed-form dark mode is only approximate");
    }
    if gd == 0.0 && p.omega.norm() > 0.0 {
        return Err(Error::Domain("g_d = 0 with omega nonzero".into()));
    }
    let cross = p.omega2.conj() * p.omega1.conj();
    if gdp == 0.0 && cross.norm() > 0.0 {
        return Err(Error::Domain("g_d' = 0 with omega1*omega2 nonzero".into()));
    }
    let z = Complex64::new(0.0, 0.0);
    let phi3 = if p.omega1.norm() == 0.0 { z } else { -p.omega1.conj() / p.delta1 };
    let phi5 = if p.omega.norm() == 0.0 { z } else { -p.omega.conj() / gd };
    let phi6 = if cross.norm() == 0.0 { z } else { cross / (p.delta1 * gdp) };
    let v = ModeVector::new(z, Complex64::new(1.0, 0.0), phi3, z, phi5, phi6);
    let a = 1.0 / v.norm();
    let phi = v * Complex64::new(a, 0.0);
    let m = build_polariton_matrix(p)?;
    let omega = phi.dotc(&(m * phi)).re;
    Ok(PolaritonMode::from_vector(phi, omega))
}

/// v_g from moduli of the controls and the dressed couplings.
pub fn group_velocity_dressed(omega: f64, omega1: f64, omega2: f64, delta1: f64, g_d: f64, g_dp: f64) -> Result<f64> {
    let (omega, omega1, omega2) = (omega.abs(), omega1.abs(), omega2.abs());
    if omega > 0.0 && !(g_d > 0.0) {
        return Err(Error::Domain("g_d = 0 with omega nonzero".into()));
    }
    let cross = omega2 * omega1;
    if cross > 0.0 && !(g_dp > 0.0) {
        return Err(Error::Domain("g_d' = 0 with omega1*omega2 nonzero".into()));
    }
    if omega1 > 0.0 && delta1 == 0.0 {
        return Err(Error::Domain("delta1 = 0 with omega1 nonzero".into()));
    }
    let wa = if omega == 0.0 { 0.0 } else { (omega / g_d).powi(2) };
    let wb = if cross == 0.0 { 0.0 } else { (cross / (delta1.abs() * g_dp)).powi(2) };
    let r1 = ratio(omega1, delta1).powi(2);
    Ok(C * (wa + wb) / (1.0 + r1 + wa + wb))
}

pub fn group_velocity(p: &PolaritonParams) -> Result<f64> {
    let (gd, gdp) = p.dressed_couplings()?;
    group_velocity_dressed(p.omega.norm(), p.omega1.norm(), p.omega2.norm(), p.delta1, gd, gdp)
}
