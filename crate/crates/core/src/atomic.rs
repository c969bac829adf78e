//! Six-level ⁸⁷Rb structure, field couplings, unit conversions, and the real-space
//! rotating-frame Hamiltonian and Lindblad jump operators used by the simulation.

use std::f64::consts::PI;
use std::fmt;

use crate::constants::{mhz_to_rad, C, EPS0, HBAR};
use crate::{Complex64, Error, Mat6, Result};

/// Atomic levels in index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    /// 5S₁/₂ F=1
    B,
    /// 5S₁/₂ F=2
    C,
    /// 5P₁/₂ F=1
    A,
    /// 5P₁/₂ F=2
    E,
    /// 5P₃/₂ F=1
    F,
    /// 6S₁/₂ F=1
    D,
}

impl Level {
    pub const ALL: [Level; 6] = [Level::B, Level::C, Level::A, Level::E, Level::F, Level::D];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::B => "b",
            Level::C => "c",
            Level::A => "a",
            Level::E => "e",
            Level::F => "f",
            Level::D => "d",
        }
    }

    pub fn term(self) -> &'static str {
        match self {
            Level::B => "5S1/2 F=1",
            Level::C => "5S1/2 F=2",
            Level::A => "5P1/2 F=1",
            Level::E => "5P1/2 F=2",
            Level::F => "5P3/2 F=1",
            Level::D => "6S1/2 F=1",
        }
    }

    pub fn is_metastable(self) -> bool {
        matches!(self, Level::B | Level::C)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label(), self.term())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    Control,
    Probe,
}

/// The six optical fields. Each drives exactly one transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    ProbeA,
    ProbeB,
    Omega,
    Omega1,
    Omega2,
    Omega3,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::ProbeA,
        Field::ProbeB,
        Field::Omega,
        Field::Omega1,
        Field::Omega2,
        Field::Omega3,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// `(lower, upper)` levels of the driven transition.
    pub const fn transition(self) -> (Level, Level) {
        match self {
            Field::ProbeA => (Level::B, Level::A),
            Field::ProbeB => (Level::E, Level::D),
            Field::Omega => (Level::C, Level::A),
            Field::Omega1 => (Level::C, Level::F),
            Field::Omega2 => (Level::F, Level::D),
            Field::Omega3 => (Level::B, Level::E),
        }
    }

    pub const fn kind(self) -> CouplingKind {
        match self {
            Field::ProbeA | Field::ProbeB => CouplingKind::Probe,
            _ => CouplingKind::Control,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::ProbeA => "probe_a",
            Field::ProbeB => "probe_b",
            Field::Omega => "omega",
            Field::Omega1 => "omega1",
            Field::Omega2 => "omega2",
            Field::Omega3 => "omega3",
        }
    }

    /// The field coupling `x` and `y` in either order, if that edge exists.
    pub fn from_edge(x: Level, y: Level) -> Option<Field> {
        Self::ALL.into_iter().find(|f| {
            let (l, u) = f.transition();
            (l, u) == (x, y) || (u, l) == (x, y)
        })
    }
}

/// Control fields in schedule/CSV column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Control {
    Omega,
    Omega1,
    Omega2,
    Omega3,
}

impl Control {
    pub const ALL: [Control; 4] = [Control::Omega, Control::Omega1, Control::Omega2, Control::Omega3];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn field(self) -> Field {
        match self {
            Control::Omega => Field::Omega,
            Control::Omega1 => Field::Omega1,
            Control::Omega2 => Field::Omega2,
            Control::Omega3 => Field::Omega3,
        }
    }

    pub fn name(self) -> &'static str {
        self.field().name()
    }
}

/// Probe modes: `A` at 795 nm on b↔a, `B` at 1324 nm on e↔d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Probe {
    A,
    B,
}

impl Probe {
    pub const ALL: [Probe; 2] = [Probe::A, Probe::B];

    pub const fn field(self) -> Field {
        match self {
            Probe::A => Field::ProbeA,
            Probe::B => Field::ProbeB,
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Indices `(upper, lower)` of the coherence ρ_ul that radiates into this mode.
    pub const fn coherence(self) -> (usize, usize) {
        let (l, u) = self.field().transition();
        (u.index(), l.index())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayChannel {
    pub upper: Level,
    pub lower: Level,
    /// Total decay rate of `upper`, rad/s.
    pub gamma: f64,
    pub branching: f64,
}

impl DecayChannel {
    /// Partial rate `Γ·branching` into `lower`.
    pub fn rate(&self) -> f64 {
        self.gamma * self.branching
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelScheme {
    rotating_frame_energy: [f64; 6],
    decay_channels: Vec<DecayChannel>,
}

impl LevelScheme {
    pub fn new(rotating_frame_energy: [f64; 6], decay_channels: Vec<DecayChannel>) -> Result<Self> {
        if let Some(i) = rotating_frame_energy.iter().position(|e| !e.is_finite()) {
            return Err(Error::Config(format!(
                "rotating-frame energy of level {} is not finite",
                Level::ALL[i].label()
            )));
        }
        for ch in &decay_channels {
            if ch.upper == ch.lower {
                return Err(Error::Config(format!("decay channel {0} -> {0} is a self-loop", ch.upper.label())));
            }
            if ch.upper.is_metastable() && ch.gamma != 0.0 {
                return Err(Error::Config(format!(
                    "metastable level {} must not decay",
                    ch.upper.label()
                )));
            }
            if !(ch.gamma >= 0.0 && ch.gamma.is_finite()) {
                return Err(Error::Config(format!("decay rate of {} must be finite and >= 0", ch.upper.label())));
            }
            if !(0.0..=1.0).contains(&ch.branching) {
                return Err(Error::Config(format!(
                    "branching {} -> {} must lie in [0, 1]",
                    ch.upper.label(),
                    ch.lower.label()
                )));
            }
        }
        for upper in Level::ALL {
            let chans: Vec<_> = decay_channels.iter().filter(|c| c.upper == upper).collect();
            if chans.is_empty() {
                continue;
            }
            if chans.iter().any(|c| c.gamma != chans[0].gamma) {
                return Err(Error::Config(format!("channels out of {} disagree on the total rate", upper.label())));
            }
            let sum: f64 = chans.iter().map(|c| c.branching).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "branching fractions out of {} sum to {sum}, expected 1",
                    upper.label()
                )));
            }
        }
        Ok(Self { rotating_frame_energy, decay_channels })
    }

    pub fn rotating_frame_energy(&self) -> &[f64; 6] {
        &self.rotating_frame_energy
    }

    pub fn decay_channels(&self) -> &[DecayChannel] {
        &self.decay_channels
    }

    /// Total population decay rate of `level`, rad/s.
    pub fn total_decay(&self, level: Level) -> f64 {
        self.decay_channels
            .iter()
            .filter(|c| c.upper == level)
            .map(DecayChannel::rate)
            .sum()
    }
}

/// Detunings Δ = ω_field − ω_transition of the four controls, rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detunings {
    pub delta_l: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl Default for Detunings {
    fn default() -> Self {
        let d = mhz_to_rad(31.83);
        Self { delta_l: 0.0, delta1: d, delta2: -d, delta3: d }
    }
}

impl Detunings {
    pub fn check_closure(&self) -> Result<()> {
        if self.delta_l != 0.0 {
            return Err(Error::Config(format!("closure requires delta_l = 0, got {}", self.delta_l)));
        }
        let tol = 1e-12 * self.delta1.abs().max(self.delta2.abs()).max(1.0);
        if (self.delta1 + self.delta2).abs() > tol {
            return Err(Error::Config(format!(
                "closure requires delta1 + delta2 = 0, got {} + {}",
                self.delta1, self.delta2
            )));
        }
        Ok(())
    }
}

/// Rotating-frame energies (rad/s) accumulated along the coupling chain with b at zero.
///
/// `omega_c` is the frame energy of |c⟩. It is zero unless the dressed-state shift
/// is compensated.
pub fn frame_energies(det: &Detunings, omega_c: f64) -> [f64; 6] {
    let mut e = [0.0; 6];
    e[Level::B.index()] = 0.0;
    e[Level::E.index()] = -det.delta3;
    e[Level::C.index()] = omega_c;
    e[Level::A.index()] = omega_c - det.delta_l;
    e[Level::F.index()] = omega_c - det.delta1;
    e[Level::D.index()] = omega_c - det.delta1 - det.delta2;
    e
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionCoupling {
    pub field: Field,
    pub lower: Level,
    pub upper: Level,
    pub kind: CouplingKind,
    /// m
    pub wavelength: f64,
    /// C·m
    pub dipole: f64,
    /// Peak Rabi frequency (rad/s) for controls. For probes: d/(2ħ), rad/s per V/m.
    pub rabi_peak: f64,
    /// rad/s
    pub detuning: f64,
}

/// The closed loop of six couplings. Any other edge set is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSet {
    couplings: [TransitionCoupling; 6],
}

impl CouplingSet {
    pub fn new(list: Vec<TransitionCoupling>) -> Result<Self> {
        let mut slots: [Option<TransitionCoupling>; 6] = [None; 6];
        for c in list {
            let Some(field) = Field::from_edge(c.lower, c.upper) else {
                return Err(Error::Config(format!(
                    "no field couples {} and {}",
                    c.lower.label(),
                    c.upper.label()
                )));
            };
            if field != c.field {
                return Err(Error::Config(format!(
                    "edge {}-{} belongs to {}, not {}",
                    c.lower.label(),
                    c.upper.label(),
                    field.name(),
                    c.field.name()
                )));
            }
            if (c.lower, c.upper) != field.transition() {
                return Err(Error::Config(format!("{}: lower and upper levels are swapped", field.name())));
            }
            if c.kind != field.kind() {
                return Err(Error::Config(format!("{}: wrong coupling kind", field.name())));
            }
            if !(c.wavelength > 0.0 && c.wavelength.is_finite()) {
                return Err(Error::Config(format!("{}: wavelength must be > 0", field.name())));
            }
            if !(c.dipole > 0.0 && c.dipole.is_finite()) {
                return Err(Error::Config(format!("{}: dipole moment must be > 0", field.name())));
            }
            if !(c.rabi_peak >= 0.0 && c.rabi_peak.is_finite()) {
                return Err(Error::Config(format!("{}: rabi_peak must be finite and >= 0", field.name())));
            }
            if slots[field.index()].replace(c).is_some() {
                return Err(Error::Config(format!("{} declared twice", field.name())));
            }
        }
        let mut out = Vec::with_capacity(6);
        for f in Field::ALL {
            out.push(slots[f.index()].ok_or_else(|| Error::Config(format!("{} not declared", f.name())))?);
        }
        Ok(Self { couplings: out.try_into().expect("six couplings") })
    }

    pub fn get(&self, field: Field) -> &TransitionCoupling {
        &self.couplings[field.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TransitionCoupling> {
        self.couplings.iter()
    }
}

/// Instantaneous field amplitudes at one instant.
///
/// Probes are complex envelopes in V/m. Controls are dimensionless complex
/// amplitudes that scale the coupling's peak Rabi frequency.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Envelopes {
    values: [Option<Complex64>; 6],
}

impl Envelopes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, field: Field, value: Complex64) -> Self {
        self.values[field.index()] = Some(value);
        self
    }

    pub fn set(&mut self, field: Field, value: Complex64) {
        self.values[field.index()] = Some(value);
    }

    pub fn get(&self, field: Field) -> Option<Complex64> {
        self.values[field.index()]
    }

    /// All six fields set to zero.
    pub fn zero() -> Self {
        Self { values: [Some(Complex64::new(0.0, 0.0)); 6] }
    }
}

/// Ω = d·E₀/(2ħ) with E₀ = √(2P/(A ε₀ c)) and A = π(D/2)².
///
/// `wavelength` is validated but does not enter the result.
pub fn power_to_rabi(power: f64, beam_diameter: f64, dipole: f64, wavelength: f64) -> Result<f64> {
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::Domain(format!("power must be finite and >= 0, got {power}")));
    }
    for (name, v) in [("beam_diameter", beam_diameter), ("dipole_moment", dipole), ("wavelength", wavelength)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(dipole * peak_field(power, beam_diameter) / (2.0 * HBAR))
}

/// Peak field amplitude E₀ (V/m) of a flat-top beam carrying `power` over the beam area.
pub fn peak_field(power: f64, beam_diameter: f64) -> f64 {
    let area = PI * (0.5 * beam_diameter).powi(2);
    (2.0 * power / (area * EPS0 * C)).sqrt()
}

/// Rotating-frame Hamiltonian H/ħ (rad/s) from complex Rabi frequencies indexed by [`Field`].
///
/// H[u,l] = −Ω and H[l,u] = −Ω* for each coupled pair (l, u). The diagonal holds the frame energies.
pub fn hamiltonian_from_rabi(energies: &[f64; 6], rabi: &[Complex64; 6]) -> Mat6 {
    let mut h = Mat6::zeros();
    for (i, e) in energies.iter().enumerate() {
        h[(i, i)] = Complex64::new(*e, 0.0);
    }
    for f in Field::ALL {
        let (l, u) = f.transition();
        let w = rabi[f.index()];
        h[(u.index(), l.index())] = -w;
        h[(l.index(), u.index())] = -w.conj();
    }
    h
}

/// Builds H/ħ from the level scheme, couplings and instantaneous envelopes.
pub fn build_hamiltonian(scheme: &LevelScheme, couplings: &CouplingSet, envelopes: &Envelopes) -> Result<Mat6> {
    let mut rabi = [Complex64::new(0.0, 0.0); 6];
    for c in couplings.iter() {
        let v = envelopes
            .get(c.field)
            .ok_or_else(|| Error::Config(format!("missing envelope for {}", c.field.name())))?;
        rabi[c.field.index()] = v * c.rabi_peak;
    }
    Ok(hamiltonian_from_rabi(scheme.rotating_frame_energy(), &rabi))
}

/// One jump matrix √(Γ·branching/2)·|lower⟩⟨upper| per channel with nonzero rate.
pub fn build_lindblad_ops(scheme: &LevelScheme) -> Vec<Mat6> {
    scheme
        .decay_channels()
        .iter()
        .filter(|c| c.rate() > 0.0)
        .map(|c| {
            let mut l = Mat6::zeros();
            l[(c.lower.index(), c.upper.index())] = Complex64::new((0.5 * c.rate()).sqrt(), 0.0);
            l
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumConfig {
    /// atoms/m³
    pub density: f64,
    /// m
    pub length: f64,
    /// m
    pub beam_diameter: f64,
    pub spatial_points: usize,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self { density: 4e17, length: 1.4e-2, beam_diameter: 1.6e-3, spatial_points: 100 }
    }
}

impl MediumConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::Config("medium density must be > 0".into()));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config("medium length must be > 0".into()));
        }
        if !(self.beam_diameter > 0.0 && self.beam_diameter.is_finite()) {
            return Err(Error::Config("beam diameter must be > 0".into()));
        }
        if self.spatial_points < 8 {
            return Err(Error::Config(format!(
                "spatial_points must be >= 8, got {}",
                self.spatial_points
            )));
        }
        Ok(())
    }

    pub fn grid_spacing(&self) -> f64 {
        self.length / (self.spatial_points - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionData {
    /// m
    pub wavelength: f64,
    /// C·m
    pub dipole: f64,
}

/// Rubidium reference data: transition wavelengths, dipole moments and decay rates.
///
/// Dipoles are effective far-detuned values |⟨J‖er‖J′⟩|/√3:
/// - D1 and D2: reduced elements 4.231 and 5.977 ea₀ (Steck, *Rubidium 87 D Line Data*).
/// - 5P₁/₂–6S₁/₂ and 5P₃/₂–6S₁/₂: 4.145 and 6.047 ea₀ (Safronova, Williams and Clark,
///   Phys. Rev. A 69, 022509 (2004)), in the reduced-element normalization.
///
/// Rates:
/// - Γ(5P₁/₂) = 2π×5.746 MHz and Γ(5P₃/₂) = 2π×6.0666 MHz (Steck).
/// - Γ(6S₁/₂) = 1/45.57 ns (Gomez et al., J. Opt. Soc. Am. B 21, 2058 (2004)).
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicData {
    /// Indexed by [`Field`].
    pub transitions: [TransitionData; 6],
    /// Total decay rate per level (rad/s), indexed by [`Level`].
    pub gamma: [f64; 6],
    /// `(upper, lower, fraction)` for every modeled decay channel.
    pub branching: Vec<(Level, Level, f64)>,
}

impl AtomicData {
    pub fn rubidium87() -> Self {
        let d1 = TransitionData { wavelength: 794.979e-9, dipole: 1.4646e-29 };
        let d2 = TransitionData { wavelength: 780.241e-9, dipole: 2.0692e-29 };
        let ed = TransitionData { wavelength: 1323.88e-9, dipole: 1.435e-29 };
        let fd = TransitionData { wavelength: 1366.87e-9, dipole: 1.480e-29 };
        let mut transitions = [d1; 6];
        transitions[Field::ProbeB.index()] = ed;
        transitions[Field::Omega1.index()] = d2;
        transitions[Field::Omega2.index()] = fd;
        let g_d1 = mhz_to_rad(5.746);
        let g_d2 = mhz_to_rad(6.0666);
        let g_6s = 1.0 / 45.57e-9;
        let mut gamma = [0.0; 6];
        gamma[Level::A.index()] = g_d1;
        gamma[Level::E.index()] = g_d1;
        gamma[Level::F.index()] = g_d2;
        gamma[Level::D.index()] = g_6s;
        use Level::*;
        let branching = vec![
            (A, B, 0.5),
            (A, C, 0.5),
            (E, B, 0.5),
            (E, C, 0.5),
            (F, B, 0.5),
            (F, C, 0.5),
            (D, E, 0.5),
            (D, F, 0.5),
        ];
        Self { transitions, gamma, branching }
    }

    pub fn transition(&self, field: Field) -> &TransitionData {
        &self.transitions[field.index()]
    }

    pub fn decay_channels(&self) -> Vec<DecayChannel> {
        self.branching
            .iter()
            .map(|&(upper, lower, branching)| DecayChannel { upper, lower, gamma: self.gamma[upper.index()], branching })
            .collect()
    }
}

impl Default for AtomicData {
    fn default() -> Self {
        Self::rubidium87()
    }
}

/// Control powers and detunings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSettings {
    /// W, indexed by [`Control`].
    pub power: [f64; 4],
    pub detunings: Detunings,
    pub compensate_stark_shift: bool,
    pub enforce_closure: bool,
}

impl Default for ControlSettings {
    fn default() -> Self {
        Self {
            power: [4.14e-3, 0.12e-3, 1.09e-3, 0.20e-3],
            detunings: Detunings::default(),
            compensate_stark_shift: false,
            enforce_closure: true,
        }
    }
}

/// Everything the co-simulation needs to know about atoms, fields and medium.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicModel {
    pub data: AtomicData,
    pub controls: ControlSettings,
    pub medium: MediumConfig,
    pub scheme: LevelScheme,
    pub couplings: CouplingSet,
    pub jumps: Vec<Mat6>,
}

impl AtomicModel {
    pub fn new(data: AtomicData, controls: ControlSettings, medium: MediumConfig) -> Result<Self> {
        medium.validate()?;
        let det = controls.detunings;
        if controls.enforce_closure {
            det.check_closure()?;
        }
        let mut rabi = [0.0; 4];
        for c in Control::ALL {
            let t = data.transition(c.field());
            rabi[c.index()] = power_to_rabi(controls.power[c.index()], medium.beam_diameter, t.dipole, t.wavelength)
                .map_err(|e| Error::Config(format!("{}: {e}", c.name())))?;
        }
        let omega_c = if controls.compensate_stark_shift {
            if !(det.delta3 > 0.0) {
                return Err(Error::Config("compensate_stark_shift requires delta3 > 0".into()));
            }
            crate::polariton::dressed_state(rabi[Control::Omega3.index()], det.delta3)?.e_plus / HBAR
        } else {
            0.0
        };
        let energies = frame_energies(&det, omega_c);
        let scheme = LevelScheme::new(energies, data.decay_channels())?;
        let mut list = Vec::with_capacity(6);
        for f in Field::ALL {
            let t = data.transition(f);
            let (lower, upper) = f.transition();
            let (rabi_peak, detuning) = match f {
                Field::ProbeA | Field::ProbeB => {
                    // Probe carriers are fixed by the frame: δ = −(E_upper − E_lower).
                    (t.dipole / (2.0 * HBAR), -(energies[upper.index()] - energies[lower.index()]))
                }
                Field::Omega => (rabi[0], det.delta_l),
                Field::Omega1 => (rabi[1], det.delta1),
                Field::Omega2 => (rabi[2], det.delta2),
                Field::Omega3 => (rabi[3], det.delta3),
            };
            list.push(TransitionCoupling {
                field: f,
                lower,
                upper,
                kind: f.kind(),
                wavelength: t.wavelength,
                dipole: t.dipole,
                rabi_peak,
                detuning,
            });
        }
        let couplings = CouplingSet::new(list)?;
        let jumps = build_lindblad_ops(&scheme);
        Ok(Self { data, controls, medium, scheme, couplings, jumps })
    }

    pub fn control_rabi(&self, c: Control) -> f64 {
        self.couplings.get(c.field()).rabi_peak
    }

    /// d/(2ħ) for the probe transition, rad/s per V/m.
    pub fn probe_rabi_per_field(&self, p: Probe) -> f64 {
        self.couplings.get(p.field()).rabi_peak
    }

    pub fn wavenumber(&self, p: Probe) -> f64 {
        2.0 * PI / self.couplings.get(p.field()).wavelength
    }

    /// κ = k n d²/(2ħε₀), so that ∂zΩ_p = iκρ_ul in Rabi units.
    pub fn kappa(&self, p: Probe) -> f64 {
        let d = self.couplings.get(p.field()).dipole;
        self.wavenumber(p) * self.medium.density * d * d / (2.0 * HBAR * EPS0)
    }

    /// Bare collective coupling g = √(cκ), rad/s.
    pub fn collective_coupling(&self, p: Probe) -> f64 {
        (C * self.kappa(p)).sqrt()
    }

    /// ik n d/ε₀: ∂z𝓔 = coefficient·ρ_ul with 𝓔 in V/m.
    pub fn source_coefficient(&self, p: Probe) -> Complex64 {
        let d = self.couplings.get(p.field()).dipole;
        Complex64::new(0.0, self.wavenumber(p) * self.medium.density * d / EPS0)
    }

    /// Decay rate of the radiating coherence, (Γ_u + Γ_l)/2.
    pub fn coherence_decay(&self, p: Probe) -> f64 {
        let (l, u) = p.field().transition();
        0.5 * (self.scheme.total_decay(u) + self.scheme.total_decay(l))
    }

    /// Resonant amplitude attenuation coefficient κ/γ (1/m) for full lower-level population.
    pub fn resonant_absorption(&self, p: Probe) -> f64 {
        self.kappa(p) / self.coherence_decay(p)
    }

    /// Peak probe field (V/m) for a peak power (W) over the beam area.
    pub fn probe_field(&self, power: f64) -> f64 {
        peak_field(power, self.medium.beam_diameter)
    }

    /// H/ħ with controls scaled by `control_env` and probe fields in V/m.
    pub fn hamiltonian(&self, control_env: &[f64; 4], probe: &[Complex64; 2]) -> Mat6 {
        let mut rabi = [Complex64::new(0.0, 0.0); 6];
        for p in Probe::ALL {
            rabi[p.field().index()] = probe[p.index()] * self.probe_rabi_per_field(p);
        }
        for c in Control::ALL {
            rabi[c.field().index()] = Complex64::new(control_env[c.index()] * self.control_rabi(c), 0.0);
        }
        hamiltonian_from_rabi(self.scheme.rotating_frame_energy(), &rabi)
    }
}
