//! Slowly-varying probe envelopes on a uniform z grid, in the retarded frame τ = t − z/c.
//!
//! There ∂z𝓔 = (ik n d/ε₀)ρ_ul, where ρ_ul is the radiating coherence. The time derivative is
//! absorbed by the frame. [`co_integrate`] alternates two stages each time step:
//! - every grid point's density matrix advances with the local fields held fixed;
//! - both envelopes are re-marched from the input face.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atomic::{AtomicModel, Level, Probe};
use crate::constants::C;
use crate::dynamics::{adapt_step, etd_step, max_abs, pure_state, with_tau, DensityMatrix, Dissipator, StepControl};
use crate::{Error, Result};

pub fn to_retarded_frame(t: f64, z: f64) -> f64 {
    t - z / C
}

pub fn from_retarded_frame(tau: f64, z: f64) -> f64 {
    tau + z / C
}

/// Uniform grid z_i = i·L/(N−1), i = 0..N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub points: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(points: usize, length: f64) -> Result<Self> {
        if points < 8 {
            return Err(Error::Config(format!("grid needs at least 8 points, got {points}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config("grid length must be > 0".into()));
        }
        Ok(Self { points, length })
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.points - 1) as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

/// Integrates ∂z𝓔 = S(z) over the grid from the boundary value `e_in`.
///
/// The first three intervals use RK4 with mid-interval sources taken from the cubic through
/// S₀..S₃. After that, an AB4 predictor is followed by one AM4 correction. The return value is
/// the largest predictor–corrector difference, a local error indicator.
pub fn march_z_into(e_in: Complex64, sources: &[Complex64], h: f64, out: &mut [Complex64]) -> Result<f64> {
    let n = sources.len();
    if n < 4 || out.len() != n {
        return Err(Error::Config(format!("march needs >= 4 matching grid points, got {n}")));
    }
    if let Some(i) = sources.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(Error::NonFiniteSource { index: i, message: "source term is not finite".into() });
    }
    if !(e_in.re.is_finite() && e_in.im.is_finite()) {
        return Err(Error::NonFiniteSource { index: 0, message: "boundary value is not finite".into() });
    }
    let s = sources;
    let mid = [
        (s[0] * 5.0 + s[1] * 15.0 - s[2] * 5.0 + s[3]) / 16.0,
        (-s[0] + s[1] * 9.0 + s[2] * 9.0 - s[3]) / 16.0,
        (s[0] - s[1] * 5.0 + s[2] * 15.0 + s[3] * 5.0) / 16.0,
    ];
    out[0] = e_in;
    for i in 0..3 {
        out[i + 1] = out[i] + (s[i] + mid[i] * 4.0 + s[i + 1]) * (h / 6.0);
    }
    let mut pc = 0.0f64;
    let w = h / 24.0;
    for i in 3..n - 1 {
        let pred = out[i] + (s[i] * 55.0 - s[i - 1] * 59.0 + s[i - 2] * 37.0 - s[i - 3] * 9.0) * w;
        let corr = out[i] + (s[i + 1] * 9.0 + s[i] * 19.0 - s[i - 1] * 5.0 + s[i - 2]) * w;
        pc = pc.max((corr - pred).norm());
        out[i + 1] = corr;
    }
    Ok(pc)
}

pub fn march_z(e_in: Complex64, sources: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); sources.len()];
    march_z_into(e_in, sources, h, &mut out)?;
    Ok(out)
}

/// Probe envelopes (V/m) on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeField {
    pub grid: Grid,
    /// Indexed by [`Probe`].
    pub modes: [Vec<Complex64>; 2],
}

impl EnvelopeField {
    pub fn mode(&self, p: Probe) -> &[Complex64] {
        &self.modes[p.index()]
    }

    pub fn output(&self, p: Probe) -> Complex64 {
        *self.modes[p.index()].last().expect("non-empty grid")
    }
}

/// Prescribed control envelopes and probe inputs as functions of retarded time.
pub trait Schedule: Sync {
    /// Dimensionless control amplitudes in [`crate::atomic::Control`] order.
    fn controls(&self, tau: f64) -> [f64; 4];
    /// Probe envelopes (V/m) injected at z = 0, indexed by [`Probe`].
    fn probe_input(&self, tau: f64) -> [Complex64; 2];
}

/// Atoms and fields at one retarded time.
#[derive(Clone, Debug, PartialEq)]
pub struct CoState {
    pub tau: f64,
    pub rho: Vec<DensityMatrix>,
    pub fields: EnvelopeField,
}

impl CoState {
    /// All atoms in |b⟩. With no polarization the march carries the boundary value unchanged,
    /// so the envelopes equal the input at `tau`.
    pub fn initial(grid: Grid, schedule: &dyn Schedule, tau: f64) -> Self {
        let input = schedule.probe_input(tau);
        Self {
            tau,
            rho: vec![pure_state(Level::B.index()); grid.points],
            fields: EnvelopeField {
                grid,
                modes: [vec![input[0]; grid.points], vec![input[1]; grid.points]],
            },
        }
    }
}

/// Called after every accepted global step.
pub trait StepObserver {
    fn on_step(&mut self, state: &CoState, dt: f64);
}

impl StepObserver for () {
    fn on_step(&mut self, _: &CoState, _: f64) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub dt_smallest: f64,
    pub dt_largest: f64,
}

/// Output-face observables on the uniform sampling grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    /// s
    pub tau: Vec<f64>,
    /// |𝓔_a(L)|, V/m
    pub ea: Vec<f64>,
    /// |𝓔_b(L)|, V/m
    pub eb: Vec<f64>,
    pub rho_cb: Vec<f64>,
    pub rho_ce: Vec<f64>,
    /// Control envelopes in [`crate::atomic::Control`] order.
    pub env: [Vec<f64>; 4],
    /// |𝓔_in| at z = 0 for each probe (not part of the CSV).
    pub input: [Vec<f64>; 2],
    /// Unsampled output-face amplitudes at every accepted step: (τ, |𝓔_a|, |𝓔_b|).
    pub raw: Vec<(f64, f64, f64)>,
    pub stats: StepStats,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn output(&self, p: Probe) -> &[f64] {
        match p {
            Probe::A => &self.ea,
            Probe::B => &self.eb,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationFailure {
    pub partial: TimeSeries,
    pub error: Error,
}

impl std::fmt::Display for SimulationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} samples written)", self.error, self.partial.len())
    }
}

impl std::error::Error for SimulationFailure {}

#[derive(Clone, Copy)]
struct Record {
    tau: f64,
    ea: f64,
    eb: f64,
    rho_cb: f64,
    rho_ce: f64,
}

impl Record {
    fn of(state: &CoState) -> Self {
        let r = state.rho.last().expect("non-empty grid");
        let (b, c, e) = (Level::B.index(), Level::C.index(), Level::E.index());
        Self {
            tau: state.tau,
            ea: state.fields.output(Probe::A).norm(),
            eb: state.fields.output(Probe::B).norm(),
            rho_cb: r[(c, b)].norm(),
            rho_ce: r[(c, e)].norm(),
        }
    }
}

struct Sampler {
    times: Vec<f64>,
    next: usize,
}

impl Sampler {
    fn emit(&mut self, ts: &mut TimeSeries, prev: &Record, cur: &Record, schedule: &dyn Schedule) {
        while self.next < self.times.len() && self.times[self.next] <= cur.tau {
            let t = self.times[self.next];
            let span = cur.tau - prev.tau;
            let w = if span > 0.0 { ((t - prev.tau) / span).clamp(0.0, 1.0) } else { 1.0 };
            let lerp = |a: f64, b: f64| a + w * (b - a);
            ts.tau.push(t);
            ts.ea.push(lerp(prev.ea, cur.ea));
            ts.eb.push(lerp(prev.eb, cur.eb));
            ts.rho_cb.push(lerp(prev.rho_cb, cur.rho_cb));
            ts.rho_ce.push(lerp(prev.rho_ce, cur.rho_ce));
            let env = schedule.controls(t);
            for k in 0..4 {
                ts.env[k].push(env[k]);
            }
            let inp = schedule.probe_input(t);
            ts.input[0].push(inp[0].norm());
            ts.input[1].push(inp[1].norm());
            self.next += 1;
        }
    }
}

/// `samples` points spaced uniformly over [t0, t1], both ends included.
pub fn sample_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![t0],
        n => (0..n)
            .map(|k| if k == n - 1 { t1 } else { t0 + (t1 - t0) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Advances atoms and fields together from `state.tau` to `tau_end`.
///
/// Every grid point shares one adaptive step, the smallest proposal over the grid. A step is
/// accepted only when every point accepts. Observables are taken at z = L and interpolated
/// linearly onto `samples` uniform output times. On failure the samples written so far are
/// returned with the error.
pub fn co_integrate(
    model: &AtomicModel,
    state: &mut CoState,
    schedule: &dyn Schedule,
    ctrl: &StepControl,
    tau_end: f64,
    samples: usize,
    observer: &mut dyn StepObserver,
) -> std::result::Result<TimeSeries, SimulationFailure> {
    let mut ts = TimeSeries::default();
    let fail = |ts: TimeSeries, error: Error| Err(SimulationFailure { partial: ts, error });
    if let Err(e) = ctrl.validate() {
        return fail(ts, e);
    }
    if !(tau_end > state.tau) || samples < 2 {
        return fail(ts, Error::Validation("need tau_end > tau and at least 2 output samples".into()));
    }
    let n = state.rho.len();
    if n != state.fields.grid.points || state.fields.modes.iter().any(|m| m.len() != n) {
        return fail(ts, Error::Validation("state arrays do not match the grid".into()));
    }
    let diss = Dissipator::new(&model.jumps);
    let h = state.fields.grid.spacing();
    let coef = [model.source_coefficient(Probe::A), model.source_coefficient(Probe::B)];
    let coh = [Probe::A.coherence(), Probe::B.coherence()];

    let mut sampler = Sampler { times: sample_times(state.tau, tau_end, samples), next: 0 };
    let mut prev = Record::of(state);
    sampler.emit(&mut ts, &prev, &prev, schedule);
    ts.raw.push((prev.tau, prev.ea, prev.eb));
    ts.stats.dt_smallest = f64::INFINITY;

    let mut dt = ctrl.dt_initial;
    let mut sources = vec![Complex64::new(0.0, 0.0); n];
    while state.tau < tau_end {
        let tau = state.tau;
        let remaining = tau_end - tau;
        let trial = dt.min(remaining);
        let fields = &state.fields.modes;
        let steps: Vec<Result<_>> = state
            .rho
            .par_iter()
            .enumerate()
            .map(|(i, rho)| {
                let probe = [fields[0][i], fields[1][i]];
                let step = etd_step(rho, |t| model.hamiltonian(&schedule.controls(t), &probe), &diss, tau, trial)?;
                let d = adapt_step(step.error, max_abs(rho), trial, ctrl).map_err(|e| with_tau(e, tau))?;
                Ok((step, d))
            })
            .collect();
        let mut accept = true;
        let mut dt_next = f64::INFINITY;
        let mut err_max = 0.0f64;
        for s in &steps {
            match s {
                Ok((step, d)) => {
                    accept &= d.accept;
                    dt_next = dt_next.min(d.dt_next);
                    err_max = err_max.max(step.error);
                }
                Err(e) => return fail(ts, e.clone()),
            }
        }
        log::trace!("tau = {tau:.6e} s, dt = {trial:.3e} s, max error = {err_max:.3e}, accept = {accept}");
        if !accept {
            ts.stats.rejected += 1;
            dt = dt_next;
            continue;
        }
        for (rho, s) in state.rho.iter_mut().zip(steps) {
            *rho = s.expect("checked above").0.rho;
        }
        state.tau = if trial == remaining { tau_end } else { tau + trial };
        let input = schedule.probe_input(state.tau);
        for p in Probe::ALL {
            let (u, l) = coh[p.index()];
            for (s, rho) in sources.iter_mut().zip(&state.rho) {
                *s = coef[p.index()] * rho[(u, l)];
            }
            if let Err(e) = march_z_into(input[p.index()], &sources, h, &mut state.fields.modes[p.index()]) {
                let e = match e {
                    Error::NonFiniteSource { index, message } => Error::Numerical {
                        tau: state.tau,
                        dt: trial,
                        message: format!("{message} at grid index {index}"),
                    },
                    other => other,
                };
                return fail(ts, e);
            }
        }
        ts.stats.accepted += 1;
        ts.stats.dt_smallest = ts.stats.dt_smallest.min(trial);
        ts.stats.dt_largest = ts.stats.dt_largest.max(trial);
        if trial >= dt {
            dt = dt_next;
        }
        let cur = Record::of(state);
        sampler.emit(&mut ts, &prev, &cur, schedule);
        ts.raw.push((cur.tau, cur.ea, cur.eb));
        prev = cur;
        observer.on_step(state, trial);
    }
    Ok(ts)
}
