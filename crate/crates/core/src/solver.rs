//! Method-of-lines solver on a cell-centred grid with zero-flux boundaries.
//!
//! Transport is written in conservative flux form with arithmetic interface
//! means; time stepping is classical RK4 with a step size limited by
//! diffusion and by the taxis velocity.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::model::{equilibrium, kinetics, Parameters, Sensitivity};
use crate::{Error, Result};

/// Uniform cell-centred grid on `(0, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    /// Requires `n >= 16` and a positive finite length.
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidConfig("grid needs at least 16 cells"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::NonPositiveParameter("L"));
        }
        Ok(Self { length, n })
    }

    /// Domain length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Centre of cell `i`.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let i = libm::floor(x / self.h());
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n - 1)
        }
    }
}

/// Species densities on the grid at time `t`, stored as `[u | v | w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    /// Simulation time.
    pub t: f64,
    n: usize,
    data: Vec<f64>,
}

impl StateField {
    /// Builds a field from three equally long profiles.
    pub fn from_profiles(t: f64, u: &[f64], v: &[f64], w: &[f64]) -> Result<Self> {
        let n = u.len();
        if v.len() != n || w.len() != n {
            return Err(Error::InvalidConfig("profiles differ in length"));
        }
        let mut data = Vec::with_capacity(3 * n);
        data.extend_from_slice(u);
        data.extend_from_slice(v);
        data.extend_from_slice(w);
        Ok(Self { t, n, data })
    }

    /// Constant field.
    pub fn constant(n: usize, u: f64, v: f64, w: f64) -> Self {
        let mut data = vec![u; 3 * n];
        data[n..2 * n].fill(v);
        data[2 * n..].fill(w);
        Self { t: 0.0, n, data }
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// First predator.
    pub fn u(&self) -> &[f64] {
        &self.data[..self.n]
    }

    /// Second predator.
    pub fn v(&self) -> &[f64] {
        &self.data[self.n..2 * self.n]
    }

    /// Prey.
    pub fn w(&self) -> &[f64] {
        &self.data[2 * self.n..]
    }

    /// Packed `[u | v | w]`.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mutable packed `[u | v | w]`.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Species `0`, `1` or `2`.
    pub fn species(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.n..(idx + 1) * self.n]
    }
}

fn check_finite(data: &[f64], n: usize, t: f64) -> Result<()> {
    match data.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFiniteState { cell: i % n, t }),
        None => Ok(()),
    }
}

/// Evaluates the semi-discrete right-hand side into `out` and returns the
/// largest interface magnitude of `phi(w) w_x`.
fn rhs_kernel(p: &Parameters, s: &Sensitivity, h: f64, y: &[f64], out: &mut [f64]) -> f64 {
    let n = y.len() / 3;
    let (u, rest) = y.split_at(n);
    let (v, w) = rest.split_at(n);
    let (du, rest) = out.split_at_mut(n);
    let (dv, dw) = rest.split_at_mut(n);
    let inv_h = 1.0 / h;
    let (d1, d2, d3) = (p.d1 * inv_h, p.d2 * inv_h, p.d3 * inv_h);
    let (chi, xi) = (p.chi, p.xi);
    let mut prev = (0.0, 0.0, 0.0);
    let mut phi_max = 0.0_f64;
    for i in 0..n {
        let (fu, fv, fw) = if i + 1 < n {
            let dw_ = w[i + 1] - w[i];
            let grad = dw_ * inv_h;
            let drift = s.phi(0.5 * (w[i] + w[i + 1])) * grad;
            phi_max = phi_max.max(drift.abs());
            (
                d1 * (u[i + 1] - u[i]) - chi * 0.5 * (u[i] + u[i + 1]) * drift,
                d2 * (v[i + 1] - v[i]) - xi * 0.5 * (v[i] + v[i + 1]) * drift,
                d3 * dw_,
            )
        } else {
            (0.0, 0.0, 0.0)
        };
        let [f1, f2, f3] = kinetics(p, u[i], v[i], w[i]);
        du[i] = (fu - prev.0) * inv_h + f1;
        dv[i] = (fv - prev.1) * inv_h + f2;
        dw[i] = (fw - prev.2) * inv_h + f3;
        prev = (fu, fv, fw);
    }
    phi_max
}

/// Time derivative of a state.
pub fn rhs(p: &Parameters, s: &Sensitivity, grid: &Grid, state: &StateField) -> Result<StateField> {
    if state.n != grid.n {
        return Err(Error::InvalidConfig("state does not match grid"));
    }
    check_finite(&state.data, state.n, state.t)?;
    let mut out = StateField { t: state.t, n: state.n, data: vec![0.0; 3 * state.n] };
    rhs_kernel(p, s, grid.h(), &state.data, &mut out.data);
    Ok(out)
}

/// Which runtime monitors are armed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monitors {
    /// No negative density.
    pub positivity: bool,
    /// Prey stays in `(0, 1)`; only armed if the initial prey lies in `[0, 1]`.
    pub w_range: bool,
    /// Predator masses respect the a-priori bound.
    pub l1: bool,
}

impl Default for Monitors {
    fn default() -> Self {
        Self { positivity: true, w_range: true, l1: true }
    }
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Safety factor of the step-size rule.
    pub cfl: f64,
    /// Upper bound on the step.
    pub dt_max: f64,
    /// Final time.
    pub t_end: f64,
    /// Time between snapshots; zero keeps only the first and last.
    pub snapshot_interval: f64,
    /// Time between probe samples; zero samples every step.
    pub probe_interval: f64,
    /// Steady when `max |du/dt|` stays below this, without growing, on
    /// consecutive checks.
    pub steady_tolerance: f64,
    /// Time between steady checks.
    pub steady_check_interval: f64,
    /// Consecutive passing checks required.
    pub steady_checks: u32,
    /// No steady check before this much simulated time has elapsed.
    pub steady_min_time: f64,
    /// Probe positions in `x`.
    pub probes: Vec<f64>,
    /// Armed monitors.
    pub monitors: Monitors,
    /// Any `|field|` above this stops the run.
    pub blowup: f64,
    /// Steps below this abort the run.
    pub dt_min: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.25,
            dt_max: 0.1,
            t_end: 100.0,
            snapshot_interval: 0.0,
            probe_interval: 0.0,
            steady_tolerance: 1e-7,
            steady_check_interval: 1.0,
            steady_checks: 3,
            steady_min_time: 0.0,
            probes: vec![0.0],
            monitors: Monitors::default(),
            blowup: 1e6,
            dt_min: 1e-14,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(Error::InvalidConfig("cfl must be positive"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidConfig("dt_max must be positive"));
        }
        if !ok(self.t_end) || !ok(self.snapshot_interval) || !ok(self.probe_interval) || !ok(self.steady_min_time) {
            return Err(Error::InvalidConfig("times must be finite and non-negative"));
        }
        if !(self.steady_check_interval > 0.0) || self.steady_checks == 0 {
            return Err(Error::InvalidConfig("steady check settings"));
        }
        Ok(())
    }
}

/// Step-size rule: `cfl h^2 / (2 max d + h |chi| Phi + h |xi| Phi)`.
pub fn stable_dt(p: &Parameters, h: f64, phi_max: f64, cfg: &SolverConfig) -> f64 {
    let denom = 2.0 * p.max_diffusion() + h * (p.chi.abs() + p.xi.abs()) * phi_max;
    (cfg.cfl * h * h / denom).min(cfg.dt_max)
}

/// How the cosine perturbation is scaled in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `cos(mode pi x)`, independent of `L`.
    #[default]
    Literal,
    /// `cos(mode pi x / L)`, a Neumann eigenfunction.
    Neumann,
}

/// Equilibrium plus `amplitude cos(...)` in every species.
pub fn initial_cosine(
    p: &Parameters,
    grid: &Grid,
    amplitude: f64,
    mode: u32,
    convention: Convention,
) -> Result<StateField> {
    let e = equilibrium(p)?;
    let freq = match convention {
        Convention::Literal => mode as f64 * PI,
        Convention::Neumann => mode as f64 * PI / grid.length,
    };
    let n = grid.n;
    let mut st = StateField::constant(n, e.u, e.v, e.w);
    for i in 0..n {
        let c = amplitude * libm::cos(freq * grid.x(i));
        st.data[i] += c;
        st.data[n + i] += c;
        st.data[2 * n + i] += c;
    }
    let bad_sign = st.data.iter().any(|&x| x <= 0.0);
    let bad_w = st.w().iter().any(|&x| x > 1.0);
    if bad_sign || bad_w {
        return Err(Error::AmplitudeTooLarge);
    }
    Ok(st)
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The steady test passed.
    Steady,
    /// Reached `t_end`.
    EndTime,
    /// A field exceeded the blow-up guard.
    BlowupGuard,
    /// A monitor reported a violation.
    Violation,
}

impl core::fmt::Display for Termination {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Termination::Steady => "steady",
            Termination::EndTime => "t_end",
            Termination::BlowupGuard => "blowup-guard",
            Termination::Violation => "violation",
        })
    }
}

/// Monitor log entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonitorEvent {
    /// Run started.
    Started {
        /// Whether the prey-range monitor is armed.
        w_range_armed: bool,
    },
    /// Negative density.
    Negative {
        /// Species index.
        species: usize,
        /// Cell.
        cell: usize,
        /// Time.
        t: f64,
        /// Offending value.
        value: f64,
    },
    /// Prey left `(0, 1)`.
    PreyRange {
        /// Cell.
        cell: usize,
        /// Time.
        t: f64,
        /// Offending value.
        value: f64,
    },
    /// Predator mass above the a-priori bound.
    Mass {
        /// Species index.
        species: usize,
        /// Time.
        t: f64,
        /// Mass.
        mass: f64,
        /// Bound.
        bound: f64,
    },
    /// A field exceeded the blow-up guard.
    Blowup {
        /// Species index.
        species: usize,
        /// Cell.
        cell: usize,
        /// Time.
        t: f64,
    },
    /// Steady state detected.
    SteadyDetected {
        /// Time.
        t: f64,
        /// `max |du/dt|`.
        residual: f64,
    },
    /// Run finished.
    Finished {
        /// Time.
        t: f64,
        /// Steps taken.
        steps: u64,
        /// Reason.
        termination: Termination,
    },
}

const SPECIES: [&str; 3] = ["u", "v", "w"];

impl core::fmt::Display for MonitorEvent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            MonitorEvent::Started { w_range_armed } => {
                write!(f, "start: w-range monitor {}", if w_range_armed { "armed" } else { "off" })
            }
            MonitorEvent::Negative { species, cell, t, value } => {
                write!(f, "violation: {} < 0 at cell {cell}, t = {t}: {value:e}", SPECIES[species])
            }
            MonitorEvent::PreyRange { cell, t, value } => {
                write!(f, "violation: w outside (0,1) at cell {cell}, t = {t}: {value:e}")
            }
            MonitorEvent::Mass { species, t, mass, bound } => {
                write!(f, "violation: mass of {} = {mass} exceeds {bound} at t = {t}", SPECIES[species])
            }
            MonitorEvent::Blowup { species, cell, t } => {
                write!(f, "guard: |{}| above limit at cell {cell}, t = {t}", SPECIES[species])
            }
            MonitorEvent::SteadyDetected { t, residual } => {
                write!(f, "steady: max|rhs| = {residual:e} at t = {t}")
            }
            MonitorEvent::Finished { t, steps, termination } => {
                write!(f, "finished: {termination} at t = {t} after {steps} steps")
            }
        }
    }
}

impl MonitorEvent {
    /// Whether the event is a monitor violation.
    pub fn is_violation(&self) -> bool {
        matches!(self, MonitorEvent::Negative { .. } | MonitorEvent::PreyRange { .. } | MonitorEvent::Mass { .. })
    }
}

/// Point samples of the three species.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeSeries {
    /// Requested position.
    pub x: f64,
    /// Sampled cell.
    pub cell: usize,
    /// Sample times.
    pub t: Vec<f64>,
    /// `u` samples.
    pub u: Vec<f64>,
    /// `v` samples.
    pub v: Vec<f64>,
    /// `w` samples.
    pub w: Vec<f64>,
}

impl ProbeSeries {
    /// Samples of species `0`, `1` or `2`.
    pub fn species(&self, idx: usize) -> &[f64] {
        match idx {
            0 => &self.u,
            1 => &self.v,
            _ => &self.w,
        }
    }

    fn record(&mut self, st: &StateField) {
        self.t.push(st.t);
        self.u.push(st.u()[self.cell]);
        self.v.push(st.v()[self.cell]);
        self.w.push(st.w()[self.cell]);
    }
}

/// Output of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Snapshots in increasing time; the last one is the final state.
    pub snapshots: Vec<StateField>,
    /// One series per probe.
    pub probes: Vec<ProbeSeries>,
    /// Monitor log.
    pub log: Vec<MonitorEvent>,
    /// Why the run stopped.
    pub termination: Termination,
    /// Steps taken.
    pub steps: u64,
    /// `max |du/dt|` at the final state.
    pub final_residual: f64,
}

impl RunRecord {
    /// Final state.
    pub fn last(&self) -> &StateField {
        self.snapshots.last().expect("a run always keeps its initial state")
    }

    /// Number of monitor violations.
    pub fn violations(&self) -> usize {
        self.log.iter().filter(|e| e.is_violation()).count()
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Step size used.
    pub dt: f64,
    /// `max |du/dt|` at the start of the step.
    pub residual: f64,
}

/// RK4 stepper with preallocated stage buffers.
#[derive(Debug, Clone)]
pub struct Stepper {
    p: Parameters,
    s: Sensitivity,
    grid: Grid,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    /// Allocates buffers for `grid`.
    pub fn new(p: &Parameters, s: &Sensitivity, grid: &Grid) -> Self {
        let m = 3 * grid.n;
        Self {
            p: *p,
            s: *s,
            grid: *grid,
            k: [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]],
            tmp: vec![0.0; m],
        }
    }

    /// Advances `state` by the rule step, never past `t_limit`.
    pub fn step(&mut self, state: &mut StateField, cfg: &SolverConfig, t_limit: f64) -> Result<StepInfo> {
        let h = self.grid.h();
        let phi_max = rhs_kernel(&self.p, &self.s, h, &state.data, &mut self.k[0]);
        let dt_rule = stable_dt(&self.p, h, phi_max, cfg);
        if !(dt_rule >= cfg.dt_min) {
            return Err(Error::StepSizeUnderflow { dt: dt_rule, t: state.t });
        }
        let dt = dt_rule.min(t_limit - state.t);
        let residual = self.k[0].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        self.advance(state, dt);
        Ok(StepInfo { dt, residual })
    }

    /// One RK4 step of size `dt`, reusing `k[0]` as the first stage.
    fn advance(&mut self, state: &mut StateField, dt: f64) {
        let (p, s, h) = (&self.p, &self.s, self.grid.h());
        let y = &mut state.data;
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        let half = 0.5 * dt;
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *t = a + half * b;
        }
        rhs_kernel(p, s, h, tmp, k2);
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *t = a + half * b;
        }
        rhs_kernel(p, s, h, tmp, k3);
        for ((t, &a), &b) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *t = a + dt * b;
        }
        rhs_kernel(p, s, h, tmp, k4);
        let sixth = dt / 6.0;
        for i in 0..y.len() {
            y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        state.t += dt;
    }

    /// RK4 step of exactly `dt`, ignoring the step-size rule.
    pub fn step_fixed(&mut self, state: &mut StateField, dt: f64) {
        rhs_kernel(&self.p, &self.s, self.grid.h(), &state.data, &mut self.k[0]);
        self.advance(state, dt);
    }
}

/// A single rule-limited step.
pub fn step(
    p: &Parameters,
    s: &Sensitivity,
    grid: &Grid,
    state: &StateField,
    cfg: &SolverConfig,
) -> Result<StateField> {
    cfg.validate()?;
    check_finite(&state.data, state.n, state.t)?;
    let mut next = state.clone();
    Stepper::new(p, s, grid).step(&mut next, cfg, f64::INFINITY)?;
    check_finite(&next.data, next.n, next.t)?;
    if let Some(i) = next.data.iter().position(|x| x.abs() > cfg.blowup) {
        return Err(Error::BlowupGuard { cell: i % next.n, t: next.t });
    }
    Ok(next)
}

fn sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

/// Integrates until steady, `t_end`, a guard or a violation.
pub fn integrate(
    p: &Parameters,
    s: &Sensitivity,
    grid: &Grid,
    state0: &StateField,
    cfg: &SolverConfig,
) -> Result<RunRecord> {
    cfg.validate()?;
    if state0.n != grid.n {
        return Err(Error::InvalidConfig("state does not match grid"));
    }
    check_finite(&state0.data, state0.n, state0.t)?;
    let n = grid.n;
    let h = grid.h();
    let t0 = state0.t;
    let mut state = state0.clone();
    let mut stepper = Stepper::new(p, s, grid);

    let w_range_armed = cfg.monitors.w_range && state.w().iter().all(|&w| (0.0..=1.0).contains(&w));
    let mass0 = [sum(state.u()) * h, sum(state.v()) * h];
    let mut sup_w = state.w().iter().fold(0.0_f64, |m, &x| m.max(x));

    let mut log = vec![MonitorEvent::Started { w_range_armed }];
    let mut probes: Vec<ProbeSeries> = cfg
        .probes
        .iter()
        .map(|&x| ProbeSeries { x, cell: grid.cell_of(x), ..Default::default() })
        .collect();
    for pr in probes.iter_mut() {
        pr.record(&state);
    }
    let mut snapshots = vec![state.clone()];

    let t_end = t0 + cfg.t_end;
    let mut next_snap = Schedule::new(t0, cfg.snapshot_interval);
    let mut next_probe = Schedule::new(t0, cfg.probe_interval);
    let mut next_check = t0 + cfg.steady_check_interval;
    let mut passes = 0u32;
    let mut last_check = f64::INFINITY;
    let mut steps = 0u64;
    let mut residual = f64::INFINITY;
    let termination;

    loop {
        if state.t >= t_end {
            termination = Termination::EndTime;
            break;
        }
        let limit = t_end.min(next_snap.due()).min(next_probe.due());
        let info = stepper.step(&mut state, cfg, limit)?;
        steps += 1;
        residual = info.residual;
        check_finite(&state.data, n, state.t)?;

        // Snap to scheduled times so that floating drift never splits a step.
        for target in [t_end, next_snap.due(), next_probe.due()] {
            if target.is_finite() && (state.t - target).abs() <= 1e-12 * target.abs().max(1.0) {
                state.t = target;
            }
        }

        if let Some(i) = state.data.iter().position(|x| x.abs() > cfg.blowup) {
            log.push(MonitorEvent::Blowup { species: i / n, cell: i % n, t: state.t });
            termination = Termination::BlowupGuard;
            break;
        }
        if let Some(ev) = monitor(&state, grid, p, cfg, w_range_armed, mass0, &mut sup_w) {
            log.push(ev);
            termination = Termination::Violation;
            break;
        }

        if next_probe.hit(state.t) {
            for pr in probes.iter_mut() {
                pr.record(&state);
            }
        }
        if cfg.snapshot_interval > 0.0 && next_snap.hit(state.t) && state.t < t_end {
            snapshots.push(state.clone());
        }
        let check_due = state.t >= next_check;
        while next_check <= state.t {
            next_check += cfg.steady_check_interval;
        }
        if check_due && state.t - t0 >= cfg.steady_min_time {
            // A small but growing residual means the state is leaving an
            // unstable equilibrium, not settling.
            let settling = residual <= last_check || residual < 1e-3 * cfg.steady_tolerance;
            last_check = residual;
            if residual < cfg.steady_tolerance && settling {
                passes += 1;
                if passes >= cfg.steady_checks {
                    log.push(MonitorEvent::SteadyDetected { t: state.t, residual });
                    termination = Termination::Steady;
                    break;
                }
            } else {
                passes = 0;
            }
        }
    }

    if steps > 0 {
        if probes.first().is_some_and(|pr| pr.t.last() != Some(&state.t)) {
            for pr in probes.iter_mut() {
                pr.record(&state);
            }
        }
        snapshots.push(state.clone());
        let mut scratch = vec![0.0; 3 * n];
        rhs_kernel(p, s, h, &state.data, &mut scratch);
        residual = scratch.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    } else {
        let mut scratch = vec![0.0; 3 * n];
        rhs_kernel(p, s, h, &state.data, &mut scratch);
        residual = scratch.iter().fold(0.0_f64, |m, x| m.max(x.abs())).min(residual);
    }
    log.push(MonitorEvent::Finished { t: state.t, steps, termination });
    Ok(RunRecord { snapshots, probes, log, termination, steps, final_residual: residual })
}

/// Sampling times `t0 + j * interval`; interval zero means every step.
struct Schedule {
    t0: f64,
    interval: f64,
    j: u64,
}

impl Schedule {
    fn new(t0: f64, interval: f64) -> Self {
        Self { t0, interval, j: 1 }
    }

    fn due(&self) -> f64 {
        if self.interval > 0.0 {
            self.t0 + self.j as f64 * self.interval
        } else {
            f64::INFINITY
        }
    }

    fn hit(&mut self, t: f64) -> bool {
        if self.interval <= 0.0 {
            return true;
        }
        if t >= self.due() {
            while self.due() <= t {
                self.j += 1;
            }
            return true;
        }
        false
    }
}

fn monitor(
    st: &StateField,
    grid: &Grid,
    p: &Parameters,
    cfg: &SolverConfig,
    w_range_armed: bool,
    mass0: [f64; 2],
    sup_w: &mut f64,
) -> Option<MonitorEvent> {
    let n = st.n;
    let t = st.t;
    if cfg.monitors.positivity {
        if let Some(i) = st.data.iter().position(|&x| x < 0.0) {
            return Some(MonitorEvent::Negative { species: i / n, cell: i % n, t, value: st.data[i] });
        }
    }
    let w = st.w();
    *sup_w = w.iter().fold(*sup_w, |m, &x| m.max(x));
    if w_range_armed {
        if let Some(i) = w.iter().position(|&x| !(-1e-10..=1.0 + 1e-10).contains(&x)) {
            return Some(MonitorEvent::PreyRange { cell: i, t, value: w[i] });
        }
    }
    if cfg.monitors.l1 {
        let h = grid.h();
        let l = grid.length();
        let rates = [p.beta1 / p.alpha1, p.beta2 / p.alpha2];
        for species in 0..2 {
            let mass = sum(st.species(species)) * h;
            let bound = mass0[species].max(l * (1.0 + rates[species] * *sup_w)) + 1e-6;
            if mass > bound {
                return Some(MonitorEvent::Mass { species, t, mass, bound });
            }
        }
    }
    None
}
