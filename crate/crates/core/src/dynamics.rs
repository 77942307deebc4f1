//! Landau-Lifshitz-Gilbert dynamics: right-hand side, explicit Euler
//! stepping with renormalization, torque-based convergence and relaxation.

use crate::backend::{Backend, Phase, PhaseTimer, Reduction, Resident, Transfers};
use crate::error::{Error, Result};
use crate::fields::FieldProvider;
use crate::grid::Grid;
use crate::material::{MaterialParams, MU0};
use crate::state::{reduced_mean, EnergyBreakdown, SimState};
use crate::vec3::{cross, norm, scale, sub, Vec3};
use crate::vector_field::VectorField;

/// Default time step, s.
pub const DEFAULT_DT: f64 = 10e-15;
/// Default convergence threshold on max |dm/dt|, degrees per nanosecond.
pub const DEFAULT_TORQUE_TOL: f64 = 0.01;
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

const RAD_PER_S_TO_DEG_PER_NS: f64 = 180.0 / std::f64::consts::PI * 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    /// Time step, s.
    pub dt: f64,
    /// Renormalize `|M| = Ms` every this many steps.
    pub renormalize_every: u64,
    pub max_steps: u64,
    /// Convergence threshold, degrees per nanosecond.
    pub torque_tol: f64,
    /// Log every this many steps (0: only the first and last state).
    pub sample_every: u64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            renormalize_every: 1,
            max_steps: DEFAULT_MAX_STEPS,
            torque_tol: DEFAULT_TORQUE_TOL,
            sample_every: 100,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.renormalize_every == 0 {
            return Err(Error::InvalidArgument(
                "renormalize_every must be >= 1".into(),
            ));
        }
        if !(self.torque_tol.is_finite() && self.torque_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "torque tolerance must be > 0, got {}",
                self.torque_tol
            )));
        }
        Ok(())
    }
}

/// Heuristic upper bound on a stable Euler step for the exchange term:
/// `(1 + α²) Ms δmin² / (γ · 4A · 10)`. Infinite without exchange.
pub fn stability_limit(params: &MaterialParams, grid: &Grid) -> f64 {
    if params.a_ex == 0.0 {
        return f64::INFINITY;
    }
    let d = grid.min_cell_size();
    (1.0 + params.alpha * params.alpha) * params.ms * d * d
        / (params.gamma * 4.0 * params.a_ex * 10.0)
}

/// Per-cell LLG right-hand side in A/(m·s).
#[inline]
pub fn llg_rhs_cell(m: Vec3, h: Vec3, params: &MaterialParams) -> Vec3 {
    let b = scale(h, MU0);
    let a2 = 1.0 + params.alpha * params.alpha;
    let mxb = cross(m, b);
    let mxmxb = cross(m, mxb);
    let precess = -params.gamma / a2;
    let damp = -params.alpha * params.gamma / (a2 * params.ms);
    [
        precess * mxb[0] + damp * mxmxb[0],
        precess * mxb[1] + damp * mxmxb[1],
        precess * mxb[2] + damp * mxmxb[2],
    ]
}

/// `dM/dt = -γ/(1+α²) M × μ0H - αγ/((1+α²)Ms) M × (M × μ0H)`.
pub fn llg_rhs(
    m: &VectorField,
    h_eff: &VectorField,
    params: &MaterialParams,
    backend: &Backend,
    out: &mut VectorField,
) -> Result<()> {
    h_eff.check_grid(m.grid())?;
    out.check_grid(m.grid())?;
    backend.map_cells(out, |idx| llg_rhs_cell(m.get(idx), h_eff.get(idx), params));
    Ok(())
}

/// Largest `|dm/dt|` over cells (m = M/Ms), in degrees per nanosecond.
pub fn max_torque_rate(
    m: &VectorField,
    h_eff: &VectorField,
    params: &MaterialParams,
    backend: &Backend,
) -> Result<f64> {
    h_eff.check_grid(m.grid())?;
    let mut rates = vec![0.0; m.len()];
    backend.map_scalar(&mut rates, |idx| {
        norm(llg_rhs_cell(m.get(idx), h_eff.get(idx), params))
    });
    Ok(backend.reduce_cells(&rates, Reduction::Max)? / params.ms * RAD_PER_S_TO_DEG_PER_NS)
}

/// Explicit Euler integrator with reusable buffers.
#[derive(Debug)]
pub struct Stepper {
    pub config: StepperConfig,
    h_eff: VectorField,
    next: VectorField,
    fresh: bool,
}

impl Stepper {
    pub fn new(grid: Grid, config: StepperConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            h_eff: VectorField::zeros(grid),
            next: VectorField::zeros(grid),
            fresh: false,
        })
    }

    /// Effective field of the most recent [`Stepper::evaluate`].
    pub fn h_eff(&self) -> &VectorField {
        &self.h_eff
    }

    /// Computes `H_eff` for the current state; the next [`Stepper::advance`] uses it.
    pub fn evaluate<P: FieldProvider + ?Sized>(
        &mut self,
        state: &SimState,
        provider: &mut P,
        timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()> {
        provider.effective_field(&state.m, &mut self.h_eff, timer)?;
        self.fresh = true;
        Ok(())
    }

    pub fn torque<P: FieldProvider + ?Sized>(&self, state: &SimState, provider: &P) -> Result<f64> {
        max_torque_rate(&state.m, &self.h_eff, provider.params(), provider.backend())
    }

    /// One Euler update using the field from the preceding `evaluate`.
    pub fn advance(
        &mut self,
        state: &mut SimState,
        params: &MaterialParams,
        backend: &Backend,
        timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()> {
        if !self.fresh {
            return Err(Error::InvalidArgument(
                "advance called without a field evaluation for the current state".into(),
            ));
        }
        let dt = self.config.dt;
        let renorm = (state.step + 1).is_multiple_of(self.config.renormalize_every);
        let ms = params.ms;
        let m = &state.m;
        let h = &self.h_eff;
        let mut update = || {
            backend.map_cells(&mut self.next, |idx| {
                let mi = m.get(idx);
                let d = llg_rhs_cell(mi, h.get(idx), params);
                let v = [mi[0] + dt * d[0], mi[1] + dt * d[1], mi[2] + dt * d[2]];
                if renorm {
                    scale(v, ms / norm(v))
                } else {
                    v
                }
            })
        };
        match timer {
            Some(t) => t.phase(Phase::Integrate, update),
            None => update(),
        }
        std::mem::swap(&mut state.m, &mut self.next);
        state.t += dt;
        state.step += 1;
        state.energy = None;
        self.fresh = false;
        if !state.m.is_finite() {
            return Err(Error::NonFinite { step: state.step });
        }
        Ok(())
    }

    /// Evaluate the field, then advance one step.
    pub fn step<P: FieldProvider + ?Sized>(
        &mut self,
        state: &mut SimState,
        provider: &mut P,
    ) -> Result<()> {
        self.evaluate(state, provider, None)?;
        let params = *provider.params();
        self.advance(state, &params, &provider.backend().clone(), None)
    }

    /// Step with every phase reported to `timer`.
    pub fn step_timed<P: FieldProvider + ?Sized>(
        &mut self,
        state: &mut SimState,
        provider: &mut P,
        timer: &mut PhaseTimer<'_>,
    ) -> Result<()> {
        self.evaluate(state, provider, Some(timer))?;
        let params = *provider.params();
        let backend = provider.backend().clone();
        self.advance(state, &params, &backend, Some(timer))
    }
}

/// Single Euler step returning the new state.
pub fn euler_step<P: FieldProvider + ?Sized>(
    state: &SimState,
    provider: &mut P,
    config: StepperConfig,
) -> Result<SimState> {
    let mut stepper = Stepper::new(*state.grid(), config)?;
    let mut next = state.clone();
    stepper.step(&mut next, provider)?;
    Ok(next)
}

/// One logged point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub t: f64,
    pub m_mean: Vec3,
    pub energy: EnergyBreakdown,
    /// Degrees per nanosecond.
    pub max_torque: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SimState,
    pub log: Vec<Sample>,
    pub converged: bool,
    pub transfers: Transfers,
}

/// Steps until the torque drops to `config.torque_tol` or `config.max_steps`
/// steps have been taken. Not converging is reported, not an error.
pub fn relax<P: FieldProvider + ?Sized>(
    state: SimState,
    provider: &mut P,
    config: StepperConfig,
) -> Result<RunOutcome> {
    drive(state, provider, config, config.max_steps, true)
}

/// Exactly `steps` steps (no convergence stop).
pub fn run<P: FieldProvider + ?Sized>(
    state: SimState,
    provider: &mut P,
    config: StepperConfig,
    steps: u64,
) -> Result<RunOutcome> {
    drive(state, provider, config, steps, false)
}

fn drive<P: FieldProvider + ?Sized>(
    state: SimState,
    provider: &mut P,
    config: StepperConfig,
    max_steps: u64,
    stop_when_converged: bool,
) -> Result<RunOutcome> {
    state.m.check_grid(provider.grid())?;
    let mut stepper = Stepper::new(*state.grid(), config)?;
    let params = *provider.params();
    let backend = provider.backend().clone();
    let mut resident = Resident::upload(state);
    let mut log = Vec::new();
    let mut taken = 0u64;
    let converged = loop {
        stepper.evaluate(resident.device_ref(), provider, None)?;
        let torque = stepper.torque(resident.device_ref(), provider)?;
        let done = stop_when_converged && torque <= config.torque_tol;
        let last = done || taken >= max_steps;
        let due = taken == 0 || (config.sample_every > 0 && taken.is_multiple_of(config.sample_every));
        if due || last {
            let energy = provider.energies_of_last(&resident.device_ref().m)?;
            resident.device().energy = Some(energy);
            let snapshot = resident.download();
            log.push(Sample {
                step: snapshot.step,
                t: snapshot.t,
                m_mean: reduced_mean(&snapshot, params.ms),
                energy,
                max_torque: torque,
            });
        }
        if last {
            break done;
        }
        stepper.advance(resident.device(), &params, &backend, None)?;
        taken += 1;
    };
    let transfers = resident.transfers();
    let (state, _) = resident.into_inner();
    Ok(RunOutcome {
        state,
        log,
        converged,
        transfers,
    })
}

/// Angle in degrees between `m` and `target`, per cell maximum.
pub fn max_angle_to(m: &VectorField, target: Vec3) -> f64 {
    m.iter()
        .map(|v| {
            let d = norm(sub(
                scale(v, 1.0 / norm(v)),
                scale(target, 1.0 / norm(target)),
            ));
            2.0 * (0.5 * d).clamp(-1.0, 1.0).asin().to_degrees()
        })
        .fold(0.0, f64::max)
}
