//! Run driver: steps a configured integrator, tracks conserved-quantity
//! errors every step, samples diagnostics and writes CSV rows.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::config::{Integrator, SimConfig};
use crate::diagnostics::{diagnostics_inertial, diagnostics_relative, DiagnosticsRecord};
use crate::dynamics::{deriv_inertial_hamiltonian, deriv_relative_hamiltonian, rk4_step};
use crate::error::Error;
use crate::lgvi::{
    compose, step_inertial_hamiltonian, step_inertial_lagrangian, step_relative_hamiltonian,
    step_relative_lagrangian, CompositionScheme, InertialConfigPair, RelativeConfigPair,
    SolverConfig,
};
use crate::liegroup::{Mat3, Vec3};
use crate::state::{reconstruct, InertialState, RelativeState, System};

/// Number of equal time windows used for the drift check.
pub const DECILES: usize = 10;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(Error),
    #[error("step {step}: {source}")]
    Step { step: usize, source: Error },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// The underlying library error, if any.
    pub fn error(&self) -> Option<&Error> {
        match self {
            RunError::Config(e) | RunError::Step { source: e, .. } => Some(e),
            RunError::Io(_) => None,
        }
    }
}

/// Positions and momenta at one instant.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Snapshot {
    Inertial(InertialState),
    Relative(RelativeState),
}

impl Snapshot {
    pub fn diagnostics(&self, system: &System, t: f64) -> crate::Result<DiagnosticsRecord> {
        match self {
            Snapshot::Inertial(s) => diagnostics_inertial(system, s, t),
            Snapshot::Relative(s) => diagnostics_relative(system, s, t),
        }
    }

    pub fn to_inertial(&self, system: &System) -> crate::Result<InertialState> {
        match self {
            Snapshot::Inertial(s) => Ok(s.clone()),
            Snapshot::Relative(s) => reconstruct(system, s),
        }
    }
}

/// Integrator state between steps.
enum Stepper {
    InertialH(InertialState),
    /// `(q_k, q_{k+1})`: the Lagrangian maps run one configuration ahead.
    InertialL(InertialConfigPair),
    RelativeH(RelativeState),
    RelativeL(RelativeConfigPair),
    Rk4Inertial(InertialState),
    Rk4Relative(RelativeState),
    Yoshida4(RelativeState),
}

impl Stepper {
    fn new(
        integrator: Integrator,
        system: &System,
        cfg: &SimConfig,
    ) -> crate::Result<(Stepper, u32)> {
        let relative = cfg.initial_relative(system)?;
        let inertial = || reconstruct(system, &relative);
        Ok(match integrator {
            Integrator::LgviInertialH => (Stepper::InertialH(inertial()?), 0),
            Integrator::Rk4Inertial => (Stepper::Rk4Inertial(inertial()?), 0),
            Integrator::LgviRelativeH => (Stepper::RelativeH(relative), 0),
            Integrator::Rk4Relative => (Stepper::Rk4Relative(relative), 0),
            Integrator::LgviYoshida4 => (Stepper::Yoshida4(relative), 0),
            Integrator::LgviInertialL => {
                let out =
                    InertialConfigPair::from_momenta(system, &inertial()?, cfg.h, &cfg.solver)?;
                (Stepper::InertialL(out.state), out.iterations)
            }
            Integrator::LgviRelativeL => {
                let out = RelativeConfigPair::from_momenta(system, &relative, cfg.h, &cfg.solver)?;
                (Stepper::RelativeL(out.state), out.iterations)
            }
        })
    }

    fn step(&mut self, system: &System, h: f64, solver: &SolverConfig) -> crate::Result<u32> {
        let iterations = match self {
            Stepper::InertialH(s) => {
                let out = step_inertial_hamiltonian(system, s, h, solver)?;
                *s = out.state;
                out.iterations
            }
            Stepper::InertialL(p) => {
                let out = step_inertial_lagrangian(system, p, h, solver)?;
                *p = out.state;
                out.iterations
            }
            Stepper::RelativeH(s) => {
                let out = step_relative_hamiltonian(system, s, h, solver)?;
                *s = out.state;
                out.iterations
            }
            Stepper::RelativeL(p) => {
                let out = step_relative_lagrangian(system, p, h, solver)?;
                *p = out.state;
                out.iterations
            }
            Stepper::Rk4Inertial(s) => {
                *s = rk4_step(|x| deriv_inertial_hamiltonian(system, x), s, h)?;
                0
            }
            Stepper::Rk4Relative(s) => {
                *s = rk4_step(|x| deriv_relative_hamiltonian(system, x), s, h)?;
                0
            }
            Stepper::Yoshida4(s) => {
                let out = compose(&CompositionScheme::yoshida4(), s, h, |x, hh| {
                    step_relative_hamiltonian(system, x, hh, solver)
                })?;
                *s = out.state;
                out.iterations
            }
        };
        Ok(iterations)
    }

    fn snapshot(&self, system: &System, h: f64) -> crate::Result<Snapshot> {
        Ok(match self {
            Stepper::InertialH(s) | Stepper::Rk4Inertial(s) => Snapshot::Inertial(s.clone()),
            Stepper::RelativeH(s) | Stepper::Rk4Relative(s) | Stepper::Yoshida4(s) => {
                Snapshot::Relative(*s)
            }
            Stepper::InertialL(p) => Snapshot::Inertial(p.momenta(system, h)?),
            Stepper::RelativeL(p) => Snapshot::Relative(p.momenta(system, h)?),
        })
    }
}

/// Conserved-quantity errors and run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub integrator: Integrator,
    pub h: f64,
    pub steps: usize,
    pub t_final: f64,
    pub initial: DiagnosticsRecord,
    pub last: DiagnosticsRecord,
    /// `max |E − E₀|` over every step.
    pub max_energy_error: f64,
    pub max_orth_err: f64,
    pub max_linear_momentum_error: f64,
    pub max_angular_momentum_error: f64,
    /// `max |E − E₀|` within each tenth of the run.
    pub energy_error_deciles: [f64; DECILES],
    pub newton_iterations: u64,
    pub wall_time: Duration,
}

impl RunSummary {
    fn new(integrator: Integrator, h: f64, steps: usize, initial: DiagnosticsRecord) -> Self {
        RunSummary {
            integrator,
            h,
            steps,
            t_final: steps as f64 * h,
            initial,
            last: initial,
            max_energy_error: 0.0,
            max_orth_err: initial.orth_err_max,
            max_linear_momentum_error: 0.0,
            max_angular_momentum_error: 0.0,
            energy_error_deciles: [0.0; DECILES],
            newton_iterations: 0,
            wall_time: Duration::ZERO,
        }
    }

    fn track(&mut self, step: usize, d: &DiagnosticsRecord) {
        let de = (d.energy - self.initial.energy).abs();
        self.max_energy_error = self.max_energy_error.max(de);
        self.max_orth_err = self.max_orth_err.max(d.orth_err_max);
        self.max_linear_momentum_error = self
            .max_linear_momentum_error
            .max((d.linear_momentum - self.initial.linear_momentum).norm());
        self.max_angular_momentum_error = self
            .max_angular_momentum_error
            .max((d.angular_momentum - self.initial.angular_momentum).norm());
        let decile = ((step - 1) * DECILES / self.steps).min(DECILES - 1);
        self.energy_error_deciles[decile] = self.energy_error_deciles[decile].max(de);
        self.last = *d;
    }

    /// The summary without wall time, identical across repeated runs.
    pub fn deterministic_report(&self) -> String {
        let mut out = String::new();
        let lines = [
            ("integrator", self.integrator.to_string()),
            ("h", format!("{:.16e}", self.h)),
            ("steps", self.steps.to_string()),
            ("t_final", format!("{:.16e}", self.t_final)),
            ("E0", format!("{:.16e}", self.initial.energy)),
            (
                "max_energy_error",
                format!("{:.16e}", self.max_energy_error),
            ),
            ("max_orth_err", format!("{:.16e}", self.max_orth_err)),
            (
                "max_linear_momentum_error",
                format!("{:.16e}", self.max_linear_momentum_error),
            ),
            (
                "max_angular_momentum_error",
                format!("{:.16e}", self.max_angular_momentum_error),
            ),
            ("newton_iterations", self.newton_iterations.to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.deterministic_report())?;
        writeln!(f, "wall_time_s = {:.6}", self.wall_time.as_secs_f64())
    }
}

/// Everything a run produces besides the CSV rows.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// Diagnostics at every sampled step, starting with `t = 0`.
    pub samples: Vec<DiagnosticsRecord>,
    pub final_state: Snapshot,
}

fn push_vec(cols: &mut Vec<String>, prefix: &str) {
    cols.extend((1..=3).map(|i| format!("{prefix}{i}")));
}

fn push_mat(cols: &mut Vec<String>, prefix: &str) {
    for i in 1..=3 {
        for j in 1..=3 {
            cols.push(format!("{prefix}{i}{j}"));
        }
    }
}

/// CSV column names. Relative runs carry the reduced state and the body-2
/// reconstruction; inertial runs carry one block of position, attitude and
/// momenta per body.
pub fn csv_header(relative: bool, bodies: usize) -> String {
    let mut cols = vec!["t".to_string()];
    if relative {
        push_vec(&mut cols, "X");
        push_mat(&mut cols, "R");
        push_vec(&mut cols, "G");
        push_vec(&mut cols, "P");
        push_vec(&mut cols, "P2");
        push_vec(&mut cols, "x2");
        push_vec(&mut cols, "g2");
        push_mat(&mut cols, "R2");
    } else {
        for b in 1..=bodies {
            push_vec(&mut cols, &format!("x{b}"));
            push_mat(&mut cols, &format!("R{b}"));
            push_vec(&mut cols, &format!("g{b}"));
            push_vec(&mut cols, &format!("P{b}"));
        }
    }
    for c in ["E", "Ttrans", "Trot", "U"] {
        cols.push(c.to_string());
    }
    push_vec(&mut cols, "gT");
    push_vec(&mut cols, "piT");
    cols.push("orth_err".to_string());
    cols.join(",")
}

fn csv_row(snapshot: &Snapshot, d: &DiagnosticsRecord) -> String {
    let mut vals = vec![d.t];
    let vec = |v: &mut Vec<f64>, x: &Vec3| v.extend(x.iter());
    let mat = |v: &mut Vec<f64>, m: &Mat3| v.extend(m.transpose().iter());
    match snapshot {
        Snapshot::Relative(s) => {
            vec(&mut vals, &s.x);
            mat(&mut vals, &s.attitude);
            vec(&mut vals, &s.momentum);
            vec(&mut vals, &s.angular_momentum);
            vec(&mut vals, &s.angular_momentum2);
            vec(&mut vals, &s.x2);
            vec(&mut vals, &s.momentum2);
            mat(&mut vals, &s.attitude2);
        }
        Snapshot::Inertial(s) => {
            for b in &s.bodies {
                vec(&mut vals, &b.x);
                mat(&mut vals, &b.attitude);
                vec(&mut vals, &b.momentum);
                vec(&mut vals, &b.angular_momentum);
            }
        }
    }
    vals.extend([d.energy, d.t_trans, d.t_rot, d.potential]);
    vec(&mut vals, &d.linear_momentum);
    vec(&mut vals, &d.angular_momentum);
    vals.push(d.orth_err_max);
    let cells: Vec<String> = vals.iter().map(|x| format!("{x:.16e}")).collect();
    cells.join(",")
}

/// Runs `cfg` from `t = 0` to `round(t_final/h)·h`, writing the header, the
/// initial state and every `sample_every`-th state to `csv` when given. A
/// zero-step run writes the header only.
pub fn run(cfg: &SimConfig, mut csv: Option<&mut dyn Write>) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    cfg.validate().map_err(RunError::Config)?;
    let system = cfg.system().map_err(RunError::Config)?;
    let fail = |step: usize| move |source: Error| RunError::Step { step, source };

    let (mut stepper, init_iterations) =
        Stepper::new(cfg.integrator, &system, cfg).map_err(fail(0))?;
    let snapshot = stepper.snapshot(&system, cfg.h).map_err(fail(0))?;
    let initial = snapshot.diagnostics(&system, 0.0).map_err(fail(0))?;
    let steps = cfg.steps();
    let mut summary = RunSummary::new(cfg.integrator, cfg.h, steps, initial);
    summary.newton_iterations = init_iterations as u64;

    if let Some(w) = csv.as_mut() {
        writeln!(
            w,
            "{}",
            csv_header(cfg.integrator.is_relative(), system.bodies.len())
        )?;
        if steps > 0 {
            writeln!(w, "{}", csv_row(&snapshot, &initial))?;
        }
    }
    let mut samples = vec![initial];
    let mut last = snapshot;
    for k in 1..=steps {
        summary.newton_iterations +=
            stepper.step(&system, cfg.h, &cfg.solver).map_err(fail(k))? as u64;
        let snap = stepper.snapshot(&system, cfg.h).map_err(fail(k))?;
        let d = snap
            .diagnostics(&system, k as f64 * cfg.h)
            .map_err(fail(k))?;
        summary.track(k, &d);
        if k % cfg.sample_every == 0 || k == steps {
            if let Some(w) = csv.as_mut() {
                writeln!(w, "{}", csv_row(&snap, &d))?;
            }
            samples.push(d);
        }
        last = snap;
    }
    summary.wall_time = start.elapsed();
    Ok(RunOutput {
        summary,
        samples,
        final_state: last,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Side-by-side maxima of paired runs on one configuration.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub summaries: Vec<RunSummary>,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18}{:>26}{:>26}",
            "integrator", "max|E-E0|", "max_orth_err"
        )?;
        for s in &self.summaries {
            writeln!(
                f,
                "{:<18}{:>26.16e}{:>26.16e}",
                s.integrator.name(),
                s.max_energy_error,
                s.max_orth_err
            )?;
        }
        Ok(())
    }
}

/// The integrators compared against each other: the configured LGVI (or the
/// relative Hamiltonian map) and RK4 in the same coordinates.
pub fn compare_integrators(cfg: &SimConfig) -> [Integrator; 2] {
    let lgvi = if cfg.integrator.is_lgvi() {
        cfg.integrator
    } else {
        Integrator::LgviRelativeH
    };
    let rk4 = if lgvi.is_relative() {
        Integrator::Rk4Relative
    } else {
        Integrator::Rk4Inertial
    };
    [lgvi, rk4]
}

/// Runs the paired integrators of [`compare_integrators`] concurrently on
/// at most `threads` workers.
pub fn compare(
    cfg: &SimConfig,
    threads: Option<usize>,
) -> Result<(CompareReport, Vec<RunOutput>), RunError> {
    let configs: Vec<SimConfig> = compare_integrators(cfg)
        .into_iter()
        .map(|integrator| SimConfig {
            integrator,
            ..cfg.clone()
        })
        .collect();
    let outputs = crate::par::map(&configs, threads, |c| run(c, None))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summaries = outputs.iter().map(|o| o.summary.clone()).collect();
    Ok((CompareReport { summaries }, outputs))
}

/// Global error at `t_final` for each step size, and the fitted order.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub integrator: Integrator,
    pub reference_h: f64,
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "integrator = {}", self.integrator)?;
        writeln!(f, "reference_h = {:.16e}", self.reference_h)?;
        writeln!(f, "{:>24}{:>26}", "h", "error")?;
        for (h, e) in &self.rows {
            writeln!(f, "{h:>24.16e}{e:>26.16e}")?;
        }
        writeln!(f, "slope = {:.6}", self.slope)
    }
}

/// Distance between two inertial configurations:
/// `√(Σᵢ ‖Δxᵢ‖² + ‖ΔRᵢ‖²_F)`.
pub fn configuration_error(a: &InertialState, b: &InertialState) -> f64 {
    a.bodies
        .iter()
        .zip(&b.bodies)
        .map(|(p, q)| (p.x - q.x).norm_squared() + (p.attitude - q.attitude).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Checks a step ladder: at least three sizes, strictly decreasing.
pub fn validate_steps(steps: &[f64]) -> crate::Result<()> {
    if steps.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 step sizes, got {}",
            steps.len()
        )));
    }
    if steps.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidConfig("step sizes must be positive".into()));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "step sizes must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Runs `cfg` at every step in `steps` plus a reference at a quarter of the
/// finest step, all concurrently on at most `threads` workers, and fits the
/// log-log slope of the final configuration error.
pub fn converge(
    cfg: &SimConfig,
    steps: &[f64],
    threads: Option<usize>,
) -> Result<ConvergenceReport, RunError> {
    validate_steps(steps).map_err(RunError::Config)?;
    let system = cfg.system().map_err(RunError::Config)?;
    let reference_h = steps[steps.len() - 1] / 4.0;
    let mut ladder = steps.to_vec();
    ladder.push(reference_h);
    let configs: Vec<SimConfig> = ladder
        .iter()
        .map(|&h| {
            let mut c = cfg.clone();
            c.h = h;
            c.sample_every = usize::MAX;
            c
        })
        .collect();
    let results = crate::par::map(&configs, threads, |c| run(c, None));
    let mut finals = Vec::with_capacity(results.len());
    for r in results {
        let out = r?;
        finals.push(
            out.final_state
                .to_inertial(&system)
                .map_err(RunError::Config)?,
        );
    }
    let reference = finals.pop().expect("reference run");
    let rows: Vec<(f64, f64)> = steps
        .iter()
        .zip(&finals)
        .map(|(&h, s)| (h, configuration_error(s, &reference)))
        .collect();
    let xs: Vec<f64> = rows.iter().map(|(h, _)| h.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, e)| e.ln()).collect();
    Ok(ConvergenceReport {
        integrator: cfg.integrator,
        reference_h,
        rows,
        slope: linear_fit_slope(&xs, &ys),
    })
}
