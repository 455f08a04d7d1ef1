//! Run configuration: TOML parsing, unit normalization and the default
//! two-dumbbell experiment.
//!
//! ```toml
//! [run]
//! integrator = "lgvi-relative-h"
//! h = 1e-3
//! t_final = 12
//! sample_every = 10
//!
//! [body1]
//! mass = 1.5
//! length = 0.25
//! inertia = [0.0004, 0.0238, 0.0238]
//!
//! [body2]
//! mass = 3
//! points = [[0.25, 0, 0, 0.5], [-0.25, 0, 0, 0.5]]
//!
//! [initial]
//! X = [1, 0, 0.3]
//! V = [0, 1, 0]
//! Omega1 = [0, 0, 9]
//! ```
//!
//! `X` and `V` are the position and velocity of body 1 relative to body 2,
//! expressed in the body-2 frame. Angular velocities are body-fixed.
//! Attitudes are given as 9 numbers in row-major order and default to the
//! identity. `inertia` is the standard moment of inertia, either its
//! diagonal or all 9 entries.
//!
//! With `units = "physical"` in `[run]`, every value is read in a consistent
//! physical unit system and a `[physical]` section supplies `G` and the
//! reference `length`; the configuration is then normalized on load.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::lgvi::SolverConfig;
use crate::liegroup::{Mat3, Vec3};
use crate::potential::{dumbbell_model, BodyModel, Gravity, PointMass, DEFAULT_MIN_SEPARATION};
use crate::state::{reconstruct, InertialState, RelativeState, RelativeVelocities, System};

/// The available integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrator {
    LgviInertialH,
    LgviInertialL,
    LgviRelativeH,
    LgviRelativeL,
    Rk4Inertial,
    Rk4Relative,
    LgviYoshida4,
}

impl Integrator {
    pub const ALL: [Integrator; 7] = [
        Integrator::LgviInertialH,
        Integrator::LgviInertialL,
        Integrator::LgviRelativeH,
        Integrator::LgviRelativeL,
        Integrator::Rk4Inertial,
        Integrator::Rk4Relative,
        Integrator::LgviYoshida4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Integrator::LgviInertialH => "lgvi-inertial-h",
            Integrator::LgviInertialL => "lgvi-inertial-l",
            Integrator::LgviRelativeH => "lgvi-relative-h",
            Integrator::LgviRelativeL => "lgvi-relative-l",
            Integrator::Rk4Inertial => "rk4-inertial",
            Integrator::Rk4Relative => "rk4-relative",
            Integrator::LgviYoshida4 => "lgvi-yoshida4",
        }
    }

    /// Whether the trajectory is carried in relative coordinates.
    pub fn is_relative(self) -> bool {
        matches!(
            self,
            Integrator::LgviRelativeH
                | Integrator::LgviRelativeL
                | Integrator::Rk4Relative
                | Integrator::LgviYoshida4
        )
    }

    pub fn is_lgvi(self) -> bool {
        !matches!(self, Integrator::Rk4Inertial | Integrator::Rk4Relative)
    }

    /// Nominal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            Integrator::Rk4Inertial | Integrator::Rk4Relative | Integrator::LgviYoshida4 => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Integrator::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Integrator::ALL.iter().map(|i| i.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown integrator '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Mass distribution of a body.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Two equal halves at `±length/2` along the body x-axis.
    Dumbbell {
        length: f64,
    },
    Points(Vec<PointMass>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec {
    pub mass: f64,
    pub shape: Shape,
    /// Standard moment of inertia replacing the one implied by the points.
    pub inertia: Option<Mat3>,
}

impl BodySpec {
    pub fn build(&self) -> Result<BodyModel> {
        let model = match &self.shape {
            Shape::Dumbbell { length } => dumbbell_model(self.mass, *length)?,
            Shape::Points(points) => BodyModel::from_points(self.mass, points.clone())?,
        };
        match self.inertia {
            Some(j) => model.with_standard_inertia(j),
            None => Ok(model),
        }
    }

    fn scaled(&self, mass: f64, length: f64) -> BodySpec {
        BodySpec {
            mass: self.mass * mass,
            shape: match &self.shape {
                Shape::Dumbbell { length: l } => Shape::Dumbbell { length: l * length },
                Shape::Points(points) => Shape::Points(
                    points
                        .iter()
                        .map(|p| PointMass {
                            offset: p.offset * length,
                            fraction: p.fraction,
                        })
                        .collect(),
                ),
            },
            inertia: self.inertia.map(|j| j * (mass * length * length)),
        }
    }
}

/// Initial relative motion plus the inertial motion of body 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub x: Vec3,
    pub v: Vec3,
    pub omega1: Vec3,
    pub r: Mat3,
    pub x2: Vec3,
    pub v2: Vec3,
    pub omega2: Vec3,
    pub r2: Mat3,
}

/// Reference scales of a normalized configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    /// Reduced mass `m₁m₂/(m₁+m₂)`.
    pub mass: f64,
    pub length: f64,
    /// `√(l³/(G(m₁+m₂)))`
    pub time: f64,
    /// Physical gravitational constant.
    pub gravity: f64,
}

/// A complete run description, normally in normalized units. Physical-unit
/// configs only exist transiently as input to [`normalize`] or output of
/// [`denormalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub body1: BodySpec,
    pub body2: BodySpec,
    pub initial: InitialConditions,
    pub h: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub solver: SolverConfig,
    pub sample_every: usize,
    pub output: Option<PathBuf>,
    pub gravity_constant: f64,
    pub min_separation: f64,
    /// Present when the config was normalized from physical units.
    pub scales: Option<Scales>,
}

pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 12.0;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;

impl SimConfig {
    /// Two dumbbells on a close fly-by, in normalized units.
    pub fn flyby_default() -> SimConfig {
        SimConfig {
            body1: BodySpec {
                mass: 1.5,
                shape: Shape::Dumbbell { length: 0.25 },
                inertia: Some(Mat3::from_diagonal(&Vec3::new(0.0004, 0.0238, 0.0238))),
            },
            body2: BodySpec {
                mass: 3.0,
                shape: Shape::Dumbbell { length: 0.5 },
                inertia: Some(Mat3::from_diagonal(&Vec3::new(0.0030, 0.1905, 0.1905))),
            },
            initial: InitialConditions {
                x: Vec3::new(1.0, 0.0, 0.3),
                v: Vec3::new(0.0, 1.0, 0.0),
                omega1: Vec3::new(0.0, 0.0, 9.0),
                r: Mat3::identity(),
                x2: Vec3::new(-0.33, 0.0, -0.1),
                v2: Vec3::new(0.0, -0.33, 0.0),
                omega2: Vec3::zeros(),
                r2: Mat3::identity(),
            },
            h: DEFAULT_H,
            t_final: DEFAULT_T_FINAL,
            integrator: Integrator::LgviRelativeH,
            solver: SolverConfig::default(),
            sample_every: DEFAULT_SAMPLE_EVERY,
            output: None,
            gravity_constant: Gravity::normalized(1.5, 3.0).constant,
            min_separation: DEFAULT_MIN_SEPARATION,
            scales: None,
        }
    }

    /// Number of steps, `round(t_final / h)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.h).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "step h must be positive, got {}",
                self.h
            )));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_final must be non-negative, got {}",
                self.t_final
            )));
        }
        if self.t_final > 0.0 && self.steps() < 1 {
            return Err(Error::InvalidConfig(
                "t_final is shorter than half a step".into(),
            ));
        }
        if self.sample_every < 1 {
            return Err(Error::InvalidConfig(
                "sample_every must be at least 1".into(),
            ));
        }
        if !(self.gravity_constant > 0.0) || !self.gravity_constant.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gravity constant must be positive, got {}",
                self.gravity_constant
            )));
        }
        if !(self.min_separation >= 0.0) {
            return Err(Error::InvalidConfig(
                "min_separation must be non-negative".into(),
            ));
        }
        self.solver.validate()?;
        self.system()?;
        Ok(())
    }

    pub fn system(&self) -> Result<System> {
        let gravity = Gravity {
            constant: self.gravity_constant,
            min_separation: self.min_separation,
        };
        Ok(System::two_body(
            self.body1.build()?,
            self.body2.build()?,
            gravity,
        ))
    }

    pub fn initial_relative(&self, system: &System) -> Result<RelativeState> {
        let ic = &self.initial;
        RelativeState::from_velocities(
            system,
            &RelativeVelocities {
                x: ic.x,
                attitude: ic.r,
                velocity: ic.v,
                angular_velocity: ic.r * ic.omega1,
                angular_velocity2: ic.omega2,
                x2: ic.x2,
                velocity2: ic.v2,
                attitude2: ic.r2,
            },
        )
    }

    pub fn initial_inertial(&self, system: &System) -> Result<InertialState> {
        reconstruct(system, &self.initial_relative(system)?)
    }

    /// Parses a TOML configuration, normalizing it if it is in physical
    /// units.
    pub fn parse(text: &str) -> Result<SimConfig> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::InvalidConfig(e.message().to_string()))?;
        let cfg = from_table(&table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SimConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        SimConfig::parse(&text)
    }

    fn rescaled(
        &self,
        mass: f64,
        length: f64,
        time: f64,
        gravity_constant: f64,
        scales: Option<Scales>,
    ) -> SimConfig {
        let velocity = length / time;
        let ic = &self.initial;
        SimConfig {
            body1: self.body1.scaled(mass, length),
            body2: self.body2.scaled(mass, length),
            initial: InitialConditions {
                x: ic.x * length,
                v: ic.v * velocity,
                omega1: ic.omega1 / time,
                r: ic.r,
                x2: ic.x2 * length,
                v2: ic.v2 * velocity,
                omega2: ic.omega2 / time,
                r2: ic.r2,
            },
            h: self.h * time,
            t_final: self.t_final * time,
            integrator: self.integrator,
            solver: self.solver,
            sample_every: self.sample_every,
            output: self.output.clone(),
            gravity_constant,
            min_separation: self.min_separation * length,
            scales,
        }
    }
}

/// Converts a configuration in physical units, with `gravity_constant` the
/// physical `G`, into normalized units against the reference length.
pub fn normalize(physical: &SimConfig, reference_length: f64) -> Result<SimConfig> {
    let g = physical.gravity_constant;
    let (m1, m2) = (physical.body1.mass, physical.body2.mass);
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidPhysicalUnits(format!(
            "G must be positive, got {g}"
        )));
    }
    if !(m1 > 0.0 && m2 > 0.0) || !(m1 + m2).is_finite() {
        return Err(Error::InvalidPhysicalUnits(format!(
            "masses must be positive, got {m1} and {m2}"
        )));
    }
    if !(reference_length > 0.0) || !reference_length.is_finite() {
        return Err(Error::InvalidPhysicalUnits(format!(
            "reference length must be positive, got {reference_length}"
        )));
    }
    if physical.scales.is_some() {
        return Err(Error::InvalidPhysicalUnits(
            "configuration is already normalized".into(),
        ));
    }
    let mass = m1 * m2 / (m1 + m2);
    let time = (reference_length.powi(3) / (g * (m1 + m2))).sqrt();
    let scales = Scales {
        mass,
        length: reference_length,
        time,
        gravity: g,
    };
    let mut out = physical.rescaled(
        1.0 / mass,
        1.0 / reference_length,
        1.0 / time,
        0.0,
        Some(scales),
    );
    out.gravity_constant = Gravity::normalized(out.body1.mass, out.body2.mass).constant;
    Ok(out)
}

/// Inverse of [`normalize`].
pub fn denormalize(cfg: &SimConfig) -> Result<SimConfig> {
    let s = cfg.scales.ok_or_else(|| {
        Error::InvalidPhysicalUnits("configuration carries no physical scales".into())
    })?;
    Ok(cfg.rescaled(s.mass, s.length, s.time, s.gravity, None))
}

fn number(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::InvalidConfig(format!("'{key}' must be a number"))),
    }
}

fn numbers(v: &Value, key: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidConfig(format!("'{key}' must be an array of numbers")))?
        .iter()
        .map(|x| number(x, key))
        .collect()
}

fn vec3(v: &Value, key: &str) -> Result<Vec3> {
    match numbers(v, key)?.as_slice() {
        [a, b, c] => Ok(Vec3::new(*a, *b, *c)),
        other => Err(Error::InvalidConfig(format!(
            "'{key}' needs 3 numbers, got {}",
            other.len()
        ))),
    }
}

fn mat3(v: &Value, key: &str) -> Result<Mat3> {
    let xs = numbers(v, key)?;
    if xs.len() != 9 {
        return Err(Error::InvalidConfig(format!(
            "'{key}' needs 9 numbers in row-major order, got {}",
            xs.len()
        )));
    }
    Ok(Mat3::from_row_slice(&xs))
}

struct Section<'a> {
    name: &'a str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'a str, required: bool, keys: &[&str]) -> Result<Self> {
        let table = match root.get(name) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(Error::InvalidConfig(format!("[{name}] must be a table"))),
            None if required => {
                return Err(Error::InvalidConfig(format!("missing section [{name}]")))
            }
            None => None,
        };
        if let Some(t) = table {
            if let Some(unknown) = t.keys().find(|k| !keys.contains(&k.as_str())) {
                return Err(Error::InvalidConfig(format!(
                    "unknown key '{unknown}' in [{name}]"
                )));
            }
        }
        Ok(Section { name, table })
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| number(v, &self.key(key))).transpose()
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::InvalidConfig(format!("missing '{}'", self.key(key))))
    }

    fn vec3(&self, key: &str, default: Vec3) -> Result<Vec3> {
        Ok(self
            .get(key)
            .map(|v| vec3(v, &self.key(key)))
            .transpose()?
            .unwrap_or(default))
    }

    fn mat3(&self, key: &str) -> Result<Mat3> {
        Ok(self
            .get(key)
            .map(|v| mat3(v, &self.key(key)))
            .transpose()?
            .unwrap_or_else(Mat3::identity))
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        self.get(key)
            .map(|v| {
                v.as_str().ok_or_else(|| {
                    Error::InvalidConfig(format!("'{}' must be a string", self.key(key)))
                })
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| match v.as_integer() {
                Some(i) if i >= 0 => Ok(i as u64),
                _ => Err(Error::InvalidConfig(format!(
                    "'{}' must be a non-negative integer",
                    self.key(key)
                ))),
            })
            .transpose()
    }
}

fn body(root: &Table, name: &str) -> Result<BodySpec> {
    let s = Section::new(root, name, true, &["mass", "length", "points", "inertia"])?;
    let mass = s.require("mass")?;
    let shape = match (s.number("length")?, s.get("points")) {
        (Some(length), None) => Shape::Dumbbell { length },
        (None, Some(points)) => {
            let key = s.key("points");
            let rows = points.as_array().ok_or_else(|| {
                Error::InvalidConfig(format!("'{key}' must be an array of [x, y, z, fraction]"))
            })?;
            Shape::Points(
                rows.iter()
                    .map(|row| match numbers(row, &key)?.as_slice() {
                        [x, y, z, f] => Ok(PointMass {
                            offset: Vec3::new(*x, *y, *z),
                            fraction: *f,
                        }),
                        _ => Err(Error::InvalidConfig(format!(
                            "each entry of '{key}' needs [x, y, z, fraction]"
                        ))),
                    })
                    .collect::<Result<_>>()?,
            )
        }
        _ => {
            return Err(Error::InvalidConfig(format!(
                "[{name}] needs exactly one of 'length' or 'points'"
            )))
        }
    };
    let inertia = match s.get("inertia") {
        None => None,
        Some(v) => {
            let key = s.key("inertia");
            let xs = numbers(v, &key)?;
            Some(match xs.len() {
                3 => Mat3::from_diagonal(&Vec3::new(xs[0], xs[1], xs[2])),
                9 => Mat3::from_row_slice(&xs),
                n => {
                    return Err(Error::InvalidConfig(format!(
                        "'{key}' needs 3 or 9 numbers, got {n}"
                    )))
                }
            })
        }
    };
    Ok(BodySpec {
        mass,
        shape,
        inertia,
    })
}

fn from_table(root: &Table) -> Result<SimConfig> {
    if let Some(unknown) = root
        .keys()
        .find(|k| !["run", "body1", "body2", "initial", "physical"].contains(&k.as_str()))
    {
        return Err(Error::InvalidConfig(format!("unknown section [{unknown}]")));
    }
    let run = Section::new(
        root,
        "run",
        false,
        &[
            "integrator",
            "h",
            "t_final",
            "sample_every",
            "tolerance",
            "max_iterations",
            "output",
            "units",
            "min_separation",
            "G",
        ],
    )?;
    let init = Section::new(
        root,
        "initial",
        true,
        &["X", "V", "Omega1", "R", "x2", "v2", "Omega2", "R2"],
    )?;
    let physical_section = Section::new(root, "physical", false, &["G", "length"])?;

    let body1 = body(root, "body1")?;
    let body2 = body(root, "body2")?;
    let zero = Vec3::zeros();
    let initial = InitialConditions {
        x: init.vec3("X", zero)?,
        v: init.vec3("V", zero)?,
        omega1: init.vec3("Omega1", zero)?,
        r: init.mat3("R")?,
        x2: init.vec3("x2", zero)?,
        v2: init.vec3("v2", zero)?,
        omega2: init.vec3("Omega2", zero)?,
        r2: init.mat3("R2")?,
    };
    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        tolerance: run.number("tolerance")?.unwrap_or(defaults.tolerance),
        max_iterations: match run.count("max_iterations")? {
            Some(n) => u32::try_from(n)
                .map_err(|_| Error::InvalidConfig("run.max_iterations is too large".into()))?,
            None => defaults.max_iterations,
        },
    };
    let mut cfg = SimConfig {
        body1,
        body2,
        initial,
        h: run.number("h")?.unwrap_or(DEFAULT_H),
        t_final: run.number("t_final")?.unwrap_or(DEFAULT_T_FINAL),
        integrator: run
            .string("integrator")?
            .map(str::parse)
            .transpose()?
            .unwrap_or(Integrator::LgviRelativeH),
        solver,
        sample_every: run
            .count("sample_every")?
            .map(|n| n as usize)
            .unwrap_or(DEFAULT_SAMPLE_EVERY),
        output: run.string("output")?.map(PathBuf::from),
        gravity_constant: 0.0,
        min_separation: run
            .number("min_separation")?
            .unwrap_or(DEFAULT_MIN_SEPARATION),
        scales: None,
    };
    match run.string("units")?.unwrap_or("normalized") {
        "normalized" => {
            if physical_section.table.is_some() {
                return Err(Error::InvalidConfig(
                    "[physical] is only allowed with units = \"physical\"".into(),
                ));
            }
            cfg.gravity_constant = match run.number("G")? {
                Some(g) => g,
                None => Gravity::normalized(cfg.body1.mass, cfg.body2.mass).constant,
            };
            Ok(cfg)
        }
        "physical" => {
            if run.get("G").is_some() {
                return Err(Error::InvalidConfig(
                    "with physical units, G belongs in [physical]".into(),
                ));
            }
            if physical_section.table.is_none() {
                return Err(Error::InvalidPhysicalUnits(
                    "missing section [physical]".into(),
                ));
            }
            cfg.gravity_constant = physical_section.require("G")?;
            let length = physical_section.require("length")?;
            normalize(&cfg, length)
        }
        other => Err(Error::InvalidConfig(format!(
            "units must be \"normalized\" or \"physical\", got \"{other}\""
        ))),
    }
}
