//! Scenario configuration for the batch driver: a flat key = value text
//! format with dotted section keys.
//!
//! Recognized keys (all optional, with defaults):
//!
//! ```text
//! grid.n = 8                   # points per axis, power of two >= 8
//! grid.l = 12.0                # box side length
//! params.hbar = 1.0
//! params.c = 1.0
//! params.epsilon = 0.3
//! potential.family = uniformB  # none|constantA0|linearA0|uniformB|gaussian
//! potential.a0 = 0.5           # constantA0
//! potential.e = 0.1,0.0,0.0    # linearA0 field vector
//! potential.center = 6,6,6     # linearA0 / uniformB center
//! potential.b = 0.5            # uniformB strength
//! potential.bumps = 0,0.5,5,5,5,1.2; 1,-0.4,4,6,5,0.9   # gaussian: j,amp,cx,cy,cz,w
//! initial_state.center = 6,6,6
//! initial_state.width = 1.5
//! initial_state.momentum = 0,0,0.8
//! initial_state.w0 = 1,0       # complex spinor weights, re,im
//! initial_state.w1 = 0.4,0
//! time.s = 0.0
//! time.t = 0.4
//! time.dt_coeff = 0.001        # reference / oracle step size
//! time.slices = 4
//! seed = 42
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use num_complex::Complex64;
use weylprop_core::potential::EMPotential;
use weylprop_core::superflow::HamiltonianParams;

use crate::grid::{Grid3D, SuperWaveFunction};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {detail}")]
    BadValue {
        line: usize,
        key: String,
        detail: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialFamily {
    None,
    ConstantA0,
    LinearA0,
    UniformB,
    Gaussian,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub n: usize,
    pub l: f64,
    pub hbar: f64,
    pub c: f64,
    pub epsilon: f64,
    pub family: PotentialFamily,
    pub a0: f64,
    pub e_field: [f64; 3],
    pub pot_center: [f64; 3],
    pub b_field: f64,
    pub bumps: Vec<(usize, f64, [f64; 3], f64)>,
    pub center: [f64; 3],
    pub width: f64,
    pub momentum: [f64; 3],
    pub w0: Complex64,
    pub w1: Complex64,
    pub s: f64,
    pub t: f64,
    pub dt_coeff: f64,
    pub slices: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 8,
            l: 12.0,
            hbar: 1.0,
            c: 1.0,
            epsilon: 0.3,
            family: PotentialFamily::UniformB,
            a0: 0.5,
            e_field: [0.1, 0.0, 0.0],
            pot_center: [6.0, 6.0, 6.0],
            b_field: 0.5,
            bumps: Vec::new(),
            center: [6.0, 6.0, 6.0],
            width: 1.5,
            momentum: [0.0, 0.0, 0.8],
            w0: Complex64::new(1.0, 0.0),
            w1: Complex64::new(0.4, 0.0),
            s: 0.0,
            t: 0.4,
            dt_coeff: 1e-3,
            slices: 4,
            seed: 42,
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim().parse().map_err(|e| ConfigError::BadValue {
        line,
        key: key.to_string(),
        detail: format!("{e}"),
    })
}

fn parse_triple(line: usize, key: &str, v: &str) -> Result<[f64; 3], ConfigError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 3 {
        return Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            detail: format!("expected three comma-separated numbers, got `{v}`"),
        });
    }
    Ok([
        parse_f64(line, key, parts[0])?,
        parse_f64(line, key, parts[1])?,
        parse_f64(line, key, parts[2])?,
    ])
}

fn parse_complex(line: usize, key: &str, v: &str) -> Result<Complex64, ConfigError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            detail: format!("expected `re,im`, got `{v}`"),
        });
    }
    Ok(Complex64::new(
        parse_f64(line, key, parts[0])?,
        parse_f64(line, key, parts[1])?,
    ))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or(ConfigError::Malformed {
                line,
                text: stripped.to_string(),
            })?;
            let key = key.trim();
            let v = value.trim();
            match key {
                "grid.n" => {
                    cfg.n = v.parse().map_err(|e| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        detail: format!("{e}"),
                    })?
                }
                "grid.l" => cfg.l = parse_f64(line, key, v)?,
                "params.hbar" => cfg.hbar = parse_f64(line, key, v)?,
                "params.c" => cfg.c = parse_f64(line, key, v)?,
                "params.epsilon" => cfg.epsilon = parse_f64(line, key, v)?,
                "potential.family" => {
                    cfg.family = match v {
                        "none" => PotentialFamily::None,
                        "constantA0" => PotentialFamily::ConstantA0,
                        "linearA0" => PotentialFamily::LinearA0,
                        "uniformB" => PotentialFamily::UniformB,
                        "gaussian" => PotentialFamily::Gaussian,
                        other => {
                            return Err(ConfigError::BadValue {
                                line,
                                key: key.to_string(),
                                detail: format!(
                                    "unknown family `{other}` (expected none|constantA0|linearA0|uniformB|gaussian)"
                                ),
                            })
                        }
                    }
                }
                "potential.a0" => cfg.a0 = parse_f64(line, key, v)?,
                "potential.e" => cfg.e_field = parse_triple(line, key, v)?,
                "potential.center" => cfg.pot_center = parse_triple(line, key, v)?,
                "potential.b" => cfg.b_field = parse_f64(line, key, v)?,
                "potential.bumps" => {
                    cfg.bumps.clear();
                    for bump in v.split(';') {
                        let parts: Vec<&str> = bump.split(',').map(str::trim).collect();
                        if parts.len() != 6 {
                            return Err(ConfigError::BadValue {
                                line,
                                key: key.to_string(),
                                detail: format!("expected `j,amp,cx,cy,cz,w`, got `{bump}`"),
                            });
                        }
                        let j: usize = parts[0].parse().map_err(|e| ConfigError::BadValue {
                            line,
                            key: key.to_string(),
                            detail: format!("{e}"),
                        })?;
                        cfg.bumps.push((
                            j,
                            parse_f64(line, key, parts[1])?,
                            [
                                parse_f64(line, key, parts[2])?,
                                parse_f64(line, key, parts[3])?,
                                parse_f64(line, key, parts[4])?,
                            ],
                            parse_f64(line, key, parts[5])?,
                        ));
                    }
                }
                "initial_state.center" => cfg.center = parse_triple(line, key, v)?,
                "initial_state.width" => cfg.width = parse_f64(line, key, v)?,
                "initial_state.momentum" => cfg.momentum = parse_triple(line, key, v)?,
                "initial_state.w0" => cfg.w0 = parse_complex(line, key, v)?,
                "initial_state.w1" => cfg.w1 = parse_complex(line, key, v)?,
                "time.s" => cfg.s = parse_f64(line, key, v)?,
                "time.t" => cfg.t = parse_f64(line, key, v)?,
                "time.dt_coeff" => cfg.dt_coeff = parse_f64(line, key, v)?,
                "time.slices" => {
                    cfg.slices = v.parse().map_err(|e| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        detail: format!("{e}"),
                    })?
                }
                "seed" => {
                    cfg.seed = v.parse().map_err(|e| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        detail: format!("{e}"),
                    })?
                }
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(ConfigError::Invalid(format!(
                "grid.n must be a power of two >= 8, got {}",
                self.n
            )));
        }
        if self.l <= 0.0 {
            return Err(ConfigError::Invalid("grid.l must be positive".into()));
        }
        if self.dt_coeff <= 0.0 {
            return Err(ConfigError::Invalid("time.dt_coeff must be positive".into()));
        }
        if self.slices < 1 {
            return Err(ConfigError::Invalid("time.slices must be >= 1".into()));
        }
        if self.hbar <= 0.0 || self.c <= 0.0 {
            return Err(ConfigError::Invalid("params.hbar and params.c must be positive".into()));
        }
        if self.t < self.s {
            return Err(ConfigError::Invalid("time.t must be >= time.s".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid3D {
        Grid3D::new(self.n, self.l)
    }

    pub fn params(&self) -> HamiltonianParams {
        HamiltonianParams::new(self.hbar, self.c, self.epsilon)
    }

    pub fn potential(&self) -> EMPotential {
        match self.family {
            PotentialFamily::None => EMPotential::none(),
            PotentialFamily::ConstantA0 => EMPotential::constant_a0(self.a0),
            PotentialFamily::LinearA0 => EMPotential::linear_a0(self.e_field, self.pot_center),
            PotentialFamily::UniformB => EMPotential::uniform_b(self.b_field, self.pot_center),
            PotentialFamily::Gaussian => EMPotential::gaussian_bumps(&self.bumps),
        }
    }

    /// Gaussian packet e^{−d²/2σ²}·e^{i⟨x|p⟩/ħ} with minimal-image
    /// displacement from the packet center, weighted by the spinor pair.
    pub fn initial_state(&self) -> SuperWaveFunction {
        let grid = self.grid();
        let mut u = SuperWaveFunction::zero(grid);
        for idx in 0..grid.len() {
            let x = grid.point(idx);
            let mut r2 = 0.0;
            for k in 0..3 {
                let mut d = x[k] - self.center[k];
                d -= (d / grid.l).round() * grid.l;
                r2 += d * d;
            }
            let env = (-r2 / (2.0 * self.width * self.width)).exp();
            let phase = (Complex64::new(0.0, 1.0)
                * (x[0] * self.momentum[0] + x[1] * self.momentum[1] + x[2] * self.momentum[2])
                / self.hbar)
                .exp();
            u.u0[idx] = self.w0 * env * phase;
            u.u1[idx] = self.w1 * env * phase;
        }
        u
    }

    /// Echo of the effective configuration as key = value lines (manifest).
    pub fn echo(&self) -> String {
        let t3 = |v: [f64; 3]| format!("{},{},{}", v[0], v[1], v[2]);
        let family = match self.family {
            PotentialFamily::None => "none",
            PotentialFamily::ConstantA0 => "constantA0",
            PotentialFamily::LinearA0 => "linearA0",
            PotentialFamily::UniformB => "uniformB",
            PotentialFamily::Gaussian => "gaussian",
        };
        let mut out = String::new();
        out.push_str(&format!("grid.n = {}\n", self.n));
        out.push_str(&format!("grid.l = {}\n", self.l));
        out.push_str(&format!("params.hbar = {}\n", self.hbar));
        out.push_str(&format!("params.c = {}\n", self.c));
        out.push_str(&format!("params.epsilon = {}\n", self.epsilon));
        out.push_str(&format!("potential.family = {}\n", family));
        match self.family {
            PotentialFamily::ConstantA0 => out.push_str(&format!("potential.a0 = {}\n", self.a0)),
            PotentialFamily::LinearA0 => {
                out.push_str(&format!("potential.e = {}\n", t3(self.e_field)));
                out.push_str(&format!("potential.center = {}\n", t3(self.pot_center)));
            }
            PotentialFamily::UniformB => {
                out.push_str(&format!("potential.b = {}\n", self.b_field));
                out.push_str(&format!("potential.center = {}\n", t3(self.pot_center)));
            }
            PotentialFamily::Gaussian => {
                let bumps: Vec<String> = self
                    .bumps
                    .iter()
                    .map(|(j, a, c, w)| format!("{},{},{},{},{},{}", j, a, c[0], c[1], c[2], w))
                    .collect();
                out.push_str(&format!("potential.bumps = {}\n", bumps.join("; ")));
            }
            PotentialFamily::None => {}
        }
        out.push_str(&format!("initial_state.center = {}\n", t3(self.center)));
        out.push_str(&format!("initial_state.width = {}\n", self.width));
        out.push_str(&format!("initial_state.momentum = {}\n", t3(self.momentum)));
        out.push_str(&format!("initial_state.w0 = {},{}\n", self.w0.re, self.w0.im));
        out.push_str(&format!("initial_state.w1 = {},{}\n", self.w1.re, self.w1.im));
        out.push_str(&format!("time.s = {}\n", self.s));
        out.push_str(&format!("time.t = {}\n", self.t));
        out.push_str(&format!("time.dt_coeff = {}\n", self.dt_coeff));
        out.push_str(&format!("time.slices = {}\n", self.slices));
        out.push_str(&format!("seed = {}\n", self.seed));
        out
    }
}
