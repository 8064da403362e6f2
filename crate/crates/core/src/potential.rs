//! Potentials, quantum states and run configuration.
//!
//! A potential is `V(r) = m ω² r²/2 + Σ_i v_i r^(2i+2)` in units with ℏ = 1.
//! Parameters given as decimal literals are kept as exact rationals so the
//! rational backend can run on them.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

/// A real parameter, exact when it came from a literal.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Exact(Rational),
    Approx(f64),
}

impl Param {
    pub fn int(value: i64) -> Self {
        Param::Exact(Rational::from(value))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Param::Exact(Rational::from(num) / Rational::from(den))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Param::Exact(r) => r.to_f64().value(),
            Param::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Param::Exact(r) => r.is_zero(),
            Param::Approx(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Param::Exact(r) => !r.is_zero() && !Scalar::is_negative(r),
            Param::Approx(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Param::Exact(r) => Scalar::is_negative(r),
            Param::Approx(x) => *x < 0.0,
        }
    }

    /// Converts into a backend scalar; fails for inexact inputs on the
    /// rational backend.
    pub fn to_scalar<S: Scalar>(&self, ctx: &S::Context) -> Result<S> {
        match self {
            Param::Exact(r) => Ok(S::from_ratio(ctx, r)),
            Param::Approx(x) => S::from_f64(ctx, *x).ok_or_else(|| {
                Error::Backend(format!("inexact parameter {x} requires a float backend"))
            }),
        }
    }

    fn from_json(value: &Value, key: &str) -> Result<Self> {
        match value {
            Value::Number(n) => parse_rational(&n.to_string())
                .map(Param::Exact)
                .ok_or_else(|| Error::Config(format!("`{key}`: cannot read number {n}"))),
            Value::String(s) => parse_rational(s)
                .map(Param::Exact)
                .ok_or_else(|| Error::Config(format!("`{key}`: cannot parse `{s}` as a rational"))),
            Value::Object(map) => match map.get("approx").and_then(Value::as_f64) {
                Some(x) if map.len() == 1 => Ok(Param::Approx(x)),
                _ => Err(Error::Config(format!(
                    "`{key}`: object parameters must be {{\"approx\": <number>}}"
                ))),
            },
            other => Err(Error::Config(format!(
                "`{key}`: expected a number, got {other}"
            ))),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Param::Exact(r) => Value::String(r.to_string()),
            Param::Approx(x) => json!({ "approx": x }),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Exact(r) => write!(f, "{r}"),
            Param::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// `V(r) = m ω² r²/2 + Σ v_i r^(2i+2)`; `anharmonic[0]` is `v_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    mass: Param,
    omega: Param,
    anharmonic: Vec<Param>,
}

impl PotentialSpec {
    pub fn new(mass: Param, omega: Param, anharmonic: Vec<Param>) -> Result<Self> {
        if !mass.is_positive() {
            return Err(Error::InvalidPotential(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if omega.is_negative() {
            return Err(Error::InvalidPotential(format!(
                "frequency must be non-negative, got {omega}"
            )));
        }
        if let Some(last) = anharmonic.last() {
            if !last.is_positive() {
                return Err(Error::InvalidPotential(format!(
                    "leading coefficient v_{} = {last} must be positive for confinement",
                    anharmonic.len()
                )));
            }
        } else if omega.is_zero() {
            return Err(Error::InvalidPotential(
                "zero frequency and no anharmonic terms: the potential has no well".into(),
            ));
        }
        Ok(Self {
            mass,
            omega,
            anharmonic,
        })
    }

    pub fn harmonic(omega: Param) -> Result<Self> {
        Self::new(Param::int(1), omega, Vec::new())
    }

    /// `ω²r²/2 + λr⁴ + μr⁶` with unit mass.
    pub fn sextic(omega: Param, lambda: Param, mu: Param) -> Result<Self> {
        Self::new(Param::int(1), omega, vec![lambda, mu])
    }

    /// `a r² + (b/3) r⁴ + (c/9) r⁶`, the quasi-exactly solvable family.
    /// Needs `2a` to be a perfect square for exact arithmetic downstream.
    pub fn quasi_exact_family(a: &Param, b: &Param, c: &Param) -> Result<Self> {
        let omega = match a {
            Param::Exact(r) => {
                let twice = r.clone() * Rational::from(2);
                match Scalar::sqrt(&twice) {
                    Some(root) => Param::Exact(root),
                    None => Param::Approx((2.0 * a.to_f64()).sqrt()),
                }
            }
            Param::Approx(x) => Param::Approx((2.0 * x).sqrt()),
        };
        let scale = |p: &Param, d: i64| match p {
            Param::Exact(r) => Param::Exact(r.clone() / Rational::from(d)),
            Param::Approx(x) => Param::Approx(x / d as f64),
        };
        Self::new(Param::int(1), omega, vec![scale(b, 3), scale(c, 9)])
    }

    pub fn mass(&self) -> &Param {
        &self.mass
    }

    pub fn omega(&self) -> &Param {
        &self.omega
    }

    pub fn anharmonic(&self) -> &[Param] {
        &self.anharmonic
    }

    /// `v_i` for `i >= 1`; zero beyond the last stored coefficient.
    pub fn coefficient(&self, i: usize) -> Option<&Param> {
        i.checked_sub(1).and_then(|idx| self.anharmonic.get(idx))
    }

    pub fn is_harmonic(&self) -> bool {
        self.anharmonic.iter().all(Param::is_zero)
    }

    /// V(r) in double precision.
    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        let mut value = 0.5 * self.mass.to_f64() * self.omega.to_f64().powi(2) * r2;
        let mut power = r2 * r2;
        for v in &self.anharmonic {
            value += v.to_f64() * power;
            power *= r2;
        }
        value
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mass": self.mass.to_json(),
            "omega": self.omega.to_json(),
            "coefficients": self.anharmonic.iter().map(Param::to_json).collect::<Vec<_>>(),
        })
    }

    fn from_json_map(map: &Map<String, Value>) -> Result<Self> {
        let mass = match map.get("mass") {
            Some(v) => Param::from_json(v, "mass")?,
            None => Param::int(1),
        };
        let omega = match map.get("omega") {
            Some(v) => Param::from_json(v, "omega")?,
            None => Param::int(1),
        };
        let anharmonic = match map.get("coefficients") {
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| Param::from_json(v, &format!("coefficients[{i}]")))
                .collect::<Result<Vec<_>>>()?,
            Some(other) => {
                return Err(Error::Config(format!(
                    "`coefficients` must be an array, got {other}"
                )))
            }
            None => Vec::new(),
        };
        Self::new(mass, omega, anharmonic)
    }
}

/// Radial and orbital quantum numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumState {
    pub n: u32,
    pub l: u32,
}

impl QuantumState {
    pub const GROUND: QuantumState = QuantumState { n: 0, l: 0 };

    pub fn new(n: u32, l: u32) -> Self {
        Self { n, l }
    }

    /// Total zero count inside the contour, `2n + l + 1`.
    pub fn zero_count(&self) -> u64 {
        2 * u64::from(self.n) + u64::from(self.l) + 1
    }

    /// `l(l+1)`.
    pub fn centrifugal(&self) -> u64 {
        u64::from(self.l) * (u64::from(self.l) + 1)
    }

    /// `N(N+1)` with `N = 2n + l + 1`.
    pub fn eta(&self) -> u64 {
        let n = self.zero_count();
        n * (n + 1)
    }

    /// `2n + l + 3/2`, the oscillator level in units of ω.
    pub fn oscillator_level(&self) -> f64 {
        (2 * self.n + self.l) as f64 + 1.5
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, l={}", self.n, self.l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Rational,
    Float,
}

/// Backend selection. Float precision is in significant decimal digits;
/// 15 digits or fewer runs on hardware doubles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarConfig {
    pub backend: Backend,
    pub digits: u32,
}

impl ScalarConfig {
    pub const DEFAULT_DIGITS: u32 = 40;
    pub const MIN_DIGITS: u32 = 15;

    pub fn rational() -> Self {
        Self {
            backend: Backend::Rational,
            digits: Self::DEFAULT_DIGITS,
        }
    }

    pub fn float(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Config(format!(
                "float precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Self {
            backend: Backend::Float,
            digits,
        })
    }

    pub fn uses_hardware_float(&self) -> bool {
        self.backend == Backend::Float && self.digits <= Self::MIN_DIGITS
    }

    /// Rejects inexact parameters on the rational backend.
    pub fn check_potential(&self, potential: &PotentialSpec) -> Result<()> {
        if self.backend == Backend::Rational {
            let all = std::iter::once(potential.mass())
                .chain(std::iter::once(potential.omega()))
                .chain(potential.anharmonic());
            if let Some(p) = all.into_iter().find(|p| matches!(p, Param::Approx(_))) {
                return Err(Error::Backend(format!(
                    "rational backend needs rational parameters, got {p}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ScalarConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Float,
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

/// Contents of a configuration file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub state: QuantumState,
    pub order: Option<usize>,
    pub scalar: ScalarConfig,
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        let mut value = self.potential.to_json();
        let map = value
            .as_object_mut()
            .expect("potential serializes to an object");
        map.insert(
            "state".into(),
            json!({ "n": self.state.n, "l": self.state.l }),
        );
        if let Some(order) = self.order {
            map.insert("order".into(), json!(order));
        }
        let backend = match self.scalar.backend {
            Backend::Rational => "rational",
            Backend::Float => "float",
        };
        map.insert(
            "scalar".into(),
            json!({ "backend": backend, "digits": self.scalar.digits }),
        );
        value
    }
}

fn parse_object(text: &str) -> Result<Map<String, Value>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    match value {
        Value::Object(map) => Ok(map),
        other => Err(Error::Config(format!(
            "expected a JSON object, got {other}"
        ))),
    }
}

/// Reads the potential part of a configuration document.
pub fn parse_potential(text: &str) -> Result<PotentialSpec> {
    PotentialSpec::from_json_map(&parse_object(text)?)
}

/// Reads a full configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let map = parse_object(text)?;
    let potential = PotentialSpec::from_json_map(&map)?;
    let state = match map.get("state") {
        None => QuantumState::GROUND,
        Some(Value::Object(s)) => {
            let read = |key: &str| -> Result<u32> {
                match s.get(key) {
                    None => Ok(0),
                    Some(v) => v
                        .as_u64()
                        .and_then(|x| u32::try_from(x).ok())
                        .ok_or_else(|| {
                            Error::Config(format!("`state.{key}` must be a non-negative integer"))
                        }),
                }
            };
            QuantumState::new(read("n")?, read("l")?)
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "`state` must be an object, got {other}"
            )))
        }
    };
    let order = match map.get("order") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Config("`order` must be a positive integer".into()))?
                as usize,
        ),
    };
    let scalar = match map.get("scalar") {
        None => ScalarConfig::default(),
        Some(Value::Object(s)) => {
            let digits = match s.get("digits") {
                None => ScalarConfig::DEFAULT_DIGITS,
                Some(v) => v
                    .as_u64()
                    .and_then(|d| u32::try_from(d).ok())
                    .ok_or_else(|| Error::Config("`scalar.digits` must be an integer".into()))?,
            };
            match s.get("backend").and_then(Value::as_str) {
                None | Some("float") => ScalarConfig::float(digits)?,
                Some("rational") | Some("exact-rational") => ScalarConfig::rational(),
                Some(other) => {
                    return Err(Error::Config(format!("unknown backend `{other}`")));
                }
            }
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "`scalar` must be an object, got {other}"
            )))
        }
    };
    let config = RunConfig {
        potential,
        state,
        order,
        scalar,
    };
    config.scalar.check_potential(&config.potential)?;
    Ok(config)
}
