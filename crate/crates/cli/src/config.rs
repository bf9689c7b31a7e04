//! Run configurations. Every document is TOML; unknown keys are rejected and
//! errors carry the path of the offending field.

use std::path::Path;
use std::sync::Arc;

use complex_germ::dynamics::{HamiltonianSpec, StepControl};
use complex_germ::germ::{GaussianPacket, CURVE_TOL};
use complex_germ::linalg::RMat;
use complex_germ::moyal::coeff::{rat_from_f64, real};
use complex_germ::moyal::{parse_with_dim, PolySymbol};
use complex_germ::oracle::{EvolveOptions, Grid1D, QuantumHamiltonian};
use complex_germ::symplectic::{SiegelMatrix, DEFAULT_EPS_SCHEDULE};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("at `{path}`: {}", e.into_inner().message()))
    })
}

fn positive(path: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{path} must be positive, got {v}")))
    }
}

fn finite(path: &str, v: f64) -> CliResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{path} must be finite, got {v}")))
    }
}

/// One-degree-of-freedom Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    /// p^2 / 2m
    Free { mass: f64 },
    /// p^2 / 2m + m omega^2 q^2 / 2
    Harmonic { mass: f64, omega: f64 },
    /// p^2 / 2m + lambda q^4 / 4
    Quartic { mass: f64, lambda: f64 },
    /// p^2 / 2m + m omega^2 (1 - cos q)
    Pendulum { mass: f64, omega: f64 },
    /// a q^2 / 2 + b q p + c p^2 / 2
    Quadratic { a: f64, b: f64, c: f64 },
    /// Weyl symbol in q1, p1 and h, e.g. "(1/2)*p1^2 + (1/4)*q1^4".
    Polynomial { symbol: String },
}

impl HamiltonianConfig {
    pub fn validate(&self) -> CliResult<()> {
        match self {
            HamiltonianConfig::Free { mass } => positive("hamiltonian.mass", *mass),
            HamiltonianConfig::Harmonic { mass, omega } | HamiltonianConfig::Pendulum { mass, omega } => {
                positive("hamiltonian.mass", *mass)?;
                positive("hamiltonian.omega", *omega)
            }
            HamiltonianConfig::Quartic { mass, lambda } => {
                positive("hamiltonian.mass", *mass)?;
                positive("hamiltonian.lambda", *lambda)
            }
            HamiltonianConfig::Quadratic { a, b, c } => {
                finite("hamiltonian.a", *a)?;
                finite("hamiltonian.b", *b)?;
                finite("hamiltonian.c", *c)
            }
            HamiltonianConfig::Polynomial { .. } => self.symbol().map(|_| ()),
        }
    }

    /// Symbol of the Hamiltonian when it is polynomial.
    pub fn symbol(&self) -> CliResult<Option<PolySymbol>> {
        match self {
            HamiltonianConfig::Polynomial { symbol } => {
                parse_with_dim(symbol, 1).map(Some).map_err(|e| CliError::field("hamiltonian.symbol", e))
            }
            HamiltonianConfig::Quadratic { a, b, c } => {
                let r = |path: &str, x: f64| {
                    rat_from_f64(x, 1 << 40)
                        .map(real)
                        .ok_or_else(|| CliError::Config(format!("{path} is not representable: {x}")))
                };
                let q = PolySymbol::q(1, 1);
                let p = PolySymbol::p(1, 1);
                let half = real(complex_germ::moyal::coeff::rat(1, 2));
                let qq = q.mul_commutative(&q)?.scale(&r("hamiltonian.a", *a)?).scale(&half);
                let qp = q.mul_commutative(&p)?.scale(&r("hamiltonian.b", *b)?);
                let pp = p.mul_commutative(&p)?.scale(&r("hamiltonian.c", *c)?).scale(&half);
                Ok(Some(qq.try_add(&qp)?.try_add(&pp)?))
            }
            _ => Ok(None),
        }
    }

    pub fn classical(&self, hbar: f64) -> CliResult<HamiltonianSpec> {
        let s1 = |x: f64| RMat::from_element(1, 1, x);
        let h = match self {
            HamiltonianConfig::Free { mass } => HamiltonianSpec::free(*mass),
            HamiltonianConfig::Harmonic { mass, omega } => HamiltonianSpec::harmonic(*mass, *omega),
            HamiltonianConfig::Quartic { mass, lambda } => HamiltonianSpec::quartic(*mass, *lambda),
            HamiltonianConfig::Pendulum { mass, omega } => HamiltonianSpec::pendulum(*mass, *omega),
            HamiltonianConfig::Quadratic { a, b, c } => HamiltonianSpec::quadratic(s1(*a), s1(*b), s1(*c)),
            HamiltonianConfig::Polynomial { .. } => HamiltonianSpec::polynomial(&self.symbol()?.unwrap(), hbar),
        };
        h.map_err(|e| CliError::field("hamiltonian", e))
    }

    pub fn quantum(&self, hbar: f64) -> CliResult<QuantumHamiltonian> {
        if let Some(sym) = self.symbol()? {
            return Ok(QuantumHamiltonian::Symbol(sym));
        }
        let h = self.classical(hbar)?;
        let (mass, u) = h.separable().ok_or_else(|| CliError::Internal("Hamiltonian has no separable form".into()))?;
        Ok(QuantumHamiltonian::Separable { mass, potential: Arc::from(u) })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub q0: f64,
    pub p0: f64,
    /// Real and imaginary part of the germ Z; the imaginary part must be positive.
    pub z: [f64; 2],
}

impl PacketConfig {
    pub fn validate(&self) -> CliResult<()> {
        finite("packet.q0", self.q0)?;
        finite("packet.p0", self.p0)?;
        finite("packet.z[0]", self.z[0])?;
        positive("packet.z[1]", self.z[1])
    }

    pub fn packet(&self, hbar: f64) -> CliResult<GaussianPacket> {
        let z = SiegelMatrix::from_scalar(Complex64::new(self.z[0], self.z[1])).map_err(|e| CliError::field("packet.z", e))?;
        GaussianPacket::normalized(z, vec![self.q0], vec![self.p0], hbar).map_err(|e| CliError::field("packet", e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
}

impl TimeConfig {
    pub fn validate(&self) -> CliResult<()> {
        finite("time.t0", self.t0)?;
        finite("time.t1", self.t1)?;
        if self.t1 < self.t0 {
            return Err(CliError::Config(format!("time.t1 = {} precedes time.t0 = {}", self.t1, self.t0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    /// Number of points, a power of two.
    pub points: usize,
}

impl GridConfig {
    pub fn grid(&self) -> CliResult<Grid1D> {
        positive("grid.half_width", self.half_width)?;
        Grid1D::centered(self.half_width, self.points).map_err(|e| CliError::field("grid", e))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub steps: usize,
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let d = EvolveOptions::default();
        Self { steps: d.steps, tol: d.tol, max_doublings: d.max_doublings }
    }
}

impl OracleConfig {
    pub fn options(&self) -> CliResult<EvolveOptions> {
        positive("oracle.tol", self.tol)?;
        if self.steps == 0 {
            return Err(CliError::Config("oracle.steps must be positive".into()));
        }
        Ok(EvolveOptions { steps: self.steps, tol: self.tol, max_doublings: self.max_doublings })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub tol: f64,
    pub h_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = StepControl::default();
        Self { tol: d.tol, h_max: d.h_max }
    }
}

impl IntegratorConfig {
    pub fn control(&self) -> CliResult<StepControl> {
        positive("integrator.tol", self.tol)?;
        positive("integrator.h_max", self.h_max)?;
        Ok(StepControl { tol: self.tol, h_max: self.h_max, ..StepControl::default() })
    }
}

fn validate_hbars(hbar: &[f64]) -> CliResult<()> {
    if hbar.is_empty() {
        return Err(CliError::Config("hbar list is empty".into()));
    }
    for (i, h) in hbar.iter().enumerate() {
        positive(&format!("hbar[{i}]"), *h)?;
    }
    Ok(())
}

/// Packet propagation with an oracle comparison for each hbar.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateConfig {
    pub hamiltonian: HamiltonianConfig,
    pub packet: PacketConfig,
    pub time: TimeConfig,
    pub hbar: Vec<f64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// Write grid snapshots of the packet and the oracle at t1.
    #[serde(default)]
    pub snapshots: bool,
}

impl PropagateConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.hamiltonian.validate()?;
        self.packet.validate()?;
        self.time.validate()?;
        validate_hbars(&self.hbar)?;
        self.grid.grid()?;
        self.oracle.options()?;
        self.integrator.control()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartConfig {
    pub q0: f64,
    pub p0: f64,
}

/// Maslov index of the linearised flow along one trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaslovConfig {
    pub hamiltonian: HamiltonianConfig,
    pub start: StartConfig,
    pub time: TimeConfig,
    /// Real reference Lagrangian plane p = z_real q.
    #[serde(default)]
    pub z_real: f64,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

fn default_eps() -> Vec<f64> {
    DEFAULT_EPS_SCHEDULE.to_vec()
}

impl MaslovConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.hamiltonian.validate()?;
        finite("start.q0", self.start.q0)?;
        finite("start.p0", self.start.p0)?;
        self.time.validate()?;
        finite("z_real", self.z_real)?;
        if self.eps.is_empty() {
            return Err(CliError::Config("eps list is empty".into()));
        }
        for (i, e) in self.eps.iter().enumerate() {
            positive(&format!("eps[{i}]"), *e)?;
        }
        self.integrator.control()?;
        Ok(())
    }
}

/// Graph-type curve q = alpha, p = S'(alpha) with a Gaussian envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    /// Action S as a symbol in q1, e.g. "(3/10)*q1^2".
    pub action: String,
    #[serde(default)]
    pub center: f64,
    pub width: f64,
    #[serde(default = "default_z")]
    pub z: [f64; 2],
    pub alpha: [f64; 2],
    pub samples: usize,
    #[serde(default = "default_curve_tol")]
    pub curve_tol: f64,
}

fn default_z() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_curve_tol() -> f64 {
    CURVE_TOL
}

impl CurveConfig {
    pub fn action_symbol(&self) -> CliResult<PolySymbol> {
        let s = parse_with_dim(&self.action, 1).map_err(|e| CliError::field("curve.action", e))?;
        let p_free = s.terms().all(|(m, c)| m.exps[1] == 0 && m.hbar == 0 && complex_germ::moyal::coeff::to_c64(c).im == 0.0);
        if !p_free {
            return Err(CliError::Config("curve.action must be a real polynomial in q1 only".into()));
        }
        Ok(s)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.action_symbol()?;
        finite("curve.center", self.center)?;
        positive("curve.width", self.width)?;
        finite("curve.z[0]", self.z[0])?;
        positive("curve.z[1]", self.z[1])?;
        if !(self.alpha[1] > self.alpha[0]) {
            return Err(CliError::Config("curve.alpha must be an increasing pair".into()));
        }
        if self.samples < 8 {
            return Err(CliError::Config("curve.samples must be at least 8".into()));
        }
        positive("curve.curve_tol", self.curve_tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub hamiltonian: HamiltonianConfig,
    pub t: f64,
}

/// Canonical-operator check: superposition of packets against the
/// stationary-phase reconstruction, optionally after flowing the curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalConfig {
    pub curve: CurveConfig,
    pub hbar: Vec<f64>,
    pub grid: GridConfig,
    pub flow: Option<FlowConfig>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

impl CanonicalConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.curve.validate()?;
        validate_hbars(&self.hbar)?;
        self.grid.grid()?;
        if let Some(f) = &self.flow {
            f.hamiltonian.validate()?;
            finite("flow.t", f.t)?;
            if f.t < 0.0 {
                return Err(CliError::Config("flow.t must not be negative".into()));
            }
        }
        self.integrator.control()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorChoice {
    Feynman,
    PrincipalValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LegConfig {
    Classical { u0: f64, v0: f64 },
    Propagator { times: Vec<f64> },
}

/// Parameters for evaluating enumerated diagrams.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramEvalConfig {
    pub m: f64,
    pub hbar: f64,
    pub g: f64,
    pub window: [f64; 2],
    pub propagator: PropagatorChoice,
    pub legs: LegConfig,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

fn default_quad_tol() -> f64 {
    1e-10
}

impl DiagramEvalConfig {
    pub fn validate(&self) -> CliResult<()> {
        positive("m", self.m)?;
        positive("hbar", self.hbar)?;
        finite("g", self.g)?;
        if !(self.window[1] > self.window[0]) || !self.window.iter().all(|w| w.is_finite()) {
            return Err(CliError::Config("window must be an increasing finite pair".into()));
        }
        positive("quad_tol", self.quad_tol)
    }
}

/// Tree-level comparison between the quantum series and the classical solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeConfig {
    pub m: f64,
    pub g: f64,
    pub u0: f64,
    pub v0: f64,
    pub times: Vec<f64>,
    pub orders: Vec<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { m: 1.0, g: 1.0, u0: 0.8, v0: 0.3, times: vec![0.5, 1.0, 2.0], orders: vec![1, 2] }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> CliResult<()> {
        positive("m", self.m)?;
        finite("g", self.g)?;
        finite("u0", self.u0)?;
        finite("v0", self.v0)?;
        if self.times.is_empty() || self.orders.is_empty() {
            return Err(CliError::Config("times and orders must be non-empty".into()));
        }
        for (i, t) in self.times.iter().enumerate() {
            finite(&format!("times[{i}]"), *t)?;
        }
        if let Some(o) = self.orders.iter().find(|o| **o > 2) {
            return Err(CliError::Config(format!("order {o} above 2 is not supported")));
        }
        Ok(())
    }
}
