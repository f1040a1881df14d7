//! Fidelity-versus-`tau` sweeps comparing adiabatic and transitionless
//! protocols under a common noise model, plus CSV and gnuplot output.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energetics::{equal_resource_omega, gate_costs, lz_costs, omega_r_average, optimal_phi0, ResourceFamily};
use crate::error::{Error, Result};
use crate::models::{
    evolved_composite_state, gate_cd_hamiltonian, gate_hamiltonian, initial_composite_state, lz_cd_hamiltonian,
    rotated_target, GatePreset, GateSpec, LZModel,
};
use crate::openquantum::{
    eigenbasis, evolve, fidelity, postselect_auxiliary, sectored_eigenbasis, unconditioned_target, BasisChoice,
    Channel, ChannelBasis, DensityState, DephasingNorm, IntegratorConfig, NoiseSpec,
};
use crate::qcore::{CMatrix, CVector};

pub const CSV_HEADER: &str =
    "protocol,model,channel,resource_mode,tau,alpha,omega,omega_r,fidelity,sigma_ad,sigma_sa,ratio";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelPreset {
    Lz,
    Gate(GatePreset),
}

impl ModelPreset {
    pub const ALL: [ModelPreset; 5] = [
        ModelPreset::Lz,
        ModelPreset::Gate(GatePreset::Hadamard),
        ModelPreset::Gate(GatePreset::Phase),
        ModelPreset::Gate(GatePreset::Pi8),
        ModelPreset::Gate(GatePreset::Cnot),
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelPreset::Lz => "lz",
            ModelPreset::Gate(g) => g.name(),
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("lz") {
            return Ok(ModelPreset::Lz);
        }
        s.parse::<GatePreset>().map(ModelPreset::Gate)
    }
}

impl TryFrom<String> for ModelPreset {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelPreset> for String {
    fn from(m: ModelPreset) -> String {
        m.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Adiabatic,
    Transitionless,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Adiabatic => "adiabatic",
            Protocol::Transitionless => "transitionless",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adiabatic" | "ad" => Ok(Protocol::Adiabatic),
            "transitionless" | "cd" | "sa" => Ok(Protocol::Transitionless),
            other => Err(Error::InvalidArgument(format!(
                "unknown protocol `{other}` (expected adiabatic, transitionless)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceMode {
    /// `omega` tuned per `tau` so both protocols spend the same energy.
    Equal,
    /// Fixed user `omega`.
    Independent,
}

impl fmt::Display for ResourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceMode::Equal => "equal",
            ResourceMode::Independent => "independent",
        })
    }
}

impl FromStr for ResourceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equal" => Ok(ResourceMode::Equal),
            "independent" => Ok(ResourceMode::Independent),
            other => Err(Error::InvalidArgument(format!(
                "unknown resource mode `{other}` (expected equal, independent)"
            ))),
        }
    }
}

/// How the gate fidelity treats the auxiliary qubit at `s = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    /// Condition on the auxiliary qubit being found in `|1>`.
    Postselect,
    /// Trace the auxiliary qubit out without conditioning.
    Unconditioned,
    /// Compare the full target (x) auxiliary state with the protocol's ideal
    /// composite output, so losses on the auxiliary qubit count against it.
    #[default]
    Composite,
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measurement::Postselect => "postselect",
            Measurement::Unconditioned => "unconditioned",
            Measurement::Composite => "composite",
        })
    }
}

impl FromStr for Measurement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "postselect" => Ok(Measurement::Postselect),
            "unconditioned" => Ok(Measurement::Unconditioned),
            "composite" => Ok(Measurement::Composite),
            other => Err(Error::InvalidArgument(format!(
                "unknown measurement `{other}` (expected composite, postselect, unconditioned)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauRange {
    pub min: f64,
    pub max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

fn default_points() -> usize {
    200
}

impl TauRange {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        TauRange {
            min,
            max,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tau range needs 0 < min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points == 0 || (self.points == 1 && self.min != self.max) {
            return Err(Error::InvalidArgument(format!(
                "tau range [{}, {}] cannot have {} points",
                self.min, self.max, self.points
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k == self.points - 1 {
                    return self.max;
                }
                let x = k as f64 / last;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + x * (self.max / self.min).ln()).exp(),
                    Spacing::Linear => self.min + x * (self.max - self.min),
                }
            })
            .collect())
    }
}

/// Default sweep window per model and resource mode.
pub fn default_tau_range(model: ModelPreset, mode: ResourceMode, omega: f64) -> TauRange {
    match (model, mode) {
        (ModelPreset::Lz, ResourceMode::Equal) => TauRange::new(0.5, 2.0e4, 200),
        (ModelPreset::Lz, ResourceMode::Independent) => TauRange::new(0.05 / omega, 50.0 / omega, 200),
        (ModelPreset::Gate(_), ResourceMode::Equal) => TauRange::new(0.5, 400.0, 200),
        (ModelPreset::Gate(_), ResourceMode::Independent) => TauRange::new(0.05 / omega, 50.0 / omega, 200),
    }
}

pub const DEFAULT_ALPHAS: [f64; 4] = [0.0, 0.005, 0.05, 0.1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelPreset,
    pub channel: Channel,
    pub basis: BasisChoice,
    pub dephasing_norm: DephasingNorm,
    pub alphas: Vec<f64>,
    /// Defaults to [`default_tau_range`] when absent.
    pub tau_range: Option<TauRange>,
    pub resource_mode: ResourceMode,
    /// Adiabatic frequency in independent mode.
    pub omega: f64,
    /// Transitionless `phi0`; defaults to the cost-optimal value.
    pub phi0: Option<f64>,
    /// `phi0` of the adiabatic protocol.
    pub phi0_adiabatic: f64,
    pub theta0: f64,
    pub protocols: Vec<Protocol>,
    pub measurement: Measurement,
    /// Target input state as `[re, im]` pairs; the preset default when absent.
    pub input: Option<Vec<[f64; 2]>>,
    pub integrator: IntegratorConfig,
    pub output: Option<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            model: ModelPreset::Lz,
            channel: Channel::None,
            basis: BasisChoice::default(),
            dephasing_norm: DephasingNorm::default(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            tau_range: None,
            resource_mode: ResourceMode::Equal,
            omega: 1.0,
            phi0: None,
            phi0_adiabatic: PI,
            theta0: PI / 3.0,
            protocols: vec![Protocol::Adiabatic, Protocol::Transitionless],
            measurement: Measurement::default(),
            input: None,
            integrator: IntegratorConfig::default(),
            output: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn tau_range(&self) -> TauRange {
        self.tau_range
            .unwrap_or_else(|| default_tau_range(self.model, self.resource_mode, self.omega))
    }

    pub fn phi0_transitionless(&self) -> f64 {
        self.phi0.unwrap_or_else(optimal_phi0)
    }

    pub fn validate(&self) -> Result<()> {
        self.tau_range().validate()?;
        self.integrator.validate()?;
        if self.alphas.is_empty() {
            return Err(Error::InvalidArgument("no alpha values".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {a}")));
        }
        if self.protocols.is_empty() {
            return Err(Error::InvalidArgument("no protocols selected".into()));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        for phi0 in [self.phi0_transitionless(), self.phi0_adiabatic] {
            if !(phi0 > 0.0 && phi0 <= PI) {
                return Err(Error::InvalidArgument(format!("phi0 must lie in (0, pi], got {phi0}")));
            }
        }
        if self.model == ModelPreset::Lz {
            LZModel::new(1.0, self.theta0)?;
        }
        self.input_state()?;
        Ok(())
    }

    fn input_state(&self) -> Result<Option<CVector>> {
        let ModelPreset::Gate(preset) = self.model else {
            return Ok(None);
        };
        let Some(raw) = &self.input else {
            return Ok(Some(preset.default_input()));
        };
        let v = CVector::new(raw.iter().map(|[re, im]| crate::qcore::C64::new(*re, *im)).collect());
        let dim = preset.spec(PI, 1.0).target_dim();
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        if v.norm() < 1e-12 {
            return Err(Error::InvalidArgument("input state is zero".into()));
        }
        Ok(Some(v.normalized()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub protocol: Protocol,
    pub model: ModelPreset,
    pub channel: Channel,
    pub resource_mode: ResourceMode,
    pub tau: f64,
    pub alpha: f64,
    pub omega: f64,
    pub omega_r: f64,
    pub fidelity: f64,
    pub sigma_ad: f64,
    pub sigma_sa: f64,
    pub ratio: f64,
}

impl ScenarioRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.model,
            self.channel,
            self.resource_mode,
            self.tau,
            self.alpha,
            self.omega,
            self.omega_r,
            self.fidelity,
            self.sigma_ad,
            self.sigma_sa,
            self.ratio
        )
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioResult {
    /// `(tau, fidelity)` pairs of one curve, ascending in `tau`.
    pub fn curve(&self, protocol: Protocol, alpha: f64) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.protocol == protocol && r.alpha == alpha)
            .map(|r| (r.tau, r.fidelity))
            .collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.rows.iter().map(|r| r.alpha).collect();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    }

    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::InvalidArgument("empty scenario result".into()));
        }
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        Ok(out)
    }

    /// gnuplot script with the data inlined; solid lines for adiabatic
    /// curves and dashed ones for transitionless curves.
    pub fn to_plot_script(&self, title: &str) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::InvalidArgument("empty scenario result".into()));
        }
        let mut s = String::new();
        let _ = writeln!(s, "set title \"{title}\"");
        let _ = writeln!(s, "set xlabel \"tau\"");
        let _ = writeln!(s, "set ylabel \"F(tau)\"");
        let _ = writeln!(s, "set logscale x");
        let _ = writeln!(s, "set key outside right");
        let _ = writeln!(s, "set yrange [*:1.005]");
        let mut plots = Vec::new();
        let protocols = [Protocol::Adiabatic, Protocol::Transitionless];
        for (pi, protocol) in protocols.iter().enumerate() {
            for (ai, alpha) in self.alphas().iter().enumerate() {
                let curve = self.curve(*protocol, *alpha);
                if curve.is_empty() {
                    continue;
                }
                let block = format!("$d{pi}_{ai}");
                let _ = writeln!(s, "{block} << EOD");
                for (tau, f) in curve {
                    let _ = writeln!(s, "{tau} {f}");
                }
                let _ = writeln!(s, "EOD");
                let dash = if *protocol == Protocol::Adiabatic { 1 } else { 2 };
                plots.push(format!(
                    "{block} using 1:2 with lines dt {dash} lc {} title \"{protocol} alpha={alpha}\"",
                    ai + 1
                ));
            }
        }
        let _ = writeln!(s, "plot \\\n    {}", plots.join(", \\\n    "));
        Ok(s)
    }
}

pub fn emit_csv(result: &ScenarioResult, path: impl AsRef<Path>) -> Result<()> {
    let text = result.to_csv()?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn emit_plot_script(result: &ScenarioResult, path: impl AsRef<Path>) -> Result<()> {
    let cfg = &result.config;
    let title = format!("{} / {} / {} resources", cfg.model, cfg.channel, cfg.resource_mode);
    std::fs::write(path, result.to_plot_script(&title)?)?;
    Ok(())
}

/// Everything that is shared by the points of a sweep.
struct Plan {
    cfg: ScenarioConfig,
    omega_r: f64,
    input: Option<CVector>,
    phi0_cd: f64,
}

impl Plan {
    fn new(cfg: &ScenarioConfig, taus: &[f64]) -> Result<Self> {
        let phi0_cd = cfg.phi0_transitionless();
        let omega_r = match cfg.resource_mode {
            ResourceMode::Equal => omega_r_average(taus, &self_family(cfg, phi0_cd)?)?,
            ResourceMode::Independent => cfg.omega,
        };
        Ok(Plan {
            cfg: cfg.clone(),
            omega_r,
            input: cfg.input_state()?,
            phi0_cd,
        })
    }

    fn omega(&self, tau: f64) -> Result<f64> {
        match self.cfg.resource_mode {
            ResourceMode::Equal => equal_resource_omega(&self_family(&self.cfg, self.phi0_cd)?, tau),
            ResourceMode::Independent => Ok(self.cfg.omega),
        }
    }

    fn noise(&self, alpha: f64) -> NoiseSpec {
        let mut spec = NoiseSpec::new(self.cfg.channel, alpha, self.omega_r);
        spec.basis = self.cfg.basis;
        spec.dephasing_norm = self.cfg.dephasing_norm;
        spec
    }

    fn point(&self, protocol: Protocol, tau: f64, alpha: f64) -> Result<ScenarioRow> {
        let omega = self.omega(tau)?;
        let (fid, sigma_ad, sigma_sa, ratio) = match self.cfg.model {
            ModelPreset::Lz => self.lz_point(protocol, tau, alpha, omega)?,
            ModelPreset::Gate(preset) => self.gate_point(preset, protocol, tau, alpha, omega)?,
        };
        Ok(ScenarioRow {
            protocol,
            model: self.cfg.model,
            channel: self.cfg.channel,
            resource_mode: self.cfg.resource_mode,
            tau,
            alpha,
            omega,
            omega_r: self.omega_r,
            fidelity: fid,
            sigma_ad,
            sigma_sa,
            ratio,
        })
    }

    fn lz_point(&self, protocol: Protocol, tau: f64, alpha: f64, omega: f64) -> Result<(f64, f64, f64, f64)> {
        let m = LZModel::new(omega, self.cfg.theta0)?;
        let costs = lz_costs(&m, tau)?;
        let spec = self.noise(alpha);
        let rho0 = DensityState::pure(&m.ground_state(0.0))?;
        let frames = m.clone();
        let h0_basis = ChannelBasis::moving(move |s| {
            let f = frames.frame(s);
            CMatrix::from_columns(&f.states).expect("two columns")
        });
        let ev = match protocol {
            Protocol::Adiabatic => {
                let hm = m.clone();
                evolve(
                    &move |s| hm.hamiltonian(s),
                    &rho0,
                    &spec,
                    &h0_basis,
                    tau,
                    &self.cfg.integrator,
                )?
            }
            Protocol::Transitionless => {
                let h = lz_cd_hamiltonian(&m, tau)?;
                let basis = match self.cfg.basis {
                    BasisChoice::DrivingHamiltonian => ChannelBasis::Fixed(eigenbasis(&h)?),
                    BasisChoice::AdiabaticH0 => h0_basis,
                };
                evolve(&move |_| h.clone(), &rho0, &spec, &basis, tau, &self.cfg.integrator)?
            }
        };
        let f = fidelity(ev.state.rho(), &m.ground_state(1.0));
        Ok((f, costs.sigma_ad, costs.sigma_sa_avg, costs.ratio))
    }

    fn gate_point(
        &self,
        preset: GatePreset,
        protocol: Protocol,
        tau: f64,
        alpha: f64,
        omega: f64,
    ) -> Result<(f64, f64, f64, f64)> {
        let input = self.input.clone().expect("gate scenarios carry an input state");
        let cd_spec = preset_with(preset, self.phi0_cd, omega);
        let (_, costs) = gate_costs(&cd_spec, tau)?;
        let spec = self.noise(alpha);
        let g = match protocol {
            Protocol::Adiabatic => preset_with(preset, self.cfg.phi0_adiabatic, omega),
            Protocol::Transitionless => cd_spec,
        };
        let rho0 = DensityState::pure(&initial_composite_state(&g, &input)?)?;
        let gb = g;
        let h0_basis = ChannelBasis::moving(move |s| gb.composite_eigenbasis(s));
        let ev = match protocol {
            Protocol::Adiabatic => {
                let track = gate_hamiltonian(&g)?;
                evolve(
                    &move |s| track.at(s),
                    &rho0,
                    &spec,
                    &h0_basis,
                    tau,
                    &self.cfg.integrator,
                )?
            }
            Protocol::Transitionless => {
                let h = gate_cd_hamiltonian(&g, tau)?;
                let basis = match self.cfg.basis {
                    BasisChoice::DrivingHamiltonian => {
                        let (projectors, blocks): (Vec<CMatrix>, Vec<CMatrix>) =
                            g.sectors().into_iter().map(|(p, xi)| (p, g.sector_cd(xi, tau))).unzip();
                        ChannelBasis::Fixed(sectored_eigenbasis(&projectors, &blocks)?)
                    }
                    BasisChoice::AdiabaticH0 => h0_basis,
                };
                evolve(&move |_| h.clone(), &rho0, &spec, &basis, tau, &self.cfg.integrator)?
            }
        };
        let f = match self.cfg.measurement {
            Measurement::Postselect => fidelity(
                &postselect_auxiliary(ev.state.rho(), 1)?.0,
                &rotated_target(&g, &input)?,
            ),
            Measurement::Unconditioned => {
                fidelity(&unconditioned_target(ev.state.rho())?, &rotated_target(&g, &input)?)
            }
            Measurement::Composite => fidelity(ev.state.rho(), &evolved_composite_state(&g, 1.0, &input)?),
        };
        Ok((f, costs.sigma_ad, costs.sigma_sa_avg, costs.ratio))
    }
}

fn preset_with(preset: GatePreset, phi0: f64, omega: f64) -> GateSpec {
    preset.spec(phi0, omega)
}

fn self_family(cfg: &ScenarioConfig, phi0_cd: f64) -> Result<ResourceFamily> {
    Ok(match cfg.model {
        ModelPreset::Lz => ResourceFamily::Lz(LZModel::new(1.0, cfg.theta0)?),
        ModelPreset::Gate(_) => ResourceFamily::Gate { phi0: phi0_cd },
    })
}

/// Total order used for output rows: protocol, then alpha, then tau.
fn row_order(a: &ScenarioRow, b: &ScenarioRow) -> Ordering {
    a.protocol
        .cmp(&b.protocol)
        .then(a.alpha.total_cmp(&b.alpha))
        .then(a.tau.total_cmp(&b.tau))
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let taus = cfg.tau_range().grid()?;
    let plan = Plan::new(cfg, &taus)?;
    let mut protocols = cfg.protocols.clone();
    protocols.sort();
    protocols.dedup();
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let mut jobs: Vec<(Protocol, f64, f64)> = Vec::with_capacity(protocols.len() * alphas.len() * taus.len());
    for &p in &protocols {
        for &a in &alphas {
            jobs.extend(taus.iter().map(|&t| (p, a, t)));
        }
    }
    let mut rows = jobs
        .par_iter()
        .map(|&(p, a, t)| {
            plan.point(p, t, a).map_err(|e| Error::Scenario {
                protocol: p.to_string(),
                tau: t,
                alpha: a,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(row_order);
    Ok(ScenarioResult {
        config: cfg.clone(),
        rows,
    })
}

/// Where the transitionless curve stops beating the adiabatic one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// Last `tau` of the initial run where transitionless fidelity is higher.
    pub last_advantage_tau: f64,
    /// First `tau` at which the adiabatic fidelity catches up.
    pub crossing_tau: f64,
    /// Largest advantage `F_SA - F_Ad` seen before the crossing.
    pub max_advantage: f64,
}

/// Finds an initial interval with `F_SA > F_Ad` followed by a point where
/// `F_Ad >= F_SA`. Both curves must share their `tau` grid.
pub fn find_crossing(adiabatic: &[(f64, f64)], transitionless: &[(f64, f64)]) -> Option<Crossing> {
    if adiabatic.len() != transitionless.len() || adiabatic.is_empty() {
        return None;
    }
    let diff: Vec<f64> = adiabatic
        .iter()
        .zip(transitionless)
        .map(|((_, fa), (_, fs))| fs - fa)
        .collect();
    if diff[0] <= 0.0 {
        return None;
    }
    let k = diff.iter().position(|d| *d <= 0.0)?;
    Some(Crossing {
        last_advantage_tau: adiabatic[k - 1].0,
        crossing_tau: adiabatic[k].0,
        max_advantage: diff[..k].iter().cloned().fold(f64::MIN, f64::max),
    })
}

/// True when the fidelities never drop by more than `slack` from one `tau`
/// to the next.
pub fn is_non_decreasing(curve: &[(f64, f64)], slack: f64) -> bool {
    curve.windows(2).all(|w| w[1].1 >= w[0].1 - slack)
}

/// Closed-form state the ideal gate protocol reaches at `s = 1`.
pub fn ideal_gate_output(preset: GatePreset, phi0: f64, input: &CVector) -> Result<CVector> {
    evolved_composite_state(&preset.spec(phi0, 1.0), 1.0, input)
}
