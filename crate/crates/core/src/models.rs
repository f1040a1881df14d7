//! Built-in Hamiltonian families with closed-form eigenstructure: the
//! Landau-Zener sweep and adiabatic controlled-gate Hamiltonians, together
//! with their counter-diabatic partners.
//!
//! Composite states are ordered `target (x) auxiliary`; for controlled gates
//! the target register is itself `control (x) target`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{pauli, tensor, CMatrix, CVector, C64, ONE};
use crate::spectral::{EigenFrame, HamiltonianTrack};

type AngleFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Mixing-angle schedule `s -> (theta(s), d theta / ds)` of the Landau-Zener sweep.
#[derive(Clone)]
pub enum Interpolation {
    /// `theta0 * s`
    Linear,
    /// `theta0 * s^2`
    Quadratic,
    /// Arbitrary schedule returning the angle and its derivative.
    Custom(AngleFn),
}

impl fmt::Debug for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interpolation::Linear => write!(f, "Linear"),
            Interpolation::Quadratic => write!(f, "Quadratic"),
            Interpolation::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `H(s) = -omega [sigma_z + tan(theta(s)) sigma_x]`
#[derive(Clone, Debug)]
pub struct LZModel {
    pub omega: f64,
    pub theta0: f64,
    pub interpolation: Interpolation,
}

const SCHEDULE_SAMPLES: usize = 1001;

impl LZModel {
    pub fn new(omega: f64, theta0: f64) -> Result<Self> {
        Self::with_interpolation(omega, theta0, Interpolation::Linear)
    }

    pub fn with_interpolation(omega: f64, theta0: f64, interpolation: Interpolation) -> Result<Self> {
        let m = Self {
            omega,
            theta0,
            interpolation,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.theta(0.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument("theta(0) must vanish".into()));
        }
        for j in 0..SCHEDULE_SAMPLES {
            let s = j as f64 / (SCHEDULE_SAMPLES - 1) as f64;
            let th = self.theta(s);
            if !th.is_finite() || th.abs() >= FRAC_PI_2 {
                return Err(Error::InvalidArgument(format!(
                    "|theta(s)| must stay below pi/2 (sec diverges); theta({s}) = {th}"
                )));
            }
        }
        Ok(())
    }

    pub fn theta(&self, s: f64) -> f64 {
        self.angle(s).0
    }

    pub fn dtheta(&self, s: f64) -> f64 {
        self.angle(s).1
    }

    fn angle(&self, s: f64) -> (f64, f64) {
        match &self.interpolation {
            Interpolation::Linear => (self.theta0 * s, self.theta0),
            Interpolation::Quadratic => (self.theta0 * s * s, 2.0 * self.theta0 * s),
            Interpolation::Custom(f) => f(s),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.interpolation, Interpolation::Linear)
    }

    pub fn hamiltonian(&self, s: f64) -> CMatrix {
        lz_hamiltonian(self.omega, self.theta(s))
    }

    /// `|E_-(s)> = cos(theta/2)|0> + sin(theta/2)|1>`
    pub fn ground_state(&self, s: f64) -> CVector {
        let h = self.theta(s) / 2.0;
        CVector::from_real(&[h.cos(), h.sin()])
    }

    /// `|E_+(s)> = -sin(theta/2)|0> + cos(theta/2)|1>`
    pub fn excited_state(&self, s: f64) -> CVector {
        let h = self.theta(s) / 2.0;
        CVector::from_real(&[-h.sin(), h.cos()])
    }

    pub fn frame(&self, s: f64) -> EigenFrame {
        let (th, dth) = self.angle(s);
        let sec = 1.0 / th.cos();
        let half = th / 2.0;
        let ground = CVector::from_real(&[half.cos(), half.sin()]);
        let excited = CVector::from_real(&[-half.sin(), half.cos()]);
        let rate = C64::new(dth / 2.0, 0.0);
        EigenFrame {
            energies: vec![-self.omega * sec, self.omega * sec],
            derivs: vec![excited.scale(rate), ground.scale(-rate)],
            states: vec![ground, excited],
        }
    }
}

fn lz_hamiltonian(omega: f64, theta: f64) -> CMatrix {
    (&pauli::z() + &pauli::x().scale_real(theta.tan())).scale_real(-omega)
}

/// Landau-Zener track with closed-form eigenstates attached (levels
/// ordered ground, excited).
pub fn lz_track(m: &LZModel) -> HamiltonianTrack {
    let gen = m.clone();
    let frames = m.clone();
    HamiltonianTrack::new(2, "lz", move |s| gen.hamiltonian(s)).with_analytic(move |s| frames.frame(s))
}

/// Counter-diabatic term `(d_s theta / 2 tau) sigma_y` as a function of `s`.
pub fn lz_cd_track(m: &LZModel, tau: f64) -> HamiltonianTrack {
    let m = m.clone();
    HamiltonianTrack::new(2, "lz-cd", move |s| pauli::y().scale_real(m.dtheta(s) / (2.0 * tau)))
}

/// Constant counter-diabatic Hamiltonian `(theta0 / 2 tau) sigma_y` of the linear sweep.
pub fn lz_cd_hamiltonian(m: &LZModel, tau: f64) -> Result<CMatrix> {
    if !m.is_linear() {
        return Err(Error::InvalidArgument(
            "the counter-diabatic term is constant only for the linear schedule; use lz_cd_track".into(),
        ));
    }
    Ok(pauli::y().scale_real(m.theta0 / (2.0 * tau)))
}

/// Gate encoded as a rotation by `phi` about the Bloch direction of `|n_+>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub phi: f64,
    pub phi0: f64,
    pub omega: f64,
    pub controlled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatePreset {
    Hadamard,
    Phase,
    Pi8,
    Cnot,
}

impl GatePreset {
    pub const ALL: [GatePreset; 4] = [
        GatePreset::Hadamard,
        GatePreset::Phase,
        GatePreset::Pi8,
        GatePreset::Cnot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GatePreset::Hadamard => "hadamard",
            GatePreset::Phase => "phase",
            GatePreset::Pi8 => "pi8",
            GatePreset::Cnot => "cnot",
        }
    }

    pub fn spec(self, phi0: f64, omega: f64) -> GateSpec {
        let (epsilon, delta, phi, controlled) = match self {
            GatePreset::Hadamard => (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, false),
            GatePreset::Phase => (0.0, 0.0, PI, false),
            GatePreset::Pi8 => (0.0, 0.0, FRAC_PI_4, false),
            GatePreset::Cnot => (FRAC_PI_2, 0.0, PI, true),
        };
        GateSpec {
            epsilon,
            delta,
            phi,
            phi0,
            omega,
            controlled,
        }
    }

    /// `|0>` for Hadamard, `|+>` for phase and pi/8, `|+>|0>` for CNOT.
    pub fn default_input(self) -> CVector {
        let plus = CVector::from_real(&[1.0 / SQRT_2, 1.0 / SQRT_2]);
        match self {
            GatePreset::Hadamard => CVector::basis(2, 0),
            GatePreset::Phase | GatePreset::Pi8 => plus,
            GatePreset::Cnot => plus.tensor(&CVector::basis(2, 0)),
        }
    }
}

impl fmt::Display for GatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GatePreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hadamard" => Ok(GatePreset::Hadamard),
            "phase" => Ok(GatePreset::Phase),
            "pi8" => Ok(GatePreset::Pi8),
            "cnot" => Ok(GatePreset::Cnot),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

/// A controlled evolution `sum_k P_k (x) H_k(s)` with orthogonal projectors
/// `P_k` on the target register and auxiliary Hamiltonians `H_k(s)`.
#[derive(Clone, Debug)]
pub struct ControlledEvolution {
    projectors: Vec<CMatrix>,
    sectors: Vec<HamiltonianTrack>,
}

impl ControlledEvolution {
    pub fn new(projectors: Vec<CMatrix>, sectors: Vec<HamiltonianTrack>) -> Result<Self> {
        if projectors.is_empty() || projectors.len() != sectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} projectors for {} sector Hamiltonians",
                projectors.len(),
                sectors.len()
            )));
        }
        let target_dim = projectors[0].dim();
        let aux_dim = sectors[0].dim();
        let mut total = CMatrix::zeros(target_dim);
        for (k, p) in projectors.iter().enumerate() {
            if p.dim() != target_dim {
                return Err(Error::DimensionMismatch {
                    expected: target_dim,
                    found: p.dim(),
                });
            }
            if sectors[k].dim() != aux_dim {
                return Err(Error::DimensionMismatch {
                    expected: aux_dim,
                    found: sectors[k].dim(),
                });
            }
            for (l, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let want = if k == l { p.clone() } else { CMatrix::zeros(target_dim) };
                if prod.distance(&want) > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "projectors {k} and {l} are not orthogonal idempotents"
                    )));
                }
            }
            total += p;
        }
        if total.distance(&CMatrix::identity(target_dim)) > 1e-12 {
            return Err(Error::InvalidArgument("projectors do not resolve the identity".into()));
        }
        Ok(Self { projectors, sectors })
    }

    /// `H_k(s) = g(s) H_final[k] + f(s) H_begin` with the schedule boundary
    /// conditions `f(0) = g(1) = 1`, `g(0) = f(1) = 0` enforced.
    pub fn from_schedule(
        projectors: Vec<CMatrix>,
        f: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        h_begin: CMatrix,
        h_finals: Vec<CMatrix>,
    ) -> Result<Self> {
        let bc = [(f(0.0), 1.0), (g(1.0), 1.0), (g(0.0), 0.0), (f(1.0), 0.0)];
        if bc.iter().any(|(got, want)| (got - want).abs() > 1e-12) {
            return Err(Error::InvalidArgument(
                "schedule must satisfy f(0) = g(1) = 1 and g(0) = f(1) = 0".into(),
            ));
        }
        let sectors = h_finals
            .into_iter()
            .enumerate()
            .map(|(k, hf)| {
                let (f, g, hb) = (f.clone(), g.clone(), h_begin.clone());
                HamiltonianTrack::new(hb.dim(), format!("sector-{k}"), move |s| {
                    let mut h = hf.scale_real(g(s));
                    h.add_scaled(&hb, C64::new(f(s), 0.0));
                    h
                })
            })
            .collect();
        Self::new(projectors, sectors)
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn sectors(&self) -> &[HamiltonianTrack] {
        &self.sectors
    }

    pub fn target_dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn aux_dim(&self) -> usize {
        self.sectors[0].dim()
    }

    pub fn at(&self, s: f64) -> CMatrix {
        assemble(&self.projectors, self.sectors.iter().map(|h| h.at(s)))
    }

    pub fn track(&self, label: impl Into<String>) -> HamiltonianTrack {
        let me = self.clone();
        HamiltonianTrack::new(self.target_dim() * self.aux_dim(), label, move |s| me.at(s))
    }
}

/// `sum_k P_k (x) A_k`
pub fn assemble(projectors: &[CMatrix], blocks: impl IntoIterator<Item = CMatrix>) -> CMatrix {
    let mut out: Option<CMatrix> = None;
    for (p, a) in projectors.iter().zip(blocks) {
        let term = tensor(p, &a);
        match out.as_mut() {
            Some(acc) => *acc += &term,
            None => out = Some(term),
        }
    }
    out.expect("at least one sector")
}

impl GateSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi0 > 0.0 && self.phi0 <= PI) {
            return Err(Error::InvalidArgument(format!(
                "phi0 must lie in (0, pi], got {}",
                self.phi0
            )));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    pub fn target_dim(&self) -> usize {
        if self.controlled {
            4
        } else {
            2
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.target_dim()
    }

    /// `cos(eps/2)|0> + e^{i delta} sin(eps/2)|1>`
    pub fn n_plus(&self) -> CVector {
        let e = C64::from_polar(1.0, self.delta);
        CVector::new(vec![
            C64::new((self.epsilon / 2.0).cos(), 0.0),
            e * (self.epsilon / 2.0).sin(),
        ])
    }

    /// `-sin(eps/2)|0> + e^{i delta} cos(eps/2)|1>`
    pub fn n_minus(&self) -> CVector {
        let e = C64::from_polar(1.0, self.delta);
        CVector::new(vec![
            C64::new(-(self.epsilon / 2.0).sin(), 0.0),
            e * (self.epsilon / 2.0).cos(),
        ])
    }

    /// Target-register projectors paired with the azimuth `xi` of the
    /// auxiliary Hamiltonian each one drives.
    pub fn sectors(&self) -> Vec<(CMatrix, f64)> {
        let p_plus = CMatrix::projector(&self.n_plus());
        let p_minus = CMatrix::projector(&self.n_minus());
        if self.controlled {
            let one = CMatrix::projector(&CVector::basis(2, 1));
            let p1m = tensor(&one, &p_minus);
            let rest = &CMatrix::identity(4) - &p1m;
            vec![(rest, 0.0), (p1m, self.phi)]
        } else {
            vec![(p_plus, 0.0), (p_minus, self.phi)]
        }
    }

    #[cfg(test)]
    fn projectors(&self) -> Vec<CMatrix> {
        self.sectors().into_iter().map(|(p, _)| p).collect()
    }

    /// `H_xi(s) = -omega { sigma_z cos(phi0 s) + sin(phi0 s) [sigma_x cos xi + sigma_y sin xi] }`
    pub fn sector_hamiltonian(&self, xi: f64, s: f64) -> CMatrix {
        let a = self.phi0 * s;
        let mut h = pauli::z().scale_real(a.cos());
        h.add_scaled(&pauli::x(), C64::new(a.sin() * xi.cos(), 0.0));
        h.add_scaled(&pauli::y(), C64::new(a.sin() * xi.sin(), 0.0));
        h.scale_real(-self.omega)
    }

    /// Ground and excited states of `H_xi(s)` with their `s`-derivatives.
    pub fn sector_frame(&self, xi: f64, s: f64) -> EigenFrame {
        let half = self.phi0 * s / 2.0;
        let e = C64::from_polar(1.0, xi);
        let ground = CVector::new(vec![C64::new(half.cos(), 0.0), e * half.sin()]);
        let excited = CVector::new(vec![C64::new(-half.sin(), 0.0), e * half.cos()]);
        let rate = C64::new(self.phi0 / 2.0, 0.0);
        EigenFrame {
            energies: vec![-self.omega, self.omega],
            derivs: vec![excited.scale(rate), ground.scale(-rate)],
            states: vec![ground, excited],
        }
    }

    pub fn sector_track(&self, xi: f64) -> HamiltonianTrack {
        let (g1, g2) = (*self, *self);
        HamiltonianTrack::new(2, format!("gate-sector-xi={xi}"), move |s| g1.sector_hamiltonian(xi, s))
            .with_analytic(move |s| g2.sector_frame(xi, s))
    }

    /// `(phi0 / 2 tau) [sigma_y cos xi - sigma_x sin xi]`
    pub fn sector_cd(&self, xi: f64, tau: f64) -> CMatrix {
        let mut h = pauli::y().scale_real(xi.cos());
        h.add_scaled(&pauli::x(), C64::new(-xi.sin(), 0.0));
        h.scale_real(self.phi0 / (2.0 * tau))
    }

    /// Unitary with the sector eigenvectors (ground, excited) as columns.
    pub fn sector_eigenbasis(&self, xi: f64, s: f64) -> CMatrix {
        CMatrix::from_columns(&self.sector_frame(xi, s).states).expect("2x2")
    }

    pub fn controlled_evolution(&self) -> Result<ControlledEvolution> {
        let (projectors, sectors): (Vec<_>, Vec<_>) = self
            .sectors()
            .into_iter()
            .map(|(p, xi)| (p, self.sector_track(xi)))
            .unzip();
        ControlledEvolution::new(projectors, sectors)
    }

    /// `sum_k P_k (x) V_k(s)` where `V_k` diagonalizes sector `k`.
    pub fn composite_eigenbasis(&self, s: f64) -> CMatrix {
        let sectors = self.sectors();
        let projectors: Vec<CMatrix> = sectors.iter().map(|(p, _)| p.clone()).collect();
        assemble(
            &projectors,
            sectors.iter().map(|(_, xi)| self.sector_eigenbasis(*xi, s)),
        )
    }

    /// Ideal gate on the target register, `sum_k e^{i xi_k} P_k`.
    pub fn gate_unitary(&self) -> CMatrix {
        let mut u = CMatrix::zeros(self.target_dim());
        for (p, xi) in self.sectors() {
            u.add_scaled(&p, C64::from_polar(1.0, xi));
        }
        u
    }
}

pub fn gate_hamiltonian(g: &GateSpec) -> Result<HamiltonianTrack> {
    g.validate()?;
    let label = if g.controlled { "controlled-gate" } else { "gate" };
    Ok(g.controlled_evolution()?.track(label))
}

pub fn gate_cd_hamiltonian(g: &GateSpec, tau: f64) -> Result<CMatrix> {
    g.validate()?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let sectors = g.sectors();
    let projectors: Vec<CMatrix> = sectors.iter().map(|(p, _)| p.clone()).collect();
    Ok(assemble(
        &projectors,
        sectors.iter().map(|(_, xi)| g.sector_cd(*xi, tau)),
    ))
}

fn check_target_input(g: &GateSpec, input: &CVector) -> Result<()> {
    if input.dim() != g.target_dim() {
        return Err(Error::DimensionMismatch {
            expected: g.target_dim(),
            found: input.dim(),
        });
    }
    Ok(())
}

/// Ideal post-gate target state.
pub fn rotated_target(g: &GateSpec, input: &CVector) -> Result<CVector> {
    check_target_input(g, input)?;
    Ok(g.gate_unitary().matvec(input))
}

/// `cos(phi0 s/2) |psi>|0> + sin(phi0 s/2) |psi_rot>|1>`
pub fn evolved_composite_state(g: &GateSpec, s: f64, input: &CVector) -> Result<CVector> {
    let rotated = rotated_target(g, input)?;
    let half = g.phi0 * s / 2.0;
    let a = input.tensor(&CVector::basis(2, 0)).scale(C64::new(half.cos(), 0.0));
    let b = rotated.tensor(&CVector::basis(2, 1)).scale(C64::new(half.sin(), 0.0));
    Ok(a.axpy(ONE, &b))
}

/// Starting composite state `|psi>|0>`.
pub fn initial_composite_state(g: &GateSpec, input: &CVector) -> Result<CVector> {
    check_target_input(g, input)?;
    Ok(input.tensor(&CVector::basis(2, 0)))
}

/// Bell state `(|00> + |11>)/sqrt(2)`.
pub fn bell_state() -> CVector {
    let mut v = CVector::zeros(4);
    v[0] = C64::new(1.0 / SQRT_2, 0.0);
    v[3] = C64::new(1.0 / SQRT_2, 0.0);
    v
}
