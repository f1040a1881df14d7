//! Markovian master equation in normalized time,
//! `d_s rho = -i tau [H, rho] + tau sum_i gamma_i^2 / 2 (2 L rho L^+ - {L^+ L, rho})`,
//! with amplitude-damping and dephasing channels attached to an
//! instantaneous eigenbasis.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{anticommutator, herm_eigen, pauli, CMatrix, CVector, C64, ZERO};

/// Thermal occupation fixing the ratio of the amplitude-damping rates.
pub const N_THERMAL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    None,
    Gad,
    Dephasing,
}

impl std::str::FromStr for Channel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Channel::None),
            "gad" => Ok(Channel::Gad),
            "dephasing" => Ok(Channel::Dephasing),
            other => Err(Error::InvalidArgument(format!(
                "unknown channel `{other}` (expected none, gad, dephasing)"
            ))),
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::None => "none",
            Channel::Gad => "gad",
            Channel::Dephasing => "dephasing",
        })
    }
}

/// Which Hamiltonian's eigenbasis carries the channel operators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    /// The Hamiltonian that actually drives each protocol.
    #[default]
    DrivingHamiltonian,
    /// The reference adiabatic Hamiltonian, for both protocols.
    AdiabaticH0,
}

/// How the dephasing strength enters the dissipator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingNorm {
    /// `gamma_d^2 = (alpha omega_r)^2`
    #[default]
    SquaredRate,
    /// `gamma_d^2 = alpha omega_r`
    LinearRate,
}

impl std::str::FromStr for BasisChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "driving" | "driving_hamiltonian" => Ok(BasisChoice::DrivingHamiltonian),
            "adiabatic" | "adiabatic_h0" | "h0" => Ok(BasisChoice::AdiabaticH0),
            other => Err(Error::InvalidArgument(format!(
                "unknown channel basis `{other}` (expected driving, adiabatic_h0)"
            ))),
        }
    }
}

impl std::str::FromStr for DephasingNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "squared" | "squared_rate" => Ok(DephasingNorm::SquaredRate),
            "linear" | "linear_rate" => Ok(DephasingNorm::LinearRate),
            other => Err(Error::InvalidArgument(format!(
                "unknown dephasing normalization `{other}` (expected squared, linear)"
            ))),
        }
    }
}

/// Tensor factor carrying the single-qubit channel operators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitEmbedding {
    /// The last qubit factor (the only one for a single qubit).
    #[default]
    Auxiliary,
    Factor {
        index: usize,
        dims: Vec<usize>,
    },
}

impl QubitEmbedding {
    /// `I (x) ... (x) op (x) ... (x) I` on a space of dimension `total`.
    pub fn embed(&self, op: &CMatrix, total: usize) -> Result<CMatrix> {
        let (left, right) = match self {
            QubitEmbedding::Auxiliary => {
                if !total.is_multiple_of(2) {
                    return Err(Error::InvalidArgument(format!("dimension {total} has no qubit factor")));
                }
                (total / 2, 1)
            }
            QubitEmbedding::Factor { index, dims } => {
                let product: usize = dims.iter().product();
                if product != total {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        found: product,
                    });
                }
                if *index >= dims.len() || dims[*index] != 2 {
                    return Err(Error::InvalidArgument(format!(
                        "factor {index} of {dims:?} is not a qubit"
                    )));
                }
                (dims[..*index].iter().product(), dims[*index + 1..].iter().product())
            }
        };
        let mut out = CMatrix::zeros(total);
        for l in 0..left {
            for r in 0..right {
                for a in 0..2 {
                    for b in 0..2 {
                        out[((l * 2 + a) * right + r, (l * 2 + b) * right + r)] = op[(a, b)];
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub channel: Channel,
    pub alpha: f64,
    pub omega_r: f64,
    #[serde(default)]
    pub basis: BasisChoice,
    #[serde(default)]
    pub dephasing_norm: DephasingNorm,
    #[serde(default)]
    pub embedding: QubitEmbedding,
}

impl NoiseSpec {
    pub fn closed() -> Self {
        Self::new(Channel::None, 0.0, 0.0)
    }

    pub fn new(channel: Channel, alpha: f64, omega_r: f64) -> Self {
        NoiseSpec {
            channel,
            alpha,
            omega_r,
            basis: BasisChoice::default(),
            dephasing_norm: DephasingNorm::default(),
            embedding: QubitEmbedding::default(),
        }
    }

    pub fn gad(alpha: f64, omega_r: f64) -> Self {
        Self::new(Channel::Gad, alpha, omega_r)
    }

    pub fn dephasing(alpha: f64, omega_r: f64) -> Self {
        Self::new(Channel::Dephasing, alpha, omega_r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.omega_r >= 0.0 && self.omega_r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega_r must be >= 0, got {}",
                self.omega_r
            )));
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.channel == Channel::None || self.alpha == 0.0 || self.omega_r == 0.0
    }

    /// Single-qubit operators in the eigenbasis with their rates `gamma`
    /// (not squared). Index 0 of the basis is the lower level, so `sigma_+`
    /// excites and `sigma_-` relaxes.
    pub fn qubit_operators(&self) -> Vec<(CMatrix, f64)> {
        let g0 = self.alpha * self.omega_r;
        match self.channel {
            Channel::None => Vec::new(),
            Channel::Gad => vec![
                (pauli::plus(), (g0 * N_THERMAL).sqrt()),
                (pauli::minus(), (g0 * (N_THERMAL + 1.0)).sqrt()),
            ],
            Channel::Dephasing => {
                let rate = match self.dephasing_norm {
                    DephasingNorm::SquaredRate => g0,
                    DephasingNorm::LinearRate => g0.sqrt(),
                };
                vec![(pauli::z(), rate)]
            }
        }
    }
}

/// A Lindblad operator `L` with its rate `gamma`; the dissipator uses `gamma^2`.
#[derive(Clone, Debug)]
pub struct LindbladOp {
    pub op: CMatrix,
    pub rate: f64,
}

/// `-i tau [H, rho] + tau sum gamma^2 / 2 (2 L rho L^+ - {L^+ L, rho})`
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, ops: &[LindbladOp], tau: f64) -> Result<CMatrix> {
    let d = rho.dim();
    if h.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h.dim(),
        });
    }
    if let Some(bad) = ops.iter().find(|l| l.op.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.op.dim(),
        });
    }
    let hr = h * rho;
    let rh = rho * h;
    let mut out = (&hr - &rh).scale(C64::new(0.0, -tau));
    for l in ops {
        let g2 = l.rate * l.rate;
        if g2 == 0.0 {
            continue;
        }
        let ld = l.op.adjoint();
        let jump = &(&l.op * rho) * &ld;
        let k = &ld * &l.op;
        out.add_scaled(&jump, C64::new(tau * g2, 0.0));
        out.add_scaled(&anticommutator(&k, rho), C64::new(-0.5 * tau * g2, 0.0));
    }
    Ok(out)
}

/// Unitary whose columns are the eigenvectors of `h` in ascending order.
/// Each column is phase-fixed so that its largest component is real and
/// positive. Degenerate spectra are rejected.
pub fn eigenbasis(h: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eigen(h)?;
    let scale = h.max_abs().max(1.0);
    let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < 1e-10 * scale {
        return Err(Error::Degenerate { s: f64::NAN, gap });
    }
    let cols: Vec<CVector> = eig.vectors.iter().map(fix_phase).collect();
    CMatrix::from_columns(&cols)
}

/// First component real and non-negative when it is not negligible,
/// otherwise the largest one.
pub(crate) fn fix_phase(v: &CVector) -> CVector {
    let first = v[0];
    let pivot = if first.norm() > 1e-8 {
        first
    } else {
        v.entries()
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(ZERO)
    };
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    v.scale(pivot.conj() / pivot.norm())
}

/// Operators `V L0 V^+` for a basis `v` whose columns are eigenvectors.
pub fn channel_ops_in_basis(spec: &NoiseSpec, v: &CMatrix) -> Result<Vec<LindbladOp>> {
    spec.validate()?;
    let vd = v.adjoint();
    spec.qubit_operators()
        .into_iter()
        .map(|(op, rate)| {
            let embedded = spec.embedding.embed(&op, v.dim())?;
            Ok(LindbladOp {
                op: &(v * &embedded) * &vd,
                rate,
            })
        })
        .collect()
}

/// Channel operators in the eigenbasis of `h_basis`.
pub fn channel_ops(spec: &NoiseSpec, h_basis: &CMatrix) -> Result<Vec<LindbladOp>> {
    channel_ops_in_basis(spec, &eigenbasis(h_basis)?)
}

/// Block-diagonal basis `sum_k P_k (x) W_k` for Hamiltonians of the form
/// `sum_k P_k (x) H_k`, where each block is diagonalized on its own.
pub fn sectored_eigenbasis(projectors: &[CMatrix], blocks: &[CMatrix]) -> Result<CMatrix> {
    if projectors.len() != blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: projectors.len(),
            found: blocks.len(),
        });
    }
    let mut out: Option<CMatrix> = None;
    for (p, h) in projectors.iter().zip(blocks) {
        let term = crate::qcore::tensor(p, &eigenbasis(h)?);
        match out.as_mut() {
            Some(acc) => acc.add_scaled(&term, C64::new(1.0, 0.0)),
            None => out = Some(term),
        }
    }
    out.ok_or_else(|| Error::InvalidArgument("no sectors".into()))
}

pub type BasisFn = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;

/// Source of the eigenbasis `V(s)` the channel operators are conjugated with.
#[derive(Clone)]
pub enum ChannelBasis {
    Fixed(CMatrix),
    Moving(BasisFn),
}

impl std::fmt::Debug for ChannelBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelBasis::Fixed(v) => f.debug_tuple("Fixed").field(v).finish(),
            ChannelBasis::Moving(_) => f.write_str("Moving(..)"),
        }
    }
}

impl ChannelBasis {
    /// Eigenbasis of `h(s)`, recomputed at every evaluation.
    pub fn of_hamiltonian(h: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Self {
        ChannelBasis::Moving(Arc::new(move |s| {
            eigenbasis(&h(s)).map_err(|e| match e {
                Error::Degenerate { gap, .. } => Error::Degenerate { s, gap },
                other => other,
            })
        }))
    }

    pub fn moving(v: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Self {
        ChannelBasis::Moving(Arc::new(move |s| Ok(v(s))))
    }

    pub fn at(&self, s: f64) -> Result<CMatrix> {
        match self {
            ChannelBasis::Fixed(v) => Ok(v.clone()),
            ChannelBasis::Moving(f) => f(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    rho: CMatrix,
}

/// Tolerances a valid density matrix has to meet.
const STATE_TRACE_TOL: f64 = 1e-8;
const STATE_HERMITICITY_TOL: f64 = 1e-10;
const STATE_POSITIVITY_TOL: f64 = 1e-6;

impl DensityState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TRACE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr}")));
        }
        let herm = rho.hermiticity_error();
        if herm > STATE_HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: herm,
                scale: rho.max_abs(),
            });
        }
        let min = crate::qcore::min_eigenvalue(&rho)?;
        if min < -STATE_POSITIVITY_TOL {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(DensityState { rho })
    }

    pub fn pure(v: &CVector) -> Result<Self> {
        if !v.is_normalized() {
            return Err(Error::InvalidArgument(format!("state norm is {}", v.norm())));
        }
        Ok(DensityState {
            rho: CMatrix::projector(v),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityState {
            rho: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn trace_error(&self) -> f64 {
        (self.rho.trace() - C64::new(1.0, 0.0)).norm()
    }

    pub fn population(&self, v: &CVector) -> f64 {
        self.rho.expectation(v, v).re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub steps: usize,
    pub trace_tol: f64,
    pub hermiticity_tol: f64,
    pub positivity_tol: f64,
    /// The lowest eigenvalue is checked every this many steps and at the end.
    pub positivity_stride: usize,
}

pub const MIN_STEPS: usize = 100;

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps: 10_000,
            trace_tol: STATE_TRACE_TOL,
            hermiticity_tol: STATE_HERMITICITY_TOL,
            positivity_tol: STATE_POSITIVITY_TOL,
            positivity_stride: 100,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(steps: usize) -> Self {
        IntegratorConfig {
            steps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_STEPS} steps required, got {}",
                self.steps
            )));
        }
        if self.positivity_stride == 0 {
            return Err(Error::InvalidArgument("positivity stride must be positive".into()));
        }
        Ok(())
    }
}

/// Final state of an integration with the worst monitor readings seen.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: DensityState,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// `(s, rho(s))` after every step, when requested.
    pub trajectory: Option<Vec<(f64, CMatrix)>>,
}

/// Dissipator evaluated in the channel frame, `V D0(V^+ rho V) V^+`, where
/// `D0` uses the unconjugated embedded operators.
struct FrameDissipator {
    ops: Vec<(CMatrix, CMatrix, f64)>,
}

impl FrameDissipator {
    fn new(spec: &NoiseSpec, dim: usize) -> Result<Self> {
        let ops = if spec.is_closed() {
            Vec::new()
        } else {
            spec.qubit_operators()
                .into_iter()
                .filter(|(_, g)| *g > 0.0)
                .map(|(op, g)| {
                    let l = spec.embedding.embed(&op, dim)?;
                    let k = &l.adjoint() * &l;
                    Ok((l, k, g * g))
                })
                .collect::<Result<_>>()?
        };
        Ok(FrameDissipator { ops })
    }

    fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn apply(&self, rho: &CMatrix, v: &CMatrix, tau: f64, out: &mut CMatrix) {
        let vd = v.adjoint();
        let local = &(&vd * rho) * v;
        let mut acc = CMatrix::zeros(rho.dim());
        for (l, k, g2) in &self.ops {
            let jump = &(l * &local) * &l.adjoint();
            acc.add_scaled(&jump, C64::new(*g2, 0.0));
            acc.add_scaled(&anticommutator(k, &local), C64::new(-0.5 * g2, 0.0));
        }
        let back = &(v * &acc) * &vd;
        out.add_scaled(&back, C64::new(tau, 0.0));
    }
}

/// Fixed-step RK4 over `s in [0, 1]`. Channel operators are rebuilt at each
/// stage; trace and Hermiticity are checked after every step.
pub fn evolve(
    h: &(dyn Fn(f64) -> CMatrix + Sync),
    rho0: &DensityState,
    spec: &NoiseSpec,
    basis: &ChannelBasis,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<Evolution> {
    evolve_inner(h, rho0, spec, basis, tau, cfg, false)
}

/// As [`evolve`], keeping `rho(s)` after every step.
pub fn evolve_trajectory(
    h: &(dyn Fn(f64) -> CMatrix + Sync),
    rho0: &DensityState,
    spec: &NoiseSpec,
    basis: &ChannelBasis,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<Evolution> {
    evolve_inner(h, rho0, spec, basis, tau, cfg, true)
}

fn evolve_inner(
    h: &(dyn Fn(f64) -> CMatrix + Sync),
    rho0: &DensityState,
    spec: &NoiseSpec,
    basis: &ChannelBasis,
    tau: f64,
    cfg: &IntegratorConfig,
    record: bool,
) -> Result<Evolution> {
    cfg.validate()?;
    spec.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let dim = rho0.dim();
    let dissipator = FrameDissipator::new(spec, dim)?;
    let rhs = |s: f64, rho: &CMatrix| -> Result<CMatrix> {
        let hs = h(s);
        if hs.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: hs.dim(),
            });
        }
        let mut out = (&(&hs * rho) - &(rho * &hs)).scale(C64::new(0.0, -tau));
        if !dissipator.is_empty() {
            let v = basis.at(s)?;
            dissipator.apply(rho, &v, tau, &mut out);
        }
        Ok(out)
    };

    let n = cfg.steps;
    let ds = 1.0 / n as f64;
    let mut rho = rho0.rho.clone();
    let mut max_trace: f64 = rho0.trace_error();
    let mut max_herm: f64 = rho.hermiticity_error();
    let mut min_eig = f64::INFINITY;
    let mut trajectory = record.then(|| vec![(0.0, rho.clone())]);
    let half = C64::new(0.5 * ds, 0.0);
    let full = C64::new(ds, 0.0);
    for step in 0..n {
        let s = step as f64 * ds;
        let mid = s + 0.5 * ds;
        let end = if step + 1 == n { 1.0 } else { (step + 1) as f64 * ds };
        let k1 = rhs(s, &rho)?;
        let mut tmp = rho.clone();
        tmp.add_scaled(&k1, half);
        let k2 = rhs(mid, &tmp)?;
        tmp = rho.clone();
        tmp.add_scaled(&k2, half);
        let k3 = rhs(mid, &tmp)?;
        tmp = rho.clone();
        tmp.add_scaled(&k3, full);
        let k4 = rhs(end, &tmp)?;
        rho.add_scaled(&k1, C64::new(ds / 6.0, 0.0));
        rho.add_scaled(&k2, C64::new(ds / 3.0, 0.0));
        rho.add_scaled(&k3, C64::new(ds / 3.0, 0.0));
        rho.add_scaled(&k4, C64::new(ds / 6.0, 0.0));

        if rho.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Monitor {
                step: step + 1,
                s: end,
                what: "non-finite density matrix".into(),
            });
        }
        let tr = (rho.trace() - C64::new(1.0, 0.0)).norm();
        max_trace = max_trace.max(tr);
        if tr > cfg.trace_tol {
            return Err(Error::Monitor {
                step: step + 1,
                s: end,
                what: format!("trace error {tr:e} exceeds {:e}", cfg.trace_tol),
            });
        }
        let herm = rho.hermiticity_error();
        max_herm = max_herm.max(herm);
        if herm > cfg.hermiticity_tol {
            return Err(Error::Monitor {
                step: step + 1,
                s: end,
                what: format!("Hermiticity error {herm:e} exceeds {:e}", cfg.hermiticity_tol),
            });
        }
        if (step + 1) % cfg.positivity_stride == 0 || step + 1 == n {
            let m = crate::qcore::min_eigenvalue(&rho.hermitian_part())?;
            min_eig = min_eig.min(m);
            if m < -cfg.positivity_tol {
                return Err(Error::Monitor {
                    step: step + 1,
                    s: end,
                    what: format!("eigenvalue {m:e} below -{:e}", cfg.positivity_tol),
                });
            }
        }
        if let Some(t) = trajectory.as_mut() {
            t.push((end, rho.clone()));
        }
    }
    Ok(Evolution {
        state: DensityState { rho },
        max_trace_error: max_trace,
        max_hermiticity_error: max_herm,
        min_eigenvalue: min_eig,
        trajectory,
    })
}

/// `sqrt(<t|rho|t>)`, clamped to `[0, 1]`.
pub fn fidelity(rho: &CMatrix, target: &CVector) -> f64 {
    rho.expectation(target, target).re.max(0.0).sqrt().min(1.0)
}

/// Projects the last (auxiliary) qubit onto `|outcome>`, renormalizes and
/// traces it out. Returns the conditional target state and the outcome
/// probability.
pub fn postselect_auxiliary(rho: &CMatrix, outcome: usize) -> Result<(CMatrix, f64)> {
    let d = rho.dim();
    if !d.is_multiple_of(2) || outcome > 1 {
        return Err(Error::InvalidArgument(format!(
            "cannot post-select outcome {outcome} on dimension {d}"
        )));
    }
    let t = d / 2;
    let mut out = CMatrix::zeros(t);
    for i in 0..t {
        for j in 0..t {
            out[(i, j)] = rho[(2 * i + outcome, 2 * j + outcome)];
        }
    }
    let p = out.trace().re;
    if !(p > 1e-14) {
        return Err(Error::InvalidArgument(format!(
            "auxiliary outcome {outcome} has probability {p:e}"
        )));
    }
    Ok((out.scale_real(1.0 / p), p))
}

/// Reduced target state without conditioning on the auxiliary qubit.
pub fn unconditioned_target(rho: &CMatrix) -> Result<CMatrix> {
    let d = rho.dim();
    crate::qcore::trace_out(rho, 1, &[d / 2, 2])
}
