//! Generalized transitionless driving over an eigenstate track.
//!
//! All phases here are per unit of normalized time: a table value `theta`
//! at level `n` contributes `-(theta / tau) |n><n|` to the shortcut
//! Hamiltonian, and propagation from `|n(0)>` picks up `exp(i int_0^s theta)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energetics::simpson_samples;
use crate::error::{Error, Result};
use crate::qcore::{CMatrix, CVector, C64, I};
use crate::spectral::EigenTrack;

/// Per-grid-point, per-level phase table (`values[j][n]`).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTable {
    pub values: Vec<Vec<f64>>,
}

impl PhaseTable {
    pub fn new(values: Vec<Vec<f64>>) -> Self {
        PhaseTable { values }
    }

    pub fn level(&self, n: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[n]).collect()
    }

    fn check_covers(&self, track: &EigenTrack) -> Result<()> {
        if self.values.len() != track.len() {
            return Err(Error::InvalidArgument(format!(
                "phase table has {} rows, track grid has {} points",
                self.values.len(),
                track.len()
            )));
        }
        if let Some(j) = self.values.iter().position(|row| row.len() != track.levels()) {
            return Err(Error::InvalidArgument(format!(
                "phase table row {j} has {} entries, track has {} levels",
                self.values[j].len(),
                track.levels()
            )));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase table".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhasePolicy {
    Zero,
    /// Energy-minimizing phases `-i <d_s n|n>`.
    Optimal,
    /// `-tau E_n + i <n|d_s n>`, which reproduces `H_0 + H_CD`.
    AdiabaticMimic,
    /// One phase shared by every level.
    Constant(f64),
    /// One constant per level. Keeps the shortcut time independent only when
    /// the overlaps linking levels with different phases vanish; see
    /// [`Theorem2Report::admits_level_constants`].
    LevelConstants(Vec<f64>),
    Custom(Arc<PhaseTable>),
}

impl fmt::Display for PhasePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhasePolicy::Zero => write!(f, "zero"),
            PhasePolicy::Optimal => write!(f, "optimal"),
            PhasePolicy::AdiabaticMimic => write!(f, "adiabatic"),
            PhasePolicy::Constant(t) => write!(f, "constant:{t}"),
            PhasePolicy::LevelConstants(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "levels:{}", parts.join(","))
            }
            PhasePolicy::Custom(_) => write!(f, "custom"),
        }
    }
}

/// Parses `zero`, `optimal`, `adiabatic`, `constant:<theta>` and
/// `levels:<t0>,<t1>,...`.
impl FromStr for PhasePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad phase value `{v}`")))
        };
        match lower.as_str() {
            "zero" => Ok(PhasePolicy::Zero),
            "optimal" => Ok(PhasePolicy::Optimal),
            "adiabatic" | "adiabatic_mimic" | "adiabatic-mimic" => Ok(PhasePolicy::AdiabaticMimic),
            _ => {
                if let Some(v) = lower.strip_prefix("constant:") {
                    Ok(PhasePolicy::Constant(parse(v)?))
                } else if let Some(v) = lower.strip_prefix("levels:") {
                    Ok(PhasePolicy::LevelConstants(
                        v.split(',').map(parse).collect::<Result<_>>()?,
                    ))
                } else {
                    Err(Error::InvalidArgument(format!("unknown phase policy `{s}`")))
                }
            }
        }
    }
}

/// Phases realized by a policy on a given track and total time.
pub fn policy_phases(track: &EigenTrack, policy: &PhasePolicy, tau: f64) -> Result<PhaseTable> {
    let levels = track.levels();
    let rows = track.len();
    let table = match policy {
        PhasePolicy::Zero => vec![vec![0.0; levels]; rows],
        PhasePolicy::Constant(t) => vec![vec![*t; levels]; rows],
        PhasePolicy::LevelConstants(ts) => {
            if ts.len() != levels {
                return Err(Error::DimensionMismatch {
                    expected: levels,
                    found: ts.len(),
                });
            }
            vec![ts.clone(); rows]
        }
        PhasePolicy::Optimal => return Ok(optimal_phases(track)),
        PhasePolicy::AdiabaticMimic => {
            let opt = optimal_phases(track);
            opt.values
                .iter()
                .enumerate()
                .map(|(j, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(n, th)| th - tau * track.energy(j, n))
                        .collect()
                })
                .collect()
        }
        PhasePolicy::Custom(t) => {
            t.check_covers(track)?;
            return Ok((**t).clone());
        }
    };
    Ok(PhaseTable::new(table))
}

/// `theta_n(s) = -i <d_s n|n>`, which is `-Im <n|d_s n>`.
pub fn optimal_phases(track: &EigenTrack) -> PhaseTable {
    let values = (0..track.len())
        .map(|j| {
            (0..track.levels())
                .map(|n| -track.state(j, n).inner(track.deriv(j, n)).im)
                .collect()
        })
        .collect();
    PhaseTable::new(values)
}

/// Shortcut Hamiltonian (angular-frequency units) at grid index `j`.
fn assemble_at(track: &EigenTrack, j: usize, phases: &[f64], tau: f64) -> CMatrix {
    let dim = track.dim();
    let mut m = CMatrix::zeros(dim);
    for (n, &theta) in phases.iter().enumerate() {
        let v = track.state(j, n);
        m.add_scaled(&CMatrix::outer(track.deriv(j, n), v), I);
        m.add_scaled(&CMatrix::projector(v), C64::new(-theta, 0.0));
    }
    m.hermitian_part().scale_real(1.0 / tau)
}

/// Grid-sampled shortcut Hamiltonian with its time-independence witness.
#[derive(Clone, Debug)]
pub struct ShortcutResult {
    grid: Vec<f64>,
    hamiltonians: Vec<CMatrix>,
    phases: PhaseTable,
    policy: PhasePolicy,
    tau: f64,
    witness: f64,
    max_norm: f64,
}

/// Relative threshold on `max_s ||d_s H|| / max_s ||H||`.
pub const TIME_INDEPENDENCE_TOL: f64 = 1e-6;

pub fn build_shortcut(track: &EigenTrack, policy: PhasePolicy, tau: f64) -> Result<ShortcutResult> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let phases = policy_phases(track, &policy, tau)?;
    let hamiltonians: Vec<CMatrix> = (0..track.len())
        .map(|j| assemble_at(track, j, &phases.values[j], tau))
        .collect();
    for (j, h) in hamiltonians.iter().enumerate() {
        if h.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "shortcut Hamiltonian at s = {}",
                track.grid()[j]
            )));
        }
    }
    let max_norm = hamiltonians.iter().map(CMatrix::hs_norm).fold(0.0, f64::max);
    let witness = derivative_witness(track.grid(), &hamiltonians);
    Ok(ShortcutResult {
        grid: track.grid().to_vec(),
        hamiltonians,
        phases,
        policy,
        tau,
        witness,
        max_norm,
    })
}

/// `max_s ||d_s H(s)||` by finite differences over the grid.
fn derivative_witness(grid: &[f64], hs: &[CMatrix]) -> f64 {
    let n = hs.len();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let (a, b) = if j == 0 {
            (0, 1)
        } else if j == n - 1 {
            (n - 2, n - 1)
        } else {
            (j - 1, j + 1)
        };
        worst = worst.max(hs[b].distance(&hs[a]) / (grid[b] - grid[a]));
    }
    worst
}

impl ShortcutResult {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn hamiltonians(&self) -> &[CMatrix] {
        &self.hamiltonians
    }

    pub fn hamiltonian(&self, j: usize) -> &CMatrix {
        &self.hamiltonians[j]
    }

    pub fn phases(&self) -> &PhaseTable {
        &self.phases
    }

    pub fn policy(&self) -> &PhasePolicy {
        &self.policy
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `max_s ||d_s H_SA(s)||`
    pub fn witness(&self) -> f64 {
        self.witness
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    pub fn is_time_independent(&self) -> bool {
        self.witness <= TIME_INDEPENDENCE_TOL * self.max_norm
    }

    /// Linear interpolation between grid samples.
    pub fn at(&self, s: f64) -> Result<CMatrix> {
        let last = self.grid.len() - 1;
        if !(0.0..=1.0).contains(&s) || !(self.grid[0]..=self.grid[last]).contains(&s) {
            return Err(Error::InvalidArgument(format!("s = {s} outside the shortcut grid")));
        }
        let h = self.grid[1] - self.grid[0];
        let x = (s - self.grid[0]) / h;
        let j = (x.floor() as usize).min(last);
        let w = x - j as f64;
        if j == last || w.abs() < 1e-9 {
            return Ok(self.hamiltonians[j].clone());
        }
        if (1.0 - w).abs() < 1e-9 {
            return Ok(self.hamiltonians[j + 1].clone());
        }
        let mut out = self.hamiltonians[j].scale_real(1.0 - w);
        out.add_scaled(&self.hamiltonians[j + 1], C64::new(w, 0.0));
        Ok(out)
    }

    /// `int_0^1 ||H_SA(s)|| ds`
    pub fn cost(&self) -> Result<f64> {
        let norms: Vec<f64> = self.hamiltonians.iter().map(CMatrix::hs_norm).collect();
        simpson_samples(&norms, self.grid[1] - self.grid[0])
    }

    /// `int_0^s theta_n` by the trapezoid rule, for `s` on the grid.
    pub fn accumulated_phase(&self, level: usize, j: usize) -> f64 {
        let th = self.phases.level(level);
        (1..=j)
            .map(|i| 0.5 * (th[i] + th[i - 1]) * (self.grid[i] - self.grid[i - 1]))
            .sum()
    }

    /// Schrodinger propagation over `[0, 1]`. With an even number of grid
    /// intervals every RK4 stage lands on a stored sample.
    pub fn propagate(&self, psi0: &CVector) -> Result<CVector> {
        let intervals = self.grid.len() - 1;
        let steps = if intervals.is_multiple_of(2) {
            intervals / 2
        } else {
            intervals
        };
        propagate_state(|s| self.at(s).expect("s within grid"), self.tau, psi0, steps)
    }
}

/// RK4 for `d_s psi = -i tau H(s) psi` on `[0, 1]`.
pub fn propagate_state(h: impl Fn(f64) -> CMatrix, tau: f64, psi0: &CVector, steps: usize) -> Result<CVector> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let dt = 1.0 / steps as f64;
    let rhs = |s: f64, psi: &CVector| h(s).matvec(psi).scale(C64::new(0.0, -tau));
    let mut psi = psi0.clone();
    for k in 0..steps {
        let s = k as f64 * dt;
        let mid = s + 0.5 * dt;
        let end = if k + 1 == steps { 1.0 } else { (k + 1) as f64 * dt };
        let k1 = rhs(s, &psi);
        let k2 = rhs(mid, &psi.axpy(C64::new(0.5 * dt, 0.0), &k1));
        let k3 = rhs(mid, &psi.axpy(C64::new(0.5 * dt, 0.0), &k2));
        let k4 = rhs(end, &psi.axpy(C64::new(dt, 0.0), &k3));
        psi = psi
            .axpy(C64::new(dt / 6.0, 0.0), &k1)
            .axpy(C64::new(dt / 3.0, 0.0), &k2)
            .axpy(C64::new(dt / 3.0, 0.0), &k3)
            .axpy(C64::new(dt / 6.0, 0.0), &k4);
        if psi.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!("state at s = {end}")));
        }
    }
    Ok(psi)
}

#[derive(Clone, Debug)]
pub struct Theorem2Report {
    /// `max |<k|d_s m> - c_km|` over levels and grid points.
    pub constancy_residual: f64,
    pub tolerance: f64,
    pub passes: bool,
    /// Grid averages `c_km` of the overlaps.
    pub overlap_means: CMatrix,
    /// Time-independent shortcut (per unit `1/tau`) built with a zero
    /// constant phase, present when the check passes.
    pub family_generator: Option<CMatrix>,
    /// `max_s ||H(s) - H(0)||` of the constant-phase shortcut at `tau = 1`.
    pub hamiltonian_variation: f64,
}

impl Theorem2Report {
    /// Whether per-level constant phases keep the shortcut time independent:
    /// levels carrying different phases must not be linked by a nonzero
    /// mean overlap.
    pub fn admits_level_constants(&self, thetas: &[f64], tol: f64) -> bool {
        if !self.passes || thetas.len() != self.overlap_means.dim() {
            return false;
        }
        let n = thetas.len();
        (0..n).all(|k| {
            (0..n).all(|m| k == m || (thetas[k] - thetas[m]).abs() <= tol || self.overlap_means[(k, m)].norm() <= tol)
        })
    }
}

pub fn check_theorem2(track: &EigenTrack, tolerance: f64) -> Result<Theorem2Report> {
    let n = track.levels();
    let tables: Vec<CMatrix> = (0..track.len()).map(|j| track.overlap_table_at(j)).collect();
    let mut mean = CMatrix::zeros(n);
    for t in &tables {
        mean.add_scaled(t, C64::new(1.0 / tables.len() as f64, 0.0));
    }
    let residual = tables.iter().map(|t| (t - &mean).max_abs()).fold(0.0, f64::max);
    let passes = residual <= tolerance;
    let sc = build_shortcut(track, PhasePolicy::Constant(0.0), 1.0)?;
    let h0 = sc.hamiltonian(0);
    let variation = sc.hamiltonians().iter().map(|h| h.distance(h0)).fold(0.0, f64::max);
    Ok(Theorem2Report {
        constancy_residual: residual,
        tolerance,
        passes,
        overlap_means: mean,
        family_generator: passes.then(|| h0.clone()),
        hamiltonian_variation: variation,
    })
}

/// Outcome of the brute-force minimality scan around the optimal phases.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub base_cost: f64,
    /// Cost recomputed with a zero perturbation, minus `base_cost`.
    pub zero_perturbation_change: f64,
    /// Smallest `cost(theta_min + delta) - cost(theta_min)` over the samples.
    pub min_increase: f64,
    pub perturbations: usize,
    pub all_increase: bool,
}

pub const DEFAULT_MINIMALITY_SEED: u64 = 0x5eed_c0de;

/// Smooth random perturbation table: a few Fourier modes per level, rescaled
/// so that `max |delta|` is log-uniform in `[1e-3, 1]`.
pub fn random_perturbation(grid: &[f64], levels: usize, rng: &mut impl Rng) -> PhaseTable {
    const MODES: usize = 4;
    let amp = 10f64.powf(rng.gen_range(-3.0..=0.0));
    let coeffs: Vec<Vec<(f64, f64)>> = (0..levels)
        .map(|_| {
            (0..MODES)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let mut values: Vec<Vec<f64>> = grid
        .iter()
        .map(|&s| {
            coeffs
                .iter()
                .map(|modes| {
                    modes
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let w = std::f64::consts::PI * k as f64 * s;
                            a * w.cos() + b * w.sin()
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let peak = values.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { amp / peak } else { 0.0 };
    for v in values.iter_mut().flatten() {
        *v *= scale;
    }
    PhaseTable::new(values)
}

fn shifted(base: &PhaseTable, delta: &PhaseTable) -> PhaseTable {
    PhaseTable::new(
        base.values
            .iter()
            .zip(&delta.values)
            .map(|(a, d)| a.iter().zip(d).map(|(x, y)| x + y).collect())
            .collect(),
    )
}

/// Cost of the shortcut built from an explicit phase table.
pub fn shortcut_cost(track: &EigenTrack, phases: &PhaseTable, tau: f64) -> Result<f64> {
    build_shortcut(track, PhasePolicy::Custom(Arc::new(phases.clone())), tau)?.cost()
}

pub fn minimality_scan(track: &EigenTrack, tau: f64, n_perturbations: usize, seed: u64) -> Result<MinimalityReport> {
    let base = optimal_phases(track);
    let base_cost = shortcut_cost(track, &base, tau)?;
    let zero = PhaseTable::new(vec![vec![0.0; track.levels()]; track.len()]);
    let zero_change = shortcut_cost(track, &shifted(&base, &zero), tau)? - base_cost;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_increase = f64::INFINITY;
    for _ in 0..n_perturbations {
        let delta = random_perturbation(track.grid(), track.levels(), &mut rng);
        let c = shortcut_cost(track, &shifted(&base, &delta), tau)?;
        min_increase = min_increase.min(c - base_cost);
    }
    Ok(MinimalityReport {
        base_cost,
        zero_perturbation_change: zero_change,
        min_increase,
        perturbations: n_perturbations,
        all_increase: n_perturbations == 0 || min_increase > 0.0,
    })
}

/// True when every sampled perturbation of the optimal phases raises the cost.
pub fn energy_second_derivative_check(track: &EigenTrack, tau: f64, n_perturbations: usize) -> Result<bool> {
    Ok(minimality_scan(track, tau, n_perturbations, DEFAULT_MINIMALITY_SEED)?.all_increase)
}
