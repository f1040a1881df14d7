//! Energy cost accounting with the time-averaged Hilbert-Schmidt norm
//! `Sigma(tau) = int_0^1 ||H(s)|| ds`, and the equal-resource conditions that
//! match adiabatic and shortcut protocols.
//!
//! The cost is not invariant under a shift of the zero of energy. Every
//! built-in Hamiltonian is traceless; user models should remove their trace
//! before comparing costs.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{GateSpec, LZModel};
use crate::qcore::CMatrix;

pub const DEFAULT_NODES: usize = 2001;

/// Composite Simpson rule on `[0, 1]`. An even node count is bumped to the
/// next odd one.
pub fn simpson(f: impl Fn(f64) -> f64, n_nodes: usize) -> Result<f64> {
    if n_nodes < 11 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 11 nodes, got {n_nodes}"
        )));
    }
    let n = if n_nodes.is_multiple_of(2) {
        n_nodes + 1
    } else {
        n_nodes
    };
    let h = 1.0 / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|j| f(j as f64 * h)).collect();
    simpson_samples(&values, h)
}

/// Simpson's rule over uniformly spaced samples. With an odd number of
/// intervals the last three are closed with the 3/8 rule.
pub fn simpson_samples(values: &[f64], h: f64) -> Result<f64> {
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("integrand sample {bad} is {}", values[bad])));
    }
    let n = values.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 samples, got {n}")));
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, 0.0)
    } else {
        let k = intervals - 3;
        let t = 3.0 * h / 8.0 * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
        (k, t)
    };
    let mut acc = values[0] + values[even_end];
    for j in 1..even_end {
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * values[j];
    }
    Ok(acc * h / 3.0 + tail)
}

/// `int_0^1 ||H(s)|| ds`. `h` must already carry its `tau` dependence.
pub fn cost_quadrature(h: impl Fn(f64) -> CMatrix, n_nodes: usize) -> Result<f64> {
    simpson(|s| h(s).hs_norm(), n_nodes)
}

/// Cost together with the change observed when the node count is doubled.
pub fn cost_quadrature_checked(h: impl Fn(f64) -> CMatrix, n_nodes: usize) -> Result<(f64, f64)> {
    let coarse = cost_quadrature(&h, n_nodes)?;
    let fine = cost_quadrature(&h, 2 * n_nodes - 1)?;
    Ok((fine, (fine - coarse).abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyCostReport {
    pub tau: f64,
    pub sigma_ad: f64,
    pub sigma_sa: f64,
    /// Shortcut cost including the mean number of repetitions (equal to
    /// `sigma_sa` for deterministic protocols).
    pub sigma_sa_avg: f64,
    /// `sigma_ad / sigma_sa_avg`
    pub ratio: f64,
    /// Hilbert-Schmidt cost of the assembled shortcut operator, when it is
    /// computed independently of `sigma_sa`.
    pub sigma_sa_direct: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilisticCostReport {
    pub phi0: f64,
    /// `1 / sin^2(phi0 / 2)`
    pub n_avg: f64,
    pub sigma_single: f64,
    pub sigma_avg: f64,
}

/// `int_0^1 |sec(theta(s))| ds`
pub fn sec_integral(m: &LZModel) -> Result<f64> {
    if m.is_linear() {
        let t = m.theta0;
        if t.abs() < 1e-8 {
            // series of ln(sec t + tan t) / t
            return Ok(1.0 + t * t / 6.0);
        }
        return Ok(((1.0 / t.cos()) + t.tan()).ln() / t);
    }
    simpson(|s| (1.0 / m.theta(s).cos()).abs(), 20_001)
}

/// Closed-form Landau-Zener costs.
pub fn lz_costs(m: &LZModel, tau: f64) -> Result<EnergyCostReport> {
    check_tau(tau)?;
    let sigma_ad = SQRT_2 * m.omega.abs() * sec_integral(m)?;
    let sigma_sa = m.theta(1.0).abs() / (SQRT_2 * tau);
    Ok(EnergyCostReport {
        tau,
        sigma_ad,
        sigma_sa,
        sigma_sa_avg: sigma_sa,
        ratio: sigma_ad / sigma_sa,
        sigma_sa_direct: None,
    })
}

/// Mean number of runs until the auxiliary qubit is found in `|1>`.
pub fn mean_repetitions(phi0: f64) -> Result<f64> {
    let p = (phi0 / 2.0).sin().powi(2);
    if !(phi0 > 0.0) || p <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "phi0 = {phi0} gives zero success probability"
        )));
    }
    Ok(1.0 / p)
}

/// Gate costs: adiabatic `2 omega` (times `sqrt 2` when controlled) and the
/// single-run shortcut cost `(phi0 / omega tau) Sigma_ad`, scaled by the mean
/// number of repetitions. The Hilbert-Schmidt norm of the assembled
/// counter-diabatic operator is reported alongside in `sigma_sa_direct`.
pub fn gate_costs(g: &GateSpec, tau: f64) -> Result<(ProbabilisticCostReport, EnergyCostReport)> {
    g.validate()?;
    check_tau(tau)?;
    let factor = if g.controlled { SQRT_2 } else { 1.0 };
    let sigma_ad = 2.0 * g.omega * factor;
    let sigma_single = g.phi0 / (g.omega * tau) * sigma_ad;
    let n_avg = mean_repetitions(g.phi0)?;
    let sigma_avg = n_avg * sigma_single;
    let direct = crate::models::gate_cd_hamiltonian(g, tau)?.hs_norm();
    Ok((
        ProbabilisticCostReport {
            phi0: g.phi0,
            n_avg,
            sigma_single,
            sigma_avg,
        },
        EnergyCostReport {
            tau,
            sigma_ad,
            sigma_sa: sigma_single,
            sigma_sa_avg: sigma_avg,
            ratio: sigma_ad / sigma_avg,
            sigma_sa_direct: Some(direct),
        },
    ))
}

/// `phi0 csc^2(phi0 / 2)`, the equal-resource value of `omega tau`.
pub fn phi0_objective(phi0: f64) -> f64 {
    phi0 / (phi0 / 2.0).sin().powi(2)
}

/// `d/dphi0 [phi0 csc^2(phi0/2)] = csc^2(phi0/2) (1 - phi0 cot(phi0/2))`
pub fn phi0_objective_derivative(phi0: f64) -> f64 {
    let half = phi0 / 2.0;
    (1.0 - phi0 * half.cos() / half.sin()) / half.sin().powi(2)
}

/// Minimizer of `phi0 csc^2(phi0/2)` on `(0, pi]`, i.e. the root of
/// `tan(phi0/2) = phi0`, found by bisection on `[2, 3]`.
pub fn optimal_phi0() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    let g = |x: f64| (x / 2.0).tan() - x;
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Model family whose adiabatic frequency is tuned to match the shortcut cost.
#[derive(Clone, Debug)]
pub enum ResourceFamily {
    Lz(LZModel),
    /// Probabilistic shortcut with the given `phi0`; the controlled factor
    /// cancels in the ratio.
    Gate {
        phi0: f64,
    },
}

/// `omega` making `R(tau) = 1`.
pub fn equal_resource_omega(family: &ResourceFamily, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    match family {
        ResourceFamily::Lz(m) => Ok(m.theta(1.0).abs() / (2.0 * tau * sec_integral(m)?)),
        ResourceFamily::Gate { phi0 } => {
            mean_repetitions(*phi0)?;
            Ok(phi0_objective(*phi0) / tau)
        }
    }
}

/// Mean of the equal-resource frequencies over a set of total times.
pub fn omega_r_average(taus: &[f64], family: &ResourceFamily) -> Result<f64> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("empty tau list".into()));
    }
    let mut acc = 0.0;
    for &t in taus {
        acc += equal_resource_omega(family, t)?;
    }
    Ok(acc / taus.len() as f64)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}
