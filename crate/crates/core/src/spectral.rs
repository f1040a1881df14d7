//! Instantaneous eigenstate tracks over the normalized time `s in [0, 1]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qcore::{herm_eigen, CMatrix, CVector, C64, ZERO};

pub type MatrixFn = Arc<dyn Fn(f64) -> CMatrix + Send + Sync>;
pub type EigenFrameFn = Arc<dyn Fn(f64) -> EigenFrame + Send + Sync>;

/// Default number of grid points for track construction.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Smallest admissible spectral gap on the grid.
pub const MIN_GAP: f64 = 1e-8;

/// Eigen-data at a single `s`: energies, states and their `s`-derivatives,
/// all indexed by level.
#[derive(Clone, Debug)]
pub struct EigenFrame {
    pub energies: Vec<f64>,
    pub states: Vec<CVector>,
    pub derivs: Vec<CVector>,
}

/// A Hermitian generator `s -> H(s)` in angular-frequency units.
#[derive(Clone)]
pub struct HamiltonianTrack {
    dim: usize,
    generator: MatrixFn,
    analytic: Option<EigenFrameFn>,
    label: String,
}

impl fmt::Debug for HamiltonianTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianTrack")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

impl HamiltonianTrack {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        generator: impl Fn(f64) -> CMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            generator: Arc::new(generator),
            analytic: None,
            label: label.into(),
        }
    }

    /// Attaches closed-form eigen-data, enabling [`Gauge::Analytic`].
    pub fn with_analytic(mut self, frames: impl Fn(f64) -> EigenFrame + Send + Sync + 'static) -> Self {
        self.analytic = Some(Arc::new(frames));
        self
    }

    pub fn constant(label: impl Into<String>, h: CMatrix) -> Self {
        let dim = h.dim();
        Self::new(dim, label, move |_| h.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, s: f64) -> CMatrix {
        (self.generator)(s)
    }

    pub fn generator(&self) -> MatrixFn {
        self.generator.clone()
    }

    pub fn has_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn analytic_frame(&self, s: f64) -> Option<EigenFrame> {
        self.analytic.as_ref().map(|f| f(s))
    }

    /// Checks Hermiticity and dimension at every grid point, and that
    /// consecutive samples do not jump by more than `jump_tol` relative to
    /// the largest sampled norm.
    pub fn validate(&self, grid_points: usize, jump_tol: f64) -> Result<()> {
        let grid = uniform_grid(grid_points)?;
        let samples: Vec<CMatrix> = grid.iter().map(|&s| self.at(s)).collect();
        let mut scale: f64 = 0.0;
        for (m, &s) in samples.iter().zip(&grid) {
            if m.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: m.dim(),
                });
            }
            if !m.is_hermitian(crate::qcore::HERMITIAN_TOL) {
                return Err(Error::NotHermitian {
                    deviation: m.hermiticity_error(),
                    scale: m.max_abs(),
                });
            }
            if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("H({s}) of track `{}`", self.label)));
            }
            scale = scale.max(m.hs_norm());
        }
        for (w, s) in samples.windows(2).zip(&grid) {
            let jump = w[0].distance(&w[1]);
            if jump > jump_tol * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidArgument(format!(
                    "track `{}` is discontinuous near s = {s} (jump {jump:e})",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// Numerical eigenvectors, phase-aligned by maximal overlap between
    /// neighbouring grid points so that `<n|dn/ds> = 0`.
    ParallelTransport,
    /// Closed-form eigenstates supplied by the model.
    Analytic,
}

/// Gauge-fixed eigen-data sampled on an ascending grid of `s`.
#[derive(Clone, Debug)]
pub struct EigenTrack {
    grid: Vec<f64>,
    frames: Vec<EigenFrame>,
}

pub fn uniform_grid(points: usize) -> Result<Vec<f64>> {
    if points < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 grid points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|j| j as f64 / last).collect())
}

pub fn build_track(h: &HamiltonianTrack, grid_points: usize, gauge: Gauge) -> Result<EigenTrack> {
    let grid = uniform_grid(grid_points)?;
    match gauge {
        Gauge::Analytic => {
            let frames_fn = h.analytic.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "track `{}` has no closed-form eigenstates; use the parallel-transport gauge",
                    h.label
                ))
            })?;
            let frames = grid.iter().map(|&s| frames_fn(s)).collect();
            EigenTrack::from_frames(grid, frames)
        }
        Gauge::ParallelTransport => numeric_track(h, grid),
    }
}

fn numeric_track(h: &HamiltonianTrack, grid: Vec<f64>) -> Result<EigenTrack> {
    let dim = h.dim;
    let mut energies: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut states: Vec<Vec<CVector>> = Vec::with_capacity(grid.len());

    for (j, &s) in grid.iter().enumerate() {
        let eig = herm_eigen(&h.at(s))?;
        if eig.values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: eig.values.len(),
            });
        }
        let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap < MIN_GAP {
            return Err(Error::Degenerate { s, gap });
        }

        if j == 0 {
            energies.push(eig.values);
            states.push(eig.vectors.iter().map(fix_initial_phase).collect());
            continue;
        }

        let prev = &states[j - 1];
        let assignment = if near_crossing(&eig.values) {
            match_levels(prev, &eig.vectors)
        } else {
            (0..dim).collect()
        };
        let mut level_e = vec![0.0; dim];
        let mut level_v = vec![CVector::zeros(dim); dim];
        for (new_idx, &level) in assignment.iter().enumerate() {
            let v = &eig.vectors[new_idx];
            let overlap = prev[level].inner(v);
            let mag = overlap.norm();
            if mag < 0.5 {
                return Err(Error::GaugeDiscontinuity {
                    s0: grid[j - 1],
                    s1: s,
                    overlap: mag,
                });
            }
            level_e[level] = eig.values[new_idx];
            level_v[level] = v.scale(overlap.conj() / mag);
        }
        energies.push(level_e);
        states.push(level_v);
    }

    let derivs = central_differences(&grid, &states);
    let frames = energies
        .into_iter()
        .zip(states)
        .zip(derivs)
        .map(|((energies, states), derivs)| EigenFrame {
            energies,
            states,
            derivs,
        })
        .collect();
    Ok(EigenTrack { grid, frames })
}

/// Largest-magnitude component real and positive.
fn fix_initial_phase(v: &CVector) -> CVector {
    let pivot = v
        .entries()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ZERO);
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    v.scale(pivot.conj() / pivot.norm())
}

/// Relative gap below which ascending order may be overridden by overlaps.
const CLOSE_APPROACH: f64 = 1e-3;

fn near_crossing(values: &[f64]) -> bool {
    let width = (values[values.len() - 1] - values[0]).abs().max(f64::MIN_POSITIVE);
    values.windows(2).any(|w| (w[1] - w[0]) < CLOSE_APPROACH * width)
}

/// For each new eigenvector (ascending), the level index it continues.
/// Ascending order is kept unless maximal overlap says otherwise.
fn match_levels(prev: &[CVector], new: &[CVector]) -> Vec<usize> {
    let n = new.len();
    let overlaps: Vec<Vec<f64>> = new
        .iter()
        .map(|v| prev.iter().map(|p| p.inner(v).norm()).collect())
        .collect();
    let ascending_ok = (0..n).all(|k| {
        let row = &overlaps[k];
        row.iter().all(|&o| o <= row[k])
    });
    if ascending_ok {
        return (0..n).collect();
    }
    let mut taken = vec![false; n];
    let mut assignment = vec![usize::MAX; n];
    let mut pairs: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |l| (i, l)))
        .map(|(i, l)| (i, l, overlaps[i][l]))
        .collect();
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2));
    for (i, l, _) in pairs {
        if assignment[i] == usize::MAX && !taken[l] {
            assignment[i] = l;
            taken[l] = true;
        }
    }
    assignment
}

/// Fourth-order five-point differences (one-sided stencils near the ends);
/// second order when fewer than five points are available.
fn central_differences(grid: &[f64], states: &[Vec<CVector>]) -> Vec<Vec<CVector>> {
    let n = grid.len();
    let levels = states[0].len();
    let h = grid[1] - grid[0];
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(levels);
        for k in 0..levels {
            let f = |i: usize| &states[i][k];
            let d = if n < 5 {
                if j == 0 {
                    combine(&[(-1.5, f(0)), (2.0, f(1)), (-0.5, f(2))], h)
                } else if j == n - 1 {
                    combine(&[(1.5, f(n - 1)), (-2.0, f(n - 2)), (0.5, f(n - 3))], h)
                } else {
                    combine(&[(0.5, f(j + 1)), (-0.5, f(j - 1))], h)
                }
            } else {
                let w = |c: f64| c / 12.0;
                match j {
                    0 => combine(
                        &[
                            (w(-25.0), f(0)),
                            (w(48.0), f(1)),
                            (w(-36.0), f(2)),
                            (w(16.0), f(3)),
                            (w(-3.0), f(4)),
                        ],
                        h,
                    ),
                    1 => combine(
                        &[
                            (w(-3.0), f(0)),
                            (w(-10.0), f(1)),
                            (w(18.0), f(2)),
                            (w(-6.0), f(3)),
                            (w(1.0), f(4)),
                        ],
                        h,
                    ),
                    _ if j == n - 1 => combine(
                        &[
                            (w(25.0), f(n - 1)),
                            (w(-48.0), f(n - 2)),
                            (w(36.0), f(n - 3)),
                            (w(-16.0), f(n - 4)),
                            (w(3.0), f(n - 5)),
                        ],
                        h,
                    ),
                    _ if j == n - 2 => combine(
                        &[
                            (w(3.0), f(n - 1)),
                            (w(10.0), f(n - 2)),
                            (w(-18.0), f(n - 3)),
                            (w(6.0), f(n - 4)),
                            (w(-1.0), f(n - 5)),
                        ],
                        h,
                    ),
                    _ => combine(
                        &[
                            (w(1.0), f(j - 2)),
                            (w(-8.0), f(j - 1)),
                            (w(8.0), f(j + 1)),
                            (w(-1.0), f(j + 2)),
                        ],
                        h,
                    ),
                }
            };
            row.push(d);
        }
        out.push(row);
    }
    out
}

fn combine(terms: &[(f64, &CVector)], h: f64) -> CVector {
    let dim = terms[0].1.dim();
    let mut acc = CVector::zeros(dim);
    for (w, v) in terms {
        acc = acc.axpy(C64::new(w / h, 0.0), v);
    }
    acc
}

impl EigenTrack {
    /// Assembles a track from explicit per-grid-point frames. The grid must
    /// be ascending and every frame must carry the same number of levels.
    pub fn from_frames(grid: Vec<f64>, frames: Vec<EigenFrame>) -> Result<Self> {
        if grid.len() != frames.len() || grid.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "grid has {} points but {} frames were given",
                grid.len(),
                frames.len()
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("grid must be strictly ascending".into()));
        }
        let levels = frames[0].states.len();
        for f in &frames {
            if f.states.len() != levels || f.derivs.len() != levels || f.energies.len() != levels {
                return Err(Error::DimensionMismatch {
                    expected: levels,
                    found: f.states.len(),
                });
            }
        }
        for (f, &s) in frames.iter().zip(&grid) {
            let mut sorted = f.energies.clone();
            sorted.sort_by(f64::total_cmp);
            let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if gap < MIN_GAP {
                return Err(Error::Degenerate { s, gap });
            }
        }
        Ok(Self { grid, frames })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.frames[0].states.len()
    }

    pub fn dim(&self) -> usize {
        self.frames[0].states[0].dim()
    }

    pub fn frame(&self, j: usize) -> &EigenFrame {
        &self.frames[j]
    }

    pub fn frames(&self) -> &[EigenFrame] {
        &self.frames
    }

    pub fn energy(&self, j: usize, level: usize) -> f64 {
        self.frames[j].energies[level]
    }

    pub fn state(&self, j: usize, level: usize) -> &CVector {
        &self.frames[j].states[level]
    }

    pub fn deriv(&self, j: usize, level: usize) -> &CVector {
        &self.frames[j].derivs[level]
    }

    /// `C_km = <k(s_j)| d_s m(s_j)>` at grid index `j`.
    pub fn overlap_table_at(&self, j: usize) -> CMatrix {
        let f = &self.frames[j];
        let n = f.states.len();
        let mut c = CMatrix::zeros(n);
        for k in 0..n {
            for m in 0..n {
                c[(k, m)] = f.states[k].inner(&f.derivs[m]);
            }
        }
        c
    }

    /// Overlap table at arbitrary `s`, linearly interpolated between grid
    /// points.
    pub fn overlap_table(&self, s: f64) -> Result<CMatrix> {
        let (j, w) = self.locate(s)?;
        let a = self.overlap_table_at(j);
        if w == 0.0 {
            return Ok(a);
        }
        let b = self.overlap_table_at(j + 1);
        let mut out = a.scale_real(1.0 - w);
        out.add_scaled(&b, C64::new(w, 0.0));
        Ok(out)
    }

    /// Grid index `j` and weight `w` such that `s = (1 - w) s_j + w s_{j+1}`.
    pub fn locate(&self, s: f64) -> Result<(usize, f64)> {
        let first = self.grid[0];
        let last = *self.grid.last().unwrap();
        if !(first..=last).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "s = {s} outside the track range [{first}, {last}]"
            )));
        }
        let j = match self.grid.binary_search_by(|g| g.total_cmp(&s)) {
            Ok(j) => return Ok((j.min(self.grid.len() - 1), 0.0)),
            Err(j) => j - 1,
        };
        let w = (s - self.grid[j]) / (self.grid[j + 1] - self.grid[j]);
        Ok((j, w))
    }

    /// Multiplies each state by `exp(i chi_n(s))`, where `phase(n, s)`
    /// returns `(chi_n(s), d chi_n / ds)`. Derivatives transform exactly.
    pub fn regauge(&self, phase: impl Fn(usize, f64) -> (f64, f64)) -> EigenTrack {
        let frames = self
            .frames
            .iter()
            .zip(&self.grid)
            .map(|(f, &s)| {
                let mut states = Vec::with_capacity(f.states.len());
                let mut derivs = Vec::with_capacity(f.states.len());
                for (n, (v, d)) in f.states.iter().zip(&f.derivs).enumerate() {
                    let (chi, dchi) = phase(n, s);
                    let u = C64::from_polar(1.0, chi);
                    states.push(v.scale(u));
                    derivs.push(d.scale(u).axpy(C64::new(0.0, dchi) * u, v));
                }
                EigenFrame {
                    energies: f.energies.clone(),
                    states,
                    derivs,
                }
            })
            .collect();
        EigenTrack {
            grid: self.grid.clone(),
            frames,
        }
    }

    /// Largest deviation from orthonormality over the grid.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for f in &self.frames {
            for (k, a) in f.states.iter().enumerate() {
                for (l, b) in f.states.iter().enumerate() {
                    let want = if k == l { 1.0 } else { 0.0 };
                    err = err.max((a.inner(b) - C64::new(want, 0.0)).norm());
                }
            }
        }
        err
    }

    /// Largest `|<k|dm> + <dk|m>^*|`, zero for an exact track.
    pub fn anti_hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for j in 0..self.len() {
            let c = self.overlap_table_at(j);
            err = err.max(c.hermitian_part().max_abs());
        }
        err
    }
}
