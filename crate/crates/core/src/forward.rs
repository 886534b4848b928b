//! Forward solvers for `(d_t^alpha - d_xx) u = rho(t) g(x)` on `(0, 1)` with
//! homogeneous Dirichlet conditions.
//!
//! The production solver is implicit L1 time stepping with central
//! differences in space. [`solve_homogeneous_spectral`] evaluates the
//! truncated eigenfunction expansion with Mittag-Leffler time factors and
//! serves as an independent oracle.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::fraccalc::{mittag_leffler, FractionalOrder, TimeGrid, TimeSeries};
use crate::{Error, Result};

/// Uniform grid `x_j = j / N` on `[0, 1]`, boundary nodes included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceGrid {
    cells: usize,
}

impl SpaceGrid {
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Domain(format!(
                "space grid needs at least two cells, got {cells}"
            )));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        1.0 / self.cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.cells as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.node(j))
    }

    /// Index of the node at `x`. Points between nodes are rejected rather
    /// than interpolated.
    pub fn node_index(&self, x: f64) -> Result<usize> {
        let pos = x * self.cells as f64;
        let idx = pos.round();
        if !(0.0..=self.cells as f64).contains(&idx) || (pos - idx).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "x = {x} is not a node of the {}-cell grid",
                self.cells
            )));
        }
        Ok(idx as usize)
    }
}

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Spatial factor `g` sampled on a [`SpaceGrid`], optionally with the
/// analytic function it was sampled from.
#[derive(Clone)]
pub struct SpatialProfile {
    grid: SpaceGrid,
    values: Vec<f64>,
    analytic: Option<ProfileFn>,
}

impl fmt::Debug for SpatialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialProfile")
            .field("grid", &self.grid)
            .field("values", &self.values)
            .field("analytic", &self.analytic.is_some())
            .finish()
    }
}

/// `sin(2 pi x - pi/2)` on `(1/4, 3/4)`, zero elsewhere.
pub fn sine_bump(x: f64) -> f64 {
    if x > 0.25 && x < 0.75 {
        (2.0 * PI * x - PI / 2.0).sin()
    } else {
        0.0
    }
}

impl SpatialProfile {
    /// Nodal samples. Boundary values must vanish.
    pub fn from_samples(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "profile has {} values but the space grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let (first, last) = (values[0], values[grid.cells()]);
        if first.abs() > 1e-12 || last.abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "profile must vanish on the boundary, got g(0)={first}, g(1)={last}"
            )));
        }
        Ok(Self {
            grid,
            values,
            analytic: None,
        })
    }

    /// Samples `f` at the nodes and keeps `f` for spectral projections.
    pub fn from_fn(
        grid: SpaceGrid,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let mut profile = Self::from_samples(grid, grid.nodes().map(&f).collect())?;
        profile.analytic = Some(Arc::new(f));
        Ok(profile)
    }

    /// Profile sampled from [`sine_bump`]; kinks land on nodes when 4 divides the cell count.
    pub fn sine_bump(grid: SpaceGrid) -> Result<Self> {
        Self::from_fn(grid, sine_bump)
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `g(x)`: the analytic form if known, else the piecewise-linear interpolant.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(f) = &self.analytic {
            return f(x);
        }
        let pos = (x.clamp(0.0, 1.0) * self.grid.cells() as f64).min(self.grid.cells() as f64);
        let j = (pos.floor() as usize).min(self.grid.cells() - 1);
        let w = pos - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }
}

/// Nodal values `u(x_j, t_l)` stored row by row in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    space: SpaceGrid,
    time: TimeGrid,
    values: Vec<f64>,
}

impl SpaceTimeField {
    fn zeros(space: SpaceGrid, time: TimeGrid) -> Self {
        Self {
            space,
            time,
            values: vec![0.0; space.len() * time.len()],
        }
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn at(&self, l: usize, j: usize) -> f64 {
        self.values[l * self.space.len() + j]
    }

    /// Spatial profile at time node `l`.
    pub fn row(&self, l: usize) -> &[f64] {
        let n = self.space.len();
        &self.values[l * n..(l + 1) * n]
    }

    fn row_mut(&mut self, l: usize) -> &mut [f64] {
        let n = self.space.len();
        &mut self.values[l * n..(l + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest nodal difference from another field on the same grids.
    pub fn max_abs_diff(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::GridMismatch(
                "fields live on different space grids".into(),
            ));
        }
        self.time.ensure_same(&other.time, "field comparison")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// `u(x0, t_l)` for every time node. `x0` must be a grid node.
pub fn probe(field: &SpaceTimeField, x0: f64) -> Result<TimeSeries> {
    let j = field.space.node_index(x0)?;
    let values = (0..field.time.len()).map(|l| field.at(l, j)).collect();
    TimeSeries::new(field.time, values)
}

/// Dirichlet eigenpairs `lambda_n = (n pi)^2`, `phi_n = sqrt(2) sin(n pi x)`,
/// `n = 1..=modes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralBasis {
    modes: usize,
    refine: usize,
}

impl SpectralBasis {
    /// Simpson panels per space cell used for the projections.
    pub const DEFAULT_REFINE: usize = 64;

    pub fn new(modes: usize) -> Result<Self> {
        Self::with_refinement(modes, Self::DEFAULT_REFINE)
    }

    pub fn with_refinement(modes: usize, refine: usize) -> Result<Self> {
        if modes == 0 || refine == 0 {
            return Err(Error::Domain(
                "spectral basis needs at least one mode and one panel per cell".into(),
            ));
        }
        Ok(Self { modes, refine })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        let k = n as f64 * PI;
        k * k
    }

    pub fn eigenfunction(&self, n: usize, x: f64) -> f64 {
        SQRT_2 * (n as f64 * PI * x).sin()
    }

    /// `(g, phi_n)` for `n = 1..=modes` by composite Simpson.
    pub fn coefficients(&self, g: &SpatialProfile) -> Vec<f64> {
        let panels = 2 * ((self.refine * g.grid().cells()).div_ceil(2));
        let h = 1.0 / panels as f64;
        let samples: Vec<(f64, f64)> = (0..=panels)
            .map(|i| {
                let w = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let x = i as f64 * h;
                (x, w * h / 3.0 * g.eval(x))
            })
            .collect();
        (1..=self.modes)
            .map(|n| {
                samples
                    .iter()
                    .map(|&(x, wg)| wg * self.eigenfunction(n, x))
                    .sum()
            })
            .collect()
    }
}

/// Truncated expansion `v(x, t) = sum E_{alpha,1}(-lambda_n t^alpha) (g, phi_n) phi_n(x)`
/// evaluated at every node, with `t^alpha` taken exactly.
pub fn solve_homogeneous_spectral(
    g: &SpatialProfile,
    alpha: FractionalOrder,
    time: TimeGrid,
    basis: &SpectralBasis,
) -> Result<SpaceTimeField> {
    let space = *g.grid();
    let a = alpha.value();
    let coeffs = basis.coefficients(g);
    let mut field = SpaceTimeField::zeros(space, time);
    for (idx, &c) in coeffs.iter().enumerate() {
        let n = idx + 1;
        let lambda = basis.eigenvalue(n);
        let shape: Vec<f64> = space
            .nodes()
            .map(|x| c * basis.eigenfunction(n, x))
            .collect();
        for l in 0..time.len() {
            let t = time.node(l);
            let e = if l == 0 {
                1.0
            } else {
                mittag_leffler(a, 1.0, -lambda * t.powf(a))?
            };
            for (u, s) in field.row_mut(l).iter_mut().zip(&shape) {
                *u += e * s;
            }
        }
    }
    // the sine basis vanishes at the ends, but rounding does not
    for l in 0..time.len() {
        let row = field.row_mut(l);
        row[0] = 0.0;
        row[space.cells()] = 0.0;
    }
    Ok(field)
}

/// Homogeneous problem `(d_t^alpha - d_xx) v = 0`, `v(., 0) = g`, by implicit
/// L1 stepping. At `alpha = 1` the stepper is BDF2 (see [`solve_inhomogeneous_l1`]).
pub fn solve_homogeneous_l1(
    g: &SpatialProfile,
    alpha: FractionalOrder,
    time: TimeGrid,
) -> Result<SpaceTimeField> {
    march(*g.grid(), Some(g.values()), None, alpha, time)
}

/// Inhomogeneous problem `(d_t^alpha - d_xx) u = rho(t) g(x)`, `u(., 0) = 0`.
///
/// Each step solves `(c I - D_h) U^l = c U^{l-1} - c sum_{j>=1} b_j (U^{l-j} - U^{l-j-1}) + rho_l g`
/// with `c = tau^(-alpha) / Gamma(2 - alpha)` and `D_h` the three-point
/// Laplacian. The L1 scheme is only first order at `alpha = 1`, so the
/// classical case uses BDF2 started by an extrapolated pair of backward
/// Euler half steps instead.
pub fn solve_inhomogeneous_l1(
    g: &SpatialProfile,
    rho: &TimeSeries,
    alpha: FractionalOrder,
    time: TimeGrid,
) -> Result<SpaceTimeField> {
    time.ensure_same(rho.grid(), "source amplitude vs time grid")?;
    march(
        *g.grid(),
        None,
        Some((rho.values(), g.values())),
        alpha,
        time,
    )
}

fn march(
    space: SpaceGrid,
    initial: Option<&[f64]>,
    source: Option<(&[f64], &[f64])>,
    alpha: FractionalOrder,
    time: TimeGrid,
) -> Result<SpaceTimeField> {
    let mut field = SpaceTimeField::zeros(space, time);
    if let Some(g) = initial {
        field.row_mut(0).copy_from_slice(g);
    }
    let interior = space.cells() - 1;
    let inv_h2 = 1.0 / (space.step() * space.step());
    let forcing = |l: f64| -> Vec<f64> {
        // l may be a half index at the classical start-up step
        match source {
            Some((rho, g)) => {
                let lo = l.floor() as usize;
                let amp = if l == lo as f64 {
                    rho[lo]
                } else {
                    0.5 * (rho[lo] + rho[lo + 1])
                };
                g[1..=interior].iter().map(|gx| amp * gx).collect()
            }
            None => vec![0.0; interior],
        }
    };

    if alpha.is_classical() {
        march_bdf2(&mut field, interior, inv_h2, forcing);
    } else {
        march_l1(&mut field, interior, inv_h2, alpha.value(), forcing);
    }
    if let Some(index) = field.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(field)
}

fn march_l1(
    field: &mut SpaceTimeField,
    interior: usize,
    inv_h2: f64,
    alpha: f64,
    forcing: impl Fn(f64) -> Vec<f64>,
) {
    let time = field.time;
    let c = time.step().powf(-alpha) / gamma(2.0 - alpha);
    let b: Vec<f64> = (0..=time.steps())
        .map(|j| ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha))
        .collect();
    let system = Tridiagonal::new(interior, c + 2.0 * inv_h2, -inv_h2);
    let mut rhs = vec![0.0; interior];
    for l in 1..time.len() {
        let f = forcing(l as f64);
        for i in 0..interior {
            let mut acc = field.at(l - 1, i + 1);
            for (j, bj) in b.iter().enumerate().take(l).skip(1) {
                acc -= bj * (field.at(l - j, i + 1) - field.at(l - j - 1, i + 1));
            }
            rhs[i] = c * acc + f[i];
        }
        system.solve(&mut rhs);
        field.row_mut(l)[1..=interior].copy_from_slice(&rhs);
    }
}

fn march_bdf2(
    field: &mut SpaceTimeField,
    interior: usize,
    inv_h2: f64,
    forcing: impl Fn(f64) -> Vec<f64>,
) {
    let time = field.time;
    let tau = time.step();
    let euler = |dt: f64| Tridiagonal::new(interior, 1.0 / dt + 2.0 * inv_h2, -inv_h2);
    let (half, full) = (euler(0.5 * tau), euler(tau));
    let step = |system: &Tridiagonal, dt: f64, u: &[f64], f: &[f64]| -> Vec<f64> {
        let mut rhs: Vec<f64> = u.iter().zip(f).map(|(u, f)| u / dt + f).collect();
        system.solve(&mut rhs);
        rhs
    };

    let u0 = field.row(0)[1..=interior].to_vec();
    let (f_half, f_one) = (forcing(0.5), forcing(1.0));
    let fine = step(
        &half,
        0.5 * tau,
        &step(&half, 0.5 * tau, &u0, &f_half),
        &f_one,
    );
    let coarse = step(&full, tau, &u0, &f_one);
    let u1: Vec<f64> = fine.iter().zip(&coarse).map(|(a, b)| 2.0 * a - b).collect();
    field.row_mut(1)[1..=interior].copy_from_slice(&u1);

    let bdf = Tridiagonal::new(interior, 1.5 / tau + 2.0 * inv_h2, -inv_h2);
    for l in 2..time.len() {
        let f = forcing(l as f64);
        let mut rhs: Vec<f64> = (0..interior)
            .map(|i| (4.0 * field.at(l - 1, i + 1) - field.at(l - 2, i + 1)) / (2.0 * tau) + f[i])
            .collect();
        bdf.solve(&mut rhs);
        field.row_mut(l)[1..=interior].copy_from_slice(&rhs);
    }
}

/// Constant symmetric tridiagonal matrix, factorised once (Thomas algorithm).
struct Tridiagonal {
    off: f64,
    /// modified super-diagonal `c'_i`
    upper: Vec<f64>,
    /// pivots `d_i - off * c'_{i-1}`
    pivot: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize, diag: f64, off: f64) -> Self {
        let mut upper = Vec::with_capacity(n);
        let mut pivot = Vec::with_capacity(n);
        let mut prev = 0.0;
        for _ in 0..n {
            let p = diag - off * prev;
            // strict diagonal dominance keeps every pivot above diag - 2|off| > 0
            assert!(p > 0.0, "tridiagonal system lost diagonal dominance");
            pivot.push(p);
            prev = off / p;
            upper.push(prev);
        }
        Self { off, upper, pivot }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let mut prev = 0.0;
        for (r, p) in rhs.iter_mut().zip(&self.pivot) {
            *r = (*r - self.off * prev) / p;
            prev = *r;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}
