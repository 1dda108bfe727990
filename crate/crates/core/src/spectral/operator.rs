use serde::{Deserialize, Serialize};

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};
use crate::fields::RadialGrid;
use crate::groundstate::SolitonProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `-½Δ + ω - 3φ² + 5φ⁴`
    L1,
    /// `-½Δ + ω - φ² + φ⁴`
    L2,
}

impl OperatorKind {
    /// Potential `V(φ)` without the `-½Δ` part.
    pub fn potential(self, omega: f64, quintic: f64, phi: f64) -> f64 {
        let p2 = phi * phi;
        match self {
            Self::L1 => omega - 3.0 * p2 + 5.0 * quintic * p2 * p2,
            Self::L2 => omega - p2 + quintic * p2 * p2,
        }
    }
}

/// Centrifugal coefficient `ℓ(ℓ + d - 2)`; in the plane this is `ℓ²`.
pub fn centrifugal(dim: usize, ell: usize) -> f64 {
    let l = ell as f64;
    l * (l + dim as f64 - 2.0)
}

/// One angular sector of `L1` or `L2`, discretized by finite volumes on
/// the radial nodes and symmetrized with the square root of the cell
/// volumes: `matrix = W^{1/2} A W^{-1/2}` where `A` acts on nodal values
/// `f_j` and `W` holds the cells' `r^{d-1}` measure.
///
/// `f(r_max) = 0`. At the origin the flux vanishes for `ℓ = 0`; for
/// `ℓ ≥ 1` the origin node is removed (`f(0) = 0`).
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub omega: f64,
    pub dim: usize,
    pub ell: usize,
    pub kind: OperatorKind,
    pub grid: RadialGrid,
    /// Index of the first unknown on `grid`.
    pub first: usize,
    pub matrix: SymTridiagonal,
    /// Measure of each unknown's cell, `∫ r^{d-1} dr` over it.
    pub weights: Vec<f64>,
    /// Potential at each unknown (centrifugal term excluded).
    pub potential: Vec<f64>,
}

impl SectorOperator {
    /// Radii of the unknowns.
    pub fn radii(&self) -> Vec<f64> {
        (self.first..self.first + self.weights.len()).map(|j| self.grid.node(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Maps nodal values to the symmetric variable `W^{1/2} f`.
    pub fn to_symmetric(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.weights).map(|(v, w)| v * w.sqrt()).collect()
    }

    pub fn from_symmetric(&self, psi: &[f64]) -> Vec<f64> {
        psi.iter().zip(&self.weights).map(|(v, w)| v / w.sqrt()).collect()
    }

    /// Samples a radial function at the unknowns.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.radii().into_iter().map(f).collect()
    }

    /// `‖A f‖ / ‖f‖` in the weighted norm for `f` given at the unknowns.
    pub fn residual(&self, f: &[f64]) -> f64 {
        let psi = self.to_symmetric(f);
        let apsi = self.matrix.apply(&psi);
        let num = apsi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let den = psi.iter().map(|v| v * v).sum::<f64>().sqrt();
        num / den
    }

    pub fn potential_sup(&self) -> f64 {
        self.potential.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Volume `∫_a^b r^{d-1} dr` (without the sphere area).
fn shell(dim: usize, a: f64, b: f64) -> f64 {
    let d = dim as i32;
    (b.powi(d) - a.powi(d)) / dim as f64
}

/// Node spacing of the operator grid relative to the profile's.
pub const GRID_REFINEMENT: usize = 2;

/// Sector operator on the profile's radial extent with the node spacing
/// divided by [`GRID_REFINEMENT`].
pub fn build_sector(profile: &SolitonProfile, ell: usize, kind: OperatorKind) -> Result<SectorOperator> {
    let n = (profile.grid.len() - 1) * GRID_REFINEMENT + 1;
    build_sector_on(profile, ell, kind, RadialGrid::new(profile.grid.r_max(), n)?)
}

/// As [`build_sector`] on any radial grid, resampling `φ` by its Hermite
/// interpolant.
pub fn build_sector_on(
    profile: &SolitonProfile,
    ell: usize,
    kind: OperatorKind,
    grid: RadialGrid,
) -> Result<SectorOperator> {
    let dim = profile.dim;
    if dim == 1 && ell > 1 {
        return Err(Error::InvalidArgument("the line has only even (ℓ = 0) and odd (ℓ = 1) sectors".into()));
    }
    let n = grid.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("radial grid with {n} nodes is too coarse")));
    }
    let h = grid.spacing();
    let first = if ell == 0 { 0 } else { 1 };
    // The last node carries the Dirichlet condition.
    let last = n - 2;
    let q = profile.nonlinearity.quintic_coefficient();
    let area = |r: f64| r.powi(dim as i32 - 1);

    let mut weights = Vec::with_capacity(last + 1 - first);
    let mut potential = Vec::with_capacity(last + 1 - first);
    let mut diag = Vec::with_capacity(last + 1 - first);
    let mut off = Vec::with_capacity(last - first);
    for j in first..=last {
        let r = grid.node(j);
        let lo = (r - 0.5 * h).max(0.0);
        let w = shell(dim, lo, r + 0.5 * h);
        let flux_out = area(r + 0.5 * h) / h;
        let flux_in = if j == 0 { 0.0 } else { area(r - 0.5 * h) / h };
        let v = kind.potential(profile.omega, q, profile.value_at(r));
        // `c/(2r²)` in the form that the discrete radial Laplacian of the
        // regular free solution `r^ℓ` balances exactly; it differs from
        // `c/(2r²)` by O(h²/r²) and keeps the first cells consistent.
        let centripetal = if ell == 0 {
            0.0
        } else {
            let pow = |x: f64| x.powi(ell as i32);
            let (up, down) = (pow(r + h) - pow(r), pow(r) - pow(r - h));
            0.5 * (area(r + 0.5 * h) * up - area(r - 0.5 * h) * down) / (h * w * pow(r))
        };
        weights.push(w);
        potential.push(v);
        diag.push(0.5 * (flux_out + flux_in) / w + v + centripetal);
    }
    for j in first..last {
        let i = j - first;
        let r_half = grid.node(j) + 0.5 * h;
        off.push(-0.5 * area(r_half) / h / (weights[i] * weights[i + 1]).sqrt());
    }
    Ok(SectorOperator {
        omega: profile.omega,
        dim,
        ell,
        kind,
        grid,
        first,
        matrix: SymTridiagonal::new(diag, off)?,
        weights,
        potential,
    })
}

/// Lowest `k` eigenvalues in ascending order.
pub fn eigen_bottom(op: &SectorOperator, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    (0..k.min(op.len())).map(|i| op.matrix.eigenvalue(i)).collect()
}

/// Eigenvalue and nodal eigenvector (unit weighted norm, positive at its
/// largest entry) of the `index`-th mode, indexed on the unknowns.
pub fn eigenpair(op: &SectorOperator, index: usize) -> Result<(f64, Vec<f64>)> {
    let lambda = op.matrix.eigenvalue(index)?;
    let psi = op.matrix.eigenvector(lambda)?;
    Ok((lambda, op.from_symmetric(&psi)))
}

/// Eigenvalues whose magnitude is below this fraction of `max|V|` are
/// treated as zero modes by [`negative_count`].
pub const ZERO_MODE_TOL: f64 = 1e-6;

/// Number of eigenvalues below `-ZERO_MODE_TOL · max|V|` by a single Sturm
/// count; discretization leaves exact zero modes a hair off zero.
pub fn negative_count(op: &SectorOperator) -> usize {
    op.matrix.count_below(-ZERO_MODE_TOL * op.potential_sup())
}
