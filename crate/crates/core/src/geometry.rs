//! Beam displacement, the Lipschitz correction barrier, the shear-mapped grid
//! and zero extension onto an ambient lattice.

use crate::discrete::FluidState;
use crate::error::{Error, Result};

/// Deflection on uniformly spaced nodes x_i = gamma_lo + i h of Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDisplacement {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub values: Vec<f64>,
}

impl BeamDisplacement {
    pub fn new(gamma_lo: f64, gamma_hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(gamma_lo > 0.0 && gamma_lo < gamma_hi && gamma_hi < 1.0) {
            return Err(Error::invalid(format!(
                "interface ({gamma_lo}, {gamma_hi}) must satisfy 0 < lo < hi < 1"
            )));
        }
        if values.len() < 2 {
            return Err(Error::invalid("beam needs at least 2 nodes"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("beam values must be finite"));
        }
        Ok(Self {
            gamma_lo,
            gamma_hi,
            values,
        })
    }

    pub fn zeros(gamma_lo: f64, gamma_hi: f64, n_nodes: usize) -> Result<Self> {
        Self::new(gamma_lo, gamma_hi, vec![0.0; n_nodes])
    }

    pub fn from_fn(
        gamma_lo: f64,
        gamma_hi: f64,
        n_nodes: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let h = (gamma_hi - gamma_lo) / (n_nodes.max(2) - 1) as f64;
        let values = (0..n_nodes).map(|i| f(gamma_lo + i as f64 * h)).collect();
        Self::new(gamma_lo, gamma_hi, values)
    }

    pub fn n_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        (self.gamma_hi - self.gamma_lo) / (self.values.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.gamma_lo + i as f64 * self.h()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// Piecewise linear evaluation, zero outside Γ.
    pub fn sample(&self, x: f64) -> f64 {
        if x <= self.gamma_lo || x >= self.gamma_hi {
            return 0.0;
        }
        let t = (x - self.gamma_lo) / self.h();
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let s = t - i as f64;
        (1.0 - s) * self.values[i] + s * self.values[i + 1]
    }

    /// w = 0 at both ends and the ghost-closure slope vanishes.
    pub fn is_clamped(&self, tol: f64) -> bool {
        let n = self.values.len();
        self.values[0].abs() <= tol && self.values[n - 1].abs() <= tol
    }
}

/// Sup norm plus sup of the interior central-difference slope.
pub fn lipschitz_norm(w: &BeamDisplacement) -> f64 {
    let v = &w.values;
    let h = w.h();
    let mut slope: f64 = 0.0;
    for i in 1..v.len().saturating_sub(1) {
        slope = slope.max(((v[i + 1] - v[i - 1]) / (2.0 * h)).abs());
    }
    w.max_abs() + slope
}

pub fn f_cor(x: f64) -> f64 {
    if x <= 0.25 {
        1.0
    } else {
        4.0 * x
    }
}

/// w / f_cor(lip(w)); returns an exact copy when the correction is inactive.
pub fn correct_displacement(w: &BeamDisplacement) -> BeamDisplacement {
    let f = f_cor(lipschitz_norm(w));
    if f == 1.0 {
        return w.clone();
    }
    BeamDisplacement {
        values: w.values.iter().map(|v| v / f).collect(),
        ..w.clone()
    }
}

/// Heights, in z, of the inflow and outflow strips plus the cell counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLayout {
    pub nx: usize,
    pub nz: usize,
    pub sigma_in: (f64, f64),
    pub sigma_out: (f64, f64),
}

/// Logically rectangular grid of 𝒪(ŵ) under z = ŵ(x) + η(1 − ŵ(x)).
/// Nodes are numbered k = j (nx + 1) + i.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedGrid {
    pub nx: usize,
    pub nz: usize,
    pub gamma: (f64, f64),
    /// Column range of Γ (inclusive).
    pub gamma_cols: (usize, usize),
    pub w_hat: Vec<f64>,
    pub jac: Vec<f64>,
    /// Node rows (inclusive) of Σ_in on x = 0.
    pub sigma_in: (usize, usize),
    /// Node rows (inclusive) of Σ_out on x = 1.
    pub sigma_out: (usize, usize),
    pub sigma_in_z: (f64, f64),
    pub sigma_out_z: (f64, f64),
}

fn strip_rows(z: (f64, f64), nz: usize, name: &str) -> Result<(usize, usize)> {
    if !(z.0 > 0.0 && z.0 < z.1 && z.1 < 1.0) {
        return Err(Error::invalid(format!(
            "{name} ({}, {}) must satisfy 0 < lo < hi < 1",
            z.0, z.1
        )));
    }
    let lo = (z.0 * nz as f64 - 1e-9).ceil() as usize;
    let hi = (z.1 * nz as f64 + 1e-9).floor() as usize;
    if lo < 1 || hi > nz - 1 || lo > hi {
        return Err(Error::invalid(format!(
            "{name} does not resolve to interior edge nodes at nz = {nz}"
        )));
    }
    Ok((lo, hi))
}

impl MappedGrid {
    fn from_w_hat(
        w_hat: Vec<f64>,
        gamma: (f64, f64),
        layout: &GridLayout,
        bound: f64,
    ) -> Result<Self> {
        let GridLayout { nx, nz, .. } = *layout;
        if nx < 4 || nz < 4 || nz % 2 != 0 {
            return Err(Error::invalid(format!(
                "grid {nx}x{nz}: need nx, nz >= 4 and nz even"
            )));
        }
        let col = |g: f64| -> Result<usize> {
            let t = g * nx as f64;
            let r = t.round();
            if (t - r).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "interface endpoint {g} does not fall on a grid column at nx = {nx}"
                )));
            }
            Ok(r as usize)
        };
        let gamma_cols = (col(gamma.0)?, col(gamma.1)?);
        if gamma_cols.1 < gamma_cols.0 + 4 {
            return Err(Error::invalid("interface must span at least 4 grid cells"));
        }
        if let Some(m) = w_hat.iter().map(|v| v.abs()).reduce(f64::max) {
            if m > bound + 1e-15 {
                return Err(Error::Domain {
                    what: "max |w_hat|",
                    value: m,
                    reason: "grid needs a corrected displacement (|w| <= 1/4)",
                });
            }
        }
        let jac = w_hat.iter().map(|w| 1.0 - w).collect();
        Ok(Self {
            nx,
            nz,
            gamma,
            gamma_cols,
            w_hat,
            jac,
            sigma_in: strip_rows(layout.sigma_in, nz, "sigma_in")?,
            sigma_out: strip_rows(layout.sigma_out, nz, "sigma_out")?,
            sigma_in_z: layout.sigma_in,
            sigma_out_z: layout.sigma_out,
        })
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.nz + 1)
    }

    pub fn n_beam(&self) -> usize {
        self.gamma_cols.1 - self.gamma_cols.0 + 1
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.nx as f64
    }

    #[inline]
    pub fn eta(&self, j: usize) -> f64 {
        j as f64 / self.nz as f64
    }

    #[inline]
    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.w_hat[i] + self.eta(j) * self.jac[i]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i == self.nx || j == self.nz
    }

    /// The beam displacement this grid was built from.
    pub fn beam(&self) -> BeamDisplacement {
        BeamDisplacement {
            gamma_lo: self.gamma.0,
            gamma_hi: self.gamma.1,
            values: self.w_hat[self.gamma_cols.0..=self.gamma_cols.1].to_vec(),
        }
    }

    /// Area of 𝒪(ŵ) (exact for the piecewise linear interface).
    pub fn area(&self) -> f64 {
        let h = 1.0 / self.nx as f64;
        (0..self.nx)
            .map(|i| 0.5 * h * (self.jac[i] + self.jac[i + 1]))
            .sum()
    }

    /// ŵ at any x (piecewise linear between columns).
    pub fn w_hat_at(&self, x: f64) -> f64 {
        let t = (x * self.nx as f64).clamp(0.0, self.nx as f64);
        let i = (t.floor() as usize).min(self.nx - 1);
        let s = t - i as f64;
        (1.0 - s) * self.w_hat[i] + s * self.w_hat[i + 1]
    }
}

/// Grid of 𝒪([w]_cor). The beam nodes must coincide with the grid columns on Γ.
pub fn build_grid(w_cor: &BeamDisplacement, layout: &GridLayout) -> Result<MappedGrid> {
    grid_from_beam(w_cor, layout, 0.25)
}

/// Bounding grid for a displacement up to 1/2 in magnitude (𝒪_min / 𝒪_max).
pub fn build_bounding_grid(w: &BeamDisplacement, layout: &GridLayout) -> Result<MappedGrid> {
    grid_from_beam(w, layout, 0.5)
}

fn grid_from_beam(w: &BeamDisplacement, layout: &GridLayout, bound: f64) -> Result<MappedGrid> {
    let nx = layout.nx;
    let w_hat: Vec<f64> = (0..=nx).map(|i| w.sample(i as f64 / nx as f64)).collect();
    let grid = MappedGrid::from_w_hat(w_hat, (w.gamma_lo, w.gamma_hi), layout, bound)?;
    if grid.n_beam() != w.n_nodes() {
        // Γ need not carry the beam's own node set (bounding bumps live on Γ'),
        // but the solve grids always do.
        if bound <= 0.25 {
            return Err(Error::invalid(format!(
                "beam has {} nodes but the grid has {} columns on the interface",
                w.n_nodes(),
                grid.n_beam()
            )));
        }
    }
    Ok(grid)
}

/// C^∞ step: 0 for t <= 0, 1 for t >= 1.
fn smooth_step(t: f64) -> f64 {
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(t);
    let b = f(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Smooth bump equal to 1/2 on Γ and supported in Γ' = (lo − margin, hi + margin).
pub fn build_wmax(gamma: (f64, f64), margin: f64, n_nodes: usize) -> Result<BeamDisplacement> {
    let room = gamma.0.min(1.0 - gamma.1);
    if !(margin > 0.0 && margin < room) {
        return Err(Error::Domain {
            what: "margin",
            value: margin,
            reason: "need 0 < margin < dist(interface, {0, 1})",
        });
    }
    let (lo, hi) = (gamma.0 - margin, gamma.1 + margin);
    BeamDisplacement::from_fn(lo, hi, n_nodes, |x| {
        let left = smooth_step((x - lo) / margin);
        let right = smooth_step((hi - x) / margin);
        0.5 * left.min(right)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceGeometry {
    pub s: Vec<f64>,
    pub normal: Vec<[f64; 2]>,
}

pub fn interface_geometry(w: &BeamDisplacement) -> InterfaceGeometry {
    let v = &w.values;
    let n = v.len();
    let h = w.h();
    let slope = |i: usize| -> f64 {
        if n < 3 {
            (v[n - 1] - v[0]) / h
        } else if i == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        }
    };
    let mut s = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    for i in 0..n {
        let d = slope(i);
        let sw = d.hypot(1.0);
        s.push(sw);
        normal.push([-d / sw, 1.0 / sw]);
    }
    InterfaceGeometry { s, normal }
}

/// Cell-centred lattice on [0, 1] × [Z_MIN, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmbientLattice {
    pub nx: usize,
    pub nz: usize,
}

impl AmbientLattice {
    pub const Z_MIN: f64 = -0.5;

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let x = (i as f64 + 0.5) / self.nx as f64;
        let z = Self::Z_MIN + (j as f64 + 0.5) * (1.0 - Self::Z_MIN) / self.nz as f64;
        (x, z)
    }

    pub fn cell_area(&self) -> f64 {
        (1.0 - Self::Z_MIN) / (self.nx * self.nz) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientField {
    pub lattice: AmbientLattice,
    pub rho: Vec<f64>,
    pub ux: Vec<f64>,
    pub uz: Vec<f64>,
}

/// Bilinear evaluation of nodal fields at a physical point, `None` outside the domain.
pub(crate) fn locate(grid: &MappedGrid, x: f64, z: f64) -> Option<([usize; 4], [f64; 4])> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    let t = x * grid.nx as f64;
    let i = (t.floor() as usize).min(grid.nx - 1);
    let s = t - i as f64;
    let w = (1.0 - s) * grid.w_hat[i] + s * grid.w_hat[i + 1];
    let eta = (z - w) / (1.0 - w);
    if !(0.0..=1.0).contains(&eta) {
        return None;
    }
    let r = eta * grid.nz as f64;
    let j = (r.floor() as usize).min(grid.nz - 1);
    let q = r - j as f64;
    let nodes = [
        grid.node(i, j),
        grid.node(i + 1, j),
        grid.node(i + 1, j + 1),
        grid.node(i, j + 1),
    ];
    let wts = [(1.0 - s) * (1.0 - q), s * (1.0 - q), s * q, (1.0 - s) * q];
    Some((nodes, wts))
}

pub fn extend_by_zero(state: &FluidState, lattice: AmbientLattice) -> Result<AmbientField> {
    let g = &state.grid;
    if lattice.nx < g.nx || lattice.nz < g.nz {
        return Err(Error::invalid(format!(
            "ambient lattice {}x{} is coarser than the grid {}x{}",
            lattice.nx, lattice.nz, g.nx, g.nz
        )));
    }
    let n = lattice.nx * lattice.nz;
    let mut out = AmbientField {
        lattice,
        rho: vec![0.0; n],
        ux: vec![0.0; n],
        uz: vec![0.0; n],
    };
    for j in 0..lattice.nz {
        for i in 0..lattice.nx {
            let (x, z) = lattice.point(i, j);
            if let Some((nodes, w)) = locate(g, x, z) {
                let k = j * lattice.nx + i;
                for a in 0..4 {
                    out.rho[k] += w[a] * state.rho[nodes[a]];
                    out.ux[k] += w[a] * state.u.x[nodes[a]];
                    out.uz[k] += w[a] * state.u.z[nodes[a]];
                }
            }
        }
    }
    Ok(out)
}

/// Discrete L² distance of (ρ, u) between two zero-extended fields.
pub fn l2_distance_ambient(a: &AmbientField, b: &AmbientField) -> Result<f64> {
    if a.lattice != b.lattice {
        return Err(Error::invalid("ambient fields live on different lattices"));
    }
    let mut s = 0.0;
    for k in 0..a.rho.len() {
        s += (a.rho[k] - b.rho[k]).powi(2)
            + (a.ux[k] - b.ux[k]).powi(2)
            + (a.uz[k] - b.uz[k]).powi(2);
    }
    Ok((s * a.lattice.cell_area()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn layout(n: usize) -> GridLayout {
        GridLayout {
            nx: n,
            nz: n,
            sigma_in: (0.4, 0.6),
            sigma_out: (0.4, 0.6),
        }
    }

    #[test]
    fn lipschitz_examples() {
        let z = BeamDisplacement::zeros(0.25, 0.75, 9).unwrap();
        assert_eq!(lipschitz_norm(&z), 0.0);
        let w = BeamDisplacement::new(0.25, 0.75, vec![0.0, 0.05, 0.1, 0.05, 0.0]).unwrap();
        assert_eq!(lipschitz_norm(&w), 0.5);
        let l = lipschitz_norm(&w.scaled(-3.0));
        assert!((l - 1.5).abs() < 1e-15);
    }

    #[test]
    fn fcor_and_correction() {
        assert_eq!(f_cor(0.2), 1.0);
        assert_eq!(f_cor(0.5), 2.0);
        assert_eq!(f_cor(0.25), 1.0);
        let w = BeamDisplacement::new(0.25, 0.75, vec![0.0, 0.05, 0.1, 0.05, 0.0]).unwrap();
        let c = correct_displacement(&w);
        assert_eq!(c.values, vec![0.0, 0.025, 0.05, 0.025, 0.0]);
        let small = w.scaled(0.4);
        assert_eq!(correct_displacement(&small), small);
    }

    #[test]
    fn flat_grid() {
        let w = BeamDisplacement::zeros(0.25, 0.75, 17).unwrap();
        let g = build_grid(&w, &layout(32)).unwrap();
        assert!(g.jac.iter().all(|&j| j == 1.0));
        assert_eq!(g.gamma_cols, (8, 24));
        assert_eq!(g.sigma_in, (13, 19));
        assert!((g.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_jacobian_and_area() {
        let w = BeamDisplacement::from_fn(0.25, 0.75, 17, |x| {
            let s = (x - 0.25) / 0.5;
            4.0 * s * s * (1.0 - s) * (1.0 - s)
        })
        .unwrap();
        let g = build_grid(&w, &layout(32)).unwrap();
        assert!((g.jac[16] - 0.75).abs() < 1e-15);
        let h = 1.0 / 32.0;
        let trap: f64 = (0..32)
            .map(|i| 0.5 * h * ((1.0 - g.w_hat[i]) + (1.0 - g.w_hat[i + 1])))
            .sum();
        assert!((g.area() - trap).abs() < 1e-12);
        assert!(build_grid(&w.scaled(1.1), &layout(32)).is_err());
    }

    #[test]
    fn grid_rejects_misaligned_interface() {
        let w = BeamDisplacement::zeros(0.25, 0.75, 17).unwrap();
        assert!(build_grid(&w, &layout(30)).is_err());
        let w = BeamDisplacement::zeros(0.25, 0.75, 12).unwrap();
        assert!(build_grid(&w, &layout(32)).is_err());
    }

    #[test]
    fn wmax_shape() {
        let wm = build_wmax((0.25, 0.75), 0.1, 201).unwrap();
        assert_eq!(wm.sample(0.5), 0.5);
        assert_eq!(wm.sample(0.1), 0.0);
        assert_eq!(wm.sample(0.9), 0.0);
        assert!(wm.values.iter().all(|&v| (0.0..=0.5).contains(&v)));
        assert!(build_wmax((0.25, 0.75), 0.3, 11).is_err());
    }

    #[test]
    fn interface_normals() {
        let flat = interface_geometry(&BeamDisplacement::zeros(0.25, 0.75, 9).unwrap());
        assert!(flat.s.iter().all(|&s| s == 1.0));
        assert!(flat.normal.iter().all(|n| *n == [0.0, 1.0]));
        let ramp = BeamDisplacement::from_fn(0.25, 0.75, 9, |x| x - 0.25).unwrap();
        let g = interface_geometry(&ramp);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.s[4] - 2f64.sqrt()).abs() < 1e-14);
        assert!((g.normal[4][0] + r).abs() < 1e-14 && (g.normal[4][1] - r).abs() < 1e-14);
        for n in &g.normal {
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14);
        }
    }
}
