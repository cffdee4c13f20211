//! Boundary data and its strip extension, the harmonic lift of beam test
//! functions, and a discrete Bogovskii inverse divergence.

use serde::{Deserialize, Serialize};

use crate::discrete::VectorField;
use crate::error::{Error, Result};
use crate::fem::{self, Mesh};
use crate::geometry::MappedGrid;
use crate::linalg::{Assembler, Csr, SpdFactor};

/// The strip must clear the band swept by corrected interfaces (|ŵ| <= 1/4) by this much.
pub const EXTENSION_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    /// peak · 4 (z − lo)(hi − z) / (hi − lo)²
    Parabolic { peak: f64 },
    /// Piecewise linear through (lo, 0), the knots (z, value), (hi, 0).
    Piecewise { knots: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub profile: Profile,
    pub strip: (f64, f64),
    pub rho_in: f64,
}

impl BoundaryData {
    pub fn new(profile: Profile, strip: (f64, f64), rho_in: f64, rho_bar: f64) -> Result<Self> {
        let (lo, hi) = strip;
        if !(lo >= 0.25 + EXTENSION_MARGIN && lo < hi && hi < 1.0) {
            return Err(Error::invalid(format!(
                "inflow strip ({lo}, {hi}) must lie in ({}, 1)",
                0.25 + EXTENSION_MARGIN
            )));
        }
        if !(rho_in > 0.0 && rho_in < rho_bar) {
            return Err(Error::Domain {
                what: "rho_in",
                value: rho_in,
                reason: "need 0 < rho_in < rho_bar",
            });
        }
        match &profile {
            Profile::Parabolic { peak } => {
                if !(*peak >= 0.0 && peak.is_finite()) {
                    return Err(Error::Domain {
                        what: "peak",
                        value: *peak,
                        reason: "profile peak must be >= 0",
                    });
                }
            }
            Profile::Piecewise { knots } => {
                let mut last = lo;
                for k in knots {
                    if !(k[0] > last && k[0] < hi) || !(k[1] > 0.0) {
                        return Err(Error::invalid(
                            "piecewise profile knots must be increasing inside the strip with positive values",
                        ));
                    }
                    last = k[0];
                }
                if knots.is_empty() {
                    return Err(Error::invalid("piecewise profile needs at least one knot"));
                }
            }
        }
        Ok(Self {
            profile,
            strip,
            rho_in,
        })
    }

    /// Profile φ(z).
    pub fn phi(&self, z: f64) -> f64 {
        let (lo, hi) = self.strip;
        if z <= lo || z >= hi {
            return 0.0;
        }
        match &self.profile {
            Profile::Parabolic { peak } => {
                peak * 4.0 * (z - lo) * (hi - z) / ((hi - lo) * (hi - lo))
            }
            Profile::Piecewise { knots } => {
                let mut prev = [lo, 0.0];
                for k in knots.iter().chain(std::iter::once(&[hi, 0.0])) {
                    if z <= k[0] {
                        let t = (z - prev[0]) / (k[0] - prev[0]);
                        return prev[1] + t * (k[1] - prev[1]);
                    }
                    prev = *k;
                }
                0.0
            }
        }
    }

    /// φ'(z) (one-sided at kinks).
    pub fn dphi(&self, z: f64) -> f64 {
        let (lo, hi) = self.strip;
        if z <= lo || z >= hi {
            return 0.0;
        }
        match &self.profile {
            Profile::Parabolic { peak } => {
                peak * 4.0 * (lo + hi - 2.0 * z) / ((hi - lo) * (hi - lo))
            }
            Profile::Piecewise { knots } => {
                let mut prev = [lo, 0.0];
                for k in knots.iter().chain(std::iter::once(&[hi, 0.0])) {
                    if z <= k[0] {
                        return (k[1] - prev[1]) / (k[0] - prev[0]);
                    }
                    prev = *k;
                }
                0.0
            }
        }
    }

    /// Points where φ is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = vec![self.strip.0, self.strip.1];
        if let Profile::Piecewise { knots } = &self.profile {
            k.extend(knots.iter().map(|p| p[0]));
        }
        k
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile, Profile::Parabolic { peak } if peak == 0.0)
    }

    /// ∫ φ over the strip (the volume flux through Σ_in).
    pub fn flux(&self) -> f64 {
        let mut cuts = self.kinks();
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|s| {
                fem::gauss3(s[0], s[1])
                    .iter()
                    .map(|&(z, w)| w * self.phi(z))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// The strip field u_B(x, z) = (φ(z), 0), defined on the whole plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    pub bd: BoundaryData,
}

impl ExtensionField {
    pub fn value(&self, _x: f64, z: f64) -> [f64; 2] {
        [self.bd.phi(z), 0.0]
    }

    /// Rows: components; columns: d/dx, d/dz.
    pub fn gradient(&self, _x: f64, z: f64) -> [[f64; 2]; 2] {
        [[0.0, self.bd.dphi(z)], [0.0, 0.0]]
    }

    pub fn divergence(&self, _x: f64, _z: f64) -> f64 {
        0.0
    }

    /// Nodal interpolant on a grid.
    pub fn on_grid(&self, grid: &MappedGrid) -> VectorField {
        let n = grid.n_nodes();
        let mut x = vec![0.0; n];
        for (k, v) in x.iter_mut().enumerate() {
            let (i, j) = grid.ij(k);
            *v = self.bd.phi(grid.z(i, j));
        }
        VectorField { x, z: vec![0.0; n] }
    }
}

/// Nodal strip extension on `grid`. Its support must sit inside both edge strips.
pub fn velocity_extension(bd: &BoundaryData, grid: &MappedGrid) -> Result<VectorField> {
    check_strip_fits(bd, grid)?;
    Ok(ExtensionField { bd: bd.clone() }.on_grid(grid))
}

pub(crate) fn check_strip_fits(bd: &BoundaryData, grid: &MappedGrid) -> Result<()> {
    let inside = |s: (f64, f64)| bd.strip.0 >= s.0 - 1e-12 && bd.strip.1 <= s.1 + 1e-12;
    if !inside(grid.sigma_in_z) || !inside(grid.sigma_out_z) {
        return Err(Error::invalid(format!(
            "profile support ({}, {}) must lie inside both sigma_in and sigma_out",
            bd.strip.0, bd.strip.1
        )));
    }
    Ok(())
}

fn scalar_stiffness(mesh: &Mesh, n: usize, cells: impl Iterator<Item = usize>) -> Csr {
    let mut a = Assembler::new(n);
    for c in cells {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            for p in 0..4 {
                for r in 0..4 {
                    let v = q.w * (q.g[p][0] * q.g[r][0] + q.g[p][1] * q.g[r][1]);
                    a.add(nodes[p], nodes[r], v);
                }
            }
        }
    }
    a.into_csr()
}

/// Factorized Laplace solve on the lift strip {x ∈ Γ, ŵ(x) < z, η < 1/2}.
pub struct LiftOperator {
    n_nodes: usize,
    bottom: Vec<usize>,
    free: Vec<usize>,
    /// For each bottom node b: (free index, K_fb) couplings.
    coupling: Vec<Vec<(usize, f64)>>,
    factor: SpdFactor,
}

impl LiftOperator {
    pub fn new(grid: &MappedGrid) -> Result<Self> {
        let mesh = Mesh::new(grid);
        let (i0, i1) = grid.gamma_cols;
        let j_top = grid.nz / 2;
        let cells = (0..j_top).flat_map(|cj| (i0..i1).map(move |ci| cj * grid.nx + ci));
        let mut k = scalar_stiffness(&mesh, grid.n_nodes(), cells);
        k.make_m_matrix();
        let free: Vec<usize> = (1..j_top)
            .flat_map(|j| (i0 + 1..i1).map(move |i| (i, j)))
            .map(|(i, j)| grid.node(i, j))
            .collect();
        let bottom: Vec<usize> = (i0..=i1).map(|i| grid.node(i, 0)).collect();
        let mut fidx = vec![usize::MAX; grid.n_nodes()];
        for (p, &f) in free.iter().enumerate() {
            fidx[f] = p;
        }
        let coupling = bottom
            .iter()
            .map(|&b| {
                k.row(b)
                    .filter(|(j, _)| fidx[*j] != usize::MAX)
                    .map(|(j, v)| (fidx[j], v))
                    .collect()
            })
            .collect();
        let kff = k.restrict(&free);
        let factor = SpdFactor::new(&kff, "harmonic lift")?;
        Ok(Self {
            n_nodes: grid.n_nodes(),
            bottom,
            free,
            coupling,
            factor,
        })
    }

    pub fn n_beam(&self) -> usize {
        self.bottom.len()
    }

    /// Vertical lift amplitude r at every grid node (zero off the strip).
    pub fn apply(&self, psi: &[f64]) -> Result<Vec<f64>> {
        if psi.len() != self.bottom.len() {
            return Err(Error::invalid(format!(
                "lift expects {} interface values, got {}",
                self.bottom.len(),
                psi.len()
            )));
        }
        let scale = psi.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if psi[0].abs() > 1e-12 * scale || psi[psi.len() - 1].abs() > 1e-12 * scale {
            return Err(Error::invalid(
                "lifted interface data must vanish at the ends of the interface",
            ));
        }
        let mut rhs = vec![0.0; self.free.len()];
        for (b, &v) in psi.iter().enumerate() {
            if v != 0.0 {
                for &(f, kfb) in &self.coupling[b] {
                    rhs[f] -= kfb * v;
                }
            }
        }
        let mut r = vec![0.0; self.n_nodes];
        if rhs.iter().any(|&v| v != 0.0) {
            let sol = self.factor.solve(&rhs);
            for (p, &f) in self.free.iter().enumerate() {
                r[f] = sol[p];
            }
        }
        for (b, &node) in self.bottom.iter().enumerate() {
            r[node] = psi[b];
        }
        Ok(r)
    }
}

impl LiftOperator {
    /// Σ_k r_b[k] f[k] for the lift r_b of every beam hat ψ_b, with one solve
    /// (the stiffness is symmetric).
    pub fn pair(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.n_nodes {
            return Err(Error::invalid(
                "paired field does not live on the lift grid",
            ));
        }
        let ff: Vec<f64> = self.free.iter().map(|&k| f[k]).collect();
        let y = if ff.iter().any(|&v| v != 0.0) {
            self.factor.solve(&ff)
        } else {
            vec![0.0; ff.len()]
        };
        Ok(self
            .bottom
            .iter()
            .zip(&self.coupling)
            .map(|(&b, cpl)| f[b] - cpl.iter().map(|&(p, k)| k * y[p]).sum::<f64>())
            .collect())
    }
}

/// A[ψ] = r e_z.
pub fn harmonic_lift(psi: &[f64], grid: &MappedGrid) -> Result<VectorField> {
    let r = LiftOperator::new(grid)?.apply(psi)?;
    Ok(VectorField {
        x: vec![0.0; r.len()],
        z: r,
    })
}

#[derive(Debug, Clone)]
pub struct BogovskiiResult {
    pub v: VectorField,
    /// ‖div_h v − (g − ḡ)‖ / ‖g − ḡ‖ in the macro-cell norm.
    pub residual: f64,
    pub iterations: usize,
    /// ‖∇v‖_{L²} / ‖g − ḡ‖_{L²}.
    pub constant: f64,
    pub grad_norm: f64,
    pub g_norm: f64,
}

/// Minimum-H¹-seminorm v ∈ Q1 ∩ H¹_0 with ∫_M div v = ∫_M (g − ḡ) on 2x2 macro cells.
pub struct BogovskiiSolver {
    mesh: Mesh,
    nx: usize,
    interior: Vec<usize>,
    /// For each macro cell: (interior dof index, component, ∫_M ∂_c φ).
    b_rows: Vec<Vec<(usize, usize, f64)>>,
    macro_area: Vec<f64>,
    factor: SpdFactor,
    n_nodes: usize,
}

const BOG_TOL: f64 = 1e-12;
const BOG_MAX_IT: usize = 1000;

impl BogovskiiSolver {
    pub fn new(grid: &MappedGrid) -> Result<Self> {
        if !grid.nx.is_multiple_of(2) || !grid.nz.is_multiple_of(2) {
            return Err(Error::invalid("Bogovskii solve needs even cell counts"));
        }
        let mesh = Mesh::new(grid);
        let n = grid.n_nodes();
        let k = scalar_stiffness(&mesh, n, 0..mesh.n_cells());
        let interior: Vec<usize> = (0..n).filter(|&k| !grid.is_boundary(k)).collect();
        let mut idx = vec![usize::MAX; n];
        for (p, &k) in interior.iter().enumerate() {
            idx[k] = p;
        }
        let (mx, mz) = (grid.nx / 2, grid.nz / 2);
        let mut b_rows = vec![Vec::new(); mx * mz];
        let mut macro_area = vec![0.0; mx * mz];
        for c in 0..mesh.n_cells() {
            let (ci, cj) = (c % grid.nx, c / grid.nx);
            let m = (cj / 2) * mx + ci / 2;
            let nodes = mesh.cell_nodes(c);
            for q in mesh.qps(c) {
                macro_area[m] += q.w;
                for a in 0..4 {
                    if idx[nodes[a]] != usize::MAX {
                        for comp in 0..2 {
                            b_rows[m].push((idx[nodes[a]], comp, q.w * q.g[a][comp]));
                        }
                    }
                }
            }
        }
        for row in &mut b_rows {
            row.sort_by_key(|&(d, c, _)| (d, c));
            let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(row.len());
            for &(d, c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == d && last.1 == c => last.2 += v,
                    _ => merged.push((d, c, v)),
                }
            }
            *row = merged;
        }
        let factor = SpdFactor::new(&k.restrict(&interior), "bogovskii")?;
        Ok(Self {
            mesh,
            nx: grid.nx,
            interior,
            b_rows,
            macro_area,
            factor,
            n_nodes: n,
        })
    }

    fn b_t(&self, lam: &[f64]) -> [Vec<f64>; 2] {
        let m = self.interior.len();
        let mut out = [vec![0.0; m], vec![0.0; m]];
        for (row, &l) in self.b_rows.iter().zip(lam) {
            for &(d, c, v) in row {
                out[c][d] += v * l;
            }
        }
        out
    }

    fn b(&self, v: &[Vec<f64>; 2]) -> Vec<f64> {
        self.b_rows
            .iter()
            .map(|row| row.iter().map(|&(d, c, w)| w * v[c][d]).sum())
            .collect()
    }

    /// v = K⁻¹ Bᵀ λ (componentwise).
    fn velocity(&self, lam: &[f64]) -> [Vec<f64>; 2] {
        let [bx, bz] = self.b_t(lam);
        [self.factor.solve(&bx), self.factor.solve(&bz)]
    }

    fn minv_norm(&self, r: &[f64]) -> f64 {
        r.iter()
            .zip(&self.macro_area)
            .map(|(v, a)| v * v / a)
            .sum::<f64>()
            .sqrt()
    }

    fn project(&self, r: &mut [f64]) {
        // Remove the constant-pressure component (B annihilates constants).
        let tot: f64 = self.macro_area.iter().sum();
        let s: f64 = r.iter().sum::<f64>() / tot;
        for (v, a) in r.iter_mut().zip(&self.macro_area) {
            *v -= s * a;
        }
    }

    pub fn solve(&self, g: &[f64]) -> Result<BogovskiiResult> {
        if g.len() != self.n_nodes {
            return Err(Error::invalid(
                "Bogovskii data must be a nodal field on the grid",
            ));
        }
        // Mean-free data and its macro integrals.
        let mut area = 0.0;
        let mut integral = 0.0;
        for c in 0..self.mesh.n_cells() {
            let nodes = self.mesh.cell_nodes(c);
            for q in self.mesh.qps(c) {
                area += q.w;
                integral += q.w * fem::val(q, &nodes, g);
            }
        }
        let mean = integral / area;
        let mx = self.nx / 2;
        let mut gm = vec![0.0; self.b_rows.len()];
        let mut g_norm2 = 0.0;
        for c in 0..self.mesh.n_cells() {
            let nodes = self.mesh.cell_nodes(c);
            let m = (c / self.nx / 2) * mx + (c % self.nx) / 2;
            for q in self.mesh.qps(c) {
                let v = fem::val(q, &nodes, g) - mean;
                gm[m] += q.w * v;
                g_norm2 += q.w * v * v;
            }
        }
        self.project(&mut gm);
        let g_norm = g_norm2.sqrt();
        let zero = || VectorField {
            x: vec![0.0; self.n_nodes],
            z: vec![0.0; self.n_nodes],
        };
        let gnorm_h = self.minv_norm(&gm);
        if gnorm_h == 0.0 || g_norm == 0.0 {
            return Ok(BogovskiiResult {
                v: zero(),
                residual: 0.0,
                iterations: 0,
                constant: 0.0,
                grad_norm: 0.0,
                g_norm,
            });
        }

        // PCG on S λ = g with S = B K⁻¹ Bᵀ, preconditioned by the macro mass inverse.
        let nm = gm.len();
        let mut lam = vec![0.0; nm];
        let mut r = gm.clone();
        let mut zv: Vec<f64> = r.iter().zip(&self.macro_area).map(|(v, a)| v / a).collect();
        let mut p = zv.clone();
        let mut rz: f64 = r.iter().zip(&zv).map(|(a, b)| a * b).sum();
        let mut it = 0;
        while it < BOG_MAX_IT && self.minv_norm(&r) > BOG_TOL * gnorm_h {
            it += 1;
            let vp = self.velocity(&p);
            let mut sp = self.b(&vp);
            self.project(&mut sp);
            let alpha = rz / p.iter().zip(&sp).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..nm {
                lam[i] += alpha * p[i];
                r[i] -= alpha * sp[i];
            }
            zv = r.iter().zip(&self.macro_area).map(|(v, a)| v / a).collect();
            let rz_new: f64 = r.iter().zip(&zv).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..nm {
                p[i] = zv[i] + beta * p[i];
            }
        }
        let vi = self.velocity(&lam);
        let mut res = self.b(&vi);
        for (a, b) in res.iter_mut().zip(&gm) {
            *a -= b;
        }
        let residual = self.minv_norm(&res) / gnorm_h;
        let mut v = zero();
        for (p, &k) in self.interior.iter().enumerate() {
            v.x[k] = vi[0][p];
            v.z[k] = vi[1][p];
        }
        let mut grad2 = 0.0;
        for c in 0..self.mesh.n_cells() {
            let nodes = self.mesh.cell_nodes(c);
            for q in self.mesh.qps(c) {
                let a = fem::grad(q, &nodes, &v.x);
                let b = fem::grad(q, &nodes, &v.z);
                grad2 += q.w * (a[0] * a[0] + a[1] * a[1] + b[0] * b[0] + b[1] * b[1]);
            }
        }
        if !(residual <= 1e-6) {
            return Err(Error::NotConverged {
                context: "bogovskii constraint",
                iterations: it,
                residual,
            });
        }
        let grad_norm = grad2.sqrt();
        Ok(BogovskiiResult {
            v,
            residual,
            iterations: it,
            constant: grad_norm / g_norm,
            grad_norm,
            g_norm,
        })
    }
}

pub fn bogovskii(g: &[f64], grid: &MappedGrid) -> Result<BogovskiiResult> {
    BogovskiiSolver::new(grid)?.solve(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, BeamDisplacement, GridLayout};

    fn grid(n: usize, amp: f64) -> MappedGrid {
        let w = BeamDisplacement::from_fn(0.25, 0.75, n / 2 + 1, |x| {
            let s = (x - 0.25) / 0.5;
            amp * 16.0 * s * s * (1.0 - s) * (1.0 - s)
        })
        .unwrap();
        build_grid(
            &w,
            &GridLayout {
                nx: n,
                nz: n,
                sigma_in: (0.35, 0.65),
                sigma_out: (0.35, 0.65),
            },
        )
        .unwrap()
    }

    fn bd(peak: f64) -> BoundaryData {
        BoundaryData::new(Profile::Parabolic { peak }, (0.4, 0.6), 0.5, 1.0).unwrap()
    }

    #[test]
    fn profile_values() {
        let b = bd(1.0);
        assert_eq!(b.phi(0.5), 1.0);
        assert_eq!(b.phi(0.3), 0.0);
        assert!((b.flux() - 2.0 / 3.0 * 0.2).abs() < 1e-15);
        let pw = BoundaryData::new(
            Profile::Piecewise {
                knots: vec![[0.45, 1.0], [0.55, 1.0]],
            },
            (0.4, 0.6),
            0.5,
            1.0,
        )
        .unwrap();
        assert_eq!(pw.phi(0.5), 1.0);
        assert!((pw.phi(0.425) - 0.5).abs() < 1e-12);
        assert!((pw.flux() - 0.15).abs() < 1e-14);
        assert!(
            BoundaryData::new(Profile::Parabolic { peak: 1.0 }, (0.28, 0.6), 0.5, 1.0).is_err()
        );
        assert!(BoundaryData::new(Profile::Parabolic { peak: 1.0 }, (0.4, 0.6), 1.0, 1.0).is_err());
    }

    #[test]
    fn extension_on_flat_grid() {
        let g = grid(32, 0.0);
        let u = velocity_extension(&bd(1.0), &g).unwrap();
        let k = g.node(16, 16);
        assert_eq!((u.x[k], u.z[k]), (1.0, 0.0));
        let mesh = Mesh::new(&g);
        for c in 0..mesh.n_cells() {
            let nodes = mesh.cell_nodes(c);
            for q in mesh.qps(c) {
                let d = fem::grad(q, &nodes, &u.x)[0] + fem::grad(q, &nodes, &u.z)[1];
                assert_eq!(d, 0.0);
            }
        }
        for kk in 0..g.n_nodes() {
            let (i, j) = g.ij(kk);
            if g.z(i, j) < 0.3 {
                assert_eq!((u.x[kk], u.z[kk]), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn lift_properties() {
        let g = grid(32, 0.2);
        let op = LiftOperator::new(&g).unwrap();
        let n = op.n_beam();
        let psi: Vec<f64> = (0..n)
            .map(|i| {
                (std::f64::consts::PI * i as f64 / (n - 1) as f64)
                    .sin()
                    .powi(3)
            })
            .collect();
        let mut psi_end = psi.clone();
        psi_end[0] = 0.0;
        psi_end[n - 1] = 0.0;
        let r = op.apply(&psi_end).unwrap();
        let m = psi_end.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(r.iter().all(|v| v.abs() <= m + 1e-14));
        assert!(r.iter().all(|&v| v >= -1e-14));
        assert!(op.apply(&vec![0.0; n]).unwrap().iter().all(|&v| v == 0.0));
        let mut bad = psi_end.clone();
        bad[0] = 0.1;
        assert!(op.apply(&bad).is_err());
    }

    #[test]
    fn bogovskii_zero_and_constraint() {
        let g = grid(16, 0.1);
        let s = BogovskiiSolver::new(&g).unwrap();
        let z = s.solve(&vec![0.0; g.n_nodes()]).unwrap();
        assert!(z.v.x.iter().chain(&z.v.z).all(|&v| v == 0.0));
        let f: Vec<f64> = (0..g.n_nodes())
            .map(|k| {
                let (i, j) = g.ij(k);
                (3.0 * g.x(i)).sin() + g.z(i, j).powi(2)
            })
            .collect();
        let r = s.solve(&f).unwrap();
        assert!(r.residual < 1e-6);
        for k in 0..g.n_nodes() {
            if g.is_boundary(k) {
                assert_eq!((r.v.x[k], r.v.z[k]), (0.0, 0.0));
            }
        }
    }
}
