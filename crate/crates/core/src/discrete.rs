//! The three subproblem solvers: damped continuity, regularized momentum and
//! the clamped beam driven by the variational plate load.

use serde::Serialize;

use crate::eos::{cutoff_t, p_eps_delta_raw, PressureLaw, Regularization};
use crate::error::{Error, Result};
use crate::fem::{self, Mesh, Q1Pattern};
use crate::geometry::{BeamDisplacement, MappedGrid};
use crate::linalg::{max_abs, Assembler, LuFactor, SpdFactor};
use crate::operators::{check_strip_fits, BoundaryData, ExtensionField, LiftOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| c * v).collect(),
            z: self.z.iter().map(|v| c * v).collect(),
        }
    }

    /// (1 − t) self + t other
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let f = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(p, q)| (1.0 - t) * p + t * q)
                .collect()
        };
        Self {
            x: f(&self.x, &other.x),
            z: f(&self.z, &other.z),
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.x).max(max_abs(&self.z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub grid: MappedGrid,
    pub rho: Vec<f64>,
    pub u: VectorField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, lambda: f64, kappa: f64) -> Result<Self> {
        for (what, v) in [("mu", mu), ("lambda", lambda), ("kappa", kappa)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain {
                    what,
                    value: v,
                    reason: "must be positive",
                });
            }
        }
        Ok(Self { mu, lambda, kappa })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityOptions {
    pub relax: f64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        Self {
            relax: 0.7,
            tol: 1e-10,
            max_sweeps: 500,
        }
    }
}

/// Terms of the continuity equation tested with φ ≡ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassBalance {
    /// δ ∫ρ
    pub dissipation: f64,
    /// ∫_{Σout} T(ρ) u_B·n (lumped trace)
    pub outflow: f64,
    /// ∫_{Σin} ρ_B u_B·n
    pub inflow: f64,
    pub absolute: f64,
    /// |absolute| / |inflow|, or |absolute| when there is no inflow.
    pub relative: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuitySolution {
    pub rho: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub change: f64,
    pub balance: MassBalance,
}

/// Edge moments of the boundary data on the left/right edges (index = row j).
pub(crate) struct EdgeData {
    /// ∫_{Σin} ρ_B u_B·n φ_j (≤ 0)
    pub inflow: Vec<f64>,
    /// ∫_{Σout} u_B·n φ_j (≥ 0)
    pub outflow_w: Vec<f64>,
}

pub(crate) fn edge_data(bd: &BoundaryData, grid: &MappedGrid) -> EdgeData {
    let m = fem::edge_moments(grid.nz, |z| bd.phi(z), &bd.kinks());
    EdgeData {
        inflow: m.iter().map(|v| -bd.rho_in * v).collect(),
        outflow_w: m,
    }
}

/// Lumped (row-sum) masses ∫φ_i.
pub(crate) fn lumped_mass(mesh: &Mesh, n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n];
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            for a in 0..4 {
                m[nodes[a]] += q.w * q.n[a];
            }
        }
    }
    m
}

pub fn mass_balance_terms(
    rho: &[f64],
    grid: &MappedGrid,
    law: &PressureLaw,
    reg: &Regularization,
    bd: &BoundaryData,
) -> MassBalance {
    let mesh = Mesh::new(grid);
    let m = lumped_mass(&mesh, grid.n_nodes());
    let e = edge_data(bd, grid);
    let dissipation = reg.delta * m.iter().zip(rho).map(|(a, b)| a * b).sum::<f64>();
    let outflow: f64 = (0..=grid.nz)
        .map(|j| e.outflow_w[j] * cutoff_t(rho[grid.node(grid.nx, j)], law.rho_bar))
        .sum();
    let inflow: f64 = e.inflow.iter().sum();
    let absolute = dissipation + outflow + inflow;
    let relative = if inflow != 0.0 {
        absolute.abs() / inflow.abs()
    } else {
        absolute.abs()
    };
    MassBalance {
        dissipation,
        outflow,
        inflow,
        absolute,
        relative,
    }
}

/// Damped continuity solve by Picard sweeps on the frozen cutoff regime.
pub fn solve_continuity(
    u_tilde: &VectorField,
    grid: &MappedGrid,
    law: &PressureLaw,
    reg: &Regularization,
    bd: &BoundaryData,
    opts: &ContinuityOptions,
) -> Result<ContinuitySolution> {
    if !(reg.delta > 0.0) {
        return Err(Error::Domain {
            what: "delta",
            value: reg.delta,
            reason: "the damped continuity solve needs delta > 0",
        });
    }
    check_strip_fits(bd, grid)?;
    let n = grid.n_nodes();
    if u_tilde.len() != n {
        return Err(Error::invalid("velocity does not live on this grid"));
    }
    let mesh = Mesh::new(grid);
    let pat = Q1Pattern::new(grid.nx, grid.nz, 1);
    let mut k = pat.zeros();
    let mut l = pat.zeros();
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            let ux = fem::val(q, &nodes, &u_tilde.x);
            let uz = fem::val(q, &nodes, &u_tilde.z);
            for a in 0..4 {
                let adv = ux * q.g[a][0] + uz * q.g[a][1];
                for b in 0..4 {
                    let idx = pat.index(nodes[a], 0, nodes[b], 0);
                    k.val[idx] += q.w * (q.g[a][0] * q.g[b][0] + q.g[a][1] * q.g[b][1]);
                    l.val[idx] -= q.w * q.n[b] * adv;
                }
            }
        }
    }
    let mass = lumped_mass(&mesh, n);
    let edges = edge_data(bd, grid);
    let out_w = |node: usize| -> f64 {
        let (i, j) = grid.ij(node);
        if i == grid.nx {
            edges.outflow_w[j]
        } else {
            0.0
        }
    };
    let in_rhs = |node: usize| -> f64 {
        let (i, j) = grid.ij(node);
        if i == 0 {
            -edges.inflow[j]
        } else {
            0.0
        }
    };
    let rb = law.rho_bar;
    let regime =
        |rho: &[f64]| -> Vec<bool> { rho.iter().map(|&r| (0.0..=rb).contains(&r)).collect() };

    #[allow(clippy::needless_range_loop)]
    let solve_regime = |implicit: &[bool], rho: &[f64]| -> Result<Vec<f64>> {
        let mut a = pat.zeros();
        let mut rhs: Vec<f64> = (0..n).map(in_rhs).collect();
        for i in 0..n {
            for p in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col[p];
                a.val[p] = reg.delta * k.val[p];
                if implicit[j] {
                    a.val[p] += l.val[p];
                } else {
                    rhs[i] -= l.val[p] * cutoff_t(rho[j], rb);
                }
            }
        }
        a.make_m_matrix();
        for i in 0..n {
            let p = a.row_ptr[i]
                + a.col[a.row_ptr[i]..a.row_ptr[i + 1]]
                    .binary_search(&i)
                    .unwrap();
            a.val[p] += reg.delta * mass[i];
            if implicit[i] {
                a.val[p] += out_w(i);
            } else {
                rhs[i] -= out_w(i) * cutoff_t(rho[i], rb);
            }
        }
        if rhs.iter().all(|&v| v == 0.0) {
            return Ok(vec![0.0; n]);
        }
        Ok(LuFactor::new(&a, "continuity")?.solve(&rhs))
    };

    let mut rho = vec![0.0; n];
    let mut cached: Option<(Vec<bool>, Vec<f64>)> = None;
    let mut change = f64::INFINITY;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let reg_now = regime(&rho);
        let lin = match &cached {
            Some((r, sol)) if *r == reg_now => sol.clone(),
            _ => {
                let sol = solve_regime(&reg_now, &rho)?;
                cached = Some((reg_now, sol.clone()));
                sol
            }
        };
        change = lin
            .iter()
            .zip(&rho)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = max_abs(&lin);
        if change <= opts.tol * scale {
            rho = lin;
            converged = true;
            break;
        }
        let t = if sweeps == 1 { 1.0 } else { opts.relax };
        for (r, v) in rho.iter_mut().zip(&lin) {
            *r += t * (v - *r);
        }
    }
    let balance = mass_balance_terms(&rho, grid, law, reg, bd);
    Ok(ContinuitySolution {
        rho,
        sweeps,
        converged,
        change,
        balance,
    })
}

/// Full-node system of the linearized momentum equation: returns the matrix
/// on all 2n dofs (dof = 2k + component) and the right side.
fn momentum_system(
    rho: &[f64],
    u_tilde: &VectorField,
    mesh: &Mesh,
    pat: &Q1Pattern,
    params: &PhysicalParams,
    law: &PressureLaw,
    reg: &Regularization,
) -> (crate::linalg::Csr, Vec<f64>) {
    let n = rho.len();
    let mut a = pat.zeros();
    let mut rhs = vec![0.0; 2 * n];
    let (mu, lam, dl) = (params.mu, params.lambda, reg.delta);
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            let r = fem::val(q, &nodes, rho);
            let rp = r.max(0.0);
            let tr = cutoff_t(r, law.rho_bar);
            let p = p_eps_delta_raw(law, reg, r);
            let dr = fem::grad(q, &nodes, rho);
            let ut = [
                fem::val(q, &nodes, &u_tilde.x),
                fem::val(q, &nodes, &u_tilde.z),
            ];
            for ai in 0..4 {
                let ga = q.g[ai];
                let na = q.n[ai];
                let adv = ut[0] * ga[0] + ut[1] * ga[1];
                let dga = dr[0] * ga[0] + dr[1] * ga[1];
                for cc in 0..2 {
                    rhs[2 * nodes[ai] + cc] +=
                        q.w * (tr * ut[cc] * adv + p * ga[cc] - dl * ut[cc] * dga);
                }
                for bi in 0..4 {
                    let gb = q.g[bi];
                    let gg = ga[0] * gb[0] + ga[1] * gb[1];
                    let nn = na * q.n[bi];
                    for cc in 0..2 {
                        for d in 0..2 {
                            let mut v = mu * ga[d] * gb[cc] + lam * ga[cc] * gb[d];
                            if cc == d {
                                v += (mu + dl * rp) * gg + dl * rp * nn;
                            }
                            a.val[pat.index(nodes[ai], cc, nodes[bi], d)] += q.w * v;
                        }
                    }
                }
            }
        }
    }
    (a, rhs)
}

fn boundary_values(grid: &MappedGrid, bd: &BoundaryData) -> VectorField {
    let ext = ExtensionField { bd: bd.clone() }.on_grid(grid);
    let mut out = VectorField::zeros(grid.n_nodes());
    for k in 0..grid.n_nodes() {
        if grid.is_boundary(k) {
            out.x[k] = ext.x[k];
            out.z[k] = ext.z[k];
        }
    }
    out
}

/// Linear momentum solve for u with u = u_B on the boundary.
#[allow(clippy::too_many_arguments)]
pub fn solve_momentum(
    rho: &[f64],
    u_tilde: &VectorField,
    grid: &MappedGrid,
    params: &PhysicalParams,
    law: &PressureLaw,
    reg: &Regularization,
    bd: &BoundaryData,
) -> Result<VectorField> {
    let n = grid.n_nodes();
    if rho.len() != n || u_tilde.len() != n {
        return Err(Error::invalid("momentum inputs do not live on this grid"));
    }
    let mesh = Mesh::new(grid);
    let pat = Q1Pattern::new(grid.nx, grid.nz, 2);
    let (a, rhs) = momentum_system(rho, u_tilde, &mesh, &pat, params, law, reg);
    let ub = boundary_values(grid, bd);
    let mut fixed = vec![f64::NAN; 2 * n];
    for k in 0..n {
        if grid.is_boundary(k) {
            fixed[2 * k] = ub.x[k];
            fixed[2 * k + 1] = ub.z[k];
        }
    }
    let free: Vec<usize> = (0..2 * n).filter(|&d| fixed[d].is_nan()).collect();
    let mut b = Vec::with_capacity(free.len());
    for &i in &free {
        let mut v = rhs[i];
        for (j, aij) in a.row(i) {
            if !fixed[j].is_nan() {
                v -= aij * fixed[j];
            }
        }
        b.push(v);
    }
    let mut u = ub;
    if b.iter().any(|&v| v != 0.0) {
        let sol = SpdFactor::new(&a.restrict(&free), "momentum")?.solve(&b);
        for (p, &d) in free.iter().enumerate() {
            if d % 2 == 0 {
                u.x[d / 2] = sol[p];
            } else {
                u.z[d / 2] = sol[p];
            }
        }
    }
    Ok(u)
}

/// Nodal residual RHS(φ_k e_c) − LHS(u; φ_k e_c) for every node, boundary included.
pub fn momentum_residual(
    rho: &[f64],
    u: &VectorField,
    u_tilde: &VectorField,
    grid: &MappedGrid,
    params: &PhysicalParams,
    law: &PressureLaw,
    reg: &Regularization,
) -> VectorField {
    let n = grid.n_nodes();
    let mesh = Mesh::new(grid);
    let pat = Q1Pattern::new(grid.nx, grid.nz, 2);
    let (a, rhs) = momentum_system(rho, u_tilde, &mesh, &pat, params, law, reg);
    let mut flat = vec![0.0; 2 * n];
    for k in 0..n {
        flat[2 * k] = u.x[k];
        flat[2 * k + 1] = u.z[k];
    }
    let au = a.mul_vec(&flat);
    let mut r = VectorField::zeros(n);
    for k in 0..n {
        r.x[k] = rhs[2 * k] - au[2 * k];
        r.z[k] = rhs[2 * k + 1] - au[2 * k + 1];
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateLoad {
    /// ℓ_i: the momentum residual paired with A[ψ_i].
    pub functional: Vec<f64>,
    /// ℓ_i / h, the nodal load density driving κ w'''' = q.
    pub density: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn assemble_plate_load(
    rho: &[f64],
    u: &VectorField,
    u_tilde: &VectorField,
    grid: &MappedGrid,
    params: &PhysicalParams,
    law: &PressureLaw,
    reg: &Regularization,
    lift: &LiftOperator,
) -> Result<PlateLoad> {
    let r = momentum_residual(rho, u, u_tilde, grid, params, law, reg);
    let mut functional = lift.pair(&r.z)?;
    let nb = functional.len();
    functional[0] = 0.0;
    functional[nb - 1] = 0.0;
    let h = (grid.gamma.1 - grid.gamma.0) / (nb - 1) as f64;
    let density = functional.iter().map(|v| v / h).collect();
    Ok(PlateLoad {
        functional,
        density,
    })
}

/// Clamped beam κ w'''' = q on a uniform grid of the given length, ghost-node
/// closure w_{-1} = w_1. Returns all nodal values (ends are zero).
pub fn clamped_beam(load: &[f64], kappa: f64, length: f64) -> Result<Vec<f64>> {
    if !(kappa > 0.0) {
        return Err(Error::Domain {
            what: "kappa",
            value: kappa,
            reason: "beam stiffness must be positive",
        });
    }
    let n = load.len();
    if n < 5 {
        return Err(Error::invalid("beam needs at least 5 nodes"));
    }
    let h = length / (n - 1) as f64;
    let m = n - 2;
    let mut a = Assembler::new(m);
    for r in 0..m {
        let diag = if r == 0 || r == m - 1 { 7.0 } else { 6.0 };
        a.add(r, r, diag);
        if r + 1 < m {
            a.add(r, r + 1, -4.0);
            a.add(r + 1, r, -4.0);
        }
        if r + 2 < m {
            a.add(r, r + 2, 1.0);
            a.add(r + 2, r, 1.0);
        }
    }
    let scale = h.powi(4) / kappa;
    let rhs: Vec<f64> = load[1..n - 1].iter().map(|q| q * scale).collect();
    let mut w = vec![0.0; n];
    if rhs.iter().any(|&v| v != 0.0) {
        let sol = SpdFactor::new(&a.into_csr(), "beam")?.solve(&rhs);
        w[1..n - 1].copy_from_slice(&sol);
    }
    Ok(w)
}

pub fn solve_beam(load_density: &[f64], kappa: f64, gamma: (f64, f64)) -> Result<BeamDisplacement> {
    let w = clamped_beam(load_density, kappa, gamma.1 - gamma.0)?;
    BeamDisplacement::new(gamma.0, gamma.1, w)
}

/// h Σ (D⁴w)_i ψ_i style discrete plate term: κ h (D⁴w)_i at each beam node.
pub fn beam_operator(w: &BeamDisplacement, kappa: f64) -> Vec<f64> {
    let v = &w.values;
    let n = v.len();
    let h = w.h();
    let at = |i: i64| -> f64 {
        if i < 0 {
            v[(-i) as usize]
        } else if i as usize >= n {
            v[2 * (n - 1) - i as usize]
        } else {
            v[i as usize]
        }
    };
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                return 0.0;
            }
            let i = i as i64;
            let d4 = at(i - 2) - 4.0 * at(i - 1) + 6.0 * at(i) - 4.0 * at(i + 1) + at(i + 2);
            kappa * d4 / h.powi(3)
        })
        .collect()
}

/// Discrete H² norm on the beam with the clamped ghost closure.
pub fn beam_h2_norm(w: &BeamDisplacement) -> f64 {
    let v = &w.values;
    let n = v.len();
    let h = w.h();
    let at = |i: i64| -> f64 {
        if i < 0 {
            v[(-i) as usize]
        } else if i as usize >= n {
            v[2 * (n - 1) - i as usize]
        } else {
            v[i as usize]
        }
    };
    let mut s = 0.0;
    for i in 0..n as i64 {
        let d1 = (at(i + 1) - at(i - 1)) / (2.0 * h);
        let d2 = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
        s += at(i).powi(2) + d1 * d1 + d2 * d2;
    }
    (h * s).sqrt()
}

pub fn beam_diff(a: &BeamDisplacement, b: &BeamDisplacement) -> BeamDisplacement {
    BeamDisplacement {
        values: a.values.iter().zip(&b.values).map(|(p, q)| p - q).collect(),
        ..a.clone()
    }
}

/// ‖u‖_{H¹} = (∫ |u|² + |∇u|²)^{1/2}.
pub fn h1_norm(u: &VectorField, grid: &MappedGrid) -> f64 {
    let (l2, g2) = sobolev_parts(u, grid);
    (l2 + g2).sqrt()
}

/// ‖∇u‖_{L²}.
pub fn h1_seminorm(u: &VectorField, grid: &MappedGrid) -> f64 {
    sobolev_parts(u, grid).1.sqrt()
}

fn sobolev_parts(u: &VectorField, grid: &MappedGrid) -> (f64, f64) {
    let mesh = Mesh::new(grid);
    let (mut l2, mut g2) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            let a = fem::val(q, &nodes, &u.x);
            let b = fem::val(q, &nodes, &u.z);
            let ga = fem::grad(q, &nodes, &u.x);
            let gb = fem::grad(q, &nodes, &u.z);
            l2 += q.w * (a * a + b * b);
            g2 += q.w * (ga[0] * ga[0] + ga[1] * ga[1] + gb[0] * gb[0] + gb[1] * gb[1]);
        }
    }
    (l2, g2)
}

/// Scalar ‖f‖_{L²} and ‖∇f‖_{L²}.
pub fn scalar_norms(f: &[f64], grid: &MappedGrid) -> (f64, f64) {
    let mesh = Mesh::new(grid);
    let (mut l2, mut g2) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let nodes = mesh.cell_nodes(c);
        for q in mesh.qps(c) {
            let v = fem::val(q, &nodes, f);
            let g = fem::grad(q, &nodes, f);
            l2 += q.w * v * v;
            g2 += q.w * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    (l2.sqrt(), g2.sqrt())
}

/// Column-wise resampling of a nodal field onto a grid with the same layout:
/// each target node is evaluated at its physical height on the same column,
/// clamped to the source column's range.
pub fn transfer_scalar(f: &[f64], from: &MappedGrid, to: &MappedGrid) -> Result<Vec<f64>> {
    if from.nx != to.nx || from.nz != to.nz {
        return Err(Error::invalid(
            "field transfer needs grids with the same layout",
        ));
    }
    if from.w_hat == to.w_hat {
        return Ok(f.to_vec());
    }
    let nz = from.nz;
    let mut out = vec![0.0; to.n_nodes()];
    for i in 0..=to.nx {
        for j in 0..=nz {
            let z = to.z(i, j);
            let eta = ((z - from.w_hat[i]) / from.jac[i]).clamp(0.0, 1.0);
            let t = eta * nz as f64;
            let jj = (t.floor() as usize).min(nz - 1);
            let s = t - jj as f64;
            out[to.node(i, j)] = (1.0 - s) * f[from.node(i, jj)] + s * f[from.node(i, jj + 1)];
        }
    }
    Ok(out)
}

pub fn transfer_vector(u: &VectorField, from: &MappedGrid, to: &MappedGrid) -> Result<VectorField> {
    Ok(VectorField {
        x: transfer_scalar(&u.x, from, to)?,
        z: transfer_scalar(&u.z, from, to)?,
    })
}
