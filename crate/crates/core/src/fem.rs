//! Isoparametric Q1 elements on the mapped grid with 2x2 Gauss quadrature.
//!
//! The shear map is bilinear on each cell, so the Q1 geometry is exact.

use crate::geometry::MappedGrid;
use crate::linalg::Csr;

pub(crate) const GAUSS: f64 = 0.577_350_269_189_625_8;
const REF: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
const QREF: [[f64; 2]; 4] = [
    [-GAUSS, -GAUSS],
    [GAUSS, -GAUSS],
    [GAUSS, GAUSS],
    [-GAUSS, GAUSS],
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Qp {
    /// Quadrature weight times det J.
    pub w: f64,
    pub x: f64,
    pub z: f64,
    pub n: [f64; 4],
    pub g: [[f64; 2]; 4],
}

#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub nx: usize,
    pub nz: usize,
    pub qp: Vec<Qp>,
}

impl Mesh {
    pub fn new(grid: &MappedGrid) -> Self {
        let (nx, nz) = (grid.nx, grid.nz);
        let mut qp = Vec::with_capacity(4 * nx * nz);
        for cj in 0..nz {
            for ci in 0..nx {
                let nodes = cell_nodes_of(nx, ci, cj);
                let px: [f64; 4] = std::array::from_fn(|a| grid.x(nodes[a] % (nx + 1)));
                let pz: [f64; 4] = std::array::from_fn(|a| {
                    let (i, j) = (nodes[a] % (nx + 1), nodes[a] / (nx + 1));
                    grid.z(i, j)
                });
                for q in QREF {
                    qp.push(eval_qp(q, &px, &pz));
                }
            }
        }
        Self { nx, nz, qp }
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.nz
    }

    #[inline]
    pub fn cell_nodes(&self, c: usize) -> [usize; 4] {
        cell_nodes_of(self.nx, c % self.nx, c / self.nx)
    }

    #[inline]
    pub fn qps(&self, c: usize) -> &[Qp] {
        &self.qp[4 * c..4 * c + 4]
    }
}

#[inline]
fn cell_nodes_of(nx: usize, ci: usize, cj: usize) -> [usize; 4] {
    let k = cj * (nx + 1) + ci;
    [k, k + 1, k + nx + 2, k + nx + 1]
}

fn eval_qp(q: [f64; 2], px: &[f64; 4], pz: &[f64; 4]) -> Qp {
    let mut n = [0.0; 4];
    let mut dref = [[0.0; 2]; 4];
    for a in 0..4 {
        let (xa, za) = (REF[a][0], REF[a][1]);
        n[a] = 0.25 * (1.0 + xa * q[0]) * (1.0 + za * q[1]);
        dref[a] = [0.25 * xa * (1.0 + za * q[1]), 0.25 * za * (1.0 + xa * q[0])];
    }
    let (mut x, mut z) = (0.0, 0.0);
    let mut jm = [[0.0; 2]; 2];
    for a in 0..4 {
        x += n[a] * px[a];
        z += n[a] * pz[a];
        jm[0][0] += dref[a][0] * px[a];
        jm[0][1] += dref[a][1] * px[a];
        jm[1][0] += dref[a][0] * pz[a];
        jm[1][1] += dref[a][1] * pz[a];
    }
    let det = jm[0][0] * jm[1][1] - jm[0][1] * jm[1][0];
    // grad_phys = J^{-T} grad_ref
    let inv = [
        [jm[1][1] / det, -jm[0][1] / det],
        [-jm[1][0] / det, jm[0][0] / det],
    ];
    let mut g = [[0.0; 2]; 4];
    for a in 0..4 {
        g[a] = [
            inv[0][0] * dref[a][0] + inv[1][0] * dref[a][1],
            inv[0][1] * dref[a][0] + inv[1][1] * dref[a][1],
        ];
    }
    Qp { w: det, x, z, n, g }
}

#[inline]
pub(crate) fn val(q: &Qp, nodes: &[usize; 4], f: &[f64]) -> f64 {
    q.n[0] * f[nodes[0]] + q.n[1] * f[nodes[1]] + q.n[2] * f[nodes[2]] + q.n[3] * f[nodes[3]]
}

#[inline]
pub(crate) fn grad(q: &Qp, nodes: &[usize; 4], f: &[f64]) -> [f64; 2] {
    let mut d = [0.0; 2];
    for a in 0..4 {
        d[0] += q.g[a][0] * f[nodes[a]];
        d[1] += q.g[a][1] * f[nodes[a]];
    }
    d
}

/// 3-point Gauss-Legendre on [a, b] as (points, weights).
pub(crate) fn gauss3(a: f64, b: f64) -> [(f64, f64); 3] {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let s = (0.6f64).sqrt();
    [
        (c - r * s, r * 5.0 / 9.0),
        (c, r * 8.0 / 9.0),
        (c + r * s, r * 5.0 / 9.0),
    ]
}

/// ∫ f(z) φ_j(z) dz over the left or right edge for every edge node j,
/// with breakpoints of f added so kinks are integrated exactly.
pub(crate) fn edge_moments(nz: usize, f: impl Fn(f64) -> f64, kinks: &[f64]) -> Vec<f64> {
    let h = 1.0 / nz as f64;
    let mut out = vec![0.0; nz + 1];
    for j in 0..nz {
        let (z0, z1) = (j as f64 * h, (j + 1) as f64 * h);
        let mut cuts = vec![z0];
        cuts.extend(kinks.iter().copied().filter(|&k| k > z0 && k < z1));
        cuts.push(z1);
        for s in cuts.windows(2) {
            for (z, w) in gauss3(s[0], s[1]) {
                let t = (z - z0) / h;
                let fz = f(z);
                out[j] += w * fz * (1.0 - t);
                out[j + 1] += w * fz * t;
            }
        }
    }
    out
}

/// CSR pattern of the 3x3 nodal stencil for `ncomp` interleaved components
/// (dof = ncomp * node + component). Values are accumulated in place.
#[derive(Debug, Clone)]
pub(crate) struct Q1Pattern {
    nx: usize,
    ncomp: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    /// Position of each stencil neighbour inside the node's row block.
    slot: Vec<[u8; 9]>,
}

impl Q1Pattern {
    pub fn new(nx: usize, nz: usize, ncomp: usize) -> Self {
        let n = (nx + 1) * (nz + 1);
        let mut row_ptr = vec![0usize; n * ncomp + 1];
        let mut col = Vec::with_capacity(n * 9 * ncomp * ncomp);
        let mut slot = vec![[u8::MAX; 9]; n];
        for k in 0..n {
            let (i, j) = (k % (nx + 1), k / (nx + 1));
            let mut nbrs = Vec::with_capacity(9);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii >= 0 && jj >= 0 && ii <= nx as i64 && jj <= nz as i64 {
                        slot[k][((dj + 1) * 3 + di + 1) as usize] = nbrs.len() as u8;
                        nbrs.push(jj as usize * (nx + 1) + ii as usize);
                    }
                }
            }
            for c in 0..ncomp {
                for &m in &nbrs {
                    for d in 0..ncomp {
                        col.push(m * ncomp + d);
                    }
                }
                row_ptr[k * ncomp + c + 1] = col.len();
            }
        }
        Self {
            nx,
            ncomp,
            row_ptr,
            col,
            slot,
        }
    }

    pub fn zeros(&self) -> Csr {
        Csr {
            n: self.row_ptr.len() - 1,
            row_ptr: self.row_ptr.clone(),
            col: self.col.clone(),
            val: vec![0.0; self.col.len()],
        }
    }

    /// Index of entry (ncomp k + c, ncomp m + d); m must be a stencil neighbour of k.
    #[inline]
    pub fn index(&self, k: usize, c: usize, m: usize, d: usize) -> usize {
        let w = self.nx as i64 + 1;
        let diff = m as i64 - k as i64;
        let dj = (diff + w + 1).div_euclid(w) - 1;
        let di = diff - dj * w;
        let s = self.slot[k][((dj + 1) * 3 + di + 1) as usize] as usize;
        self.row_ptr[k * self.ncomp + c] + s * self.ncomp + d
    }
}
