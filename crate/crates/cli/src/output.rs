//! Artifact writers. Every file is written to a temporary sibling and renamed
//! into place, so readers never see a partial file.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use steadyfsi::continuation::{KappaRow, TrendRow};
use steadyfsi::{BeamDisplacement, FluidState};

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, contents: &str) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.root.join(name)).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        s.push('\n');
        self.write(name, &s)
    }
}

pub fn fields_csv(state: &FluidState) -> String {
    let g = &state.grid;
    let mut s = String::from("x,z,rho,ux,uz\n");
    for k in 0..g.n_nodes() {
        let (i, j) = g.ij(k);
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            g.x(i),
            g.z(i, j),
            state.rho[k],
            state.u.x[k],
            state.u.z[k]
        );
    }
    s
}

pub fn beam_csv(w: &BeamDisplacement, w_cor: &BeamDisplacement) -> String {
    let mut s = String::from("x,w,w_cor\n");
    for i in 0..w.n_nodes() {
        let _ = writeln!(s, "{},{},{}", w.x(i), w.values[i], w_cor.values[i]);
    }
    s
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub const KAPPA_HEADER: &str = "kappa,lip_norm,kappa_times_lip,converged,beta_margin";

pub fn kappa_csv(rows: &[KappaRow]) -> String {
    let mut s = format!("{KAPPA_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.kappa,
            r.lip_norm,
            r.kappa_times_lip,
            r.converged,
            opt(r.beta_margin)
        );
    }
    s
}

pub fn trend_csv(rows: &[TrendRow]) -> String {
    let mut s = String::from(
        "value,eps,delta,kappa,converged,iterations,residual,h1_u,pressure_l2,pressure_l32,\
         rho_max,beta_margin,lip,mass_balance,delta34_grad_rho,energy_ratio,cauchy\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.value,
            r.eps,
            r.delta,
            r.kappa,
            r.converged,
            r.iterations,
            r.residual,
            r.h1_u,
            r.pressure_l2,
            r.pressure_l32,
            r.rho_max,
            opt(r.beta_margin),
            r.lip,
            r.mass_balance,
            r.delta34_grad_rho,
            r.energy_ratio,
            opt(r.cauchy)
        );
    }
    s
}
