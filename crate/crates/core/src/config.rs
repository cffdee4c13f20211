//! Run configuration: a TOML document with one section per concern. Every
//! section rejects unknown keys and every value is range-checked on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discrete::{ContinuityOptions, PhysicalParams};
use crate::eos::{LawForm, PressureLaw, Regularization};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, BeamDisplacement, GridLayout};
use crate::operators::{BoundaryData, Profile, EXTENSION_MARGIN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EosSection {
    pub form: LawForm,
    pub a: f64,
    pub rho_bar: f64,
}

impl Default for EosSection {
    fn default() -> Self {
        Self {
            form: LawForm::Rational,
            a: 1.0,
            rho_bar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegSection {
    pub eps: f64,
    pub delta: f64,
}

impl Default for RegSection {
    fn default() -> Self {
        Self {
            eps: 0.1,
            delta: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub nz: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { nx: 32, nz: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeomSection {
    pub gamma: [f64; 2],
    pub sigma_in: [f64; 2],
    pub sigma_out: [f64; 2],
}

impl Default for GeomSection {
    fn default() -> Self {
        Self {
            gamma: [0.25, 0.75],
            sigma_in: [0.4, 0.6],
            sigma_out: [0.4, 0.6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcSection {
    pub profile: Profile,
    pub strip: [f64; 2],
    pub rho_in: f64,
}

impl Default for BcSection {
    fn default() -> Self {
        Self {
            profile: Profile::Parabolic { peak: 0.5 },
            strip: [0.4, 0.6],
            rho_in: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self {
            mu: 1.0,
            lambda: 1.0,
            kappa: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol: f64,
    pub max_outer: usize,
    pub relax: f64,
    pub continuity_relax: f64,
    pub continuity_tol: f64,
    pub continuity_max_sweeps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_outer: 200,
            relax: 0.5,
            continuity_relax: 0.7,
            continuity_tol: 1e-10,
            continuity_max_sweeps: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub out_dir: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: "out".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationSection {
    pub stages: usize,
    pub delta_floor: f64,
}

impl Default for ContinuationSection {
    fn default() -> Self {
        Self {
            stages: 4,
            delta_floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub scan_points: usize,
    pub bracket: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            kappa_lo: 1e-4,
            kappa_hi: 1.0,
            scan_points: 6,
            bracket: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub bank_size: usize,
    pub alpha: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            bank_size: 64,
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub eos: EosSection,
    pub reg: RegSection,
    pub grid: GridSection,
    pub geom: GeomSection,
    pub bc: BcSection,
    pub physics: PhysicsSection,
    pub solver: SolverSection,
    pub run: RunSection,
    pub continuation: ContinuationSection,
    pub sweep: SweepSection,
    pub diagnostics: DiagnosticsSection,
}

/// Typed, validated parameters consumed by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub law: PressureLaw,
    pub reg: Regularization,
    pub params: PhysicalParams,
    pub bc: BoundaryData,
    pub layout: GridLayout,
    pub gamma: (f64, f64),
    pub relax: f64,
    pub tol: f64,
    pub max_outer: usize,
    pub continuity: ContinuityOptions,
}

impl SolverConfig {
    pub fn n_beam(&self) -> usize {
        ((self.gamma.1 - self.gamma.0) * self.layout.nx as f64).round() as usize + 1
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        let mut c = self.clone();
        c.params = PhysicalParams::new(self.params.mu, self.params.lambda, kappa)?;
        Ok(c)
    }

    pub fn with_reg(&self, eps: f64, delta: f64) -> Result<Self> {
        let mut c = self.clone();
        c.reg = Regularization::new(&self.law, eps, delta)?;
        Ok(c)
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.layout.nx = n;
        c.layout.nz = n;
        c
    }
}

fn range(key: &str, ok: bool, msg: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{key}: {msg}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let e = &self.eos;
        range(
            "eos.a",
            e.a > 0.0 && e.a.is_finite(),
            format!("{} must be > 0", e.a),
        )?;
        range(
            "eos.rho_bar",
            e.rho_bar > 0.0 && e.rho_bar.is_finite(),
            format!("{} must be > 0", e.rho_bar),
        )?;
        let r = &self.reg;
        range(
            "reg.eps",
            r.eps > 0.0 && r.eps < 1.0 && r.eps < e.rho_bar,
            format!("{} must lie in (0, min(1, rho_bar))", r.eps),
        )?;
        range(
            "reg.delta",
            r.delta > 0.0 && r.delta <= 1.0,
            format!(
                "{} must lie in (0, 1] (the damped continuity solve needs delta > 0)",
                r.delta
            ),
        )?;
        let g = &self.grid;
        range("grid.nx", g.nx >= 8, format!("{} must be >= 8", g.nx))?;
        range(
            "grid.nz",
            g.nz >= 4 && g.nz.is_multiple_of(2),
            format!("{} must be even and >= 4", g.nz),
        )?;
        let gm = &self.geom;
        range(
            "geom.gamma",
            gm.gamma[0] > 0.0 && gm.gamma[0] < gm.gamma[1] && gm.gamma[1] < 1.0,
            "need 0 < lo < hi < 1",
        )?;
        for (key, s) in [
            ("geom.sigma_in", gm.sigma_in),
            ("geom.sigma_out", gm.sigma_out),
        ] {
            range(
                key,
                s[0] > 0.0 && s[0] < s[1] && s[1] < 1.0,
                "need 0 < lo < hi < 1",
            )?;
        }
        let b = &self.bc;
        range(
            "bc.rho_in",
            b.rho_in > 0.0 && b.rho_in < e.rho_bar,
            format!("{} must lie in (0, rho_bar)", b.rho_in),
        )?;
        range(
            "bc.strip",
            b.strip[0] >= 0.25 + EXTENSION_MARGIN && b.strip[0] < b.strip[1] && b.strip[1] < 1.0,
            format!("must lie in ({}, 1)", 0.25 + EXTENSION_MARGIN),
        )?;
        let within = |s: [f64; 2]| b.strip[0] >= s[0] && b.strip[1] <= s[1];
        range(
            "bc.strip",
            within(gm.sigma_in) && within(gm.sigma_out),
            "must lie inside geom.sigma_in and geom.sigma_out",
        )?;
        if let Profile::Parabolic { peak } = b.profile {
            range(
                "bc.profile.peak",
                peak >= 0.0 && peak.is_finite(),
                "must be >= 0",
            )?;
        }
        let p = &self.physics;
        for (key, v) in [
            ("physics.mu", p.mu),
            ("physics.lambda", p.lambda),
            ("physics.kappa", p.kappa),
        ] {
            range(key, v > 0.0 && v.is_finite(), format!("{v} must be > 0"))?;
        }
        let s = &self.solver;
        range("solver.tol", s.tol > 0.0, "must be > 0")?;
        range("solver.max_outer", s.max_outer >= 1, "must be >= 1")?;
        range(
            "solver.relax",
            s.relax > 0.0 && s.relax <= 1.0,
            "must lie in (0, 1]",
        )?;
        range(
            "solver.continuity_relax",
            s.continuity_relax > 0.0 && s.continuity_relax <= 1.0,
            "must lie in (0, 1]",
        )?;
        range(
            "solver.continuity_tol",
            s.continuity_tol > 0.0,
            "must be > 0",
        )?;
        range(
            "solver.continuity_max_sweeps",
            s.continuity_max_sweeps >= 1,
            "must be >= 1",
        )?;
        let c = &self.continuation;
        range("continuation.stages", c.stages >= 1, "must be >= 1")?;
        range(
            "continuation.delta_floor",
            c.delta_floor > 0.0 && c.delta_floor <= r.delta,
            "must lie in (0, reg.delta]",
        )?;
        let w = &self.sweep;
        range(
            "sweep.kappa_lo",
            w.kappa_lo > 0.0 && w.kappa_lo < w.kappa_hi,
            "need 0 < kappa_lo < kappa_hi",
        )?;
        range(
            "sweep.bracket",
            w.bracket > 0.0 && w.bracket < 1.0,
            "must lie in (0, 1)",
        )?;
        let d = &self.diagnostics;
        range("diagnostics.bank_size", d.bank_size >= 1, "must be >= 1")?;
        range(
            "diagnostics.alpha",
            d.alpha > 0.0 && d.alpha <= 1.0,
            "must lie in (0, 1]",
        )?;
        // Grid-level checks (interface columns, strip rows) come from the builders.
        self.solver_config()?;
        Ok(())
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let cfg = |e: Error| Error::Config(e.to_string());
        let law = PressureLaw::new(self.eos.form, self.eos.a, self.eos.rho_bar).map_err(cfg)?;
        let reg = Regularization::new(&law, self.reg.eps, self.reg.delta).map_err(cfg)?;
        let params = PhysicalParams::new(self.physics.mu, self.physics.lambda, self.physics.kappa)
            .map_err(cfg)?;
        let bc = BoundaryData::new(
            self.bc.profile.clone(),
            (self.bc.strip[0], self.bc.strip[1]),
            self.bc.rho_in,
            law.rho_bar,
        )
        .map_err(cfg)?;
        let layout = GridLayout {
            nx: self.grid.nx,
            nz: self.grid.nz,
            sigma_in: (self.geom.sigma_in[0], self.geom.sigma_in[1]),
            sigma_out: (self.geom.sigma_out[0], self.geom.sigma_out[1]),
        };
        let gamma = (self.geom.gamma[0], self.geom.gamma[1]);
        let out = SolverConfig {
            law,
            reg,
            params,
            bc,
            layout,
            gamma,
            relax: self.solver.relax,
            tol: self.solver.tol,
            max_outer: self.solver.max_outer,
            continuity: ContinuityOptions {
                relax: self.solver.continuity_relax,
                tol: self.solver.continuity_tol,
                max_sweeps: self.solver.continuity_max_sweeps,
            },
        };
        let w = BeamDisplacement::zeros(gamma.0, gamma.1, out.n_beam()).map_err(cfg)?;
        build_grid(&w, &layout).map_err(|e| Error::Config(format!("grid/geom: {e}")))?;
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
