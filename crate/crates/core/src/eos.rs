//! Hard-sphere pressure laws, the density cutoff and the two regularization
//! levels, plus the renormalization pair used by the energy diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LawForm {
    /// p = a ρ / (ρ̄ − ρ)
    #[default]
    Rational,
    /// p = −a ρ̄ ln(1 − ρ/ρ̄)
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLaw {
    pub rho_bar: f64,
    pub a: f64,
    pub form: LawForm,
}

impl PressureLaw {
    pub fn new(form: LawForm, a: f64, rho_bar: f64) -> Result<Self> {
        if !(rho_bar > 0.0 && rho_bar.is_finite()) {
            return Err(Error::Domain {
                what: "rho_bar",
                value: rho_bar,
                reason: "must be positive",
            });
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain {
                what: "a",
                value: a,
                reason: "must be positive",
            });
        }
        Ok(Self { rho_bar, a, form })
    }

    pub fn rational(a: f64, rho_bar: f64) -> Result<Self> {
        Self::new(LawForm::Rational, a, rho_bar)
    }

    fn check(&self, rho: f64) -> Result<()> {
        if rho < 0.0 || rho >= self.rho_bar || rho.is_nan() {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
                reason: "pressure law needs 0 <= rho < rho_bar",
            });
        }
        Ok(())
    }

    pub fn eval_p(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(self.p_raw(rho))
    }

    pub fn eval_dp(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(self.dp_raw(rho))
    }

    fn p_raw(&self, rho: f64) -> f64 {
        match self.form {
            LawForm::Rational => self.a * rho / (self.rho_bar - rho),
            LawForm::Logarithmic => -self.a * self.rho_bar * (-rho / self.rho_bar).ln_1p(),
        }
    }

    fn dp_raw(&self, rho: f64) -> f64 {
        let gap = self.rho_bar - rho;
        match self.form {
            LawForm::Rational => self.a * self.rho_bar / (gap * gap),
            LawForm::Logarithmic => self.a * self.rho_bar / gap,
        }
    }
}

/// The cutoff T: clamp to [0, ρ̄].
pub fn cutoff_t(rho: f64, rho_bar: f64) -> f64 {
    rho.max(0.0).min(rho_bar)
}

/// Derivative of the cutoff (one-sided conventions at the kinks: 1 inside the closed band).
pub fn cutoff_dt(rho: f64, rho_bar: f64) -> f64 {
    if (0.0..=rho_bar).contains(&rho) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    pub eps: f64,
    pub delta: f64,
}

impl Regularization {
    pub fn new(law: &PressureLaw, eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 && eps < law.rho_bar) {
            return Err(Error::Domain {
                what: "eps",
                value: eps,
                reason: "need 0 < eps < min(1, rho_bar)",
            });
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Domain {
                what: "delta",
                value: delta,
                reason: "need 0 < delta <= 1",
            });
        }
        Ok(Self { eps, delta })
    }
}

fn check_nonneg(rho: f64) -> Result<()> {
    if rho < 0.0 || rho.is_nan() {
        return Err(Error::Domain {
            what: "rho",
            value: rho,
            reason: "regularized pressure needs rho >= 0",
        });
    }
    Ok(())
}

pub fn eval_p_eps(law: &PressureLaw, reg: &Regularization, rho: f64) -> Result<f64> {
    check_nonneg(rho)?;
    Ok(p_eps_raw(law, reg, rho))
}

pub fn eval_dp_eps(law: &PressureLaw, reg: &Regularization, rho: f64) -> Result<f64> {
    check_nonneg(rho)?;
    Ok(dp_eps_raw(law, reg, rho))
}

pub fn eval_p_eps_delta(law: &PressureLaw, reg: &Regularization, rho: f64) -> Result<f64> {
    check_nonneg(rho)?;
    Ok(p_eps_delta_raw(law, reg, rho))
}

pub fn eval_dp_eps_delta(law: &PressureLaw, reg: &Regularization, rho: f64) -> Result<f64> {
    check_nonneg(rho)?;
    Ok(dp_eps_raw(law, reg, rho) + reg.delta.sqrt())
}

// The solvers evaluate at quadrature points where round-off can leave ρ a
// hair below zero; these versions clamp instead of failing.
pub(crate) fn p_eps_raw(law: &PressureLaw, reg: &Regularization, rho: f64) -> f64 {
    let rho = rho.max(0.0);
    let knot = law.rho_bar - reg.eps;
    if rho <= knot {
        law.p_raw(rho)
    } else {
        law.p_raw(knot) + law.dp_raw(knot) * (rho - knot)
    }
}

pub(crate) fn dp_eps_raw(law: &PressureLaw, reg: &Regularization, rho: f64) -> f64 {
    let rho = rho.max(0.0);
    let knot = law.rho_bar - reg.eps;
    law.dp_raw(rho.min(knot))
}

pub(crate) fn p_eps_delta_raw(law: &PressureLaw, reg: &Regularization, rho: f64) -> f64 {
    p_eps_raw(law, reg, rho) + reg.delta.sqrt() * rho.max(0.0)
}

/// Tabulated renormalization pair (G, H) with G'' = p'_{ε,δ}/T and
/// G'T − H = p_{ε,δ}. Anchored at ρ* = ρ̄/2 with G(ρ*) = G'(ρ*) = 0.
#[derive(Debug, Clone)]
pub struct RenormPair {
    pub rho_star: f64,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub h: Vec<f64>,
    rho_bar: f64,
    p_nodes: Vec<f64>,
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// 5-point Gauss-Legendre on [a, b].
fn gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..5 {
        s += GL5_W[k] * f(c + r * GL5_X[k]);
    }
    s * r
}

/// Default table span starts at ρ̄/table_size.
pub fn build_renorm_pair(
    law: &PressureLaw,
    reg: &Regularization,
    table_size: usize,
) -> Result<RenormPair> {
    let lo = law.rho_bar / table_size as f64;
    build_renorm_pair_on(law, reg, lo, law.rho_bar, table_size)
}

pub fn build_renorm_pair_on(
    law: &PressureLaw,
    reg: &Regularization,
    rho_lo: f64,
    rho_hi: f64,
    table_size: usize,
) -> Result<RenormPair> {
    if table_size < 16 {
        return Err(Error::invalid(format!(
            "renormalization table needs at least 16 nodes, got {table_size}"
        )));
    }
    if !(rho_lo > 0.0) {
        return Err(Error::Domain {
            what: "rho_lo",
            value: rho_lo,
            reason: "renormalization quadrature needs a table in rho > 0",
        });
    }
    if !(rho_hi > rho_lo && rho_hi <= law.rho_bar) {
        return Err(Error::Domain {
            what: "rho_hi",
            value: rho_hi,
            reason: "need rho_lo < rho_hi <= rho_bar",
        });
    }
    let rho_bar = law.rho_bar;
    let knot = rho_bar - reg.eps;
    let rho_star = 0.5 * rho_bar;
    let g2f = |r: f64| (dp_eps_raw(law, reg, r) + reg.delta.sqrt()) / cutoff_t(r, rho_bar);

    // Sub-intervals split at the ε-knot where p'_ε has a kink.
    let integrate = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let v = if lo < knot && knot < hi {
            gauss5(lo, knot, f) + gauss5(knot, hi, f)
        } else {
            gauss5(lo, hi, f)
        };
        sign * v
    };

    let n = table_size;
    let dr = (rho_hi - rho_lo) / (n - 1) as f64;
    let rho: Vec<f64> = (0..n).map(|k| rho_lo + k as f64 * dr).collect();

    // G'(ρ) = ∫_{ρ*}^{ρ} G''. Accumulate from the node nearest the anchor.
    let k_star = (((rho_star - rho_lo) / dr).round().max(0.0) as usize).min(n - 1);
    let mut g1 = vec![0.0; n];
    g1[k_star] = integrate(rho_star, rho[k_star], &g2f);
    for k in k_star + 1..n {
        g1[k] = g1[k - 1] + integrate(rho[k - 1], rho[k], &g2f);
    }
    for k in (0..k_star).rev() {
        g1[k] = g1[k + 1] - integrate(rho[k], rho[k + 1], &g2f);
    }

    // G'(s) inside [ρ_k, ρ_{k+1}] from the left node value plus an inner quadrature.
    let g1_at = |s: f64, k: usize| -> f64 {
        let base = rho[k];
        g1[k] + integrate(base, s, &g2f)
    };
    let seg = |k: usize, a: f64, b: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
        integrate(a, b, &|s| g1_at(s, k) * weight(s))
    };

    // G(ρ) = ∫ G' and H(ρ) = −p_{ε,δ}(ρ*) + ∫ G' T' from the anchor.
    let k0 = if rho[k_star] >= rho_star && k_star > 0 {
        k_star - 1
    } else {
        k_star.min(n - 2)
    };
    let one = |_s: f64| 1.0;
    let tprime = |s: f64| cutoff_dt(s, rho_bar);
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];
    let h_star = -p_eps_delta_raw(law, reg, rho_star);
    g[k_star] = seg(k0, rho_star, rho[k_star], &one);
    h[k_star] = h_star + seg(k0, rho_star, rho[k_star], &tprime);
    for k in k_star + 1..n {
        g[k] = g[k - 1] + seg(k - 1, rho[k - 1], rho[k], &one);
        h[k] = h[k - 1] + seg(k - 1, rho[k - 1], rho[k], &tprime);
    }
    for k in (0..k_star).rev() {
        g[k] = g[k + 1] - seg(k, rho[k], rho[k + 1], &one);
        h[k] = h[k + 1] - seg(k, rho[k], rho[k + 1], &tprime);
    }

    let g2: Vec<f64> = rho.iter().map(|&r| g2f(r)).collect();
    let p_nodes: Vec<f64> = rho.iter().map(|&r| p_eps_delta_raw(law, reg, r)).collect();
    if g1.iter().chain(&g).chain(&h).any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "renormalization quadrature produced non-finite values",
        ));
    }
    Ok(RenormPair {
        rho_star,
        rho,
        g,
        g1,
        g2,
        h,
        rho_bar,
        p_nodes,
    })
}

/// Values of (G, G', G'', H) at one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormValues {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub h: f64,
}

impl RenormPair {
    /// Max over table nodes of |G'T − H − p_{ε,δ}|.
    pub fn identity_residual(&self) -> f64 {
        self.rho
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                (self.g1[k] * cutoff_t(r, self.rho_bar) - self.h[k] - self.p_nodes[k]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn min_g2(&self) -> f64 {
        self.g2.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation, clamped to the table span.
    pub fn lookup(&self, rho: f64) -> RenormValues {
        let n = self.rho.len();
        let lo = self.rho[0];
        let dr = (self.rho[n - 1] - lo) / (n - 1) as f64;
        let t = ((rho - lo) / dr).clamp(0.0, (n - 1) as f64);
        let k = (t.floor() as usize).min(n - 2);
        let s = t - k as f64;
        let lerp = |v: &[f64]| v[k] + s * (v[k + 1] - v[k]);
        RenormValues {
            g: lerp(&self.g),
            g1: lerp(&self.g1),
            g2: lerp(&self.g2),
            h: lerp(&self.h),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> PressureLaw {
        PressureLaw::rational(1.0, 1.0).unwrap()
    }

    #[test]
    fn rational_values() {
        let l = law();
        assert_eq!(l.eval_p(0.0).unwrap(), 0.0);
        assert_eq!(l.eval_p(0.5).unwrap(), 1.0);
        let near = l.eval_p(1.0 - 1e-6).unwrap();
        assert!((near - (1.0 - 1e-6) / 1e-6).abs() < 1e-3);
        assert!(l.eval_p(1.0).is_err());
        assert!(l.eval_p(-0.1).is_err());
    }

    #[test]
    fn log_law_blows_up() {
        let l = PressureLaw::new(LawForm::Logarithmic, 1.0, 1.0).unwrap();
        assert_eq!(l.eval_p(0.0).unwrap(), 0.0);
        assert!(l.eval_p(0.9).unwrap() > l.eval_p(0.5).unwrap());
        assert!(l.eval_p(1.0 - 1e-12).unwrap() > 20.0);
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(cutoff_t(-0.3, 1.0), 0.0);
        assert_eq!(cutoff_t(0.4, 1.0), 0.4);
        assert_eq!(cutoff_t(1.7, 1.0), 1.0);
    }

    #[test]
    fn regularized_values() {
        let l = law();
        let reg = Regularization {
            eps: 0.25,
            delta: 0.04,
        };
        assert_eq!(eval_p_eps(&l, &reg, 0.5).unwrap(), 1.0);
        assert!((eval_p_eps(&l, &reg, 0.9).unwrap() - 5.4).abs() < 1e-12);
        assert_eq!(eval_p_eps(&l, &reg, 0.75).unwrap(), l.eval_p(0.75).unwrap());
        assert!((eval_p_eps_delta(&l, &reg, 0.5).unwrap() - 1.1).abs() < 1e-14);
        assert!((eval_p_eps_delta(&l, &reg, 0.9).unwrap() - 5.58).abs() < 1e-12);
        assert!(eval_p_eps(&l, &reg, 1.5).unwrap().is_finite());
        assert!(eval_p_eps(&l, &reg, -1e-3).is_err());
        let zero = Regularization {
            eps: 0.25,
            delta: 0.0,
        };
        for r in [0.0, 0.3, 0.8, 1.2] {
            assert_eq!(
                eval_p_eps_delta(&l, &zero, r).unwrap(),
                eval_p_eps(&l, &zero, r).unwrap()
            );
        }
    }

    #[test]
    fn regularization_validation() {
        let l = law();
        assert!(Regularization::new(&l, 0.1, 0.0).is_err());
        assert!(Regularization::new(&l, 0.0, 0.1).is_err());
        assert!(Regularization::new(&l, 0.1, 1.0).is_ok());
        let small = PressureLaw::rational(1.0, 0.05).unwrap();
        assert!(Regularization::new(&small, 0.1, 0.1).is_err());
    }

    #[test]
    fn renorm_examples() {
        let l = law();
        let reg = Regularization {
            eps: 0.25,
            delta: 0.04,
        };
        let pair = build_renorm_pair(&l, &reg, 4096).unwrap();
        let v = pair.lookup(0.5);
        assert!((v.g2 - 8.4).abs() < 1e-9, "{}", v.g2);
        assert!(v.g.abs() < 1e-12 && v.g1.abs() < 1e-12);
        assert!((v.g1 * 0.5 - v.h - 1.1).abs() < 1e-9);
        assert!(
            pair.identity_residual() < 1e-8,
            "{}",
            pair.identity_residual()
        );
        assert!(pair.min_g2() >= 0.2);
    }

    #[test]
    fn renorm_rejects_bad_tables() {
        let l = law();
        let reg = Regularization {
            eps: 0.25,
            delta: 0.04,
        };
        assert!(build_renorm_pair(&l, &reg, 8).is_err());
        assert!(build_renorm_pair_on(&l, &reg, 0.0, 1.0, 64).is_err());
    }
}
