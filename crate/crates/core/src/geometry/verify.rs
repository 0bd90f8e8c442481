//! Pointwise verification of differential identities on catalog models.
//!
//! Every check samples seeded random points in the model's box, evaluates
//! both sides independently by finite differences and records the largest
//! absolute and relative deviation. The relative error of `lhs = rhs` is
//! `|lhs − rhs| / max(|lhs|, |rhs|, scale)` where `scale` is the size of the
//! ingredients, so that identities of the form `0 = 0` are measured against
//! the magnitude of what cancels.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{
    coefficients_raw, form_tensor, metric_derivative, nabla_with, riemann_raw, torsion_tensor, ChartMetric,
    ConnectionSpec, FdPolicy,
};
use super::fields::{
    codifferential_hodge, codifferential_raw, d_field, d_raw, nabla_form_all_raw, spinor_nabla, to_frame,
    FormField, VectorField,
};
use super::models::Model;
use crate::clifford::{build_clifford, CliffordRep, Spinor, C64};
use crate::error::{Error, Result};
use crate::exterior::{form_norm2, hodge, interior_basis, interior_vec, wedge, Form};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Absolute,
    Relative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    /// The identity being checked, written out.
    pub anchor: String,
    pub measure: Measure,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub points: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn error(&self) -> f64 {
        match self.measure {
            Measure::Absolute => self.max_abs_error,
            Measure::Relative => self.max_rel_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    pub verification: String,
    pub checks: Vec<IdentityCheck>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Largest error over the checks whose id starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.id.starts_with(prefix))
            .map(IdentityCheck::error)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub points: usize,
    pub seed: u64,
    /// Replaces every default tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            points: 20,
            seed: 0,
            tolerance: None,
        }
    }
}

pub fn sample_points(m: &ChartMetric, cfg: &VerifyConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let margin = 1.01 * m.fd.margin();
    (0..cfg.points).map(|_| m.domain.sample(&mut rng, margin)).collect()
}

// ---------------------------------------------------------------------------
// deviation bookkeeping

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Dev {
    abs: f64,
    rel: f64,
}

impl Dev {
    fn of(lhs: &[f64], rhs: &[f64], scale: f64) -> Dev {
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let diff = lhs.iter().zip(rhs).fold(0.0f64, |a, (l, r)| a.max((l - r).abs()));
        let denom = inf(lhs).max(inf(rhs)).max(scale.abs());
        Dev {
            abs: diff,
            rel: if denom > 0.0 { diff / denom } else { 0.0 },
        }
    }

    fn scalar(lhs: f64, rhs: f64, scale: f64) -> Dev {
        Dev::of(&[lhs], &[rhs], scale)
    }

    fn forms(lhs: &Form<f64>, rhs: &Form<f64>, scale: f64) -> Dev {
        let mut l = Vec::new();
        let mut r = Vec::new();
        let mut blades: Vec<_> = lhs.terms().map(|(b, _)| b).chain(rhs.terms().map(|(b, _)| b)).collect();
        blades.sort();
        blades.dedup();
        for b in blades {
            l.push(lhs.get(b));
            r.push(rhs.get(b));
        }
        Dev::of(&l, &r, scale)
    }

    fn spinors(lhs: &Spinor, rhs: &Spinor, scale: f64) -> Dev {
        let flat = |s: &Spinor| s.components.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>();
        Dev::of(&flat(lhs), &flat(rhs), scale)
    }

    fn matrices(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>, scale: f64) -> Dev {
        Dev::of(lhs.as_slice(), rhs.as_slice(), scale)
    }

    fn max(self, o: Dev) -> Dev {
        Dev {
            abs: self.abs.max(o.abs),
            rel: self.rel.max(o.rel),
        }
    }
}

struct CheckDef {
    id: String,
    anchor: String,
    tol: f64,
    measure: Measure,
}

fn rel(id: impl Into<String>, anchor: impl Into<String>, tol: f64) -> CheckDef {
    CheckDef {
        id: id.into(),
        anchor: anchor.into(),
        tol,
        measure: Measure::Relative,
    }
}

fn abs(id: impl Into<String>, anchor: impl Into<String>, tol: f64) -> CheckDef {
    CheckDef {
        id: id.into(),
        anchor: anchor.into(),
        tol,
        measure: Measure::Absolute,
    }
}

fn evaluate(
    model: &Model,
    verification: &str,
    cfg: &VerifyConfig,
    defs: Vec<CheckDef>,
    f: impl Fn(&[f64]) -> Result<Vec<Dev>> + Sync,
) -> Result<ModelReport> {
    let points = sample_points(&model.metric, cfg);
    let per: Vec<Vec<Dev>> = points.par_iter().map(|x| f(x)).collect::<Result<_>>()?;
    let checks = defs
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let dev = per.iter().fold(Dev::default(), |acc, p| acc.max(p[i]));
            let tol = cfg.tolerance.unwrap_or(d.tol);
            let err = match d.measure {
                Measure::Absolute => dev.abs,
                Measure::Relative => dev.rel,
            };
            IdentityCheck {
                id: d.id,
                anchor: d.anchor,
                measure: d.measure,
                max_abs_error: dev.abs,
                max_rel_error: dev.rel,
                tolerance: tol,
                points: per.len(),
                passed: err <= tol,
                note: None,
            }
        })
        .collect();
    Ok(ModelReport {
        model: model.name.clone(),
        verification: verification.into(),
        checks,
    })
}

// ---------------------------------------------------------------------------
// pointwise frame data

struct Local {
    n: usize,
    e: DMatrix<f64>,
    einv: DMatrix<f64>,
    gamma: Form<f64>,
    gamma_vec: Vec<f64>,
    gamma2: f64,
}

impl Local {
    fn at(m: &Model, x: &[f64]) -> Result<Local> {
        m.metric.check_point(x)?;
        let e = m.metric.frame(x)?;
        let einv = e.clone().try_inverse().ok_or(Error::FrameDegenerate)?;
        let gamma = to_frame(&e, &m.gamma.eval(x));
        let gamma_vec = gamma.vector_components();
        let gamma2 = form_norm2(&gamma);
        Ok(Local {
            n: m.n(),
            e,
            einv,
            gamma,
            gamma_vec,
            gamma2,
        })
    }

    fn frame(&self, a: &Form<f64>) -> Form<f64> {
        to_frame(&self.e, a)
    }

    fn unit(&self, a: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        v[a] = 1.0;
        v
    }

    fn coords_vec(&self, v: &[f64]) -> Vec<f64> {
        (&self.e * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()
    }

    fn frame_vec(&self, v: &[f64]) -> Vec<f64> {
        (&self.einv * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// Symmetric bilinear form given in coordinates, moved to the frame.
    fn frame_bilinear(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.e.transpose() * b * &self.e
    }
}

/// `H[a][b] = (∇^g_{e_a} α)(e_b)` for a 1-form field.
fn hessian(m: &Model, a: &FormField, x: &[f64]) -> DMatrix<f64> {
    let all = nabla_form_all_raw(&m.metric, a, x);
    let n = m.n();
    DMatrix::from_fn(n, n, |p, q| all[p].coeff(&[q]))
}

/// `ω(e_a, e_b)` of a frame 2-form as a matrix.
fn two_form_matrix(w: &Form<f64>) -> DMatrix<f64> {
    let n = w.n();
    let t = form_tensor(w);
    DMatrix::from_fn(n, n, |a, b| t[a * n + b])
}

fn frame_ricci(m: &Model, spec: &ConnectionSpec, l: &Local, x: &[f64]) -> DMatrix<f64> {
    l.frame_bilinear(&riemann_raw(&m.metric, spec, x).ricci())
}

fn clifford(m: &Model) -> Result<CliffordRep> {
    build_clifford(m.n())
}

fn need_spinor(m: &Model) -> Result<&super::fields::SpinorField> {
    m.spinor.as_ref().ok_or_else(|| {
        Error::Refused(format!(
            "model {} carries no invariant spinor (group {})",
            m.name,
            m.group.as_ref().map_or("none".to_string(), ToString::to_string)
        ))
    })
}

fn need_torsion(m: &Model) -> Result<&FormField> {
    m.torsion
        .as_ref()
        .ok_or_else(|| Error::Refused(format!("model {} has no characteristic connection", m.name)))
}

fn half(s: &Spinor) -> Spinor {
    s.scaled(C64::new(0.5, 0.0))
}

// ---------------------------------------------------------------------------
// invariant forms

/// `form_k`, or `form_k_i` when several invariant forms share degree k.
fn form_tags(m: &Model) -> Vec<String> {
    let forms = &m.invariant_forms;
    forms
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let same: Vec<usize> = (0..forms.len()).filter(|&j| forms[j].degree == w.degree).collect();
            if same.len() == 1 {
                format!("form_{}", w.degree)
            } else {
                let pos = same.iter().position(|&j| j == i).unwrap_or(0);
                format!("form_{}_{}", w.degree, pos + 1)
            }
        })
        .collect()
}

/// `dΩᵏ = −k Γ∧Ωᵏ` and `δΩᵏ = (n−k) Γ⌟Ωᵏ` for every invariant form.
pub fn verify_forms_law(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    if m.invariant_forms.is_empty() {
        return Err(Error::Refused(format!("model {} carries no invariant forms", m.name)));
    }
    let mut defs = Vec::new();
    for (w, tag) in m.invariant_forms.iter().zip(form_tags(m)) {
        let k = w.degree;
        defs.push(rel(format!("d_{tag}"), format!("dΩ^{k} = −{k} Γ∧Ω^{k}"), 1e-5));
        defs.push(rel(format!("delta_{tag}"), format!("δΩ^{k} = {} Γ⌟Ω^{k}", m.n() - k), 1e-5));
    }
    evaluate(m, "forms_law", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let mut out = Vec::new();
        for w in &m.invariant_forms {
            let k = w.degree as f64;
            let wf = l.frame(&w.eval(x));
            let scale = l.gamma2.sqrt() * form_norm2(&wf).sqrt();
            let d = l.frame(&d_raw(&m.metric, w, x));
            let rhs = if w.degree < l.n {
                wedge(&l.gamma, &wf)?.scaled(&-k)
            } else {
                Form::zero(l.n, l.n)
            };
            out.push(Dev::forms(&d, &rhs, k * scale));
            let delta = codifferential_raw(&m.metric, w, x);
            let rhs = if w.degree > 0 {
                interior_vec(&l.gamma_vec, &wf)?.scaled(&(l.n as f64 - k))
            } else {
                Form::zero(l.n, 0)
            };
            out.push(Dev::forms(&delta, &rhs, (l.n as f64 - k) * scale));
        }
        Ok(out)
    })
}

// ---------------------------------------------------------------------------
// spinors

/// `∇^g_X Ψ = ½ (X∧Γ)·Ψ` for the frame vectors.
pub fn verify_spinor_parallel(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let psi = need_spinor(m)?;
    let rep = clifford(m)?;
    let defs = vec![rel("spinor_nabla", "∇^g_X Ψ = ½ (X∧Γ)·Ψ", 1e-5)];
    evaluate(m, "spinor_parallel", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let p0 = psi.eval(x);
        let scale = l.gamma2.sqrt() * p0.norm();
        let mut dev = Dev::default();
        for a in 0..l.n {
            let xa = l.unit(a);
            let lhs = spinor_nabla(&m.metric, &ConnectionSpec::LeviCivita, &rep, psi, &xa, x)?;
            let xg = wedge(&Form::from_vector(&xa), &l.gamma)?;
            let rhs = half(&rep.act(&xg, &p0)?);
            dev = dev.max(Dev::spinors(&lhs, &rhs, scale));
        }
        Ok(vec![dev])
    })
}

/// Ricci tensor, scalar curvature and `Ric(Γ,Γ)` of a metric carrying a
/// spinor parallel for the vectorial connection, with `A(X,Γ)` extended as
/// `(n−2)‖Γ‖² X_⊥`.
pub fn verify_fixspinor_ricci(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    need_spinor(m)?;
    let n = m.n();
    let nf = n as f64;
    let ricci_anchor = if n == 4 {
        "g(Ric X, Y) = g(∇_X Γ, Y) + g(∇_Y Γ, X) − δΓ g(X,Y) + g(A(X,Γ), Y)"
    } else {
        "Ric(X) = (n−2) ∇_X Γ − δΓ X + A(X,Γ)"
    };
    let defs = vec![
        rel("ricci", ricci_anchor, 1e-5),
        rel("scalar", "Scal = 2(1−n) δΓ + (n−1)(n−2) ‖Γ‖²", 1e-5),
        rel("ricci_gamma_gamma", "g(Ric Γ, Γ) = ((n−2)/2) Γ(‖Γ‖²) − δΓ ‖Γ‖²", 1e-5),
    ];
    let gamma_norm2 = {
        let metric = m.metric.clone();
        let gamma = m.gamma.clone();
        move |y: &[f64]| {
            let ginv = metric.g_raw(y).try_inverse().expect("metric is invertible");
            let v = nalgebra::DVector::from_vec(gamma.eval(y).vector_components());
            vec![(v.transpose() * ginv * &v)[(0, 0)]]
        }
    };
    evaluate(m, "fixspinor_ricci", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let ric = frame_ricci(m, &ConnectionSpec::LeviCivita, &l, x);
        let h = hessian(m, &m.gamma, x);
        let dg = codifferential_raw(&m.metric, &m.gamma, x).coeff(&[]);
        let g = &l.gamma_vec;
        let a_term = DMatrix::from_fn(n, n, |p, q| {
            (nf - 2.0) * (if p == q { l.gamma2 } else { 0.0 } - g[p] * g[q])
        });
        let nabla_term = if n == 4 { &h + h.transpose() } else { &h * (nf - 2.0) };
        let rhs = &nabla_term - DMatrix::identity(n, n) * dg + &a_term;
        let scale = nabla_term.amax().max(dg.abs()).max(a_term.amax());
        let d_ric = Dev::matrices(&ric, &rhs, scale);

        let s = ric.trace();
        let s_rhs = 2.0 * (1.0 - nf) * dg + (nf - 1.0) * (nf - 2.0) * l.gamma2;
        let d_scal = Dev::scalar(s, s_rhs, (2.0 * (nf - 1.0) * dg).abs().max((nf - 1.0) * (nf - 2.0) * l.gamma2));

        let gv = nalgebra::DVector::from_column_slice(g);
        let lhs = (gv.transpose() * &ric * &gv)[(0, 0)];
        let dn = m.metric.fd.directional(&gamma_norm2, x, &l.coords_vec(g))[0];
        let rhs = 0.5 * (nf - 2.0) * dn - dg * l.gamma2;
        let d_cor = Dev::scalar(lhs, rhs, (0.5 * (nf - 2.0) * dn).abs().max((dg * l.gamma2).abs()));
        Ok(vec![d_ric, d_scal, d_cor])
    })
}

/// Clifford identities satisfied by the characteristic torsion and an
/// invariant spinor, the scalar-curvature identity for `∇^c`, and the
/// parallelism `∇^c Ψ = 0`.
pub fn verify_torsion_identities(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let psi = need_spinor(m)?;
    let t = need_torsion(m)?;
    let rep = clifford(m)?;
    let n = m.n();
    let nf = n as f64;
    let c1 = 2.0 * (nf - 1.0) / 3.0;
    let c2 = c1 * c1;
    let skew = ConnectionSpec::Skew(t.clone());
    let mut defs = vec![
        rel("gamma_hook_t_psi", "(Γ⌟T^c)·Ψ = 0", 1e-5),
        rel("delta_t_psi", "δ(T^c)·Ψ = 0", 1e-5),
        rel("t_psi", "T^c·Ψ = (2/3)(n−1) Γ·Ψ", 1e-5),
        rel("t_squared_psi", "(T^c)²·Ψ = (4/9)(n−1)² ‖Γ‖² Ψ", 1e-5),
        rel(
            "scalar_identity",
            "2(n−1) δΓ = 2((4/9)(n−1)² ‖Γ‖² − ‖T^c‖²) − Scal^c",
            1e-5,
        ),
        rel("nabla_c_psi", "∇^c Ψ = 0", 1e-5),
    ];
    if n == 7 {
        defs.push(rel("g2_delta_t", "δT^c = 0", 1e-5));
        defs.push(rel("g2_t_norm", "‖T^c‖² = 4 ‖Γ‖²", 1e-5));
        defs.push(rel("g2_scalar", "12 δΓ = 6 ‖T^c‖² − Scal^c", 1e-5));
    }
    evaluate(m, "torsion_identities", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let p0 = psi.eval(x);
        let pn = p0.norm();
        let tf = l.frame(&t.eval(x));
        let tn = form_norm2(&tf);
        let gn = l.gamma2.sqrt();
        let mut out = Vec::new();

        let gt = interior_vec(&l.gamma_vec, &tf)?;
        out.push(Dev::spinors(&rep.act(&gt, &p0)?, &Spinor::zero(n), gn * tn.sqrt() * pn));

        let nab = nabla_form_all_raw(&m.metric, t, x);
        let nab_scale = nab.iter().map(Form::max_abs).fold(0.0, f64::max);
        let mut dt = Form::zero(n, 2);
        for (a, v) in nab.iter().enumerate() {
            dt.axpy(&-1.0, &interior_basis(a, v));
        }
        out.push(Dev::spinors(&rep.act(&dt, &p0)?, &Spinor::zero(n), nab_scale * pn));

        let tp = rep.act(&tf, &p0)?;
        let gp = rep.act(&l.gamma, &p0)?.scaled(C64::new(c1, 0.0));
        out.push(Dev::spinors(&tp, &gp, gn * pn));

        let ttp = rep.act(&tf, &tp)?;
        out.push(Dev::spinors(&ttp, &p0.scaled(C64::new(c2 * l.gamma2, 0.0)), tn * pn));

        let dg = codifferential_raw(&m.metric, &m.gamma, x).coeff(&[]);
        let scal_c = frame_ricci(m, &skew, &l, x).trace();
        let lhs = 2.0 * (nf - 1.0) * dg;
        let rhs = 2.0 * (c2 * l.gamma2 - tn) - scal_c;
        let scale = lhs.abs().max(2.0 * c2 * l.gamma2).max(2.0 * tn).max(scal_c.abs());
        out.push(Dev::scalar(lhs, rhs, scale));

        let mut dev = Dev::default();
        for a in 0..n {
            let v = spinor_nabla(&m.metric, &skew, &rep, psi, &l.unit(a), x)?;
            dev = dev.max(Dev::spinors(&v, &Spinor::zero(n), gn * pn));
        }
        out.push(dev);

        if n == 7 {
            out.push(Dev::forms(&dt, &Form::zero(n, 2), nab_scale));
            out.push(Dev::scalar(tn, 4.0 * l.gamma2, 0.0));
            let lhs = 12.0 * dg;
            let rhs = 6.0 * tn - scal_c;
            out.push(Dev::scalar(lhs, rhs, (6.0 * tn).max(scal_c.abs())));
        }
        Ok(out)
    })
}

// ---------------------------------------------------------------------------
// Hopf structures

/// `J` acting on frame forms as the algebra homomorphism extending
/// `θ^a ↦ e_a ⌟ Ω`.
pub fn apply_j(form: &Form<f64>, kahler: &Form<f64>) -> Form<f64> {
    let images: Vec<Form<f64>> = (0..kahler.n()).map(|a| interior_basis(a, kahler)).collect();
    form.substitute(&images)
}

/// Killing-type identities of a generalized Hopf structure, plus the
/// dimension-specific formulas of the Hermitian models.
pub fn verify_hopf(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let t = need_torsion(m)?;
    let kahler = m
        .kahler
        .as_ref()
        .ok_or_else(|| Error::Refused(format!("model {} has no Kähler form", m.name)))?;
    let n = m.n();
    let skew = ConnectionSpec::Skew(t.clone());
    let sharp = VectorField::sharp(&m.metric, &m.gamma);
    let mut defs = vec![
        abs("nabla_c_gamma", "∇^c Γ = 0", 1e-5),
        abs("delta_gamma", "δΓ = 0", 1e-5),
        abs("delta_t", "δT^c = 0", 1e-5),
        abs("d_gamma_hook", "dΓ = Γ⌟T^c", 1e-5),
        abs("two_nabla_gamma", "2 ∇^g Γ = dΓ", 1e-5),
        abs("gamma_killing", "g(∇_X Γ, Y) + g(∇_Y Γ, X) = 0", 1e-5),
    ];
    match n {
        4 => {
            defs.push(abs("two_gamma_star_j_d_omega", "2Γ = *J(dΩ)", 1e-5));
            defs.push(abs("gamma_unit", "‖Γ‖ = 1", 1e-6));
            defs.push(abs("d_gamma", "dΓ = 0", 1e-5));
            defs.push(abs("nabla_g_gamma", "∇^g Γ = 0", 1e-5));
        }
        6 => {
            defs.push(abs("delta_omega", "δΩ = 4 Γ⌟Ω", 1e-5));
            defs.push(abs("torsion_closed_form", "T^c = 2 (JΓ∧Ω)", 1e-5));
            defs.push(abs("nabla_g_gamma", "∇^g Γ = 0", 1e-5));
            defs.push(abs("j_gamma_killing", "JΓ is a Killing field", 1e-5));
        }
        _ => {}
    }
    let j_gamma = {
        let (metric, gamma, kahler) = (m.metric.clone(), m.gamma.clone(), kahler.clone());
        VectorField::new(n, move |y| {
            let e = metric.frame_raw(y);
            let gf = to_frame(&e, &gamma.eval(y)).vector_components();
            let jg = interior_vec(&gf, &to_frame(&e, &kahler.eval(y))).expect("2-form").vector_components();
            (&e * nalgebra::DVector::from_vec(jg)).as_slice().to_vec()
        })
    };
    evaluate(m, "hopf", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let mut out = Vec::new();
        let tf = l.frame(&t.eval(x));
        let of = l.frame(&kahler.eval(x));

        let cc = coefficients_raw(&m.metric, &skew, x);
        let mut worst = Vec::new();
        for a in 0..n {
            let v = nabla_with(&cc, m.metric.fd, &l.coords_vec(&l.unit(a)), &sharp, x);
            worst.extend(l.frame_vec(&v));
        }
        out.push(Dev::of(&worst, &vec![0.0; worst.len()], 0.0));

        let dg = codifferential_raw(&m.metric, &m.gamma, x);
        out.push(Dev::forms(&dg, &Form::zero(n, 0), 0.0));
        let dt = codifferential_raw(&m.metric, t, x);
        out.push(Dev::forms(&dt, &Form::zero(n, 2), 0.0));
        let dgam = l.frame(&d_raw(&m.metric, &m.gamma, x));
        let hook = interior_vec(&l.gamma_vec, &tf)?;
        out.push(Dev::forms(&dgam, &hook, 0.0));
        let h = hessian(m, &m.gamma, x);
        out.push(Dev::matrices(&(&h * 2.0), &two_form_matrix(&dgam), 0.0));
        out.push(Dev::matrices(&(&h + h.transpose()), &DMatrix::zeros(n, n), 0.0));

        match n {
            4 => {
                let domega = l.frame(&d_raw(&m.metric, kahler, x));
                let rhs = hodge(&apply_j(&domega, &of));
                out.push(Dev::forms(&l.gamma.scaled(&2.0), &rhs, 0.0));
                out.push(Dev::scalar(l.gamma2.sqrt(), 1.0, 0.0));
                out.push(Dev::forms(&dgam, &Form::zero(n, 2), 0.0));
                out.push(Dev::matrices(&h, &DMatrix::zeros(n, n), 0.0));
            }
            6 => {
                let delta = codifferential_raw(&m.metric, kahler, x);
                out.push(Dev::forms(&delta, &interior_vec(&l.gamma_vec, &of)?.scaled(&4.0), 0.0));
                let jg = interior_vec(&l.gamma_vec, &of)?;
                out.push(Dev::forms(&tf, &wedge(&jg, &of)?.scaled(&2.0), 0.0));
                out.push(Dev::matrices(&h, &DMatrix::zeros(n, n), 0.0));
                let lc = coefficients_raw(&m.metric, &ConnectionSpec::LeviCivita, x);
                let k = DMatrix::from_fn(n, n, |a, b| {
                    let v = nabla_with(&lc, m.metric.fd, &l.coords_vec(&l.unit(a)), &j_gamma, x);
                    l.frame_vec(&v)[b]
                });
                out.push(Dev::matrices(&(&k + k.transpose()), &DMatrix::zeros(n, n), 0.0));
            }
            _ => {}
        }
        Ok(out)
    })
}

// ---------------------------------------------------------------------------
// foliations

/// Identities of a codimension-one umbilic foliation with unit normal Ω;
/// the second fundamental form is `II(X) = ∇^g_X Ω` on leaf directions.
pub fn verify_foliation(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let normal = m
        .leaf_normal
        .as_ref()
        .ok_or_else(|| Error::Refused(format!("model {} is not a foliation model", m.name)))?;
    let n = m.n();
    let defs = vec![
        rel("d_omega", "dΩ = Ω∧Γ", 1e-5),
        rel("second_fundamental_form", "II(X) = −g(Ω,Γ) X on leaves", 1e-5),
        rel("gamma_decomposition", "Γ = ∇^g_Ω Ω + g(Ω,Γ) Ω", 1e-5),
        rel("nabla_vec_omega", "∇^vec Ω = 0", 1e-5),
        rel("omega_wedge_d_gamma", "Ω∧dΓ = 0", 1e-5),
    ];
    evaluate(m, "foliation", cfg, defs, |x| {
        let l = Local::at(m, x)?;
        let of = l.frame(&normal.eval(x));
        let ov = of.vector_components();
        let og: f64 = ov.iter().zip(&l.gamma_vec).map(|(a, b)| a * b).sum();
        let gn = l.gamma2.sqrt();
        let nab = nabla_form_all_raw(&m.metric, normal, x);
        let nab_scale = nab.iter().map(Form::max_abs).fold(0.0, f64::max);
        let mut out = Vec::new();

        let d = l.frame(&d_raw(&m.metric, normal, x));
        out.push(Dev::forms(&d, &wedge(&of, &l.gamma)?, gn.max(nab_scale)));

        let mut dev = Dev::default();
        for a in 0..n {
            let xa = l.unit(a);
            let along: f64 = xa.iter().zip(&ov).map(|(p, q)| p * q).sum();
            if along.abs() > 1e-12 {
                continue;
            }
            let rhs = Form::from_vector(&xa).scaled(&-og);
            dev = dev.max(Dev::forms(&nab[a], &rhs, gn.max(nab_scale)));
        }
        out.push(dev);

        let mut noo = Form::zero(n, 1);
        for (a, oa) in ov.iter().enumerate() {
            noo.axpy(oa, &nab[a]);
        }
        let mut rhs = noo.clone();
        rhs.axpy(&og, &of);
        out.push(Dev::forms(&l.gamma, &rhs, gn.max(nab_scale)));

        let mut dev = Dev::default();
        for a in 0..n {
            let mut v = nab[a].clone();
            v.axpy(&-ov[a], &l.gamma);
            v.axpy(&og, &Form::basis_vector(n, a));
            dev = dev.max(Dev::forms(&v, &Form::zero(n, 1), gn.max(nab_scale)));
        }
        out.push(dev);

        let dgam = l.frame(&d_raw(&m.metric, &m.gamma, x));
        let h = hessian(m, &m.gamma, x);
        let w = if n >= 3 { wedge(&of, &dgam)? } else { Form::zero(n, n.min(3)) };
        out.push(Dev::forms(&w, &Form::zero(n, w.degree()), h.amax().max(gn * nab_scale)));
        Ok(out)
    })
}

// ---------------------------------------------------------------------------
// rigidity of ∇^vec Γ = 0

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub model: String,
    pub premise_threshold: f64,
    pub points: usize,
    pub premise_points: usize,
    pub min_premise_residual: f64,
    pub max_premise_residual: f64,
    /// Largest relative error of `δΓ = (n−1)‖Γ‖²` where the premise holds.
    pub identity_error_on_premise: Option<f64>,
    /// Same error over all points, for comparison.
    pub identity_error_everywhere: f64,
    /// `holds`, `fails` or `vacuous`.
    pub implication: String,
    pub tolerance: f64,
}

/// Evaluates `∇^vec Γ` and both sides of `δΓ = (n−1)‖Γ‖²`; the implication
/// is tested at the points where the premise holds to `1e−6`.
pub fn verify_vec_rigidity(m: &Model, cfg: &VerifyConfig) -> Result<RigidityReport> {
    let threshold = 1e-6;
    let tol = cfg.tolerance.unwrap_or(1e-5);
    let n = m.n();
    let nf = n as f64;
    let points = sample_points(&m.metric, cfg);
    let per: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| -> Result<(f64, f64)> {
            let l = Local::at(m, x)?;
            let h = hessian(m, &m.gamma, x);
            let g = &l.gamma_vec;
            let mut premise = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let v = h[(a, b)] - g[a] * g[b] + if a == b { l.gamma2 } else { 0.0 };
                    premise = premise.max(v.abs());
                }
            }
            let dg = codifferential_raw(&m.metric, &m.gamma, x).coeff(&[]);
            let dev = Dev::scalar(dg, (nf - 1.0) * l.gamma2, 0.0);
            Ok((premise, dev.rel))
        })
        .collect::<Result<_>>()?;
    let on: Vec<f64> = per.iter().filter(|(p, _)| *p <= threshold).map(|(_, e)| *e).collect();
    let on_err = on.iter().cloned().reduce(f64::max);
    let implication = match on_err {
        None => "vacuous",
        Some(e) if e <= tol => "holds",
        Some(_) => "fails",
    };
    Ok(RigidityReport {
        model: m.name.clone(),
        premise_threshold: threshold,
        points: per.len(),
        premise_points: on.len(),
        min_premise_residual: per.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        max_premise_residual: per.iter().map(|p| p.0).fold(0.0, f64::max),
        identity_error_on_premise: on_err,
        identity_error_everywhere: per.iter().map(|p| p.1).fold(0.0, f64::max),
        implication: implication.into(),
        tolerance: tol,
    })
}

// ---------------------------------------------------------------------------
// Weyl comparison

/// `R^vec(X,Y)Z = R^w(X,Y)Z − dΓ(X,Y) Z`, `Ric^vec = Ric^w + dΓ`, and the
/// agreement of the symmetric parts.
pub fn verify_weyl(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let n = m.n();
    let vec = ConnectionSpec::Vectorial(m.gamma.clone());
    let weyl = ConnectionSpec::Weyl(m.gamma.clone());
    let defs = vec![
        rel("curvature_relation", "R^vec(X,Y)Z = R^w(X,Y)Z − dΓ(X,Y) Z", 1e-5),
        rel("ricci_relation", "Ric^vec = Ric^w + dΓ", 1e-5),
        rel("ricci_symmetric_parts", "sym Ric^vec = sym Ric^w", 1e-5),
    ];
    evaluate(m, "weyl", cfg, defs, |x| {
        m.metric.check_point(x)?;
        let rv = riemann_raw(&m.metric, &vec, x);
        let rw = riemann_raw(&m.metric, &weyl, x);
        let dg = form_tensor(&d_raw(&m.metric, &m.gamma, x));
        let scale = rw.max_abs().max(rv.max_abs());
        let mut shifted = rw.data.clone();
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    shifted[((l * n + l) * n + i) * n + j] -= dg[i * n + j];
                }
            }
        }
        let d_curv = Dev::of(&rv.data, &shifted, scale);
        let ricv = rv.ricci();
        let ricw = rw.ricci();
        let dgm = DMatrix::from_fn(n, n, |j, k| dg[j * n + k]);
        let rscale = ricv.amax().max(ricw.amax());
        let d_ric = Dev::matrices(&ricv, &(&ricw + &dgm), rscale);
        let sym = |a: &DMatrix<f64>| (a + a.transpose()) * 0.5;
        let d_sym = Dev::matrices(&sym(&ricv), &sym(&ricw), rscale);
        Ok(vec![d_curv, d_ric, d_sym])
    })
}

// ---------------------------------------------------------------------------
// plumbing

/// Internal consistency of the finite-difference machinery on a model.
pub fn verify_plumbing(m: &Model, cfg: &VerifyConfig) -> Result<ModelReport> {
    let n = m.n();
    let vec = ConnectionSpec::Vectorial(m.gamma.clone());
    let weyl = ConnectionSpec::Weyl(m.gamma.clone());
    let skew = m.torsion.clone().map(ConnectionSpec::Skew);
    let mut fields: Vec<(String, FormField)> = vec![("gamma".into(), m.gamma.clone())];
    for (w, tag) in m.invariant_forms.iter().zip(form_tags(m)) {
        fields.push((tag, w.clone()));
    }
    if let Some(t) = &m.torsion {
        fields.push(("torsion".into(), t.clone()));
    }
    let mut defs = vec![
        abs("christoffel_symmetry", "plumbing: Γ^k_ij = Γ^k_ji", 1e-8),
        abs("bianchi", "plumbing: first Bianchi identity", 1e-6),
        abs("ricci_symmetry", "plumbing: Ric^g symmetric", 1e-6),
        abs("metricity_levi_civita", "plumbing: ∇^g g = 0", 1e-6),
        abs("metricity_vectorial", "plumbing: ∇^vec g = 0", 1e-6),
        abs("vectorial_torsion", "plumbing: T^vec(X,Y) = g(Y,Γ)X − g(X,Γ)Y", 1e-6),
        abs("weyl_torsion_free", "plumbing: T^w = 0", 1e-6),
        abs("weyl_nonmetricity", "plumbing: ∇^w g = −2 Γ ⊗ g", 1e-6),
    ];
    if skew.is_some() {
        defs.push(abs("metricity_skew", "plumbing: ∇^c g = 0", 1e-6));
        defs.push(abs("skew_torsion", "plumbing: T^c(X,Y,Z) = given 3-form", 1e-6));
    }
    for (name, _) in &fields {
        defs.push(abs(format!("d_squared_{name}"), "plumbing: d∘d = 0", 1e-6));
        defs.push(abs(format!("codifferential_routes_{name}"), "plumbing: −Σ e_a⌟∇_{e_a} = ±*d*", 1e-6));
    }
    evaluate(m, "plumbing", cfg, defs, |x| {
        m.metric.check_point(x)?;
        let mut out = Vec::new();
        let zero = |v: f64| Dev { abs: v.abs(), rel: 0.0 };
        out.push(zero(m.metric.christoffel_raw(x).asymmetry()));
        let r = riemann_raw(&m.metric, &ConnectionSpec::LeviCivita, x);
        out.push(zero(r.bianchi_residual()));
        let ric = r.ricci();
        out.push(zero((&ric - ric.transpose()).amax()));
        let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        out.push(zero(maxabs(&metric_derivative(&m.metric, &ConnectionSpec::LeviCivita, x)?)));
        out.push(zero(maxabs(&metric_derivative(&m.metric, &vec, x)?)));

        let tv = torsion_tensor(&m.metric, &vec, x)?;
        let low = m.gamma.eval(x).vector_components();
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let expect = if k == i { low[j] } else { 0.0 } - if k == j { low[i] } else { 0.0 };
                    worst = worst.max((tv.get(k, i, j) - expect).abs());
                }
            }
        }
        out.push(zero(worst));
        out.push(zero(maxabs(&torsion_tensor(&m.metric, &weyl, x)?.data)));
        let md = metric_derivative(&m.metric, &weyl, x)?;
        let g = m.metric.g_raw(x);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((md[(i * n + j) * n + k] + 2.0 * low[i] * g[(j, k)]).abs());
                }
            }
        }
        out.push(zero(worst));

        if let (Some(s), Some(t)) = (&skew, &m.torsion) {
            out.push(zero(maxabs(&metric_derivative(&m.metric, s, x)?)));
            let ts = torsion_tensor(&m.metric, s, x)?;
            let tt = form_tensor(&t.eval(x));
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        let lowered: f64 = (0..n).map(|k| g[(l, k)] * ts.get(k, i, j)).sum();
                        worst = worst.max((lowered - tt[(i * n + j) * n + l]).abs());
                    }
                }
            }
            out.push(zero(worst));
        }
        for (_, f) in &fields {
            let dd = if f.degree + 2 <= n {
                d_raw(&m.metric, &d_field(&m.metric, f), x).max_abs()
            } else {
                0.0
            };
            out.push(zero(dd));
            let a = codifferential_raw(&m.metric, f, x);
            let b = codifferential_hodge(&m.metric, f, x)?;
            out.push(zero(Dev::forms(&a, &b, 0.0).abs));
        }
        Ok(out)
    })
}

/// Change of the Ricci tensors (Levi-Civita and vectorial) under step
/// halving at the centre of the box; passes when the second change is at
/// most a quarter of the first.
pub fn fd_convergence(m: &Model) -> Result<IdentityCheck> {
    let x = m.metric.domain.center();
    let steps = [0.04, 0.02, 0.01];
    let specs = [ConnectionSpec::LeviCivita, ConnectionSpec::Vectorial(m.gamma.clone())];
    let mut ratio = 0.0f64;
    let mut last = 0.0f64;
    for spec in &specs {
        let rics: Vec<DMatrix<f64>> = steps
            .iter()
            .map(|&h| {
                let metric = m.metric.with_fd(FdPolicy::new(h));
                metric.check_point(&x)?;
                Ok(riemann_raw(&metric, spec, &x).ricci())
            })
            .collect::<Result<_>>()?;
        let c1 = (&rics[1] - &rics[0]).amax();
        let c2 = (&rics[2] - &rics[1]).amax();
        last = last.max(c2);
        if c1 > 1e-10 {
            ratio = ratio.max(c2 / c1);
        }
    }
    Ok(IdentityCheck {
        id: "fd_convergence".into(),
        anchor: "plumbing: halving h shrinks the curvature change by at least 4".into(),
        measure: Measure::Absolute,
        max_abs_error: last,
        max_rel_error: ratio,
        tolerance: 0.25,
        points: 1,
        passed: ratio <= 0.25,
        note: Some(format!("largest change ratio {ratio:.3e}")),
    })
}
