//! Tensor and spinor fields on a chart, frame changes, `d`, `δ` and
//! covariant derivatives.
//!
//! Form fields are stored in coordinates (`dx^i`). Spinor fields are stored
//! in the Gram–Schmidt frame of the metric. Results that are naturally frame
//! quantities (covariant derivatives, codifferentials) are returned in frame
//! components; use [`to_frame`] / [`to_coords`] to move between the two.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::{ChartMetric, ConnectionSpec, PointFn};
use crate::clifford::{CliffordRep, Spinor, C64};
use crate::error::{Error, Result};
use crate::exterior::{hodge, interior_basis, wedge, Blade, Form, FormBasis};
use crate::groups::rho_star;

#[derive(Clone)]
pub struct FormField {
    pub n: usize,
    pub degree: usize,
    f: PointFn<Form<f64>>,
}

impl std::fmt::Debug for FormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FormField(n={}, degree={})", self.n, self.degree)
    }
}

impl FormField {
    pub fn new(n: usize, degree: usize, f: impl Fn(&[f64]) -> Form<f64> + Send + Sync + 'static) -> Self {
        FormField {
            n,
            degree,
            f: Arc::new(f),
        }
    }

    pub fn constant(form: Form<f64>) -> Self {
        let (n, degree) = (form.n(), form.degree());
        Self::new(n, degree, move |_| form.clone())
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        Self::constant(Form::zero(n, degree))
    }

    pub fn eval(&self, x: &[f64]) -> Form<f64> {
        (self.f)(x)
    }
}

/// Vector field in coordinate components.
#[derive(Clone)]
pub struct VectorField {
    pub n: usize,
    f: PointFn<Vec<f64>>,
}

impl VectorField {
    pub fn new(n: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VectorField { n, f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    /// Metric dual of a 1-form field.
    pub fn sharp(m: &ChartMetric, a: &FormField) -> Self {
        let (m, a) = (m.clone(), a.clone());
        VectorField::new(m.n, move |x| {
            let ginv = m.g_raw(x).try_inverse().expect("metric is invertible");
            (ginv * DVector::from_vec(a.eval(x).vector_components())).as_slice().to_vec()
        })
    }
}

/// Spinor field in frame components.
#[derive(Clone)]
pub struct SpinorField {
    pub n: usize,
    f: PointFn<Spinor>,
}

impl SpinorField {
    pub fn new(n: usize, f: impl Fn(&[f64]) -> Spinor + Send + Sync + 'static) -> Self {
        SpinorField { n, f: Arc::new(f) }
    }

    pub fn constant(psi: Spinor) -> Self {
        let n = psi.n();
        Self::new(n, move |_| psi.clone())
    }

    pub fn eval(&self, x: &[f64]) -> Spinor {
        (self.f)(x)
    }
}

// ---------------------------------------------------------------------------
// frame changes

/// Coordinate form → frame components, `dx^i = Σ_a E^i_a θ^a`.
pub fn to_frame(e: &DMatrix<f64>, a: &Form<f64>) -> Form<f64> {
    let n = e.nrows();
    let images: Vec<Form<f64>> = (0..n)
        .map(|i| Form::from_vector(&e.row(i).iter().copied().collect::<Vec<_>>()))
        .collect();
    a.substitute(&images)
}

/// Frame form → coordinates, `θ^a = Σ_i (E⁻¹)^a_i dx^i`.
pub fn to_coords(einv: &DMatrix<f64>, a: &Form<f64>) -> Form<f64> {
    to_frame(einv, a)
}

pub fn vector_to_frame(einv: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (einv * DVector::from_column_slice(v)).as_slice().to_vec()
}

pub fn vector_to_coords(e: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (e * DVector::from_column_slice(v)).as_slice().to_vec()
}

fn inverse(e: &DMatrix<f64>) -> DMatrix<f64> {
    e.clone().try_inverse().expect("frame is invertible")
}

/// Frame components of a coordinate form field, as a field.
pub fn frame_field(m: &ChartMetric, a: &FormField) -> FormField {
    let (m, a) = (m.clone(), a.clone());
    FormField::new(m.n, a.degree, move |x| to_frame(&m.frame_raw(x), &a.eval(x)))
}

/// Coordinate field from frame components.
pub fn coords_field(m: &ChartMetric, a: &FormField) -> FormField {
    let (m, a) = (m.clone(), a.clone());
    FormField::new(m.n, a.degree, move |x| to_coords(&inverse(&m.frame_raw(x)), &a.eval(x)))
}

// ---------------------------------------------------------------------------
// exterior derivative and codifferential

pub(crate) fn d_raw(m: &ChartMetric, a: &FormField, x: &[f64]) -> Form<f64> {
    let n = m.n;
    let k = a.degree;
    if k >= n {
        return Form::zero(n, n.min(k + 1));
    }
    let basis = FormBasis::new(n, k);
    let f = |y: &[f64]| basis.coords(&a.eval(y));
    let grads = m.fd.gradient(&f, x);
    let mut out = Form::zero(n, k + 1);
    for (i, gi) in grads.iter().enumerate() {
        let di = basis.from_coords(gi);
        let w = wedge(&Form::basis_vector(n, i), &di).expect("degree fits");
        out.axpy(&1.0, &w);
    }
    out
}

/// `dα` in coordinates.
pub fn exterior_derivative(m: &ChartMetric, a: &FormField, x: &[f64]) -> Result<Form<f64>> {
    m.check_point(x)?;
    check_field(m, a)?;
    Ok(d_raw(m, a, x))
}

/// `dα` as a coordinate field.
pub fn d_field(m: &ChartMetric, a: &FormField) -> FormField {
    let (m, a) = (m.clone(), a.clone());
    let k = (a.degree + 1).min(m.n);
    FormField::new(m.n, k, move |x| d_raw(&m, &a, x))
}

fn check_field(m: &ChartMetric, a: &FormField) -> Result<()> {
    if a.n != m.n {
        return Err(Error::DimensionMismatch {
            expected: m.n,
            found: a.n,
        });
    }
    Ok(())
}

/// Levi-Civita connection form `ω_{ab} = g(∇_X e_a, e_b)` of the frame, for
/// `X` given in frame components.
pub fn connection_form(m: &ChartMetric, x: &[f64], xframe: &[f64]) -> Result<Form<f64>> {
    m.check_point(x)?;
    Ok(connection_form_raw(m, x, xframe))
}

pub(crate) fn connection_form_raw(m: &ChartMetric, x: &[f64], xframe: &[f64]) -> Form<f64> {
    let n = m.n;
    let e = m.frame_raw(x);
    let g = m.g_raw(x);
    let xc = vector_to_coords(&e, xframe);
    let c = m.christoffel_raw(x);
    let fe = |y: &[f64]| m.frame_raw(y).as_slice().to_vec();
    let de = DMatrix::from_column_slice(n, n, &m.fd.directional(&fe, x, &xc));
    let cx = DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| c.get(k, i, j) * xc[i]).sum::<f64>());
    let a = e.transpose() * &g * (de + cx * &e);
    let mut w = Form::zero(n, 2);
    for p in 0..n {
        for q in p + 1..n {
            let v = 0.5 * (a[(q, p)] - a[(p, q)]);
            if v != 0.0 {
                w.add_term(Blade::from_sorted(&[p, q]), v);
            }
        }
    }
    w
}

/// `∇^g_{e_a} α` in frame components for every frame vector `e_a`.
pub(crate) fn nabla_form_all_raw(m: &ChartMetric, a: &FormField, x: &[f64]) -> Vec<Form<f64>> {
    let n = m.n;
    let k = a.degree;
    let basis = FormBasis::new(n, k);
    let f = |y: &[f64]| basis.coords(&to_frame(&m.frame_raw(y), &a.eval(y)));
    let grads = m.fd.gradient(&f, x);
    let e = m.frame_raw(x);
    let af = to_frame(&e, &a.eval(x));
    (0..n)
        .map(|p| {
            let mut xf = vec![0.0; n];
            xf[p] = 1.0;
            let xc = vector_to_coords(&e, &xf);
            let mut dv = vec![0.0; basis.dim()];
            for (i, gi) in grads.iter().enumerate() {
                for (d, g) in dv.iter_mut().zip(gi) {
                    *d += xc[i] * g;
                }
            }
            let mut out = basis.from_coords(&dv);
            if k > 0 {
                let w = connection_form_raw(m, x, &xf);
                out.axpy(&1.0, &rho_star(&w, &af).expect("2-form"));
            }
            out
        })
        .collect()
}

/// `∇^g_X α` in frame components, `X` in frame components.
pub fn nabla_form(m: &ChartMetric, a: &FormField, xframe: &[f64], x: &[f64]) -> Result<Form<f64>> {
    m.check_point(x)?;
    check_field(m, a)?;
    let all = nabla_form_all_raw(m, a, x);
    let mut out = Form::zero(m.n, a.degree);
    for (p, v) in xframe.iter().enumerate() {
        out.axpy(v, &all[p]);
    }
    Ok(out)
}

/// Matrix `(∇_{e_a} α)(e_b)` of a 1-form field.
pub fn covariant_hessian(m: &ChartMetric, a: &FormField, x: &[f64]) -> Result<DMatrix<f64>> {
    m.check_point(x)?;
    if a.degree != 1 {
        return Err(Error::WrongDegree {
            expected: "1".into(),
            found: a.degree,
        });
    }
    let all = nabla_form_all_raw(m, a, x);
    Ok(DMatrix::from_fn(m.n, m.n, |p, q| all[p].coeff(&[q])))
}

pub(crate) fn codifferential_raw(m: &ChartMetric, a: &FormField, x: &[f64]) -> Form<f64> {
    let n = m.n;
    if a.degree == 0 {
        return Form::zero(n, 0);
    }
    let all = nabla_form_all_raw(m, a, x);
    let mut out = Form::zero(n, a.degree - 1);
    for (p, v) in all.iter().enumerate() {
        out.axpy(&-1.0, &interior_basis(p, v));
    }
    out
}

/// `δα = −Σ e_a ⌟ ∇_{e_a} α`, frame components.
pub fn codifferential(m: &ChartMetric, a: &FormField, x: &[f64]) -> Result<Form<f64>> {
    m.check_point(x)?;
    check_field(m, a)?;
    Ok(codifferential_raw(m, a, x))
}

/// `δα = (−1)^{n(k+1)+1} * d * α`, frame components.
pub fn codifferential_hodge(m: &ChartMetric, a: &FormField, x: &[f64]) -> Result<Form<f64>> {
    m.check_point(x)?;
    check_field(m, a)?;
    let n = m.n;
    let k = a.degree;
    if k == 0 {
        return Ok(Form::zero(n, 0));
    }
    let star = {
        let (m, a) = (m.clone(), a.clone());
        FormField::new(n, n - k, move |y| {
            let e = m.frame_raw(y);
            to_coords(&inverse(&e), &hodge(&to_frame(&e, &a.eval(y))))
        })
    };
    let dstar = to_frame(&m.frame_raw(x), &d_raw(m, &star, x));
    let sign = if (n * (k + 1) + 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(hodge(&dstar).scaled(&sign))
}

/// Codifferential as a coordinate field.
pub fn codifferential_field(m: &ChartMetric, a: &FormField) -> FormField {
    let (m, a) = (m.clone(), a.clone());
    let k = a.degree.saturating_sub(1);
    FormField::new(m.n, k, move |x| to_coords(&inverse(&m.frame_raw(x)), &codifferential_raw(&m, &a, x)))
}

// ---------------------------------------------------------------------------
// spinors

/// `∇_X Ψ` for a metric connection, `X` in frame components.
///
/// The Levi-Civita part is `X(Ψ) + ½ ω_X · Ψ` with the frame connection form
/// `ω_X`; the vectorial and skew connections add `−½ (X∧Γ)·Ψ` and
/// `¼ (X⌟T)·Ψ`.
pub fn spinor_nabla(
    m: &ChartMetric,
    spec: &ConnectionSpec,
    rep: &CliffordRep,
    psi: &SpinorField,
    xframe: &[f64],
    x: &[f64],
) -> Result<Spinor> {
    m.check_point(x)?;
    if rep.n() != m.n || psi.n != m.n {
        return Err(Error::DimensionMismatch {
            expected: m.n,
            found: rep.n(),
        });
    }
    let n = m.n;
    let e = m.frame_raw(x);
    let xc = vector_to_coords(&e, xframe);
    let f = |y: &[f64]| {
        psi.eval(y)
            .components
            .iter()
            .flat_map(|c| [c.re, c.im])
            .collect::<Vec<f64>>()
    };
    let d = m.fd.directional(&f, x, &xc);
    let dpsi = DVector::from_iterator(d.len() / 2, d.chunks(2).map(|c| C64::new(c[0], c[1])));
    let p0 = psi.eval(x);
    let w = connection_form_raw(m, x, xframe);
    let mut out = Spinor::new(n, dpsi)?.add(&rep.act(&w, &p0)?.scaled(C64::new(0.5, 0.0)));
    match spec {
        ConnectionSpec::LeviCivita => {}
        ConnectionSpec::Vectorial(gamma) => {
            let gf = to_frame(&e, &gamma.eval(x));
            let xg = wedge(&Form::from_vector(xframe), &gf)?;
            out = out.sub(&rep.act(&xg, &p0)?.scaled(C64::new(0.5, 0.0)));
        }
        ConnectionSpec::Skew(t) => {
            let tf = to_frame(&e, &t.eval(x));
            let xt = crate::exterior::interior_vec(xframe, &tf)?;
            out = out.add(&rep.act(&xt, &p0)?.scaled(C64::new(0.25, 0.0)));
        }
        ConnectionSpec::Weyl(_) => {
            return Err(Error::Refused("the Weyl connection is not metric and does not act on spinors".into()));
        }
    }
    Ok(out)
}

/// Largest deviation of `∇Ψ = ½ (X∧Γ)·Ψ`-type identities is computed by the
/// verifiers; this helper returns `½ (X∧Γ)·Ψ` in the frame.
pub fn half_x_wedge_gamma(rep: &CliffordRep, xframe: &[f64], gamma_frame: &Form<f64>, psi: &Spinor) -> Result<Spinor> {
    let xg = wedge(&Form::from_vector(xframe), gamma_frame)?;
    Ok(rep.act(&xg, psi)?.scaled(C64::new(0.5, 0.0)))
}
