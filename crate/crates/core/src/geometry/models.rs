//! Catalog of explicit model manifolds with a G-structure of vectorial
//! type: metric, the 1-form Γ, invariant form and spinor fields, and the
//! characteristic torsion when the group admits one.
//!
//! Conformal models use `g = e^{2f} δ` with the frame `e^{−f} ∂ᵢ`; in that
//! frame the invariant objects have constant components, which forces
//! `Γ = −df` and `Ωᵏ = e^{kf} Ωᵏ₀` in coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::chart::{ChartMetric, Domain, FdPolicy, PointFn};
use super::fields::{to_coords, to_frame, FormField, SpinorField};
use crate::clifford::{build_clifford, Spinor};
use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::groups::{self, cayley_form, g2_form, invariant_spinor_of, kahler_form, GroupId};
use crate::torsion::TorsionSolver;

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, f64)],
}

pub const CATALOG: &[ModelInfo] = &[
    ModelInfo {
        name: "flat",
        summary: "Euclidean space with a constant G2 (n=7), Spin(7) (n=8) or SU(2) (n=4) structure, Γ = 0",
        params: &[("n", 7.0)],
    },
    ModelInfo {
        name: "sphere",
        summary: "round sphere in a stereographic chart of dimension n",
        params: &[("n", 3.0)],
    },
    ModelInfo {
        name: "conformal_g2",
        summary: "e^{2f}δ on R^7, f = a(sin x1 + cos x2), conformally parallel G2 structure",
        params: &[("a", 0.05)],
    },
    ModelInfo {
        name: "conformal_spin7",
        summary: "e^{2f}δ on R^8, f = a(sin x1 + cos x2), conformally parallel Spin(7) structure",
        params: &[("a", 0.05)],
    },
    ModelInfo {
        name: "conformal_su2",
        summary: "e^{2f}δ on R^4, f = a(sin x1 + cos x2), SU(2) structure from a flat half-spinor",
        params: &[("a", 0.05)],
    },
    ModelInfo {
        name: "hopf_surface",
        summary: "|x|^{-2}δ on a box in R^4 minus 0 with the standard Kähler form",
        params: &[],
    },
    ModelInfo {
        name: "hopf6",
        summary: "|x|^{-2}δ on a box in R^6 minus 0 with the standard Kähler form",
        params: &[],
    },
    ModelInfo {
        name: "foliation_linear",
        summary: "warped product dt² + e^{2ct}δ, t the last coordinate, Ω = dt",
        params: &[("n", 4.0), ("c", 0.2)],
    },
    ModelInfo {
        name: "foliation_sine",
        summary: "warped product dt² + e^{2c sin t}δ, t the last coordinate, Ω = dt",
        params: &[("n", 4.0), ("c", 1.0)],
    },
    ModelInfo {
        name: "radial",
        summary: "flat R^n minus 0 with Γ = −d log|x|",
        params: &[("n", 4.0)],
    },
    ModelInfo {
        name: "hyperbolic",
        summary: "dt² + e^{2t}δ with Γ = −s dt; ∇^vec Γ = 0 exactly for s ∈ {0, 1}",
        params: &[("n", 4.0), ("s", 1.0)],
    },
    ModelInfo {
        name: "weyl_test",
        summary: "conformal metric on R^4 with a non-closed 1-form Γ",
        params: &[],
    },
];

pub fn model_names() -> Vec<String> {
    CATALOG.iter().map(|m| m.name.to_string()).collect()
}

#[derive(Clone)]
pub struct Model {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub metric: ChartMetric,
    pub group: Option<GroupId>,
    /// The 1-form Γ in coordinates.
    pub gamma: FormField,
    /// Invariant forms, coordinates; their frame components are constant.
    pub invariant_forms: Vec<FormField>,
    pub kahler: Option<FormField>,
    /// Invariant spinor in frame components.
    pub spinor: Option<SpinorField>,
    /// Characteristic torsion in coordinates.
    pub torsion: Option<FormField>,
    /// Unit normal 1-form of a codimension-one foliation.
    pub leaf_normal: Option<FormField>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("n", &self.metric.n)
            .field("group", &self.group)
            .finish()
    }
}

impl Model {
    pub fn n(&self) -> usize {
        self.metric.n
    }

    /// Builds a catalog model; `params` override the defaults listed in
    /// [`CATALOG`].
    pub fn build(name: &str, params: &BTreeMap<String, f64>, fd: FdPolicy) -> Result<Model> {
        let info = CATALOG.iter().find(|m| m.name == name).ok_or_else(|| Error::UnknownName {
            kind: "model".into(),
            name: name.into(),
            available: model_names(),
        })?;
        let mut p: BTreeMap<String, f64> = info.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in params {
            if !p.contains_key(k) {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    reason: format!("model {name} takes {:?}", info.params.iter().map(|x| x.0).collect::<Vec<_>>()),
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    reason: "must be finite".into(),
                });
            }
            p.insert(k.clone(), *v);
        }
        let int = |key: &str, lo: usize, hi: usize| -> Result<usize> {
            let v = p[key];
            if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
                return Err(Error::InvalidParameter {
                    name: key.into(),
                    reason: format!("expected an integer in {lo}..={hi}"),
                });
            }
            Ok(v as usize)
        };
        let mut model = match name {
            "flat" => flat(int("n", 2, 16)?, fd)?,
            "sphere" => sphere(int("n", 2, 16)?, fd),
            "conformal_g2" => conformal_group(GroupId::G2, 7, p["a"], fd)?,
            "conformal_spin7" => conformal_group(GroupId::Spin7, 8, p["a"], fd)?,
            "conformal_su2" => conformal_group(GroupId::Custom("SU2".into()), 4, p["a"], fd)?,
            "hopf_surface" => hopf(4, fd)?,
            "hopf6" => hopf(6, fd)?,
            "foliation_linear" => {
                let c = p["c"];
                foliation(int("n", 2, 16)?, Arc::new(move |t| c * t), Arc::new(move |_| c), fd)
            }
            "foliation_sine" => {
                let c = p["c"];
                foliation(
                    int("n", 2, 16)?,
                    Arc::new(move |t: f64| c * t.sin()),
                    Arc::new(move |t: f64| c * t.cos()),
                    fd,
                )
            }
            "radial" => radial(int("n", 2, 16)?, fd),
            "hyperbolic" => hyperbolic(int("n", 2, 16)?, p["s"], fd),
            "weyl_test" => weyl_test(fd),
            _ => unreachable!("catalog entry without constructor"),
        };
        model.name = name.into();
        model.params = p;
        Ok(model)
    }
}

fn bare(metric: ChartMetric) -> Model {
    let n = metric.n;
    Model {
        name: String::new(),
        params: BTreeMap::new(),
        metric,
        group: None,
        gamma: FormField::zero(n, 1),
        invariant_forms: Vec::new(),
        kahler: None,
        spinor: None,
        torsion: None,
        leaf_normal: None,
    }
}

/// Invariant forms used for a group: the defining form where there is one,
/// otherwise the computed invariant 2-forms.
fn defining_forms(group: &GroupId, n: usize) -> Result<Vec<Form<f64>>> {
    Ok(match group {
        GroupId::G2 => vec![g2_form()],
        GroupId::Spin7 => vec![cayley_form()],
        GroupId::Un => vec![kahler_form(n)],
        _ => {
            let b = groups::subalgebra(group, n)?;
            groups::invariant_forms(&b, 2)?.basis().to_vec()
        }
    })
}

/// Frame-constant spinor and characteristic-torsion map of a group.
fn group_data(group: &GroupId, n: usize) -> Result<(Option<Spinor>, Option<Vec<Form<f64>>>)> {
    let b = groups::subalgebra(group, n)?;
    let rep = build_clifford(n)?;
    let spinor = match group {
        GroupId::Custom(name) if name == "SU2" => Some(Spinor::basis(4, 0)),
        _ => invariant_spinor_of(&rep, &b)?,
    };
    let map = TorsionSolver::new(&b)?.linear_map()?;
    Ok((spinor, map))
}

/// Coordinate field of `Σ_a Γ_a T(e_a)` evaluated in the metric frame.
fn torsion_field(metric: &ChartMetric, gamma: &FormField, map: Vec<Form<f64>>) -> FormField {
    let m = metric.clone();
    let gamma = gamma.clone();
    FormField::new(m.n, 3, move |x| {
        let e = m.frame_raw(x);
        let gf = to_frame(&e, &gamma.eval(x)).vector_components();
        let mut t = Form::zero(m.n, 3);
        for (ga, ta) in gf.iter().zip(&map) {
            t.axpy(ga, ta);
        }
        to_coords(&e.clone().try_inverse().expect("frame is invertible"), &t)
    })
}

/// Conformal model on `e^{2f}δ` with the given G-structure data.
fn conformal(
    domain: Domain,
    f: PointFn<f64>,
    df: PointFn<Vec<f64>>,
    forms: Vec<Form<f64>>,
    fd: FdPolicy,
) -> Model {
    let n = domain.dim();
    let metric = ChartMetric::conformal(domain, f.clone(), fd);
    let mut model = bare(metric);
    model.gamma = FormField::new(n, 1, move |x| Form::from_vector(&df(x).iter().map(|v| -v).collect::<Vec<_>>()));
    model.invariant_forms = forms
        .into_iter()
        .map(|w| {
            let f = f.clone();
            let k = w.degree() as f64;
            FormField::new(n, w.degree(), move |x| w.scaled(&(k * f(x)).exp()))
        })
        .collect();
    model
}

fn attach_group(model: &mut Model, group: GroupId) -> Result<()> {
    let n = model.n();
    let (spinor, map) = group_data(&group, n)?;
    model.spinor = spinor.map(SpinorField::constant);
    model.torsion = map.map(|m| torsion_field(&model.metric, &model.gamma, m));
    model.group = Some(group);
    Ok(())
}

fn flat(n: usize, fd: FdPolicy) -> Result<Model> {
    let group = match n {
        4 => Some(GroupId::Custom("SU2".into())),
        7 => Some(GroupId::G2),
        8 => Some(GroupId::Spin7),
        _ => None,
    };
    let mut model = bare(ChartMetric::flat(Domain::cube(n, -0.5, 0.5), fd));
    if let Some(g) = group {
        model.invariant_forms = defining_forms(&g, n)?.into_iter().map(FormField::constant).collect();
        attach_group(&mut model, g)?;
    }
    Ok(model)
}

fn sphere(n: usize, fd: FdPolicy) -> Model {
    bare(ChartMetric::new(
        Domain::cube(n, -0.6, 0.6),
        move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            DMatrix::identity(n, n) * (4.0 / (1.0 + r2).powi(2))
        },
        fd,
    ))
}

fn conformal_group(group: GroupId, n: usize, a: f64, fd: FdPolicy) -> Result<Model> {
    let f: PointFn<f64> = Arc::new(move |x: &[f64]| a * (x[0].sin() + x[1].cos()));
    let df: PointFn<Vec<f64>> = Arc::new(move |x: &[f64]| {
        let mut v = vec![0.0; x.len()];
        v[0] = a * x[0].cos();
        v[1] = -a * x[1].sin();
        v
    });
    let forms = defining_forms(&group, n)?;
    let mut model = conformal(Domain::cube(n, -0.5, 0.5), f, df, forms, fd);
    attach_group(&mut model, group)?;
    Ok(model)
}

fn punctured_box(n: usize) -> Domain {
    let mut d = Domain::cube(n, -0.5, 0.5);
    d.lo[0] = 0.5;
    d.hi[0] = 1.5;
    d
}

fn hopf(n: usize, fd: FdPolicy) -> Result<Model> {
    let f: PointFn<f64> = Arc::new(|x: &[f64]| -0.5 * x.iter().map(|v| v * v).sum::<f64>().ln());
    let df: PointFn<Vec<f64>> = Arc::new(|x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        x.iter().map(|v| -v / r2).collect()
    });
    let omega = kahler_form(n);
    let mut model = conformal(punctured_box(n), f, df, vec![omega], fd);
    model.kahler = model.invariant_forms.first().cloned();
    attach_group(&mut model, GroupId::Un)?;
    Ok(model)
}

fn warped(n: usize, h: PointFn<f64>, fd: FdPolicy) -> ChartMetric {
    ChartMetric::new(
        Domain::cube(n, -0.5, 0.5),
        move |x| {
            let w = (2.0 * h(&[x[n - 1]])).exp();
            let mut g = DMatrix::identity(n, n) * w;
            g[(n - 1, n - 1)] = 1.0;
            g
        },
        fd,
    )
}

fn foliation(n: usize, h: Arc<dyn Fn(f64) -> f64 + Send + Sync>, dh: Arc<dyn Fn(f64) -> f64 + Send + Sync>, fd: FdPolicy) -> Model {
    let metric = warped(n, Arc::new(move |t: &[f64]| h(t[0])), fd);
    let mut model = bare(metric);
    let normal = Form::basis_vector(n, n - 1);
    model.gamma = FormField::new(n, 1, move |x| Form::basis_vector(n, n - 1).scaled(&-dh(x[n - 1])));
    model.leaf_normal = Some(FormField::constant(normal.clone()));
    model.invariant_forms = vec![FormField::constant(normal)];
    model.group = Some(GroupId::SoNm1);
    model
}

fn radial(n: usize, fd: FdPolicy) -> Model {
    let mut model = bare(ChartMetric::flat(punctured_box(n), fd));
    model.gamma = FormField::new(n, 1, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Form::from_vector(&x.iter().map(|v| -v / r2).collect::<Vec<_>>())
    });
    model
}

fn hyperbolic(n: usize, s: f64, fd: FdPolicy) -> Model {
    let mut model = bare(warped(n, Arc::new(|t: &[f64]| t[0]), fd));
    model.gamma = FormField::constant(Form::basis_vector(n, n - 1).scaled(&-s));
    model
}

fn weyl_test(fd: FdPolicy) -> Model {
    let f: PointFn<f64> = Arc::new(|x: &[f64]| 0.1 * (x[0] + 0.5 * x[2]).sin());
    let mut model = bare(ChartMetric::conformal(Domain::cube(4, -0.5, 0.5), f, fd));
    model.gamma = FormField::new(4, 1, |x| {
        Form::from_vector(&[0.3 * x[1].sin(), 0.3 * x[0] * x[2], 0.0, -0.3 * x[0].cos()])
    });
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::frame_field;

    #[test]
    fn catalog_builds() {
        for info in CATALOG {
            let m = Model::build(info.name, &BTreeMap::new(), FdPolicy::default()).unwrap();
            let x = m.metric.domain.center();
            assert!(m.metric.metric(&x).is_ok(), "{}", info.name);
        }
    }

    #[test]
    fn unknown_model_and_parameter() {
        assert!(matches!(
            Model::build("torus", &BTreeMap::new(), FdPolicy::default()),
            Err(Error::UnknownName { .. })
        ));
        let p = BTreeMap::from([("zz".to_string(), 1.0)]);
        assert!(matches!(
            Model::build("flat", &p, FdPolicy::default()),
            Err(Error::InvalidParameter { .. })
        ));
        let p = BTreeMap::from([("n".to_string(), 2.5)]);
        assert!(Model::build("radial", &p, FdPolicy::default()).is_err());
    }

    #[test]
    fn conformal_forms_are_frame_constant() {
        let m = Model::build("conformal_g2", &BTreeMap::new(), FdPolicy::default()).unwrap();
        let ff = frame_field(&m.metric, &m.invariant_forms[0]);
        let a = ff.eval(&[0.1, 0.2, 0.0, 0.0, -0.3, 0.0, 0.1]);
        let b = ff.eval(&[-0.4, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0]);
        assert!(a.distance(&b) < 1e-12);
        assert!(a.distance(&g2_form()) < 1e-12);
    }

    #[test]
    fn hopf_gamma_has_unit_length() {
        let m = Model::build("hopf_surface", &BTreeMap::new(), FdPolicy::default()).unwrap();
        let x = [1.0, 0.0, 0.0, 0.0];
        let e = m.metric.frame(&x).unwrap();
        let gf = to_frame(&e, &m.gamma.eval(&x));
        assert!((crate::exterior::form_norm2(&gf) - 1.0).abs() < 1e-14);
    }
}
