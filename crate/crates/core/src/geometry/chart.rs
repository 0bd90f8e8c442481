//! Coordinate charts: finite-difference policy, metrics, connection
//! coefficients and curvature.
//!
//! Index conventions: `∇_{∂ᵢ}∂ⱼ = C^k_{ij} ∂_k`,
//! `R(∂ᵢ,∂ⱼ)∂_k = R^l_{kij} ∂_l` with `R(X,Y) = [∇_X,∇_Y] − ∇_{[X,Y]}`, and
//! `Ric_{jk} = Σᵢ R^i_{kij}`, i.e. `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Blade, Form};

pub type PointFn<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// Central differences with optional one-level Richardson extrapolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdPolicy {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdPolicy {
    fn default() -> Self {
        FdPolicy {
            step: 1e-4,
            richardson: true,
        }
    }
}

impl FdPolicy {
    pub fn new(step: f64) -> Self {
        FdPolicy {
            step,
            richardson: true,
        }
    }

    /// Distance from the boundary required at evaluation points; nested
    /// differences reach `2h`.
    pub fn margin(&self) -> f64 {
        4.0 * self.step
    }

    pub fn partial(&self, f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], i: usize) -> Vec<f64> {
        let central = |h: f64| -> Vec<f64> {
            let mut xp = x.to_vec();
            xp[i] += h;
            let mut xm = x.to_vec();
            xm[i] -= h;
            let (a, b) = (f(&xp), f(&xm));
            a.iter().zip(&b).map(|(p, m)| (p - m) / (2.0 * h)).collect()
        };
        let d1 = central(self.step);
        if !self.richardson {
            return d1;
        }
        let d2 = central(self.step / 2.0);
        d2.iter().zip(&d1).map(|(a, b)| (4.0 * a - b) / 3.0).collect()
    }

    /// `[i][component]` table of partial derivatives.
    pub fn gradient(&self, f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<Vec<f64>> {
        (0..x.len()).map(|i| self.partial(f, x, i)).collect()
    }

    /// `Σ vᵢ ∂ᵢ f`.
    pub fn directional(&self, f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out: Option<Vec<f64>> = None;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            let d = self.partial(f, x, i);
            match out.as_mut() {
                Some(acc) => acc.iter_mut().zip(&d).for_each(|(a, b)| *a += vi * b),
                None => out = Some(d.iter().map(|b| vi * b).collect()),
            }
        }
        out.unwrap_or_else(|| vec![0.0; f(x).len()])
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Domain {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn check(&self, x: &[f64], margin: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let inside = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a + margin && *v <= b - margin);
        if inside {
            Ok(())
        } else {
            Err(Error::DomainMargin { margin })
        }
    }

    /// Uniform sample from the box shrunk by `margin` on every side.
    pub fn sample<R: Rng>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| rng.random_range((a + margin)..(b - margin)))
            .collect()
    }
}

/// Connection coefficients `C^k_{ij}` (or Christoffel symbols).
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Coefficients {
    pub fn zeros(n: usize) -> Self {
        Coefficients {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.n + i) * self.n + j
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    /// Largest `|C^k_{ij} − C^k_{ji}|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// `R^l_{kij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Curvature {
    #[inline]
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.data[((l * n + k) * n + i) * n + j]
    }

    /// `Ric_{jk} = Σᵢ R^i_{kij}`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| self.get(i, k, i, j)).sum())
    }

    /// Largest first-Bianchi residual `R^l_{kij} + R^l_{ijk} + R^l_{jki}`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = self.get(l, k, i, j) + self.get(l, i, j, k) + self.get(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Riemannian metric on a coordinate box.
#[derive(Clone)]
pub struct ChartMetric {
    pub n: usize,
    pub domain: Domain,
    g: PointFn<DMatrix<f64>>,
    pub fd: FdPolicy,
}

impl std::fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartMetric")
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field("fd", &self.fd)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(
        domain: Domain,
        g: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        fd: FdPolicy,
    ) -> Self {
        ChartMetric {
            n: domain.dim(),
            domain,
            g: Arc::new(g),
            fd,
        }
    }

    /// `e^{2f} δ`.
    pub fn conformal(domain: Domain, f: PointFn<f64>, fd: FdPolicy) -> Self {
        let n = domain.dim();
        Self::new(domain, move |x| DMatrix::identity(n, n) * (2.0 * f(x)).exp(), fd)
    }

    pub fn flat(domain: Domain, fd: FdPolicy) -> Self {
        let n = domain.dim();
        Self::new(domain, move |_| DMatrix::identity(n, n), fd)
    }

    pub fn with_fd(&self, fd: FdPolicy) -> Self {
        ChartMetric { fd, ..self.clone() }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.domain.check(x, self.fd.margin())
    }

    pub(crate) fn g_raw(&self, x: &[f64]) -> DMatrix<f64> {
        (self.g)(x)
    }

    /// Metric matrix; fails unless symmetric positive definite.
    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.g_raw(x);
        let asym = (&g - g.transpose()).amax();
        if asym > 1e-12 * g.amax().max(1.0) || g.clone().cholesky().is_none() {
            return Err(Error::NonPositiveMetric);
        }
        Ok(g)
    }

    pub fn christoffel(&self, x: &[f64]) -> Result<Coefficients> {
        self.check_point(x)?;
        self.metric(x)?;
        Ok(self.christoffel_raw(x))
    }

    pub(crate) fn christoffel_raw(&self, x: &[f64]) -> Coefficients {
        let n = self.n;
        let g = self.g_raw(x);
        let ginv = g.clone().try_inverse().expect("metric is invertible");
        let f = |y: &[f64]| self.g_raw(y).as_slice().to_vec();
        let dg = self.fd.gradient(&f, x);
        // column-major storage: entry (i, j) sits at i + j n
        let d = |k: usize, i: usize, j: usize| dg[k][i + j * n];
        let mut c = Coefficients::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        let gkl = ginv[(k, l)];
                        if gkl != 0.0 {
                            s += gkl * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                        }
                    }
                    let idx_ij = c.idx(k, i, j);
                    let idx_ji = c.idx(k, j, i);
                    c.data[idx_ij] = 0.5 * s;
                    c.data[idx_ji] = 0.5 * s;
                }
            }
        }
        c
    }

    /// Orthonormal frame by Gram–Schmidt on `∂₁,…,∂ₙ` in index order;
    /// column `a` holds the coordinates of `e_a`.
    pub fn frame(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.metric(x)?;
        gram_schmidt_frame(&g)
    }

    pub(crate) fn frame_raw(&self, x: &[f64]) -> DMatrix<f64> {
        gram_schmidt_frame(&self.g_raw(x)).expect("frame defined on the domain")
    }
}

pub(crate) fn gram_schmidt_frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let mut e = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let mut v = nalgebra::DVector::<f64>::zeros(n);
        v[a] = 1.0;
        for b in 0..a {
            let eb = e.column(b).into_owned();
            let ip = (v.transpose() * g * &eb)[(0, 0)];
            v -= eb * ip;
        }
        let nn = (v.transpose() * g * &v)[(0, 0)];
        if !(nn > 0.0) {
            return Err(Error::FrameDegenerate);
        }
        e.set_column(a, &(v / nn.sqrt()));
    }
    Ok(e)
}

/// Full antisymmetric component array of a k-form (k = 2 or 3) in the
/// same basis: `t[i][j]` or `t[(i n + j) n + l]`.
pub fn form_tensor(f: &Form<f64>) -> Vec<f64> {
    let n = f.n();
    let k = f.degree();
    let mut out = vec![0.0; n.pow(k as u32)];
    let perms: &[(&[usize], f64)] = match k {
        1 => &[(&[0], 1.0)],
        2 => &[(&[0, 1], 1.0), (&[1, 0], -1.0)],
        3 => &[
            (&[0, 1, 2], 1.0),
            (&[1, 2, 0], 1.0),
            (&[2, 0, 1], 1.0),
            (&[1, 0, 2], -1.0),
            (&[0, 2, 1], -1.0),
            (&[2, 1, 0], -1.0),
        ],
        _ => panic!("form_tensor supports degrees 1 to 3"),
    };
    for (b, c) in f.terms() {
        let idx = b.to_vec();
        for (p, s) in perms {
            let pos = p.iter().fold(0usize, |acc, &q| acc * n + idx[q]);
            out[pos] = s * c;
        }
    }
    out
}

/// Inverse of [`form_tensor`] for 2-forms: `ω_{ij}` for `i < j`.
pub fn two_form_from_tensor(n: usize, t: &[f64]) -> Form<f64> {
    let mut f = Form::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = t[i * n + j];
            if v != 0.0 {
                f.add_term(Blade::from_sorted(&[i, j]), v);
            }
        }
    }
    f
}

// ---------------------------------------------------------------------------
// connections

/// Metric connections built from the Levi-Civita connection and a field.
#[derive(Clone)]
pub enum ConnectionSpec {
    LeviCivita,
    /// `∇_X Y = ∇^g_X Y − g(X,Y)Γ + g(Y,Γ)X`; the field is the 1-form Γ.
    Vectorial(super::fields::FormField),
    /// `∇^vec + Γ(X)·Id`, torsion free but not metric.
    Weyl(super::fields::FormField),
    /// `∇^g + ½ T(X,Y,·)`; the field is the 3-form T.
    Skew(super::fields::FormField),
}

impl ConnectionSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ConnectionSpec::LeviCivita => "levi_civita",
            ConnectionSpec::Vectorial(_) => "vectorial",
            ConnectionSpec::Weyl(_) => "weyl",
            ConnectionSpec::Skew(_) => "skew",
        }
    }
}

pub(crate) fn coefficients_raw(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Coefficients {
    let mut c = m.christoffel_raw(x);
    let n = m.n;
    match spec {
        ConnectionSpec::LeviCivita => {}
        ConnectionSpec::Vectorial(gamma) | ConnectionSpec::Weyl(gamma) => {
            let g = m.g_raw(x);
            let ginv = g.clone().try_inverse().expect("metric is invertible");
            let low = gamma.eval(x).vector_components();
            let up = &ginv * nalgebra::DVector::from_vec(low.clone());
            let weyl = matches!(spec, ConnectionSpec::Weyl(_));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = -g[(i, j)] * up[k];
                        if k == i {
                            v += low[j];
                        }
                        if weyl && k == j {
                            v += low[i];
                        }
                        let idx = c.idx(k, i, j);
                        c.data[idx] += v;
                    }
                }
            }
        }
        ConnectionSpec::Skew(t) => {
            let g = m.g_raw(x);
            let ginv = g.try_inverse().expect("metric is invertible");
            let tt = form_tensor(&t.eval(x));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s: f64 = (0..n).map(|l| ginv[(k, l)] * tt[(i * n + j) * n + l]).sum();
                        let idx = c.idx(k, i, j);
                        c.data[idx] += 0.5 * s;
                    }
                }
            }
        }
    }
    c
}

pub fn connection_coefficients(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<Coefficients> {
    m.check_point(x)?;
    m.metric(x)?;
    Ok(coefficients_raw(m, spec, x))
}

/// `∇_X Y` in coordinates for a coordinate vector `X` and a vector field.
pub fn connection_nabla(
    m: &ChartMetric,
    spec: &ConnectionSpec,
    xvec: &[f64],
    y: &super::fields::VectorField,
    x: &[f64],
) -> Result<Vec<f64>> {
    let c = connection_coefficients(m, spec, x)?;
    Ok(nabla_with(&c, m.fd, xvec, y, x))
}

pub(crate) fn nabla_with(
    c: &Coefficients,
    fd: FdPolicy,
    xvec: &[f64],
    y: &super::fields::VectorField,
    x: &[f64],
) -> Vec<f64> {
    let n = c.n;
    let f = |p: &[f64]| y.eval(p);
    let mut out = fd.directional(&f, x, xvec);
    let yv = y.eval(x);
    for k in 0..n {
        for i in 0..n {
            if xvec[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[k] += c.get(k, i, j) * xvec[i] * yv[j];
            }
        }
    }
    out
}

pub(crate) fn riemann_raw(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Curvature {
    let n = m.n;
    let c = coefficients_raw(m, spec, x);
    let f = |y: &[f64]| coefficients_raw(m, spec, y).data;
    let dc = m.fd.gradient(&f, x);
    let mut r = vec![0.0; n.pow(4)];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dc[i][c.idx(l, j, k)] - dc[j][c.idx(l, i, k)];
                    for q in 0..n {
                        v += c.get(l, i, q) * c.get(q, j, k) - c.get(l, j, q) * c.get(q, i, k);
                    }
                    r[((l * n + k) * n + i) * n + j] = v;
                }
            }
        }
    }
    Curvature { n, data: r }
}

pub fn riemann(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<Curvature> {
    m.check_point(x)?;
    m.metric(x)?;
    Ok(riemann_raw(m, spec, x))
}

pub fn ricci(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(riemann(m, spec, x)?.ricci())
}

pub fn scal(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<f64> {
    let ric = ricci(m, spec, x)?;
    let ginv = m.metric(x)?.try_inverse().expect("metric is invertible");
    Ok(ginv.component_mul(&ric).sum())
}

/// Torsion `T^k_{ij} = C^k_{ij} − C^k_{ji}`.
pub fn torsion_tensor(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<Coefficients> {
    let c = connection_coefficients(m, spec, x)?;
    let mut t = Coefficients::zeros(m.n);
    for k in 0..m.n {
        for i in 0..m.n {
            for j in 0..m.n {
                let idx = t.idx(k, i, j);
                t.data[idx] = c.get(k, i, j) - c.get(k, j, i);
            }
        }
    }
    Ok(t)
}

/// `(∇_i g)_{jk} = ∂ᵢg_{jk} − C^l_{ij} g_{lk} − C^l_{ik} g_{jl}` as `[i][j][k]`.
pub fn metric_derivative(m: &ChartMetric, spec: &ConnectionSpec, x: &[f64]) -> Result<Vec<f64>> {
    let n = m.n;
    let c = connection_coefficients(m, spec, x)?;
    let g = m.g_raw(x);
    let f = |y: &[f64]| m.g_raw(y).as_slice().to_vec();
    let dg = m.fd.gradient(&f, x);
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = dg[i][j + k * n];
                for l in 0..n {
                    v -= c.get(l, i, j) * g[(l, k)] + c.get(l, i, k) * g[(j, l)];
                }
                out[(i * n + j) * n + k] = v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::{FormField, VectorField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere(dim: usize) -> ChartMetric {
        ChartMetric::new(
            Domain::cube(dim, -0.6, 0.6),
            move |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                DMatrix::identity(dim, dim) * (4.0 / (1.0 + r2).powi(2))
            },
            FdPolicy::default(),
        )
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let m = ChartMetric::flat(Domain::cube(3, -1.0, 1.0), FdPolicy::default());
        let x = [0.1, 0.2, -0.3];
        assert!(m.christoffel(&x).unwrap().data.iter().all(|&v| v == 0.0));
        assert_eq!(riemann(&m, &ConnectionSpec::LeviCivita, &x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn stereographic_sphere_scalar_curvature() {
        for dim in [2usize, 3, 4] {
            let m = sphere(dim);
            let x: Vec<f64> = (0..dim).map(|i| 0.1 * i as f64 - 0.05).collect();
            let s = scal(&m, &ConnectionSpec::LeviCivita, &x).unwrap();
            let expect = (dim * (dim - 1)) as f64;
            assert!((s - expect).abs() < 1e-6 * expect, "dim {dim}: {s}");
            let r = riemann(&m, &ConnectionSpec::LeviCivita, &x).unwrap();
            assert!(r.bianchi_residual() < 1e-6);
            let ric = r.ricci();
            assert!((&ric - ric.transpose()).amax() < 1e-6);
        }
    }

    #[test]
    fn conformal_ricci_matches_classical_formula() {
        // Ric = −(n−2)(∇²f − df⊗df) − (Δf + (n−2)|df|²) δ for g = e^{2f}δ
        let n = 4;
        let f: PointFn<f64> = Arc::new(|x: &[f64]| 0.1 * x[0].sin());
        let m = ChartMetric::conformal(Domain::cube(n, -1.0, 1.0), f, FdPolicy::default());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x = m.domain.sample(&mut rng, 0.01);
            let ric = ricci(&m, &ConnectionSpec::LeviCivita, &x).unwrap();
            let (f1, f11) = (0.1 * x[0].cos(), -0.1 * x[0].sin());
            let mut expect = DMatrix::<f64>::zeros(n, n);
            expect[(0, 0)] = -((n - 2) as f64) * (f11 - f1 * f1);
            for i in 0..n {
                expect[(i, i)] -= f11 + (n - 2) as f64 * f1 * f1;
            }
            assert!((&ric - &expect).amax() < 1e-6, "{ric} {expect}");
        }
    }

    #[test]
    fn margin_and_metric_errors() {
        let m = ChartMetric::flat(Domain::cube(2, 0.0, 1.0), FdPolicy::default());
        assert!(matches!(m.christoffel(&[0.0001, 0.5]), Err(Error::DomainMargin { .. })));
        let bad = ChartMetric::new(
            Domain::cube(2, 0.0, 1.0),
            |_| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            FdPolicy::default(),
        );
        assert!(matches!(bad.metric(&[0.5, 0.5]), Err(Error::NonPositiveMetric)));
    }

    #[test]
    fn connection_kinds() {
        let n = 3;
        let f: PointFn<f64> = Arc::new(|x: &[f64]| 0.2 * (x[0] + x[1] * x[2]).sin());
        let m = ChartMetric::conformal(Domain::cube(n, -1.0, 1.0), f, FdPolicy::default());
        let gamma = FormField::new(n, 1, |x| {
            Form::from_vector(&[0.3 * x[1].cos(), -0.2 * x[0], 0.1 + x[2] * x[0]])
        });
        let t = FormField::new(n, 3, |x| Form::monomial(3, &[0, 1, 2]).scaled(&(0.4 + 0.1 * x[1])));
        let x = [0.2, -0.1, 0.3];
        let specs = [
            ConnectionSpec::LeviCivita,
            ConnectionSpec::Vectorial(gamma.clone()),
            ConnectionSpec::Skew(t.clone()),
        ];
        for s in &specs {
            let md = metric_derivative(&m, s, &x).unwrap();
            assert!(md.iter().all(|v| v.abs() < 1e-8), "{}", s.kind());
        }
        // Weyl: torsion free, non-metric by −2Γ ⊗ g
        let w = ConnectionSpec::Weyl(gamma.clone());
        let tw = torsion_tensor(&m, &w, &x).unwrap();
        assert!(tw.data.iter().all(|v| v.abs() < 1e-12));
        let md = metric_derivative(&m, &w, &x).unwrap();
        let g = m.metric(&x).unwrap();
        let low = gamma.eval(&x).vector_components();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!((md[(i * n + j) * n + k] + 2.0 * low[i] * g[(j, k)]).abs() < 1e-8);
                }
            }
        }
        // vectorial torsion T(X,Y) = Γ(Y)X − Γ(X)Y
        let tv = torsion_tensor(&m, &specs[1], &x).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let expect = f64::from(u8::from(k == i)) * low[j] - f64::from(u8::from(k == j)) * low[i];
                    assert!((tv.get(k, i, j) - expect).abs() < 1e-12);
                }
            }
        }
        // skew torsion lowered equals T
        let ts = torsion_tensor(&m, &specs[2], &x).unwrap();
        let tt = form_tensor(&t.eval(&x));
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let lowered: f64 = (0..n).map(|k| g[(l, k)] * ts.get(k, i, j)).sum();
                    assert!((lowered - tt[(i * n + j) * n + l]).abs() < 1e-12);
                }
            }
        }
        // Γ = 0 reduces every kind to Levi-Civita
        let zero = FormField::constant(Form::zero(n, 1));
        let lc = connection_coefficients(&m, &ConnectionSpec::LeviCivita, &x).unwrap();
        for s in [ConnectionSpec::Vectorial(zero.clone()), ConnectionSpec::Weyl(zero)] {
            assert_eq!(connection_coefficients(&m, &s, &x).unwrap(), lc);
        }
        let y = VectorField::new(n, |p| vec![p[1], p[0] * p[2], 1.0]);
        let v = connection_nabla(&m, &ConnectionSpec::LeviCivita, &[1.0, 0.0, 0.0], &y, &x).unwrap();
        assert_eq!(v.len(), n);
    }

    #[test]
    fn richardson_is_fourth_order() {
        let f = |x: &[f64]| vec![x[0].sin()];
        let errs: Vec<f64> = [0.1, 0.05]
            .iter()
            .map(|&h| (FdPolicy::new(h).partial(&f, &[0.3], 0)[0] - 0.3f64.cos()).abs())
            .collect();
        assert!(errs[1] < errs[0] / 12.0);
    }
}
