//! Catalog of structure groups `G ⊂ SO(n)` through their Lie algebras
//! `g ⊂ so(n) ≅ Λ²`, with the orthogonal complement `m`, projections, the
//! `ρ*` action on forms, invariant forms and Casimir splittings.
//!
//! Groups whose Lie algebra is cut out by rational invariant forms carry an
//! exact rational spanning set and an exact projector; `so(3) ⊂ so(5)` and
//! `spin(9) ⊂ so(16)` are float only.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::clifford::{self, CliffordRep, Spinor};
use crate::error::{Error, Result};
use crate::exterior::{
    binomial, form_inner, hodge, interior_basis, matrix_to_two_form, two_form_to_matrix, wedge, Blade,
    Form, FormBasis, SkewMatrix,
};
use crate::linalg;
use crate::scalar::{Backend, Rational, Scalar};

/// Largest representation space the dense Casimir and invariant-form
/// solvers accept.
pub const SPACE_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupId {
    /// `U(n/2) ⊂ SO(n)`, fixing the Kähler form.
    #[serde(rename = "U_n")]
    Un,
    #[serde(rename = "G2")]
    G2,
    #[serde(rename = "SPIN7")]
    Spin7,
    /// `SO(3)` acting irreducibly on traceless symmetric 3×3 matrices.
    #[serde(rename = "SO3_IRRED5")]
    So3Irred5,
    #[serde(rename = "SPIN9")]
    Spin9,
    /// `SO(n−1)` fixing the last basis vector.
    #[serde(rename = "SO_nm1")]
    SoNm1,
    #[serde(rename = "custom")]
    Custom(String),
}

impl GroupId {
    pub const NAMES: [&'static str; 6] = ["U_n", "G2", "SPIN7", "SO3_IRRED5", "SPIN9", "SO_nm1"];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "U_n" | "U" => Ok(GroupId::Un),
            "G2" => Ok(GroupId::G2),
            "SPIN7" => Ok(GroupId::Spin7),
            "SO3_IRRED5" => Ok(GroupId::So3Irred5),
            "SPIN9" => Ok(GroupId::Spin9),
            "SO_nm1" => Ok(GroupId::SoNm1),
            "SU2" => Ok(GroupId::Custom("SU2".into())),
            _ => Err(Error::UnknownName {
                kind: "group".into(),
                name: name.into(),
                available: Self::NAMES.iter().map(|s| s.to_string()).chain(["SU2".into()]).collect(),
            }),
        }
    }

    /// Ambient dimension fixed by the group, if any.
    pub fn natural_dim(&self) -> Option<usize> {
        match self {
            GroupId::G2 => Some(7),
            GroupId::Spin7 => Some(8),
            GroupId::So3Irred5 => Some(5),
            GroupId::Spin9 => Some(16),
            GroupId::Custom(name) if name == "SU2" => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Un => f.write_str("U_n"),
            GroupId::G2 => f.write_str("G2"),
            GroupId::Spin7 => f.write_str("SPIN7"),
            GroupId::So3Irred5 => f.write_str("SO3_IRRED5"),
            GroupId::Spin9 => f.write_str("SPIN9"),
            GroupId::SoNm1 => f.write_str("SO_nm1"),
            GroupId::Custom(name) => f.write_str(name),
        }
    }
}

// ---------------------------------------------------------------------------
// invariant forms used to cut out the subalgebras

/// `e₁∧e₂ + e₃∧e₄ + …` on ℝⁿ, n even.
pub fn kahler_form<S: Scalar>(n: usize) -> Form<S> {
    let mut f = Form::zero(n, 2);
    for j in 0..n / 2 {
        f.add_term(Blade::from_sorted(&[2 * j, 2 * j + 1]), S::one());
    }
    f
}

const G2_TERMS: [([usize; 3], i64); 7] = [
    ([1, 2, 3], 1),
    ([1, 4, 5], 1),
    ([1, 6, 7], 1),
    ([2, 4, 6], 1),
    ([2, 5, 7], -1),
    ([3, 4, 7], -1),
    ([3, 5, 6], -1),
];

/// The G₂ 3-form
/// `φ = e123 + e145 + e167 + e246 − e257 − e347 − e356` (1-based labels).
pub fn g2_form<S: Scalar>() -> Form<S> {
    let mut f = Form::zero(7, 3);
    for (idx, s) in G2_TERMS {
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        f.add_term(Blade::from_sorted(&zero_based), S::from_i64(s));
    }
    f
}

/// Cayley 4-form `Φ = e₈∧φ + *₇φ` on ℝ⁸.
pub fn cayley_form<S: Scalar>() -> Form<S> {
    let phi = g2_form::<S>();
    let lift = |f: &Form<S>| {
        let mut g = Form::zero(8, f.degree());
        for (b, c) in f.terms() {
            g.add_term(b, c.clone());
        }
        g
    };
    let e8 = Form::basis_vector(8, 7);
    let first = wedge(&e8, &lift(&phi)).expect("degree fits");
    let second = lift(&hodge(&phi));
    first.try_add(&second).expect("same shape")
}

// ---------------------------------------------------------------------------
// ρ* action

/// `ρ*(ω)Ω = Σᵢ (eᵢ⌟ω)∧(eᵢ⌟Ω)`. On 1-forms this is the matrix action of `ω`,
/// on 2-forms the matrix commutator `[ω, Ω]`.
pub fn rho_star<S: Scalar>(omega: &Form<S>, big: &Form<S>) -> Result<Form<S>> {
    if omega.degree() != 2 {
        return Err(Error::WrongDegree {
            expected: "2".into(),
            found: omega.degree(),
        });
    }
    if omega.n() != big.n() {
        return Err(Error::DimensionMismatch {
            expected: omega.n(),
            found: big.n(),
        });
    }
    let n = big.n();
    let mut out = Form::zero(n, big.degree());
    if big.degree() == 0 {
        return Ok(out);
    }
    for i in 0..n {
        let a = interior_basis(i, omega);
        if a.is_zero() {
            continue;
        }
        let b = interior_basis(i, big);
        if b.is_zero() {
            continue;
        }
        out.axpy(&S::one(), &wedge(&a, &b)?);
    }
    Ok(out)
}

/// Lie bracket on Λ² through the matrix commutator.
pub fn bracket<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
    let (ma, mb) = (two_form_to_matrix(a)?, two_form_to_matrix(b)?);
    Ok(matrix_to_two_form(&ma.commutator(&mb)))
}

/// Annihilator `{ω ∈ Λ² : ρ*(ω)Ω = 0}` as an exact spanning set.
pub fn annihilator_exact(big: &Form<Rational>) -> Vec<Form<Rational>> {
    let n = big.n();
    let src = FormBasis::new(n, 2);
    let dst = FormBasis::new(n, big.degree());
    let rows = src.matrix_of(&dst, |w| rho_star(w, big).expect("degree 2"));
    linalg::nullspace_exact(&rows, src.dim())
        .into_iter()
        .map(|v| src.from_coords(&v))
        .collect()
}

// ---------------------------------------------------------------------------
// subalgebra bases

#[derive(Clone, Debug)]
struct ExactData {
    g_span: Vec<Form<Rational>>,
    m_span: Vec<Form<Rational>>,
    /// Orthogonal projector onto g in Λ² blade coordinates.
    proj_g: Vec<Vec<Rational>>,
}

/// `so(n) = g ⊕ m` with orthonormal float bases of both summands.
#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    pub group: GroupId,
    pub n: usize,
    pub g_basis: Vec<Form<f64>>,
    pub m_basis: Vec<Form<f64>>,
    exact: Option<ExactData>,
}

/// Modified Gram–Schmidt with one reorthogonalisation pass; vectors whose
/// remainder falls below `rel_tol · max‖v‖` are dropped.
fn gram_schmidt(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
        }
        let nw = norm(&w);
        if nw > rel_tol * scale && nw > 0.0 {
            out.push(w.iter().map(|x| x / nw).collect());
        }
    }
    out
}

fn orthonormal_forms(n: usize, forms: &[Form<f64>]) -> Vec<Form<f64>> {
    let basis = FormBasis::new(n, 2);
    let vecs: Vec<Vec<f64>> = forms.iter().map(|f| basis.coords(f)).collect();
    gram_schmidt(&vecs, linalg::SVD_REL_TOL)
        .iter()
        .map(|v| basis.from_coords(v).pruned(1e-15))
        .collect()
}

impl SubalgebraBasis {
    /// Builds the splitting from an exact spanning set of g.
    pub fn from_exact(group: GroupId, n: usize, span: Vec<Form<Rational>>) -> Result<Self> {
        let basis = FormBasis::new(n, 2);
        let dim = basis.dim();
        let g_span = independent_subset(&span, &basis);
        let g_rows: Vec<Vec<Rational>> = g_span.iter().map(|f| basis.coords(f)).collect();
        let m_span: Vec<Form<Rational>> = linalg::nullspace_exact(&g_rows, dim)
            .into_iter()
            .map(|v| basis.from_coords(&v))
            .collect();
        let proj_g = exact_projector(&basis, &g_span, &m_span);
        let g_basis = orthonormal_forms(n, &g_span.iter().map(Form::to_f64).collect::<Vec<_>>());
        let m_basis = orthonormal_forms(n, &m_span.iter().map(Form::to_f64).collect::<Vec<_>>());
        Ok(SubalgebraBasis {
            group,
            n,
            g_basis,
            m_basis,
            exact: Some(ExactData {
                g_span,
                m_span,
                proj_g,
            }),
        })
    }

    /// Builds the splitting from a float spanning set of g.
    pub fn from_float(group: GroupId, n: usize, span: &[Form<f64>]) -> Result<Self> {
        for f in span {
            if f.n() != n || f.degree() != 2 {
                return Err(Error::WrongDegree {
                    expected: format!("2-form on R^{n}"),
                    found: f.degree(),
                });
            }
        }
        let g_basis = orthonormal_forms(n, span);
        let basis = FormBasis::new(n, 2);
        let q = DMatrix::from_fn(basis.dim(), g_basis.len(), |i, c| basis.coords(&g_basis[c])[i]);
        let comp = linalg::orthogonal_complement(&q, basis.dim());
        let m_raw: Vec<Form<f64>> = (0..comp.ncols())
            .map(|c| basis.from_dense(&comp.column(c).into_owned()))
            .collect();
        let m_basis = orthonormal_forms(n, &m_raw);
        Ok(SubalgebraBasis {
            group,
            n,
            g_basis,
            m_basis,
            exact: None,
        })
    }

    /// All of `so(n)`, so that `m = 0`.
    pub fn full_so(n: usize) -> Self {
        let span: Vec<Form<Rational>> = Blade::all(n, 2)
            .into_iter()
            .map(|b| Form::monomial(n, &b.to_vec()))
            .collect();
        Self::from_exact(GroupId::Custom(format!("SO({n})")), n, span).expect("standard basis")
    }

    pub fn dim_g(&self) -> usize {
        self.g_basis.len()
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn backend(&self) -> Backend {
        if self.is_exact() {
            Backend::Rational
        } else {
            Backend::Float
        }
    }

    /// Exact spanning sets of g and m when available.
    pub fn exact_spans(&self) -> Option<(&[Form<Rational>], &[Form<Rational>])> {
        self.exact.as_ref().map(|e| (e.g_span.as_slice(), e.m_span.as_slice()))
    }

    fn check(&self, omega: &Form<f64>) -> Result<()> {
        if omega.degree() != 2 {
            return Err(Error::WrongDegree {
                expected: "2".into(),
                found: omega.degree(),
            });
        }
        if omega.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: omega.n(),
            });
        }
        Ok(())
    }

    pub fn project_g(&self, omega: &Form<f64>) -> Result<Form<f64>> {
        self.check(omega)?;
        let mut out = Form::zero(self.n, 2);
        for g in &self.g_basis {
            out.axpy(&form_inner(g, omega)?, g);
        }
        Ok(out)
    }

    pub fn project_m(&self, omega: &Form<f64>) -> Result<Form<f64>> {
        self.check(omega)?;
        let mut out = Form::zero(self.n, 2);
        for m in &self.m_basis {
            out.axpy(&form_inner(m, omega)?, m);
        }
        Ok(out)
    }

    /// Coordinates of `ω` in the orthonormal m basis.
    pub fn m_coords(&self, omega: &Form<f64>) -> Result<Vec<f64>> {
        self.check(omega)?;
        self.m_basis.iter().map(|m| form_inner(m, omega)).collect()
    }

    pub fn project_g_exact(&self, omega: &Form<Rational>) -> Result<Form<Rational>> {
        let ex = self.exact.as_ref().ok_or_else(|| {
            Error::Refused(format!("{} has no exact basis", self.group))
        })?;
        let basis = FormBasis::new(self.n, 2);
        let v = basis.coords(omega);
        let out: Vec<Rational> = ex
            .proj_g
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::from_i64(0), |acc, (a, b)| acc + a * b)
            })
            .collect();
        Ok(basis.from_coords(&out))
    }

    pub fn project_m_exact(&self, omega: &Form<Rational>) -> Result<Form<Rational>> {
        let g = self.project_g_exact(omega)?;
        omega.try_sub(&g)
    }

    /// Largest distance of a bracket `[gᵢ, gⱼ]` from span(g).
    pub fn bracket_closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.g_basis.iter().enumerate() {
            for b in &self.g_basis[i + 1..] {
                let c = bracket(a, b).expect("2-forms");
                let r = self.project_m(&c).expect("2-form").max_abs();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Largest |⟨gᵢ,mⱼ⟩| and deviation from orthonormality.
    pub fn orthogonality_residual(&self) -> f64 {
        let all: Vec<&Form<f64>> = self.g_basis.iter().chain(&self.m_basis).collect();
        let mut worst = 0.0f64;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate().skip(i) {
                let ip = form_inner(a, b).expect("same shape");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// Exact check that every rational generator is ρ*-closed; `None` when
    /// the basis is float only.
    pub fn exact_bracket_closed(&self) -> Option<bool> {
        let ex = self.exact.as_ref()?;
        Some(ex.g_span.iter().enumerate().all(|(i, a)| {
            ex.g_span[i + 1..].iter().all(|b| {
                let c = bracket(a, b).expect("2-forms");
                self.project_m_exact(&c).expect("exact").is_zero()
            })
        }))
    }

    /// Copy of this splitting with g and m re-expressed in rotated orthonormal
    /// bases; the subspaces are unchanged.
    pub fn rebased(&self, g_rot: &DMatrix<f64>, m_rot: &DMatrix<f64>) -> Self {
        let rotate = |forms: &[Form<f64>], r: &DMatrix<f64>| -> Vec<Form<f64>> {
            (0..forms.len())
                .map(|i| {
                    let mut f = Form::zero(self.n, 2);
                    for (j, src) in forms.iter().enumerate() {
                        f.axpy(&r[(i, j)], src);
                    }
                    f
                })
                .collect()
        };
        SubalgebraBasis {
            group: self.group.clone(),
            n: self.n,
            g_basis: rotate(&self.g_basis, g_rot),
            m_basis: rotate(&self.m_basis, m_rot),
            exact: self.exact.clone(),
        }
    }
}

fn independent_subset(span: &[Form<Rational>], basis: &FormBasis) -> Vec<Form<Rational>> {
    let mut kept: Vec<Form<Rational>> = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for f in span {
        rows.push(basis.coords(f));
        if linalg::rank_exact(&rows, basis.dim()) == rows.len() {
            kept.push(f.clone());
        } else {
            rows.pop();
        }
    }
    kept
}

/// `P_g = B_g (B⁻¹)_g` where `B = [g | m]`.
fn exact_projector(
    basis: &FormBasis,
    g_span: &[Form<Rational>],
    m_span: &[Form<Rational>],
) -> Vec<Vec<Rational>> {
    let dim = basis.dim();
    let zero = Rational::from_i64(0);
    let cols: Vec<Vec<Rational>> = g_span.iter().chain(m_span).map(|f| basis.coords(f)).collect();
    // augmented [B | I]
    let mut aug: Vec<Vec<Rational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.extend((0..dim).map(|j| Rational::from_i64(i64::from(j == r))));
            row
        })
        .collect();
    linalg::rref(&mut aug, 2 * dim);
    let inv_g: Vec<&[Rational]> = aug[..g_span.len()].iter().map(|r| &r[dim..]).collect();
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    g_span.iter().enumerate().fold(zero.clone(), |acc, (a, _)| {
                        let bg = &cols[a][r];
                        if bg.is_zero() || inv_g[a][c].is_zero() {
                            acc
                        } else {
                            acc + bg * &inv_g[a][c]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn incompatible(group: &GroupId, n: usize) -> Error {
    Error::IncompatibleGroup {
        group: group.to_string(),
        n,
    }
}

fn skew_to_form(m: &DMatrix<f64>) -> Form<f64> {
    let n = m.nrows();
    let sk = SkewMatrix::new(n, m.transpose().as_slice().to_vec()).expect("skew input");
    matrix_to_two_form(&sk)
}

/// so(3) acting on traceless symmetric 3×3 matrices, in an orthonormal basis.
fn so3_irreducible_span() -> Vec<Form<f64>> {
    let s2 = std::f64::consts::SQRT_2;
    let s6 = 6f64.sqrt();
    let sym = |entries: [[f64; 3]; 3], scale: f64| DMatrix::from_fn(3, 3, |i, j| entries[i][j] / scale);
    let basis = [
        sym([[0., 1., 0.], [1., 0., 0.], [0., 0., 0.]], s2),
        sym([[0., 0., 1.], [0., 0., 0.], [1., 0., 0.]], s2),
        sym([[0., 0., 0.], [0., 0., 1.], [0., 1., 0.]], s2),
        sym([[1., 0., 0.], [0., -1., 0.], [0., 0., 0.]], s2),
        sym([[1., 0., 0.], [0., 1., 0.], [0., 0., -2.]], s6),
    ];
    let gens = [(1usize, 2usize), (0, 2), (0, 1)];
    gens.iter()
        .map(|&(a, b)| {
            let mut l = DMatrix::<f64>::zeros(3, 3);
            l[(a, b)] = 1.0;
            l[(b, a)] = -1.0;
            let rep = DMatrix::from_fn(5, 5, |i, j| {
                let img = &l * &basis[j] - &basis[j] * &l;
                basis[i].component_mul(&img).sum()
            });
            skew_to_form(&rep)
        })
        .collect()
}

/// Octonion product of basis units `e_a e_b` as (sign, index); index 0 is 1.
fn octonion_unit_product(a: usize, b: usize) -> (f64, usize) {
    const TRIPLES: [[usize; 3]; 7] = [[1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 7], [5, 6, 1], [6, 7, 2], [7, 1, 3]];
    match (a, b) {
        (0, b) => (1.0, b),
        (a, 0) => (1.0, a),
        (a, b) if a == b => (-1.0, 0),
        _ => {
            for t in TRIPLES {
                for r in 0..3 {
                    let (x, y, z) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
                    if (a, b) == (x, y) {
                        return (1.0, z);
                    }
                    if (a, b) == (y, x) {
                        return (-1.0, z);
                    }
                }
            }
            unreachable!("every pair of distinct imaginary units lies on a line")
        }
    }
}

/// Nine real symmetric 16×16 matrices with `γᵢγⱼ + γⱼγᵢ = 2δᵢⱼ`, built
/// from right multiplication by octonion units.
pub fn spin9_generators() -> Vec<DMatrix<f64>> {
    let right = |a: usize| {
        let mut r = DMatrix::<f64>::zeros(8, 8);
        for j in 0..8 {
            let (s, k) = octonion_unit_product(j, a);
            r[(k, j)] = s;
        }
        r
    };
    let block = |r: &DMatrix<f64>| {
        let mut g = DMatrix::<f64>::zeros(16, 16);
        g.view_mut((0, 8), (8, 8)).copy_from(r);
        g.view_mut((8, 0), (8, 8)).copy_from(&r.transpose());
        g
    };
    let mut gens = Vec::with_capacity(9);
    let mut g0 = DMatrix::<f64>::identity(16, 16);
    g0.view_mut((8, 8), (8, 8)).scale_mut(-1.0);
    gens.push(g0);
    for a in 0..8 {
        gens.push(block(&right(a)));
    }
    gens
}

/// The 36 elements `γᵢγⱼ` (i<j) as 2-forms on ℝ¹⁶.
pub fn spin9_span() -> Vec<Form<f64>> {
    let gens = spin9_generators();
    let mut out = Vec::with_capacity(36);
    for i in 0..9 {
        for j in i + 1..9 {
            out.push(skew_to_form(&(&gens[i] * &gens[j])));
        }
    }
    out
}

/// Isotropy algebra of the first basis half-spinor on ℝ⁴, a copy of su(2):
/// the self-dual or the anti-self-dual 2-forms, whichever kills it.
pub fn su2_basis() -> Result<SubalgebraBasis> {
    let rep = clifford::build_clifford(4)?;
    let psi = Spinor::basis(4, 0);
    let q = |v: i64| Rational::from_i64(v);
    let span = |s: i64| -> Vec<Form<Rational>> {
        let pair = |a: [usize; 2], b: [usize; 2], sign: i64| {
            let mut f = Form::zero(4, 2);
            f.add_term(Blade::from_sorted(&a), q(1));
            f.add_term(Blade::from_sorted(&b), q(sign));
            f
        };
        vec![pair([0, 1], [2, 3], s), pair([0, 2], [1, 3], -s), pair([0, 3], [1, 2], s)]
    };
    for s in [1, -1] {
        let cand = span(s);
        let kills = cand
            .iter()
            .all(|f| rep.act(&f.to_f64(), &psi).map(|r| r.norm() < 1e-12).unwrap_or(false));
        if kills {
            return SubalgebraBasis::from_exact(GroupId::Custom("SU2".into()), 4, cand);
        }
    }
    Err(Error::Refused("no half-spinor isotropy found".into()))
}

/// Builds `g ⊂ so(n)` for a catalog group. For `U_n` the argument is the
/// real dimension `n = 2m` and `dim g = m²`.
pub fn subalgebra(group: &GroupId, n: usize) -> Result<SubalgebraBasis> {
    if let Some(d) = group.natural_dim() {
        if d != n {
            return Err(incompatible(group, n));
        }
    }
    match group {
        GroupId::Un => {
            if n < 2 || n % 2 == 1 || n > 16 {
                return Err(incompatible(group, n));
            }
            let span = annihilator_exact(&kahler_form::<Rational>(n));
            SubalgebraBasis::from_exact(group.clone(), n, span)
        }
        GroupId::G2 => SubalgebraBasis::from_exact(group.clone(), 7, annihilator_exact(&g2_form())),
        GroupId::Spin7 => {
            SubalgebraBasis::from_exact(group.clone(), 8, annihilator_exact(&cayley_form()))
        }
        GroupId::So3Irred5 => SubalgebraBasis::from_float(group.clone(), 5, &so3_irreducible_span()),
        GroupId::Spin9 => SubalgebraBasis::from_float(group.clone(), 16, &spin9_span()),
        GroupId::SoNm1 => {
            if !(3..=16).contains(&n) {
                return Err(incompatible(group, n));
            }
            let span = Blade::all(n - 1, 2)
                .into_iter()
                .map(|b| Form::monomial(n, &b.to_vec()))
                .collect();
            SubalgebraBasis::from_exact(group.clone(), n, span)
        }
        GroupId::Custom(name) if name == "SU2" => su2_basis(),
        GroupId::Custom(_) => Err(incompatible(group, n)),
    }
}

pub fn project_g(omega: &Form<f64>, b: &SubalgebraBasis) -> Result<Form<f64>> {
    b.project_g(omega)
}

pub fn project_m(omega: &Form<f64>, b: &SubalgebraBasis) -> Result<Form<f64>> {
    b.project_m(omega)
}

// ---------------------------------------------------------------------------
// invariant forms

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InvariantForms {
    Computed {
        degree: usize,
        /// Orthonormal basis.
        basis: Vec<Form<f64>>,
        exact: bool,
    },
    NotComputed {
        degree: usize,
        reason: String,
    },
}

impl InvariantForms {
    pub fn dim(&self) -> Option<usize> {
        match self {
            InvariantForms::Computed { basis, .. } => Some(basis.len()),
            InvariantForms::NotComputed { .. } => None,
        }
    }

    pub fn basis(&self) -> &[Form<f64>] {
        match self {
            InvariantForms::Computed { basis, .. } => basis,
            InvariantForms::NotComputed { .. } => &[],
        }
    }
}

/// Sparse matrix of `ρ*(ω)` on Λᵏ as rows of (column, value).
fn rho_sparse_rows(omega: &Form<f64>, basis: &FormBasis) -> Vec<Vec<(usize, f64)>> {
    let mut rows = vec![Vec::new(); basis.dim()];
    for (j, &b) in basis.blades().iter().enumerate() {
        let mut e = Form::zero(basis.n(), basis.degree());
        e.add_term(b, 1.0);
        let img = rho_star(omega, &e).expect("2-form");
        for (bb, c) in img.terms() {
            rows[basis.index_of(bb)].push((j, *c));
        }
    }
    rows
}

/// Dense Gram matrix `Σᵢ ρ(gᵢ)ᵀρ(gᵢ)`, accumulated from sparse rows.
fn gram_of_ops(ops: &[Vec<Vec<(usize, f64)>>], dim: usize) -> DMatrix<f64> {
    let mut c = DMatrix::<f64>::zeros(dim, dim);
    for op in ops {
        for row in op {
            for &(a, x) in row {
                for &(b, y) in row {
                    c[(a, b)] += x * y;
                }
            }
        }
    }
    c
}

/// ρ*-invariant k-forms of the group.
pub fn invariant_forms(b: &SubalgebraBasis, k: usize) -> Result<InvariantForms> {
    if k > b.n {
        return Err(Error::DegreeOverflow { degree: k, n: b.n });
    }
    let basis = FormBasis::new(b.n, k);
    if b.group == GroupId::Spin9 && k > 4 && k < 12 {
        return Ok(InvariantForms::NotComputed {
            degree: k,
            reason: "spin(9) invariant forms are only computed for k <= 4 and k >= 12".into(),
        });
    }
    if basis.dim() > SPACE_LIMIT {
        return Ok(InvariantForms::NotComputed {
            degree: k,
            reason: format!("dim Λ^{k} = {} exceeds {SPACE_LIMIT}", basis.dim()),
        });
    }
    if let Some(ex) = &b.exact {
        let ops: Vec<Vec<Vec<Rational>>> = ex
            .g_span
            .iter()
            .map(|g| basis.matrix_of(&basis, |e| rho_star(g, e).expect("2-form")))
            .collect();
        let kernel = linalg::joint_kernel_exact(&ops, basis.dim());
        let vecs: Vec<Vec<f64>> = kernel.iter().map(|v| v.iter().map(|x| x.to_f64()).collect()).collect();
        let on = gram_schmidt(&vecs, linalg::SVD_REL_TOL);
        return Ok(InvariantForms::Computed {
            degree: k,
            basis: on.iter().map(|v| basis.from_coords(v).pruned(1e-15)).collect(),
            exact: true,
        });
    }
    let ops: Vec<_> = b.g_basis.iter().map(|g| rho_sparse_rows(g, &basis)).collect();
    let gram = gram_of_ops(&ops, basis.dim());
    let eig = gram.symmetric_eigen();
    let scale = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    // eigenvalues of ρᵀρ are squared singular values
    let tol = (linalg::SVD_REL_TOL * scale.sqrt()).powi(2).max(1e-24);
    let mut keep: Vec<usize> = (0..basis.dim()).filter(|&i| eig.eigenvalues[i] <= tol).collect();
    keep.sort_unstable();
    let vecs: Vec<Vec<f64>> = keep
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().cloned().collect())
        .collect();
    let on = gram_schmidt(&vecs, linalg::SVD_REL_TOL);
    Ok(InvariantForms::Computed {
        degree: k,
        basis: on.iter().map(|v| basis.from_coords(v).pruned(1e-14)).collect(),
        exact: false,
    })
}

/// Largest `‖ρ*(gᵢ)Ω‖∞` over the g basis.
pub fn invariance_residual(b: &SubalgebraBasis, big: &Form<f64>) -> Result<f64> {
    b.g_basis
        .iter()
        .map(|g| rho_star(g, big).map(|f| f.max_abs()))
        .try_fold(0.0f64, |acc, r| r.map(|x| acc.max(x)))
}

// ---------------------------------------------------------------------------
// Casimir splitting

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepSpace {
    /// Λᵏ(ℝⁿ).
    Forms(usize),
    /// ℝⁿ ⊗ m.
    VectorTimesM,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirBlock {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

fn rep_matrices(b: &SubalgebraBasis, space: RepSpace) -> Result<Vec<DMatrix<f64>>> {
    match space {
        RepSpace::Forms(k) => {
            if k > b.n {
                return Err(Error::DegreeOverflow { degree: k, n: b.n });
            }
            let basis = FormBasis::new(b.n, k);
            guard("Casimir space", basis.dim())?;
            Ok(b.g_basis
                .iter()
                .map(|g| {
                    let rows = basis.matrix_of(&basis, |e| rho_star(g, e).expect("2-form"));
                    linalg::to_dmatrix(&rows, basis.dim())
                })
                .collect())
        }
        RepSpace::VectorTimesM => {
            let (n, dm) = (b.n, b.dim_m());
            guard("Casimir space", n * dm)?;
            Ok(b.g_basis
                .iter()
                .map(|g| {
                    let a = two_form_to_matrix(g).expect("2-form").to_dmatrix();
                    let ad = DMatrix::from_fn(dm, dm, |i, j| {
                        let img = rho_star(g, &b.m_basis[j]).expect("2-form");
                        form_inner(&b.m_basis[i], &img).expect("same shape")
                    });
                    a.kronecker(&DMatrix::identity(dm, dm)) + DMatrix::identity(n, n).kronecker(&ad)
                })
                .collect())
        }
    }
}

fn guard(what: &str, size: usize) -> Result<()> {
    if size > SPACE_LIMIT {
        return Err(Error::CostGuard {
            what: what.into(),
            size,
            limit: SPACE_LIMIT,
        });
    }
    Ok(())
}

/// Eigenspaces of `C = Σᵢ ρ(gᵢ)²`, sorted by eigenvalue. Eigenvalues are
/// nonpositive since each `ρ(gᵢ)` is skew.
pub fn casimir_split(b: &SubalgebraBasis, space: RepSpace) -> Result<Vec<CasimirBlock>> {
    let mats = rep_matrices(b, space)?;
    let dim = match space {
        RepSpace::Forms(k) => binomial(b.n, k),
        RepSpace::VectorTimesM => b.n * b.dim_m(),
    };
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut c = DMatrix::<f64>::zeros(dim, dim);
    for m in &mats {
        c += m * m;
    }
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    let scale = ev.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let tol = 1e-6 * scale;
    let mut blocks: Vec<(Vec<f64>, usize)> = Vec::new();
    for x in ev {
        match blocks.last_mut() {
            Some((vals, count)) if (x - vals[0]).abs() <= tol => {
                vals.push(x);
                *count += 1;
            }
            _ => blocks.push((vec![x], 1)),
        }
    }
    Ok(blocks
        .into_iter()
        .map(|(vals, count)| CasimirBlock {
            eigenvalue: vals.iter().sum::<f64>() / count as f64,
            multiplicity: count,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// wedge multiplication

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeInjectivity {
    pub injective: bool,
    pub kernel_dim: usize,
    pub rank: usize,
}

/// Rank analysis of `η ↦ Ω∧η` on Λ²; exact for rational forms.
pub fn wedge_multiplication_injective<S: Scalar>(big: &Form<S>) -> Result<WedgeInjectivity> {
    let (n, k) = (big.n(), big.degree());
    if k + 2 > n {
        return Err(Error::DegreeOverflow { degree: k + 2, n });
    }
    let src = FormBasis::new(n, 2);
    let dst = FormBasis::new(n, k + 2);
    let rows = src.matrix_of(&dst, |eta| wedge(big, eta).expect("degree fits"));
    let rank = match S::BACKEND {
        Backend::Rational => linalg::rank_exact(&rows, src.dim()),
        Backend::Float => linalg::rank_svd(&linalg::to_dmatrix(&rows, src.dim()), linalg::SVD_REL_TOL),
    };
    Ok(WedgeInjectivity {
        injective: rank == src.dim(),
        kernel_dim: src.dim() - rank,
        rank,
    })
}

/// The Spin(9)-invariant 8-form on ℝ¹⁶, `Σ_{|S|=4} Pf(ω_S)²`, where `ω_{ij}`
/// are the 2-forms of `γᵢγⱼ`. Expensive; behind the stretch flag.
pub fn spin9_eight_form() -> Form<f64> {
    let span = spin9_span();
    let idx = |i: usize, j: usize| -> usize {
        // position of (i, j), i < j, in the row-major upper triangle of 9×9
        i * 9 - i * (i + 1) / 2 + (j - i - 1)
    };
    let w = |i: usize, j: usize| &span[idx(i, j)];
    let mut out = Form::zero(16, 8);
    for s in Blade::all(9, 4) {
        let v = s.to_vec();
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        let mut pf = wedge(w(a, b), w(c, d)).expect("degree fits");
        pf.axpy(&-1.0, &wedge(w(a, c), w(b, d)).expect("degree fits"));
        pf.axpy(&1.0, &wedge(w(a, d), w(b, c)).expect("degree fits"));
        out.axpy(&1.0, &wedge(&pf, &pf).expect("degree fits"));
    }
    out.pruned(1e-12)
}

// ---------------------------------------------------------------------------
// G-structure summary

/// A group together with its invariant data.
#[derive(Clone, Debug)]
pub struct GStructureSpec {
    pub basis: SubalgebraBasis,
    pub invariant_forms: BTreeMap<usize, InvariantForms>,
    pub invariant_spinor: Option<Spinor>,
    pub theta_report: Option<crate::torsion::ThetaReport>,
}

impl GStructureSpec {
    /// Invariant forms in the requested degrees and, when one exists, a unit
    /// invariant spinor.
    pub fn build(basis: SubalgebraBasis, degrees: &[usize]) -> Result<Self> {
        let mut forms = BTreeMap::new();
        for &k in degrees {
            forms.insert(k, invariant_forms(&basis, k)?);
        }
        let invariant_spinor = if basis.n >= 2 {
            let rep = clifford::build_clifford(basis.n)?;
            invariant_spinor_of(&rep, &basis)?
        } else {
            None
        };
        Ok(GStructureSpec {
            basis,
            invariant_forms: forms,
            invariant_spinor,
            theta_report: None,
        })
    }

    /// Largest `‖ρ*(ω)Ω‖∞` over stored invariant forms and `ω ∈ g`.
    pub fn invariance_residual(&self) -> f64 {
        self.invariant_forms
            .values()
            .flat_map(|f| f.basis())
            .map(|f| invariance_residual(&self.basis, f).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// First vector of the invariant-spinor basis, normalized.
pub fn invariant_spinor_of(rep: &CliffordRep, b: &SubalgebraBasis) -> Result<Option<Spinor>> {
    let inv = clifford::invariant_spinors(rep, &b.g_basis)?;
    Ok(inv.basis.first().map(Spinor::normalized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        a.qr().q()
    }

    #[test]
    fn catalog_dimensions() {
        let cases = [
            (GroupId::Un, 4, 4),
            (GroupId::Un, 6, 9),
            (GroupId::G2, 7, 14),
            (GroupId::Spin7, 8, 21),
            (GroupId::So3Irred5, 5, 3),
            (GroupId::SoNm1, 5, 6),
        ];
        for (g, n, d) in cases {
            let b = subalgebra(&g, n).unwrap();
            assert_eq!(b.dim_g(), d, "{g}");
            assert_eq!(b.dim_g() + b.dim_m(), n * (n - 1) / 2);
            assert!(b.bracket_closure_residual() < 1e-10, "{g}");
            assert!(b.orthogonality_residual() < 1e-10, "{g}");
            if let Some(closed) = b.exact_bracket_closed() {
                assert!(closed, "{g}");
            }
        }
        assert!(matches!(subalgebra(&GroupId::G2, 8), Err(Error::IncompatibleGroup { .. })));
        assert!(matches!(subalgebra(&GroupId::Un, 5), Err(Error::IncompatibleGroup { .. })));
    }

    #[test]
    fn spin9_is_closed_36_dimensional() {
        let gens = spin9_generators();
        for (i, a) in gens.iter().enumerate() {
            assert!((a - a.transpose()).norm() == 0.0);
            for (j, b) in gens.iter().enumerate() {
                let target = if i == j { 2.0 } else { 0.0 };
                let ac = a * b + b * a;
                assert!((ac - DMatrix::identity(16, 16) * target).norm() < 1e-14);
            }
        }
        let b = subalgebra(&GroupId::Spin9, 16).unwrap();
        assert_eq!(b.dim_g(), 36);
        assert_eq!(b.dim_m(), 84);
        assert!(b.bracket_closure_residual() < 1e-10);
        assert!(b.orthogonality_residual() < 1e-10);
    }

    #[test]
    fn rho_star_on_vectors_and_two_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = Form::<f64>::monomial(4, &[0, 1]);
        let e1 = Form::basis_vector(4, 0);
        let m = two_form_to_matrix(&w).unwrap();
        let expected = Form::from_vector(&m.apply(&e1.vector_components()));
        assert_eq!(rho_star(&w, &e1).unwrap(), expected);
        let basis = FormBasis::new(5, 2);
        for _ in 0..10 {
            let a: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (a, c) = (basis.from_coords(&a), basis.from_coords(&c));
            let lhs = rho_star(&a, &c).unwrap();
            assert!(lhs.distance(&bracket(&a, &c).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn kahler_form_is_u2_invariant() {
        let b = subalgebra(&GroupId::Un, 4).unwrap();
        let om = kahler_form::<f64>(4);
        assert!(invariance_residual(&b, &om).unwrap() < 1e-14);
        let inv = invariant_forms(&b, 2).unwrap();
        let basis = inv.basis();
        let proj: f64 = basis.iter().map(|f| form_inner(f, &om).unwrap().powi(2)).sum();
        assert!((proj - form_inner(&om, &om).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn g2_invariant_three_forms() {
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        let inv = invariant_forms(&b, 3).unwrap();
        assert_eq!(inv.dim(), Some(1));
        let phi = g2_form::<f64>();
        let f = &inv.basis()[0];
        // the unit invariant 3-form is ±φ/√7
        let c = form_inner(f, &phi).unwrap();
        assert!((c.abs() - 7f64.sqrt()).abs() < 1e-12);
        assert!(f.scaled(&c).distance(&phi) < 1e-12);
        for g in &b.g_basis {
            assert!(rho_star(g, &phi).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn so3_irreducible_has_no_invariant_forms() {
        let b = subalgebra(&GroupId::So3Irred5, 5).unwrap();
        for k in 1..=4 {
            assert_eq!(invariant_forms(&b, k).unwrap().dim(), Some(0), "k = {k}");
        }
    }

    #[test]
    fn spin9_low_degree_forms_and_guard() {
        let b = subalgebra(&GroupId::Spin9, 16).unwrap();
        assert_eq!(invariant_forms(&b, 2).unwrap().dim(), Some(0));
        assert!(matches!(invariant_forms(&b, 8).unwrap(), InvariantForms::NotComputed { .. }));
    }

    #[test]
    fn projections_split_so_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        let e12 = Form::monomial(7, &[0, 1]);
        let (pg, pm) = (b.project_g(&e12).unwrap(), b.project_m(&e12).unwrap());
        let total = form_inner(&pg, &pg).unwrap() + form_inner(&pm, &pm).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(pg.try_add(&pm).unwrap().distance(&e12) < 1e-14);
        for g in &b.g_basis {
            assert!(b.project_m(g).unwrap().max_abs() < 1e-12);
        }
        // pr_m(X∧Γ) against the exact projector and an independent Gram solve
        let basis = FormBasis::new(7, 2);
        let (_, m_span) = b.exact_spans().unwrap();
        let m_rows: Vec<Vec<Rational>> = m_span.iter().map(|f| basis.coords(f)).collect();
        for _ in 0..20 {
            let rv = |rng: &mut ChaCha8Rng| {
                let v: Vec<Rational> = (0..7).map(|_| rational(rng.random_range(-9..=9), rng.random_range(1..=4))).collect();
                Form::from_vector(&v)
            };
            let (x, gam) = (rv(&mut rng), rv(&mut rng));
            let w = wedge(&x, &gam).unwrap();
            let pm = b.project_m_exact(&w).unwrap();
            // Gram expansion in the exact m spanning set
            let gram: Vec<Vec<Rational>> = m_rows
                .iter()
                .map(|r| m_rows.iter().map(|s| dot(r, s)).collect())
                .collect();
            let rhs: Vec<Rational> = m_rows.iter().map(|r| dot(r, &basis.coords(&w))).collect();
            let c = linalg::solve_exact(&gram, m_rows.len(), &rhs).unwrap();
            let mut expect = Form::zero(7, 2);
            for (ci, f) in c.iter().zip(m_span) {
                expect.axpy(ci, f);
            }
            assert_eq!(pm, expect);
            assert!(pm.to_f64().distance(&b.project_m(&w.to_f64()).unwrap()) < 1e-12);
        }
    }

    fn dot(a: &[Rational], b: &[Rational]) -> Rational {
        a.iter().zip(b).fold(Rational::from_i64(0), |acc, (x, y)| acc + x * y)
    }

    fn dims(blocks: &[CasimirBlock]) -> Vec<usize> {
        let mut d: Vec<usize> = blocks.iter().map(|b| b.multiplicity).collect();
        d.sort_unstable();
        d
    }

    #[test]
    fn casimir_splittings() {
        let so3 = subalgebra(&GroupId::So3Irred5, 5).unwrap();
        assert_eq!(dims(&casimir_split(&so3, RepSpace::Forms(3)).unwrap()), vec![3, 7]);
        let g2 = subalgebra(&GroupId::G2, 7).unwrap();
        assert_eq!(dims(&casimir_split(&g2, RepSpace::Forms(2)).unwrap()), vec![7, 14]);
        let full = SubalgebraBasis::full_so(5);
        assert_eq!(dims(&casimir_split(&full, RepSpace::Forms(2)).unwrap()), vec![10]);
        let split = casimir_split(&g2, RepSpace::VectorTimesM).unwrap();
        assert_eq!(split.iter().map(|b| b.multiplicity).sum::<usize>(), 49);
        assert!(split.iter().all(|b| b.eigenvalue <= 1e-9));
        let spin9 = subalgebra(&GroupId::Spin9, 16).unwrap();
        assert!(matches!(
            casimir_split(&spin9, RepSpace::Forms(5)),
            Err(Error::CostGuard { .. })
        ));
    }

    #[test]
    fn casimir_split_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = subalgebra(&GroupId::So3Irred5, 5).unwrap();
        let r = b.rebased(&random_orthogonal(&mut rng, 3), &random_orthogonal(&mut rng, 7));
        for space in [RepSpace::Forms(2), RepSpace::Forms(3), RepSpace::VectorTimesM] {
            assert_eq!(dims(&casimir_split(&b, space).unwrap()), dims(&casimir_split(&r, space).unwrap()));
        }
    }

    #[test]
    fn wedge_injectivity() {
        let phi = g2_form::<Rational>();
        assert!(wedge_multiplication_injective(&phi).unwrap().injective);
        assert!(wedge_multiplication_injective(&cayley_form::<Rational>()).unwrap().injective);
        let k4 = wedge_multiplication_injective(&kahler_form::<Rational>(4)).unwrap();
        assert!(!k4.injective && k4.kernel_dim > 0);
        for n in [6, 8] {
            assert!(wedge_multiplication_injective(&kahler_form::<Rational>(n)).unwrap().injective);
        }
        assert!(wedge_multiplication_injective(&g2_form::<f64>()).unwrap().injective);
        assert!(matches!(
            wedge_multiplication_injective(&Form::<f64>::zero(4, 3)),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn invariant_spinor_isotropy_matches_g() {
        for (g, n, d) in [(GroupId::G2, 7, 14), (GroupId::Spin7, 8, 21)] {
            let b = subalgebra(&g, n).unwrap();
            let rep = clifford::build_clifford(n).unwrap();
            let inv = clifford::invariant_spinors(&rep, &b.g_basis).unwrap();
            assert_eq!(inv.complex_dim, 1, "{g}");
            let iso = clifford::spinor_isotropy_two_forms(&rep, &inv.basis[0]).unwrap();
            assert_eq!(iso.len(), d);
            for f in &iso {
                assert!(b.project_m(f).unwrap().max_abs() < 1e-9);
            }
        }
        for n in [4, 6] {
            let b = subalgebra(&GroupId::Un, n).unwrap();
            let rep = clifford::build_clifford(n).unwrap();
            assert_eq!(clifford::invariant_spinors(&rep, &b.g_basis).unwrap().complex_dim, 0);
        }
    }

    #[test]
    fn invariant_spinor_dim_survives_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        // conjugate g by exp of a random element of g itself
        let mut x = Form::zero(7, 2);
        for g in &b.g_basis {
            x.axpy(&rng.random_range(-1.0..1.0), g);
        }
        let u = two_form_to_matrix(&x).unwrap().to_dmatrix().exp();
        let conj: Vec<Form<f64>> = b
            .g_basis
            .iter()
            .map(|g| {
                let m = two_form_to_matrix(g).unwrap().to_dmatrix();
                skew_to_form(&(&u * m * u.transpose()))
            })
            .collect();
        let rep = clifford::build_clifford(7).unwrap();
        assert_eq!(clifford::invariant_spinors(&rep, &conj).unwrap().complex_dim, 1);
    }

    #[test]
    fn su2_is_half_spinor_isotropy() {
        let b = subalgebra(&GroupId::Custom("SU2".into()), 4).unwrap();
        assert_eq!(b.dim_g(), 3);
        assert!(b.is_exact());
        assert!(b.bracket_closure_residual() < 1e-12);
        let rep = clifford::build_clifford(4).unwrap();
        let psi = Spinor::basis(4, 0);
        for g in &b.g_basis {
            assert!(rep.act(g, &psi).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn group_names_round_trip() {
        for name in GroupId::NAMES {
            assert_eq!(GroupId::parse(name).unwrap().to_string(), name);
        }
        assert!(matches!(GroupId::parse("F4"), Err(Error::UnknownName { .. })));
    }
}
