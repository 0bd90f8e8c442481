//! The morphisms `Θ: Λ³ → ℝⁿ⊗m` and `Θ₁: ℝⁿ → ℝⁿ⊗m`, the characteristic
//! connection test, and the solver for the characteristic torsion of a
//! vectorial structure.
//!
//! `Θ(T) = Σ eᵢ ⊗ pr_m(eᵢ⌟T)` and `Θ₁(Γ) = Σ eᵢ ⊗ pr_m(eᵢ∧Γ)`. A torsion form
//! `T` belongs to `Γ` when `Θ(T) = −2Θ₁(Γ)`, equivalently
//! `pr_m(2 X∧Γ + X⌟T) = 0` for every `X`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, interior_basis, wedge, Form, FormBasis};
use crate::groups::SubalgebraBasis;
use crate::linalg;
use crate::scalar::{Backend, Rational, Scalar};

/// Largest `n · dim m` accepted by [`analyze_theta`].
pub const THETA_LIMIT: usize = 2000;

/// Element of ℝⁿ⊗m, stored as the n slot 2-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicTorsionElement {
    pub n: usize,
    pub components: Vec<Form<f64>>,
}

impl IntrinsicTorsionElement {
    pub fn zero(n: usize) -> Self {
        IntrinsicTorsionElement {
            n,
            components: vec![Form::zero(n, 2); n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Form::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(Form::max_abs).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(&s, b);
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// Largest `‖pr_g‖∞` over the slots.
    pub fn m_residual(&self, b: &SubalgebraBasis) -> f64 {
        self.components
            .iter()
            .map(|c| b.project_g(c).map(|f| f.max_abs()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

fn check_degree<S: Scalar>(f: &Form<S>, k: usize, n: usize) -> Result<()> {
    if f.degree() != k {
        return Err(Error::WrongDegree {
            expected: k.to_string(),
            found: f.degree(),
        });
    }
    if f.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.n(),
        });
    }
    Ok(())
}

pub fn theta(t: &Form<f64>, b: &SubalgebraBasis) -> Result<IntrinsicTorsionElement> {
    check_degree(t, 3, b.n)?;
    let components = (0..b.n)
        .map(|i| b.project_m(&interior_basis(i, t)))
        .collect::<Result<_>>()?;
    Ok(IntrinsicTorsionElement { n: b.n, components })
}

pub fn theta1(gamma: &Form<f64>, b: &SubalgebraBasis) -> Result<IntrinsicTorsionElement> {
    check_degree(gamma, 1, b.n)?;
    let components = (0..b.n)
        .map(|i| b.project_m(&wedge(&Form::basis_vector(b.n, i), gamma)?))
        .collect::<Result<_>>()?;
    Ok(IntrinsicTorsionElement { n: b.n, components })
}

pub fn theta_exact(t: &Form<Rational>, b: &SubalgebraBasis) -> Result<Vec<Form<Rational>>> {
    check_degree(t, 3, b.n)?;
    (0..b.n).map(|i| b.project_m_exact(&interior_basis(i, t))).collect()
}

pub fn theta1_exact(gamma: &Form<Rational>, b: &SubalgebraBasis) -> Result<Vec<Form<Rational>>> {
    check_degree(gamma, 1, b.n)?;
    (0..b.n)
        .map(|i| b.project_m_exact(&wedge(&Form::basis_vector(b.n, i), gamma)?))
        .collect()
}

/// `pr_m(2 X∧Γ + X⌟T)` for `X = eᵢ`, maximised over `i`.
pub fn membership_residual(t: &Form<f64>, gamma: &Form<f64>, b: &SubalgebraBasis) -> Result<f64> {
    let lhs = theta(t, b)?;
    let mut rhs = theta1(gamma, b)?;
    rhs.axpy(1.0, &rhs.clone());
    let mut sum = lhs;
    sum.axpy(1.0, &rhs);
    Ok(sum.max_abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageRelation {
    /// `Θ(Λ³) ∩ Θ₁(ℝⁿ) = 0`.
    Complementary,
    /// `Θ₁(ℝⁿ) ⊂ Θ(Λ³)`.
    Contained,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub group: String,
    pub n: usize,
    pub dim_m: usize,
    pub backend: Backend,
    pub theta_matrix_rank: usize,
    pub theta_injective: bool,
    pub theta1_rank: usize,
    pub theta1_injective: bool,
    pub stacked_rank: usize,
    pub image_meets_theta1: ImageRelation,
    pub char_connection_for_vectorial: bool,
}

/// Dense matrices of Θ (columns indexed by Λ³ blades) and Θ₁ (columns by
/// basis vectors), in orthonormal m coordinates per slot.
fn theta_matrices_f64(b: &SubalgebraBasis) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, dm) = (b.n, b.dim_m());
    let l3 = FormBasis::new(n, 3);
    let mut th = DMatrix::zeros(n * dm, l3.dim());
    for (j, _) in l3.blades().iter().enumerate() {
        let t = l3.element::<f64>(j);
        for i in 0..n {
            let c = b.m_coords(&interior_basis(i, &t))?;
            for (a, v) in c.into_iter().enumerate() {
                th[(i * dm + a, j)] = v;
            }
        }
    }
    let mut th1 = DMatrix::zeros(n * dm, n);
    for j in 0..n {
        let g = Form::basis_vector(n, j);
        for i in 0..n {
            let c = b.m_coords(&wedge(&Form::basis_vector(n, i), &g)?)?;
            for (a, v) in c.into_iter().enumerate() {
                th1[(i * dm + a, j)] = v;
            }
        }
    }
    Ok((th, th1))
}

/// Same matrices over the rationals, in Λ² blade coordinates per slot.
fn theta_matrices_exact(b: &SubalgebraBasis) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>)> {
    let n = b.n;
    let l2 = FormBasis::new(n, 2);
    let l3 = FormBasis::new(n, 3);
    let zero = Rational::from_i64(0);
    let mut th = vec![vec![zero.clone(); l3.dim()]; n * l2.dim()];
    for j in 0..l3.dim() {
        let comps = theta_exact(&l3.element(j), b)?;
        for (i, c) in comps.iter().enumerate() {
            for (blade, v) in c.terms() {
                th[i * l2.dim() + l2.index_of(blade)][j] = v.clone();
            }
        }
    }
    let mut th1 = vec![vec![zero; n]; n * l2.dim()];
    for j in 0..n {
        let comps = theta1_exact(&Form::basis_vector(n, j), b)?;
        for (i, c) in comps.iter().enumerate() {
            for (blade, v) in c.terms() {
                th1[i * l2.dim() + l2.index_of(blade)][j] = v.clone();
            }
        }
    }
    Ok((th, th1))
}

fn hstack<S: Clone>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().chain(y).cloned().collect())
        .collect()
}

/// Ranks of Θ, Θ₁ and `[Θ | Θ₁]`; exact for groups with a rational basis.
pub fn analyze_theta(b: &SubalgebraBasis) -> Result<ThetaReport> {
    let (n, dm) = (b.n, b.dim_m());
    if n * dm > THETA_LIMIT {
        return Err(Error::CostGuard {
            what: "n * dim m".into(),
            size: n * dm,
            limit: THETA_LIMIT,
        });
    }
    let c3 = binomial(n, 3);
    let (rt, r1, rs) = if b.is_exact() {
        let (th, th1) = theta_matrices_exact(b)?;
        let st = hstack(&th, &th1);
        (
            linalg::rank_exact(&th, c3),
            linalg::rank_exact(&th1, n),
            linalg::rank_exact(&st, c3 + n),
        )
    } else {
        let (th, th1) = theta_matrices_f64(b)?;
        let mut st = DMatrix::zeros(th.nrows(), c3 + n);
        st.columns_mut(0, c3).copy_from(&th);
        st.columns_mut(c3, n).copy_from(&th1);
        let tol = linalg::SVD_REL_TOL;
        (
            linalg::rank_svd(&th, tol),
            linalg::rank_svd(&th1, tol),
            linalg::rank_svd(&st, tol),
        )
    };
    let relation = if rs == rt {
        ImageRelation::Contained
    } else if rs == rt + r1 {
        ImageRelation::Complementary
    } else {
        ImageRelation::Partial
    };
    Ok(ThetaReport {
        group: b.group.to_string(),
        n,
        dim_m: dm,
        backend: b.backend(),
        theta_matrix_rank: rt,
        theta_injective: rt == c3,
        theta1_rank: r1,
        theta1_injective: r1 == n,
        stacked_rank: rs,
        image_meets_theta1: relation,
        char_connection_for_vectorial: relation == ImageRelation::Contained && r1 > 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CharacteristicTorsion {
    Solution {
        torsion: Form<f64>,
        unique: bool,
        /// `‖Θ(T) + 2Θ₁(Γ)‖ / ‖2Θ₁(Γ)‖`.
        relative_residual: f64,
    },
    NoSolution {
        relative_residual: f64,
    },
}

impl CharacteristicTorsion {
    pub fn torsion(&self) -> Option<&Form<f64>> {
        match self {
            CharacteristicTorsion::Solution { torsion, .. } => Some(torsion),
            CharacteristicTorsion::NoSolution { .. } => None,
        }
    }
}

/// Relative residual below which the system `Θ(T) = −2Θ₁(Γ)` counts as
/// solved.
pub const SOLVE_REL_TOL: f64 = 1e-9;

/// Least-squares solver for `Θ(T) = −2Θ₁(Γ)` with the SVD of Θ computed
/// once.
#[derive(Clone, Debug)]
pub struct TorsionSolver {
    n: usize,
    theta: DMatrix<f64>,
    theta1: DMatrix<f64>,
    svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rank: usize,
}

impl TorsionSolver {
    pub fn new(b: &SubalgebraBasis) -> Result<Self> {
        let (theta, theta1) = theta_matrices_f64(b)?;
        let rank = linalg::rank_svd(&theta, linalg::SVD_REL_TOL);
        let svd = theta.clone().svd(true, true);
        Ok(TorsionSolver {
            n: b.n,
            theta,
            theta1,
            svd,
            rank,
        })
    }

    pub fn unique(&self) -> bool {
        self.rank == self.theta.ncols()
    }

    pub fn solve(&self, gamma: &Form<f64>) -> Result<CharacteristicTorsion> {
        check_degree(gamma, 1, self.n)?;
        let g = DVector::from_vec(gamma.vector_components());
        let rhs = -2.0 * (&self.theta1 * g);
        let rnorm = rhs.norm();
        let l3 = FormBasis::new(self.n, 3);
        if rnorm == 0.0 {
            return Ok(CharacteristicTorsion::Solution {
                torsion: Form::zero(self.n, 3),
                unique: self.unique(),
                relative_residual: 0.0,
            });
        }
        let smax = self.svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let x = self
            .svd
            .solve(&rhs, linalg::SVD_REL_TOL * smax)
            .map_err(|e| Error::Refused(e.into()))?;
        let rel = (&self.theta * &x - &rhs).norm() / rnorm;
        if rel > SOLVE_REL_TOL {
            return Ok(CharacteristicTorsion::NoSolution {
                relative_residual: rel,
            });
        }
        Ok(CharacteristicTorsion::Solution {
            torsion: l3.from_dense(&x).pruned(1e-14),
            unique: self.unique(),
            relative_residual: rel,
        })
    }

    /// Same system through the normal equations; only available when Θ is
    /// injective. Used to cross-check uniqueness.
    pub fn solve_normal(&self, gamma: &Form<f64>) -> Result<Option<Form<f64>>> {
        check_degree(gamma, 1, self.n)?;
        let g = DVector::from_vec(gamma.vector_components());
        let rhs = -2.0 * (&self.theta1 * g);
        let l3 = FormBasis::new(self.n, 3);
        Ok(linalg::lstsq_normal(&self.theta, &rhs).map(|x| l3.from_dense(&x)))
    }

    /// Torsion forms `T(eᵢ)`, so that `T(Γ) = Σ Γᵢ T(eᵢ)`; `None` when some
    /// basis vector has no solution.
    pub fn linear_map(&self) -> Result<Option<Vec<Form<f64>>>> {
        (0..self.n)
            .map(|i| self.solve(&Form::basis_vector(self.n, i)).map(|s| s.torsion().cloned()))
            .collect::<Result<Option<Vec<_>>>>()
    }
}

pub fn characteristic_torsion(gamma: &Form<f64>, b: &SubalgebraBasis) -> Result<CharacteristicTorsion> {
    TorsionSolver::new(b)?.solve(gamma)
}

/// Exact solve over the rationals; `Ok(None)` when no solution exists.
pub fn characteristic_torsion_exact(
    gamma: &Form<Rational>,
    b: &SubalgebraBasis,
) -> Result<Option<Form<Rational>>> {
    check_degree(gamma, 1, b.n)?;
    if !b.is_exact() {
        return Err(Error::Refused(format!("{} has no exact basis", b.group)));
    }
    let (th, th1) = theta_matrices_exact(b)?;
    let g = gamma.vector_components();
    let rhs: Vec<Rational> = th1
        .iter()
        .map(|row| {
            row.iter()
                .zip(&g)
                .fold(Rational::from_i64(0), |acc, (a, x)| acc + a * x)
                * Rational::from_i64(-2)
        })
        .collect();
    let l3 = FormBasis::new(b.n, 3);
    Ok(linalg::solve_exact(&th, l3.dim(), &rhs).map(|x| l3.from_coords(&x)))
}

/// Intrinsic torsion after the conformal change `g ↦ e^{2f} g`:
/// `Γ* = Γ + df`.
pub fn conformal_shift<S: Scalar>(gamma: &Form<S>, df: &Form<S>) -> Result<Form<S>> {
    check_degree(gamma, 1, gamma.n())?;
    check_degree(df, 1, gamma.n())?;
    gamma.try_add(df)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford;
    use crate::exterior::hodge;
    use crate::groups::{g2_form, subalgebra, GroupId};
    use crate::scalar::rational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Form<f64> {
        Form::from_vector(&(0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>())
    }

    #[test]
    fn theta_trivial_cases() {
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        assert!(theta(&Form::zero(7, 3), &b).unwrap().is_zero());
        assert!(theta1(&Form::zero(7, 1), &b).unwrap().is_zero());
        let so = crate::groups::SubalgebraBasis::full_so(5);
        let t = Form::monomial(5, &[0, 1, 2]);
        assert!(theta(&t, &so).unwrap().is_zero());
        let tp = theta(&g2_form(), &b).unwrap();
        assert!(!tp.is_zero());
        assert!(tp.m_residual(&b) < 1e-12);
        assert!(!theta1(&Form::basis_vector(7, 0), &b).unwrap().is_zero());
    }

    #[test]
    fn theta1_for_u2_matches_gram_expansion() {
        let b = subalgebra(&GroupId::Un, 4).unwrap();
        let e1 = Form::basis_vector(4, 0);
        let t1 = theta1(&e1, &b).unwrap();
        for i in 0..4 {
            let w = wedge(&Form::basis_vector(4, i), &e1).unwrap();
            let mut expect = Form::zero(4, 2);
            for m in &b.m_basis {
                let c = crate::exterior::form_inner(m, &w).unwrap();
                expect.axpy(&c, m);
            }
            assert!(t1.components[i].distance(&expect) < 1e-14);
        }
        assert_eq!(b.dim_m(), 2);
    }

    #[test]
    fn theta_reports() {
        let r = analyze_theta(&subalgebra(&GroupId::So3Irred5, 5).unwrap()).unwrap();
        assert_eq!(r.image_meets_theta1, ImageRelation::Complementary);
        assert_eq!(r.stacked_rank, r.theta_matrix_rank + 5);
        assert!(!r.char_connection_for_vectorial);
        for (g, n) in [(GroupId::G2, 7), (GroupId::Spin7, 8), (GroupId::Un, 4), (GroupId::Un, 6)] {
            let r = analyze_theta(&subalgebra(&g, n).unwrap()).unwrap();
            assert!(r.char_connection_for_vectorial, "{g} {n}");
            assert!(r.theta1_injective);
            assert_eq!(r.backend, Backend::Rational);
        }
        let g2 = analyze_theta(&subalgebra(&GroupId::G2, 7).unwrap()).unwrap();
        assert!(g2.theta_injective);
    }

    #[test]
    fn theta_report_float_matches_exact() {
        let b = subalgebra(&GroupId::Spin7, 8).unwrap();
        let exact = analyze_theta(&b).unwrap();
        let float = crate::groups::SubalgebraBasis::from_float(b.group.clone(), 8, &b.g_basis).unwrap();
        let r = analyze_theta(&float).unwrap();
        assert_eq!(r.theta_matrix_rank, exact.theta_matrix_rank);
        assert_eq!(r.stacked_rank, exact.stacked_rank);
        assert_eq!(r.image_meets_theta1, exact.image_meets_theta1);
    }

    #[test]
    fn theta_report_stable_under_rebasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = subalgebra(&GroupId::So3Irred5, 5).unwrap();
        let q = |rng: &mut ChaCha8Rng, d: usize| DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let r = b.rebased(&q(&mut rng, 3), &q(&mut rng, 7));
        let (a, c) = (analyze_theta(&b).unwrap(), analyze_theta(&r).unwrap());
        assert_eq!(a.theta_matrix_rank, c.theta_matrix_rank);
        assert_eq!(a.image_meets_theta1, c.image_meets_theta1);
    }

    #[test]
    fn g2_torsion_closed_form() {
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        let solver = TorsionSolver::new(&b).unwrap();
        assert!(solver.unique());
        let phi = g2_form::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut gammas = vec![Form::basis_vector(7, 6)];
        gammas.extend((0..5).map(|_| random_vec(&mut rng, 7)));
        for gamma in gammas {
            let sol = solver.solve(&gamma).unwrap();
            let t = sol.torsion().expect("solution");
            let closed = hodge(&wedge(&gamma, &phi).unwrap()).scaled(&-1.0);
            assert!(t.distance(&closed) < 1e-9, "{t:?}");
            assert!(membership_residual(t, &gamma, &b).unwrap() < 1e-9);
            let alt = solver.solve_normal(&gamma).unwrap().unwrap();
            assert!(alt.distance(t) < 1e-9);
        }
    }

    #[test]
    fn g2_exact_solve_agrees() {
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        let gamma = Form::from_vector(&[rational(1, 2), rational(-1, 3), rational(0, 1), rational(2, 1), rational(1, 1), rational(0, 1), rational(-5, 7)]);
        let t = characteristic_torsion_exact(&gamma, &b).unwrap().unwrap();
        let closed = hodge(&wedge(&gamma, &g2_form()).unwrap());
        assert_eq!(t, -closed);
    }

    #[test]
    fn hermitian_torsion_closed_form() {
        // T = 2 (JΓ ∧ Ω) with JΓ = Γ⌟Ω; in dimension four this reads *T = −2Γ
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [4usize, 6, 8] {
            let b = subalgebra(&GroupId::Un, n).unwrap();
            let solver = TorsionSolver::new(&b).unwrap();
            let om = crate::groups::kahler_form::<f64>(n);
            for _ in 0..5 {
                let gamma = random_vec(&mut rng, n);
                let t = solver.solve(&gamma).unwrap().torsion().unwrap().clone();
                assert!(membership_residual(&t, &gamma, &b).unwrap() < 1e-9);
                let jg = crate::exterior::interior(&gamma, &om).unwrap();
                let closed = wedge(&jg, &om).unwrap().scaled(&2.0);
                assert!(t.distance(&closed) < 1e-9, "n = {n}");
                if n == 4 {
                    assert!(hodge(&t).distance(&gamma.scaled(&-2.0)) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn obstructed_groups_have_no_solution() {
        for (g, n) in [(GroupId::So3Irred5, 5), (GroupId::Spin9, 16)] {
            let b = subalgebra(&g, n).unwrap();
            let sol = characteristic_torsion(&Form::basis_vector(n, 0), &b).unwrap();
            assert!(matches!(sol, CharacteristicTorsion::NoSolution { .. }), "{g}");
        }
    }

    #[test]
    fn g2_torsion_acts_on_spinor_like_gamma() {
        let b = subalgebra(&GroupId::G2, 7).unwrap();
        let rep = clifford::build_clifford(7).unwrap();
        let psi = crate::groups::invariant_spinor_of(&rep, &b).unwrap().unwrap();
        let solver = TorsionSolver::new(&b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let gamma = random_vec(&mut rng, 7);
            let t = solver.solve(&gamma).unwrap().torsion().unwrap().clone();
            let lhs = rep.act(&t, &psi).unwrap();
            let rhs = rep.act(&gamma, &psi).unwrap().scaled(clifford::C64::new(4.0, 0.0));
            assert!(lhs.distance(&rhs) < 1e-9);
        }
    }

    #[test]
    fn conformal_shift_adds() {
        let g = Form::<f64>::basis_vector(3, 0);
        assert_eq!(conformal_shift(&g, &Form::zero(3, 1)).unwrap(), g);
        assert_eq!(conformal_shift(&Form::zero(3, 1), &g).unwrap(), g);
    }

    proptest! {
        #[test]
        fn theta_is_linear(a in -5i64..5, c in -5i64..5, seed in 0u64..1000) {
            let b = subalgebra(&GroupId::Un, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l3 = FormBasis::new(4, 3);
            let mut rand_t = || l3.from_coords(&(0..4).map(|_| rational(rng.random_range(-5..5), rng.random_range(1..4))).collect::<Vec<_>>());
            let (t1, t2) = (rand_t(), rand_t());
            let (qa, qc) = (Rational::from_i64(a), Rational::from_i64(c));
            let mut comb = t1.scaled(&qa);
            comb.axpy(&qc, &t2);
            let lhs = theta_exact(&comb, &b).unwrap();
            let (x, y) = (theta_exact(&t1, &b).unwrap(), theta_exact(&t2, &b).unwrap());
            for i in 0..4 {
                let mut r = x[i].scaled(&qa);
                r.axpy(&qc, &y[i]);
                prop_assert_eq!(&lhs[i], &r);
            }
        }
    }
}
