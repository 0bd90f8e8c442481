//! Complex matrix model of Cl(n) acting on the spin module Δₙ.
//!
//! Convention: `eᵢ·eᵢ = −1`. Generators are tensor products of Pauli
//! matrices, so every Clifford monomial is a monomial matrix (one nonzero
//! entry per row, a power of `i`). A k-form acts on spinors through the
//! monomial identification `e_{i₁}∧…∧e_{i_k} ↦ γ_{i₁}…γ_{i_k}`, and the spin
//! lift of a 2-form is `λ(ω) = ½ ω·`, which satisfies
//! `[λ(ω), γ(X)] = γ(X ⌟ ω)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::{Blade, Form, FormBasis};
use crate::linalg;

pub type C64 = nalgebra::Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Matrix with exactly one nonzero entry per row: `M[r][cols[r]] = phases[r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMatrix {
    cols: Vec<usize>,
    phases: Vec<C64>,
}

impl MonomialMatrix {
    pub fn identity(dim: usize) -> Self {
        MonomialMatrix {
            cols: (0..dim).collect(),
            phases: vec![ONE; dim],
        }
    }

    fn from_parts(cols: Vec<usize>, phases: Vec<C64>) -> Self {
        MonomialMatrix { cols, phases }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.cols
            .iter()
            .zip(&self.phases)
            .map(|(&c, &p)| p * v[c])
            .collect()
    }

    /// Adds `s · (self v)` into `out`.
    fn apply_add(&self, s: C64, v: &[C64], out: &mut [C64]) {
        for (r, (&c, &p)) in self.cols.iter().zip(&self.phases).enumerate() {
            out[r] += s * p * v[c];
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let cols = self.cols.iter().map(|&c| other.cols[c]).collect();
        let phases = self
            .cols
            .iter()
            .zip(&self.phases)
            .map(|(&c, &p)| p * other.phases[c])
            .collect();
        MonomialMatrix { cols, phases }
    }

    pub fn scaled(&self, s: C64) -> Self {
        MonomialMatrix {
            cols: self.cols.clone(),
            phases: self.phases.iter().map(|&p| p * s).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let db = other.dim();
        let mut cols = Vec::with_capacity(self.dim() * db);
        let mut phases = Vec::with_capacity(self.dim() * db);
        for (&ca, &pa) in self.cols.iter().zip(&self.phases) {
            for (&cb, &pb) in other.cols.iter().zip(&other.phases) {
                cols.push(ca * db + cb);
                phases.push(pa * pb);
            }
        }
        MonomialMatrix { cols, phases }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, (&c, &p)) in self.cols.iter().zip(&self.phases).enumerate() {
            m[(r, c)] = p;
        }
        m
    }

    fn add_to_dense(&self, s: C64, m: &mut DMatrix<C64>) {
        for (r, (&c, &p)) in self.cols.iter().zip(&self.phases).enumerate() {
            m[(r, c)] += s * p;
        }
    }

    /// Largest entrywise distance to `s · Id`.
    pub fn distance_to_scalar(&self, s: C64) -> f64 {
        self.cols
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(r, (&c, &p))| if c == r { (p - s).norm() } else { p.norm() + s.norm() })
            .fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `self + other`.
    pub fn max_abs_sum(&self, other: &Self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for r in 0..d {
            let (ca, pa) = (self.cols[r], self.phases[r]);
            let (cb, pb) = (other.cols[r], other.phases[r]);
            if ca == cb {
                m = m.max((pa + pb).norm());
            } else {
                m = m.max(pa.norm()).max(pb.norm());
            }
        }
        m
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let mut seen = vec![false; self.dim()];
        for (&c, &p) in self.cols.iter().zip(&self.phases) {
            if seen[c] || (p.norm() - 1.0).abs() > tol {
                return false;
            }
            seen[c] = true;
        }
        true
    }
}

fn pauli(which: u8) -> MonomialMatrix {
    match which {
        0 => MonomialMatrix::identity(2),
        1 => MonomialMatrix::from_parts(vec![1, 0], vec![ONE, ONE]),
        2 => MonomialMatrix::from_parts(vec![1, 0], vec![-I, I]),
        3 => MonomialMatrix::from_parts(vec![0, 1], vec![ONE, -ONE]),
        _ => unreachable!(),
    }
}

/// Generators γ₁…γₙ of Cl(n) on Δₙ = ℂ^{2^⌊n/2⌋}.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    n: usize,
    dim: usize,
    gens: Vec<MonomialMatrix>,
}

/// Builds the tensor-product model: for the pair slot `p`,
/// `γ_{2p} = i σ₃^{⊗p} ⊗ σ₁ ⊗ 1`, `γ_{2p+1} = i σ₃^{⊗p} ⊗ σ₂ ⊗ 1`, and for
/// odd `n` the last generator is `i σ₃^{⊗m}`.
pub fn build_clifford(n: usize) -> Result<CliffordRep> {
    if !(2..=16).contains(&n) {
        return Err(Error::DimensionOutOfRange { n, min: 2, max: 16 });
    }
    let m = n / 2;
    let tensor = |slots: &[u8]| {
        slots
            .iter()
            .fold(MonomialMatrix::identity(1), |acc, &s| acc.kron(&pauli(s)))
    };
    let mut gens = Vec::with_capacity(n);
    for p in 0..m {
        for middle in [1u8, 2] {
            let slots: Vec<u8> = (0..m)
                .map(|s| match s.cmp(&p) {
                    std::cmp::Ordering::Less => 3,
                    std::cmp::Ordering::Equal => middle,
                    std::cmp::Ordering::Greater => 0,
                })
                .collect();
            gens.push(tensor(&slots).scaled(I));
        }
    }
    if n % 2 == 1 {
        gens.push(tensor(&vec![3; m]).scaled(I));
    }
    Ok(CliffordRep {
        n,
        dim: 1 << m,
        gens,
    })
}

impl CliffordRep {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex dimension of Δₙ.
    pub fn spinor_dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self, i: usize) -> &MonomialMatrix {
        &self.gens[i]
    }

    /// `γ_{i₁} ⋯ γ_{i_k}` for a blade.
    pub fn monomial(&self, blade: Blade) -> MonomialMatrix {
        blade
            .indices()
            .fold(MonomialMatrix::identity(self.dim), |acc, i| acc.compose(&self.gens[i]))
    }

    pub fn volume_element(&self) -> MonomialMatrix {
        self.monomial(Blade::from_mask((1u32 << self.n) - 1))
    }

    /// Largest deviation from `γᵢγⱼ + γⱼγᵢ = −2δᵢⱼ` over all pairs.
    pub fn anticommutation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                let ab = self.gens[i].compose(&self.gens[j]);
                let ba = self.gens[j].compose(&self.gens[i]);
                let r = if i == j {
                    ab.distance_to_scalar(C64::new(-1.0, 0.0))
                } else {
                    ab.max_abs_sum(&ba)
                };
                worst = worst.max(r);
            }
        }
        worst
    }

    fn check_form(&self, a: &Form<f64>) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.n(),
            });
        }
        Ok(())
    }

    fn check_spinor(&self, psi: &Spinor) -> Result<()> {
        if psi.n != self.n || psi.components.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: psi.n,
            });
        }
        Ok(())
    }

    /// Dense matrix of Clifford multiplication by a form.
    pub fn operator(&self, a: &Form<f64>) -> Result<DMatrix<C64>> {
        self.check_form(a)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (b, c) in a.terms() {
            self.monomial(b).add_to_dense(C64::new(*c, 0.0), &mut m);
        }
        Ok(m)
    }

    /// `a · Ψ`.
    pub fn act(&self, a: &Form<f64>, psi: &Spinor) -> Result<Spinor> {
        self.check_form(a)?;
        self.check_spinor(psi)?;
        let v = psi.components.as_slice();
        let mut out = vec![ZERO; self.dim];
        for (b, c) in a.terms() {
            self.monomial(b).apply_add(C64::new(*c, 0.0), v, &mut out);
        }
        Ok(Spinor {
            n: self.n,
            components: DVector::from_vec(out),
        })
    }

    /// Spin lift `λ(ω) = ½ ω·` of a 2-form.
    pub fn spin_lift(&self, omega: &Form<f64>) -> Result<DMatrix<C64>> {
        if omega.degree() != 2 {
            return Err(Error::WrongDegree {
                expected: "2".into(),
                found: omega.degree(),
            });
        }
        Ok(self.operator(omega)? * C64::new(0.5, 0.0))
    }
}

/// `a · Ψ` for a form of any degree.
pub fn clifford_action(rep: &CliffordRep, a: &Form<f64>, psi: &Spinor) -> Result<Spinor> {
    rep.act(a, psi)
}

pub fn spin_lift(rep: &CliffordRep, omega: &Form<f64>) -> Result<DMatrix<C64>> {
    rep.spin_lift(omega)
}

/// Element of Δₙ.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor {
    n: usize,
    pub components: DVector<C64>,
}

impl Spinor {
    pub fn new(n: usize, components: DVector<C64>) -> Result<Self> {
        let dim = 1usize << (n / 2);
        if components.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: components.len(),
            });
        }
        Ok(Spinor { n, components })
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let dim = 1usize << (n / 2);
        let mut v = DVector::zeros(dim);
        v[i] = ONE;
        Spinor { n, components: v }
    }

    pub fn zero(n: usize) -> Self {
        Spinor {
            n,
            components: DVector::zeros(1usize << (n / 2)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    pub fn normalized(&self) -> Self {
        let s = self.norm();
        Spinor {
            n: self.n,
            components: self.components.unscale(s),
        }
    }

    /// Hermitian product, antilinear in `self`.
    pub fn inner(&self, other: &Spinor) -> C64 {
        self.components.dotc(&other.components)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Spinor {
            n: self.n,
            components: &self.components * s,
        }
    }

    pub fn add(&self, other: &Spinor) -> Self {
        Spinor {
            n: self.n,
            components: &self.components + &other.components,
        }
    }

    pub fn sub(&self, other: &Spinor) -> Self {
        Spinor {
            n: self.n,
            components: &self.components - &other.components,
        }
    }

    pub fn distance(&self, other: &Spinor) -> f64 {
        (&self.components - &other.components).norm()
    }
}

/// Joint kernel of the spin lifts of a subalgebra.
#[derive(Clone, Debug)]
pub struct InvariantSpinors {
    /// Orthonormal basis of the complex kernel.
    pub basis: Vec<Spinor>,
    pub complex_dim: usize,
    /// Dimension of the kernel as a real vector space.
    pub real_dim: usize,
}

/// Spinors annihilated by `λ(ω)` for every `ω` in `g_basis`.
pub fn invariant_spinors(rep: &CliffordRep, g_basis: &[Form<f64>]) -> Result<InvariantSpinors> {
    let ops = g_basis
        .iter()
        .map(|w| rep.spin_lift(w))
        .collect::<Result<Vec<_>>>()?;
    let kernel = linalg::joint_kernel_svd(&ops, rep.dim, linalg::SVD_REL_TOL);
    let basis: Vec<Spinor> = (0..kernel.ncols())
        .map(|c| Spinor {
            n: rep.n,
            components: kernel.column(c).into_owned(),
        })
        .collect();
    Ok(InvariantSpinors {
        complex_dim: basis.len(),
        real_dim: 2 * basis.len(),
        basis,
    })
}

/// Real 2-forms `ω` with `ω·Ψ = 0`, as an orthonormal basis.
pub fn spinor_isotropy_two_forms(rep: &CliffordRep, psi: &Spinor) -> Result<Vec<Form<f64>>> {
    rep.check_spinor(psi)?;
    if psi.norm() == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let basis = FormBasis::new(rep.n, 2);
    let d = rep.dim;
    let mut m = DMatrix::<f64>::zeros(2 * d, basis.dim());
    for (j, &b) in basis.blades().iter().enumerate() {
        let img = rep.monomial(b).apply(psi.components.as_slice());
        for (r, z) in img.iter().enumerate() {
            m[(r, j)] = z.re;
            m[(d + r, j)] = z.im;
        }
    }
    let ns = linalg::nullspace_svd(&m, linalg::SVD_REL_TOL);
    Ok((0..ns.ncols())
        .map(|c| basis.from_dense(&ns.column(c).into_owned()).pruned(1e-14))
        .collect())
}
