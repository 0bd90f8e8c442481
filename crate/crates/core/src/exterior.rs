//! Exterior algebra of ℝⁿ in a fixed oriented orthonormal basis.
//!
//! A [`Form`] is a homogeneous element of Λᵏ(ℝⁿ) stored sparsely, keyed by
//! [`Blade`]s (strictly increasing index tuples encoded as bitmasks). The
//! orientation is `e₀ ∧ … ∧ eₙ₋₁` throughout. Indices are zero-based in the
//! API and one-based in the JSON serialization.
//!
//! Two-forms act on vectors by contraction, `ω(Y) = Y ⌟ ω`, which makes
//! `(X ∧ Γ)(Y) = g(X, Y) Γ − g(Γ, Y) X`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, Num, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Backend, Rational, Scalar};

pub const MAX_DIM: usize = 16;

/// A basis monomial `e_{i₁} ∧ … ∧ e_{i_k}` with `i₁ < … < i_k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    /// Canonical blade of a strictly increasing index list.
    pub fn from_sorted(indices: &[usize]) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Blade(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    /// Sorts an arbitrary index list; returns `None` on a repeated index.
    pub fn sort_signed(indices: &[usize]) -> Option<(Blade, i64)> {
        let mut mask = 0u32;
        let mut sign = 1i64;
        for &i in indices {
            let bit = 1u32 << i;
            if mask & bit != 0 {
                return None;
            }
            if (mask >> (i + 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= bit;
        }
        Some((Blade(mask), sign))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }

    /// Sign of `e_self ∧ e_other` relative to the canonical blade of the union.
    /// Zero when the blades share an index.
    pub fn wedge_sign(self, other: Blade) -> i64 {
        if self.0 & other.0 != 0 {
            return 0;
        }
        let mut inversions = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            inversions += (self.0 >> j).count_ones();
            b &= b - 1;
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `e_i ⌟ e_self = sign · e_rest`; `None` if `i` is absent.
    pub fn contract(self, i: usize) -> Option<(Blade, i64)> {
        if !self.contains(i) {
            return None;
        }
        let below = (self.0 & ((1u32 << i) - 1)).count_ones();
        let sign = if below % 2 == 0 { 1 } else { -1 };
        Some((Blade(self.0 & !(1 << i)), sign))
    }

    /// All blades of grade `k` in ℝⁿ in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<Blade> {
        fn rec(start: usize, n: usize, k: usize, mask: u32, out: &mut Vec<Blade>) {
            if k == 0 {
                out.push(Blade(mask));
                return;
            }
            for i in start..=n - k {
                rec(i + 1, n, k - 1, mask | (1 << i), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(0, n, k, 0, &mut out);
        }
        out
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.indices();
        let mut b = other.indices();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().map(|i| format!("e{}", i + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Homogeneous k-form on ℝⁿ with scalar coefficients of type `S`.
#[derive(Clone, PartialEq)]
pub struct Form<S = f64> {
    n: usize,
    k: usize,
    coeffs: BTreeMap<Blade, S>,
}

fn check_dim(n: usize) {
    assert!(
        (1..=MAX_DIM).contains(&n),
        "ambient dimension {n} outside 1..={MAX_DIM}"
    );
}

impl<S: Scalar> Form<S> {
    /// # Panics
    /// If `n` is outside `1..=16` or `k > n`.
    pub fn zero(n: usize, k: usize) -> Self {
        check_dim(n);
        assert!(k <= n, "degree {k} exceeds dimension {n}");
        Form {
            n,
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, value: S) -> Self {
        let mut f = Self::zero(n, 0);
        f.add_term(Blade::SCALAR, value);
        f
    }

    /// `sign · e_{i₁} ∧ … ∧ e_{i_k}` for arbitrary (unsorted) distinct indices.
    pub fn monomial(n: usize, indices: &[usize]) -> Self {
        let mut f = Self::zero(n, indices.len());
        assert!(indices.iter().all(|&i| i < n), "index out of range");
        if let Some((blade, sign)) = Blade::sort_signed(indices) {
            f.add_term(blade, S::from_i64(sign));
        }
        f
    }

    /// Basis covector `e_i`.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        Self::monomial(n, &[i])
    }

    pub fn from_vector(components: &[S]) -> Self {
        let n = components.len();
        let mut f = Self::zero(n, 1);
        for (i, c) in components.iter().enumerate() {
            f.add_term(Blade::from_mask(1 << i), c.clone());
        }
        f
    }

    /// Builds a form from `(indices, coefficient)` pairs with arbitrary index order.
    pub fn from_terms<'a, I>(n: usize, k: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (&'a [usize], S)>,
    {
        let mut f = Self::zero(n, k);
        for (idx, c) in terms {
            assert_eq!(idx.len(), k, "term degree mismatch");
            if let Some((blade, sign)) = Blade::sort_signed(idx) {
                let c = if sign < 0 { -c } else { c };
                f.add_term(blade, c);
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, blade: Blade) -> S {
        self.coeffs.get(&blade).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient at a (possibly unsorted) index tuple, including the permutation sign.
    pub fn coeff(&self, indices: &[usize]) -> S {
        match Blade::sort_signed(indices) {
            Some((b, s)) if s < 0 => -self.get(b),
            Some((b, _)) => self.get(b),
            None => S::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    /// Adds `c · e_blade`; entries that cancel to zero are removed.
    pub fn add_term(&mut self, blade: Blade, c: S) {
        debug_assert_eq!(blade.grade(), self.k);
        debug_assert!(blade.mask() >> self.n == 0);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&blade) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.coeffs.remove(&blade);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coeffs.insert(blade, c);
            }
        }
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for (b, c) in self.terms() {
            out.add_term(b, c.clone() * s.clone());
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b, -c.clone());
        }
        Ok(out)
    }

    /// `self + s · other`.
    pub fn axpy(&mut self, s: &S, other: &Self) {
        assert_eq!((self.n, self.k), (other.n, other.k));
        for (b, c) in other.terms() {
            self.add_term(b, c.clone() * s.clone());
        }
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.k != other.k {
            return Err(Error::WrongDegree {
                expected: self.k.to_string(),
                found: other.k,
            });
        }
        Ok(())
    }

    /// Components of a 1-form as a dense vector.
    pub fn vector_components(&self) -> Vec<S> {
        assert_eq!(self.k, 1, "vector_components on a {}-form", self.k);
        (0..self.n)
            .map(|i| self.get(Blade::from_mask(1 << i)))
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Form<T> {
        let mut out = Form::zero(self.n, self.k);
        for (b, c) in self.terms() {
            out.add_term(b, f(c));
        }
        out
    }

    pub fn to_f64(&self) -> Form<f64> {
        self.map(|c| c.to_f64())
    }

    /// Replaces every basis covector `e_i` by the 1-form `images[i]` and expands.
    /// This is the pull-back along the linear map whose transpose sends `e_i` to
    /// `images[i]`; it is used for coordinate ↔ frame changes.
    pub fn substitute(&self, images: &[Form<S>]) -> Form<S> {
        assert_eq!(images.len(), self.n);
        let m = images.first().map_or(self.n, |f| f.n);
        assert!(images.iter().all(|f| f.k == 1 && f.n == m));
        let mut out = Form::zero(m, self.k);
        for (blade, c) in self.terms() {
            let mut acc = Form::scalar(m, c.clone());
            for i in blade.indices() {
                acc = wedge_unchecked(&acc, &images[i]);
                if acc.is_zero() {
                    break;
                }
            }
            for (b, v) in acc.terms() {
                out.add_term(b, v.clone());
            }
        }
        out
    }
}

impl Form<f64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops coefficients with magnitude below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for (b, c) in self.terms() {
            if c.abs() > tol {
                out.add_term(b, *c);
            }
        }
        out
    }

    pub fn distance(&self, other: &Self) -> f64 {
        form_norm2(&self.try_sub(other).expect("same space")).sqrt()
    }
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(n={}, k={}) {{", self.n, self.k)?;
        for (i, (b, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c:?}·{b:?}")?;
        }
        write!(f, " }}")
    }
}

impl<S: Scalar> std::ops::Neg for Form<S> {
    type Output = Form<S>;

    fn neg(self) -> Self {
        self.scaled(&(-S::one()))
    }
}

fn wedge_unchecked<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Form<S> {
    let mut out = Form::zero(a.n, a.k + b.k);
    for (ba, ca) in a.terms() {
        for (bb, cb) in b.terms() {
            let sign = ba.wedge_sign(bb);
            if sign == 0 {
                continue;
            }
            let prod = ca.clone() * cb.clone();
            let prod = if sign < 0 { -prod } else { prod };
            out.add_term(Blade::from_mask(ba.mask() | bb.mask()), prod);
        }
    }
    out
}

/// Exterior product `a ∧ b`.
pub fn wedge<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Result<Form<S>> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    if a.k + b.k > a.n {
        return Err(Error::DegreeOverflow {
            degree: a.k + b.k,
            n: a.n,
        });
    }
    Ok(wedge_unchecked(a, b))
}

/// Interior product `v ⌟ a` with a 1-form `v` (identified with a vector).
pub fn interior<S: Scalar>(v: &Form<S>, a: &Form<S>) -> Result<Form<S>> {
    if v.k != 1 {
        return Err(Error::WrongDegree {
            expected: "1".into(),
            found: v.k,
        });
    }
    if v.n != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: v.n,
        });
    }
    interior_vec(&v.vector_components(), a)
}

/// Interior product with a dense vector.
pub fn interior_vec<S: Scalar>(v: &[S], a: &Form<S>) -> Result<Form<S>> {
    if a.k == 0 {
        return Err(Error::WrongDegree {
            expected: ">= 1".into(),
            found: 0,
        });
    }
    if v.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: v.len(),
        });
    }
    let mut out = Form::zero(a.n, a.k - 1);
    for (blade, c) in a.terms() {
        for i in blade.indices() {
            if v[i].is_zero() {
                continue;
            }
            let (rest, sign) = blade.contract(i).expect("index present");
            let t = v[i].clone() * c.clone();
            out.add_term(rest, if sign < 0 { -t } else { t });
        }
    }
    Ok(out)
}

/// `e_i ⌟ a`.
pub fn interior_basis<S: Scalar>(i: usize, a: &Form<S>) -> Form<S> {
    let mut out = Form::zero(a.n, a.k.saturating_sub(1));
    if a.k == 0 {
        return out;
    }
    for (blade, c) in a.terms() {
        if let Some((rest, sign)) = blade.contract(i) {
            out.add_term(rest, if sign < 0 { -c.clone() } else { c.clone() });
        }
    }
    out
}

/// Hodge star for the orientation `e₀ ∧ … ∧ eₙ₋₁`: `a ∧ *b = ⟨a, b⟩ vol`.
pub fn hodge<S: Scalar>(a: &Form<S>) -> Form<S> {
    let full = if a.n == 32 { u32::MAX } else { (1u32 << a.n) - 1 };
    let mut out = Form::zero(a.n, a.n - a.k);
    for (blade, c) in a.terms() {
        let comp = Blade::from_mask(full & !blade.mask());
        let sign = blade.wedge_sign(comp);
        out.add_term(comp, if sign < 0 { -c.clone() } else { c.clone() });
    }
    out
}

/// `⟨a, b⟩ = Σ_I a_I b_I` over canonical tuples.
pub fn form_inner<S: Scalar>(a: &Form<S>, b: &Form<S>) -> Result<S> {
    a.check_same_space(b)?;
    let (small, large) = if a.nnz() <= b.nnz() { (a, b) } else { (b, a) };
    let mut acc = S::zero();
    for (blade, c) in small.terms() {
        if let Some(d) = large.coeffs.get(&blade) {
            acc = acc + c.clone() * d.clone();
        }
    }
    Ok(acc)
}

pub fn form_norm2<S: Scalar>(a: &Form<S>) -> S {
    a.coeffs
        .values()
        .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
}

/// Antisymmetric n×n matrix; `entries` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<S = f64> {
    n: usize,
    entries: Vec<S>,
}

impl<S: Scalar> SkewMatrix<S> {
    /// Validates antisymmetry: exactly for rationals, to 1e-12 for floats.
    pub fn new(n: usize, entries: Vec<S>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        for i in 0..n {
            for j in 0..=i {
                let s = entries[i * n + j].clone() + entries[j * n + i].clone();
                let ok = match S::BACKEND {
                    Backend::Rational => s.is_zero(),
                    Backend::Float => s.to_f64().abs() <= 1e-12,
                };
                if !ok {
                    return Err(Error::InvalidParameter {
                        name: "entries".into(),
                        reason: format!("not antisymmetric at ({i}, {j})"),
                    });
                }
            }
        }
        Ok(SkewMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn apply(&self, y: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(S::zero(), |acc, j| {
                    acc + self.get(i, j).clone() * y[j].clone()
                })
            })
            .collect()
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        let n = self.n;
        let mut entries = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for l in 0..n {
                    acc = acc + self.get(i, l).clone() * other.get(l, j).clone()
                        - other.get(i, l).clone() * self.get(l, j).clone();
                }
                entries[i * n + j] = acc;
            }
        }
        SkewMatrix { n, entries }
    }

    pub fn to_form(&self) -> Form<S> {
        matrix_to_two_form(self)
    }
}

impl SkewMatrix<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        let entries = (0..n * n).map(|t| m[(t / n, t % n)]).collect();
        SkewMatrix::new(n, entries)
    }
}

/// Endomorphism of a 2-form: `M(Y) = Y ⌟ ω`, so `M[b][a] = ω_ab` for `a < b`.
pub fn two_form_to_matrix<S: Scalar>(omega: &Form<S>) -> Result<SkewMatrix<S>> {
    if omega.k != 2 {
        return Err(Error::WrongDegree {
            expected: "2".into(),
            found: omega.k,
        });
    }
    let n = omega.n;
    let mut entries = vec![S::zero(); n * n];
    for (blade, c) in omega.terms() {
        let idx = blade.to_vec();
        let (a, b) = (idx[0], idx[1]);
        entries[b * n + a] = c.clone();
        entries[a * n + b] = -c.clone();
    }
    Ok(SkewMatrix { n, entries })
}

pub fn matrix_to_two_form<S: Scalar>(m: &SkewMatrix<S>) -> Form<S> {
    let n = m.n;
    let mut out = Form::zero(n, 2);
    for a in 0..n {
        for b in a + 1..n {
            out.add_term(Blade::from_sorted(&[a, b]), m.get(b, a).clone());
        }
    }
    out
}

/// Lexicographic coordinate system on Λᵏ(ℝⁿ).
#[derive(Clone, Debug)]
pub struct FormBasis {
    n: usize,
    k: usize,
    blades: Vec<Blade>,
    index: HashMap<Blade, usize>,
}

impl FormBasis {
    pub fn new(n: usize, k: usize) -> Self {
        let blades = Blade::all(n, k);
        let index = blades.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        FormBasis {
            n,
            k,
            blades,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.blades.len()
    }

    pub fn blades(&self) -> &[Blade] {
        &self.blades
    }

    pub fn index_of(&self, blade: Blade) -> usize {
        self.index[&blade]
    }

    pub fn element<S: Scalar>(&self, i: usize) -> Form<S> {
        let mut f = Form::zero(self.n, self.k);
        f.add_term(self.blades[i], S::one());
        f
    }

    pub fn coords<S: Scalar>(&self, form: &Form<S>) -> Vec<S> {
        assert_eq!((form.n, form.k), (self.n, self.k));
        let mut v = vec![S::zero(); self.dim()];
        for (b, c) in form.terms() {
            v[self.index[&b]] = c.clone();
        }
        v
    }

    pub fn to_dense(&self, form: &Form<f64>) -> DVector<f64> {
        DVector::from_vec(self.coords(form))
    }

    pub fn from_coords<S: Scalar>(&self, coords: &[S]) -> Form<S> {
        assert_eq!(coords.len(), self.dim());
        let mut f = Form::zero(self.n, self.k);
        for (b, c) in self.blades.iter().zip(coords) {
            f.add_term(*b, c.clone());
        }
        f
    }

    pub fn from_dense(&self, v: &DVector<f64>) -> Form<f64> {
        self.from_coords(v.as_slice())
    }

    /// Matrix of a linear map Λᵏ → Λˡ given on basis elements.
    pub fn matrix_of<S: Scalar>(
        &self,
        target: &FormBasis,
        f: impl Fn(&Form<S>) -> Form<S>,
    ) -> Vec<Vec<S>> {
        let mut rows = vec![vec![S::zero(); self.dim()]; target.dim()];
        for j in 0..self.dim() {
            let img = f(&self.element(j));
            for (b, c) in img.terms() {
                rows[target.index_of(b)][j] = c.clone();
            }
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// JSON: {n, k, backend, entries: [{idx: [...], num, den} | {idx: [...], val}]}

#[derive(Serialize, Deserialize)]
struct FormEntryJson {
    idx: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    den: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    val: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    k: usize,
    backend: Backend,
    entries: Vec<FormEntryJson>,
}

/// Scalars that can be written to and read from a form entry.
pub trait EntryCodec: Scalar {
    fn encode(&self, e: &mut (Option<String>, Option<String>, Option<f64>));
    fn decode(num: Option<&str>, den: Option<&str>, val: Option<f64>) -> Result<Self>;
}

impl EntryCodec for f64 {
    fn encode(&self, e: &mut (Option<String>, Option<String>, Option<f64>)) {
        e.2 = Some(*self);
    }

    fn decode(_: Option<&str>, _: Option<&str>, val: Option<f64>) -> Result<Self> {
        val.ok_or_else(|| Error::Serialization("float entry without `val`".into()))
    }
}

impl EntryCodec for Rational {
    fn encode(&self, e: &mut (Option<String>, Option<String>, Option<f64>)) {
        e.0 = Some(self.numer().to_string());
        e.1 = Some(self.denom().to_string());
    }

    fn decode(num: Option<&str>, den: Option<&str>, _: Option<f64>) -> Result<Self> {
        let parse = |s: Option<&str>, what: &str| -> Result<BigInt> {
            let s = s.ok_or_else(|| Error::Serialization(format!("rational entry without `{what}`")))?;
            BigInt::from_str_radix(s, 10).map_err(|e| Error::Serialization(e.to_string()))
        };
        let den = parse(den, "den")?;
        if den.is_zero() {
            return Err(Error::Serialization("zero denominator".into()));
        }
        Ok(BigRational::new(parse(num, "num")?, den))
    }
}

impl<S: EntryCodec> Serialize for Form<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let entries = self
            .terms()
            .map(|(b, c)| {
                let mut e = (None, None, None);
                c.encode(&mut e);
                FormEntryJson {
                    idx: b.indices().map(|i| i + 1).collect(),
                    num: e.0,
                    den: e.1,
                    val: e.2,
                }
            })
            .collect();
        FormJson {
            n: self.n,
            k: self.k,
            backend: S::BACKEND,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de, S: EntryCodec> Deserialize<'de> for Form<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FormJson::deserialize(deserializer)?;
        if raw.backend != S::BACKEND {
            return Err(D::Error::custom(format!(
                "backend {:?} does not match {:?}",
                raw.backend,
                S::BACKEND
            )));
        }
        if !(1..=MAX_DIM).contains(&raw.n) || raw.k > raw.n {
            return Err(D::Error::custom("invalid (n, k)"));
        }
        let mut f = Form::zero(raw.n, raw.k);
        for e in raw.entries {
            if e.idx.len() != raw.k || e.idx.iter().any(|&i| i == 0 || i > raw.n) {
                return Err(D::Error::custom("bad index tuple"));
            }
            if e.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(D::Error::custom("index tuple not strictly increasing"));
            }
            let c = S::decode(e.num.as_deref(), e.den.as_deref(), e.val).map_err(D::Error::custom)?;
            let idx: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
            f.add_term(Blade::from_sorted(&idx), c);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use proptest::prelude::*;

    type Q = Rational;

    fn e(n: usize, idx: &[usize]) -> Form<Q> {
        Form::monomial(n, idx)
    }

    #[test]
    fn wedge_basics() {
        let w = wedge(&e(4, &[0]), &e(4, &[1])).unwrap();
        assert_eq!(w, e(4, &[0, 1]));
        assert!(wedge(&e(4, &[0]), &e(4, &[0])).unwrap().is_zero());
        let a = e(4, &[0, 1]);
        let b = e(4, &[2, 3]);
        assert_eq!(wedge(&a, &b).unwrap(), wedge(&b, &a).unwrap());
        // odd-odd anticommutes
        assert_eq!(
            wedge(&e(4, &[0]), &e(4, &[2])).unwrap(),
            -wedge(&e(4, &[2]), &e(4, &[0])).unwrap()
        );
    }

    #[test]
    fn wedge_errors() {
        assert!(matches!(
            wedge(&e(4, &[0]), &e(5, &[0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            wedge(&e(3, &[0, 1]), &e(3, &[1, 2])),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn interior_basics() {
        assert_eq!(interior(&e(4, &[0]), &e(4, &[0, 1])).unwrap(), e(4, &[1]));
        assert!(interior(&e(4, &[2]), &e(4, &[0, 1])).unwrap().is_zero());
        assert!(matches!(
            interior(&e(4, &[0]), &Form::scalar(4, Q::from_i64(1))),
            Err(Error::WrongDegree { .. })
        ));
    }

    #[test]
    fn hodge_basics() {
        assert_eq!(hodge(&e(4, &[0, 1])), e(4, &[2, 3]));
        assert_eq!(hodge(&hodge(&e(4, &[0]))), -e(4, &[0]));
    }

    #[test]
    fn hodge_squared_sign_all_monomials() {
        for n in 1..=8 {
            for k in 0..=n {
                let sign = if (k * (n - k)) % 2 == 0 { 1 } else { -1 };
                for b in Blade::all(n, k) {
                    let f: Form<Q> = Form::monomial(n, &b.to_vec());
                    assert_eq!(hodge(&hodge(&f)), f.scaled(&Q::from_i64(sign)));
                    // a ∧ *a = |a|² vol
                    let top = wedge(&f, &hodge(&f)).unwrap();
                    assert_eq!(top, Form::monomial(n, &(0..n).collect::<Vec<_>>()));
                }
            }
        }
    }

    #[test]
    fn inner_products() {
        let a = e(4, &[0, 1]);
        assert_eq!(form_inner(&a, &a).unwrap(), Q::from_i64(1));
        assert!(form_inner(&a, &e(4, &[0])).is_err());
    }

    #[test]
    fn two_form_endomorphism_convention() {
        let m = two_form_to_matrix(&e(4, &[0, 1])).unwrap();
        let one = Q::from_i64(1);
        let zero = Q::from_i64(0);
        assert_eq!(m.apply(&[one.clone(), zero.clone(), zero.clone(), zero.clone()]), vec![zero.clone(), one.clone(), zero.clone(), zero.clone()]);
        assert_eq!(m.apply(&[zero.clone(), zero.clone(), one.clone(), zero.clone()]), vec![zero.clone(); 4]);
        // (X ∧ Γ)(Y) = g(X,Y)Γ − g(Γ,Y)X
        let x = [rational(1, 2), rational(-3, 1), rational(2, 5), rational(0, 1)];
        let g = [rational(7, 3), rational(1, 1), rational(-1, 4), rational(2, 1)];
        let y = [rational(-2, 1), rational(1, 3), rational(5, 1), rational(1, 7)];
        let xg = wedge(&Form::from_vector(&x), &Form::from_vector(&g)).unwrap();
        let lhs = two_form_to_matrix(&xg).unwrap().apply(&y);
        let dot = |a: &[Q], b: &[Q]| a.iter().zip(b).fold(Q::from_i64(0), |s, (p, q)| s + p.clone() * q.clone());
        let (xy, gy) = (dot(&x, &y), dot(&g, &y));
        for i in 0..4 {
            assert_eq!(lhs[i], xy.clone() * g[i].clone() - gy.clone() * x[i].clone());
        }
    }

    #[test]
    fn skew_matrix_round_trip_rational() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 5;
            let mut entries = vec![Q::from_i64(0); n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = rational(rng.random_range(-9..=9), rng.random_range(1..=5));
                    entries[i * n + j] = v.clone();
                    entries[j * n + i] = -v;
                }
            }
            let m = SkewMatrix::new(n, entries).unwrap();
            assert_eq!(two_form_to_matrix(&matrix_to_two_form(&m)).unwrap(), m);
        }
        assert!(SkewMatrix::new(2, vec![Q::from_i64(0), Q::from_i64(1), Q::from_i64(1), Q::from_i64(0)]).is_err());
    }

    #[test]
    fn blade_order_is_lexicographic() {
        let blades = Blade::all(5, 3);
        assert_eq!(blades.len(), 10);
        let tuples: Vec<Vec<usize>> = blades.iter().map(|b| b.to_vec()).collect();
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
        let mut shuffled = blades.clone();
        shuffled.reverse();
        shuffled.sort();
        assert_eq!(shuffled, blades);
    }

    #[test]
    fn json_shape() {
        let f: Form<Q> = Form::from_terms(4, 2, [(&[0usize, 1][..], rational(1, 2)), (&[3, 2][..], rational(3, 1))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"n":4,"k":2,"backend":"rational","entries":[{"idx":[1,2],"num":"1","den":"2"},{"idx":[3,4],"num":"-3","den":"1"}]}"#
        );
        let back: Form<Q> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<Form<f64>>(&s).is_err());
        let g = Form::<f64>::from_vector(&[0.5, 0.0, -1.25]);
        let back: Form<f64> = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    fn rat() -> impl Strategy<Value = Q> {
        (-6i64..=6, 1i64..=4).prop_map(|(a, b)| rational(a, b))
    }

    fn form_strategy(n: usize, k: usize) -> impl Strategy<Value = Form<Q>> {
        let basis = FormBasis::new(n, k);
        proptest::collection::vec(rat(), basis.dim()).prop_map(move |c| basis.from_coords(&c))
    }

    fn triple(max_n: usize) -> impl Strategy<Value = (Form<Q>, Form<Q>, Form<Q>)> {
        (1..=max_n)
            .prop_flat_map(|n| (Just(n), 0..=n))
            .prop_flat_map(|(n, ka)| (Just(n), Just(ka), 0..=(n - ka)))
            .prop_flat_map(|(n, ka, kb)| (form_strategy(n, ka), form_strategy(n, kb), form_strategy(n, 1)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn interior_is_antiderivation((a, b, v) in triple(8)) {
            let (n, ka, kb) = (a.n(), a.degree(), b.degree());
            prop_assume!(ka + kb >= 1);
            let lhs = interior(&v, &wedge(&a, &b).unwrap()).unwrap();
            let mut rhs = Form::zero(n, ka + kb - 1);
            if ka >= 1 {
                rhs = rhs.try_add(&wedge(&interior(&v, &a).unwrap(), &b).unwrap()).unwrap();
            }
            if kb >= 1 {
                let t = wedge(&a, &interior(&v, &b).unwrap()).unwrap();
                let sign = if ka % 2 == 0 { 1 } else { -1 };
                rhs = rhs.try_add(&t.scaled(&Q::from_i64(sign))).unwrap();
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_interior_adjoint(
            (v, a, b) in (2usize..=7)
                .prop_flat_map(|n| (Just(n), 0..n))
                .prop_flat_map(|(n, k)| (form_strategy(n, 1), form_strategy(n, k), form_strategy(n, k + 1)))
        ) {
            let lhs = form_inner(&wedge(&v, &a).unwrap(), &b).unwrap();
            let rhs = form_inner(&a, &interior(&v, &b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_associative_graded_commutative(
            (a, b, c) in (3usize..=7).prop_flat_map(|n| (form_strategy(n, 1), form_strategy(n, 2), form_strategy(n, n - 3)))
        ) {
            let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
            let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(wedge(&a, &b).unwrap(), wedge(&b, &a).unwrap());
        }

        #[test]
        fn float_backend_matches_exact(
            (a, b) in (3usize..=6).prop_flat_map(|n| (form_strategy(n, 1), form_strategy(n, 2)))
        ) {
            let int = |f: Form<Q>| f.map(|c| Q::from_integer(c.numer().clone()));
            let (a, b) = (int(a), int(b));
            let exact = hodge(&wedge(&a, &b).unwrap());
            let float = hodge(&wedge(&a.to_f64(), &b.to_f64()).unwrap());
            prop_assert!(exact.to_f64().distance(&float) <= 1e-12);
            let ie = interior(&a, &b).unwrap().to_f64();
            let iff = interior(&a.to_f64(), &b.to_f64()).unwrap();
            prop_assert!(ie.distance(&iff) <= 1e-12);
        }
    }
}
