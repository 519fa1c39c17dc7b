//! Exterior powers `Λ^ℓ Fⁿ` with the basis of increasing index tuples.
//!
//! Basis elements are bitmasks over `{0, …, n−1}`; bit `i` stands for `eᵢ₊₁`.
//! Masks of a fixed degree are ordered lexicographically as increasing tuples.

use std::fmt;

use thiserror::Error;

use crate::forms::HermitianSpace;
use crate::linalg::{Matrix, SemiMap};
use crate::scalars::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("degree {0} exceeds dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("degrees {0} and {1} are not complementary in dimension {2}")]
    NotComplementary(usize, usize, usize),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the top form must be nonzero")]
    ZeroTopForm,
}

pub type Mask = u32;

/// The `C(n, ℓ)` basis masks of `Λ^ℓ Fⁿ` in lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtBasis {
    n: usize,
    degree: usize,
    masks: Vec<Mask>,
    index: Vec<usize>,
}

impl ExtBasis {
    pub fn new(n: usize, degree: usize) -> Self {
        assert!(n <= 16, "dimension too large");
        let mut masks = Vec::new();
        let mut tuple: Vec<usize> = (0..degree).collect();
        if degree <= n {
            loop {
                masks.push(tuple.iter().fold(0, |m, &i| m | (1 << i)));
                let Some(k) = (0..degree).rev().find(|&k| tuple[k] < n - degree + k) else {
                    break;
                };
                tuple[k] += 1;
                for m in k + 1..degree {
                    tuple[m] = tuple[m - 1] + 1;
                }
            }
        }
        let mut index = vec![usize::MAX; 1 << n];
        for (i, &m) in masks.iter().enumerate() {
            index[m as usize] = i;
        }
        Self { n, degree, masks, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn mask(&self, i: usize) -> Mask {
        self.masks[i]
    }

    pub fn index_of(&self, mask: Mask) -> Option<usize> {
        self.index.get(mask as usize).copied().filter(|&i| i != usize::MAX)
    }

    /// Mask of the complement in `{0, …, n−1}`.
    pub fn complement(&self, mask: Mask) -> Mask {
        !mask & ((1u32 << self.n) - 1)
    }
}

/// Indices (1-based) of a mask, e.g. `0b1010 → [2, 4]`.
pub fn mask_indices(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Mask of 1-based indices.
pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << (i - 1)))
}

/// Sign of `e_A ∧ e_B` relative to `e_{A∪B}`; zero if `A ∩ B ≠ ∅`.
pub fn wedge_sign(a: Mask, b: Mask) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    for i in 0..32 {
        if b & (1 << i) != 0 {
            inversions += (a >> (i + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed<F: Field>(f: &F, s: i32, x: &F::Elem) -> F::Elem {
    match s {
        1 => x.clone(),
        -1 => f.neg(x),
        _ => f.zero(),
    }
}

/// An element of `Λ^ℓ Fⁿ` by its coordinates in [`ExtBasis`] order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtVector<E> {
    pub n: usize,
    pub degree: usize,
    pub coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> ExtVector<E> {
    pub fn zero<F: Field<Elem = E>>(f: &F, n: usize, degree: usize) -> Self {
        let len = ExtBasis::new(n, degree).len();
        Self {
            n,
            degree,
            coeffs: vec![f.zero(); len],
        }
    }

    /// The basis vector `e_S`.
    pub fn basis<F: Field<Elem = E>>(f: &F, n: usize, mask: Mask) -> Self {
        let degree = mask.count_ones() as usize;
        let basis = ExtBasis::new(n, degree);
        let mut v = Self::zero(f, n, degree);
        v.coeffs[basis.index_of(mask).expect("mask within dimension")] = f.one();
        v
    }

    pub fn from_coeffs(n: usize, degree: usize, coeffs: Vec<E>) -> Self {
        Self { n, degree, coeffs }
    }

    /// `v₁ ∧ ⋯ ∧ v_k`; coordinates are the maximal minors.
    pub fn decomposable<F: Field<Elem = E>>(f: &F, vectors: &[Vec<E>]) -> Self {
        let n = vectors.first().map_or(0, |v| v.len());
        let k = vectors.len();
        let m = Matrix::from_cols(vectors);
        let basis = ExtBasis::new(n, k);
        let cols: Vec<usize> = (0..k).collect();
        let coeffs = basis
            .masks()
            .iter()
            .map(|&s| {
                let rows: Vec<usize> = mask_indices(s).into_iter().map(|i| i - 1).collect();
                m.submatrix(&rows, &cols).det(f)
            })
            .collect();
        Self { n, degree: k, coeffs }
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f.sub(a, b)).collect(),
        }
    }

    /// Right scalar multiplication `X·s`.
    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| f.mul(a, s)).collect(),
        }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.coeffs.iter().all(|a| f.is_zero(a))
    }

    /// Coefficient at a mask.
    pub fn coeff(&self, mask: Mask) -> Option<&E> {
        ExtBasis::new(self.n, self.degree).index_of(mask).map(|i| &self.coeffs[i])
    }

    pub fn display<'a, F: Field<Elem = E>>(&'a self, f: &'a F) -> DisplayExt<'a, F> {
        DisplayExt { v: self, f }
    }
}

/// Formats an [`ExtVector`] as a signed sum of wedge monomials.
pub struct DisplayExt<'a, F: Field> {
    v: &'a ExtVector<F::Elem>,
    f: &'a F,
}

impl<F: Field> fmt::Display for DisplayExt<'_, F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = ExtBasis::new(self.v.n, self.v.degree);
        let mut first = true;
        for (i, c) in self.v.coeffs.iter().enumerate() {
            if self.f.is_zero(c) {
                continue;
            }
            let name = if self.v.degree == 0 {
                "1".to_string()
            } else {
                mask_indices(basis.mask(i))
                    .iter()
                    .map(|k| format!("e{k}"))
                    .collect::<Vec<_>>()
                    .join("^")
            };
            let mut s = self.f.format(c);
            let negative = s.starts_with('-') && !s[1..].contains(['+', '-']);
            if negative {
                s.remove(0);
            }
            let term = if s == "1" {
                name
            } else if s.contains(['+', '-', '*']) {
                format!("({s})*{name}")
            } else {
                format!("{s}*{name}")
            };
            match (first, negative) {
                (true, true) => write!(out, "-{term}")?,
                (true, false) => write!(out, "{term}")?,
                (false, true) => write!(out, " - {term}")?,
                (false, false) => write!(out, " + {term}")?,
            }
            first = false;
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

/// `x ∧ y` for homogeneous `x`, `y`.
pub fn wedge<F: Field>(
    f: &F,
    x: &ExtVector<F::Elem>,
    y: &ExtVector<F::Elem>,
) -> Result<ExtVector<F::Elem>, ExteriorError> {
    if x.n != y.n {
        return Err(ExteriorError::DimensionMismatch { expected: x.n, got: y.n });
    }
    let n = x.n;
    let d = x.degree + y.degree;
    if d > n {
        return Err(ExteriorError::DegreeOverflow(d, n));
    }
    let (bx, by, bz) = (ExtBasis::new(n, x.degree), ExtBasis::new(n, y.degree), ExtBasis::new(n, d));
    let mut out = ExtVector::zero(f, n, d);
    for (i, a) in x.coeffs.iter().enumerate() {
        if f.is_zero(a) {
            continue;
        }
        for (j, b) in y.coeffs.iter().enumerate() {
            let (ma, mb) = (bx.mask(i), by.mask(j));
            let s = wedge_sign(ma, mb);
            if s == 0 || f.is_zero(b) {
                continue;
            }
            let k = bz.index_of(ma | mb).expect("union has degree d");
            out.coeffs[k] = f.add(&out.coeffs[k], &signed(f, s, &f.mul(a, b)));
        }
    }
    Ok(out)
}

/// The ℓ-th compound matrix: entry `(S, T)` is the minor `det A[S, T]`.
pub fn compound<F: Field>(f: &F, a: &Matrix<F::Elem>, degree: usize) -> Matrix<F::Elem> {
    let basis = ExtBasis::new(a.rows(), degree);
    let idx: Vec<Vec<usize>> = basis
        .masks()
        .iter()
        .map(|&m| mask_indices(m).into_iter().map(|i| i - 1).collect())
        .collect();
    Matrix::from_fn(basis.len(), basis.len(), |s, t| a.submatrix(&idx[s], &idx[t]).det(f))
}

/// `Λ^ℓ λ`, with the same companion as `λ`.
pub fn ext_power_map<F: Field>(f: &F, m: &SemiMap<F::Elem>, degree: usize) -> SemiMap<F::Elem> {
    SemiMap::new(compound(f, &m.matrix, degree), m.companion)
}

/// Gram matrix of `Λ^ℓ h` on the basis `e_S`.
pub fn ext_gram<F: Field>(space: &HermitianSpace<F>, degree: usize) -> Matrix<F::Elem> {
    compound(space.field(), space.gram(), degree)
}

/// `Λ^ℓ h(X, Y) = σ(X)ᵀ G Y` with `G` the compound Gram matrix.
pub fn ext_h<F: Field>(
    space: &HermitianSpace<F>,
    x: &ExtVector<F::Elem>,
    y: &ExtVector<F::Elem>,
) -> F::Elem {
    ext_h_with(space.field(), &ext_gram(space, x.degree), x, y)
}

/// `σ(X)ᵀ G Y` against a precomputed Gram matrix.
pub fn ext_h_with<F: Field>(
    f: &F,
    gram: &Matrix<F::Elem>,
    x: &ExtVector<F::Elem>,
    y: &ExtVector<F::Elem>,
) -> F::Elem {
    let gy = gram.apply(f, &y.coeffs);
    let terms: Vec<_> = x.coeffs.iter().zip(&gy).map(|(a, b)| f.mul(&f.conj(a), b)).collect();
    f.sum(&terms)
}

/// The isomorphism `b: Λⁿ V → F`, stored as `b₀ = b(e₁ ∧ ⋯ ∧ e_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopForm<E> {
    pub b0: E,
}

impl<E: Clone + PartialEq> TopForm<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, b0: E) -> Result<Self, ExteriorError> {
        if f.is_zero(&b0) {
            return Err(ExteriorError::ZeroTopForm);
        }
        Ok(Self { b0 })
    }

    pub fn standard<F: Field<Elem = E>>(f: &F) -> Self {
        Self { b0: f.one() }
    }

    /// The top form with `b(v₁ ∧ ⋯ ∧ v_n) = value` for the columns `vᵢ` of `basis`.
    pub fn from_basis_value<F: Field<Elem = E>>(f: &F, basis: &Matrix<E>, value: E) -> Result<Self, ExteriorError> {
        let d = basis.det(f);
        if f.is_zero(&d) || f.is_zero(&value) {
            return Err(ExteriorError::ZeroTopForm);
        }
        Ok(Self { b0: f.div(&value, &d) })
    }

    /// `b(v₁ ∧ ⋯ ∧ v_n) = b₀·det B`.
    pub fn value_on<F: Field<Elem = E>>(&self, f: &F, basis: &Matrix<E>) -> E {
        f.mul(&self.b0, &basis.det(f))
    }

    pub fn rescale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        Self { b0: f.mul(&self.b0, s) }
    }
}

/// `Pf(X, Y) = b(X ∧ Y)` for `deg X + deg Y = n`.
pub fn pfaffian<F: Field>(
    f: &F,
    b: &TopForm<F::Elem>,
    x: &ExtVector<F::Elem>,
    y: &ExtVector<F::Elem>,
) -> Result<F::Elem, ExteriorError> {
    if x.n != y.n {
        return Err(ExteriorError::DimensionMismatch { expected: x.n, got: y.n });
    }
    if x.degree + y.degree != x.n {
        return Err(ExteriorError::NotComplementary(x.degree, y.degree, x.n));
    }
    let top = wedge(f, x, y)?;
    Ok(f.mul(&b.b0, &top.coeffs[0]))
}

/// Matrix `P` with `Pf(X, Y) = Xᵀ P Y`; rows are `(n−ℓ)`-sets, columns `ℓ`-sets.
pub fn pfaffian_matrix<F: Field>(f: &F, b: &TopForm<F::Elem>, n: usize, degree: usize) -> Matrix<F::Elem> {
    let (rows, cols) = (ExtBasis::new(n, n - degree), ExtBasis::new(n, degree));
    Matrix::from_fn(rows.len(), cols.len(), |i, j| signed(f, wedge_sign(rows.mask(i), cols.mask(j)), &b.b0))
}

/// Klein quadratic form on `Λ² F⁴`: `b₀·(x₁₂x₃₄ − x₁₃x₂₄ + x₁₄x₂₃)`.
pub fn klein_quadratic<F: Field>(
    f: &F,
    b: &TopForm<F::Elem>,
    x: &ExtVector<F::Elem>,
) -> Result<F::Elem, ExteriorError> {
    if x.n != 4 {
        return Err(ExteriorError::DimensionMismatch { expected: 4, got: x.n });
    }
    if x.degree != 2 {
        return Err(ExteriorError::NotComplementary(x.degree, x.degree, 4));
    }
    // Order: 12, 13, 14, 23, 24, 34.
    let c = &x.coeffs;
    let v = f.add(
        &f.sub(&f.mul(&c[0], &c[5]), &f.mul(&c[1], &c[4])),
        &f.mul(&c[2], &c[3]),
    );
    Ok(f.mul(&b.b0, &v))
}
