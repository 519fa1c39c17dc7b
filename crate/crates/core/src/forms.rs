//! Hermitian and symmetric bilinear forms `h(v, w) = σ(v)ᵀ H w`.
//!
//! The form is linear in the right argument and `σ`-semilinear in the left.
//! Over characteristic two with `σ = id` only diagonalizable (non-alternating)
//! forms are accepted.

use num::{BigInt, BigRational, Integer, ToPrimitive};
use thiserror::Error;

use crate::arith;
use crate::linalg::{normalize_projective, unit_vector, vec_add, vec_scale, vec_is_zero, vec_sub, Companion, Matrix, SemiMap};
use crate::scalars::{Field, Ternary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("Gram matrix is {0}x{1}, expected a square matrix")]
    NotSquare(usize, usize),
    #[error("Gram matrix is not hermitian: entry ({0}, {1}) differs from sigma of its transpose")]
    NotHermitian(usize, usize),
    #[error("form is degenerate")]
    Degenerate,
    #[error("form is alternating; characteristic two with trivial involution needs a diagonalizable form")]
    Alternating,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is not a semi-similitude: {0}")]
    NotSimilitude(String),
    #[error("Eichler condition violated: {0}")]
    EichlerCondition(&'static str),
}

/// Orthogonal basis `v₁, …, v_n` with `values[i] = h(vᵢ, vᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalBasis<E> {
    pub vectors: Vec<Vec<E>>,
    pub values: Vec<E>,
}

impl<E: Clone> OrthogonalBasis<E> {
    /// Columns are the basis vectors.
    pub fn matrix(&self) -> Matrix<E> {
        Matrix::from_cols(&self.vectors)
    }
}

/// Class of a scalar modulo norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormClass<E> {
    Trivial,
    Nontrivial(E),
    Unknown(E),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittIndex {
    Exact(usize),
    AtLeast(usize),
}

impl WittIndex {
    pub fn lower_bound(self) -> usize {
        match self {
            WittIndex::Exact(k) | WittIndex::AtLeast(k) => k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Isometry,
    Similitude,
    SemiSimilitude,
}

/// `h(λv, λw) = r·φ(h(v, w))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapClass<E> {
    pub kind: MapKind,
    pub multiplier: E,
}

/// Certificate that `Σ aᵢ xᵢ²` is anisotropic over `ℚ`: every solution of
/// `Σ aᵢ zᵢ² ≡ 0 (mod modulus)` has all `zᵢ ≡ 0 (mod prime)`, so a primitive
/// integral zero cannot exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentCertificate {
    pub prime: u64,
    pub modulus: u64,
    pub coefficients: Vec<i64>,
}

/// A nondegenerate hermitian space `(Fⁿ, h)`.
#[derive(Clone, Debug)]
pub struct HermitianSpace<F: Field> {
    field: F,
    gram: Matrix<F::Elem>,
    orth: OrthogonalBasis<F::Elem>,
}

impl<F: Field> HermitianSpace<F> {
    pub fn new(field: F, gram: Matrix<F::Elem>) -> Result<Self, FormError> {
        if !gram.is_square() {
            return Err(FormError::NotSquare(gram.rows(), gram.cols()));
        }
        let n = gram.rows();
        for i in 0..n {
            for j in 0..n {
                if *gram.get(i, j) != field.conj(gram.get(j, i)) {
                    return Err(FormError::NotHermitian(i, j));
                }
            }
        }
        if field.is_zero(&gram.det(&field)) {
            return Err(FormError::Degenerate);
        }
        if field.characteristic() == 2 && !field.has_sigma() && (0..n).all(|i| field.is_zero(gram.get(i, i))) {
            return Err(FormError::Alternating);
        }
        let orth = orthogonalize(&field, &gram);
        Ok(Self { field, gram, orth })
    }

    pub fn diagonal(field: F, values: &[F::Elem]) -> Result<Self, FormError> {
        let gram = Matrix::diagonal(&field, values);
        Self::new(field, gram)
    }

    pub fn standard(field: F, n: usize) -> Self {
        let gram = Matrix::identity(&field, n);
        Self::new(field, gram).expect("the identity form is nondegenerate")
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn gram(&self) -> &Matrix<F::Elem> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// `h(v, w) = σ(v)ᵀ H w`.
    pub fn evaluate_h(&self, v: &[F::Elem], w: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let hw = self.gram.apply(f, w);
        let terms: Vec<_> = v.iter().zip(&hw).map(|(a, b)| f.mul(&f.conj(a), b)).collect();
        f.sum(&terms)
    }

    pub fn gram_of(&self, vectors: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
        Matrix::from_fn(vectors.len(), vectors.len(), |i, j| self.evaluate_h(&vectors[i], &vectors[j]))
    }

    /// Basis of `{x : h(v, x) = 0 for all v}`.
    pub fn orthogonal_complement(&self, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        if vectors.is_empty() {
            return (0..self.dim()).map(|i| unit_vector(f, self.dim(), i)).collect();
        }
        let rows: Vec<Vec<F::Elem>> = vectors
            .iter()
            .map(|v| {
                let cv: Vec<_> = v.iter().map(|x| f.conj(x)).collect();
                self.gram.transpose().apply(f, &cv)
            })
            .collect();
        Matrix::from_rows(rows).nullspace(f)
    }

    /// The space restricted to the span of `basis`.
    pub fn restrict(&self, basis: &[Vec<F::Elem>]) -> Result<Self, FormError> {
        Self::new(self.field.clone(), self.gram_of(basis))
    }

    /// Deterministic orthogonal basis.
    pub fn orthogonal_basis(&self) -> &OrthogonalBasis<F::Elem> {
        &self.orth
    }

    /// Class of `det H` modulo `N(F^×)`.
    pub fn discriminant(&self) -> NormClass<F::Elem> {
        let f = &self.field;
        let d = self.gram.det(f);
        match f.is_norm(&d) {
            Ternary::Yes => NormClass::Trivial,
            Ternary::No => NormClass::Nontrivial(if f.has_sigma() {
                d
            } else {
                f.square_class(&d).unwrap_or(d)
            }),
            Ternary::Unknown => NormClass::Unknown(d),
        }
    }

    pub fn is_isotropic_vector(&self, v: &[F::Elem]) -> bool {
        self.field.is_zero(&self.evaluate_h(v, v))
    }

    /// Witt index: exact over finite fields, and over `ℚ` whenever a search or
    /// a descent certificate settles it.
    pub fn witt_index(&self) -> WittIndex {
        if self.field.order().is_some() {
            return WittIndex::Exact(self.finite_witt_index());
        }
        self.infinite_witt_index()
    }

    fn finite_witt_index(&self) -> usize {
        let f = &self.field;
        let n = self.dim();
        let points: Vec<Vec<F::Elem>> = projective_points(f, n)
            .into_iter()
            .filter(|v| self.is_isotropic_vector(v))
            .collect();
        let target = n / 2;
        let mut best = 0;
        let mut stack: Vec<usize> = Vec::new();
        self.witt_dfs(&points, 0, &mut stack, &mut best, target);
        best
    }

    fn witt_dfs(&self, points: &[Vec<F::Elem>], start: usize, stack: &mut Vec<usize>, best: &mut usize, target: usize) {
        *best = (*best).max(stack.len());
        if *best >= target {
            return;
        }
        for i in start..points.len() {
            let ok = stack
                .iter()
                .all(|&j| self.field.is_zero(&self.evaluate_h(&points[j], &points[i])));
            if !ok {
                continue;
            }
            let mut span: Vec<Vec<F::Elem>> = stack.iter().map(|&j| points[j].clone()).collect();
            span.push(points[i].clone());
            if Matrix::from_rows(span).rank(&self.field) < stack.len() + 1 {
                continue;
            }
            stack.push(i);
            self.witt_dfs(points, i + 1, stack, best, target);
            stack.pop();
            if *best >= target {
                return;
            }
        }
    }

    fn infinite_witt_index(&self) -> WittIndex {
        let n = self.dim();
        if n <= 1 {
            return WittIndex::Exact(0);
        }
        match self.find_isotropic_vector() {
            Some(v) => {
                let f = &self.field;
                let k = (0..n)
                    .find(|&k| !f.is_zero(&self.evaluate_h(&v, &unit_vector(f, n, k))))
                    .expect("nondegenerate form pairs v with some basis vector");
                let w = unit_vector(f, n, k);
                let comp = self.orthogonal_complement(&[v, w]);
                let sub = self.restrict(&comp).expect("complement of a hyperbolic plane is nondegenerate");
                match sub.infinite_witt_index() {
                    WittIndex::Exact(k) => WittIndex::Exact(k + 1),
                    WittIndex::AtLeast(k) => WittIndex::AtLeast(k + 1),
                }
            }
            None => match self.anisotropy_certificate() {
                Some(_) => WittIndex::Exact(0),
                None => WittIndex::AtLeast(0),
            },
        }
    }

    /// Integer coefficients of the diagonalized form when the field is `ℚ`.
    pub fn rational_diagonal(&self) -> Option<Vec<BigInt>> {
        let vals: Vec<BigRational> = self
            .orth
            .values
            .iter()
            .map(|x| self.field.to_rational(x))
            .collect::<Option<_>>()?;
        Some(vals.iter().map(arith::integral_square_class).collect())
    }

    /// Bounded search for a nonzero isotropic vector.
    pub fn find_isotropic_vector(&self) -> Option<Vec<F::Elem>> {
        let f = &self.field;
        if let Some(coeffs) = self.rational_diagonal() {
            let coeffs: Vec<i128> = coeffs.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
            let x = search_diagonal_zero(&coeffs)?;
            // integral_square_class(c) = c·den², so the same x works up to the scaling per coordinate.
            let mut v = vec![f.zero(); self.dim()];
            for (i, xi) in x.iter().enumerate() {
                let den = self.field.to_rational(&self.orth.values[i])?.denom().clone();
                let s = f.from_int((BigInt::from(*xi) * den).to_i64()?);
                v = vec_add(f, &v, &vec_scale(f, &self.orth.vectors[i], &s));
            }
            debug_assert!(self.is_isotropic_vector(&v));
            return Some(v);
        }
        let n = self.dim();
        if let Some(q) = f.order() {
            if (q as f64).powi(n as i32 - 1) <= 1e6 {
                return projective_points(f, n).into_iter().find(|v| self.is_isotropic_vector(v));
            }
        }
        let bound: i64 = match n {
            2 => 40,
            3 => 8,
            4 => 4,
            _ => 2,
        };
        let mut coords = vec![-bound; n];
        loop {
            if coords.iter().any(|&c| c != 0) {
                let v: Vec<F::Elem> = coords.iter().map(|&c| f.from_int(c)).collect();
                if !vec_is_zero(f, &v) && self.is_isotropic_vector(&v) {
                    return Some(v);
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return None;
                }
                coords[i] += 1;
                if coords[i] > bound {
                    coords[i] = -bound;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Anisotropy certificate for forms over `ℚ`.
    pub fn anisotropy_certificate(&self) -> Option<DescentCertificate> {
        descent_certificate(&self.rational_diagonal()?)
    }

    /// Whether `λ(v) = A·φ(v)` satisfies `h(λv, λw) = r·φ(h(v, w))`.
    pub fn classify_map(&self, m: &SemiMap<F::Elem>) -> Result<MapClass<F::Elem>, FormError> {
        let f = &self.field;
        let n = self.dim();
        if m.matrix.rows() != n || m.matrix.cols() != n {
            return Err(FormError::DimensionMismatch {
                expected: n,
                got: m.matrix.rows(),
            });
        }
        let semi = m.companion == Companion::Sigma && f.has_sigma();
        let target = if semi { self.gram.conj(f) } else { self.gram.clone() };
        let pulled = m.matrix.adjoint(f).mul(f, &self.gram).mul(f, &m.matrix);
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !f.is_zero(target.get(i, j)))
            .expect("nonzero Gram matrix");
        let r = f.div(pulled.get(i, j), target.get(i, j));
        if f.is_zero(&r) {
            return Err(FormError::NotSimilitude("multiplier is zero".into()));
        }
        if pulled != target.scale(f, &r) {
            return Err(FormError::NotSimilitude(format!(
                "sigma(A)^T H A is not a multiple of {}H",
                if semi { "sigma " } else { "" }
            )));
        }
        let kind = if semi {
            MapKind::SemiSimilitude
        } else if f.is_one(&r) {
            MapKind::Isometry
        } else {
            MapKind::Similitude
        };
        Ok(MapClass { kind, multiplier: r })
    }

    /// `Σ_{z,w,p}(x) = x + z·h(w, x) − (w + z·p)·h(z, x)`.
    pub fn eichler(&self, z: &[F::Elem], w: &[F::Elem], p: &F::Elem) -> Result<SemiMap<F::Elem>, FormError> {
        let f = &self.field;
        let n = self.dim();
        if z.len() != n || w.len() != n {
            return Err(FormError::DimensionMismatch {
                expected: n,
                got: z.len().max(w.len()),
            });
        }
        if !self.is_isotropic_vector(z) {
            return Err(FormError::EichlerCondition("h(z, z) must vanish"));
        }
        if !f.is_zero(&self.evaluate_h(z, w)) {
            return Err(FormError::EichlerCondition("h(z, w) must vanish"));
        }
        if f.trace(p) != self.evaluate_h(w, w) {
            return Err(FormError::EichlerCondition("sigma(p) + p must equal h(w, w)"));
        }
        let wzp = vec_add(f, w, &vec_scale(f, z, p));
        let cols: Vec<Vec<F::Elem>> = (0..n)
            .map(|k| {
                let e = unit_vector(f, n, k);
                let a = vec_scale(f, z, &self.evaluate_h(w, &e));
                let b = vec_scale(f, &wzp, &self.evaluate_h(z, &e));
                vec_sub(f, &vec_add(f, &e, &a), &b)
            })
            .collect();
        Ok(SemiMap::linear(Matrix::from_cols(&cols)))
    }
}

/// Normalized representatives of all points of `P(Fⁿ)` in canonical order.
pub fn projective_points<F: Field>(f: &F, n: usize) -> Vec<Vec<F::Elem>> {
    let els = f.elements().expect("finite field");
    let mut out = Vec::new();
    for lead in 0..n {
        let tail = n - lead - 1;
        let count = els.len().pow(tail as u32);
        for mut idx in 0..count {
            let mut v = vec![f.zero(); n];
            v[lead] = f.one();
            for k in (lead + 1..n).rev() {
                v[k] = els[idx % els.len()].clone();
                idx /= els.len();
            }
            out.push(v);
        }
    }
    out
}

fn orthogonalize<F: Field>(f: &F, gram: &Matrix<F::Elem>) -> OrthogonalBasis<F::Elem> {
    let n = gram.rows();
    let h = |v: &[F::Elem], w: &[F::Elem]| {
        let hw = gram.apply(f, w);
        let terms: Vec<_> = v.iter().zip(&hw).map(|(a, b)| f.mul(&f.conj(a), b)).collect();
        f.sum(&terms)
    };
    let mut chosen: Vec<Vec<F::Elem>> = Vec::new();
    let mut remaining: Vec<Vec<F::Elem>> = (0..n).map(|i| unit_vector(f, n, i)).collect();
    while !remaining.is_empty() {
        if let Some(i) = remaining.iter().position(|r| !f.is_zero(&h(r, r))) {
            let p = remaining.remove(i);
            let hp = h(&p, &p);
            for x in remaining.iter_mut() {
                let c = f.div(&h(&p, x), &hp);
                *x = vec_sub(f, x, &vec_scale(f, &p, &c));
            }
            chosen.push(p);
            continue;
        }
        let (i, j, t) = (0..remaining.len())
            .flat_map(|i| (i + 1..remaining.len()).map(move |j| (i, j)))
            .find_map(|(i, j)| {
                let t = h(&remaining[i], &remaining[j]);
                (!f.is_zero(&t)).then_some((i, j, t))
            })
            .expect("nondegenerate form has a non-orthogonal pair");
        if f.characteristic() != 2 || f.has_sigma() {
            let s = if f.characteristic() != 2 {
                f.one()
            } else {
                f.trace_one().expect("trace-one element")
            };
            let c = f.div(&s, &t);
            let shifted = vec_add(f, &remaining[i], &vec_scale(f, &remaining[j], &c));
            remaining[i] = shifted;
            continue;
        }
        // Characteristic two, σ = id: every remaining vector is isotropic, so
        // absorb a hyperbolic pair into the last anisotropic pivot.
        let b = chosen.pop().expect("non-alternating form has an anisotropic pivot");
        let cb = h(&b, &b);
        let w = vec_scale(f, &remaining.remove(j), &f.inv(&t).expect("nonzero"));
        let u = remaining.remove(i);
        for x in remaining.iter_mut() {
            let a = vec_scale(f, &u, &h(&w, x));
            let c = vec_scale(f, &w, &h(&u, x));
            *x = vec_sub(f, &vec_sub(f, x, &a), &c);
        }
        let wc = vec_scale(f, &w, &cb);
        chosen.push(vec_add(f, &b, &u));
        chosen.push(vec_add(f, &b, &wc));
        chosen.push(vec_add(f, &vec_add(f, &b, &u), &wc));
    }
    let mut vectors: Vec<Vec<F::Elem>> = chosen
        .iter()
        .map(|v| normalize_projective(f, v).expect("nonzero basis vector"))
        .collect();
    let lead = |v: &Vec<F::Elem>| v.iter().position(|x| !f.is_zero(x)).unwrap_or(n);
    vectors.sort_by_key(lead);
    let values = vectors.iter().map(|v| h(v, v)).collect();
    OrthogonalBasis { vectors, values }
}

fn search_diagonal_zero(a: &[i128]) -> Option<Vec<i128>> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    let bound: i128 = match n {
        2 => 1,
        3 => 200,
        4 => 40,
        5 => 12,
        _ => 5,
    };
    let last = a[n - 1];
    if n == 2 {
        // a₀x² + a₁y² = 0 with (x, y) = (a₁, r) where r² = -a₀a₁.
        let r = isqrt(-a[0] * a[1])?;
        return Some(vec![a[1], r]);
    }
    let mut x = vec![-bound; n - 1];
    loop {
        if x.iter().any(|&c| c != 0) {
            let s: i128 = x.iter().zip(a).map(|(xi, ai)| ai * xi * xi).sum();
            if s % last == 0 {
                if let Some(y) = isqrt(-s / last) {
                    let mut v = x.clone();
                    v.push(y);
                    return Some(v);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n - 1 {
                return None;
            }
            x[i] += 1;
            if x[i] > bound {
                x[i] = -bound;
                i += 1;
            } else {
                break;
            }
        }
    }
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).find(|&c| c >= 0 && c * c == n)
}

/// Searches primes `p | 2·∏aᵢ` and moduli `p^k` for a descent certificate.
pub fn descent_certificate(coefficients: &[BigInt]) -> Option<DescentCertificate> {
    let a: Vec<i64> = coefficients
        .iter()
        .map(|c| arith::squarefree_part(c).and_then(|s| s.to_i64()))
        .collect::<Option<_>>()?;
    let n = a.len() as u32;
    let mut primes: Vec<u64> = vec![2];
    for c in &a {
        for (p, _) in arith::factor(&BigInt::from(*c))? {
            let p = p as u64;
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    for p in primes {
        for k in 1..=4u32 {
            let m = p.pow(k);
            if (m as f64).powi(n as i32) > 2.0e7 {
                break;
            }
            if descent_holds(&a, p, m) {
                return Some(DescentCertificate {
                    prime: p,
                    modulus: m,
                    coefficients: a.clone(),
                });
            }
        }
    }
    None
}

/// Whether `Σ aᵢ zᵢ² ≡ 0 (mod m)` forces every `zᵢ ≡ 0 (mod p)`.
pub fn descent_holds(a: &[i64], p: u64, m: u64) -> bool {
    let n = a.len();
    let tables: Vec<Vec<u64>> = a
        .iter()
        .map(|&ai| {
            (0..m)
                .map(|z| ((ai as i128 * (z * z) as i128).mod_floor(&(m as i128))) as u64)
                .collect()
        })
        .collect();
    let mut z = vec![0u64; n];
    loop {
        let s = z.iter().enumerate().map(|(i, &zi)| tables[i][zi as usize]).sum::<u64>() % m;
        if s == 0 && z.iter().any(|&zi| zi % p != 0) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == n {
                return true;
            }
            z[i] += 1;
            if z[i] == m {
                z[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, FiniteField, Gf, Involution, Rationals};
    use proptest::prelude::*;

    fn qdiag(v: &[i64]) -> HermitianSpace<Rationals> {
        HermitianSpace::diagonal(Rationals, &v.iter().map(|&x| rat(x, 1)).collect::<Vec<_>>()).unwrap()
    }

    fn check_orthogonal<F: Field>(s: &HermitianSpace<F>) {
        let f = s.field();
        let ob = s.orthogonal_basis();
        let g = s.gram_of(&ob.vectors);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if i == j {
                    assert!(!f.is_zero(g.get(i, i)));
                    assert_eq!(*g.get(i, i), ob.values[i]);
                } else {
                    assert!(f.is_zero(g.get(i, j)));
                }
            }
        }
        assert!(!f.is_zero(&ob.matrix().det(f)));
    }

    #[test]
    fn hyperbolic_plane_basis() {
        let s = HermitianSpace::new(
            Rationals,
            Matrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]),
        )
        .unwrap();
        let ob = s.orthogonal_basis();
        assert_eq!(ob.vectors, vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]]);
        assert_eq!(ob.values, vec![rat(2, 1), rat(-2, 1)]);
        assert_eq!(s.discriminant(), NormClass::Nontrivial(rat(-1, 1)));
        assert_eq!(s.witt_index(), WittIndex::Exact(1));
    }

    #[test]
    fn isotropic_vectors_over_small_fields_are_nonzero() {
        for (q, inv) in [(4, Involution::Galois), (2, Involution::Identity), (9, Involution::Galois), (5, Involution::Identity)] {
            let f = FiniteField::new(q, inv).unwrap();
            let s = HermitianSpace::standard(f.clone(), 4);
            let v = s.find_isotropic_vector().unwrap();
            assert!(!v.iter().all(|x| f.is_zero(x)), "{}", f.name());
            assert!(s.is_isotropic_vector(&v));
        }
    }

    #[test]
    fn characteristic_two_orthogonalization() {
        let f = FiniteField::new(4, Involution::Identity).unwrap();
        // e₁ anisotropic, (e₂, e₃) a hyperbolic pair orthogonal to it.
        let o = f.one();
        let z = f.zero();
        let gram = Matrix::from_rows(vec![vec![o, z, z], vec![z, z, o], vec![z, o, z]]);
        let s = HermitianSpace::new(f.clone(), gram).unwrap();
        check_orthogonal(&s);
        let alt = Matrix::from_rows(vec![vec![z, o], vec![o, z]]);
        assert_eq!(HermitianSpace::new(f, alt).unwrap_err(), FormError::Alternating);
    }

    #[test]
    fn rejects_bad_gram_matrices() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let t = f.generator().unwrap();
        let gram = Matrix::from_rows(vec![vec![f.one(), t], vec![t, f.one()]]);
        assert_eq!(HermitianSpace::new(f.clone(), gram).unwrap_err(), FormError::NotHermitian(0, 1));
        let sing = Matrix::from_rows(vec![vec![f.one(), f.one()], vec![f.one(), f.one()]]);
        assert_eq!(HermitianSpace::new(f, sing).unwrap_err(), FormError::Degenerate);
    }

    #[test]
    fn witt_indices_over_finite_fields() {
        let f4 = FiniteField::new(4, Involution::Galois).unwrap();
        assert_eq!(HermitianSpace::standard(f4, 4).witt_index(), WittIndex::Exact(2));
        let f5 = FiniteField::prime(5).unwrap();
        let d = |v: &[i64]| HermitianSpace::diagonal(f5.clone(), &v.iter().map(|&x| f5.from_int(x)).collect::<Vec<_>>()).unwrap();
        assert_eq!(d(&[1, 1, 1, -1]).witt_index(), WittIndex::Exact(2));
        assert_eq!(d(&[1, -1, 1, 2]).witt_index(), WittIndex::Exact(1));
        assert_eq!(d(&[1, 2]).witt_index(), WittIndex::Exact(0));
        let f3 = FiniteField::prime(3).unwrap();
        let s = HermitianSpace::diagonal(f3.clone(), &[f3.one(), f3.one(), f3.one(), f3.from_int(2)]).unwrap();
        assert_eq!(s.witt_index(), WittIndex::Exact(1));
    }

    #[test]
    fn rational_anisotropy_certificates() {
        let s = qdiag(&[1, 2, 10, -5]);
        let cert = s.anisotropy_certificate().unwrap();
        assert_eq!((cert.prime, cert.modulus), (5, 25));
        assert_eq!(s.witt_index(), WittIndex::Exact(0));
        assert_eq!(s.discriminant(), NormClass::Nontrivial(rat(-1, 1)));
        let s1 = qdiag(&[1, -2, 3, -6]);
        let cert = s1.anisotropy_certificate().unwrap();
        assert!(descent_holds(&cert.coefficients, cert.prime, cert.modulus));
        assert!(descent_holds(&[1, -2, 3, -6], 3, 9));
        assert_eq!(s1.witt_index(), WittIndex::Exact(0));
        assert_eq!(s1.discriminant(), NormClass::Trivial);
        assert_eq!(qdiag(&[1, 1, 1, -1]).witt_index(), WittIndex::Exact(1));
        assert_eq!(qdiag(&[1, 1, -1, -1]).witt_index(), WittIndex::Exact(2));
        assert_eq!(qdiag(&[1, 1, 1, 1]).witt_index(), WittIndex::Exact(0));
    }

    #[test]
    fn descent_check_is_exhaustive() {
        // x² + y² is isotropic mod 25 with a unit (3² + 4² = 25), so no certificate at 5.
        assert!(!descent_holds(&[1, 1], 5, 25));
        assert!(descent_holds(&[1, 2, 10, -5], 5, 25));
        assert!(!descent_holds(&[1, 2, 10, -5], 5, 5));
    }

    #[test]
    fn eichler_transformations_are_isometries() {
        let f = FiniteField::prime(5).unwrap();
        let s = HermitianSpace::diagonal(f.clone(), &[f.one(), f.from_int(-1), f.one(), f.from_int(2)]).unwrap();
        let z = vec![f.one(), f.one(), f.zero(), f.zero()];
        let w = vec![f.zero(), f.zero(), f.one(), f.zero()];
        let p = f.div(&f.one(), &f.from_int(2));
        let m = s.eichler(&z, &w, &p).unwrap();
        assert_eq!(s.classify_map(&m).unwrap().kind, MapKind::Isometry);
        assert_eq!(m.matrix.det(&f), f.one());
        assert_eq!(
            s.eichler(&w, &z, &p).unwrap_err(),
            FormError::EichlerCondition("h(z, z) must vanish")
        );
        assert_eq!(
            s.eichler(&z, &w, &f.zero()).unwrap_err(),
            FormError::EichlerCondition("sigma(p) + p must equal h(w, w)")
        );
    }

    #[test]
    fn classify_similitudes() {
        let f = FiniteField::prime(3).unwrap();
        let (o, z, two) = (f.one(), f.zero(), f.from_int(2));
        // Gram diag-block [[0,1],[1,0]] ⊕ diag(1, -δ) with δ = 2.
        let t = Matrix::from_rows(vec![
            vec![z, o, z, z],
            vec![o, z, z, z],
            vec![z, z, o, z],
            vec![z, z, z, f.neg(&two)],
        ]);
        let s = HermitianSpace::new(f.clone(), t).unwrap();
        // γ_s with x = 1, y = 1: s = x² − δy² = 1 − 2 = 2.
        let sv = two;
        let g = Matrix::from_rows(vec![
            vec![z, sv, z, z],
            vec![o, z, z, z],
            vec![z, z, o, two],
            vec![z, z, o, o],
        ]);
        let c = s.classify_map(&SemiMap::linear(g.clone())).unwrap();
        assert_eq!(c.kind, MapKind::Similitude);
        assert_eq!(c.multiplier, sv);
        assert_eq!(g.det(&f), f.neg(&f.mul(&sv, &sv)));
        let bad = Matrix::from_rows(vec![vec![o, o, z, z], vec![z, o, z, z], vec![z, z, o, z], vec![z, z, z, o]]);
        assert!(matches!(s.classify_map(&SemiMap::linear(bad)), Err(FormError::NotSimilitude(_))));
    }

    #[test]
    fn semilinear_similitude_over_f9() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let s = HermitianSpace::standard(f.clone(), 2);
        let m = SemiMap::new(Matrix::identity(&f, 2), Companion::Sigma);
        let c = s.classify_map(&m).unwrap();
        assert_eq!(c.kind, MapKind::SemiSimilitude);
        assert_eq!(c.multiplier, f.one());
    }

    #[test]
    fn projective_point_count() {
        let f = FiniteField::prime(3).unwrap();
        assert_eq!(projective_points(&f, 4).len(), 40);
    }

    proptest! {
        #[test]
        fn orthogonal_basis_over_f9_hermitian(entries in prop::collection::vec(0u16..9, 6)) {
            let f = FiniteField::new(9, Involution::Galois).unwrap();
            // Build a hermitian matrix from upper-triangular data with fixed diagonal.
            let fixed: Vec<Gf> = f.elements().unwrap().into_iter().filter(|x| f.is_fixed(x)).collect();
            let d = |k: u16| fixed[(k as usize) % fixed.len()];
            let u = |k: usize| Gf(entries[k]);
            let gram = Matrix::from_rows(vec![
                vec![d(entries[0]), u(1), u(2)],
                vec![f.conj(&u(1)), d(entries[3]), u(4)],
                vec![f.conj(&u(2)), f.conj(&u(4)), d(entries[5])],
            ]);
            if let Ok(s) = HermitianSpace::new(f.clone(), gram) {
                check_orthogonal(&s);
            }
        }

        #[test]
        fn orthogonal_basis_over_rationals(entries in prop::collection::vec(-6i64..6, 10)) {
            let mut rows = vec![vec![rat(0, 1); 4]; 4];
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    rows[i][j] = rat(entries[k], 1);
                    rows[j][i] = rat(entries[k], 1);
                    k += 1;
                }
            }
            if let Ok(s) = HermitianSpace::new(Rationals, Matrix::from_rows(rows)) {
                check_orthogonal(&s);
            }
        }

        #[test]
        fn orthogonal_basis_char_two(entries in prop::collection::vec(0u16..4, 10)) {
            let f = FiniteField::new(4, Involution::Identity).unwrap();
            let mut rows = vec![vec![Gf(0); 4]; 4];
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    rows[i][j] = Gf(entries[k]);
                    rows[j][i] = Gf(entries[k]);
                    k += 1;
                }
            }
            if let Ok(s) = HermitianSpace::new(f, Matrix::from_rows(rows)) {
                check_orthogonal(&s);
            }
        }
    }
}
