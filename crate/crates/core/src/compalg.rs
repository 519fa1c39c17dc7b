//! Composition algebras by Cayley–Dickson doubling and the octonion models
//! built on a four-dimensional hermitian space.

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::arith::{self, Place};
use crate::forms::HermitianSpace;
use crate::linalg::{vec_add, vec_scale, Matrix};
use crate::scalars::{Field, Ternary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompAlgError {
    #[error("doubling beyond dimension 8")]
    DimensionOverflow,
    #[error("doubling scalar must be nonzero")]
    ZeroScalar,
    #[error("the construction needs a nontrivial involution")]
    TrivialInvolution,
    #[error("wrong characteristic: {0}")]
    Characteristic(&'static str),
    #[error("the construction needs dimension 4, got {0}")]
    Dimension(usize),
    #[error("normalization violated: {0}")]
    Normalization(&'static str),
    #[error("the discriminant is not a norm")]
    NotSplit,
    #[error("scalar condition violated: {0}")]
    Scalar(&'static str),
}

/// The two-dimensional (or trivial) algebra at the bottom of a doubling chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base<E> {
    /// `R` itself.
    Field,
    /// `R[X]/(X² − d)`, basis `1, t` with `t² = d`.
    Quadratic(E),
    /// `R[X]/(X² − X + r)`, basis `1, t` with `t² = t − r`.
    ArtinSchreier(E),
}

/// `base` doubled once for each scalar in `doublings`.
#[derive(Clone, Debug)]
pub struct CompositionAlgebra<F: Field> {
    field: F,
    base: Base<F::Elem>,
    doublings: Vec<F::Elem>,
}

impl<F: Field> CompositionAlgebra<F> {
    pub fn new(field: F, base: Base<F::Elem>) -> Self {
        Self {
            field,
            base,
            doublings: Vec::new(),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn base(&self) -> &Base<F::Elem> {
        &self.base
    }

    pub fn doublings(&self) -> &[F::Elem] {
        &self.doublings
    }

    fn base_dim(&self) -> usize {
        match self.base {
            Base::Field => 1,
            _ => 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.base_dim() << self.doublings.len()
    }

    /// Cayley–Dickson double with `N((a, b)) = N(a) − c·N(b)`.
    pub fn double(&self, c: F::Elem) -> Result<Self, CompAlgError> {
        if self.dim() >= 8 {
            return Err(CompAlgError::DimensionOverflow);
        }
        if self.field.is_zero(&c) {
            return Err(CompAlgError::ZeroScalar);
        }
        let mut out = self.clone();
        out.doublings.push(c);
        Ok(out)
    }

    pub fn one(&self) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[0] = self.field.one();
        v
    }

    pub fn unit(&self, i: usize) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    fn base_mul(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        match &self.base {
            Base::Field => vec![f.mul(&x[0], &y[0])],
            Base::Quadratic(d) => vec![
                f.add(&f.mul(&x[0], &y[0]), &f.mul(d, &f.mul(&x[1], &y[1]))),
                f.add(&f.mul(&x[0], &y[1]), &f.mul(&x[1], &y[0])),
            ],
            Base::ArtinSchreier(r) => {
                let tt = f.mul(&x[1], &y[1]);
                vec![
                    f.sub(&f.mul(&x[0], &y[0]), &f.mul(r, &tt)),
                    f.add(&f.add(&f.mul(&x[0], &y[1]), &f.mul(&x[1], &y[0])), &tt),
                ]
            }
        }
    }

    fn base_conj(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        match &self.base {
            Base::Field => x.to_vec(),
            Base::Quadratic(_) => vec![x[0].clone(), f.neg(&x[1])],
            Base::ArtinSchreier(_) => vec![f.add(&x[0], &x[1]), f.neg(&x[1])],
        }
    }

    fn mul_at(&self, level: usize, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        if level == 0 {
            return self.base_mul(x, y);
        }
        let f = &self.field;
        let h = x.len() / 2;
        let (a, b) = x.split_at(h);
        let (c, d) = y.split_at(h);
        let g = &self.doublings[level - 1];
        let first = vec_add(
            f,
            &self.mul_at(level - 1, a, c),
            &vec_scale(f, &self.mul_at(level - 1, &self.conj_at(level - 1, d), b), g),
        );
        let second = vec_add(
            f,
            &self.mul_at(level - 1, d, a),
            &self.mul_at(level - 1, b, &self.conj_at(level - 1, c)),
        );
        first.into_iter().chain(second).collect()
    }

    fn conj_at(&self, level: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        if level == 0 {
            return self.base_conj(x);
        }
        let h = x.len() / 2;
        let (a, b) = x.split_at(h);
        let mut out = self.conj_at(level - 1, a);
        out.extend(b.iter().map(|e| self.field.neg(e)));
        out
    }

    fn norm_at(&self, level: usize, x: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        if level == 0 {
            return match &self.base {
                Base::Field => f.mul(&x[0], &x[0]),
                Base::Quadratic(d) => f.sub(&f.mul(&x[0], &x[0]), &f.mul(d, &f.mul(&x[1], &x[1]))),
                Base::ArtinSchreier(r) => f.add(
                    &f.add(&f.mul(&x[0], &x[0]), &f.mul(&x[0], &x[1])),
                    &f.mul(r, &f.mul(&x[1], &x[1])),
                ),
            };
        }
        let h = x.len() / 2;
        let g = &self.doublings[level - 1];
        f.sub(&self.norm_at(level - 1, &x[..h]), &f.mul(g, &self.norm_at(level - 1, &x[h..])))
    }

    pub fn mul(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        self.mul_at(self.doublings.len(), x, y)
    }

    pub fn conj(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        self.conj_at(self.doublings.len(), x)
    }

    /// `N` from the doubling recursion.
    pub fn norm(&self, x: &[F::Elem]) -> F::Elem {
        self.norm_at(self.doublings.len(), x)
    }

    /// `x·x̄`, which is a scalar multiple of `1`.
    pub fn norm_by_product(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        self.mul(x, &self.conj(x))
    }

    pub fn trace(&self, x: &[F::Elem]) -> F::Elem {
        self.field.add(&x[0], &self.conj(x)[0])
    }

    /// `f_N(x, y) = N(x + y) − N(x) − N(y)`.
    pub fn polar(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        f.sub(&f.sub(&self.norm(&vec_add(f, x, y)), &self.norm(x)), &self.norm(y))
    }

    pub fn polar_gram(&self) -> Matrix<F::Elem> {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| self.polar(&self.unit(i), &self.unit(j)))
    }

    /// Doubling tree, bottom first.
    pub fn describe(&self) -> String {
        let f = &self.field;
        let mut s = match &self.base {
            Base::Field => f.name(),
            Base::Quadratic(d) => format!("{}[X]/(X^2 - ({}))", f.name(), f.format(d)),
            Base::ArtinSchreier(r) => format!("{}[X]/(X^2 - X + ({}))", f.name(), f.format(r)),
        };
        for c in &self.doublings {
            s = format!("({s})-double by {}", f.format(c));
        }
        s
    }
}

/// An `R`-basis of `V` identified with the coordinates of an algebra, so that
/// `h(v, v)` is the norm.
#[derive(Clone, Debug)]
pub struct OctonionModel<F: Field> {
    pub algebra: CompositionAlgebra<F>,
    /// `basis[i]` corresponds to the `i`-th algebra coordinate.
    pub basis: Vec<Vec<F::Elem>>,
    /// Basis of the copy `v₁F` of `F`.
    pub subfield: Vec<Vec<F::Elem>>,
    /// Basis of `F^⊥`.
    pub perp: Vec<Vec<F::Elem>>,
    /// The planes `C₁, …, C₄` of the characteristic-two model.
    pub planes: Option<Vec<Vec<Vec<F::Elem>>>>,
}

impl<F: Field> OctonionModel<F> {
    pub fn vector(&self, coords: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra.field();
        coords
            .iter()
            .zip(&self.basis)
            .fold(vec![f.zero(); self.basis[0].len()], |acc, (c, b)| vec_add(f, &acc, &vec_scale(f, b, c)))
    }

    /// `N(x) = h(x, x)` on the basis and `f_N = h + σ∘h` on all pairs.
    pub fn matches_norm(&self, space: &HermitianSpace<F>) -> bool {
        let f = self.algebra.field();
        let d = self.algebra.dim();
        (0..d).all(|i| {
            let ei = self.algebra.unit(i);
            self.algebra.norm(&ei) == space.evaluate_h(&self.basis[i], &self.basis[i])
                && (0..d).all(|j| {
                    let hij = space.evaluate_h(&self.basis[i], &self.basis[j]);
                    self.algebra.polar(&ei, &self.algebra.unit(j)) == f.add(&hij, &f.conj(&hij))
                })
        })
    }
}

fn check_normalized<F: Field>(space: &HermitianSpace<F>) -> Result<Vec<F::Elem>, CompAlgError> {
    let f = space.field();
    if !f.has_sigma() {
        return Err(CompAlgError::TrivialInvolution);
    }
    if space.dim() != 4 {
        return Err(CompAlgError::Dimension(space.dim()));
    }
    if f.is_norm(&space.gram().det(f)) == Ternary::No {
        return Err(CompAlgError::NotSplit);
    }
    let c = space.orthogonal_basis().values.clone();
    if !f.is_one(&c[0]) {
        return Err(CompAlgError::Normalization("h(v1, v1) must be 1"));
    }
    if c[3] != f.mul(&c[1], &c[2]) {
        return Err(CompAlgError::Normalization("h(v4, v4) must equal h(v2, v2) h(v3, v3)"));
    }
    Ok(c)
}

/// `V = H ⊕ Hq` with `H = Σ vₖR` and `C` the `q²`-double of `H`.
pub fn octonion_from_hermitian<F: Field>(space: &HermitianSpace<F>, q: &F::Elem) -> Result<OctonionModel<F>, CompAlgError> {
    let f = space.field();
    if f.characteristic() == 2 {
        return Err(CompAlgError::Characteristic("needs characteristic other than 2"));
    }
    let c = check_normalized(space)?;
    if f.is_zero(q) || f.conj(q) != f.neg(q) {
        return Err(CompAlgError::Scalar("q must be nonzero with sigma(q) = -q"));
    }
    let h = CompositionAlgebra::new(f.clone(), Base::Field)
        .double(f.neg(&c[1]))?
        .double(f.neg(&c[2]))?;
    let algebra = h.double(f.mul(q, q))?;
    let v = &space.orthogonal_basis().vectors;
    let mut basis: Vec<Vec<F::Elem>> = v.clone();
    basis.extend(v.iter().map(|x| vec_scale(f, x, q)));
    let subfield = vec![basis[0].clone(), basis[4].clone()];
    let perp = [1, 2, 3, 5, 6, 7].iter().map(|&i| basis[i].clone()).collect();
    Ok(OctonionModel {
        algebra,
        basis,
        subfield,
        perp,
        planes: None,
    })
}

/// `V = C₁ ⊥ C₂ ⊥ C₃ ⊥ C₄` with `C` the `c₃`-double of the `c₂`-double of
/// `R[X]/(X² − X + r)`, `r = σ(u)u + c₂`.
pub fn octonion_char2<F: Field>(space: &HermitianSpace<F>, u: &F::Elem) -> Result<OctonionModel<F>, CompAlgError> {
    let f = space.field();
    if f.characteristic() != 2 {
        return Err(CompAlgError::Characteristic("needs characteristic 2"));
    }
    let c = check_normalized(space)?;
    if !f.is_one(&f.trace(u)) {
        return Err(CompAlgError::Scalar("u + sigma(u) must be 1"));
    }
    let r = f.add(&f.norm(u), &c[1]);
    let algebra = CompositionAlgebra::new(f.clone(), Base::ArtinSchreier(r))
        .double(c[1].clone())?
        .double(c[2].clone())?;
    let v = &space.orthogonal_basis().vectors;
    let lin = |a: &F::Elem, x: &[F::Elem], b: &F::Elem, y: &[F::Elem]| vec_add(f, &vec_scale(f, x, a), &vec_scale(f, y, b));
    let one = f.one();
    let planes = vec![
        vec![v[0].clone(), lin(u, &v[0], &one, &v[1])],
        vec![v[1].clone(), lin(&c[1], &v[0], u, &v[1])],
        vec![v[2].clone(), lin(u, &v[2], &one, &v[3])],
        vec![v[3].clone(), lin(&c[1], &v[2], u, &v[3])],
    ];
    let basis: Vec<Vec<F::Elem>> = planes.iter().flatten().cloned().collect();
    let subfield = vec![v[0].clone(), vec_scale(f, &v[0], u)];
    let mut perp: Vec<Vec<F::Elem>> = v[1..].to_vec();
    perp.extend(v[1..].iter().map(|x| vec_scale(f, x, u)));
    Ok(OctonionModel {
        algebra,
        basis,
        subfield,
        perp,
        planes: Some(planes),
    })
}

/// Outcome of a similarity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Similarity<E> {
    /// `s·f₁ ≅ f₂`.
    Similar(E),
    NotSimilar,
    Unknown,
}

/// Finds `s` with `s·f₁ ≅ f₂` for diagonal symmetric bilinear forms.
///
/// Finite fields of odd characteristic: dimension and discriminant decide.
/// Finite fields of characteristic two: every nondegenerate diagonal form is
/// isometric to the identity form. `ℚ`: Hasse–Minkowski over candidate
/// scalars built from the primes of the coefficients.
pub fn similar_forms<F: Field>(f: &F, f1: &[F::Elem], f2: &[F::Elem]) -> Similarity<F::Elem> {
    if f1.len() != f2.len() || f1.iter().chain(f2).any(|x| f.is_zero(x)) {
        return Similarity::NotSimilar;
    }
    if f1 == f2 {
        return Similarity::Similar(f.one());
    }
    let n = f1.len();
    if f.order().is_some() {
        if f.characteristic() == 2 {
            return Similarity::Similar(f.one());
        }
        let disc = |d: &[F::Elem]| d.iter().fold(f.one(), |a, x| f.mul(&a, x));
        let Some(ns) = f.elements().and_then(|els| els.into_iter().find(|x| !f.is_zero(x) && !f.is_square(x))) else {
            return Similarity::Unknown;
        };
        for s in [f.one(), ns] {
            let scaled = f.mul(&f.pow(&s, n as u64), &disc(f1));
            if f.is_square(&f.div(&scaled, &disc(f2))) {
                return Similarity::Similar(s);
            }
        }
        return Similarity::NotSimilar;
    }
    let to_int = |d: &[F::Elem]| -> Option<Vec<BigInt>> {
        d.iter()
            .map(|x| f.to_rational(x).and_then(|r| arith::squarefree_part(&arith::integral_square_class(&r))))
            .collect()
    };
    let (Some(a), Some(b)) = (to_int(f1), to_int(f2)) else {
        return Similarity::Unknown;
    };
    let mut primes: Vec<u128> = vec![2, 3, 5, 7, 11, 13];
    for x in a.iter().chain(&b) {
        let Some(fs) = arith::factor(x) else {
            return Similarity::Unknown;
        };
        for (p, _) in fs {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    if primes.len() > 14 {
        return Similarity::Unknown;
    }
    let mut gens: Vec<BigInt> = vec![BigInt::from(-1)];
    gens.extend(primes.iter().map(|&p| BigInt::from(p)));
    let forced = n % 2 == 1;
    for mask in 0u32..(1 << gens.len()) {
        let s: BigInt = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(BigInt::one(), |acc, (_, g)| acc * g);
        let scaled: Vec<BigInt> = a.iter().map(|x| x * &s).collect();
        if forced && !is_square_class_equal(&disc_int(&scaled), &disc_int(&b)) {
            continue;
        }
        if rational_isometric(&scaled, &b, &primes) {
            return Similarity::Similar(f.from_int(s.try_into().unwrap_or(1)));
        }
    }
    if forced {
        Similarity::NotSimilar
    } else {
        Similarity::Unknown
    }
}

fn disc_int(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::one(), |acc, x| acc * x)
}

fn is_square_class_equal(a: &BigInt, b: &BigInt) -> bool {
    arith::is_square_int(&(a * b)) && (a.is_negative() == b.is_negative())
}

fn hasse(a: &[BigInt], place: Place) -> i32 {
    let mut s = 1;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            s *= arith::hilbert(&a[i], &a[j], place);
        }
    }
    s
}

/// Hasse–Minkowski for integral diagonal forms whose coefficients only
/// involve primes from `primes`.
fn rational_isometric(a: &[BigInt], b: &[BigInt], primes: &[u128]) -> bool {
    let neg = |v: &[BigInt]| v.iter().filter(|x| x.is_negative()).count();
    if a.len() != b.len() || neg(a) != neg(b) || !is_square_class_equal(&disc_int(a), &disc_int(b)) {
        return false;
    }
    let mut places = vec![Place::Infinite];
    places.extend(primes.iter().map(|&p| Place::Prime(p)));
    for x in a.iter().chain(b) {
        if let Some(fs) = arith::factor(x) {
            for (p, _) in fs {
                if !places.contains(&Place::Prime(p)) {
                    places.push(Place::Prime(p));
                }
            }
        }
    }
    places.iter().all(|&pl| hasse(a, pl) == hasse(b, pl)) && !a.iter().any(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{klein_quadratic, TopForm};
    use crate::kmodule::KModule;
    use crate::scalars::{rat, FiniteField, Involution, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_vec<F: Field>(f: &F, rng: &mut ChaCha8Rng, n: usize) -> Vec<F::Elem> {
        (0..n).map(|_| f.random(rng)).collect()
    }

    fn fixed_random(f: &FiniteField, rng: &mut ChaCha8Rng, n: usize) -> Vec<crate::scalars::Gf> {
        let fixed: Vec<_> = f.elements().unwrap().into_iter().filter(|x| f.is_fixed(x)).collect();
        (0..n).map(|_| fixed[rand::Rng::gen_range(rng, 0..fixed.len())]).collect()
    }

    #[test]
    fn binary_norms() {
        let q = Rationals;
        let a = CompositionAlgebra::new(q.clone(), Base::Field).double(rat(5, 1)).unwrap();
        assert_eq!(a.norm(&[rat(3, 1), rat(2, 1)]), rat(9 - 20, 1));
        let f = FiniteField::prime(2).unwrap();
        let b = CompositionAlgebra::new(f.clone(), Base::ArtinSchreier(f.one()));
        for x0 in 0..2 {
            for x1 in 0..2 {
                let x = [f.from_int(x0), f.from_int(x1)];
                let want = f.from_int(x0 * x0 + x0 * x1 + x1 * x1);
                assert_eq!(b.norm(&x), want);
                assert_eq!(b.norm_by_product(&x), vec![want, f.zero()]);
            }
        }
    }

    #[test]
    fn quaternions_over_f5_are_multiplicative() {
        let f = FiniteField::prime(5).unwrap();
        let h = CompositionAlgebra::new(f.clone(), Base::Field)
            .double(f.from_int(2))
            .unwrap()
            .double(f.from_int(3))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (x, y) = (random_vec(&f, &mut rng, 4), random_vec(&f, &mut rng, 4));
            assert_eq!(h.norm(&h.mul(&x, &y)), f.mul(&h.norm(&x), &h.norm(&y)));
            assert_eq!(h.norm_by_product(&x)[0], h.norm(&x));
        }
    }

    #[test]
    fn overflow_and_zero_scalar() {
        let q = Rationals;
        let mut a = CompositionAlgebra::new(q.clone(), Base::Quadratic(rat(-1, 1)));
        assert_eq!(a.double(rat(0, 1)).unwrap_err(), CompAlgError::ZeroScalar);
        for _ in 0..2 {
            a = a.double(rat(-1, 1)).unwrap();
        }
        assert_eq!(a.dim(), 8);
        assert_eq!(a.double(rat(-1, 1)).unwrap_err(), CompAlgError::DimensionOverflow);
    }

    #[test]
    fn polar_form_degenerates_only_for_the_trivial_base_in_char_two() {
        for p in [2u64, 3] {
            let f = FiniteField::prime(p).unwrap();
            let one = f.one();
            for base in [Base::Field, Base::Quadratic(one), Base::ArtinSchreier(f.from_int(2))] {
                let a = CompositionAlgebra::new(f.clone(), base.clone()).double(one).unwrap().double(one).unwrap();
                let degenerate = f.is_zero(&a.polar_gram().det(&f));
                let expect = p == 2 && !matches!(base, Base::ArtinSchreier(_));
                assert_eq!(degenerate, expect, "p={p} {:?}", base);
            }
        }
    }

    #[test]
    fn f9_octonion_matches_reduced_form() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let s = HermitianSpace::standard(f.clone(), 4);
        let q = f.theta().unwrap();
        let m = octonion_from_hermitian(&s, &q).unwrap();
        assert!(m.matches_norm(&s));
        let km = KModule::split(s.clone(), TopForm::standard(&f), 2).unwrap();
        let go = km.g_o_gram().unwrap();
        let fn_perp = s.gram_of(&m.perp).map(|x| f.add(x, &f.conj(x)));
        assert_eq!(go, fn_perp);
        let c = f.one();
        let want: Vec<_> = (0..6)
            .map(|i| if i < 3 { f.mul(&f.from_int(2), &c) } else { f.neg(&f.mul(&f.from_int(2), &f.mul(&q, &q))) })
            .collect();
        assert_eq!(go, Matrix::diagonal(&f, &want));
        for (i, e) in m.basis.iter().enumerate().take(4) {
            assert_eq!(s.evaluate_h(e, e), m.algebra.norm(&m.algebra.unit(i)));
        }
    }

    #[test]
    fn octonion_norm_is_multiplicative() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let s = HermitianSpace::standard(f.clone(), 4);
        let m = octonion_from_hermitian(&s, &f.theta().unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let (x, y) = (fixed_random(&f, &mut rng, 8), fixed_random(&f, &mut rng, 8));
            let a = &m.algebra;
            assert_eq!(a.norm(&a.mul(&x, &y)), f.mul(&a.norm(&x), &a.norm(&y)));
            let v = m.vector(&x);
            assert_eq!(s.evaluate_h(&v, &v), a.norm(&x));
        }
    }

    #[test]
    fn normalization_errors() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let s = HermitianSpace::diagonal(f.clone(), &[f.from_int(-1), f.one(), f.one(), f.one()]).unwrap();
        assert!(matches!(octonion_from_hermitian(&s, &f.theta().unwrap()), Err(CompAlgError::Normalization(_))));
        let s = HermitianSpace::standard(f.clone(), 4);
        assert!(matches!(octonion_from_hermitian(&s, &f.one()), Err(CompAlgError::Scalar(_))));
        let g = FiniteField::prime(5).unwrap();
        let s = HermitianSpace::standard(g.clone(), 4);
        assert_eq!(octonion_from_hermitian(&s, &g.one()).unwrap_err(), CompAlgError::TrivialInvolution);
    }

    #[test]
    fn characteristic_two_model_over_f4() {
        let f = FiniteField::new(4, Involution::Galois).unwrap();
        let s = HermitianSpace::standard(f.clone(), 4);
        let u = f.trace_one().unwrap();
        let m = octonion_char2(&s, &u).unwrap();
        assert!(m.matches_norm(&s));
        let planes = m.planes.as_ref().unwrap();
        let polar = |x: &[_], y: &[_]| {
            let h = s.evaluate_h(x, y);
            f.add(&h, &f.conj(&h))
        };
        for (i, a) in planes.iter().enumerate() {
            for b in planes.iter().skip(i + 1) {
                for x in a {
                    for y in b {
                        assert!(f.is_zero(&polar(x, y)));
                    }
                }
            }
        }
        // c₂ = 1 = σ(u)u, so r = 0 and C₁ contains an isotropic vector.
        assert!(f.is_zero(&s.evaluate_h(&planes[0][1], &planes[0][1])));
        let v = |i: usize| s.orthogonal_basis().vectors[i].clone();
        assert_eq!(planes[1][1], vec_add(&f, &v(0), &vec_scale(&f, &v(1), &u)));
    }

    #[test]
    fn klein_form_on_wz_matches_the_norm_on_f_perp() {
        let f = FiniteField::new(4, Involution::Galois).unwrap();
        let s = HermitianSpace::standard(f.clone(), 4);
        let u = f.trace_one().unwrap();
        let m = octonion_char2(&s, &u).unwrap();
        let km = KModule::split(s.clone(), TopForm::standard(&f), 2).unwrap();
        let top = km.hodge().top().clone();
        let wz = km.wz_basis().unwrap();
        let pq = |x: &crate::exterior::ExtVector<_>| klein_quadratic(&f, &top, x).unwrap();
        let c = s.orthogonal_basis().values.clone();
        let nu = f.norm(&u);
        let want = [c[1], c[2], f.mul(&c[1], &c[2])];
        for k in 0..3 {
            assert_eq!(pq(&wz[k]), want[k]);
            assert_eq!(pq(&wz[k + 3]), f.mul(&nu, &want[k]));
        }
        let nval = |v: &[_]| s.evaluate_h(v, v);
        for i in 0..6 {
            assert_eq!(pq(&wz[i]), nval(&m.perp[i]));
            for j in i + 1..6 {
                let fp = f.sub(&f.sub(&pq(&wz[i].add(&f, &wz[j])), &pq(&wz[i])), &pq(&wz[j]));
                let fnn = f.sub(&f.sub(&nval(&vec_add(&f, &m.perp[i], &m.perp[j])), &nval(&m.perp[i])), &nval(&m.perp[j]));
                assert_eq!(fp, fnn, "pair {i} {j}");
                assert_eq!(*km.g_o_gram().unwrap().get(i, j), fp);
            }
        }
    }

    #[test]
    fn quaternion_case_similarity_over_f5() {
        let f = FiniteField::prime(5).unwrap();
        let c = [2i64, 3, 6];
        let s = HermitianSpace::diagonal(f.clone(), &[1, c[0], c[1], c[2]].map(|x| f.from_int(x))).unwrap();
        let km = KModule::split(s, TopForm::standard(&f), 2).unwrap();
        let go = km.g_o_gram().unwrap();
        let h = CompositionAlgebra::new(f.clone(), Base::Field)
            .double(f.from_int(-c[0]))
            .unwrap()
            .double(f.from_int(-c[1]))
            .unwrap();
        let pure: Vec<_> = (1..4).map(|i| h.polar(&h.unit(i), &h.unit(i))).collect();
        let d1: Vec<_> = (0..3).map(|i| *go.get(i, i)).collect();
        assert!(matches!(similar_forms(&f, &d1, &pure), Similarity::Similar(_)));
        assert_eq!(similar_forms(&f, &d1, &d1), Similarity::Similar(f.one()));
    }

    #[test]
    fn similarity_over_finite_fields_and_rationals() {
        let f = FiniteField::prime(3).unwrap();
        let one = f.one();
        let m1 = f.from_int(-1);
        // dim 2: <1,1> has disc 1, <1,-1> has disc -1; no scalar changes a square class in even dimension.
        assert_eq!(similar_forms(&f, &[one, one], &[one, m1]), Similarity::NotSimilar);
        assert_eq!(similar_forms(&f, &[one, one, one], &[m1, m1, m1]), Similarity::Similar(m1));
        let q = Rationals;
        let r = |v: &[i64]| v.iter().map(|&x| rat(x, 1)).collect::<Vec<_>>();
        assert_eq!(similar_forms(&q, &r(&[1, 1, 1]), &r(&[-1, -1, -1])), Similarity::Similar(rat(-1, 1)));
        assert_eq!(similar_forms(&q, &r(&[1, 1, 1]), &r(&[1, 1, -1])), Similarity::NotSimilar);
        assert_eq!(similar_forms(&q, &r(&[1, 1]), &r(&[2, 2])), Similarity::Similar(rat(1, 1)));
        assert!(matches!(similar_forms(&q, &r(&[1, 1]), &r(&[3, 3])), Similarity::Similar(_)));
    }

    proptest! {
        #[test]
        fn octonions_by_doubling_are_composition_algebras(
            d in prop_oneof![-5i64..-1, 2i64..5],
            c1 in prop_oneof![-5i64..-1, 1i64..5],
            c2 in prop_oneof![-5i64..-1, 1i64..5],
            x in prop::collection::vec(-3i64..4, 8),
            y in prop::collection::vec(-3i64..4, 8),
        ) {
            let q = Rationals;
            let a = CompositionAlgebra::new(q.clone(), Base::Quadratic(rat(d, 1)))
                .double(rat(c1, 1)).unwrap()
                .double(rat(c2, 1)).unwrap();
            let x: Vec<_> = x.iter().map(|&v| rat(v, 1)).collect();
            let y: Vec<_> = y.iter().map(|&v| rat(v, 1)).collect();
            prop_assert_eq!(a.norm(&a.mul(&x, &y)), a.norm(&x) * a.norm(&y));
            let nx = a.norm_by_product(&x);
            prop_assert_eq!(&nx[0], &a.norm(&x));
            prop_assert!(nx[1..].iter().all(|v| v.is_zero()));
            prop_assert_eq!(a.conj(&a.conj(&x)), x.clone());
            prop_assert_eq!(a.conj(&a.mul(&x, &y)), a.mul(&a.conj(&y), &a.conj(&x)));
        }
    }
}
