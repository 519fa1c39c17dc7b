//! The Hodge operator `J: Λ^ℓ V → Λ^{n−ℓ} V` and the algebra `K = F ⊕ jF`.
//!
//! `J` is the σ-semilinear map with `Pf(J(x), y) = Λ^ℓh(x, y)`. It is stored
//! as a matrix `M` acting by `x ↦ M·σ(x)` on basis coordinates.

use std::fmt;

use thiserror::Error;

use crate::exterior::{
    compound, ext_gram, ext_h_with, ext_power_map, pfaffian, pfaffian_matrix, wedge_sign, ExtBasis, ExtVector,
    ExteriorError, TopForm,
};
use crate::forms::{FormError, HermitianSpace};
use crate::linalg::{Companion, Matrix, SemiMap};
use crate::scalars::{Field, Ternary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HodgeError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("degree {0} out of range for dimension {1}")]
    DegreeOutOfRange(usize, usize),
    #[error("independent constructions disagree: {0}")]
    PathMismatch(&'static str),
    #[error("conjugate of J is not a multiple of J")]
    NotNormalizing,
    #[error("the algebra is not split")]
    NotSplit,
    #[error("no element s with N(s) = delta was found")]
    NoNormPreimage,
    #[error("elements belong to different algebras")]
    MixedAlgebras,
}

fn sign_power<F: Field>(f: &F, exponent: usize) -> F::Elem {
    if exponent % 2 == 0 {
        f.one()
    } else {
        f.neg(&f.one())
    }
}

/// `δ_ℓ = (−1)^{(n−ℓ)ℓ}·det H / N(b₀)`.
pub fn delta<F: Field>(space: &HermitianSpace<F>, top: &TopForm<F::Elem>, degree: usize) -> F::Elem {
    let f = space.field();
    let n = space.dim();
    let d = f.div(&space.gram().det(f), &f.norm(&top.b0));
    f.mul(&sign_power(f, (n - degree) * degree), &d)
}

/// `M = P^{−T} Gᵀ`, solving `Pf(J(x), −) = Λ^ℓh(x, −)`.
fn matrix_from_pairing<F: Field>(space: &HermitianSpace<F>, top: &TopForm<F::Elem>, degree: usize) -> Matrix<F::Elem> {
    let f = space.field();
    let p = pfaffian_matrix(f, top, space.dim(), degree);
    let g = ext_gram(space, degree);
    p.transpose()
        .inverse(f)
        .expect("Pfaffian pairing is perfect")
        .mul(f, &g.transpose())
}

/// Closed formula on the orthogonal basis, transported to the standard basis.
fn matrix_from_orthogonal_basis<F: Field>(
    space: &HermitianSpace<F>,
    top: &TopForm<F::Elem>,
    degree: usize,
) -> Matrix<F::Elem> {
    let f = space.field();
    let n = space.dim();
    let ob = space.orthogonal_basis();
    let bm = ob.matrix();
    let bv = top.value_on(f, &bm);
    let (src, dst) = (ExtBasis::new(n, degree), ExtBasis::new(n, n - degree));
    let mut mv = Matrix::zeros(f, dst.len(), src.len());
    for (col, &s) in src.masks().iter().enumerate() {
        let sc = src.complement(s);
        let prod = (0..n)
            .filter(|i| s & (1 << i) != 0)
            .fold(f.one(), |acc, i| f.mul(&acc, &ob.values[i]));
        let denom = if wedge_sign(sc, s) == 1 { bv.clone() } else { f.neg(&bv) };
        mv.set(dst.index_of(sc).expect("complement mask"), col, f.div(&prod, &denom));
    }
    let c_src_inv = compound(f, &bm, degree).inverse(f).expect("basis is invertible");
    compound(f, &bm, n - degree).mul(f, &mv).mul(f, &c_src_inv.conj(f))
}

/// The Hodge operator for a fixed degree and top form.
#[derive(Clone, Debug)]
pub struct HodgeOperator<F: Field> {
    space: HermitianSpace<F>,
    top: TopForm<F::Elem>,
    degree: usize,
    matrix: Matrix<F::Elem>,
    gram: Matrix<F::Elem>,
    delta: F::Elem,
}

impl<F: Field> HodgeOperator<F> {
    /// Builds `J` two ways and checks that they agree and that
    /// `J_{n−ℓ} ∘ J_ℓ = δ·id`.
    pub fn new(space: HermitianSpace<F>, top: TopForm<F::Elem>, degree: usize) -> Result<Self, HodgeError> {
        let n = space.dim();
        if degree > n {
            return Err(HodgeError::DegreeOutOfRange(degree, n));
        }
        let f = space.field().clone();
        let matrix = matrix_from_pairing(&space, &top, degree);
        if matrix != matrix_from_orthogonal_basis(&space, &top, degree) {
            return Err(HodgeError::PathMismatch("pairing solve and orthogonal-basis formula"));
        }
        let delta = delta(&space, &top, degree);
        let partner = matrix_from_pairing(&space, &top, n - degree);
        let square = partner.mul(&f, &matrix.conj(&f));
        if square != Matrix::identity(&f, square.rows()).scale(&f, &delta) {
            return Err(HodgeError::PathMismatch("square of J against delta"));
        }
        let gram = ext_gram(&space, degree);
        Ok(Self {
            space,
            top,
            degree,
            matrix,
            gram,
            delta,
        })
    }

    pub fn space(&self) -> &HermitianSpace<F> {
        &self.space
    }

    pub fn field(&self) -> &F {
        self.space.field()
    }

    pub fn top(&self) -> &TopForm<F::Elem> {
        &self.top
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &Matrix<F::Elem> {
        &self.matrix
    }

    /// Gram matrix of `Λ^ℓ h`.
    pub fn ext_gram(&self) -> &Matrix<F::Elem> {
        &self.gram
    }

    pub fn delta(&self) -> &F::Elem {
        &self.delta
    }

    /// `J` as a σ-semilinear map.
    pub fn semimap(&self) -> SemiMap<F::Elem> {
        SemiMap::new(self.matrix.clone(), Companion::Sigma)
    }

    pub fn apply(&self, x: &ExtVector<F::Elem>) -> ExtVector<F::Elem> {
        assert_eq!(x.degree, self.degree, "degree mismatch");
        let coeffs = self.semimap().apply(self.field(), &x.coeffs);
        ExtVector::from_coeffs(self.dim(), self.dim() - self.degree, coeffs)
    }

    /// `J_{n−ℓ}`, built from the same data.
    pub fn partner(&self) -> Self {
        Self::new(self.space.clone(), self.top.clone(), self.dim() - self.degree).expect("partner degree is valid")
    }

    pub fn ext_h(&self, x: &ExtVector<F::Elem>, y: &ExtVector<F::Elem>) -> F::Elem {
        ext_h_with(self.field(), &self.gram, x, y)
    }

    pub fn pf(&self, x: &ExtVector<F::Elem>, y: &ExtVector<F::Elem>) -> F::Elem {
        pfaffian(self.field(), &self.top, x, y).expect("complementary degrees")
    }

    /// The six pairing identities as `(lhs, rhs)` pairs. `x`, `y` have degree
    /// `ℓ`; `z` has degree `n−ℓ` and takes the place of `y` where the pairing
    /// needs the complementary degree.
    pub fn identity_pairs(
        &self,
        partner: &Self,
        x: &ExtVector<F::Elem>,
        y: &ExtVector<F::Elem>,
        z: &ExtVector<F::Elem>,
    ) -> [(F::Elem, F::Elem); 6] {
        let f = self.field();
        let n = self.dim();
        let l = self.degree;
        let sgn = sign_power(f, (n - l) * l);
        let d = &self.delta;
        let hxy = self.ext_h(x, y);
        let (jx, jy, jz) = (self.apply(x), self.apply(y), partner.apply(z));
        [
            (self.pf(&jx, y), hxy.clone()),
            (self.pf(x, &jy), f.mul(&sgn, &f.conj(&hxy))),
            (self.pf(&jx, &jz), f.mul(d, &f.conj(&self.pf(z, x)))),
            (partner.ext_h(&jx, z), f.mul(d, &self.pf(x, z))),
            (self.ext_h(x, &jz), f.mul(d, &f.conj(&self.pf(z, x)))),
            (partner.ext_h(&jx, &jy), f.mul(&f.mul(&sgn, d), &f.conj(&hxy))),
        ]
    }

    /// `t` with `Λ^{n−ℓ}λ ∘ J ∘ (Λ^ℓλ)^{−1} = t·J`, by matrix conjugation and
    /// by the closed formula `t = b_v·det λ′ / (r^ℓ·φ(b_v))`.
    pub fn conjugate_scalar(&self, m: &SemiMap<F::Elem>) -> Result<F::Elem, HodgeError> {
        let f = self.field();
        let n = self.dim();
        let m = m.normalized(f);
        let class = self.space.classify_map(&m)?;
        let lo = ext_power_map(f, &m, self.degree);
        let hi = ext_power_map(f, &m, n - self.degree);
        let lo_inv = lo.inverse(f).ok_or(FormError::NotSimilitude("singular matrix".into()))?;
        let conj = hi.compose(f, &self.semimap()).compose(f, &lo_inv);
        let (i, j) = (0..self.matrix.rows())
            .flat_map(|i| (0..self.matrix.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| !f.is_zero(self.matrix.get(i, j)))
            .expect("J is invertible");
        let t = f.div(conj.matrix.get(i, j), self.matrix.get(i, j));
        if conj.matrix != self.matrix.scale(f, &t) {
            return Err(HodgeError::NotNormalizing);
        }
        let bm = self.space.orthogonal_basis().matrix();
        let bv = self.top.value_on(f, &bm);
        let phi = |x: &F::Elem| m.companion.apply(f, x);
        let phi_b = match m.companion {
            Companion::Identity => bm.clone(),
            Companion::Sigma => bm.conj(f),
        };
        let lambda_prime = m.matrix.mul(f, &phi_b).mul(f, &bm.inverse(f).expect("basis"));
        let closed = f.div(
            &f.mul(&bv, &lambda_prime.det(f)),
            &f.mul(&f.pow(&class.multiplier, self.degree as u64), &phi(&bv)),
        );
        if closed != t {
            return Err(HodgeError::PathMismatch("conjugation scalar"));
        }
        Ok(t)
    }

    pub fn algebra(&self) -> KAlgebra<F> {
        KAlgebra::new(self.field().clone(), self.delta.clone(), self.degree)
    }
}

/// `b₀′ = s·b₀` with `N(s) = δ`, so that the new `δ` is `1`.
pub fn normalize_split<F: Field>(
    space: &HermitianSpace<F>,
    top: &TopForm<F::Elem>,
    degree: usize,
) -> Result<TopForm<F::Elem>, HodgeError> {
    let f = space.field();
    let d = delta(space, top, degree);
    if f.is_norm(&d) == Ternary::No {
        return Err(HodgeError::NotSplit);
    }
    let s = if f.has_sigma() { f.norm_preimage(&d) } else { f.sqrt(&d) }.ok_or(HodgeError::NoNormPreimage)?;
    let out = top.rescale(f, &s);
    debug_assert!(f.is_one(&delta(space, &out, degree)));
    Ok(out)
}

/// Element `x₀ + j·x₁` of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElem<E> {
    pub x0: E,
    pub x1: E,
}

impl<E> KElem<E> {
    pub fn new(x0: E, x1: E) -> Self {
        Self { x0, x1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    SplitQuaternion,
    SplitProduct,
    DualNumbers,
    QuadraticExtension,
    InseparableExtension,
    QuaternionDivision,
    Undetermined,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraKind::SplitQuaternion => "split quaternion algebra over R",
            AlgebraKind::SplitProduct => "F x F",
            AlgebraKind::DualNumbers => "F[X]/(X^2)",
            AlgebraKind::QuadraticExtension => "quadratic extension",
            AlgebraKind::InseparableExtension => "quadratic extension (inseparable)",
            AlgebraKind::QuaternionDivision => "quaternion division algebra",
            AlgebraKind::Undetermined => "undetermined",
        })
    }
}

/// `K = F ⊕ jF` with `j² = δ` and `j·x = σ(x)·j`.
#[derive(Clone, Debug, PartialEq)]
pub struct KAlgebra<F: Field> {
    field: F,
    delta: F::Elem,
    degree: usize,
}

impl<F: Field> KAlgebra<F> {
    pub fn new(field: F, delta: F::Elem, degree: usize) -> Self {
        assert!(!field.is_zero(&delta), "delta must be nonzero");
        Self { field, delta, degree }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn delta(&self) -> &F::Elem {
        &self.delta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero(&self) -> KElem<F::Elem> {
        KElem::new(self.field.zero(), self.field.zero())
    }

    pub fn one(&self) -> KElem<F::Elem> {
        KElem::new(self.field.one(), self.field.zero())
    }

    pub fn j(&self) -> KElem<F::Elem> {
        KElem::new(self.field.zero(), self.field.one())
    }

    pub fn scalar(&self, s: F::Elem) -> KElem<F::Elem> {
        KElem::new(s, self.field.zero())
    }

    pub fn add(&self, a: &KElem<F::Elem>, b: &KElem<F::Elem>) -> KElem<F::Elem> {
        let f = &self.field;
        KElem::new(f.add(&a.x0, &b.x0), f.add(&a.x1, &b.x1))
    }

    pub fn sub(&self, a: &KElem<F::Elem>, b: &KElem<F::Elem>) -> KElem<F::Elem> {
        let f = &self.field;
        KElem::new(f.sub(&a.x0, &b.x0), f.sub(&a.x1, &b.x1))
    }

    pub fn neg(&self, a: &KElem<F::Elem>) -> KElem<F::Elem> {
        let f = &self.field;
        KElem::new(f.neg(&a.x0), f.neg(&a.x1))
    }

    /// `(x₀ + jx₁)(y₀ + jy₁) = (x₀y₀ + δσ(x₁)y₁) + j(σ(x₀)y₁ + x₁y₀)`.
    pub fn mul(&self, a: &KElem<F::Elem>, b: &KElem<F::Elem>) -> KElem<F::Elem> {
        let f = &self.field;
        let x0 = f.add(&f.mul(&a.x0, &b.x0), &f.mul(&self.delta, &f.mul(&f.conj(&a.x1), &b.x1)));
        let x1 = f.add(&f.mul(&f.conj(&a.x0), &b.x1), &f.mul(&a.x1, &b.x0));
        KElem::new(x0, x1)
    }

    /// Right multiplication by a scalar of `F`.
    pub fn mul_scalar(&self, a: &KElem<F::Elem>, s: &F::Elem) -> KElem<F::Elem> {
        let f = &self.field;
        KElem::new(f.mul(&a.x0, s), f.mul(&a.x1, s))
    }

    /// `κ(x₀ + jx₁) = σ(x₀) − jx₁`.
    pub fn kappa(&self, a: &KElem<F::Elem>) -> KElem<F::Elem> {
        KElem::new(self.field.conj(&a.x0), self.field.neg(&a.x1))
    }

    /// `α(x₀ + jx₁) = σ(x₀) + (−1)^ℓ jx₁`.
    pub fn alpha(&self, a: &KElem<F::Elem>) -> KElem<F::Elem> {
        let f = &self.field;
        let x1 = if self.degree % 2 == 0 { a.x1.clone() } else { f.neg(&a.x1) };
        KElem::new(f.conj(&a.x0), x1)
    }

    /// `det(x) = N(x₀) − δN(x₁)`.
    pub fn det(&self, a: &KElem<F::Elem>) -> F::Elem {
        let f = &self.field;
        f.sub(&f.norm(&a.x0), &f.mul(&self.delta, &f.norm(&a.x1)))
    }

    /// Polarization of `det`.
    pub fn polar_det(&self, a: &KElem<F::Elem>, b: &KElem<F::Elem>) -> F::Elem {
        let f = &self.field;
        let s = self.add(a, b);
        f.sub(&f.sub(&self.det(&s), &self.det(a)), &self.det(b))
    }

    pub fn inv(&self, a: &KElem<F::Elem>) -> Option<KElem<F::Elem>> {
        let d = self.field.inv(&self.det(a))?;
        Some(self.mul_scalar(&self.kappa(a), &d))
    }

    pub fn is_zero(&self, a: &KElem<F::Elem>) -> bool {
        self.field.is_zero(&a.x0) && self.field.is_zero(&a.x1)
    }

    /// The matrix `[[x₀, δσ(x₁)], [x₁, σ(x₀)]]`.
    pub fn matrix_model(&self, a: &KElem<F::Elem>) -> Matrix<F::Elem> {
        let f = &self.field;
        Matrix::from_rows(vec![
            vec![a.x0.clone(), f.mul(&self.delta, &f.conj(&a.x1))],
            vec![a.x1.clone(), f.conj(&a.x0)],
        ])
    }

    /// Coordinates over `R` in the basis `1, θ, j, jθ` (or `1, j` when `σ = id`).
    pub fn fixed_coords(&self, a: &KElem<F::Elem>) -> Vec<F::Elem> {
        let f = &self.field;
        let mut v = f.fixed_coords(&a.x0);
        v.extend(f.fixed_coords(&a.x1));
        v
    }

    pub fn from_fixed_coords(&self, c: &[F::Elem]) -> KElem<F::Elem> {
        let k = self.field.fixed_degree();
        KElem::new(self.field.from_fixed_coords(&c[..k]), self.field.from_fixed_coords(&c[k..]))
    }

    /// `[K : R]`.
    pub fn dim_over_fixed(&self) -> usize {
        2 * self.field.fixed_degree()
    }

    pub fn is_split(&self) -> Ternary {
        self.field.is_norm(&self.delta)
    }

    pub fn kind(&self) -> AlgebraKind {
        let f = &self.field;
        match (self.is_split(), f.has_sigma(), f.characteristic() == 2) {
            (Ternary::Unknown, _, _) => AlgebraKind::Undetermined,
            (Ternary::Yes, true, _) => AlgebraKind::SplitQuaternion,
            (Ternary::Yes, false, false) => AlgebraKind::SplitProduct,
            (Ternary::Yes, false, true) => AlgebraKind::DualNumbers,
            (Ternary::No, true, _) => AlgebraKind::QuaternionDivision,
            (Ternary::No, false, false) => AlgebraKind::QuadraticExtension,
            (Ternary::No, false, true) => AlgebraKind::InseparableExtension,
        }
    }

    /// `s` with `N(s) = δ`, when `K` is split.
    fn split_scalar(&self) -> Option<F::Elem> {
        let f = &self.field;
        if self.is_split() != Ternary::Yes {
            return None;
        }
        if f.is_one(&self.delta) {
            return Some(f.one());
        }
        if f.has_sigma() {
            f.norm_preimage(&self.delta)
        } else {
            f.sqrt(&self.delta)
        }
    }

    /// Idempotents other than `0` and `1`.
    ///
    /// `σ = id`, char ≠ 2: both `½(1 ± j/s)`. `σ ≠ id`: the representative
    /// `u + j·u/s` with `u` the smallest trace-one element. With `δ = 1` these
    /// are `½(1 ± j)` and `u + ju`.
    pub fn idempotents(&self) -> Vec<KElem<F::Elem>> {
        let f = &self.field;
        let Some(s) = self.split_scalar() else {
            return Vec::new();
        };
        let si = f.inv(&s).expect("nonzero");
        if f.has_sigma() {
            let u = f.trace_one().expect("trace-one element");
            return vec![KElem::new(u.clone(), f.mul(&u, &si))];
        }
        if f.characteristic() == 2 {
            return Vec::new();
        }
        let half = f.inv(&f.from_int(2)).expect("char not 2");
        let hs = f.mul(&half, &si);
        vec![KElem::new(half.clone(), hs.clone()), KElem::new(half, f.neg(&hs))]
    }

    /// `z = 1 + j/s` with `z² = 0` in the split case with char 2 and `σ = id`.
    pub fn nilpotent(&self) -> Option<KElem<F::Elem>> {
        let f = &self.field;
        if f.characteristic() != 2 || f.has_sigma() {
            return None;
        }
        let s = self.split_scalar()?;
        Some(KElem::new(f.one(), f.inv(&s).expect("nonzero")))
    }

    /// Invertible `a` with `a⁻¹·p·a = 1 − p`.
    pub fn conjugacy_witness(&self, p: &KElem<F::Elem>) -> Option<KElem<F::Elem>> {
        let f = &self.field;
        let q = self.sub(&self.one(), p);
        let dim = self.dim_over_fixed();
        let basis: Vec<KElem<F::Elem>> = (0..dim)
            .map(|i| {
                let mut c = vec![f.zero(); dim];
                c[i] = f.one();
                self.from_fixed_coords(&c)
            })
            .collect();
        let cols: Vec<Vec<F::Elem>> = basis
            .iter()
            .map(|a| self.fixed_coords(&self.sub(&self.mul(p, a), &self.mul(a, &q))))
            .collect();
        let kernel = Matrix::from_cols(&cols).nullspace(f);
        let candidates = kernel.iter().cloned().chain(kernel.iter().enumerate().flat_map(|(i, a)| {
            kernel[i + 1..]
                .iter()
                .flat_map(move |b| (1..4).map(move |c| (a.clone(), b.clone(), c)))
        }).map(|(a, b, c)| {
            let fc = f.from_int(c);
            a.iter().zip(&b).map(|(x, y)| f.add(x, &f.mul(&fc, y))).collect()
        }));
        for c in candidates {
            let a = self.from_fixed_coords(&c);
            if !f.is_zero(&self.det(&a)) {
                return Some(a);
            }
        }
        None
    }

    pub fn format(&self, a: &KElem<F::Elem>) -> String {
        let f = &self.field;
        match (f.is_zero(&a.x0), f.is_zero(&a.x1)) {
            (_, true) => f.format(&a.x0),
            (true, false) => format!("j*({})", f.format(&a.x1)),
            (false, false) => format!("{} + j*({})", f.format(&a.x0), f.format(&a.x1)),
        }
    }
}
