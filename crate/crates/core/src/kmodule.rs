//! `W = Λ^ℓ V` for `n = 2ℓ` as a free right `K`-module, the `α`-hermitian
//! form `g`, the induced maps `η` and `η^o`, and the split-case submodules.
//!
//! Right multiplication by `j` is `J`. The `K`-basis `B₁` consists of the
//! `v_S` with `1 ∈ S`, where `v₁, …, v_n` is the orthogonal basis of the space.

use thiserror::Error;

use crate::exterior::{ext_power_map, ExtBasis, ExtVector, Mask};
use crate::forms::{FormError, HermitianSpace, MapKind};
use crate::hodge::{normalize_split, HodgeError, HodgeOperator, KAlgebra, KElem};
use crate::linalg::{vec_add, vec_scale, vec_sub, Companion, Matrix, SemiMap};
use crate::scalars::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KModuleError {
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("a K-module structure needs n = 2l, got n = {0}, l = {1}")]
    NotMiddleDegree(usize, usize),
    #[error("delta is not 1; normalize the top form first")]
    NotNormalized,
    #[error("vector does not lie in Wz")]
    OutsideWz,
    #[error("the exterior power is not K-semilinear")]
    NotKSemilinear,
    #[error("the induced map is not a semi-similitude of g")]
    NotSemiSimilitude,
    #[error("map is not in the special unitary group")]
    NotSpecial,
    #[error("Wz is not invariant")]
    WzNotInvariant,
    #[error("the form h is anisotropic or no isotropic vector was found")]
    NoIsotropicVector,
}

/// Coordinates over `B₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KModuleVector<E> {
    pub coords: Vec<KElem<E>>,
}

/// The `K`-semilinear companion `ψ(x₀ + j·x₁) = φ(x₀) + j·t·φ(x₁)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KAutomorphism<E> {
    pub companion: Companion,
    pub t: E,
}

impl<E: Clone + PartialEq> KAutomorphism<E> {
    pub fn identity<F: Field<Elem = E>>(f: &F) -> Self {
        Self {
            companion: Companion::Identity,
            t: f.one(),
        }
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, k: &KElem<E>) -> KElem<E> {
        let x0 = self.companion.apply(f, &k.x0);
        let x1 = f.mul(&self.t, &self.companion.apply(f, &k.x1));
        KElem::new(x0, x1)
    }

    /// `self ∘ other`.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self {
            companion: self.companion.compose(other.companion),
            t: f.mul(&self.t, &self.companion.apply(f, &other.t)),
        }
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        (self.companion == Companion::Identity || !f.has_sigma()) && f.is_one(&self.t)
    }
}

/// A `ψ`-semilinear map `K^m → K^m`: `k ↦ E·ψ(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSemilinearMap<E> {
    /// Row-major entries.
    pub matrix: Vec<Vec<KElem<E>>>,
    pub psi: KAutomorphism<E>,
}

impl<E: Clone + PartialEq> KSemilinearMap<E> {
    pub fn apply<F: Field<Elem = E>>(&self, k: &KAlgebra<F>, v: &[KElem<E>]) -> Vec<KElem<E>> {
        let f = k.field();
        let pv: Vec<KElem<E>> = v.iter().map(|x| self.psi.apply(f, x)).collect();
        self.matrix
            .iter()
            .map(|row| row.iter().zip(&pv).fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b))))
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose<F: Field<Elem = E>>(&self, k: &KAlgebra<F>, other: &Self) -> Self {
        let f = k.field();
        let m = self.matrix.len();
        let inner: Vec<Vec<KElem<E>>> = other
            .matrix
            .iter()
            .map(|row| row.iter().map(|x| self.psi.apply(f, x)).collect())
            .collect();
        let matrix = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| {
                        (0..m).fold(k.zero(), |acc, i| k.add(&acc, &k.mul(&self.matrix[r][i], &inner[i][c])))
                    })
                    .collect()
            })
            .collect();
        Self {
            matrix,
            psi: self.psi.compose(f, &other.psi),
        }
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, k: &KAlgebra<F>) -> bool {
        let f = k.field();
        self.psi.is_identity(f)
            && self.matrix.iter().enumerate().all(|(r, row)| {
                row.iter()
                    .enumerate()
                    .all(|(c, x)| if r == c { *x == k.one() } else { k.is_zero(x) })
            })
    }
}

/// `η(m)` together with the multiplier: `g(ηX, ηY) = multiplier·ψ(g(X, Y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaImage<E> {
    pub map: KSemilinearMap<E>,
    pub multiplier: E,
}

/// The decomposition of `W` in the split case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitModules<E> {
    /// `W = Wp ⊕ W(1−p)`; both lists are bases over the fixed field.
    Idempotent {
        p: KElem<E>,
        wp: Vec<ExtVector<E>>,
        wq: Vec<ExtVector<E>>,
    },
    /// `z` nilpotent and `ker ρ_z = Wz`.
    Nilpotent { z: KElem<E>, wz: Vec<ExtVector<E>> },
}

/// `Λ^ℓ V` with its `K`-module structure.
#[derive(Clone, Debug)]
pub struct KModule<F: Field> {
    hodge: HodgeOperator<F>,
    algebra: KAlgebra<F>,
    b1: Vec<Mask>,
    b1_vectors: Vec<ExtVector<F::Elem>>,
    expand: Matrix<F::Elem>,
    expand_inv: Matrix<F::Elem>,
}

fn sign<F: Field>(f: &F, odd: bool) -> F::Elem {
    if odd {
        f.neg(&f.one())
    } else {
        f.one()
    }
}

impl<F: Field> KModule<F> {
    pub fn new(hodge: HodgeOperator<F>) -> Result<Self, KModuleError> {
        let (n, l) = (hodge.dim(), hodge.degree());
        if n != 2 * l || l == 0 {
            return Err(KModuleError::NotMiddleDegree(n, l));
        }
        let f = hodge.field().clone();
        let ob = hodge.space().orthogonal_basis().matrix();
        let basis = ExtBasis::new(n, l);
        let b1: Vec<Mask> = basis.masks().iter().copied().filter(|m| m & 1 != 0).collect();
        let b1_vectors: Vec<ExtVector<F::Elem>> = b1
            .iter()
            .map(|&s| {
                let cols: Vec<Vec<F::Elem>> = (0..n).filter(|i| s & (1 << i) != 0).map(|i| ob.col(i)).collect();
                ExtVector::decomposable(&f, &cols)
            })
            .collect();
        let mut cols: Vec<Vec<F::Elem>> = b1_vectors.iter().map(|v| v.coeffs.clone()).collect();
        cols.extend(b1_vectors.iter().map(|v| hodge.apply(v).coeffs));
        let expand = Matrix::from_cols(&cols);
        let expand_inv = expand.inverse(&f).ok_or(KModuleError::NotKSemilinear)?;
        let algebra = hodge.algebra();
        Ok(Self {
            hodge,
            algebra,
            b1,
            b1_vectors,
            expand,
            expand_inv,
        })
    }

    /// Builds the module with `b` rescaled so that `δ = 1`.
    pub fn split(space: HermitianSpace<F>, top: crate::exterior::TopForm<F::Elem>, degree: usize) -> Result<Self, KModuleError> {
        let top = normalize_split(&space, &top, degree)?;
        Self::new(HodgeOperator::new(space, top, degree)?)
    }

    pub fn hodge(&self) -> &HodgeOperator<F> {
        &self.hodge
    }

    pub fn algebra(&self) -> &KAlgebra<F> {
        &self.algebra
    }

    pub fn field(&self) -> &F {
        self.hodge.field()
    }

    pub fn degree(&self) -> usize {
        self.hodge.degree()
    }

    /// Masks of `B₁` relative to the orthogonal basis.
    pub fn b1_masks(&self) -> &[Mask] {
        &self.b1
    }

    /// `v_S` for `S ∈ B₁`, in standard coordinates.
    pub fn b1_vectors(&self) -> &[ExtVector<F::Elem>] {
        &self.b1_vectors
    }

    pub fn rank(&self) -> usize {
        self.b1.len()
    }

    fn ext(&self, coeffs: Vec<F::Elem>) -> ExtVector<F::Elem> {
        ExtVector::from_coeffs(self.hodge.dim(), self.degree(), coeffs)
    }

    /// `X·(x₀ + j·x₁) = X·x₀ + J(X)·x₁`.
    pub fn k_action(&self, x: &ExtVector<F::Elem>, k: &KElem<F::Elem>) -> ExtVector<F::Elem> {
        let f = self.field();
        x.scale(f, &k.x0).add(f, &self.hodge.apply(x).scale(f, &k.x1))
    }

    pub fn to_k_coords(&self, x: &ExtVector<F::Elem>) -> KModuleVector<F::Elem> {
        let c = self.expand_inv.apply(self.field(), &x.coeffs);
        let m = self.rank();
        KModuleVector {
            coords: (0..m).map(|i| KElem::new(c[i].clone(), c[m + i].clone())).collect(),
        }
    }

    pub fn from_k_coords(&self, v: &KModuleVector<F::Elem>) -> ExtVector<F::Elem> {
        let mut c: Vec<F::Elem> = v.coords.iter().map(|k| k.x0.clone()).collect();
        c.extend(v.coords.iter().map(|k| k.x1.clone()));
        self.ext(self.expand.apply(self.field(), &c))
    }

    /// `g(u, v)` by `Λ^ℓh(u, v) + Λ^ℓh(u, v·j)·j⁻¹` and by
    /// `Λ^ℓh(u, v) + j·(−1)^ℓ·Pf(u, v)`.
    pub fn g_form_paths(
        &self,
        u: &ExtVector<F::Elem>,
        v: &ExtVector<F::Elem>,
    ) -> (KElem<F::Elem>, KElem<F::Elem>) {
        let f = self.field();
        let x0 = self.hodge.ext_h(u, v);
        let jinv = self.algebra.inv(&self.algebra.j()).expect("delta is nonzero");
        let via_j = self.algebra.add(
            &self.algebra.scalar(x0.clone()),
            &self.algebra.mul(&self.algebra.scalar(self.hodge.ext_h(u, &self.hodge.apply(v))), &jinv),
        );
        let pf = f.mul(&sign(f, self.degree() % 2 == 1), &self.hodge.pf(u, v));
        (via_j, KElem::new(x0, pf))
    }

    pub fn g_form(&self, u: &ExtVector<F::Elem>, v: &ExtVector<F::Elem>) -> KElem<F::Elem> {
        if cfg!(debug_assertions) {
            let (a, b) = self.g_form_paths(u, v);
            assert_eq!(a, b, "the two expressions for g disagree");
            return b;
        }
        let f = self.field();
        let pf = f.mul(&sign(f, self.degree() % 2 == 1), &self.hodge.pf(u, v));
        KElem::new(self.hodge.ext_h(u, v), pf)
    }

    /// Gram matrix of `g` on `B₁`.
    pub fn g_gram(&self) -> Vec<Vec<KElem<F::Elem>>> {
        self.b1_vectors
            .iter()
            .map(|u| self.b1_vectors.iter().map(|v| self.g_form(u, v)).collect())
            .collect()
    }

    /// `g(v, u) = α(g(u, v))` on all pairs of standard basis vectors.
    pub fn is_alpha_hermitian(&self) -> bool {
        let f = self.field();
        let basis = ExtBasis::new(self.hodge.dim(), self.degree());
        let e: Vec<ExtVector<F::Elem>> = basis.masks().iter().map(|&m| ExtVector::basis(f, self.hodge.dim(), m)).collect();
        e.iter()
            .all(|u| e.iter().all(|v| self.g_form(v, u) == self.algebra.alpha(&self.g_form(u, v))))
    }

    /// `η(m)`: `Λ^ℓm` over `B₁`, with its companion and multiplier.
    pub fn eta(&self, m: &SemiMap<F::Elem>) -> Result<EtaImage<F::Elem>, KModuleError> {
        let f = self.field();
        let m = m.normalized(f);
        let class = self.hodge.space().classify_map(&m)?;
        let t = self.hodge.conjugate_scalar(&m)?;
        let lm = ext_power_map(f, &m, self.degree());
        let apply = |x: &ExtVector<F::Elem>| self.ext(lm.apply(f, &x.coeffs));
        let jt = KElem::new(f.zero(), t.clone());
        let mut cols = Vec::with_capacity(self.rank());
        for v in &self.b1_vectors {
            let img = apply(v);
            if apply(&self.hodge.apply(v)) != self.k_action(&img, &jt) {
                return Err(KModuleError::NotKSemilinear);
            }
            cols.push(self.to_k_coords(&img).coords);
        }
        let r = self.rank();
        let matrix = (0..r).map(|i| (0..r).map(|c| cols[c][i].clone()).collect()).collect();
        let psi = KAutomorphism {
            companion: m.companion,
            t,
        };
        let multiplier = f.pow(&class.multiplier, self.degree() as u64);
        let fbasis: Vec<ExtVector<F::Elem>> = self
            .b1_vectors
            .iter()
            .cloned()
            .chain(self.b1_vectors.iter().map(|v| self.hodge.apply(v)))
            .collect();
        for x in &fbasis {
            for y in &fbasis {
                let lhs = self.g_form(&apply(x), &apply(y));
                let rhs = self.algebra.mul_scalar(&psi.apply(f, &self.g_form(x, y)), &multiplier);
                if lhs != rhs {
                    return Err(KModuleError::NotSemiSimilitude);
                }
            }
        }
        Ok(EtaImage {
            map: KSemilinearMap { matrix, psi },
            multiplier,
        })
    }

    /// Witness that `g` is isotropic when `h` is: `w₁ + w₂` with
    /// `wᵢ = vᵢ ∧ u₃ ∧ ⋯ ∧ u_{ℓ+1}`, `v₁ ⟂ v₂` and `h(v₁,v₁) = −h(v₂,v₂)`.
    pub fn isotropy_witness(&self) -> Result<(ExtVector<F::Elem>, ExtVector<F::Elem>), KModuleError> {
        let space = self.hodge.space();
        let f = self.field();
        let x = space.find_isotropic_vector().ok_or(KModuleError::NoIsotropicVector)?;
        let n = space.dim();
        let hx: Vec<F::Elem> = (0..n)
            .map(|i| space.evaluate_h(&x, &crate::linalg::unit_vector(f, n, i)))
            .collect();
        let i = hx.iter().position(|c| !f.is_zero(c)).expect("h is nondegenerate");
        // h(x, y) = 1
        let mut y = vec_scale(f, &crate::linalg::unit_vector(f, n, i), &f.inv(&hx[i]).expect("nonzero"));
        if f.is_zero(&space.evaluate_h(&y, &y)) {
            if f.characteristic() != 2 {
                y = vec_add(f, &y, &x);
            } else if let Some(u) = f.trace_one() {
                y = vec_add(f, &y, &vec_scale(f, &x, &u));
            } else {
                let perp = space.orthogonal_complement(&[x.clone(), y.clone()]);
                let sub = space.restrict(&perp)?;
                let ob = sub.orthogonal_basis();
                let u = ob.vectors[0]
                    .iter()
                    .zip(&perp)
                    .fold(vec![f.zero(); n], |acc, (c, p)| vec_add(f, &acc, &vec_scale(f, p, c)));
                y = vec_add(f, &y, &u);
            }
        }
        let a = space.evaluate_h(&y, &y);
        let v1 = y.clone();
        let v2 = vec_sub(f, &y, &vec_scale(f, &x, &a));
        let rest = space.orthogonal_complement(&[v1.clone(), v2.clone()]);
        let mut tail = Vec::new();
        if self.degree() > 1 {
            let sub = space.restrict(&rest)?;
            for c in sub.orthogonal_basis().vectors.iter().take(self.degree() - 1) {
                tail.push(
                    c.iter()
                        .zip(&rest)
                        .fold(vec![f.zero(); n], |acc, (s, p)| vec_add(f, &acc, &vec_scale(f, p, s))),
                );
            }
        }
        let wedge_with = |v: Vec<F::Elem>| {
            let mut vs = vec![v];
            vs.extend(tail.iter().cloned());
            ExtVector::decomposable(f, &vs)
        };
        Ok((wedge_with(v1), wedge_with(v2)))
    }

    fn require_normalized(&self) -> Result<(), KModuleError> {
        if self.field().is_one(self.algebra.delta()) {
            Ok(())
        } else {
            Err(KModuleError::NotNormalized)
        }
    }

    /// `[1]` or `[1, θ]`.
    fn fixed_basis(&self) -> Vec<F::Elem> {
        let f = self.field();
        match f.theta() {
            Some(th) => vec![f.one(), th],
            None => vec![f.one()],
        }
    }

    /// `{(v_S·f)·k : f ∈ fixed basis, S ∈ B₁}`, `f`-major.
    fn right_ideal_basis(&self, k: &KElem<F::Elem>) -> Vec<ExtVector<F::Elem>> {
        let f = self.field();
        self.fixed_basis()
            .iter()
            .flat_map(|c| self.b1_vectors.iter().map(move |v| self.k_action(&v.scale(f, c), k)))
            .collect()
    }

    /// Coordinates over the fixed field, with each entry split as `r₀ + r₁θ`.
    fn fixed_coords(&self, x: &ExtVector<F::Elem>) -> Vec<F::Elem> {
        let f = self.field();
        x.coeffs.iter().flat_map(|c| f.fixed_coords(c)).collect()
    }

    fn fixed_rank(&self, vs: &[ExtVector<F::Elem>]) -> usize {
        let cols: Vec<Vec<F::Elem>> = vs.iter().map(|v| self.fixed_coords(v)).collect();
        Matrix::from_cols(&cols).rank(self.field())
    }

    /// `z = 1 + j`.
    pub fn z(&self) -> KElem<F::Elem> {
        let f = self.field();
        KElem::new(f.one(), f.one())
    }

    /// Basis of `Wz` over the fixed field: `(v_S·f)·z`, `f`-major.
    pub fn wz_basis(&self) -> Result<Vec<ExtVector<F::Elem>>, KModuleError> {
        self.require_normalized()?;
        Ok(self.right_ideal_basis(&self.z()))
    }

    /// Coordinates of `y ∈ Wz` over [`wz_basis`](Self::wz_basis).
    pub fn wz_coords(&self, y: &ExtVector<F::Elem>) -> Result<Vec<F::Elem>, KModuleError> {
        let basis = self.wz_basis()?;
        let cols: Vec<Vec<F::Elem>> = basis.iter().map(|v| self.fixed_coords(v)).collect();
        Matrix::from_cols(&cols)
            .solve(self.field(), &self.fixed_coords(y))
            .ok_or(KModuleError::OutsideWz)
    }

    /// `Wp ⊕ W(1−p)` when a nontrivial idempotent exists, otherwise `Wz`
    /// with `ker ρ_z = Wz` verified.
    pub fn submodules_split(&self) -> Result<SplitModules<F::Elem>, KModuleError> {
        self.require_normalized()?;
        let f = self.field();
        let total = 2 * self.rank() * f.fixed_degree();
        if let Some(p) = self.algebra.idempotents().into_iter().next() {
            let q = self.algebra.sub(&self.algebra.one(), &p);
            let wp = self.right_ideal_basis(&p);
            let wq = self.right_ideal_basis(&q);
            let all: Vec<_> = wp.iter().chain(&wq).cloned().collect();
            if self.fixed_rank(&all) != total || self.fixed_rank(&wp) != total / 2 {
                return Err(HodgeError::PathMismatch("W = Wp + W(1-p) is not direct").into());
            }
            return Ok(SplitModules::Idempotent { p, wp, wq });
        }
        let z = self.algebra.nilpotent().ok_or(HodgeError::NotSplit)?;
        let wz = self.right_ideal_basis(&z);
        // ρ_z is right multiplication by z, i.e. id + J; here σ = id.
        let m = self.hodge.matrix();
        let rho = Matrix::identity(f, m.rows()).add(f, m);
        let dim = m.rows();
        if !rho.mul(f, &rho).is_zero(f) || rho.rank(f) != dim / 2 || self.fixed_rank(&wz) != dim / 2 {
            return Err(HodgeError::PathMismatch("ker of rho_z differs from Wz").into());
        }
        Ok(SplitModules::Nilpotent { z, wz })
    }

    /// `a_ℓ`: `θ` for odd `ℓ`, `σ ≠ id`, char ≠ 2; otherwise `1`.
    pub fn a_ell(&self) -> F::Elem {
        let f = self.field();
        if self.degree() % 2 == 1 && f.has_sigma() && f.characteristic() != 2 {
            f.theta().expect("sigma is nontrivial")
        } else {
            f.one()
        }
    }

    /// `r_ℓ(x + j·y) = (w + (−1)^ℓ σ(w))·a_ℓ` with `w = x + (−1)^ℓ y`.
    pub fn r_ell(&self, k: &KElem<F::Elem>) -> F::Elem {
        let f = self.field();
        let s = sign(f, self.degree() % 2 == 1);
        let w = f.add(&k.x0, &f.mul(&s, &k.x1));
        f.mul(&f.add(&w, &f.mul(&s, &f.conj(&w))), &self.a_ell())
    }

    /// Gram matrix of `g^o` on [`wz_basis`](Self::wz_basis), entries in the fixed field.
    pub fn g_o_gram(&self) -> Result<Matrix<F::Elem>, KModuleError> {
        self.require_normalized()?;
        let f = self.field();
        let pre: Vec<ExtVector<F::Elem>> = self
            .fixed_basis()
            .iter()
            .flat_map(|c| self.b1_vectors.iter().map(move |v| v.scale(f, c)))
            .collect();
        let k = pre.len();
        Ok(Matrix::from_fn(k, k, |i, j| self.r_ell(&self.g_form(&pre[i], &pre[j]))))
    }

    /// `g^o(Xz, Yz) = r_ℓ(g(X, Y))` for arguments in `Wz`.
    pub fn g_o(&self, a: &ExtVector<F::Elem>, b: &ExtVector<F::Elem>) -> Result<F::Elem, KModuleError> {
        let f = self.field();
        let (ca, cb) = (self.wz_coords(a)?, self.wz_coords(b)?);
        let fixed = self.fixed_basis();
        let m = self.rank();
        let preimage = |c: &[F::Elem]| {
            c.iter().enumerate().fold(ExtVector::zero(f, self.hodge.dim(), self.degree()), |acc, (i, s)| {
                acc.add(f, &self.b1_vectors[i % m].scale(f, &f.mul(&fixed[i / m], s)))
            })
        };
        Ok(self.r_ell(&self.g_form(&preimage(&ca), &preimage(&cb))))
    }

    /// `η^o(m)`: the restriction of `Λ^ℓm` to `Wz`, over the fixed field.
    pub fn eta_o(&self, m: &SemiMap<F::Elem>) -> Result<Matrix<F::Elem>, KModuleError> {
        let f = self.field();
        let m = m.normalized(f);
        let class = self.hodge.space().classify_map(&m)?;
        if class.kind != MapKind::Isometry || m.companion != Companion::Identity || !f.is_one(&m.matrix.det(f)) {
            return Err(KModuleError::NotSpecial);
        }
        let lm = ext_power_map(f, &m, self.degree());
        let basis = self.wz_basis()?;
        let cols = basis
            .iter()
            .map(|v| {
                self.wz_coords(&self.ext(lm.apply(f, &v.coeffs)))
                    .map_err(|_| KModuleError::WzNotInvariant)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let e = Matrix::from_cols(&cols);
        let g = self.g_o_gram()?;
        if e.transpose().mul(f, &g).mul(f, &e) != g {
            return Err(KModuleError::NotSemiSimilitude);
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{mask_of, TopForm};
    use crate::scalars::{rat, FiniteField, Involution, QuadraticField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag<F: Field>(f: &F, d: &[i64]) -> HermitianSpace<F> {
        let v: Vec<F::Elem> = d.iter().map(|&x| f.from_int(x)).collect();
        HermitianSpace::diagonal(f.clone(), &v).unwrap()
    }

    fn module<F: Field>(s: HermitianSpace<F>, l: usize) -> KModule<F> {
        let top = TopForm::standard(s.field());
        KModule::new(HodgeOperator::new(s, top, l).unwrap()).unwrap()
    }

    fn std_basis<F: Field>(km: &KModule<F>) -> Vec<ExtVector<F::Elem>> {
        let n = km.hodge().dim();
        ExtBasis::new(n, km.degree())
            .masks()
            .iter()
            .map(|&m| ExtVector::basis(km.field(), n, m))
            .collect()
    }

    fn all_k(k: &KAlgebra<FiniteField>) -> Vec<KElem<crate::scalars::Gf>> {
        let els = k.field().elements().unwrap();
        els.iter()
            .flat_map(|a| els.iter().map(move |b| KElem::new(*a, *b)))
            .collect()
    }

    #[test]
    fn module_axioms_over_f9() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let km = module(diag(&f, &[1, -1]), 1);
        let k = km.algebra().clone();
        let elems = all_k(&k);
        for x in std_basis(&km) {
            assert_eq!(km.k_action(&x, &k.one()), x);
            let jj = km.k_action(&km.k_action(&x, &k.j()), &k.j());
            assert_eq!(jj, x.scale(&f, k.delta()));
            for a in &elems {
                let xa = km.k_action(&x, a);
                for b in &elems {
                    assert_eq!(km.k_action(&xa, b), km.k_action(&x, &k.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn module_associativity_in_degree_two() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let km = module(diag(&f, &[1, 2, 1, 1]), 2);
        let k = km.algebra().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for x in std_basis(&km) {
            for _ in 0..40 {
                let a = KElem::new(f.random(&mut rng), f.random(&mut rng));
                let b = KElem::new(f.random(&mut rng), f.random(&mut rng));
                assert_eq!(km.k_action(&km.k_action(&x, &a), &b), km.k_action(&x, &k.mul(&a, &b)));
            }
        }
    }

    #[test]
    fn g_is_diagonal_on_b1() {
        let q = Rationals;
        let km = module(diag(&q, &[1, 2, 10, -5]), 2);
        let g = km.g_gram();
        let c = [2, 10, -5];
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { rat(c[i], 1) } else { rat(0, 1) };
                assert_eq!(*x, KElem::new(want, rat(0, 1)));
            }
        }
    }

    #[test]
    fn two_paths_on_the_rational_example() {
        let q = Rationals;
        let km = module(diag(&q, &[1, 2, 10, -5]), 2);
        assert_eq!(*km.algebra().delta(), rat(-100, 1));
        let k = km.algebra();
        let v13 = ExtVector::basis(&q, 4, mask_of(&[1, 3]));
        let v14 = ExtVector::basis(&q, 4, mask_of(&[1, 4]));
        let w = v13
            .scale(&q, &rat(10, 1))
            .sub(&q, &km.k_action(&v14, &KElem::new(rat(10, 1), rat(1, 1))));
        let (a, b) = km.g_form_paths(&w, &w);
        assert_eq!(a, b);
        assert_eq!(b, KElem::new(rat(1000, 1), rat(-100, 1)));
        assert!(!k.is_zero(&b));
    }

    #[test]
    fn alpha_hermitian_and_sesquilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (q, inv) in [(5, Involution::Identity), (9, Involution::Galois), (4, Involution::Galois), (4, Involution::Identity)] {
            let f = FiniteField::new(q, inv).unwrap();
            for l in [1usize, 2] {
                let km = module(diag(&f, &vec![1; 2 * l]), l);
                assert!(km.is_alpha_hermitian(), "{} l={l}", f.name());
                let k = km.algebra();
                let e = std_basis(&km);
                for u in &e {
                    for v in &e {
                        let c = KElem::new(f.random(&mut rng), f.random(&mut rng));
                        let g = km.g_form(u, v);
                        assert_eq!(km.g_form(u, &km.k_action(v, &c)), k.mul(&g, &c));
                        assert_eq!(km.g_form(&km.k_action(u, &c), v), k.mul(&k.alpha(&c), &g));
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_kernel_of_eta() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let km = module(diag(&f, &[1, 1, 1, 1]), 2);
        let k = km.algebra();
        let minus = SemiMap::linear(Matrix::identity(&f, 4).scale(&f, &f.from_int(-1)));
        assert!(km.eta(&minus).unwrap().map.is_identity(k));
        let t = f.theta().unwrap();
        assert!(f.is_one(&f.norm(&t)));
        let rot = SemiMap::linear(Matrix::identity(&f, 4).scale(&f, &t));
        assert!(!km.eta(&rot).unwrap().map.is_identity(k));
    }

    fn eichler_elements<F: Field>(s: &HermitianSpace<F>) -> Vec<SemiMap<F::Elem>> {
        let f = s.field();
        let n = s.dim();
        let z = s.find_isotropic_vector().unwrap();
        let mut out = Vec::new();
        for w in s.orthogonal_complement(&[z.clone()]) {
            let hw = s.evaluate_h(&w, &w);
            let p = if f.characteristic() == 2 {
                match f.trace_one() {
                    Some(u) => f.mul(&u, &hw),
                    None => continue,
                }
            } else {
                f.div(&hw, &f.from_int(2))
            };
            let m = s.eichler(&z, &w, &p).unwrap();
            if !m.is_identity(f) {
                out.push(m);
            }
        }
        assert!(!out.is_empty(), "n = {n}");
        out
    }

    #[test]
    fn eta_on_su4_f4_is_a_homomorphism_into_isometries() {
        let f = FiniteField::new(4, Involution::Galois).unwrap();
        let s = diag(&f, &[1, 1, 1, 1]);
        let km = module(s.clone(), 2);
        let k = km.algebra();
        let gens = eichler_elements(&s);
        for a in &gens {
            let ea = km.eta(a).unwrap();
            assert!(f.is_one(&ea.multiplier));
            assert!(ea.map.psi.is_identity(&f));
            for b in &gens {
                let eb = km.eta(b).unwrap();
                let eab = km.eta(&a.compose(&f, b)).unwrap();
                assert_eq!(ea.map.compose(k, &eb.map), eab.map);
            }
        }
    }

    #[test]
    fn eta_of_semilinear_map_over_f9() {
        let f = FiniteField::new(9, Involution::Galois).unwrap();
        let km = module(diag(&f, &[1, 1, 2, 2]), 2);
        let k = km.algebra();
        let sig = SemiMap::new(Matrix::identity(&f, 4), Companion::Sigma);
        let sc = SemiMap::linear(Matrix::diagonal(&f, &[f.one(), f.one(), f.one(), f.theta().unwrap()]));
        let es = km.eta(&sig).unwrap();
        assert_eq!(es.map.psi.companion, Companion::Sigma);
        let ec = km.eta(&sc).unwrap();
        let both = km.eta(&sig.compose(&f, &sc)).unwrap();
        assert_eq!(es.map.compose(k, &ec.map), both.map);
        let x: Vec<_> = (0..km.rank())
            .map(|i| KElem::new(f.from_int(i as i64 + 1), f.theta().unwrap()))
            .collect();
        let xv = km.from_k_coords(&KModuleVector { coords: x.clone() });
        let lm = ext_power_map(&f, &sig, 2);
        let image = ExtVector::from_coeffs(4, 2, lm.apply(&f, &xv.coeffs));
        assert_eq!(km.to_k_coords(&image).coords, es.map.apply(k, &x));
    }

    #[test]
    fn idempotent_decomposition_sigma_identity() {
        let f = FiniteField::prime(5).unwrap();
        let km = KModule::split(diag(&f, &[1, 2, 1, 2]), TopForm::standard(&f), 2).unwrap();
        let k = km.algebra().clone();
        let SplitModules::Idempotent { p, wp, wq } = km.submodules_split().unwrap() else {
            panic!("expected idempotents");
        };
        assert_eq!(wp.len(), 3);
        assert_eq!(wq.len(), 3);
        let two_p = k.mul_scalar(&p, &f.from_int(2));
        for x in &wp {
            for y in &wp {
                let want = k.mul_scalar(&two_p, &km.hodge().ext_h(x, y));
                assert_eq!(km.g_form(x, y), want);
            }
            for y in &wq {
                assert!(k.is_zero(&km.g_form(x, y)));
            }
        }
    }

    #[test]
    fn odd_degree_restriction_is_trivial() {
        let f = FiniteField::prime(7).unwrap();
        let km = KModule::split(diag(&f, &[1, -1]), TopForm::standard(&f), 1).unwrap();
        let SplitModules::Idempotent { wp, .. } = km.submodules_split().unwrap() else {
            panic!("expected idempotents");
        };
        for x in &wp {
            for y in &wp {
                assert!(km.algebra().is_zero(&km.g_form(x, y)));
            }
        }
        assert!(km.g_o_gram().unwrap().is_zero(&f));
    }

    #[test]
    fn char_two_nilpotent_module() {
        let f = FiniteField::new(4, Involution::Identity).unwrap();
        let km = KModule::split(diag(&f, &[1, 1, 1, 1]), TopForm::standard(&f), 2).unwrap();
        let SplitModules::Nilpotent { wz, .. } = km.submodules_split().unwrap() else {
            panic!("expected a nilpotent element");
        };
        assert_eq!(wz.len(), 3);
        for x in &wz {
            for y in &wz {
                assert!(km.algebra().is_zero(&km.g_form(x, y)));
            }
        }
        assert!(km.g_o_gram().unwrap().is_zero(&f));
    }

    #[test]
    fn quaternion_case_reduced_form() {
        let q = Rationals;
        let km = KModule::split(diag(&q, &[1, 2, 3, 6]), TopForm::standard(&q), 2).unwrap();
        let g = km.g_o_gram().unwrap();
        assert_eq!(g, Matrix::diagonal(&q, &[rat(4, 1), rat(6, 1), rat(12, 1)]));
        let wz = km.wz_basis().unwrap();
        for (i, x) in wz.iter().enumerate() {
            for (j, y) in wz.iter().enumerate() {
                assert_eq!(km.g_o(x, y).unwrap(), *g.get(i, j));
            }
        }
    }

    #[test]
    fn hermitian_split_reduced_form() {
        let k = QuadraticField::new(2, Involution::Galois).unwrap();
        let c = [3i64, 5, 15];
        let km = KModule::split(diag(&k, &[1, c[0], c[1], c[2]]), TopForm::standard(&k), 2).unwrap();
        let g = km.g_o_gram().unwrap();
        let qsq = k.mul(&k.theta().unwrap(), &k.theta().unwrap());
        let want: Vec<_> = c
            .iter()
            .map(|&x| k.from_int(2 * x))
            .chain(c.iter().map(|&x| k.neg(&k.mul(&k.from_int(2 * x), &qsq))))
            .collect();
        assert_eq!(g, Matrix::diagonal(&k, &want));
    }

    #[test]
    fn eta_o_preserves_reduced_form() {
        let f = FiniteField::new(4, Involution::Galois).unwrap();
        let s = diag(&f, &[1, 1, 1, 1]);
        let km = KModule::split(s.clone(), TopForm::standard(&f), 2).unwrap();
        let id = km.eta_o(&SemiMap::identity(&f, 4)).unwrap();
        assert!(id.is_identity(&f));
        let gens = eichler_elements(&s);
        for a in &gens {
            let ea = km.eta_o(a).unwrap();
            assert!(!ea.is_identity(&f));
            for b in &gens {
                assert_eq!(ea.mul(&f, &km.eta_o(b).unwrap()), km.eta_o(&a.compose(&f, b)).unwrap());
            }
        }
    }

    #[test]
    fn minus_identity_in_the_kernel_of_eta_o() {
        let f = FiniteField::prime(3).unwrap();
        let km = KModule::split(diag(&f, &[1, 1, 1, -1]), TopForm::standard(&f), 2);
        // disc = -1 is not a square in F3, so K is not split.
        assert!(matches!(km, Err(KModuleError::Hodge(HodgeError::NotSplit))));
        let km = module(diag(&f, &[1, 1, 1, -1]), 2);
        let minus = SemiMap::linear(Matrix::identity(&f, 4).scale(&f, &f.from_int(-1)));
        assert!(km.eta(&minus).unwrap().map.is_identity(km.algebra()));
        let split = KModule::split(diag(&f, &[1, 1, 1, 1]), TopForm::standard(&f), 2).unwrap();
        assert!(split.eta_o(&minus).unwrap().is_identity(&f));
    }

    #[test]
    fn isotropy_witnesses() {
        let q = Rationals;
        let km = module(diag(&q, &[1, -1, 2, 3]), 2);
        check_witness(&km);
        for (order, inv, d) in [
            (5, Involution::Identity, vec![1, 1, 1, 1]),
            (9, Involution::Galois, vec![1, 1, 1, 1, 1, 1]),
            (4, Involution::Galois, vec![1, 1]),
            (2, Involution::Identity, vec![1, 1, 1, 1]),
            (4, Involution::Identity, vec![1, 1]),
        ] {
            let f = FiniteField::new(order, inv).unwrap();
            check_witness(&module(diag(&f, &d), d.len() / 2));
        }
    }

    fn check_witness<F: Field>(km: &KModule<F>) {
        let f = km.field();
        let (w1, w2) = km.isotropy_witness().unwrap();
        let h = km.hodge();
        assert_eq!(h.ext_h(&w1, &w1), f.neg(&h.ext_h(&w2, &w2)));
        assert!(!f.is_zero(&h.ext_h(&w1, &w1)));
        let w = w1.add(f, &w2);
        assert!(!w.is_zero(f));
        assert!(km.algebra().is_zero(&km.g_form(&w, &w)));
    }

    proptest! {
        #[test]
        fn k_coordinates_round_trip(c in prop::collection::vec(0u16..9, 6), l in 1usize..3) {
            let f = FiniteField::new(9, Involution::Galois).unwrap();
            let km = module(diag(&f, &vec![1; 2 * l]), l);
            let len = ExtBasis::new(2 * l, l).len();
            let x = ExtVector::from_coeffs(2 * l, l, c.iter().take(len).map(|&v| crate::scalars::Gf(v)).collect());
            prop_assert_eq!(km.from_k_coords(&km.to_k_coords(&x)), x);
        }

        #[test]
        fn g_paths_agree_over_rationals(a in prop::collection::vec(-4i64..5, 6), b in prop::collection::vec(-4i64..5, 6), d in prop::collection::vec(prop_oneof![-5i64..-1, 1i64..5], 4)) {
            let q = Rationals;
            let km = module(diag(&q, &d), 2);
            let x = ExtVector::from_coeffs(4, 2, a.iter().map(|&v| rat(v, 1)).collect());
            let y = ExtVector::from_coeffs(4, 2, b.iter().map(|&v| rat(v, 1)).collect());
            let (p1, p2) = km.g_form_paths(&x, &y);
            prop_assert_eq!(p1, p2);
        }
    }
}
