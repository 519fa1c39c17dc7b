//! Lines of `PG(V)` for `dim V = 4`, the polarity induced by `J`, the map
//! `λ: L ↦ (u∧v)K`, absolute points and half-turns.

use std::collections::BTreeMap;

use indexmap::{IndexMap, IndexSet};
use num::{BigRational, Zero};
use thiserror::Error;

use crate::exterior::{wedge, ExtVector};
use crate::forms::{descent_holds, projective_points, HermitianSpace};
use crate::groups::{all_vectors, generate_from_pool, reflection_matrix, Codec, GeneratedGroup, GroupError, KMapCodec};
use crate::hodge::HodgeOperator;
use crate::kmodule::KModule;
use crate::linalg::{span_key, vec_scale, Matrix, SemiMap};
use crate::scalars::{rat, Field, FiniteField, Rationals, Ternary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("the vectors do not span a line")]
    Degenerate,
    #[error("the vector is zero")]
    Zero,
    #[error("g(Z, Z) is not zero")]
    NotIsotropic,
    #[error("needs dim V = 4")]
    Dimension,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A 2-dimensional subspace, stored as its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line<E> {
    rows: Vec<Vec<E>>,
}

impl<E: Clone + PartialEq> Line<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, u: &[E], v: &[E]) -> Result<Self, GeometryError> {
        let rows = span_key(f, &[u.to_vec(), v.to_vec()]);
        if rows.len() != 2 {
            return Err(GeometryError::Degenerate);
        }
        Ok(Self { rows })
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn plucker<F: Field<Elem = E>>(&self, f: &F) -> ExtVector<E> {
        ExtVector::decomposable(f, &self.rows)
    }
}

/// A point `XK` of the projective space over `K`, keyed by the `F`-span of `X` and `J(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KPoint<E> {
    key: Vec<Vec<E>>,
}

impl<E> KPoint<E> {
    pub fn key(&self) -> &[Vec<E>] {
        &self.key
    }
}

pub fn k_point<F: Field>(hodge: &HodgeOperator<F>, x: &ExtVector<F::Elem>) -> KPoint<F::Elem> {
    KPoint {
        key: span_key(hodge.field(), &[x.coeffs.clone(), hodge.apply(x).coeffs]),
    }
}

/// All lines of `PG(F⁴)`.
pub fn all_lines<F: Field>(f: &F) -> Vec<Line<F::Elem>> {
    let pts = projective_points(f, 4);
    let mut seen = IndexSet::new();
    for (i, u) in pts.iter().enumerate() {
        for v in &pts[i + 1..] {
            if let Ok(l) = Line::new(f, u, v) {
                seen.insert(l);
            }
        }
    }
    seen.into_iter().collect()
}

/// `λ(L) = (u∧v)K`.
pub fn lambda<F: Field>(hodge: &HodgeOperator<F>, line: &Line<F::Elem>) -> KPoint<F::Elem> {
    k_point(hodge, &line.plucker(hodge.field()))
}

pub fn perp_line<F: Field>(space: &HermitianSpace<F>, line: &Line<F::Elem>) -> Line<F::Elem> {
    let b = space.orthogonal_complement(line.basis());
    Line::new(space.field(), &b[0], &b[1]).expect("the complement of a line is a line")
}

/// Whether the restriction of `h` to `L` is degenerate.
pub fn is_degenerate<F: Field>(space: &HermitianSpace<F>, line: &Line<F::Elem>) -> bool {
    let f = space.field();
    f.is_zero(&space.gram_of(line.basis()).det(f))
}

#[derive(Clone, Debug)]
pub struct PolarityReport<E> {
    pub lines_checked: usize,
    pub counterexample: Option<Line<E>>,
}

impl<E> PolarityReport<E> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// `J(u∧v)F` is the Plücker point of `L^⊥` for every line `L`.
pub fn check_j_polarity<F: Field>(hodge: &HodgeOperator<F>) -> Result<PolarityReport<F::Elem>, GeometryError> {
    let f = hodge.field();
    if hodge.dim() != 4 || hodge.degree() != 2 {
        return Err(GeometryError::Dimension);
    }
    let lines = all_lines(f);
    let counterexample = lines
        .iter()
        .find(|l| {
            let j = hodge.apply(&l.plucker(f));
            let p = perp_line(hodge.space(), l).plucker(f);
            Matrix::from_rows(vec![j.coeffs, p.coeffs]).rank(f) != 1
        })
        .cloned();
    Ok(PolarityReport {
        lines_checked: lines.len(),
        counterexample,
    })
}

#[derive(Clone, Debug)]
pub struct FiberReport {
    /// Fiber size to number of image points.
    pub histogram: BTreeMap<usize, usize>,
    /// Each fiber is `{L, L^⊥}` for nondegenerate `h|_L`, or the `q + 1` tangents
    /// through one absolute point otherwise.
    pub dichotomy_holds: bool,
    pub lines: usize,
}

pub fn lambda_fibers(km: &KModule<FiniteField>) -> Result<FiberReport, GeometryError> {
    let hodge = km.hodge();
    let space = hodge.space();
    let f = km.field();
    if hodge.dim() != 4 {
        return Err(GeometryError::Dimension);
    }
    let lines = all_lines(f);
    let mut fibers: IndexMap<KPoint<_>, Vec<Line<_>>> = IndexMap::new();
    for l in &lines {
        fibers.entry(lambda(hodge, l)).or_default().push(l.clone());
    }
    let q = f.size();
    let mut histogram = BTreeMap::new();
    let mut ok = true;
    for members in fibers.values() {
        *histogram.entry(members.len()).or_insert(0) += 1;
        let l = &members[0];
        if is_degenerate(space, l) {
            let a = radical(space, l);
            let apoint = span_key(f, &[a.clone()]);
            let aperp = space.orthogonal_complement(&[a]);
            ok &= members.len() == q + 1
                && members.iter().all(|m| {
                    is_degenerate(space, m)
                        && span_key(f, &[radical(space, m)]) == apoint
                        && m.basis().iter().all(|v| Matrix::from_cols(&[aperp[0].clone(), aperp[1].clone(), aperp[2].clone(), v.clone()]).rank(f) == 3)
                });
        } else {
            let p = perp_line(space, l);
            ok &= members.len() == 2 && members.contains(&p) && members.contains(l);
        }
    }
    Ok(FiberReport {
        histogram,
        dichotomy_holds: ok,
        lines: lines.len(),
    })
}

fn radical<F: Field>(space: &HermitianSpace<F>, line: &Line<F::Elem>) -> Vec<F::Elem> {
    let f = space.field();
    let b = line.basis();
    let g = space.gram_of(b);
    let ns = g.nullspace(f);
    let c: Vec<F::Elem> = ns[0].iter().map(|x| f.conj(x)).collect();
    let mut v = vec_scale(f, &b[0], &c[0]);
    for (x, y) in v.iter_mut().zip(&b[1]) {
        *x = f.add(x, &f.mul(y, &c[1]));
    }
    v
}

/// `h`-isotropic points of `PG(V)`.
pub fn absolute_points_h<F: Field>(space: &HermitianSpace<F>) -> Vec<Vec<F::Elem>> {
    projective_points(space.field(), space.dim())
        .into_iter()
        .filter(|v| space.is_isotropic_vector(v))
        .collect()
}

/// `g`-isotropic points `XK` of the projective space over `K`.
pub fn absolute_points_g(km: &KModule<FiniteField>) -> Vec<KPoint<crate::scalars::Gf>> {
    let f = km.field();
    let hodge = km.hodge();
    let n = hodge.dim();
    let k = km.algebra();
    let mut out = IndexSet::new();
    for c in projective_points(f, hodge.ext_gram().rows()) {
        let x = ExtVector::from_coeffs(n, 2, c);
        if k.is_zero(&km.g_form(&x, &x)) {
            out.insert(k_point(hodge, &x));
        }
    }
    out.into_iter().collect()
}

/// Whether every `g`-absolute point is `λ` of some line.
pub fn absolute_points_covered(km: &KModule<FiniteField>) -> bool {
    let image: IndexSet<_> = all_lines(km.field()).iter().map(|l| lambda(km.hodge(), l)).collect();
    absolute_points_g(km).iter().all(|p| image.contains(p))
}

/// `z, w` with `Z = z∧w` and `h(z, z) = 0 = h(z, w)`.
pub fn factor_isotropic<F: Field>(
    km: &KModule<F>,
    z: &ExtVector<F::Elem>,
) -> Result<(Vec<F::Elem>, Vec<F::Elem>), GeometryError> {
    let f = km.field();
    let hodge = km.hodge();
    let space = hodge.space();
    if hodge.dim() != 4 || z.degree != 2 {
        return Err(GeometryError::Dimension);
    }
    if z.is_zero(f) {
        return Err(GeometryError::Zero);
    }
    if !km.algebra().is_zero(&km.g_form(z, z)) {
        return Err(GeometryError::NotIsotropic);
    }
    // The line of a decomposable Z is the kernel of x ↦ x∧Z.
    let cols: Vec<Vec<F::Elem>> = (0..4)
        .map(|i| {
            let e = ExtVector::basis(f, 4, 1 << i);
            wedge(f, &e, z).expect("degrees fit").coeffs
        })
        .collect();
    let kernel = Matrix::from_cols(&cols).nullspace(f);
    if kernel.len() != 2 {
        return Err(GeometryError::Degenerate);
    }
    let line = Line::new(f, &kernel[0], &kernel[1])?;
    let a = radical(space, &line);
    let b = line
        .basis()
        .iter()
        .find(|v| Matrix::from_rows(vec![a.clone(), (*v).clone()]).rank(f) == 2)
        .expect("a line has a vector off any point")
        .clone();
    let aw = ExtVector::decomposable(f, &[a.clone(), b.clone()]);
    let i = (0..aw.coeffs.len()).find(|&i| !f.is_zero(&aw.coeffs[i])).expect("independent");
    let s = f.div(&z.coeffs[i], &aw.coeffs[i]);
    Ok((a, vec_scale(f, &b, &s)))
}

/// The group `H` generated by `η(ρ_{v₂}∘ρ_{v₁})` over orthogonal anisotropic
/// `v₁, v₂`, and whether it is normalized by the images of all reflections.
#[derive(Clone, Debug)]
pub struct HalfTurns {
    pub group: GeneratedGroup<KMapCodec>,
    pub normalized_by_reflections: bool,
}

pub fn half_turn_subgroup(km: &KModule<FiniteField>, cap: usize) -> Result<HalfTurns, GeometryError> {
    let f = km.field();
    let space = km.hodge().space();
    if f.has_sigma() || f.characteristic() == 2 {
        return Err(GeometryError::Precondition("needs sigma = id and characteristic other than 2"));
    }
    if km.algebra().is_split() != Ternary::No {
        return Err(GeometryError::Precondition("K must not be split"));
    }
    let aniso: Vec<_> = projective_points(f, 4)
        .into_iter()
        .filter(|v| !space.is_isotropic_vector(v))
        .collect();
    let eta = |m: Matrix<_>| km.eta(&SemiMap::linear(m)).map(|e| e.map).map_err(GroupError::from);
    let mut pool = Vec::new();
    for (i, v1) in aniso.iter().enumerate() {
        for v2 in &aniso[i + 1..] {
            if f.is_zero(&space.evaluate_h(v1, v2)) {
                let m = reflection_matrix(space, v2).mul(f, &reflection_matrix(space, v1));
                pool.push(eta(m)?);
            }
        }
    }
    let codec = KMapCodec::new(km.algebra().clone(), km.rank()).map_err(GeometryError::from)?;
    let group = generate_from_pool(codec.clone(), pool, cap)?;
    let mut normal = true;
    for v in &aniso {
        let s = eta(reflection_matrix(space, v))?;
        for t in group.generators() {
            normal &= group.contains(&codec.mul(&codec.mul(&s, t), &s));
        }
    }
    Ok(HalfTurns {
        group,
        normalized_by_reflections: normal,
    })
}

/// The two planes `L₁ = e₁F + e₂F` and `L₂ = e₃F + (½, 0, 0, 1⁄10)F` for
/// `h = diag(1, 2, 10, −5)` over `ℚ`.
#[derive(Clone, Debug)]
pub struct PlaneComparison {
    pub g_l1: BigRational,
    pub g_l2: BigRational,
    pub disc_l1: BigRational,
    pub disc_l1_perp: BigRational,
    pub disc_l2: BigRational,
    /// `v ∈ L₂` with `h(v, v) = 5`.
    pub five_in_l2: Vec<BigRational>,
    /// `x² + 2y² ≡ 5z² (mod 25)` forces `x ≡ y ≡ z ≡ 0 (mod 5)`, so `5 ∉ h(L₁)`.
    pub five_not_in_l1: bool,
    /// Both fibers `{L₁, L₁^⊥}` and `{L₂, L₂^⊥}` are distinct `λ`-fibers.
    pub distinct_points: bool,
}

impl PlaneComparison {
    /// `h|_{L₂}` is isometric to neither `h|_{L₁}` nor `h|_{L₁^⊥}`.
    pub fn not_isometric(&self) -> bool {
        let square_ratio = |a: &BigRational, b: &BigRational| {
            let r = a / b;
            let (n, d) = (r.numer().clone(), r.denom().clone());
            !n.is_zero() && crate::arith::is_square_int(&(n * d))
        };
        self.five_not_in_l1 && !square_ratio(&self.disc_l1_perp, &self.disc_l2) && self.five_in_l2.len() == 4
    }
}

pub fn rational_plane_comparison() -> Result<PlaneComparison, GeometryError> {
    let q = Rationals;
    let space = HermitianSpace::diagonal(q.clone(), &[rat(1, 1), rat(2, 1), rat(10, 1), rat(-5, 1)])
        .map_err(|_| GeometryError::Precondition("form"))?;
    let top = crate::exterior::TopForm::standard(&q);
    let hodge = HodgeOperator::new(space.clone(), top, 2).map_err(|_| GeometryError::Precondition("hodge"))?;
    let km = KModule::new(hodge.clone()).map_err(|_| GeometryError::Precondition("module"))?;
    let e = |i: usize| crate::linalg::unit_vector(&q, 4, i);
    let l1 = Line::new(&q, &e(0), &e(1))?;
    let y = vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 10)];
    let l2 = Line::new(&q, &e(2), &y)?;
    let det = |l: &Line<BigRational>| space.gram_of(l.basis()).det(&q);
    let g_of = |u: &[BigRational], v: &[BigRational]| {
        let x = ExtVector::decomposable(&q, &[u.to_vec(), v.to_vec()]);
        let val = km.g_form(&x, &x);
        (val.x0, val.x1)
    };
    let (g1, g1j) = g_of(&e(0), &e(1));
    let (g2, g2j) = g_of(&e(2), &y);
    if !g1j.is_zero() || !g2j.is_zero() {
        return Err(GeometryError::Precondition("g(X, X) should lie in F on decomposable X"));
    }
    // v = (2/3)·e₃ + (5/3)·y.
    let v: Vec<BigRational> = (0..4)
        .map(|i| rat(2, 3) * &e(2)[i] + rat(5, 3) * &y[i])
        .collect();
    let five_in_l2 = if space.evaluate_h(&v, &v) == rat(5, 1) { v } else { Vec::new() };
    let l1p = perp_line(&space, &l1);
    let l2p = perp_line(&space, &l2);
    let pts = [lambda(&hodge, &l1), lambda(&hodge, &l1p), lambda(&hodge, &l2), lambda(&hodge, &l2p)];
    Ok(PlaneComparison {
        g_l1: g1,
        g_l2: g2,
        disc_l1: det(&l1),
        disc_l1_perp: det(&l1p),
        disc_l2: space.gram_of(&[e(2), y.clone()]).det(&q),
        five_in_l2,
        five_not_in_l1: descent_holds(&[1, 2, -5], 5, 25),
        distinct_points: pts[0] == pts[1] && pts[2] == pts[3] && pts[0] != pts[2],
    })
}

/// Reference line count of `PG(3, q)`.
pub fn line_count(q: u64) -> u64 {
    (q.pow(4) - 1) * (q.pow(4) - q) / ((q * q - 1) * (q * q - q))
}

/// Exhaustive check that two lines meet iff the Pfaffian of their Plücker vectors vanishes.
pub fn klein_incidence_holds<F: Field>(hodge: &HodgeOperator<F>) -> bool {
    let f = hodge.field();
    let lines = all_lines(f);
    let pl: Vec<_> = lines.iter().map(|l| l.plucker(f)).collect();
    lines.iter().enumerate().all(|(i, a)| {
        lines.iter().enumerate().all(|(j, b)| {
            let rows: Vec<Vec<F::Elem>> = a.basis().iter().chain(b.basis()).cloned().collect();
            let meet = Matrix::from_rows(rows).rank(f) < 4;
            meet == f.is_zero(&hodge.pf(&pl[i], &pl[j]))
        })
    })
}

/// All vectors of a line, for value-set checks over finite fields.
pub fn line_vectors<F: Field>(f: &F, line: &Line<F::Elem>) -> Vec<Vec<F::Elem>> {
    all_vectors(f, 2)
        .into_iter()
        .map(|c| {
            let a = vec_scale(f, &line.basis()[0], &c[0]);
            let b = vec_scale(f, &line.basis()[1], &c[1]);
            a.iter().zip(&b).map(|(x, y)| f.add(x, y)).collect()
        })
        .collect()
}
