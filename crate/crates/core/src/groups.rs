//! Finite matrix groups by closure, order formulas, Eichler subgroups, the
//! images under `η` and `η^o`, and the spinor norm.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use thiserror::Error;

use crate::exterior::ExtVector;
use crate::forms::{projective_points, FormError, HermitianSpace};
use crate::hodge::{KAlgebra, KElem};
use crate::kmodule::{KAutomorphism, KModule, KModuleError, KSemilinearMap};
use crate::linalg::{unit_vector, vec_add, vec_is_zero, vec_scale, vec_sub, Companion, Matrix, SemiMap};
use crate::scalars::{Field, FiniteField, Gf};

pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("generator is not invertible")]
    NotInvertible,
    #[error("matrices of this size do not fit a 128-bit key")]
    KeyTooWide,
    #[error("unknown group family {0:?}")]
    UnknownFamily(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("eta is not multiplicative on a pair of generators")]
    NotHomomorphism,
    #[error("the image of the Eichler transformation differs from the prediction")]
    EichlerMismatch,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    KModule(#[from] KModuleError),
}

/// Packing of group elements into 128-bit keys.
pub trait Codec: Clone {
    type Item: Clone;
    fn encode(&self, x: &Self::Item) -> u128;
    fn decode(&self, key: u128) -> Self::Item;
    /// `a ∘ b`.
    fn mul(&self, a: &Self::Item, b: &Self::Item) -> Self::Item;
    fn identity(&self) -> Self::Item;
    fn is_invertible(&self, x: &Self::Item) -> bool;
}

fn entry_bits(f: &FiniteField) -> u32 {
    64 - (f.size() as u64 - 1).leading_zeros()
}

/// Semilinear maps of `F^n` for a finite field `F`.
#[derive(Clone, Debug)]
pub struct MapCodec {
    field: FiniteField,
    n: usize,
    bits: u32,
}

impl MapCodec {
    pub fn new(field: FiniteField, n: usize) -> Result<Self, GroupError> {
        let bits = entry_bits(&field);
        if (n * n) as u32 * bits + 1 > 128 {
            return Err(GroupError::KeyTooWide);
        }
        Ok(Self { field, n, bits })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }
}

impl Codec for MapCodec {
    type Item = SemiMap<Gf>;

    fn encode(&self, x: &SemiMap<Gf>) -> u128 {
        let mut key = pack(x.matrix.entries(), self.bits);
        if x.companion == Companion::Sigma && self.field.has_sigma() {
            key |= 1 << ((self.n * self.n) as u32 * self.bits);
        }
        key
    }

    fn decode(&self, key: u128) -> SemiMap<Gf> {
        let nn = self.n * self.n;
        let entries = unpack(key, nn, self.bits);
        let companion = if (key >> (nn as u32 * self.bits)) & 1 == 1 {
            Companion::Sigma
        } else {
            Companion::Identity
        };
        SemiMap::new(Matrix::from_fn(self.n, self.n, |i, j| entries[i * self.n + j]), companion)
    }

    fn mul(&self, a: &SemiMap<Gf>, b: &SemiMap<Gf>) -> SemiMap<Gf> {
        a.compose(&self.field, b)
    }

    fn identity(&self) -> SemiMap<Gf> {
        SemiMap::identity(&self.field, self.n)
    }

    fn is_invertible(&self, x: &SemiMap<Gf>) -> bool {
        x.matrix.rows() == self.n && !self.field.is_zero(&x.matrix.det(&self.field))
    }
}

/// Linear maps given by square matrices over a finite field.
#[derive(Clone, Debug)]
pub struct MatrixCodec {
    field: FiniteField,
    n: usize,
    bits: u32,
}

impl MatrixCodec {
    pub fn new(field: FiniteField, n: usize) -> Result<Self, GroupError> {
        let bits = entry_bits(&field);
        if (n * n) as u32 * bits > 128 {
            return Err(GroupError::KeyTooWide);
        }
        Ok(Self { field, n, bits })
    }

    /// Matrices with entries in the fixed field of `σ`, packed at the fixed field's width.
    pub fn over_fixed(field: FiniteField, n: usize) -> Result<Self, GroupError> {
        if !field.has_sigma() {
            return Self::new(field, n);
        }
        let bits = 64 - (field.characteristic() - 1).leading_zeros();
        if (n * n) as u32 * bits > 128 {
            return Err(GroupError::KeyTooWide);
        }
        Ok(Self { field, n, bits })
    }
}

impl Codec for MatrixCodec {
    type Item = Matrix<Gf>;

    fn encode(&self, x: &Matrix<Gf>) -> u128 {
        debug_assert!(x.entries().iter().all(|e| (e.0 as u32) < 1 << self.bits));
        pack(x.entries(), self.bits)
    }

    fn decode(&self, key: u128) -> Matrix<Gf> {
        let e = unpack(key, self.n * self.n, self.bits);
        Matrix::from_fn(self.n, self.n, |i, j| e[i * self.n + j])
    }

    fn mul(&self, a: &Matrix<Gf>, b: &Matrix<Gf>) -> Matrix<Gf> {
        a.mul(&self.field, b)
    }

    fn identity(&self) -> Matrix<Gf> {
        Matrix::identity(&self.field, self.n)
    }

    fn is_invertible(&self, x: &Matrix<Gf>) -> bool {
        x.rows() == self.n && !self.field.is_zero(&x.det(&self.field))
    }
}

/// `ψ`-semilinear maps of `K^m` over a finite field.
#[derive(Clone, Debug)]
pub struct KMapCodec {
    algebra: KAlgebra<FiniteField>,
    m: usize,
    bits: u32,
}

impl KMapCodec {
    pub fn new(algebra: KAlgebra<FiniteField>, m: usize) -> Result<Self, GroupError> {
        let bits = entry_bits(algebra.field());
        if (2 * m * m + 1) as u32 * bits + 1 > 128 {
            return Err(GroupError::KeyTooWide);
        }
        Ok(Self { algebra, m, bits })
    }

    pub fn algebra(&self) -> &KAlgebra<FiniteField> {
        &self.algebra
    }
}

impl Codec for KMapCodec {
    type Item = KSemilinearMap<Gf>;

    fn encode(&self, x: &KSemilinearMap<Gf>) -> u128 {
        let mut flat: Vec<Gf> = x.matrix.iter().flatten().flat_map(|k| [k.x0, k.x1]).collect();
        flat.push(x.psi.t);
        let mut key = pack(&flat, self.bits);
        if x.psi.companion == Companion::Sigma && self.algebra.field().has_sigma() {
            key |= 1 << (flat.len() as u32 * self.bits);
        }
        key
    }

    fn decode(&self, key: u128) -> KSemilinearMap<Gf> {
        let len = 2 * self.m * self.m + 1;
        let flat = unpack(key, len, self.bits);
        let matrix = (0..self.m)
            .map(|r| {
                (0..self.m)
                    .map(|c| {
                        let i = 2 * (r * self.m + c);
                        KElem::new(flat[i], flat[i + 1])
                    })
                    .collect()
            })
            .collect();
        let companion = if (key >> (len as u32 * self.bits)) & 1 == 1 {
            Companion::Sigma
        } else {
            Companion::Identity
        };
        KSemilinearMap {
            matrix,
            psi: KAutomorphism {
                companion,
                t: flat[len - 1],
            },
        }
    }

    fn mul(&self, a: &KSemilinearMap<Gf>, b: &KSemilinearMap<Gf>) -> KSemilinearMap<Gf> {
        a.compose(&self.algebra, b)
    }

    fn identity(&self) -> KSemilinearMap<Gf> {
        let k = &self.algebra;
        KSemilinearMap {
            matrix: (0..self.m)
                .map(|r| (0..self.m).map(|c| if r == c { k.one() } else { k.zero() }).collect())
                .collect(),
            psi: KAutomorphism::identity(k.field()),
        }
    }

    fn is_invertible(&self, x: &KSemilinearMap<Gf>) -> bool {
        let k = &self.algebra;
        let f = k.field();
        // F-linear model of the K-linear part; K is free of rank 2 over F.
        let m = self.m;
        let cols: Vec<Vec<Gf>> = (0..m)
            .flat_map(|c| [KElem::new(f.one(), f.zero()), KElem::new(f.zero(), f.one())].map(move |e| (c, e)))
            .map(|(c, e)| {
                let mut v = vec![k.zero(); m];
                v[c] = e;
                let lin = KSemilinearMap {
                    matrix: x.matrix.clone(),
                    psi: KAutomorphism::identity(f),
                };
                lin.apply(k, &v).into_iter().flat_map(|y| [y.x0, y.x1]).collect()
            })
            .collect();
        !f.is_zero(&Matrix::from_cols(&cols).det(f)) && !f.is_zero(&x.psi.t)
    }
}

fn pack(entries: &[Gf], bits: u32) -> u128 {
    entries
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, e)| acc | (e.0 as u128) << (i as u32 * bits))
}

fn unpack(key: u128, len: usize, bits: u32) -> Vec<Gf> {
    let mask = (1u128 << bits) - 1;
    (0..len)
        .map(|i| Gf(((key >> (i as u32 * bits)) & mask) as u16))
        .collect()
}

/// A finite group as the closure of its generators, in insertion order.
#[derive(Clone, Debug)]
pub struct GeneratedGroup<C: Codec> {
    codec: C,
    keys: IndexSet<u128>,
    generators: Vec<C::Item>,
    cap: usize,
}

impl<C: Codec> GeneratedGroup<C> {
    pub fn trivial(codec: C, cap: usize) -> Self {
        let mut keys = IndexSet::new();
        keys.insert(codec.encode(&codec.identity()));
        Self {
            codec,
            keys,
            generators: Vec::new(),
            cap,
        }
    }

    pub fn codec(&self) -> &C {
        &self.codec
    }

    pub fn order(&self) -> usize {
        self.keys.len()
    }

    pub fn generators(&self) -> &[C::Item] {
        &self.generators
    }

    pub fn keys(&self) -> &IndexSet<u128> {
        &self.keys
    }

    pub fn contains(&self, x: &C::Item) -> bool {
        self.keys.contains(&self.codec.encode(x))
    }

    pub fn element(&self, i: usize) -> Option<C::Item> {
        self.keys.get_index(i).map(|&k| self.codec.decode(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = C::Item> + '_ {
        self.keys.iter().map(|&k| self.codec.decode(k))
    }

    /// Adds `g` unless it already lies in the group; returns whether it was added.
    pub fn adjoin(&mut self, g: C::Item) -> Result<bool, GroupError> {
        if !self.codec.is_invertible(&g) {
            return Err(GroupError::NotInvertible);
        }
        if self.contains(&g) {
            return Ok(false);
        }
        let old = self.keys.len();
        for i in 0..old {
            let x = self.codec.decode(self.keys[i]);
            self.insert(self.codec.mul(&x, &g))?;
        }
        self.generators.push(g);
        let mut i = old;
        while i < self.keys.len() {
            let x = self.codec.decode(self.keys[i]);
            for j in 0..self.generators.len() {
                let y = self.codec.mul(&x, &self.generators[j]);
                self.insert(y)?;
            }
            i += 1;
        }
        Ok(true)
    }

    fn insert(&mut self, y: C::Item) -> Result<(), GroupError> {
        if self.keys.insert(self.codec.encode(&y)) && self.keys.len() > self.cap {
            return Err(GroupError::CapExceeded(self.cap));
        }
        Ok(())
    }
}

/// Breadth-first closure of `gens` under right multiplication.
pub fn generate_group<C: Codec>(codec: C, gens: &[C::Item], cap: usize) -> Result<GeneratedGroup<C>, GroupError> {
    if gens.iter().any(|g| !codec.is_invertible(g)) {
        return Err(GroupError::NotInvertible);
    }
    let mut group = GeneratedGroup::trivial(codec, cap);
    group.generators = gens.to_vec();
    let mut i = 0;
    while i < group.keys.len() {
        let x = group.codec.decode(group.keys[i]);
        for j in 0..group.generators.len() {
            let y = group.codec.mul(&x, &group.generators[j]);
            group.insert(y)?;
        }
        i += 1;
    }
    Ok(group)
}

/// Closure of a generator pool, skipping members already generated.
pub fn generate_from_pool<C: Codec>(
    codec: C,
    pool: impl IntoIterator<Item = C::Item>,
    cap: usize,
) -> Result<GeneratedGroup<C>, GroupError> {
    let mut group = GeneratedGroup::trivial(codec, cap);
    for g in pool {
        group.adjoin(g)?;
    }
    Ok(group)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    SU4,
    Ominus6,
    Ominus4,
    SOminus4,
    EOminus4,
    PSL2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::SU4,
        Family::Ominus6,
        Family::Ominus4,
        Family::SOminus4,
        Family::EOminus4,
        Family::PSL2,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SU4 => "SU4",
            Family::Ominus6 => "Ominus6",
            Family::Ominus4 => "Ominus4",
            Family::SOminus4 => "SOminus4",
            Family::EOminus4 => "EOminus4",
            Family::PSL2 => "PSL2",
        })
    }
}

impl FromStr for Family {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| GroupError::UnknownFamily(s.to_string()))
    }
}

/// Closed-form group orders. For `PSL2`, `e` is the order of the field.
pub fn order_formula(family: Family, e: u64) -> u128 {
    let e = e as u128;
    let e2 = e * e;
    let su4 = e2 * e2 * e2 * (e2 - 1) * (e2 * e + 1) * (e2 * e2 - 1);
    let so4 = e2 * (e2 + 1) * (e2 - 1);
    match family {
        Family::SU4 => su4,
        Family::Ominus6 => 2 * su4,
        Family::Ominus4 => 2 * so4,
        Family::SOminus4 => so4,
        Family::EOminus4 => so4 / 2,
        Family::PSL2 => e * (e2 - 1) / if e % 2 == 1 { 2 } else { 1 },
    }
}

/// All vectors of `F^n` in lexicographic order of element indices.
pub fn all_vectors<F: Field>(f: &F, n: usize) -> Vec<Vec<F::Elem>> {
    let els = f.elements().expect("finite field");
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                els.iter().map(move |e| {
                    let mut w = v.clone();
                    w.push(e.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn span_vectors<F: Field>(f: &F, basis: &[Vec<F::Elem>], n: usize) -> Vec<Vec<F::Elem>> {
    all_vectors(f, basis.len())
        .into_iter()
        .map(|c| {
            c.iter()
                .zip(basis)
                .fold(vec![f.zero(); n], |acc, (s, b)| vec_add(f, &acc, &vec_scale(f, b, s)))
        })
        .collect()
}

/// All linear isometries of a space over a finite field, by backtracking over
/// images of the standard basis.
pub fn enumerate_isometries<F: Field>(space: &HermitianSpace<F>) -> Vec<Matrix<F::Elem>> {
    let f = space.field();
    let n = space.dim();
    let vectors = all_vectors(f, n);
    let g = space.gram();
    let mut out = Vec::new();
    let mut cols: Vec<Vec<F::Elem>> = Vec::with_capacity(n);
    fn rec<F: Field>(
        space: &HermitianSpace<F>,
        vectors: &[Vec<F::Elem>],
        g: &Matrix<F::Elem>,
        cols: &mut Vec<Vec<F::Elem>>,
        out: &mut Vec<Matrix<F::Elem>>,
    ) {
        let i = cols.len();
        if i == space.dim() {
            let m = Matrix::from_cols(cols);
            if !space.field().is_zero(&m.det(space.field())) {
                out.push(m);
            }
            return;
        }
        for v in vectors {
            if space.evaluate_h(v, v) != *g.get(i, i) {
                continue;
            }
            if (0..i).all(|j| space.evaluate_h(&cols[j], v) == *g.get(j, i)) {
                cols.push(v.clone());
                rec(space, vectors, g, cols, out);
                cols.pop();
            }
        }
    }
    rec(space, &vectors, g, &mut cols, &mut out);
    out
}

/// `Σ_{z,0,p}` for all isotropic points `z` and nonzero `p` with `σ(p) = −p`.
pub fn isotropic_transvections(space: &HermitianSpace<FiniteField>) -> Result<Vec<SemiMap<Gf>>, GroupError> {
    let f = space.field();
    let zero = vec![f.zero(); space.dim()];
    let ps: Vec<Gf> = f
        .elements()
        .unwrap()
        .into_iter()
        .filter(|p| !f.is_zero(p) && f.is_zero(&f.trace(p)))
        .collect();
    let mut out = Vec::new();
    for z in projective_points(f, space.dim()) {
        if !space.is_isotropic_vector(&z) {
            continue;
        }
        for p in &ps {
            out.push(space.eichler(&z, &zero, p)?);
        }
    }
    Ok(out)
}

/// All non-identity `Σ_{z,w,p}` with `z` a normalized isotropic point.
pub fn eichler_pool(space: &HermitianSpace<FiniteField>) -> Result<Vec<SemiMap<Gf>>, GroupError> {
    let f = space.field();
    let n = space.dim();
    let els = f.elements().unwrap();
    let mut out = Vec::new();
    for z in projective_points(f, n) {
        if !space.is_isotropic_vector(&z) {
            continue;
        }
        let perp = space.orthogonal_complement(&[z.clone()]);
        for w in span_vectors(f, &perp, n) {
            let hw = space.evaluate_h(&w, &w);
            for p in els.iter().filter(|p| f.trace(p) == hw) {
                let m = space.eichler(&z, &w, p)?;
                if !m.is_identity(f) {
                    out.push(m);
                }
            }
        }
    }
    Ok(out)
}

/// The group generated by all Eichler transformations.
pub fn eo_subgroup(space: &HermitianSpace<FiniteField>, cap: usize) -> Result<GeneratedGroup<MapCodec>, GroupError> {
    let codec = MapCodec::new(space.field().clone(), space.dim())?;
    generate_from_pool(codec, eichler_pool(space)?, cap)
}

/// The special isometry group `{m : h(mx, my) = h(x, y), det m = 1}`, from the
/// isometry enumeration.
pub fn special_group(space: &HermitianSpace<FiniteField>, cap: usize) -> Result<GeneratedGroup<MapCodec>, GroupError> {
    let f = space.field();
    let codec = MapCodec::new(f.clone(), space.dim())?;
    let pool = enumerate_isometries(space)
        .into_iter()
        .filter(|m| f.is_one(&m.det(f)))
        .map(SemiMap::linear);
    generate_from_pool(codec, pool, cap)
}

fn check_homomorphism<C: Codec, D: Codec>(
    src: &C,
    dst: &D,
    gens: &[C::Item],
    images: &[D::Item],
    map: impl Fn(&C::Item) -> Result<D::Item, GroupError>,
) -> Result<(), GroupError> {
    for (a, ia) in gens.iter().zip(images) {
        for (b, ib) in gens.iter().zip(images) {
            let lhs = map(&src.mul(a, b))?;
            if dst.encode(&lhs) != dst.encode(&dst.mul(ia, ib)) {
                return Err(GroupError::NotHomomorphism);
            }
        }
    }
    Ok(())
}

/// `η(G)` as a group of `K`-semilinear maps of `W`.
pub fn image_under_eta(
    km: &KModule<FiniteField>,
    group: &GeneratedGroup<MapCodec>,
    cap: usize,
) -> Result<GeneratedGroup<KMapCodec>, GroupError> {
    let codec = KMapCodec::new(km.algebra().clone(), km.rank())?;
    let eta = |m: &SemiMap<Gf>| Ok(km.eta(m)?.map);
    let images = group.generators().iter().map(eta).collect::<Result<Vec<_>, GroupError>>()?;
    check_homomorphism(group.codec(), &codec, group.generators(), &images, eta)?;
    generate_group(codec, &images, cap)
}

/// `η^o(G)` as a group of matrices acting on `Wz` over the fixed field.
pub fn image_under_eta_o(
    km: &KModule<FiniteField>,
    group: &GeneratedGroup<MapCodec>,
    cap: usize,
) -> Result<GeneratedGroup<MatrixCodec>, GroupError> {
    let n = km.rank() * km.field().fixed_degree();
    let codec = MatrixCodec::over_fixed(km.field().clone(), n)?;
    let eta = |m: &SemiMap<Gf>| Ok(km.eta_o(m)?);
    let images = group.generators().iter().map(eta).collect::<Result<Vec<_>, GroupError>>()?;
    check_homomorphism(group.codec(), &codec, group.generators(), &images, eta)?;
    generate_group(codec, &images, cap)
}

/// Determinant over a commutative `K` by permutation expansion.
pub fn k_determinant<F: Field>(k: &KAlgebra<F>, m: &[Vec<KElem<F::Elem>>]) -> KElem<F::Elem> {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = k.zero();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let prod = (0..n).fold(k.one(), |acc, i| k.mul(&acc, &m[i][p[i]]));
        total = if inversions % 2 == 0 { k.add(&total, &prod) } else { k.sub(&total, &prod) };
    });
    total
}

fn permute(p: &mut Vec<usize>, i: usize, visit: &mut impl FnMut(&[usize])) {
    if i == p.len() {
        visit(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, visit);
        p.swap(i, j);
    }
}

/// `Σ_{Z,W,p}(X) = X + Z·g(W, X) − (W + Z·p)·g(Z, X)` on `W = Λ^ℓV`, over `B₁`.
pub fn g_eichler<F: Field>(
    km: &KModule<F>,
    z: &ExtVector<F::Elem>,
    w: &ExtVector<F::Elem>,
    p: &KElem<F::Elem>,
) -> Result<KSemilinearMap<F::Elem>, GroupError> {
    let k = km.algebra();
    let f = km.field();
    if !k.is_zero(&km.g_form(z, z)) || !k.is_zero(&km.g_form(z, w)) {
        return Err(GroupError::Precondition("g(Z, Z) and g(Z, W) must vanish"));
    }
    if k.add(&k.alpha(p), p) != km.g_form(w, w) {
        return Err(GroupError::Precondition("alpha(p) + p must equal g(W, W)"));
    }
    let wzp = w.add(f, &km.k_action(z, p));
    let cols: Vec<Vec<KElem<F::Elem>>> = km
        .b1_vectors()
        .iter()
        .map(|x| {
            let y = x
                .add(f, &km.k_action(z, &km.g_form(w, x)))
                .sub(f, &km.k_action(&wzp, &km.g_form(z, x)));
            km.to_k_coords(&y).coords
        })
        .collect();
    let r = km.rank();
    Ok(KSemilinearMap {
        matrix: (0..r).map(|i| (0..r).map(|c| cols[c][i].clone()).collect()).collect(),
        psi: KAutomorphism::identity(f),
    })
}

/// Eichler parameters `(Z, W, p)` on `W = Λ²V` with `η(Σ_{z,w,p}) = Σ_{Z,W,p}`.
#[derive(Clone, Debug)]
pub struct EichlerImage<E> {
    pub z: ExtVector<E>,
    pub w: ExtVector<E>,
    pub p: KElem<E>,
    pub image: KSemilinearMap<E>,
}

/// Predicts and verifies the image of an Eichler transformation.
///
/// For `σ = id`: `η(Σ_{z,w,½h(w,w)}) = Σ_{z∧w, z∧u, −½}` with
/// `v ∈ {z,w}^⊥ ∖ zF` and `u ∈ {w,v}^⊥`, `h(z,u) = 1`. For `σ ≠ id` and
/// `w = 0`: `η(Σ_{z,0,q})` is the transvection `Σ_{z∧w',0,p'}` for any
/// `w' ∈ z^⊥ ∖ zF` and some `p'` with `α(p') = −p'`, found by search over `K`.
pub fn eta_of_eichler<F: Field>(
    km: &KModule<F>,
    z: &[F::Elem],
    w: &[F::Elem],
    p: &F::Elem,
) -> Result<EichlerImage<F::Elem>, GroupError> {
    let space = km.hodge().space();
    let f = km.field();
    let k = km.algebra();
    if f.characteristic() == 2 || km.degree() != 2 || space.dim() != 4 {
        return Err(GroupError::Precondition("needs characteristic other than 2 and n = 4"));
    }
    let sigma = space.eichler(z, w, p)?;
    let actual = km.eta(&sigma)?.map;
    let n = space.dim();
    let not_on_z = |v: &&Vec<F::Elem>| Matrix::from_cols(&[z.to_vec(), (*v).clone()]).rank(f) == 2;
    if !f.has_sigma() {
        if f.is_zero(&space.evaluate_h(w, w)) {
            return Err(GroupError::Precondition("h(w, w) must be nonzero"));
        }
        let zw = [z.to_vec(), w.to_vec()];
        let xperp = space.orthogonal_complement(&zw);
        let v = xperp.iter().find(not_on_z).ok_or(GroupError::Precondition("no v"))?.clone();
        let uspace = space.orthogonal_complement(&[w.to_vec(), v]);
        let u0 = uspace
            .iter()
            .find(|u| !f.is_zero(&space.evaluate_h(z, u)))
            .ok_or(GroupError::Precondition("no u"))?;
        let u = vec_scale(f, u0, &f.inv(&space.evaluate_h(z, u0)).unwrap());
        let big_z = ExtVector::decomposable(f, &zw);
        let big_w = ExtVector::decomposable(f, &[z.to_vec(), u]);
        let half = k.scalar(f.neg(&f.inv(&f.from_int(2)).unwrap()));
        let predicted = g_eichler(km, &big_z, &big_w, &half)?;
        if predicted != actual {
            return Err(GroupError::EichlerMismatch);
        }
        return Ok(EichlerImage {
            z: big_z,
            w: big_w,
            p: half,
            image: actual,
        });
    }
    if !vec_is_zero(f, w) {
        return Err(GroupError::Precondition("the hermitian recipe needs w = 0"));
    }
    let perp = space.orthogonal_complement(&[z.to_vec()]);
    let w2 = perp.iter().find(not_on_z).ok_or(GroupError::Precondition("no w"))?.clone();
    let big_z = ExtVector::decomposable(f, &[z.to_vec(), w2]);
    let zero = ExtVector::zero(f, n, 2);
    let els = f.elements().ok_or(GroupError::Precondition("search needs a finite field"))?;
    for a in &els {
        for b in &els {
            let cand = KElem::new(a.clone(), b.clone());
            if !k.is_zero(&k.add(&k.alpha(&cand), &cand)) {
                continue;
            }
            if g_eichler(km, &big_z, &zero, &cand)? == actual {
                return Ok(EichlerImage {
                    z: big_z,
                    w: zero,
                    p: cand,
                    image: actual,
                });
            }
        }
    }
    Err(GroupError::EichlerMismatch)
}

fn reflect<F: Field>(space: &HermitianSpace<F>, u: &[F::Elem], x: &[F::Elem]) -> Vec<F::Elem> {
    let f = space.field();
    let c = f.div(&f.mul(&f.from_int(2), &space.evaluate_h(u, x)), &space.evaluate_h(u, u));
    vec_sub(f, x, &vec_scale(f, u, &c))
}

/// Vectors `u₁, …, u_k` with `m = ρ_{u₁} ∘ ⋯ ∘ ρ_{u_k}`.
pub fn reflection_decomposition<F: Field>(space: &HermitianSpace<F>, m: &Matrix<F::Elem>) -> Result<Vec<Vec<F::Elem>>, GroupError> {
    let f = space.field();
    if f.has_sigma() || f.characteristic() == 2 {
        return Err(GroupError::Precondition("needs sigma = id and characteristic other than 2"));
    }
    let class = space.classify_map(&SemiMap::linear(m.clone()))?;
    if class.kind != crate::forms::MapKind::Isometry {
        return Err(GroupError::Precondition("not an isometry"));
    }
    let n = space.dim();
    let mut cols: Vec<Vec<F::Elem>> = (0..n).map(|i| m.col(i)).collect();
    let mut out = Vec::new();
    let mut apply_reflection = |u: Vec<F::Elem>, cols: &mut Vec<Vec<F::Elem>>| {
        for c in cols.iter_mut() {
            *c = reflect(space, &u, c);
        }
        out.push(u);
    };
    for x in space.orthogonal_basis().vectors.clone() {
        let a = Matrix::from_cols(&cols);
        let ax = a.apply(f, &x);
        if ax == x {
            continue;
        }
        let d = vec_sub(f, &ax, &x);
        if !f.is_zero(&space.evaluate_h(&d, &d)) {
            apply_reflection(d, &mut cols);
        } else {
            apply_reflection(vec_add(f, &ax, &x), &mut cols);
            apply_reflection(x.clone(), &mut cols);
        }
    }
    debug_assert!(Matrix::from_cols(&cols).is_identity(f));
    Ok(out)
}

/// Square class of `∏ h(uᵢ, uᵢ)` over a reflection decomposition.
pub fn spinor_norm<F: Field>(space: &HermitianSpace<F>, m: &Matrix<F::Elem>) -> Result<F::Elem, GroupError> {
    let f = space.field();
    if !f.is_one(&m.det(f)) {
        return Err(GroupError::Precondition("determinant must be 1"));
    }
    let prod = reflection_decomposition(space, m)?
        .iter()
        .fold(f.one(), |acc, u| f.mul(&acc, &space.evaluate_h(u, u)));
    f.square_class(&prod).map_err(|_| GroupError::Precondition("square classes unavailable"))
}

/// `ρ_u` as a matrix.
pub fn reflection_matrix<F: Field>(space: &HermitianSpace<F>, u: &[F::Elem]) -> Matrix<F::Elem> {
    let f = space.field();
    let n = space.dim();
    Matrix::from_cols(&(0..n).map(|i| reflect(space, u, &unit_vector(f, n, i))).collect::<Vec<_>>())
}
