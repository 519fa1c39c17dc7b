//! Scalar fields carrying an involution `σ` with `σ² = id`.
//!
//! Three concrete families implement [`Field`]:
//!
//! * [`FiniteField`]: `𝔽_p` and `𝔽_{p²} = 𝔽_p[t]/(t² + a·t + b)` with the
//!   lexicographically smallest irreducible `(a, b)`. Elements are table indices
//!   `a₀ + a₁·p` for `a₀ + a₁·t`; `σ` is the identity or `x ↦ x^p`.
//! * [`Rationals`]: `ℚ` with `σ = id`.
//! * [`QuadraticField`]: `ℚ(√d)` for square-free `d`, with `σ` the identity or
//!   `√d ↦ -√d`. The generator `√d` is written `t`.
//!
//! The fixed field of `σ` is denoted `R`; it equals `F` when `σ = id`.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported field order {0}: only p and p² are available")]
    UnsupportedOrder(u64),
    #[error("field order {0} exceeds the table limit of 1024")]
    TooLarge(u64),
    #[error("{0} has no nontrivial involution")]
    NoInvolution(String),
    #[error("{0} is a rational square, so adjoining its root gives no extension")]
    SquareRadicand(i64),
    #[error("cannot parse {input:?} as an element of {field}")]
    Parse { input: String, field: String },
    #[error("{op} is not available over {field}")]
    Unsupported { op: &'static str, field: String },
    #[error("zero has no square class")]
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Involution {
    Identity,
    Galois,
}

/// Three-valued answer for questions that are only semi-decidable here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

impl Ternary {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Ternary::Yes
        } else {
            Ternary::No
        }
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ternary::Yes => "yes",
            Ternary::No => "no",
            Ternary::Unknown => "unknown",
        })
    }
}

/// A field with an involution. All arithmetic goes through the field handle.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// The involution `σ`.
    fn conj(&self, a: &Self::Elem) -> Self::Elem;
    fn involution(&self) -> Involution;
    /// Characteristic, `0` for fields containing `ℚ`.
    fn characteristic(&self) -> u64;
    fn order(&self) -> Option<u64>;
    /// All elements in canonical order, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    fn is_square(&self, a: &Self::Elem) -> bool;
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Whether `c` lies in `N(F^×) ∪ {0}`.
    fn is_norm(&self, c: &Self::Elem) -> Ternary;
    /// Some `s` with `σ(s)·s = c`, if one is found.
    fn norm_preimage(&self, c: &Self::Elem) -> Option<Self::Elem>;
    /// Canonical representative of `c·F^{×2}`.
    fn square_class(&self, c: &Self::Elem) -> Result<Self::Elem, ScalarError>;
    /// A canonical element outside `R` when `σ ≠ id`: trace zero in odd or zero
    /// characteristic, trace one in characteristic two.
    fn theta(&self) -> Option<Self::Elem>;
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, ScalarError>;
    fn name(&self) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// # Panics
    ///
    /// Panics if `b` is zero.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `N(x) = σ(x)·x`.
    fn norm(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.conj(a), a)
    }

    fn trace(&self, a: &Self::Elem) -> Self::Elem {
        self.add(a, &self.conj(a))
    }

    fn has_sigma(&self) -> bool {
        self.involution() == Involution::Galois
    }

    fn is_fixed(&self, a: &Self::Elem) -> bool {
        self.conj(a) == *a
    }

    /// `[F : R]`.
    fn fixed_degree(&self) -> usize {
        if self.has_sigma() {
            2
        } else {
            1
        }
    }

    /// Coordinates of `a` over `R` in the basis `1, θ`.
    fn fixed_coords(&self, a: &Self::Elem) -> Vec<Self::Elem> {
        match self.theta() {
            None => vec![a.clone()],
            Some(th) => {
                let r1 = self.div(&self.sub(a, &self.conj(a)), &self.sub(&th, &self.conj(&th)));
                let r0 = self.sub(a, &self.mul(&r1, &th));
                vec![r0, r1]
            }
        }
    }

    fn from_fixed_coords(&self, c: &[Self::Elem]) -> Self::Elem {
        match self.theta() {
            None => c[0].clone(),
            Some(th) => self.add(&c[0], &self.mul(&c[1], &th)),
        }
    }

    fn sum<'a, I>(&self, it: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        it.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Smallest `u` in canonical order with `u + σ(u) = 1`.
    fn trace_one(&self) -> Option<Self::Elem> {
        if !self.has_sigma() {
            return None;
        }
        if self.characteristic() != 2 {
            return Some(self.div(&self.one(), &self.from_int(2)));
        }
        self.elements()?.into_iter().find(|u| self.is_one(&self.trace(u)))
    }

    /// The element as a rational number, when the field is `ℚ`.
    fn to_rational(&self, _a: &Self::Elem) -> Option<BigRational> {
        None
    }
}

// ---------------------------------------------------------------------------
// Finite fields
// ---------------------------------------------------------------------------

/// Element of a [`FiniteField`], stored as its table index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf(pub u16);

struct Tables {
    p: u16,
    degree: u8,
    q: u16,
    /// `(a, b)` for the modulus `t² + a·t + b`.
    modulus: (u16, u16),
    involution: Involution,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
    sqrt: Vec<Option<u16>>,
    theta: Option<u16>,
    nonsquare: Option<u16>,
}

/// `𝔽_p` or `𝔽_{p²}` with table arithmetic.
#[derive(Clone)]
pub struct FiniteField {
    t: Arc<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.t.q == other.t.q && self.t.involution == other.t.involution
    }
}

impl FiniteField {
    /// Field of order `p` or `p²`.
    pub fn new(order: u64, involution: Involution) -> Result<Self, ScalarError> {
        if order > 1024 {
            return Err(ScalarError::TooLarge(order));
        }
        let (p, degree) = if arith::is_prime(order) {
            (order, 1u8)
        } else {
            let r = (order as f64).sqrt().round() as u64;
            if r * r != order {
                return Err(ScalarError::UnsupportedOrder(order));
            }
            if !arith::is_prime(r) {
                return Err(ScalarError::NotPrime(r));
            }
            (r, 2u8)
        };
        if degree == 1 && involution == Involution::Galois {
            return Err(ScalarError::NoInvolution(format!("F_{p}")));
        }
        let p = p as u16;
        let q = if degree == 1 { p } else { p * p };
        let modulus = if degree == 1 {
            (0, 0)
        } else {
            smallest_irreducible(p)
        };
        Ok(Self {
            t: Arc::new(build_tables(p, degree, q, modulus, involution)),
        })
    }

    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if !arith::is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Self::new(p, Involution::Identity)
    }

    pub fn p(&self) -> u64 {
        self.t.p as u64
    }

    pub fn size(&self) -> usize {
        self.t.q as usize
    }

    pub fn degree(&self) -> u32 {
        self.t.degree as u32
    }

    /// Coefficients `(a, b)` of the modulus `t² + a·t + b`.
    pub fn modulus(&self) -> (u64, u64) {
        (self.t.modulus.0 as u64, self.t.modulus.1 as u64)
    }

    /// The element `t`, for fields of order `p²`.
    pub fn generator(&self) -> Option<Gf> {
        (self.t.degree == 2).then_some(Gf(self.t.p))
    }

    /// Same field, different involution.
    pub fn with_involution(&self, involution: Involution) -> Result<Self, ScalarError> {
        Self::new(self.t.q as u64, involution)
    }

    /// `a₀ + a₁·t` from coefficients in `𝔽_p`; `a₁` is ignored over `𝔽_p`.
    pub fn from_coeffs(&self, a0: u64, a1: u64) -> Gf {
        let p = self.t.p as u64;
        let a1 = if self.t.degree == 2 { a1 % p } else { 0 };
        Gf((a0 % p + a1 * p) as u16)
    }

    pub fn coeffs(&self, a: Gf) -> (u64, u64) {
        let p = self.t.p as u64;
        ((a.0 as u64) % p, (a.0 as u64) / p)
    }

    fn idx2(&self, a: Gf, b: Gf) -> usize {
        a.0 as usize * self.t.q as usize + b.0 as usize
    }
}

fn smallest_irreducible(p: u16) -> (u16, u16) {
    let p32 = p as u32;
    for a in 0..p32 {
        for b in 1..p32 {
            let has_root = (0..p32).any(|x| (x * x + a * x + b) % p32 == 0);
            if !has_root {
                return (a as u16, b as u16);
            }
        }
    }
    unreachable!("every prime field has an irreducible quadratic")
}

fn build_tables(p: u16, degree: u8, q: u16, modulus: (u16, u16), involution: Involution) -> Tables {
    let pu = p as u32;
    let qs = q as usize;
    let split = |x: usize| ((x as u32) % pu, (x as u32) / pu);
    let join = |c0: u32, c1: u32| ((c0 % pu) + (c1 % pu) * pu) as u16;
    let (ma, mb) = (modulus.0 as u32, modulus.1 as u32);
    let mut add = vec![0u16; qs * qs];
    let mut mul = vec![0u16; qs * qs];
    for x in 0..qs {
        let (x0, x1) = split(x);
        for y in 0..qs {
            let (y0, y1) = split(y);
            add[x * qs + y] = join(x0 + y0, x1 + y1);
            // t² = -a·t - b
            let hi = x1 * y1 % pu;
            let c0 = x0 * y0 + (pu - mb % pu) % pu * hi;
            let c1 = x0 * y1 + x1 * y0 + (pu - ma % pu) % pu * hi;
            mul[x * qs + y] = if degree == 1 {
                ((x0 * y0) % pu) as u16
            } else {
                join(c0, c1)
            };
        }
    }
    let neg: Vec<u16> = (0..qs)
        .map(|x| (0..qs).find(|&y| add[x * qs + y] == 0).unwrap() as u16)
        .collect();
    let inv: Vec<u16> = (0..qs)
        .map(|x| {
            if x == 0 {
                0
            } else {
                (1..qs).find(|&y| mul[x * qs + y] == 1).unwrap() as u16
            }
        })
        .collect();
    let frob: Vec<u16> = (0..qs)
        .map(|x| {
            if involution == Involution::Identity {
                return x as u16;
            }
            let mut acc = 1usize;
            for _ in 0..p {
                acc = mul[acc * qs + x] as usize;
            }
            acc as u16
        })
        .collect();
    let mut sqrt = vec![None; qs];
    for y in 0..qs {
        let s = mul[y * qs + y] as usize;
        if sqrt[s].is_none() {
            sqrt[s] = Some(y as u16);
        }
    }
    let theta = if involution == Involution::Galois {
        (1..qs)
            .find(|&x| {
                let fx = frob[x] as usize;
                if p == 2 {
                    add[x * qs + fx] == 1
                } else {
                    add[x * qs + fx] == 0
                }
            })
            .map(|x| x as u16)
    } else {
        None
    };
    let nonsquare = (1..qs).find(|&x| sqrt[x].is_none()).map(|x| x as u16);
    Tables {
        p,
        degree,
        q,
        modulus,
        involution,
        add,
        mul,
        neg,
        inv,
        frob,
        sqrt,
        theta,
        nonsquare,
    }
}

impl Field for FiniteField {
    type Elem = Gf;

    fn zero(&self) -> Gf {
        Gf(0)
    }
    fn one(&self) -> Gf {
        Gf(1)
    }
    fn from_int(&self, n: i64) -> Gf {
        Gf(n.rem_euclid(self.t.p as i64) as u16)
    }
    fn add(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(self.t.add[self.idx2(*a, *b)])
    }
    fn neg(&self, a: &Gf) -> Gf {
        Gf(self.t.neg[a.0 as usize])
    }
    fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(self.t.mul[self.idx2(*a, *b)])
    }
    fn inv(&self, a: &Gf) -> Option<Gf> {
        (a.0 != 0).then(|| Gf(self.t.inv[a.0 as usize]))
    }
    fn conj(&self, a: &Gf) -> Gf {
        Gf(self.t.frob[a.0 as usize])
    }
    fn involution(&self) -> Involution {
        self.t.involution
    }
    fn characteristic(&self) -> u64 {
        self.t.p as u64
    }
    fn order(&self) -> Option<u64> {
        Some(self.t.q as u64)
    }
    fn elements(&self) -> Option<Vec<Gf>> {
        Some((0..self.t.q).map(Gf).collect())
    }
    fn is_square(&self, a: &Gf) -> bool {
        self.t.sqrt[a.0 as usize].is_some()
    }
    fn sqrt(&self, a: &Gf) -> Option<Gf> {
        self.t.sqrt[a.0 as usize].map(Gf)
    }
    fn is_norm(&self, c: &Gf) -> Ternary {
        if !self.is_fixed(c) {
            return Ternary::No;
        }
        if self.has_sigma() {
            // The norm of a finite extension of finite fields is surjective.
            return Ternary::Yes;
        }
        Ternary::from_bool(self.is_square(c))
    }
    fn norm_preimage(&self, c: &Gf) -> Option<Gf> {
        (0..self.t.q).map(Gf).find(|s| self.norm(s) == *c)
    }
    fn square_class(&self, c: &Gf) -> Result<Gf, ScalarError> {
        if c.0 == 0 {
            return Err(ScalarError::Zero);
        }
        Ok(if self.is_square(c) {
            Gf(1)
        } else {
            Gf(self.t.nonsquare.expect("a non-square exists"))
        })
    }
    fn theta(&self) -> Option<Gf> {
        self.t.theta.map(Gf)
    }
    fn random(&self, rng: &mut dyn RngCore) -> Gf {
        Gf(rng.gen_range(0..self.t.q))
    }
    fn format(&self, a: &Gf) -> String {
        let (c0, c1) = self.coeffs(*a);
        match (c1, c0) {
            (0, c0) => c0.to_string(),
            (1, 0) => "t".into(),
            (c1, 0) => format!("{c1}t"),
            (1, c0) => format!("t+{c0}"),
            (c1, c0) => format!("{c1}t+{c0}"),
        }
    }
    fn parse(&self, s: &str) -> Result<Gf, ScalarError> {
        let err = || ScalarError::Parse {
            input: s.to_string(),
            field: self.name(),
        };
        let p = BigInt::from(self.t.p);
        let mut acc = Gf(0);
        for (coef, power) in parse_terms(s).ok_or_else(err)? {
            if power == 1 && self.t.degree == 1 {
                return Err(err());
            }
            let den = coef.denom() % &p;
            if den.is_zero() {
                return Err(err());
            }
            let num = self.from_int((coef.numer() % &p).to_i64().ok_or_else(err)?);
            let den = self.from_int(den.to_i64().ok_or_else(err)?);
            let mut c = self.div(&num, &den);
            if power == 1 {
                c = self.mul(&c, &Gf(self.t.p));
            }
            acc = self.add(&acc, &c);
        }
        Ok(acc)
    }
    fn name(&self) -> String {
        let inv = match self.t.involution {
            Involution::Identity => "id".to_string(),
            Involution::Galois => format!("x^{}", self.t.p),
        };
        if self.t.degree == 1 {
            format!("F_{}", self.t.q)
        } else {
            let (a, b) = self.t.modulus;
            let lin = match a {
                0 => String::new(),
                1 => "+t".into(),
                a => format!("+{a}t"),
            };
            format!("F_{}[t^2{lin}+{b}] sigma={inv}", self.t.q)
        }
    }
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// `ℚ` with the identity involution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn format_rational(a: &BigRational) -> String {
    if a.denom().is_one() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

fn random_rational(rng: &mut dyn RngCore) -> BigRational {
    let n: i64 = rng.gen_range(-12..=12);
    let d: i64 = rng.gen_range(1..=6);
    rat(n, d)
}

impl Field for Rationals {
    type Elem = BigRational;

    fn to_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: i64) -> BigRational {
        rat(n, 1)
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn conj(&self, a: &BigRational) -> BigRational {
        a.clone()
    }
    fn involution(&self) -> Involution {
        Involution::Identity
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }
    fn is_square(&self, a: &BigRational) -> bool {
        arith::sqrt_rational(a).is_some()
    }
    fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        arith::sqrt_rational(a)
    }
    fn is_norm(&self, c: &BigRational) -> Ternary {
        Ternary::from_bool(self.is_square(c))
    }
    fn norm_preimage(&self, c: &BigRational) -> Option<BigRational> {
        self.sqrt(c)
    }
    fn square_class(&self, c: &BigRational) -> Result<BigRational, ScalarError> {
        if c.is_zero() {
            return Err(ScalarError::Zero);
        }
        arith::squarefree_part(&arith::integral_square_class(c))
            .map(BigRational::from_integer)
            .ok_or(ScalarError::Unsupported {
                op: "square class of an unfactorable rational",
                field: self.name(),
            })
    }
    fn theta(&self) -> Option<BigRational> {
        None
    }
    fn random(&self, rng: &mut dyn RngCore) -> BigRational {
        random_rational(rng)
    }
    fn format(&self, a: &BigRational) -> String {
        format_rational(a)
    }
    fn parse(&self, s: &str) -> Result<BigRational, ScalarError> {
        let err = || ScalarError::Parse {
            input: s.to_string(),
            field: self.name(),
        };
        let mut acc = BigRational::zero();
        for (coef, power) in parse_terms(s).ok_or_else(err)? {
            if power != 0 {
                return Err(err());
            }
            acc += coef;
        }
        Ok(acc)
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

// ---------------------------------------------------------------------------
// Quadratic number fields
// ---------------------------------------------------------------------------

/// `a + b·√d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QElem {
    pub a: BigRational,
    pub b: BigRational,
}

/// `ℚ(√d)` for a square-free integer `d ∉ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticField {
    d: i64,
    involution: Involution,
}

impl QuadraticField {
    pub fn new(d: i64, involution: Involution) -> Result<Self, ScalarError> {
        let db = BigInt::from(d);
        if d == 0 || arith::is_square_int(&db) {
            return Err(ScalarError::SquareRadicand(d));
        }
        let sf = arith::squarefree_part(&db).ok_or(ScalarError::Unsupported {
            op: "factoring the radicand",
            field: format!("Q(sqrt {d})"),
        })?;
        Ok(Self {
            d: sf.to_i64().expect("square-free part fits"),
            involution,
        })
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn elem(&self, a: BigRational, b: BigRational) -> QElem {
        QElem { a, b }
    }

    fn d(&self) -> BigRational {
        rat(self.d, 1)
    }

    /// `a² - d·b²`, the Galois norm, regardless of the chosen involution.
    pub fn galois_norm(&self, x: &QElem) -> BigRational {
        &x.a * &x.a - self.d() * &x.b * &x.b
    }
}

impl Field for QuadraticField {
    type Elem = QElem;

    fn zero(&self) -> QElem {
        QElem {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }
    fn one(&self) -> QElem {
        QElem {
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }
    fn from_int(&self, n: i64) -> QElem {
        QElem {
            a: rat(n, 1),
            b: BigRational::zero(),
        }
    }
    fn add(&self, x: &QElem, y: &QElem) -> QElem {
        QElem {
            a: &x.a + &y.a,
            b: &x.b + &y.b,
        }
    }
    fn neg(&self, x: &QElem) -> QElem {
        QElem {
            a: -&x.a,
            b: -&x.b,
        }
    }
    fn mul(&self, x: &QElem, y: &QElem) -> QElem {
        QElem {
            a: &x.a * &y.a + self.d() * &x.b * &y.b,
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }
    fn inv(&self, x: &QElem) -> Option<QElem> {
        let n = self.galois_norm(x);
        (!n.is_zero()).then(|| QElem {
            a: &x.a / &n,
            b: -&x.b / &n,
        })
    }
    fn conj(&self, x: &QElem) -> QElem {
        match self.involution {
            Involution::Identity => x.clone(),
            Involution::Galois => QElem {
                a: x.a.clone(),
                b: -&x.b,
            },
        }
    }
    fn involution(&self) -> Involution {
        self.involution
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn elements(&self) -> Option<Vec<QElem>> {
        None
    }
    fn is_square(&self, x: &QElem) -> bool {
        self.sqrt(x).is_some()
    }
    fn sqrt(&self, x: &QElem) -> Option<QElem> {
        if x.b.is_zero() {
            if let Some(r) = arith::sqrt_rational(&x.a) {
                return Some(QElem {
                    a: r,
                    b: BigRational::zero(),
                });
            }
            return arith::sqrt_rational(&(&x.a / self.d())).map(|r| QElem {
                a: BigRational::zero(),
                b: r,
            });
        }
        // (u + v√d)² = x forces u² + d·v² = a, 2uv = b and u² = (a ± m)/2, m² = N(x).
        let m = arith::sqrt_rational(&self.galois_norm(x))?;
        let two = rat(2, 1);
        for cand in [(&x.a + &m) / &two, (&x.a - &m) / &two] {
            if let Some(u) = arith::sqrt_rational(&cand) {
                if u.is_zero() {
                    continue;
                }
                let v = &x.b / (&two * &u);
                let r = QElem { a: u, b: v };
                if self.mul(&r, &r) == *x {
                    return Some(r);
                }
            }
        }
        None
    }
    fn is_norm(&self, c: &QElem) -> Ternary {
        if self.involution == Involution::Identity {
            return Ternary::from_bool(self.is_square(c));
        }
        if !c.b.is_zero() {
            return Ternary::No;
        }
        if c.a.is_zero() {
            return Ternary::Yes;
        }
        // Hasse norm theorem: c is a norm iff the Hilbert symbols (c, d)_v all vanish.
        let a = arith::integral_square_class(&c.a);
        let d = BigInt::from(self.d);
        match arith::relevant_places(&a, &d) {
            Some(places) => {
                Ternary::from_bool(places.into_iter().all(|v| arith::hilbert(&a, &d, v) == 1))
            }
            None => match self.norm_preimage(c) {
                Some(_) => Ternary::Yes,
                None => Ternary::Unknown,
            },
        }
    }
    fn norm_preimage(&self, c: &QElem) -> Option<QElem> {
        if self.involution == Involution::Identity {
            return self.sqrt(c);
        }
        if !c.b.is_zero() {
            return None;
        }
        const BOUND: i64 = 60;
        for z in 1..=BOUND {
            for y in 0..=BOUND {
                let zr = rat(z, 1);
                let yr = rat(y, 1);
                let rhs = &c.a * &zr * &zr + self.d() * &yr * &yr;
                if let Some(x) = arith::sqrt_rational(&rhs) {
                    return Some(QElem {
                        a: x / &zr,
                        b: yr / zr,
                    });
                }
            }
        }
        None
    }
    fn square_class(&self, _c: &QElem) -> Result<QElem, ScalarError> {
        Err(ScalarError::Unsupported {
            op: "canonical square classes",
            field: self.name(),
        })
    }
    fn theta(&self) -> Option<QElem> {
        (self.involution == Involution::Galois).then(|| QElem {
            a: BigRational::zero(),
            b: BigRational::one(),
        })
    }
    fn random(&self, rng: &mut dyn RngCore) -> QElem {
        QElem {
            a: random_rational(rng),
            b: random_rational(rng),
        }
    }
    fn format(&self, x: &QElem) -> String {
        let tpart = if x.b.is_one() {
            "t".to_string()
        } else if x.b == -BigRational::one() {
            "-t".to_string()
        } else {
            format!("{}*t", format_rational(&x.b))
        };
        match (x.a.is_zero(), x.b.is_zero()) {
            (_, true) => format_rational(&x.a),
            (true, false) => tpart,
            (false, false) => {
                if x.a.is_negative() {
                    format!("{tpart}{}", format_rational(&x.a))
                } else {
                    format!("{tpart}+{}", format_rational(&x.a))
                }
            }
        }
    }
    fn parse(&self, s: &str) -> Result<QElem, ScalarError> {
        let err = || ScalarError::Parse {
            input: s.to_string(),
            field: self.name(),
        };
        let mut acc = self.zero();
        for (coef, power) in parse_terms(s).ok_or_else(err)? {
            if power == 0 {
                acc.a += coef;
            } else {
                acc.b += coef;
            }
        }
        Ok(acc)
    }
    fn name(&self) -> String {
        let inv = match self.involution {
            Involution::Identity => "id",
            Involution::Galois => "galois",
        };
        format!("Q(sqrt {}) sigma={inv}", self.d)
    }
}

/// Splits `"3/2*t - 1/4 + t"` into `[(3/2, 1), (-1/4, 0), (1, 1)]`.
fn parse_terms(s: &str) -> Option<Vec<(BigRational, u8)>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('/') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    terms
        .into_iter()
        .map(|term| {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coef_str, power) = match body.strip_suffix('t') {
                Some(c) => (c.strip_suffix('*').unwrap_or(c), 1u8),
                None => (body, 0u8),
            };
            let coef = if coef_str.is_empty() {
                if power == 0 {
                    return None;
                }
                BigRational::one()
            } else {
                parse_rational(coef_str)?
            };
            Some((if neg { -coef } else { coef }, power))
        })
        .collect()
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

// ---------------------------------------------------------------------------
// Runtime selection
// ---------------------------------------------------------------------------

/// Description of a field as read from a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDescriptor {
    Finite { order: u64, involution: Involution },
    Rational,
    RationalQuadratic { d: i64, involution: Involution },
}

/// A constructed field of any supported family.
#[derive(Clone, Debug)]
pub enum AnyField {
    Finite(FiniteField),
    Rational(Rationals),
    Quadratic(QuadraticField),
}

pub fn make_field(desc: &FieldDescriptor) -> Result<AnyField, ScalarError> {
    Ok(match *desc {
        FieldDescriptor::Finite { order, involution } => {
            AnyField::Finite(FiniteField::new(order, involution)?)
        }
        FieldDescriptor::Rational => AnyField::Rational(Rationals),
        FieldDescriptor::RationalQuadratic { d, involution } => {
            AnyField::Quadratic(QuadraticField::new(d, involution)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(order: u64, inv: Involution) -> FiniteField {
        FiniteField::new(order, inv).unwrap()
    }

    #[test]
    fn nine_element_field_uses_t_squared_plus_one() {
        let k = f(9, Involution::Galois);
        assert_eq!(k.modulus(), (0, 1));
        let t = k.parse("t").unwrap();
        assert_eq!(k.mul(&t, &t), k.from_int(-1));
        assert_eq!(k.norm(&t), k.one());
        assert_eq!(k.format(&k.parse("t+1").unwrap()), "t+1");
        assert_eq!(k.theta(), Some(t));
    }

    #[test]
    fn four_element_field_trace_one() {
        let k = f(4, Involution::Galois);
        assert_eq!(k.modulus(), (1, 1));
        let u = k.trace_one().unwrap();
        assert_eq!(k.format(&u), "t");
        assert_eq!(k.theta(), Some(u));
    }

    #[test]
    fn norm_on_finite_fields_is_power_map() {
        for (q, p) in [(4u64, 2u64), (9, 3), (25, 5), (49, 7)] {
            let k = f(q, Involution::Galois);
            for x in k.elements().unwrap() {
                assert_eq!(k.norm(&x), k.pow(&x, p + 1));
                assert!(k.is_fixed(&k.norm(&x)));
            }
            let r: Vec<_> = k.elements().unwrap().into_iter().filter(|x| k.is_fixed(x)).collect();
            assert_eq!(r.len() as u64, p);
            for c in r.iter().filter(|c| !k.is_zero(c)) {
                assert_eq!(k.is_norm(c), Ternary::Yes);
                let s = k.norm_preimage(c).unwrap();
                assert_eq!(k.norm(&s), *c);
            }
        }
    }

    #[test]
    fn finite_field_axioms_exhaustive() {
        for q in [2u64, 3, 4, 5, 7, 9, 25] {
            let k = f(q, Involution::Identity);
            let els = k.elements().unwrap();
            for a in &els {
                if !k.is_zero(a) {
                    assert_eq!(k.mul(a, &k.inv(a).unwrap()), k.one());
                }
                for b in &els {
                    assert_eq!(k.add(a, b), k.add(b, a));
                    assert_eq!(k.mul(a, b), k.mul(b, a));
                    for c in &els {
                        assert_eq!(k.mul(a, &k.add(b, c)), k.add(&k.mul(a, b), &k.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn square_classes() {
        let f5 = f(5, Involution::Identity);
        assert_eq!(f5.square_class(&f5.from_int(4)).unwrap(), f5.one());
        assert_eq!(f5.square_class(&f5.from_int(3)).unwrap(), f5.from_int(2));
        let q = Rationals;
        assert_eq!(q.square_class(&rat(-100, 1)).unwrap(), rat(-1, 1));
        assert_eq!(q.square_class(&rat(36, 1)).unwrap(), rat(1, 1));
        assert_eq!(q.square_class(&rat(5, 2)).unwrap(), rat(10, 1));
        assert!(q.square_class(&rat(0, 1)).is_err());
        let f4 = f(4, Involution::Identity);
        for x in f4.elements().unwrap().iter().skip(1) {
            assert_eq!(f4.square_class(x).unwrap(), f4.one());
        }
    }

    #[test]
    fn involution_rules() {
        assert!(matches!(
            FiniteField::new(7, Involution::Galois),
            Err(ScalarError::NoInvolution(_))
        ));
        assert!(matches!(FiniteField::new(12, Involution::Identity), Err(ScalarError::UnsupportedOrder(12))));
        assert!(matches!(QuadraticField::new(4, Involution::Galois), Err(ScalarError::SquareRadicand(4))));
        assert_eq!(QuadraticField::new(-12, Involution::Galois).unwrap().radicand(), -3);
    }

    #[test]
    fn quadratic_norms_match_search() {
        // Hilbert-symbol answers agree with an explicit search for x² - d·y² = c.
        for d in [-1i64, 2, 3, 5, -3, 7] {
            let k = QuadraticField::new(d, Involution::Galois).unwrap();
            for c in -12i64..=12 {
                if c == 0 {
                    continue;
                }
                let ce = k.from_int(c);
                let found = k.norm_preimage(&ce);
                if let Some(s) = &found {
                    assert_eq!(k.norm(s), ce);
                }
                let ans = k.is_norm(&ce);
                assert_eq!(ans == Ternary::Yes, found.is_some(), "d={d} c={c}");
            }
        }
    }

    #[test]
    fn quadratic_square_roots() {
        let k = QuadraticField::new(2, Involution::Identity).unwrap();
        let x = k.parse("3+2*t").unwrap(); // (1 + √2)²
        let r = k.sqrt(&x).unwrap();
        assert_eq!(k.mul(&r, &r), x);
        assert!(!k.is_square(&k.parse("t").unwrap()));
        assert!(k.is_square(&k.from_int(2)));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let k = QuadraticField::new(-1, Involution::Galois).unwrap();
        for s in ["3/2*t+1/2", "-t-1/4", "t", "7", "-5/3*t"] {
            assert_eq!(k.format(&k.parse(s).unwrap()), s);
        }
        assert!(Rationals.parse("t").is_err());
        assert!(f(5, Involution::Identity).parse("t+1").is_err());
        assert_eq!(Rationals.parse(" -10 / 4 ").unwrap(), rat(-5, 2));
    }

    #[test]
    fn fixed_coordinates_recombine() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = QuadraticField::new(5, Involution::Galois).unwrap();
        for _ in 0..20 {
            let x = k.random(&mut rng);
            let c = k.fixed_coords(&x);
            assert!(c.iter().all(|y| k.is_fixed(y)));
            assert_eq!(k.from_fixed_coords(&c), x);
        }
        let f9 = f(9, Involution::Galois);
        for x in f9.elements().unwrap() {
            assert_eq!(f9.from_fixed_coords(&f9.fixed_coords(&x)), x);
        }
    }

    proptest! {
        #[test]
        fn conj_is_an_involutive_automorphism(a in 0u16..49, b in 0u16..49) {
            let k = f(49, Involution::Galois);
            let (a, b) = (Gf(a), Gf(b));
            prop_assert_eq!(k.conj(&k.conj(&a)), a);
            prop_assert_eq!(k.conj(&k.mul(&a, &b)), k.mul(&k.conj(&a), &k.conj(&b)));
            prop_assert_eq!(k.conj(&k.add(&a, &b)), k.add(&k.conj(&a), &k.conj(&b)));
        }

        #[test]
        fn quadratic_field_inverse(an in -30i64..30, ad in 1i64..8, bn in -30i64..30, bd in 1i64..8) {
            let k = QuadraticField::new(-7, Involution::Galois).unwrap();
            let x = k.elem(rat(an, ad), rat(bn, bd));
            prop_assume!(!k.is_zero(&x));
            prop_assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
            prop_assert_eq!(k.norm(&x), k.elem(k.galois_norm(&x), BigRational::zero()));
        }
    }
}
