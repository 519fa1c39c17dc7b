//! Integer helpers: trial factorisation, Legendre and Hilbert symbols.

use num::integer::Roots;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

const TRIAL_BOUND: u128 = 1_000_000;

/// Prime factorisation of `|n|` for `n != 0`.
///
/// Returns `None` when `|n|` does not fit in 128 bits or a cofactor remains
/// that trial division up to `10^6` cannot certify as prime.
pub(crate) fn factor(n: &BigInt) -> Option<Vec<(u128, u32)>> {
    let mut m = n.abs().to_u128()?;
    if m == 0 {
        return None;
    }
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p <= TRIAL_BOUND && p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if m <= TRIAL_BOUND * TRIAL_BOUND || p * p > m {
            out.push((m, 1));
        } else {
            let r = m.sqrt();
            if r * r == m {
                out.push((r, 2));
            } else {
                return None;
            }
        }
    }
    Some(out)
}

/// Square-free part of a nonzero integer, keeping its sign.
pub(crate) fn squarefree_part(n: &BigInt) -> Option<BigInt> {
    let mut s = BigInt::one();
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            s *= BigInt::from(p);
        }
    }
    Some(if n.is_negative() { -s } else { s })
}

/// Integer in the same square class as a nonzero rational.
pub(crate) fn integral_square_class(c: &BigRational) -> BigInt {
    c.numer() * c.denom()
}

pub(crate) fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub(crate) fn sqrt_rational(c: &BigRational) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let (n, d) = (c.numer(), c.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

pub(crate) fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(x) = a.checked_mul(b) {
        return x % m;
    }
    let (mut a, mut b, mut r) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    r
}

fn residue(n: &BigInt, p: u128) -> u128 {
    n.mod_floor(&BigInt::from(p)).to_u128().unwrap_or(0)
}

/// Legendre symbol of a unit modulo an odd prime.
fn legendre(u: &BigInt, p: u128) -> i32 {
    if pow_mod(residue(u, p), (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn split_valuation(n: &BigInt, p: u128) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut u = n.clone();
    let mut v = 0;
    while !u.is_zero() && (&u % &pb).is_zero() {
        u /= &pb;
        v += 1;
    }
    (v, u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Place {
    Infinite,
    Prime(u128),
}

/// Hilbert symbol `(a, b)_v` of two nonzero integers.
pub(crate) fn hilbert(a: &BigInt, b: &BigInt, place: Place) -> i32 {
    match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (al, u) = split_valuation(a, 2);
            let (be, v) = split_valuation(b, 2);
            let (u8_, v8) = (residue(&u, 8), residue(&v, 8));
            let eps = |r: u128| ((r - 1) / 2) & 1;
            let omega = |r: u128| ((r * r - 1) / 8) & 1;
            let e = eps(u8_) * eps(v8) + al as u128 * omega(v8) + be as u128 * omega(u8_);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (al, u) = split_valuation(a, p);
            let (be, v) = split_valuation(b, p);
            let mut s = if (al as u128 * be as u128 * ((p - 1) / 2)) % 2 == 0 {
                1
            } else {
                -1
            };
            if be % 2 == 1 {
                s *= legendre(&u, p);
            }
            if al % 2 == 1 {
                s *= legendre(&v, p);
            }
            s
        }
    }
}

/// Places at which `(a, b)_v` can be nontrivial. `None` if factoring fails.
pub(crate) fn relevant_places(a: &BigInt, b: &BigInt) -> Option<Vec<Place>> {
    let mut primes = vec![2u128];
    for n in [a, b] {
        for (p, _) in factor(n)? {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();
    let mut out = vec![Place::Infinite];
    out.extend(primes.into_iter().map(Place::Prime));
    Some(out)
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d: &u64| d * d <= n).all(|d| n % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn factors_small_numbers() {
        assert_eq!(factor(&bi(360)).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor(&bi(-97)).unwrap(), vec![(97, 1)]);
        assert_eq!(squarefree_part(&bi(-50)).unwrap(), bi(-2));
    }

    #[test]
    fn hilbert_symbol_known_values() {
        for &(a, b, p, expect) in &[
            (2, 5, 5u128, -1),
            (-1, -1, 2, -1),
            (-1, 5, 2, 1),
            (3, 3, 3, -1),
            (2, 3, 3, -1),
            (7, 5, 5, -1),
            (-1, 2, 2, 1),
        ] {
            assert_eq!(hilbert(&bi(a), &bi(b), Place::Prime(p)), expect, "({a},{b})_{p}");
        }
        assert_eq!(hilbert(&bi(-1), &bi(-3), Place::Infinite), -1);
    }

    #[test]
    fn hilbert_product_formula() {
        for a in [-30i64, -7, -2, -1, 2, 3, 5, 6, 10, 21] {
            for b in [-15i64, -5, -3, -1, 2, 7, 11, 14] {
                let places = relevant_places(&bi(a), &bi(b)).unwrap();
                let prod: i32 = places.iter().map(|&v| hilbert(&bi(a), &bi(b), v)).product();
                assert_eq!(prod, 1, "product formula for ({a},{b})");
            }
        }
    }
}
