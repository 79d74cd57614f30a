//! Exact arithmetic over the supported base fields: Q, Q(sqrt d), F_p and
//! F_{p^m}, together with square-class reduction, norms, traces and Galois
//! conjugation. All arithmetic is exact; there is no floating point anywhere.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

// ---------------------------------------------------------------------------
// F_p scalar helpers (p odd, p < 2^31 so products fit in u64 via u128)
// ---------------------------------------------------------------------------

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p { s - p } else { s }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b { a - b } else { a + p - b }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut base: u64, mut exp: u128, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulm(acc, base, p);
        }
        base = mulm(base, base, p);
        exp >>= 1;
    }
    acc
}

fn invm(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    powm(a, (p - 2) as u128, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // deterministic Miller-Rabin for u64
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Polynomial helpers over F_p, used for F_{p^m} arithmetic. Coefficients are
// stored low degree first.
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for i in 0..m.len() {
            let idx = shift + i;
            r[idx] = subm(r[idx], mulm(lead, m[i], p), p);
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_powmod(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic for poly_rem
        let lead = *b.last().unwrap();
        let li = invm(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| mulm(c, li, p)).collect();
        let r = poly_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid: returns s with s*a = gcd mod m (m monic), used for
/// inversion in F_p[x]/(m).
fn poly_invmod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), poly_rem(a, m, p));
    let (mut s0, mut s1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        // divide r0 by r1
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let lead_inv = invm(*r1.last().unwrap(), p);
        while rem.len() >= r1.len() && !rem.is_empty() {
            let c = mulm(*rem.last().unwrap(), lead_inv, p);
            let shift = rem.len() - r1.len();
            q[shift] = addm(q[shift], c, p);
            for i in 0..r1.len() {
                rem[shift + i] = subm(rem[shift + i], mulm(c, r1[i], p), p);
            }
            poly_trim(&mut rem);
        }
        poly_trim(&mut q);
        let s2 = {
            let qs1 = poly_mul(&q, &s1, p);
            let mut out = vec![0u64; s0.len().max(qs1.len())];
            for (i, &c) in s0.iter().enumerate() {
                out[i] = c;
            }
            for (i, &c) in qs1.iter().enumerate() {
                out[i] = subm(out[i], c, p);
            }
            poly_trim(&mut out);
            out
        };
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None; // not coprime
    }
    let c = invm(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&x| mulm(x, c, p)).collect();
    poly_trim(&mut out);
    Some(poly_rem(&out, m, p))
}

/// Rabin irreducibility test for a monic polynomial of degree m over F_p.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    let x = vec![0u64, 1];
    // x^{p^deg} == x mod f
    let mut t = x.clone();
    for _ in 0..deg {
        t = poly_powmod(&t, p as u128, f, p);
    }
    let mut diff = t.clone();
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = subm(diff[1], 1, p);
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // for each prime divisor q of deg: gcd(x^{p^{deg/q}} - x, f) == 1
    let mut d = deg;
    let mut primes = vec![];
    let mut q = 2;
    while q * q <= d {
        if d % q == 0 {
            primes.push(q);
            while d % q == 0 {
                d /= q;
            }
        }
        q += 1;
    }
    if d > 1 {
        primes.push(d);
    }
    for q in primes {
        let k = deg / q;
        let mut t = x.clone();
        for _ in 0..k {
            t = poly_powmod(&t, p as u128, f, p);
        }
        let mut diff = t.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = subm(diff[1], 1, p);
        poly_trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The deterministic canonical irreducible: the monic degree-m polynomial
/// whose coefficient vector (c_0, ..., c_{m-1}), read as a base-p integer
/// with c_{m-1} most significant, is smallest among all monic irreducibles.
pub(crate) fn canonical_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let mut coeffs = vec![0u64; m];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if poly_is_irreducible(&f, p) {
            return f;
        }
        // increment base-p counter, c_0 least significant
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < m, "no irreducible found (impossible)");
        }
    }
}

// ---------------------------------------------------------------------------
// Integer factorization for squarefree parts over Q
// ---------------------------------------------------------------------------

fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    // Brent's variant; n composite, odd, > 1
    let one = BigUint::one();
    let mut c = BigUint::from(1u32);
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = BigUint::from(2u32);
        let mut d = BigUint::one();
        let f = |v: &BigUint| (v * v + &c) % n;
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != one && &d != n {
            return d;
        }
        c += 1u32;
    }
}

pub(crate) fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: Vec<(BigUint, u32)> = vec![];
    let mut n = n.clone();
    let one = BigUint::one();
    if n <= one {
        return out;
    }
    // trial division by small primes first
    let push = |out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32| {
        if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            out.push((p, e));
        }
    };
    let mut d = 2u64;
    while d < 100_000 {
        let db = BigUint::from(d);
        if &db * &db > n {
            break;
        }
        let mut e = 0;
        while (&n % &db).is_zero() {
            n /= &db;
            e += 1;
        }
        if e > 0 {
            push(&mut out, db, e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == one {
            continue;
        }
        if is_prime_big(&m) {
            push(&mut out, m, 1);
            continue;
        }
        let f = pollard_rho(&m);
        let g = &m / &f;
        stack.push(f);
        stack.push(g);
    }
    out.sort();
    out
}

/// Squarefree part of a nonzero integer (keeps the sign).
pub(crate) fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let sign = if n.is_negative() { -1 } else { 1 };
    let mag = n.magnitude();
    let mut sf = BigUint::one();
    for (p, e) in factor_biguint(mag) {
        if e % 2 == 1 {
            sf *= p;
        }
    }
    BigInt::from(sf) * sign
}

// ---------------------------------------------------------------------------
// Field and FieldElement
// ---------------------------------------------------------------------------

/// One of the supported exact base fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    /// Q(sqrt d) with d squarefree, d != 0, 1.
    QuadExtOfRationals { d: BigInt },
    /// F_p with p an odd prime.
    PrimeField { p: u64 },
    /// F_{p^m}, m >= 2, with the canonical irreducible modulus.
    FiniteField { p: u64, m: u32, modulus: Vec<u64> },
}

impl Field {
    pub fn rationals() -> Field {
        Field::Rationals
    }

    pub fn quad_ext_of_rationals(d: i64) -> Result<Field> {
        let db = BigInt::from(d);
        if d == 0 || d == 1 {
            return Err(Error::InvalidField(format!(
                "d = {d} is not a valid quadratic extension parameter"
            )));
        }
        if squarefree_part(&db) != db {
            return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
        }
        Ok(Field::QuadExtOfRationals { d: db })
    }

    pub fn prime(p: u64) -> Result<Field> {
        if p == 2 {
            return Err(Error::InvalidField("characteristic 2 is rejected".into()));
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Field::PrimeField { p })
    }

    pub fn finite(p: u64, m: u32) -> Result<Field> {
        if p == 2 {
            return Err(Error::InvalidField("characteristic 2 is rejected".into()));
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("degree must be >= 1".into()));
        }
        if m == 1 {
            return Ok(Field::PrimeField { p });
        }
        if (p as f64).log2() * m as f64 > 62.0 {
            return Err(Error::InvalidField("field order exceeds the desk-scale limit".into()));
        }
        Ok(Field::FiniteField {
            p,
            m,
            modulus: canonical_irreducible(p, m),
        })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::PrimeField { .. } | Field::FiniteField { .. })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals | Field::QuadExtOfRationals { .. } => 0,
            Field::PrimeField { p } => *p,
            Field::FiniteField { p, .. } => *p,
        }
    }

    /// Number of elements, for finite fields.
    pub fn order(&self) -> Option<u128> {
        match self {
            Field::PrimeField { p } => Some(*p as u128),
            Field::FiniteField { p, m, .. } => Some((*p as u128).pow(*m)),
            _ => None,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            payload: match self {
                Field::Rationals => Payload::Rat(BigRational::zero()),
                Field::QuadExtOfRationals { .. } => Payload::Quad {
                    a: BigRational::zero(),
                    b: BigRational::zero(),
                },
                Field::PrimeField { .. } => Payload::Fp(0),
                Field::FiniteField { m, .. } => Payload::Fq(vec![0; *m as usize]),
            },
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        match self {
            Field::Rationals => FieldElement {
                field: self.clone(),
                payload: Payload::Rat(BigRational::from(BigInt::from(n))),
            },
            Field::QuadExtOfRationals { .. } => FieldElement {
                field: self.clone(),
                payload: Payload::Quad {
                    a: BigRational::from(BigInt::from(n)),
                    b: BigRational::zero(),
                },
            },
            Field::PrimeField { p } => FieldElement {
                field: self.clone(),
                payload: Payload::Fp((n.rem_euclid(*p as i64)) as u64),
            },
            Field::FiniteField { p, m, .. } => {
                let mut v = vec![0u64; *m as usize];
                v[0] = n.rem_euclid(*p as i64) as u64;
                FieldElement {
                    field: self.clone(),
                    payload: Payload::Fq(v),
                }
            }
        }
    }

    pub fn from_rational(&self, num: i64, den: i64) -> FieldElement {
        assert!(den != 0);
        match self {
            Field::Rationals => FieldElement {
                field: self.clone(),
                payload: Payload::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
            },
            Field::QuadExtOfRationals { .. } => FieldElement {
                field: self.clone(),
                payload: Payload::Quad {
                    a: BigRational::new(BigInt::from(num), BigInt::from(den)),
                    b: BigRational::zero(),
                },
            },
            _ => {
                let n = self.from_int(num);
                let d = self.from_int(den);
                n.div(&d)
            }
        }
    }

    /// An exact rational as a field element, over Q or Q(sqrt d).
    pub fn from_rational_big(&self, r: BigRational) -> FieldElement {
        match self {
            Field::Rationals => FieldElement {
                field: self.clone(),
                payload: Payload::Rat(r),
            },
            Field::QuadExtOfRationals { .. } => FieldElement {
                field: self.clone(),
                payload: Payload::Quad {
                    a: r,
                    b: BigRational::zero(),
                },
            },
            _ => panic!("from_rational_big requires characteristic zero"),
        }
    }

    /// a + b*sqrt(d) over Q(sqrt d).
    pub fn quad_elem(&self, a: BigRational, b: BigRational) -> FieldElement {
        assert!(matches!(self, Field::QuadExtOfRationals { .. }));
        FieldElement {
            field: self.clone(),
            payload: Payload::Quad { a, b },
        }
    }

    /// sqrt(d) in Q(sqrt d).
    pub fn sqrt_d(&self) -> FieldElement {
        self.quad_elem(BigRational::zero(), BigRational::one())
    }

    /// The generator x of F_{p^m} = F_p[x]/(modulus).
    pub fn fq_gen(&self) -> FieldElement {
        match self {
            Field::FiniteField { m, .. } => {
                let mut v = vec![0u64; *m as usize];
                v[1] = 1;
                FieldElement {
                    field: self.clone(),
                    payload: Payload::Fq(v),
                }
            }
            _ => panic!("fq_gen on a non-extension field"),
        }
    }

    pub fn fq_from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        match self {
            Field::FiniteField { p, m, .. } => {
                assert_eq!(coeffs.len(), *m as usize);
                FieldElement {
                    field: self.clone(),
                    payload: Payload::Fq(coeffs.iter().map(|&c| c % p).collect()),
                }
            }
            Field::PrimeField { p } => {
                assert_eq!(coeffs.len(), 1);
                FieldElement {
                    field: self.clone(),
                    payload: Payload::Fp(coeffs[0] % p),
                }
            }
            _ => panic!("fq_from_coeffs on an infinite field"),
        }
    }

    /// Deterministic enumeration of all elements of a finite field.
    pub fn elements(&self) -> Vec<FieldElement> {
        match self {
            Field::PrimeField { p } => (0..*p)
                .map(|v| FieldElement {
                    field: self.clone(),
                    payload: Payload::Fp(v),
                })
                .collect(),
            Field::FiniteField { p, m, .. } => {
                let m = *m as usize;
                let total = (*p as u128).pow(m as u32) as usize;
                let mut out = Vec::with_capacity(total);
                let mut coeffs = vec![0u64; m];
                for _ in 0..total {
                    out.push(FieldElement {
                        field: self.clone(),
                        payload: Payload::Fq(coeffs.clone()),
                    });
                    let mut i = 0;
                    while i < m {
                        coeffs[i] += 1;
                        if coeffs[i] < *p {
                            break;
                        }
                        coeffs[i] = 0;
                        i += 1;
                    }
                }
                out
            }
            _ => panic!("elements() on an infinite field"),
        }
    }

    /// The fixed least nonsquare of a finite field, in enumeration order.
    pub fn least_nonsquare(&self) -> FieldElement {
        assert!(self.is_finite());
        for x in self.elements() {
            if !x.is_zero() && !x.is_square() {
                return x;
            }
        }
        unreachable!("odd-order finite fields always have nonsquares")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Payload {
    Rat(BigRational),
    Quad { a: BigRational, b: BigRational },
    Fp(u64),
    Fq(Vec<u64>),
}

/// An exact scalar owned by one of the supported fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub(crate) field: Field,
    pub(crate) payload: Payload,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Rat(r) => write!(f, "{}", r),
            Payload::Quad { a, b } => write!(f, "{}+{}*sqrt", a, b),
            Payload::Fp(v) => write!(f, "{}", v),
            Payload::Fq(v) => write!(f, "{:?}", v),
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Rat(r) => r.is_zero(),
            Payload::Quad { a, b } => a.is_zero() && b.is_zero(),
            Payload::Fp(v) => *v == 0,
            Payload::Fq(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    fn check_field(&self, other: &FieldElement) {
        assert_eq!(self.field, other.field, "field mismatch in arithmetic");
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_field(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Rat(x), Payload::Rat(y)) => Payload::Rat(x + y),
            (Payload::Quad { a, b }, Payload::Quad { a: c, b: d }) => Payload::Quad {
                a: a + c,
                b: b + d,
            },
            (Payload::Fp(x), Payload::Fp(y)) => {
                let p = self.field.characteristic();
                Payload::Fp(addm(*x, *y, p))
            }
            (Payload::Fq(x), Payload::Fq(y)) => {
                let p = self.field.characteristic();
                Payload::Fq(x.iter().zip(y).map(|(&a, &b)| addm(a, b, p)).collect())
            }
            _ => unreachable!(),
        };
        FieldElement {
            field: self.field.clone(),
            payload,
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldElement {
        let payload = match &self.payload {
            Payload::Rat(x) => Payload::Rat(-x),
            Payload::Quad { a, b } => Payload::Quad { a: -a, b: -b },
            Payload::Fp(x) => {
                let p = self.field.characteristic();
                Payload::Fp(if *x == 0 { 0 } else { p - x })
            }
            Payload::Fq(x) => {
                let p = self.field.characteristic();
                Payload::Fq(x.iter().map(|&c| if c == 0 { 0 } else { p - c }).collect())
            }
        };
        FieldElement {
            field: self.field.clone(),
            payload,
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_field(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Rat(x), Payload::Rat(y)) => Payload::Rat(x * y),
            (Payload::Quad { a, b }, Payload::Quad { a: c, b: d }) => {
                let dd = match &self.field {
                    Field::QuadExtOfRationals { d } => BigRational::from(d.clone()),
                    _ => unreachable!(),
                };
                Payload::Quad {
                    a: a * c + &dd * b * d,
                    b: a * d + b * c,
                }
            }
            (Payload::Fp(x), Payload::Fp(y)) => {
                let p = self.field.characteristic();
                Payload::Fp(mulm(*x, *y, p))
            }
            (Payload::Fq(x), Payload::Fq(y)) => {
                let (p, m, modulus) = match &self.field {
                    Field::FiniteField { p, m, modulus } => (*p, *m as usize, modulus),
                    _ => unreachable!(),
                };
                let mut r = poly_rem(&poly_mul(x, y, p), modulus, p);
                r.resize(m, 0);
                Payload::Fq(r)
            }
            _ => unreachable!(),
        };
        FieldElement {
            field: self.field.clone(),
            payload,
        }
    }

    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero");
        let payload = match &self.payload {
            Payload::Rat(x) => Payload::Rat(x.recip()),
            Payload::Quad { a, b } => {
                let d = match &self.field {
                    Field::QuadExtOfRationals { d } => BigRational::from(d.clone()),
                    _ => unreachable!(),
                };
                let n = a * a - &d * b * b; // norm, nonzero since d is not a square
                Payload::Quad {
                    a: a / &n,
                    b: -(b / &n),
                }
            }
            Payload::Fp(x) => {
                let p = self.field.characteristic();
                Payload::Fp(invm(*x, p))
            }
            Payload::Fq(x) => {
                let (p, m, modulus) = match &self.field {
                    Field::FiniteField { p, m, modulus } => (*p, *m as usize, modulus),
                    _ => unreachable!(),
                };
                let mut r = poly_invmod(x, modulus, p).expect("nonzero element is invertible");
                r.resize(m, 0);
                Payload::Fq(r)
            }
        };
        FieldElement {
            field: self.field.clone(),
            payload,
        }
    }

    pub fn div(&self, other: &FieldElement) -> FieldElement {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> FieldElement {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_u128(&self, mut e: u128) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Exact square root, if one exists in the owning field.
    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match &self.payload {
            Payload::Rat(r) => sqrt_rational(r).map(|s| FieldElement {
                field: self.field.clone(),
                payload: Payload::Rat(s),
            }),
            Payload::Quad { a, b } => {
                let d = match &self.field {
                    Field::QuadExtOfRationals { d } => BigRational::from(d.clone()),
                    _ => unreachable!(),
                };
                let mk = |u: BigRational, v: BigRational| FieldElement {
                    field: self.field.clone(),
                    payload: Payload::Quad { a: u, b: v },
                };
                if b.is_zero() {
                    if let Some(u) = sqrt_rational(a) {
                        return Some(mk(u, BigRational::zero()));
                    }
                    if let Some(v) = sqrt_rational(&(a / &d)) {
                        return Some(mk(BigRational::zero(), v));
                    }
                    return None;
                }
                // (u + v sqrt(d))^2 = u^2 + d v^2 + 2uv sqrt(d)
                let norm = a * a - &d * b * b;
                let n = sqrt_rational(&norm)?;
                let two = BigRational::from(BigInt::from(2));
                for cand in [(a + &n) / &two, (a - &n) / &two] {
                    if let Some(u) = sqrt_rational(&cand) {
                        if u.is_zero() {
                            continue;
                        }
                        let v = b / (&two * &u);
                        let x = mk(u, v);
                        if &x.mul(&x) == self {
                            return Some(x);
                        }
                    }
                }
                None
            }
            Payload::Fp(_) | Payload::Fq(_) => {
                if !self.is_square() {
                    return None;
                }
                Some(tonelli_shanks(self))
            }
        }
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match &self.payload {
            Payload::Rat(_) | Payload::Quad { .. } => self.sqrt().is_some(),
            _ => {
                let q = self.field.order().unwrap();
                self.pow_u128((q - 1) / 2).is_one()
            }
        }
    }

    /// A deterministic encoding used for hashing, dedup and canonical-minimum
    /// selection. The induced order is fixed but otherwise arbitrary.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = vec![];
        let push_rat = |out: &mut Vec<u8>, r: &BigRational| {
            let (n, d) = (r.numer(), r.denom());
            out.push(match n.sign() {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            });
            let nb = n.magnitude().to_bytes_be();
            out.extend((nb.len() as u32).to_be_bytes());
            out.extend(nb);
            let db = d.magnitude().to_bytes_be();
            out.extend((db.len() as u32).to_be_bytes());
            out.extend(db);
        };
        match &self.payload {
            Payload::Rat(r) => push_rat(&mut out, r),
            Payload::Quad { a, b } => {
                push_rat(&mut out, a);
                push_rat(&mut out, b);
            }
            Payload::Fp(v) => out.extend(v.to_be_bytes()),
            Payload::Fq(v) => {
                for c in v {
                    out.extend(c.to_be_bytes());
                }
            }
        }
        out
    }

    /// Rational value, for elements of Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.payload {
            Payload::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Coordinates (a, b) with self = a + b*sqrt(d), for elements of Q(sqrt d).
    pub fn quad_coords(&self) -> Option<(&BigRational, &BigRational)> {
        match &self.payload {
            Payload::Quad { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn fp_value(&self) -> Option<u64> {
        match &self.payload {
            Payload::Fp(v) => Some(*v),
            _ => None,
        }
    }

    pub fn fq_coeffs(&self) -> Option<&[u64]> {
        match &self.payload {
            Payload::Fq(v) => Some(v),
            _ => None,
        }
    }
}

fn sqrt_rational(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let ns = n.sqrt();
    if &(&ns * &ns) != n {
        return None;
    }
    let ds = d.sqrt();
    if &(&ds * &ds) != d {
        return None;
    }
    Some(BigRational::new(BigInt::from(ns), BigInt::from(ds)))
}

/// Tonelli-Shanks over any supported finite field; assumes the input is a
/// nonzero square.
fn tonelli_shanks(x: &FieldElement) -> FieldElement {
    let q = x.field.order().unwrap();
    let mut t = q - 1;
    let mut s = 0u32;
    while t % 2 == 0 {
        t /= 2;
        s += 1;
    }
    if s == 1 {
        // q = 3 mod 4
        return x.pow_u128((q + 1) / 4);
    }
    let z = x.field.least_nonsquare();
    let mut c = z.pow_u128(t);
    let mut r = x.pow_u128((t + 1) / 2);
    let mut u = x.pow_u128(t);
    let mut m = s;
    while !u.is_one() {
        // find least i with u^(2^i) = 1
        let mut i = 0;
        let mut tmp = u.clone();
        while !tmp.is_one() {
            tmp = tmp.mul(&tmp);
            i += 1;
        }
        let b = c.pow_u128(1u128 << (m - i - 1));
        r = r.mul(&b);
        c = b.mul(&b);
        u = u.mul(&c);
        m = i;
    }
    r
}

// ---------------------------------------------------------------------------
// Norms, traces and Galois conjugation for the supported extensions
// ---------------------------------------------------------------------------

fn extension_degree(top: &Field, sub: &Field) -> Result<u32> {
    match (top, sub) {
        (Field::QuadExtOfRationals { .. }, Field::Rationals) => Ok(2),
        (Field::FiniteField { p, m, .. }, Field::PrimeField { p: p2 }) if p == p2 => Ok(*m),
        (Field::FiniteField { p, m, .. }, Field::FiniteField { p: p2, m: m2, .. })
            if p == p2 && m % m2 == 0 && m != m2 =>
        {
            Ok(m / m2)
        }
        _ => Err(Error::NotAnExtension),
    }
}

/// The nontrivial automorphism of a degree-2 extension (or the relative
/// Frobenius of F_{p^m} over the subfield of index 2).
pub fn galois_conj(z: &FieldElement, sub: &Field) -> Result<FieldElement> {
    let deg = extension_degree(&z.field, sub)?;
    if deg != 2 {
        return Err(Error::NotAnExtension);
    }
    match (&z.payload, sub) {
        (Payload::Quad { a, b }, Field::Rationals) => Ok(FieldElement {
            field: z.field.clone(),
            payload: Payload::Quad {
                a: a.clone(),
                b: -b,
            },
        }),
        (Payload::Fq(_), _) => {
            let p = z.field.characteristic();
            let half = match &z.field {
                Field::FiniteField { m, .. } => m / 2,
                _ => unreachable!(),
            };
            Ok(z.pow_u128((p as u128).pow(half)))
        }
        _ => Err(Error::NotAnExtension),
    }
}

/// N_{top/sub}(z): the product of all Galois conjugates. The result is
/// returned as an element of `sub`.
pub fn norm(z: &FieldElement, sub: &Field) -> Result<FieldElement> {
    let _ = extension_degree(&z.field, sub)?;
    match (&z.payload, sub) {
        (Payload::Quad { a, b }, Field::Rationals) => {
            let d = match &z.field {
                Field::QuadExtOfRationals { d } => BigRational::from(d.clone()),
                _ => unreachable!(),
            };
            Ok(FieldElement {
                field: Field::Rationals,
                payload: Payload::Rat(a * a - &d * b * b),
            })
        }
        (Payload::Fq(_), Field::PrimeField { p }) => {
            let q = z.field.order().unwrap();
            // z^{(q-1)/(p-1)}; zero maps to zero
            if z.is_zero() {
                return Ok(sub.zero());
            }
            let e = (q - 1) / (*p as u128 - 1);
            let n = z.pow_u128(e);
            let coeffs = n.fq_coeffs().unwrap();
            assert!(coeffs[1..].iter().all(|&c| c == 0), "norm must land in F_p");
            Ok(FieldElement {
                field: sub.clone(),
                payload: Payload::Fp(coeffs[0]),
            })
        }
        _ => Err(Error::NotAnExtension),
    }
}

/// Tr_{top/sub}(z), same conventions as `norm`.
pub fn trace(z: &FieldElement, sub: &Field) -> Result<FieldElement> {
    let deg = extension_degree(&z.field, sub)?;
    match (&z.payload, sub) {
        (Payload::Quad { a, .. }, Field::Rationals) => Ok(FieldElement {
            field: Field::Rationals,
            payload: Payload::Rat(a + a),
        }),
        (Payload::Fq(_), Field::PrimeField { p }) => {
            let mut acc = z.field.zero();
            let mut t = z.clone();
            for _ in 0..deg {
                acc = acc.add(&t);
                t = t.pow_u128(*p as u128);
            }
            let coeffs = acc.fq_coeffs().unwrap();
            assert!(coeffs[1..].iter().all(|&c| c == 0), "trace must land in F_p");
            Ok(FieldElement {
                field: sub.clone(),
                payload: Payload::Fp(coeffs[0]),
            })
        }
        _ => Err(Error::NotAnExtension),
    }
}

// ---------------------------------------------------------------------------
// Square classes
// ---------------------------------------------------------------------------

/// An element of k*/k*^2, stored through a canonical representative.
#[derive(Clone, Debug)]
pub struct SquareClass {
    field: Field,
    rep: FieldElement,
}

impl SquareClass {
    pub fn new(x: &FieldElement) -> Result<SquareClass> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        let rep = match &x.payload {
            Payload::Rat(r) => {
                // squarefree integer with the sign of x
                let prod = r.numer() * r.denom();
                FieldElement {
                    field: x.field.clone(),
                    payload: Payload::Rat(BigRational::from(squarefree_part(&prod))),
                }
            }
            Payload::Quad { a, b } => {
                // Scale by a rational square so the coordinates become
                // integers with square-free common content. The sign of the
                // leading coordinate is a class property and is kept as is.
                let den_l = a.denom().lcm(b.denom());
                let t = BigRational::from(den_l);
                let t2 = &t * &t;
                let ai = (a * &t2).to_integer();
                let bi = (b * &t2).to_integer();
                let g = ai.gcd(&bi);
                let mut s = BigInt::one();
                for (p, e) in factor_biguint(g.magnitude()) {
                    if e >= 2 {
                        s *= BigInt::from(p).pow(e / 2);
                    }
                }
                let s2 = BigRational::from(&s * &s);
                FieldElement {
                    field: x.field.clone(),
                    payload: Payload::Quad {
                        a: BigRational::from(ai) / &s2,
                        b: BigRational::from(bi) / &s2,
                    },
                }
            }
            Payload::Fp(_) | Payload::Fq(_) => {
                if x.is_square() {
                    x.field.one()
                } else {
                    x.field.least_nonsquare()
                }
            }
        };
        Ok(SquareClass {
            field: x.field.clone(),
            rep,
        })
    }

    pub fn trivial(field: &Field) -> SquareClass {
        SquareClass::new(&field.one()).unwrap()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn representative(&self) -> &FieldElement {
        &self.rep
    }

    pub fn is_trivial(&self) -> bool {
        self.rep.is_square()
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        SquareClass::new(&self.rep.mul(&other.rep)).unwrap()
    }

    pub fn inv(&self) -> SquareClass {
        // every class has order dividing 2
        self.clone()
    }
}

impl PartialEq for SquareClass {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rep.div(&other.rep).is_square()
    }
}

impl Eq for SquareClass {}
