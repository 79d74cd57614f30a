//! The quadratic extension Z = k(sqrt(delta)) of a base field, used for the
//! discriminant extension of an even-dimensional quadratic space. Elements
//! are stored as coordinate pairs a + b*sqrt(delta). The construction is
//! rejected when delta is a square (the split etale case is out of scope).

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExt {
    base: Field,
    delta: FieldElement,
}

impl QuadExt {
    pub fn new(base: &Field, delta: &FieldElement) -> Result<QuadExt> {
        if delta.is_zero() {
            return Err(Error::ZeroInput);
        }
        if delta.is_square() {
            return Err(Error::SplitDiscriminant);
        }
        Ok(QuadExt {
            base: base.clone(),
            delta: delta.clone(),
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn delta(&self) -> &FieldElement {
        &self.delta
    }

    pub fn zero(&self) -> ZElem {
        ZElem {
            ext: self.clone(),
            a: self.base.zero(),
            b: self.base.zero(),
        }
    }

    pub fn one(&self) -> ZElem {
        self.from_base(&self.base.one())
    }

    pub fn from_base(&self, a: &FieldElement) -> ZElem {
        ZElem {
            ext: self.clone(),
            a: a.clone(),
            b: self.base.zero(),
        }
    }

    pub fn new_elem(&self, a: FieldElement, b: FieldElement) -> ZElem {
        ZElem {
            ext: self.clone(),
            a,
            b,
        }
    }

    /// sqrt(delta) as an element of Z.
    pub fn gen(&self) -> ZElem {
        ZElem {
            ext: self.clone(),
            a: self.base.zero(),
            b: self.base.one(),
        }
    }

    /// All elements, for finite base fields.
    pub fn elements(&self) -> Vec<ZElem> {
        let base_elems = self.base.elements();
        let mut out = Vec::with_capacity(base_elems.len() * base_elems.len());
        for a in &base_elems {
            for b in &base_elems {
                out.push(self.new_elem(a.clone(), b.clone()));
            }
        }
        out
    }

    /// All nonzero elements, for finite base fields.
    pub fn units(&self) -> Vec<ZElem> {
        self.elements().into_iter().filter(|z| !z.is_zero()).collect()
    }
}

/// An element a + b*sqrt(delta) of Z.
#[derive(Clone, PartialEq, Eq)]
pub struct ZElem {
    ext: QuadExt,
    a: FieldElement,
    b: FieldElement,
}

impl std::fmt::Debug for ZElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?} + {:?} w)", self.a, self.b)
    }
}

impl ZElem {
    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn coords(&self) -> (&FieldElement, &FieldElement) {
        (&self.a, &self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True iff the element lies in the base field k.
    pub fn in_base(&self) -> bool {
        self.b.is_zero()
    }

    fn check(&self, other: &ZElem) {
        assert_eq!(self.ext, other.ext, "extension mismatch");
    }

    pub fn add(&self, other: &ZElem) -> ZElem {
        self.check(other);
        self.ext
            .new_elem(self.a.add(&other.a), self.b.add(&other.b))
    }

    pub fn sub(&self, other: &ZElem) -> ZElem {
        self.check(other);
        self.ext
            .new_elem(self.a.sub(&other.a), self.b.sub(&other.b))
    }

    pub fn neg(&self) -> ZElem {
        self.ext.new_elem(self.a.neg(), self.b.neg())
    }

    pub fn mul(&self, other: &ZElem) -> ZElem {
        self.check(other);
        let d = &self.ext.delta;
        let a = self.a.mul(&other.a).add(&d.mul(&self.b.mul(&other.b)));
        let b = self.a.mul(&other.b).add(&self.b.mul(&other.a));
        self.ext.new_elem(a, b)
    }

    pub fn scale(&self, c: &FieldElement) -> ZElem {
        self.ext.new_elem(self.a.mul(c), self.b.mul(c))
    }

    /// The nontrivial automorphism of Z/k.
    pub fn conj(&self) -> ZElem {
        self.ext.new_elem(self.a.clone(), self.b.neg())
    }

    /// N_{Z/k}: z * conj(z), as an element of k.
    pub fn norm(&self) -> FieldElement {
        self.a
            .mul(&self.a)
            .sub(&self.ext.delta.mul(&self.b.mul(&self.b)))
    }

    pub fn trace(&self) -> FieldElement {
        self.a.add(&self.a)
    }

    pub fn inv(&self) -> ZElem {
        assert!(!self.is_zero());
        let n = self.norm();
        assert!(!n.is_zero(), "delta is a nonsquare, so norms of nonzero elements are nonzero");
        let ni = n.inv();
        self.ext.new_elem(self.a.mul(&ni), self.b.neg().mul(&ni))
    }

    pub fn div(&self, other: &ZElem) -> ZElem {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> ZElem {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = self.ext.one();
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

    /// Exact square root in Z, if one exists.
    pub fn sqrt(&self) -> Option<ZElem> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let k = &self.ext.base;
        let d = &self.ext.delta;
        if self.b.is_zero() {
            if let Some(u) = self.a.sqrt() {
                return Some(self.ext.from_base(&u));
            }
            if let Some(v) = self.a.div(d).sqrt() {
                return Some(self.ext.new_elem(k.zero(), v));
            }
            return None;
        }
        // (u + v w)^2 = u^2 + d v^2 + 2uv w
        let n = self.norm().sqrt()?;
        let two = k.from_int(2);
        for cand in [self.a.add(&n).div(&two), self.a.sub(&n).div(&two)] {
            if let Some(u) = cand.sqrt() {
                if u.is_zero() {
                    continue;
                }
                let v = self.b.div(&two.mul(&u));
                let x = self.ext.new_elem(u, v);
                if &x.mul(&x) == self {
                    return Some(x);
                }
            }
        }
        None
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// All fourth roots of the element in Z (zero to four of them).
    pub fn fourth_roots(&self) -> Vec<ZElem> {
        let mut out = vec![];
        if let Some(s) = self.sqrt() {
            for cand in [s.clone(), s.neg()] {
                if let Some(r) = cand.sqrt() {
                    for x in [r.clone(), r.neg()] {
                        if !out.contains(&x) {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = self.a.canonical_key();
        out.extend(self.b.canonical_key());
        out
    }
}
