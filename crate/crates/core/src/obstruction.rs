//! The groups U and U_0 with U/U_0 as first Galois cohomology of mu_4
//! twisted by the discriminant extension, the maps S, i, j between the
//! square-class column and the similitude row, special-element testing, and
//! extraction of the scalar obstruction alpha together with the
//! spinor-norm decision on it.

use crate::brauer::{local_spinor_norm_classes, local_square_class_rep, Place};
use crate::clifford::{lift_similitude_to_omega, CliffordAlgebra};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, SquareClass};
use crate::quadext::{QuadExt, ZElem};
use crate::quadform::QuadSpace;
use crate::similitude::{find_similitude_with_multiplier, PGOPlusClass, Similitude, SimilitudeSearch};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// A point of U(k) = {(f, z) in k* x Z* : f^4 = N_{Z/k}(z)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoint {
    f: FieldElement,
    z: ZElem,
}

impl UPoint {
    pub fn new(f: FieldElement, z: ZElem) -> Result<UPoint> {
        if f.is_zero() || z.is_zero() {
            return Err(Error::ZeroInput);
        }
        if f.pow(4) != z.norm() {
            return Err(Error::NotInU);
        }
        Ok(UPoint { f, z })
    }

    pub fn one(ext: &QuadExt) -> UPoint {
        UPoint {
            f: ext.base().one(),
            z: ext.one(),
        }
    }

    pub fn f(&self) -> &FieldElement {
        &self.f
    }

    pub fn z(&self) -> &ZElem {
        &self.z
    }

    pub fn ext(&self) -> &QuadExt {
        self.z.ext()
    }

    pub fn mul(&self, other: &UPoint) -> UPoint {
        UPoint {
            f: self.f.mul(&other.f),
            z: self.z.mul(&other.z),
        }
    }

    pub fn inv(&self) -> UPoint {
        UPoint {
            f: self.f.inv(),
            z: self.z.inv(),
        }
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = self.f.canonical_key();
        out.extend(self.z.canonical_key());
        out
    }
}

/// All points of U over a finite base field, by enumeration.
pub fn enumerate_u(ext: &QuadExt) -> Vec<UPoint> {
    let mut out = vec![];
    let base_units: Vec<FieldElement> = ext
        .base()
        .elements()
        .into_iter()
        .filter(|x| !x.is_zero())
        .collect();
    for z in ext.units() {
        let n = z.norm();
        for f in &base_units {
            if f.pow(4) == n {
                out.push(UPoint {
                    f: f.clone(),
                    z: z.clone(),
                });
            }
        }
    }
    out
}

/// All points of U_0 = {(N(z_0), z_0^4)} over a finite base field.
pub fn enumerate_u0(ext: &QuadExt) -> Vec<UPoint> {
    let mut out: Vec<UPoint> = vec![];
    for z0 in ext.units() {
        let p = UPoint {
            f: z0.norm(),
            z: z0.pow(4),
        };
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// A class in U/U_0. Equality tests whether the quotient pair lies in U_0,
/// i.e. whether z/z' has a fourth root of norm f/f'. Over finite fields the
/// stored representative is canonicalized by minimizing over U_0.
#[derive(Clone, Debug)]
pub struct UClass {
    rep: UPoint,
}

impl UClass {
    pub fn new(p: UPoint) -> UClass {
        if p.ext().base().is_finite() {
            let mut best = p.clone();
            let mut best_key = p.canonical_key();
            for u0 in enumerate_u0(p.ext()) {
                let cand = p.mul(&u0);
                let key = cand.canonical_key();
                if key < best_key {
                    best_key = key;
                    best = cand;
                }
            }
            UClass { rep: best }
        } else {
            UClass { rep: p }
        }
    }

    pub fn representative(&self) -> &UPoint {
        &self.rep
    }

    pub fn mul(&self, other: &UClass) -> UClass {
        UClass::new(self.rep.mul(&other.rep))
    }

    pub fn inv(&self) -> UClass {
        UClass::new(self.rep.inv())
    }

    pub fn is_trivial(&self) -> bool {
        *self == UClass::new(UPoint::one(self.rep.ext()))
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        self.rep.canonical_key()
    }
}

impl PartialEq for UClass {
    fn eq(&self, other: &UClass) -> bool {
        // the quotient lies in U_0 iff z/z' has a fourth root of norm f/f'
        let q = self.rep.mul(&other.rep.inv());
        q.z.fourth_roots().iter().any(|r| r.norm() == q.f)
    }
}

impl Eq for UClass {}

/// A class in Z*/Z*^2.
#[derive(Clone, Debug)]
pub struct ZSquareClass {
    rep: ZElem,
}

impl ZSquareClass {
    pub fn new(rep: ZElem) -> Result<ZSquareClass> {
        if rep.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(ZSquareClass { rep })
    }

    pub fn representative(&self) -> &ZElem {
        &self.rep
    }

    pub fn mul(&self, other: &ZSquareClass) -> ZSquareClass {
        ZSquareClass {
            rep: self.rep.mul(&other.rep),
        }
    }

    pub fn inv(&self) -> ZSquareClass {
        ZSquareClass {
            rep: self.rep.inv(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rep.is_square()
    }
}

impl PartialEq for ZSquareClass {
    fn eq(&self, other: &ZSquareClass) -> bool {
        self.rep.div(&other.rep).is_square()
    }
}

impl Eq for ZSquareClass {}

/// The value of S (and the theta inputs): a U-class for n odd, a Z-square
/// class for n even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SClass {
    Odd(UClass),
    Even(ZSquareClass),
}

impl SClass {
    pub fn mul(&self, other: &SClass) -> SClass {
        match (self, other) {
            (SClass::Odd(a), SClass::Odd(b)) => SClass::Odd(a.mul(b)),
            (SClass::Even(a), SClass::Even(b)) => SClass::Even(a.mul(b)),
            _ => panic!("parity mismatch"),
        }
    }

    pub fn inv(&self) -> SClass {
        match self {
            SClass::Odd(a) => SClass::Odd(a.inv()),
            SClass::Even(a) => SClass::Even(a.inv()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            SClass::Odd(a) => a.is_trivial(),
            SClass::Even(a) => a.is_trivial(),
        }
    }
}

/// Solve z0 / conj(z0) = u for a norm-one u (Hilbert 90), in closed form:
/// z0 = 1 + u unless u = -1, where z0 = sqrt(delta) works.
pub fn hilbert90(u: &ZElem) -> Result<ZElem> {
    if u.is_zero() || !u.norm().is_one() {
        return Err(Error::Hilbert90Failure);
    }
    let ext = u.ext().clone();
    let z0 = ext.one().add(u);
    let z0 = if z0.is_zero() { ext.gen() } else { z0 };
    debug_assert_eq!(z0.div(&z0.conj()), *u);
    Ok(z0)
}

/// Outcome of the special-element test.
#[derive(Clone, Debug)]
pub enum SpecialResult {
    Special(Similitude),
    NotSpecial,
    Unknown,
}

/// A sound spinor-norm decision.
#[derive(Clone, Debug)]
pub enum SpinorNormDecision {
    /// Certificate: vectors whose q-values multiply to the class.
    Yes(Vec<Vec<FieldElement>>),
    No(NoWitness),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoWitness {
    /// Definite form over Q: all spinor norms are positive.
    DefiniteSign,
    /// The class is missing from the local spinor norm group at a place.
    LocalPlace(Place),
    /// Finite field: exhaustive enumeration excluded the class.
    FiniteExhaustion,
}

/// Shared context for the obstruction machinery on one even-dimensional
/// space with field discriminant extension.
pub struct ObstructionContext {
    space: QuadSpace,
    algebra: CliffordAlgebra,
    ext: QuadExt,
}

impl ObstructionContext {
    pub fn new(space: QuadSpace) -> Result<ObstructionContext> {
        let algebra = CliffordAlgebra::new(space.clone())?;
        let ext = algebra.discriminant_ext()?;
        Ok(ObstructionContext {
            space,
            algebra,
            ext,
        })
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn algebra(&self) -> &CliffordAlgebra {
        &self.algebra
    }

    /// n odd (dim = 2 mod 4) selects the U-side maps; n even the Z-side.
    pub fn n_is_odd(&self) -> bool {
        self.space.dim() % 4 == 2
    }

    /// S: PGO+ class to U/U_0 (n odd) or Z*/Z*^2 (n even), via the
    /// extended Clifford lift.
    pub fn s_of(&self, class: &PGOPlusClass) -> Result<SClass> {
        let omega = lift_similitude_to_omega(class.representative())?;
        if self.n_is_odd() {
            let (f, z) = omega.mu_star()?;
            Ok(SClass::Odd(UClass::new(UPoint::new(f, z)?)))
        } else {
            let z = omega.mu_bar()?;
            Ok(SClass::Even(ZSquareClass::new(z)?))
        }
    }

    /// i: k*/k*^2 into the middle column. n odd: f maps to [f, f^2];
    /// n even: the inclusion into Z*/Z*^2.
    pub fn i_map(&self, alpha: &SquareClass) -> Result<SClass> {
        let f = alpha.representative().clone();
        if self.n_is_odd() {
            let z = self.ext.from_base(&f.mul(&f));
            Ok(SClass::Odd(UClass::new(UPoint::new(f, z)?)))
        } else {
            Ok(SClass::Even(ZSquareClass::new(self.ext.from_base(&f))?))
        }
    }

    /// j: middle column to k*/k*^2. n odd: [f, z] maps to the class of
    /// N(z_0) where z_0/conj(z_0) = f^{-2} z; n even: the norm map.
    pub fn j_map(&self, c: &SClass) -> Result<SquareClass> {
        match c {
            SClass::Odd(u) => {
                let p = u.representative();
                let w = p.z().scale(&p.f().mul(p.f()).inv());
                let z0 = hilbert90(&w)?;
                SquareClass::new(&z0.norm())
            }
            SClass::Even(z) => SquareClass::new(&z.representative().norm()),
        }
    }

    /// Is theta special: does j([theta]) arise as a similitude multiplier?
    /// Complete over finite fields; bounded search over Q.
    pub fn is_special(&self, theta: &SClass, height_bound: i64) -> Result<SpecialResult> {
        let j = self.j_map(theta)?;
        match find_similitude_with_multiplier(&self.space, j.representative(), height_bound)? {
            SimilitudeSearch::Found(g) => Ok(SpecialResult::Special(g.correct_to_proper()?)),
            SimilitudeSearch::NotFound => Ok(SpecialResult::NotSpecial),
            SimilitudeSearch::Unknown => Ok(SpecialResult::Unknown),
        }
    }

    /// Extract alpha in k*/k*^2 with c = i(alpha), for c in the image of i.
    pub fn alpha_from_image_of_i(&self, c: &SClass) -> Result<SquareClass> {
        match c {
            SClass::Odd(u) => {
                let p = u.representative();
                let fp = p.f();
                let w = p.z().scale(&fp.mul(fp).inv());
                // in the image, w = (z0/conj z0)^2; take a square root of
                // norm 1 and solve Hilbert 90 for z0
                let root = w.sqrt().ok_or(Error::NotInImageOfI)?;
                let u1 = if root.norm().is_one() {
                    root
                } else {
                    return Err(Error::NotInImageOfI);
                };
                let z0 = hilbert90(&u1)?;
                let alpha = fp.div(&z0.norm());
                SquareClass::new(&alpha)
            }
            SClass::Even(zc) => {
                let w = zc.representative();
                let (x, y) = w.coords();
                if y.is_zero() {
                    return SquareClass::new(x);
                }
                let t = w.norm().sqrt().ok_or(Error::NotInImageOfI)?;
                for tau in [x.add(&t).div(y), x.sub(&t).div(y)] {
                    let s = self.ext.new_elem(tau, self.space.field().one());
                    let cand = w.div(&s.mul(&s));
                    if cand.in_base() && !cand.is_zero() {
                        return SquareClass::new(cand.coords().0);
                    }
                }
                Err(Error::NotInImageOfI)
            }
        }
    }

    /// The obstruction alpha of a special theta with respect to a witness
    /// similitude, plus the spinor-norm verdict on it. The defining
    /// identity [theta] = S([g]) i(alpha) is re-verified exactly.
    pub fn obstruction_alpha(
        &self,
        theta: &SClass,
        witness: &Similitude,
        height_bound: i64,
    ) -> Result<ObstructionResult> {
        let class = PGOPlusClass::new(witness)?;
        let s = self.s_of(&class)?;
        let quotient = theta.mul(&s.inv());
        let alpha = self.alpha_from_image_of_i(&quotient)?;
        // re-verify the defining identity on classes
        let recomposed = s.mul(&self.i_map(&alpha)?);
        if recomposed != *theta {
            return Err(Error::InconsistentLift);
        }
        let verdict = self.is_spinor_norm(&alpha, height_bound)?;
        Ok(ObstructionResult {
            alpha,
            witness: witness.clone(),
            verdict,
        })
    }

    /// Decide whether alpha is a spinor norm of the space. Exact over
    /// finite fields; over Q: certificate search up to the height bound,
    /// sound negative criteria (definite sign; local exclusion), else
    /// Unknown.
    pub fn is_spinor_norm(
        &self,
        alpha: &SquareClass,
        height_bound: i64,
    ) -> Result<SpinorNormDecision> {
        is_spinor_norm(&self.space, alpha, height_bound)
    }
}

/// Result record for one obstruction computation.
#[derive(Clone, Debug)]
pub struct ObstructionResult {
    pub alpha: SquareClass,
    pub witness: Similitude,
    pub verdict: SpinorNormDecision,
}

/// Free-standing spinor-norm decision (see ObstructionContext::is_spinor_norm).
pub fn is_spinor_norm(
    space: &QuadSpace,
    alpha: &SquareClass,
    height_bound: i64,
) -> Result<SpinorNormDecision> {
    if alpha.is_trivial() {
        return Ok(SpinorNormDecision::Yes(vec![]));
    }
    let field = space.field();
    if field.is_finite() {
        // collect one vector per represented square class
        let mut square_vec = None;
        let mut nonsquare_vec = None;
        for v in space.all_vectors() {
            let qv = space.evaluate(&v).unwrap();
            if qv.is_zero() {
                continue;
            }
            if qv.is_square() {
                square_vec.get_or_insert(v);
            } else {
                nonsquare_vec.get_or_insert(v);
            }
            if square_vec.is_some() && nonsquare_vec.is_some() {
                break;
            }
        }
        // alpha nontrivial: need q(v) q(w) nonsquare
        return Ok(match (square_vec, nonsquare_vec) {
            (Some(v), Some(w)) => SpinorNormDecision::Yes(vec![v, w]),
            _ => SpinorNormDecision::No(NoWitness::FiniteExhaustion),
        });
    }
    if !matches!(field, Field::Rationals) {
        return Ok(SpinorNormDecision::Unknown);
    }
    let alpha_rat = alpha.representative().as_rational().unwrap().clone();

    // sound negative criterion 1: definite form, negative class
    let signs: Vec<bool> = space
        .diagonal()
        .iter()
        .map(|d| d.as_rational().unwrap().is_negative())
        .collect();
    if signs.iter().all(|&s| s) || signs.iter().all(|&s| !s) {
        if alpha_rat.is_negative() {
            return Ok(SpinorNormDecision::No(NoWitness::DefiniteSign));
        }
    }

    // sound negative criterion 2: local exclusion at the relevant places
    let diag: Vec<BigRational> = space
        .diagonal()
        .iter()
        .map(|d| d.as_rational().unwrap().clone())
        .collect();
    for place in relevant_places(&diag, &alpha_rat) {
        let classes = local_spinor_norm_classes(&diag, place)?;
        let local = local_square_class_rep(&alpha_rat, place);
        if !classes.contains(&local) {
            return Ok(SpinorNormDecision::No(NoWitness::LocalPlace(place)));
        }
    }

    // positive search: subgroup generated by pairwise products of
    // represented classes, with certificate vectors
    let mut reps: Vec<(SquareClass, Vec<FieldElement>)> = vec![];
    let m = space.dim();
    let mut idx = vec![0i64; m];
    'outer: for h in 1..=height_bound {
        for v in idx.iter_mut() {
            *v = -h;
        }
        loop {
            if idx.iter().any(|&c| c.abs() == h) {
                let v: Vec<FieldElement> = idx.iter().map(|&c| field.from_int(c)).collect();
                let qv = space.evaluate(&v).unwrap();
                if !qv.is_zero() {
                    let cls = SquareClass::new(&qv).unwrap();
                    if !reps.iter().any(|(c, _)| *c == cls) {
                        reps.push((cls, v));
                    }
                }
            }
            let mut i = 0;
            while i < m {
                idx[i] += 1;
                if idx[i] <= h {
                    break;
                }
                idx[i] = -h;
                i += 1;
            }
            if i == m {
                break;
            }
        }
        // closure check each shell: subgroup generated by c * c0
        if let Some(cert) = closure_certificate(&reps, alpha) {
            // re-verify the certificate exactly
            let mut prod = field.one();
            for v in &cert {
                prod = prod.mul(&space.evaluate(v).unwrap());
            }
            assert_eq!(&SquareClass::new(&prod).unwrap(), alpha);
            return Ok(SpinorNormDecision::Yes(cert));
        }
        if h == height_bound {
            break 'outer;
        }
    }
    Ok(SpinorNormDecision::Unknown)
}

/// Places where a local obstruction could live: 2, the real place, and odd
/// primes dividing the diagonal entries or the class representative.
fn relevant_places(diag: &[BigRational], alpha: &BigRational) -> Vec<Place> {
    let mut primes: std::collections::BTreeSet<u64> = std::collections::BTreeSet::from([2]);
    let mut push_support = |r: &BigRational| {
        for part in [r.numer(), r.denom()] {
            let n = part.abs().to_biguint().unwrap();
            for (p, _) in crate::field::factor_biguint(&n) {
                primes.insert(p.to_u64().expect("prime exceeds u64"));
            }
        }
    };
    for d in diag {
        push_support(d);
    }
    push_support(alpha);
    let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    out.push(Place::Real);
    out
}

/// Search the subgroup generated by pairwise products of represented
/// classes for alpha, returning certificate vectors (even count).
fn closure_certificate(
    reps: &[(SquareClass, Vec<FieldElement>)],
    alpha: &SquareClass,
) -> Option<Vec<Vec<FieldElement>>> {
    if reps.is_empty() {
        return None;
    }
    let (c0, v0) = &reps[0];
    // elements: (class, certificate vectors)
    let mut group: Vec<(SquareClass, Vec<Vec<FieldElement>>)> =
        vec![(SquareClass::trivial(c0.field()), vec![])];
    loop {
        let mut grew = false;
        for (c, v) in reps {
            let gen_class = c.mul(&c0.inv());
            let gen_cert = vec![v.clone(), v0.clone()];
            for (gc, gcert) in group.clone() {
                let nc = gc.mul(&gen_class);
                if !group.iter().any(|(e, _)| *e == nc) {
                    let mut cert = gcert.clone();
                    cert.extend(gen_cert.clone());
                    group.push((nc, cert));
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    group
        .into_iter()
        .find(|(c, _)| c == alpha)
        .map(|(_, cert)| cert)
}

/// Description of a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Description {
    pub order: u64,
    pub invariant_factors: Vec<u64>,
}

/// H^1(F_q, mu_4 twisted by Z) as Frobenius coinvariants of mu_4 realized
/// in F_{q^r}: the twisted Frobenius acts by a -> a^{-q}, so the
/// coinvariants are mu_4 / mu_4^{q+1}.
pub fn h1_mu4z_finite_field(space: &QuadSpace) -> Result<H1Description> {
    if !space.field().is_finite() {
        return Err(Error::UnsupportedField);
    }
    if space.dim() % 4 != 2 {
        return Err(Error::WrongParity);
    }
    // reject split discriminant
    let _ = QuadExt::new(space.field(), &space.disc_scalar())?;
    let q = space.field().order().unwrap();
    // realize mu_4 in F_{q^r}, r minimal with q^r = 1 mod 4
    let r: u32 = if q % 4 == 1 { 1 } else { 2 };
    let p = space.field().characteristic();
    let base_deg = match space.field() {
        Field::PrimeField { .. } => 1u32,
        Field::FiniteField { m, .. } => *m,
        _ => unreachable!(),
    };
    let big = Field::finite(p, base_deg * r)?;
    let minus_one = big.from_int(-1);
    let i = big
        .elements()
        .into_iter()
        .find(|x| x.mul(x) == minus_one)
        .expect("mu_4 realized by construction of r");
    let mu4 = [big.one(), i.clone(), minus_one.clone(), i.neg()];
    // image of (Frob - 1): {a^{-q-1}} for a in mu_4
    let mut image: Vec<FieldElement> = vec![];
    for a in &mu4 {
        let val = a.pow_u128(q + 1).inv();
        if !image.contains(&val) {
            image.push(val);
        }
    }
    let order = mu4.len() as u64 / image.len() as u64;
    let invariant_factors = if order == 1 { vec![] } else { vec![order] };
    Ok(H1Description {
        order,
        invariant_factors,
    })
}

/// Convenience: |U/U_0| by direct enumeration over a finite field.
pub fn u_quotient_order(ext: &QuadExt) -> usize {
    let mut classes: Vec<UClass> = vec![];
    for p in enumerate_u(ext) {
        let c = UClass::new(p);
        if !classes.contains(&c) {
            classes.push(c);
        }
    }
    classes.len()
}
