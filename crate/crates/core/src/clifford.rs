//! Sparse Clifford algebra of a diagonal quadratic space, lifts of
//! isometries to the even Clifford group and of proper similitudes to the
//! extended Clifford group, and the maps mu_bar, x and mu_star computed on
//! those lifts.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, SquareClass};
use crate::linalg::Matrix;
use crate::quadext::{QuadExt, ZElem};
use crate::quadform::{Isometry, QuadSpace};
use crate::similitude::Similitude;
use std::collections::BTreeMap;

/// The Clifford algebra C(q) of a diagonal space, dim <= 8 (basis blades
/// are indexed by u16 bitmasks; dimension 2^m stays manageable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordAlgebra {
    space: QuadSpace,
}

impl CliffordAlgebra {
    pub fn new(space: QuadSpace) -> Result<CliffordAlgebra> {
        if space.dim() > 8 {
            return Err(Error::InvalidConfig(
                "Clifford algebra supported only up to dimension 8".into(),
            ));
        }
        Ok(CliffordAlgebra { space })
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    fn full_mask(&self) -> u16 {
        (1u16 << self.space.dim()) - 1
    }

    pub fn zero(&self) -> CliffordElement {
        CliffordElement {
            algebra: self.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> CliffordElement {
        self.basis_blade(0)
    }

    pub fn scalar(&self, c: &FieldElement) -> CliffordElement {
        let mut out = self.zero();
        out.add_term(0, c.clone());
        out
    }

    pub fn basis_blade(&self, mask: u16) -> CliffordElement {
        let mut out = self.zero();
        out.add_term(mask, self.field().one());
        out
    }

    /// v = (v_1, ..., v_m) as sum v_i e_i.
    pub fn embed_vector(&self, v: &[FieldElement]) -> CliffordElement {
        assert_eq!(v.len(), self.space.dim());
        let mut out = self.zero();
        for (i, c) in v.iter().enumerate() {
            out.add_term(1 << i, c.clone());
        }
        out
    }

    /// zeta = e_1 e_2 ... e_m.
    pub fn zeta(&self) -> CliffordElement {
        self.basis_blade(self.full_mask())
    }

    /// zeta^2, which is the scalar (-1)^{m(m-1)/2} prod d_i.
    pub fn zeta_squared(&self) -> FieldElement {
        let z = self.zeta();
        let sq = z.mul(&z);
        let val = sq.scalar_part().expect("zeta^2 is central scalar");
        debug_assert_eq!(val, self.space.disc_scalar());
        val
    }

    /// The discriminant extension Z = k(sqrt(zeta^2)), realized abstractly;
    /// inside C_0 it is k + k*zeta. Requires even dimension and nonsquare
    /// discriminant scalar.
    pub fn discriminant_ext(&self) -> Result<QuadExt> {
        if self.space.dim() % 2 != 0 {
            return Err(Error::OddDimension);
        }
        QuadExt::new(self.field(), &self.zeta_squared())
    }

    /// Product of two basis blades: (resulting mask, coefficient).
    fn blade_mul(&self, s: u16, t: u16) -> (u16, FieldElement) {
        let mut acc = s;
        let mut sign = 0u32;
        let mut coeff = self.field().one();
        for j in 0..self.space.dim() as u16 {
            if t & (1 << j) == 0 {
                continue;
            }
            sign += (acc >> (j + 1)).count_ones();
            if acc & (1 << j) != 0 {
                coeff = coeff.mul(&self.space.diagonal()[j as usize]);
                acc &= !(1 << j);
            } else {
                acc |= 1 << j;
            }
        }
        if sign % 2 == 1 {
            coeff = coeff.neg();
        }
        (acc, coeff)
    }

    /// Even subalgebra basis masks, ascending.
    pub fn even_masks(&self) -> Vec<u16> {
        (0..=self.full_mask())
            .filter(|s| s.count_ones() % 2 == 0)
            .collect()
    }
}

/// An element of C(q), sparse over basis blades e_S.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    algebra: CliffordAlgebra,
    coeffs: BTreeMap<u16, FieldElement>,
}

impl std::fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(s, c)| format!("{c}*e[{s:b}]"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl CliffordElement {
    pub fn algebra(&self) -> &CliffordAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &BTreeMap<u16, FieldElement> {
        &self.coeffs
    }

    fn add_term(&mut self, mask: u16, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(mask) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    e.insert(v);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, mask: u16) -> FieldElement {
        self.coeffs
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| self.algebra.field().zero())
    }

    /// Some(c) if the element is the scalar c.
    pub fn scalar_part(&self) -> Option<FieldElement> {
        if self.coeffs.is_empty() {
            return Some(self.algebra.field().zero());
        }
        if self.coeffs.len() == 1 {
            if let Some(c) = self.coeffs.get(&0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|s| s.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.keys().all(|s| s.count_ones() % 2 == 1)
    }

    pub fn add(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.algebra, other.algebra);
        let mut out = self.clone();
        for (&s, c) in &other.coeffs {
            out.add_term(s, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CliffordElement) -> CliffordElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (&s, c) in &self.coeffs {
            out.add_term(s, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (&s, x) in &self.coeffs {
            out.add_term(s, x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.algebra, other.algebra);
        let mut out = self.algebra.zero();
        for (&s, a) in &self.coeffs {
            for (&t, b) in &other.coeffs {
                let (mask, c) = self.algebra.blade_mul(s, t);
                out.add_term(mask, a.mul(b).mul(&c));
            }
        }
        out
    }

    /// The reversal anti-automorphism: e_{i1}...e_{ik} -> e_{ik}...e_{i1}.
    pub fn reversal(&self) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (&s, c) in &self.coeffs {
            let k = s.count_ones();
            let v = if (k * (k.wrapping_sub(1)) / 2) % 2 == 1 {
                c.neg()
            } else {
                c.clone()
            };
            out.add_term(s, v);
        }
        out
    }

    /// The grade involution alpha: multiplies odd-degree blades by -1.
    pub fn grade_involution(&self) -> CliffordElement {
        let mut out = self.algebra.zero();
        for (&s, c) in &self.coeffs {
            let v = if s.count_ones() % 2 == 1 {
                c.neg()
            } else {
                c.clone()
            };
            out.add_term(s, v);
        }
        out
    }

    /// Multiplicative inverse, by solving the left-multiplication system.
    pub fn inverse(&self) -> Option<CliffordElement> {
        let field = self.algebra.field();
        let dim = 1usize << self.algebra.space().dim();
        let mut l = Matrix::zero(field, dim, dim);
        for (&s, a) in &self.coeffs {
            for t in 0..dim as u16 {
                let (mask, c) = self.algebra.blade_mul(s, t);
                let cur = l.at(mask as usize, t as usize).add(&a.mul(&c));
                l.set(mask as usize, t as usize, cur);
            }
        }
        let mut rhs = vec![field.zero(); dim];
        rhs[0] = field.one();
        let x = l.solve(&rhs)?;
        let mut inv = self.algebra.zero();
        for (t, c) in x.into_iter().enumerate() {
            inv.add_term(t as u16, c);
        }
        if self.mul(&inv) == self.algebra.one() && inv.mul(self) == self.algebra.one() {
            Some(inv)
        } else {
            None
        }
    }

    /// The isometry induced by twisted conjugation v -> alpha(g) v g^{-1},
    /// when the element lies in the Clifford group.
    pub fn vector_representation(&self) -> Result<Isometry> {
        if !(self.is_even() || self.is_odd()) {
            return Err(Error::NotInCliffordGroup);
        }
        let inv = self.inverse().ok_or(Error::NotInCliffordGroup)?;
        let alpha = self.grade_involution();
        let space = self.algebra.space();
        let field = self.algebra.field();
        let m = space.dim();
        let mut mat = Matrix::zero(field, m, m);
        for i in 0..m {
            let ei = self.algebra.basis_blade(1 << i);
            let img = alpha.mul(&ei).mul(&inv);
            for (&s, c) in &img.coeffs {
                if s.count_ones() != 1 {
                    return Err(Error::NotInCliffordGroup);
                }
                mat.set(s.trailing_zeros() as usize, i, c.clone());
            }
        }
        Isometry::new(space.clone(), mat).map_err(|_| Error::NotInCliffordGroup)
    }

    /// Decompose an even element into Z-coordinates over representative
    /// blades, pairing S with S xor FULL (zeta e_S spans the partner).
    /// Requires even dimension.
    pub fn z_coordinates(&self) -> Result<Vec<(u16, ZElem)>> {
        let ext = self.algebra.discriminant_ext()?;
        if !self.is_even() {
            return Err(Error::NotInCliffordGroup);
        }
        let full = self.algebra.full_mask();
        let mut out = vec![];
        for s in self.algebra.even_masks() {
            let partner = s ^ full;
            let s_rank = (s.count_ones(), s);
            let p_rank = (partner.count_ones(), partner);
            if s_rank > p_rank {
                continue;
            }
            let a = self.coeff(s);
            // zeta * e_S = factor * e_partner
            let (mask, factor) = self.algebra.blade_mul(full, s);
            debug_assert_eq!(mask, partner);
            let b = self.coeff(partner).div(&factor);
            out.push((s, ext.new_elem(a, b)));
        }
        Ok(out)
    }

    /// Multiply by a + b*zeta in C_0 (zeta is central there for even dim).
    pub fn mul_z(&self, z: &ZElem) -> CliffordElement {
        let (a, b) = z.coords();
        let zc = self
            .algebra
            .scalar(a)
            .add(&self.algebra.zeta().scale(b));
        self.mul(&zc)
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = vec![];
        for (&s, c) in &self.coeffs {
            out.extend(s.to_be_bytes());
            out.extend(c.canonical_key());
        }
        out
    }
}

/// Lift a proper isometry to the even Clifford group: the product of the
/// embedded vectors of a reflection decomposition. Twisted conjugation by
/// the result induces the isometry back.
pub fn lift_isometry_to_gamma(g: &Isometry) -> Result<CliffordElement> {
    if !g.is_proper() {
        return Err(Error::ImproperIsometry);
    }
    let algebra = CliffordAlgebra::new(g.space().clone())?;
    let mut acc = algebra.one();
    for v in g.cartan_dieudonne() {
        acc = acc.mul(&algebra.embed_vector(&v));
    }
    debug_assert_eq!(&acc.vector_representation()?, g);
    Ok(acc)
}

/// True iff c lies in Spin(q): even Clifford group with reversal(c) c = 1.
pub fn spin_membership(c: &CliffordElement) -> bool {
    if !c.is_even() {
        return false;
    }
    if c.vector_representation().is_err() {
        return false;
    }
    c.reversal().mul(c) == c.algebra.one()
}

/// A lift of a proper similitude to the extended Clifford group, as an
/// even element normalized so that its first nonzero Z-coordinate is 1
/// (a canonical representative modulo the central Z*).
#[derive(Clone, Debug)]
pub struct OmegaElement {
    value: CliffordElement,
    similitude: Similitude,
}

impl OmegaElement {
    pub fn value(&self) -> &CliffordElement {
        &self.value
    }

    pub fn similitude(&self) -> &Similitude {
        &self.similitude
    }

    pub fn algebra(&self) -> &CliffordAlgebra {
        self.value.algebra()
    }

    /// The same lift scaled by a central unit z in Z*.
    pub fn scale_z(&self, z: &ZElem) -> OmegaElement {
        assert!(!z.is_zero());
        OmegaElement {
            value: self.value.mul_z(z),
            similitude: self.similitude.clone(),
        }
    }

    /// mu_bar: reversal(omega) * omega, an element of Z*.
    pub fn mu_bar(&self) -> Result<ZElem> {
        element_mu_bar(&self.value)
    }

    /// x: gamma^{-1} omega^2 in Z*, where gamma lifts mu(g)^{-1} g^2.
    /// Well-defined modulo k*.
    pub fn x_map(&self) -> Result<ZElem> {
        let h = self.similitude.isometry_of_square();
        let gamma = lift_isometry_to_gamma(&h)?;
        let gamma_inv = gamma.inverse().ok_or(Error::InconsistentLift)?;
        let z = gamma_inv.mul(&self.value).mul(&self.value);
        as_z_element(&z).ok_or(Error::InconsistentLift)
    }

    /// mu_star in dimension m = 2n with n odd: (f, x/conj(x) * f^2) where
    /// f = mu_bar(omega) in k* and x = x(omega). Satisfies N(z) = f^4.
    pub fn mu_star(&self) -> Result<(FieldElement, ZElem)> {
        let m = self.algebra().space().dim();
        if m % 4 != 2 {
            return Err(Error::WrongParity);
        }
        let fz = self.mu_bar()?;
        if !fz.in_base() {
            return Err(Error::MultiplierNotInBase);
        }
        let f = fz.coords().0.clone();
        let a = self.x_map()?;
        let ext = a.ext().clone();
        let z = a.div(&a.conj()).mul(&ext.from_base(&f.mul(&f)));
        debug_assert_eq!(z.norm(), f.pow(4));
        Ok((f, z))
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        self.value.canonical_key()
    }
}

/// reversal(c) * c for an even element, as an element of Z = k + k*zeta.
pub fn element_mu_bar(c: &CliffordElement) -> Result<ZElem> {
    let prod = c.reversal().mul(c);
    as_z_element(&prod).ok_or(Error::NotScalar)
}

/// Reinterpret an element supported on {1, zeta} as a ZElem.
pub fn as_z_element(c: &CliffordElement) -> Option<ZElem> {
    let algebra = c.algebra();
    let ext = algebra.discriminant_ext().ok()?;
    let full = algebra.full_mask();
    if c.coeffs().keys().any(|&s| s != 0 && s != full) {
        return None;
    }
    Some(ext.new_elem(c.coeff(0), c.coeff(full)))
}

/// Lift a proper similitude to the extended Clifford group via the inner
/// automorphism of C_0 it induces: solve omega * (e_1 e_i) =
/// mu^{-1} g(e_1) g(e_i) * omega over the even subalgebra. The solution
/// space is Z * omega_0, of k-dimension exactly 2.
pub fn lift_similitude_to_omega(g: &Similitude) -> Result<OmegaElement> {
    if !g.is_proper()? {
        return Err(Error::ImproperIsometry);
    }
    let algebra = CliffordAlgebra::new(g.space().clone())?;
    algebra.discriminant_ext()?; // reject odd dim / split discriminant early
    let field = algebra.field();
    let masks = algebra.even_masks();
    let dim = masks.len();
    let index_of: BTreeMap<u16, usize> = masks.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let m = g.space().dim();
    let mu_inv = g.multiplier().inv();
    let g0 = algebra.embed_vector(&g.matrix().col(0));

    let mut rows: Vec<Vec<FieldElement>> = vec![];
    for i in 1..m {
        let x = algebra.basis_blade(1).mul(&algebra.basis_blade(1 << i));
        let a = g0
            .mul(&algebra.embed_vector(&g.matrix().col(i)))
            .scale(&mu_inv);
        // row block: omega -> omega x - a omega, coordinates per blade
        for (t_idx, &t) in masks.iter().enumerate() {
            let et = algebra.basis_blade(t);
            let lhs = et.mul(&x).sub(&a.mul(&et));
            // lhs is even; record it as a column t_idx contribution
            if t_idx == 0 {
                rows.extend(vec![vec![field.zero(); dim]; dim]);
            }
            let base = rows.len() - dim;
            for (&s, c) in lhs.coeffs() {
                let r = base + index_of[&s];
                rows[r][t_idx] = c.clone();
            }
        }
    }
    let mat = Matrix::from_rows(field, rows);
    let kernel = mat.kernel_basis();
    if kernel.len() != 2 {
        return Err(Error::LiftFailure(format!(
            "solution space has dimension {}, expected 2",
            kernel.len()
        )));
    }
    let mut omega = algebra.zero();
    for (t_idx, c) in kernel[0].iter().enumerate() {
        omega.add_term(masks[t_idx], c.clone());
    }
    let omega_inv = omega
        .inverse()
        .ok_or_else(|| Error::LiftFailure("solution is not invertible".into()))?;
    // verify the conjugation identity on all pairs
    for i in 0..m {
        for j in (i + 1)..m {
            let x = algebra
                .basis_blade(1 << i)
                .mul(&algebra.basis_blade(1 << j));
            let lhs = omega.mul(&x).mul(&omega_inv);
            let rhs = algebra
                .embed_vector(&g.matrix().col(i))
                .mul(&algebra.embed_vector(&g.matrix().col(j)))
                .scale(&mu_inv);
            if lhs != rhs {
                return Err(Error::LiftFailure(
                    "conjugation does not induce the similitude".into(),
                ));
            }
        }
    }
    // normalize: first nonzero Z-coordinate becomes 1
    let coords = omega.z_coordinates()?;
    let lead = coords
        .iter()
        .map(|(_, z)| z)
        .find(|z| !z.is_zero())
        .expect("omega is nonzero");
    let omega = omega.mul_z(&lead.inv());
    Ok(OmegaElement {
        value: omega,
        similitude: g.clone(),
    })
}

/// The spinor norm of a proper isometry read off its Clifford lift:
/// reversal(gamma) gamma is the scalar prod q(v_i).
pub fn spinor_norm_via_lift(g: &Isometry) -> Result<SquareClass> {
    let gamma = lift_isometry_to_gamma(g)?;
    let s = gamma
        .reversal()
        .mul(&gamma)
        .scalar_part()
        .ok_or(Error::NotScalar)?;
    SquareClass::new(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::{random_proper_isometry, QuadSpace};
    use crate::similitude::{
        find_similitude_with_multiplier, random_proper_similitude, SimilitudeSearch,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q4_f3_alg() -> CliffordAlgebra {
        let s = QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1, 1, 2]).unwrap();
        CliffordAlgebra::new(s).unwrap()
    }

    fn q6_f3_alg() -> CliffordAlgebra {
        let s = QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1, 1, 1, 1, 1]).unwrap();
        CliffordAlgebra::new(s).unwrap()
    }

    fn random_element<R: Rng>(alg: &CliffordAlgebra, rng: &mut R) -> CliffordElement {
        let p = alg.field().characteristic();
        let mut out = alg.zero();
        let full = (1u32 << alg.space().dim()) as u16;
        for s in 0..full {
            out.add_term(s, alg.field().from_int(rng.gen_range(0..p) as i64));
        }
        out
    }

    #[test]
    fn generator_relations() {
        let alg = q4_f3_alg();
        let f3 = Field::prime(3).unwrap();
        for i in 0..4 {
            let ei = alg.basis_blade(1 << i);
            assert_eq!(
                ei.mul(&ei).scalar_part().unwrap(),
                alg.space().diagonal()[i]
            );
            for j in 0..4 {
                if i != j {
                    let ej = alg.basis_blade(1 << j);
                    assert_eq!(ei.mul(&ej), ej.mul(&ei).neg());
                }
            }
        }
        assert_eq!(alg.zeta_squared(), f3.from_int(2));
    }

    #[test]
    fn associativity_random() {
        let alg = q4_f3_alg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_element(&alg, &mut rng);
            let b = random_element(&alg, &mut rng);
            let c = random_element(&alg, &mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
    }

    #[test]
    fn reversal_is_anti_automorphism() {
        let alg = q4_f3_alg();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = random_element(&alg, &mut rng);
            let b = random_element(&alg, &mut rng);
            assert_eq!(a.mul(&b).reversal(), b.reversal().mul(&a.reversal()));
            assert_eq!(a.reversal().reversal(), a);
            assert_eq!(
                a.mul(&b).grade_involution(),
                a.grade_involution().mul(&b.grade_involution())
            );
        }
    }

    #[test]
    fn zeta_central_in_even_part() {
        for alg in [q4_f3_alg(), q6_f3_alg()] {
            let zeta = alg.zeta();
            for s in alg.even_masks() {
                let es = alg.basis_blade(s);
                assert_eq!(zeta.mul(&es), es.mul(&zeta));
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let alg = q4_f3_alg();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut inverted = 0;
        for _ in 0..50 {
            let a = random_element(&alg, &mut rng);
            if let Some(inv) = a.inverse() {
                assert_eq!(a.mul(&inv), alg.one());
                inverted += 1;
            }
        }
        assert!(inverted > 0);
        assert!(alg.zero().inverse().is_none());
    }

    #[test]
    fn vector_representation_of_embedded_vector() {
        let alg = q4_f3_alg();
        let f3 = Field::prime(3).unwrap();
        let v = vec![f3.one(), f3.one(), f3.zero(), f3.zero()];
        let g = alg.embed_vector(&v).vector_representation().unwrap();
        assert_eq!(&g, &alg.space().reflection(&v).unwrap());
    }

    #[test]
    fn isometry_lift_round_trip() {
        let alg = q4_f3_alg();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let g = random_proper_isometry(alg.space(), &mut rng);
            let gamma = lift_isometry_to_gamma(&g).unwrap();
            assert!(gamma.is_even());
            assert_eq!(gamma.vector_representation().unwrap(), g);
            assert_eq!(spinor_norm_via_lift(&g).unwrap(), g.spinor_norm().unwrap());
        }
    }

    #[test]
    fn spin_membership_examples() {
        let alg = q4_f3_alg();
        assert!(spin_membership(&alg.one()));
        assert!(spin_membership(&alg.one().neg()));
        let f3 = Field::prime(3).unwrap();
        // e_1 e_2 has reversal(c) c = e_2 e_1 e_1 e_2 = d_1 d_2 = 1 over this form
        let c = alg.basis_blade(1).mul(&alg.basis_blade(2));
        assert_eq!(
            c.reversal().mul(&c).scalar_part().unwrap(),
            f3.one()
        );
        assert!(spin_membership(&c));
        // e_1 e_4: q-values 1 and 2, product 2, not in Spin
        let c = alg.basis_blade(1).mul(&alg.basis_blade(8));
        assert!(!spin_membership(&c));
        assert!(!spin_membership(&alg.basis_blade(1)));
    }

    #[test]
    fn similitude_lift_identity_and_isometries() {
        let alg = q4_f3_alg();
        let id = Similitude::identity(alg.space());
        let omega = lift_similitude_to_omega(&id).unwrap();
        assert_eq!(omega.value(), &alg.one());
        assert!(omega.mu_bar().unwrap().is_one());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let g = random_proper_isometry(alg.space(), &mut rng);
            let omega = lift_similitude_to_omega(&Similitude::from_isometry(&g)).unwrap();
            // the lift agrees with the Clifford lift up to central Z*
            let gamma = lift_isometry_to_gamma(&g).unwrap();
            let ratio = gamma.mul(&omega.value().inverse().unwrap());
            assert!(as_z_element(&ratio).is_some());
        }
    }

    #[test]
    fn similitude_lift_nonsquare_multiplier() {
        let alg = q4_f3_alg();
        let f3 = Field::prime(3).unwrap();
        let g = match find_similitude_with_multiplier(alg.space(), &f3.from_int(2), 0).unwrap() {
            SimilitudeSearch::Found(g) => g.correct_to_proper().unwrap(),
            _ => panic!("multiplier 2 exists over F_3"),
        };
        let omega = lift_similitude_to_omega(&g).unwrap();
        let mb = omega.mu_bar().unwrap();
        // reversal(omega) omega generates the multiplier modulo norms:
        // N(mu_bar) = mu^2 up to squares; at minimum it is a unit of Z
        assert!(!mb.is_zero());
        let x = omega.x_map().unwrap();
        assert!(!x.is_zero());
    }

    #[test]
    fn mu_bar_scaling_law() {
        // mu_bar(omega z) = mu_bar(omega) * z * sigma(z), where sigma is
        // reversal restricted to Z: identity for m = 4, conjugation for m = 6
        for (alg, conj) in [(q4_f3_alg(), false), (q6_f3_alg(), true)] {
            let ext = alg.discriminant_ext().unwrap();
            let id = Similitude::identity(alg.space());
            let omega = lift_similitude_to_omega(&id).unwrap();
            for z in ext.units() {
                let scaled = omega.scale_z(&z);
                let expect = if conj {
                    z.norm()
                } else {
                    z.mul(&z).coords().0.clone()
                };
                let mb = scaled.mu_bar().unwrap();
                if conj {
                    assert!(mb.in_base());
                    assert_eq!(mb.coords().0, &expect);
                } else {
                    assert_eq!(mb, z.mul(&z));
                }
            }
        }
    }

    #[test]
    fn mu_star_on_central_units() {
        // mu_star(z) = (N(z), z^4) for z in Z* acting centrally
        let alg = q6_f3_alg();
        let ext = alg.discriminant_ext().unwrap();
        let id = Similitude::identity(alg.space());
        let omega = lift_similitude_to_omega(&id).unwrap();
        for z in ext.units() {
            let (f, w) = omega.scale_z(&z).mu_star().unwrap();
            assert_eq!(f, z.norm());
            assert_eq!(w, z.pow(4));
            assert_eq!(w.norm(), f.pow(4));
        }
        // wrong parity on q4
        let alg4 = q4_f3_alg();
        let omega4 = lift_similitude_to_omega(&Similitude::identity(alg4.space())).unwrap();
        assert!(matches!(omega4.mu_star(), Err(Error::WrongParity)));
    }

    #[test]
    fn x_map_on_central_units() {
        // x(z) = z^2 modulo k*
        let alg = q4_f3_alg();
        let ext = alg.discriminant_ext().unwrap();
        let id = Similitude::identity(alg.space());
        let omega = lift_similitude_to_omega(&id).unwrap();
        for z in ext.units() {
            let x = omega.scale_z(&z).x_map().unwrap();
            let ratio = x.div(&z.mul(&z));
            assert!(ratio.in_base());
        }
    }

    #[test]
    fn z_coordinates_round_trip() {
        let alg = q4_f3_alg();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let g = random_proper_similitude(alg.space(), &mut rng);
            let omega = lift_similitude_to_omega(&g).unwrap();
            let coords = omega.value().z_coordinates().unwrap();
            // reassemble: sum over reps of e_S * z_S
            let mut acc = alg.zero();
            for (s, z) in &coords {
                acc = acc.add(&alg.basis_blade(*s).mul_z(z));
            }
            assert_eq!(&acc, omega.value());
            // leading coordinate is 1 after normalization
            let lead = coords.iter().map(|(_, z)| z).find(|z| !z.is_zero()).unwrap();
            assert!(lead.is_one());
        }
    }
}
