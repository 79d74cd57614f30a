//! Regular diagonal quadratic spaces: evaluation, reflections,
//! Cartan-Dieudonne decomposition, discriminant and spinor norms.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, SquareClass};
use crate::linalg::Matrix;
use rand::Rng;

/// A regular diagonal quadratic form over a supported field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    field: Field,
    diagonal: Vec<FieldElement>,
}

impl QuadSpace {
    pub fn new(field: &Field, diagonal: Vec<FieldElement>) -> Result<QuadSpace> {
        if diagonal.len() < 2 {
            return Err(Error::InvalidConfig(
                "quadratic space must have dimension >= 2".into(),
            ));
        }
        for (i, d) in diagonal.iter().enumerate() {
            if d.is_zero() {
                return Err(Error::InvalidConfig(format!(
                    "diagonal entry {i} is zero: the form is not regular"
                )));
            }
        }
        Ok(QuadSpace {
            field: field.clone(),
            diagonal,
        })
    }

    pub fn from_ints(field: &Field, diagonal: &[i64]) -> Result<QuadSpace> {
        QuadSpace::new(field, diagonal.iter().map(|&d| field.from_int(d)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[FieldElement] {
        &self.diagonal
    }

    /// Gram matrix of the polar form b(x, y) = (q(x+y) - q(x) - q(y))/2,
    /// which for a diagonal form is diag(d_1, ..., d_m).
    pub fn gram(&self) -> Matrix {
        let m = self.dim();
        let mut g = Matrix::zero(&self.field, m, m);
        for i in 0..m {
            g.set(i, i, self.diagonal[i].clone());
        }
        g
    }

    /// q(v) = sum d_i v_i^2.
    pub fn evaluate(&self, v: &[FieldElement]) -> Result<FieldElement> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut acc = self.field.zero();
        for (d, x) in self.diagonal.iter().zip(v) {
            acc = acc.add(&d.mul(&x.mul(x)));
        }
        Ok(acc)
    }

    /// b(x, y) = sum d_i x_i y_i.
    pub fn bilinear(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let mut acc = self.field.zero();
        for i in 0..self.dim() {
            acc = acc.add(&self.diagonal[i].mul(&x[i].mul(&y[i])));
        }
        acc
    }

    /// The scalar (-1)^{m(m-1)/2} * prod(d_i). Its square class is the
    /// discriminant; the scalar itself equals zeta^2 in the Clifford algebra.
    pub fn disc_scalar(&self) -> FieldElement {
        let m = self.dim();
        let mut acc = self.field.one();
        for d in &self.diagonal {
            acc = acc.mul(d);
        }
        if (m * (m - 1) / 2) % 2 == 1 {
            acc = acc.neg();
        }
        acc
    }

    /// disc(q) = (-1)^{m(m-1)/2} det(q) as a square class.
    pub fn discriminant(&self) -> SquareClass {
        SquareClass::new(&self.disc_scalar()).expect("regular form has nonzero discriminant")
    }

    /// The reflection in the hyperplane orthogonal to v.
    pub fn reflection(&self, v: &[FieldElement]) -> Result<Isometry> {
        let qv = self.evaluate(v)?;
        if qv.is_zero() {
            return Err(Error::IsotropicVector);
        }
        let m = self.dim();
        let mut mat = Matrix::identity(&self.field, m);
        let two = self.field.from_int(2);
        let qv_inv = qv.inv();
        // tau_v(e_j) = e_j - (2 b(e_j, v) / q(v)) v
        for j in 0..m {
            let bj = self.diagonal[j].mul(&v[j]); // b(e_j, v)
            let c = two.mul(&bj).mul(&qv_inv);
            for i in 0..m {
                let cur = mat.at(i, j).sub(&c.mul(&v[i]));
                mat.set(i, j, cur);
            }
        }
        Isometry::new(self.clone(), mat)
    }

    /// Deterministic enumeration of all vectors over a finite field.
    pub fn all_vectors(&self) -> Vec<Vec<FieldElement>> {
        let elems = self.field.elements();
        let m = self.dim();
        let mut out = vec![];
        let mut idx = vec![0usize; m];
        let total = elems.len().pow(m as u32);
        for _ in 0..total {
            out.push(idx.iter().map(|&i| elems[i].clone()).collect());
            let mut i = 0;
            while i < m {
                idx[i] += 1;
                if idx[i] < elems.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
        out
    }

    /// The subgroup of k*/k*^2 generated by q(v)q(w) over anisotropic v, w.
    /// Finite fields only.
    pub fn spinor_norm_group(&self) -> Result<Vec<SquareClass>> {
        if !self.field.is_finite() {
            return Err(Error::UnsupportedField);
        }
        let mut square = false;
        let mut nonsquare = false;
        for v in self.all_vectors() {
            let qv = self.evaluate(&v).unwrap();
            if qv.is_zero() {
                continue;
            }
            if qv.is_square() {
                square = true;
            } else {
                nonsquare = true;
            }
            if square && nonsquare {
                break;
            }
        }
        let mut out = vec![SquareClass::trivial(&self.field)];
        if square && nonsquare {
            out.push(SquareClass::new(&self.field.least_nonsquare()).unwrap());
        }
        Ok(out)
    }
}

/// An isometry of a quadratic space: M^T G M = G exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    space: QuadSpace,
    matrix: Matrix,
}

impl Isometry {
    pub fn new(space: QuadSpace, matrix: Matrix) -> Result<Isometry> {
        let g = space.gram();
        if matrix.transpose().mul(&g).mul(&matrix) != g {
            return Err(Error::InvalidConfig(
                "matrix does not preserve the Gram matrix".into(),
            ));
        }
        Ok(Isometry { space, matrix })
    }

    pub fn identity(space: &QuadSpace) -> Isometry {
        Isometry {
            space: space.clone(),
            matrix: Matrix::identity(space.field(), space.dim()),
        }
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det(&self) -> FieldElement {
        self.matrix.det()
    }

    pub fn is_proper(&self) -> bool {
        self.det().is_one()
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        assert_eq!(self.space, other.space);
        Isometry {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            space: self.space.clone(),
            matrix: self.matrix.inverse().expect("isometries are invertible"),
        }
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.matrix.mul_vec(v)
    }

    /// Cartan-Dieudonne: express the isometry as a product of reflections
    /// tau_{v_1} ... tau_{v_r}, greedily fixing basis vectors in order. The
    /// greedy two-reflection fallback for the isotropic-difference case gives
    /// r <= 2m; the parity of r matches the determinant.
    pub fn cartan_dieudonne(&self) -> Vec<Vec<FieldElement>> {
        self.cartan_dieudonne_with_order(&(0..self.space.dim()).collect::<Vec<_>>())
    }

    /// Same algorithm with a caller-chosen basis processing order, used by
    /// the decomposition-independence checks.
    pub fn cartan_dieudonne_with_order(&self, order: &[usize]) -> Vec<Vec<FieldElement>> {
        let space = &self.space;
        let field = space.field();
        let m = space.dim();
        assert_eq!(order.len(), m);
        let mut vectors: Vec<Vec<FieldElement>> = vec![];
        let mut current = self.matrix.clone();
        for &idx in order {
            let mut x = vec![field.zero(); m];
            x[idx] = field.one();
            let gx = current.col(idx);
            if gx == x {
                continue;
            }
            let diff: Vec<FieldElement> = x.iter().zip(&gx).map(|(a, b)| a.sub(b)).collect();
            let qdiff = space.evaluate(&diff).unwrap();
            if !qdiff.is_zero() {
                // tau_diff maps g(x) to x
                let tau = space.reflection(&diff).unwrap();
                current = tau.matrix.mul(&current);
                vectors.push(diff);
            } else {
                // q(x - gx) = 0 forces q(x + gx) = 4 q(x) - q(x - gx) != 0:
                // reflect g(x) to -x, then -x to x through tau_x.
                let sum: Vec<FieldElement> = x.iter().zip(&gx).map(|(a, b)| a.add(b)).collect();
                let tau_sum = space.reflection(&sum).unwrap();
                let tau_x = space.reflection(&x).unwrap();
                current = tau_x.matrix.mul(&tau_sum.matrix).mul(&current);
                vectors.push(sum);
                vectors.push(x);
            }
        }
        debug_assert_eq!(current, Matrix::identity(field, m));
        // The loop built tau_{v_r} ... tau_{v_1} g = 1; reflections are
        // involutions, so g = tau_{v_1} tau_{v_2} ... tau_{v_r} as listed.
        vectors
    }

    /// Sn(g): the square class of prod q(v_i) over a Cartan-Dieudonne
    /// decomposition. Defined for proper isometries.
    pub fn spinor_norm(&self) -> Result<SquareClass> {
        if !self.is_proper() {
            return Err(Error::ImproperIsometry);
        }
        let mut acc = self.space.field().one();
        for v in self.cartan_dieudonne() {
            acc = acc.mul(&self.space.evaluate(&v).unwrap());
        }
        Ok(SquareClass::new(&acc).unwrap())
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        self.matrix.canonical_key()
    }
}

/// A random isometry as a product of up to 2m random reflections.
pub fn random_isometry<R: Rng>(space: &QuadSpace, rng: &mut R) -> Isometry {
    let m = space.dim();
    let count = rng.gen_range(0..=(2 * m));
    let mut acc = Isometry::identity(space);
    let mut produced = 0;
    while produced < count {
        let v = random_vector(space, rng);
        if space.evaluate(&v).unwrap().is_zero() {
            continue;
        }
        acc = acc.compose(&space.reflection(&v).unwrap());
        produced += 1;
    }
    acc
}

/// A random proper isometry (even number of reflections).
pub fn random_proper_isometry<R: Rng>(space: &QuadSpace, rng: &mut R) -> Isometry {
    let mut g = random_isometry(space, rng);
    if !g.is_proper() {
        loop {
            let v = random_vector(space, rng);
            if !space.evaluate(&v).unwrap().is_zero() {
                g = g.compose(&space.reflection(&v).unwrap());
                break;
            }
        }
    }
    g
}

pub fn random_vector<R: Rng>(space: &QuadSpace, rng: &mut R) -> Vec<FieldElement> {
    let field = space.field();
    (0..space.dim())
        .map(|_| match field {
            Field::PrimeField { p } => field.from_int(rng.gen_range(0..*p) as i64),
            Field::FiniteField { p, m, .. } => {
                let coeffs: Vec<u64> = (0..*m).map(|_| rng.gen_range(0..*p)).collect();
                field.fq_from_coeffs(&coeffs)
            }
            _ => field.from_int(rng.gen_range(-5i64..=5)),
        })
        .collect()
}

/// A random anisotropic vector.
pub fn random_anisotropic_vector<R: Rng>(space: &QuadSpace, rng: &mut R) -> Vec<FieldElement> {
    loop {
        let v = random_vector(space, rng);
        if !space.evaluate(&v).unwrap().is_zero() {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q4_f3() -> QuadSpace {
        QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1, 1, 2]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q = Field::rationals();
        let s = QuadSpace::from_ints(&q, &[1, 1]).unwrap();
        assert_eq!(
            s.evaluate(&[q.from_int(1), q.from_int(0)]).unwrap(),
            q.from_int(1)
        );
        let s = q4_f3();
        let f3 = Field::prime(3).unwrap();
        let v: Vec<_> = (0..4).map(|_| f3.one()).collect();
        assert_eq!(s.evaluate(&v).unwrap(), f3.from_int(2));
        let s6 = QuadSpace::from_ints(&q, &[1, 1, 1, 1, 1, 1]).unwrap();
        let v: Vec<_> = (0..6).map(|_| q.one()).collect();
        assert_eq!(s6.evaluate(&v).unwrap(), q.from_int(6));
    }

    #[test]
    fn reflection_basics() {
        let q = Field::rationals();
        let s = QuadSpace::from_ints(&q, &[1, 1]).unwrap();
        let tau = s.reflection(&[q.from_int(1), q.from_int(0)]).unwrap();
        assert_eq!(
            tau.matrix,
            Matrix::from_int_rows(&q, &[vec![-1, 0], vec![0, 1]])
        );
        assert_eq!(tau.det(), q.from_int(-1));
        // involution and det = -1 for random anisotropic v over F_5
        let f5 = Field::prime(5).unwrap();
        let s = QuadSpace::from_ints(&f5, &[1, 2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let v = random_anisotropic_vector(&s, &mut rng);
            let tau = s.reflection(&v).unwrap();
            assert_eq!(tau.det(), f5.from_int(-1));
            assert_eq!(tau.compose(&tau), Isometry::identity(&s));
        }
    }

    #[test]
    fn cartan_dieudonne_examples() {
        let s = q4_f3();
        assert!(Isometry::identity(&s).cartan_dieudonne().is_empty());
        // a single reflection decomposes as one vector
        let f3 = Field::prime(3).unwrap();
        let v = vec![f3.one(), f3.zero(), f3.zero(), f3.zero()];
        let tau = s.reflection(&v).unwrap();
        let dec = tau.cartan_dieudonne();
        assert_eq!(dec.len(), 1);
        assert_eq!(s.reflection(&dec[0]).unwrap(), tau);
        // -identity on <1,2> over F_3 decomposes into two reflections
        let s2 = QuadSpace::from_ints(&f3, &[1, 2]).unwrap();
        let minus_id = Isometry::new(s2.clone(), Matrix::from_int_rows(&f3, &[vec![-1, 0], vec![0, -1]])).unwrap();
        let dec = minus_id.cartan_dieudonne();
        assert_eq!(dec.len(), 2);
        let recomposed = s2
            .reflection(&dec[0])
            .unwrap()
            .compose(&s2.reflection(&dec[1]).unwrap());
        assert_eq!(recomposed, minus_id);
    }

    #[test]
    fn recomposition_and_parity() {
        let spaces = vec![
            q4_f3(),
            QuadSpace::from_ints(&Field::prime(5).unwrap(), &[1, 1, 1, 1]).unwrap(),
            QuadSpace::from_ints(&Field::rationals(), &[1, 2, 3]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for s in &spaces {
            for _ in 0..100 {
                let g = random_isometry(s, &mut rng);
                let dec = g.cartan_dieudonne();
                assert!(dec.len() <= 2 * s.dim());
                let mut acc = Isometry::identity(s);
                for v in &dec {
                    acc = acc.compose(&s.reflection(v).unwrap());
                }
                assert_eq!(acc, g);
                let expect_odd = !g.is_proper();
                assert_eq!(dec.len() % 2 == 1, expect_odd);
            }
        }
    }

    #[test]
    fn spinor_norm_examples() {
        let q = Field::rationals();
        let s6 = QuadSpace::from_ints(&q, &[1, 1, 1, 1, 1, 1]).unwrap();
        assert!(Isometry::identity(&s6).spinor_norm().unwrap().is_trivial());
        // tau_{e1} tau_{e2} on the unit form: class of 1
        let e1: Vec<_> = (0..6).map(|i| q.from_int((i == 0) as i64)).collect();
        let e2: Vec<_> = (0..6).map(|i| q.from_int((i == 1) as i64)).collect();
        let g = s6
            .reflection(&e1)
            .unwrap()
            .compose(&s6.reflection(&e2).unwrap());
        assert!(g.spinor_norm().unwrap().is_trivial());
        // tau_{e1} tau_{e2} on <1,2>/F_3: class of 2, nontrivial
        let f3 = Field::prime(3).unwrap();
        let s2 = QuadSpace::from_ints(&f3, &[1, 2]).unwrap();
        let e1 = vec![f3.one(), f3.zero()];
        let e2 = vec![f3.zero(), f3.one()];
        let g = s2
            .reflection(&e1)
            .unwrap()
            .compose(&s2.reflection(&e2).unwrap());
        let sn = g.spinor_norm().unwrap();
        assert!(!sn.is_trivial());
        assert_eq!(sn, SquareClass::new(&f3.from_int(2)).unwrap());
    }

    #[test]
    fn spinor_norm_decomposition_independent_and_homomorphic() {
        let s = q4_f3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = random_proper_isometry(&s, &mut rng);
            let sn = g.spinor_norm().unwrap();
            // randomized-pivot variant
            let mut order: Vec<usize> = (0..4).collect();
            for i in (1..4).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let dec = g.cartan_dieudonne_with_order(&order);
            let mut acc = s.field().one();
            for v in &dec {
                acc = acc.mul(&s.evaluate(v).unwrap());
            }
            assert_eq!(sn, SquareClass::new(&acc).unwrap());
            let h = random_proper_isometry(&s, &mut rng);
            assert_eq!(
                g.compose(&h).spinor_norm().unwrap(),
                sn.mul(&h.spinor_norm().unwrap())
            );
        }
    }

    #[test]
    fn discriminant_examples() {
        let f3 = Field::prime(3).unwrap();
        let s = q4_f3();
        assert_eq!(s.discriminant(), SquareClass::new(&f3.from_int(2)).unwrap());
        let q = Field::rationals();
        let s6 = QuadSpace::from_ints(&q, &[1, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(s6.discriminant(), SquareClass::new(&q.from_int(-1)).unwrap());
        let s2 = QuadSpace::from_ints(&q, &[1, 1]).unwrap();
        assert_eq!(s2.discriminant(), SquareClass::new(&q.from_int(-1)).unwrap());
    }

    #[test]
    fn spinor_norm_group_examples() {
        let s = q4_f3();
        assert_eq!(s.spinor_norm_group().unwrap().len(), 2);
        let f5 = Field::prime(5).unwrap();
        let s = QuadSpace::from_ints(&f5, &[1, 1]).unwrap();
        // oracle: enumerate q(v) q(w) over anisotropic pairs
        let mut square = false;
        let mut nonsquare = false;
        for v in s.all_vectors() {
            for w in s.all_vectors() {
                let (qv, qw) = (s.evaluate(&v).unwrap(), s.evaluate(&w).unwrap());
                if qv.is_zero() || qw.is_zero() {
                    continue;
                }
                if qv.mul(&qw).is_square() {
                    square = true;
                } else {
                    nonsquare = true;
                }
            }
        }
        assert!(square);
        let expected = if nonsquare { 2 } else { 1 };
        assert_eq!(s.spinor_norm_group().unwrap().len(), expected);
        let s = QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1]).unwrap();
        assert!(!s.spinor_norm_group().unwrap().is_empty());
        assert!(QuadSpace::from_ints(&Field::rationals(), &[1, 1])
            .unwrap()
            .spinor_norm_group()
            .is_err());
    }
}
