//! Similitudes of quadratic spaces: multiplier, properness, construction of
//! similitudes with a prescribed multiplier, and enumeration of the finite
//! groups O(q) and PGO^+(q).

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;
use crate::quadform::{random_proper_isometry, Isometry, QuadSpace};
use rand::Rng;
use std::collections::BTreeSet;

/// g with g^T G g = mu(g) G for a nonzero multiplier mu(g).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Similitude {
    space: QuadSpace,
    matrix: Matrix,
    multiplier: FieldElement,
}

impl Similitude {
    pub fn new(space: QuadSpace, matrix: Matrix) -> Result<Similitude> {
        let g = space.gram();
        let m = matrix.transpose().mul(&g).mul(&matrix);
        // the multiplier is forced by the (0,0) entry
        let mu = m.at(0, 0).div(g.at(0, 0));
        if mu.is_zero() {
            return Err(Error::InvalidConfig("similitude is singular".into()));
        }
        if m != g.scale(&mu) {
            return Err(Error::InvalidConfig(
                "matrix does not scale the Gram matrix by a single multiplier".into(),
            ));
        }
        Ok(Similitude {
            space,
            matrix,
            multiplier: mu,
        })
    }

    pub fn from_isometry(g: &Isometry) -> Similitude {
        Similitude {
            space: g.space().clone(),
            matrix: g.matrix().clone(),
            multiplier: g.space().field().one(),
        }
    }

    pub fn identity(space: &QuadSpace) -> Similitude {
        Similitude {
            space: space.clone(),
            matrix: Matrix::identity(space.field(), space.dim()),
            multiplier: space.field().one(),
        }
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn multiplier(&self) -> &FieldElement {
        &self.multiplier
    }

    pub fn det(&self) -> FieldElement {
        self.matrix.det()
    }

    /// Proper: det(g) = mu(g)^n in dimension m = 2n. Odd dimension is
    /// rejected; properness there is the plain determinant condition on the
    /// isometry part and is not used here.
    pub fn is_proper(&self) -> Result<bool> {
        let m = self.space.dim();
        if m % 2 != 0 {
            return Err(Error::OddDimension);
        }
        let n = (m / 2) as i64;
        Ok(self.det() == self.multiplier.pow(n))
    }

    /// If improper, compose on the right with the reflection in the first
    /// basis vector to obtain a proper similitude with the same multiplier.
    pub fn correct_to_proper(&self) -> Result<Similitude> {
        if self.is_proper()? {
            return Ok(self.clone());
        }
        let field = self.space.field();
        let mut e1 = vec![field.zero(); self.space.dim()];
        e1[0] = field.one();
        let tau = self.space.reflection(&e1).unwrap();
        Ok(Similitude {
            space: self.space.clone(),
            matrix: self.matrix.mul(tau.matrix()),
            multiplier: self.multiplier.clone(),
        })
    }

    pub fn compose(&self, other: &Similitude) -> Similitude {
        assert_eq!(self.space, other.space);
        Similitude {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix),
            multiplier: self.multiplier.mul(&other.multiplier),
        }
    }

    pub fn inverse(&self) -> Similitude {
        Similitude {
            space: self.space.clone(),
            matrix: self.matrix.inverse().expect("similitudes are invertible"),
            multiplier: self.multiplier.inv(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Similitude {
        assert!(!c.is_zero());
        Similitude {
            space: self.space.clone(),
            matrix: self.matrix.scale(c),
            multiplier: self.multiplier.mul(&c.mul(c)),
        }
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.matrix.mul_vec(v)
    }

    /// g^{-1} as an isometry-valued conjugate is not defined, but
    /// h = mu(g)^{-1} g^2 always is an isometry.
    pub fn isometry_of_square(&self) -> Isometry {
        let mat = self.matrix.mul(&self.matrix).scale(&self.multiplier.inv());
        Isometry::new(self.space.clone(), mat).expect("mu^{-1} g^2 preserves the form")
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        self.matrix.canonical_key()
    }
}

/// Canonical representative of the class of g in PGO(q) = GO(q)/k*:
/// the matrix scaled so its first nonzero entry (row-major) is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PGOPlusClass {
    rep: Similitude,
}

impl PGOPlusClass {
    pub fn new(g: &Similitude) -> Result<PGOPlusClass> {
        if !g.is_proper()? {
            return Err(Error::ImproperIsometry);
        }
        Ok(PGOPlusClass {
            rep: Self::normalize(g),
        })
    }

    fn normalize(g: &Similitude) -> Similitude {
        let m = g.matrix();
        for i in 0..m.rows {
            for j in 0..m.cols {
                let x = m.at(i, j);
                if !x.is_zero() {
                    return g.scale(&x.inv());
                }
            }
        }
        unreachable!("similitude matrices are nonzero")
    }

    pub fn representative(&self) -> &Similitude {
        &self.rep
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        self.rep.canonical_key()
    }
}

/// Outcome of searching for a similitude with prescribed multiplier.
#[derive(Clone, Debug)]
pub enum SimilitudeSearch {
    Found(Similitude),
    NotFound,
    Unknown,
}

/// Find g in GO(q) with mu(g) = f, if possible: build columns u_i with
/// q(u_i) = f d_i, mutually orthogonal. Over a finite field the search is
/// exhaustive per column (Witt cancellation means greedy never gets stuck
/// when a solution exists); over Q, integer vectors up to the height bound
/// are tried projectively, accepting w when q(w)/(f d_i) is a square.
pub fn find_similitude_with_multiplier(
    space: &QuadSpace,
    f: &FieldElement,
    height_bound: i64,
) -> Result<SimilitudeSearch> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let field = space.field();
    let m = space.dim();
    let mut cols: Vec<Vec<FieldElement>> = vec![];
    for i in 0..m {
        let target = f.mul(&space.diagonal()[i]);
        let found = if field.is_finite() {
            finite_column_with_value(space, &cols, &target)
        } else {
            search_rational_column(space, &cols, &target, height_bound)
        };
        match found {
            Some(w) => cols.push(w),
            None if field.is_finite() => return Ok(SimilitudeSearch::NotFound),
            None => return Ok(SimilitudeSearch::Unknown),
        }
    }
    let mut mat = Matrix::zero(field, m, m);
    for (j, u) in cols.iter().enumerate() {
        for i in 0..m {
            mat.set(i, j, u[i].clone());
        }
    }
    let g = Similitude::new(space.clone(), mat)?;
    debug_assert_eq!(&g.multiplier, f);
    Ok(SimilitudeSearch::Found(g))
}

/// Deterministic solution of q(w) = target with w orthogonal to the fixed
/// columns, over a finite field: restrict the form to the orthogonal
/// complement, diagonalize it, and solve in at most two variables (a
/// regular binary form over F_q represents every nonzero value).
fn finite_column_with_value(
    space: &QuadSpace,
    cols: &[Vec<FieldElement>],
    target: &FieldElement,
) -> Option<Vec<FieldElement>> {
    let field = space.field();
    let m = space.dim();
    // orthogonal complement of the span of cols: kernel of b(u_j, -)
    let basis: Vec<Vec<FieldElement>> = if cols.is_empty() {
        (0..m)
            .map(|i| {
                let mut v = vec![field.zero(); m];
                v[i] = field.one();
                v
            })
            .collect()
    } else {
        let mut rows = vec![];
        for u in cols {
            rows.push(
                (0..m)
                    .map(|j| space.diagonal()[j].mul(&u[j]))
                    .collect::<Vec<_>>(),
            );
        }
        Matrix::from_rows(field, rows).kernel_basis()
    };
    let r = basis.len();
    if r == 0 {
        return None;
    }
    // restricted Gram matrix
    let mut gram = Matrix::zero(field, r, r);
    for i in 0..r {
        for j in 0..r {
            gram.set(i, j, space.bilinear(&basis[i], &basis[j]));
        }
    }
    let (p, diag) = diagonalize_symmetric(&gram);
    let coords = represent_value_diagonal(field, &diag, target)?;
    // w = basis * p * coords
    let pc = p.mul_vec(&coords);
    let mut w = vec![field.zero(); m];
    for (i, c) in pc.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for k in 0..m {
            w[k] = w[k].add(&c.mul(&basis[i][k]));
        }
    }
    debug_assert_eq!(&space.evaluate(&w).unwrap(), target);
    Some(w)
}

/// Congruence diagonalization of a symmetric matrix: returns (P, d) with
/// P^T G P = diag(d). Assumes char != 2.
fn diagonalize_symmetric(gram: &Matrix) -> (Matrix, Vec<FieldElement>) {
    let field = gram.field.clone();
    let r = gram.rows;
    let mut g = gram.clone();
    let mut p = Matrix::identity(&field, r);
    let col_op = |g: &mut Matrix, p: &mut Matrix, dst: usize, src: usize, c: &FieldElement| {
        // col_dst += c * col_src, then row_dst += c * row_src (congruence)
        for i in 0..r {
            let v = g.at(i, dst).add(&c.mul(g.at(i, src)));
            g.set(i, dst, v);
        }
        for j in 0..r {
            let v = g.at(dst, j).add(&c.mul(g.at(src, j)));
            g.set(dst, j, v);
        }
        for i in 0..r {
            let v = p.at(i, dst).add(&c.mul(p.at(i, src)));
            p.set(i, dst, v);
        }
    };
    for k in 0..r {
        if g.at(k, k).is_zero() {
            // bring a nonzero entry to the pivot
            if let Some(j) = ((k + 1)..r).find(|&j| !g.at(j, j).is_zero()) {
                // swap columns/rows k and j
                for i in 0..r {
                    let (a, b) = (g.at(i, k).clone(), g.at(i, j).clone());
                    g.set(i, k, b);
                    g.set(i, j, a);
                }
                for c in 0..r {
                    let (a, b) = (g.at(k, c).clone(), g.at(j, c).clone());
                    g.set(k, c, b);
                    g.set(j, c, a);
                }
                for i in 0..r {
                    let (a, b) = (p.at(i, k).clone(), p.at(i, j).clone());
                    p.set(i, k, b);
                    p.set(i, j, a);
                }
            } else if let Some(j) = ((k + 1)..r).find(|&j| !g.at(k, j).is_zero()) {
                // g[k][k] = g[j][j] = 0 but g[k][j] != 0: col_k += col_j
                let one = field.one();
                col_op(&mut g, &mut p, k, j, &one);
            }
        }
        let pivot = g.at(k, k).clone();
        if pivot.is_zero() {
            continue; // zero row/column (degenerate block)
        }
        let inv = pivot.inv();
        for j in (k + 1)..r {
            if g.at(k, j).is_zero() {
                continue;
            }
            let c = g.at(k, j).mul(&inv).neg();
            col_op(&mut g, &mut p, j, k, &c);
        }
    }
    let diag = (0..r).map(|i| g.at(i, i).clone()).collect();
    (p, diag)
}

/// Solve sum d_i x_i^2 = target over a finite field using at most the
/// first two nonzero diagonal entries.
fn represent_value_diagonal(
    field: &crate::field::Field,
    diag: &[FieldElement],
    target: &FieldElement,
) -> Option<Vec<FieldElement>> {
    let nz: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_zero()).collect();
    let mut coords = vec![field.zero(); diag.len()];
    if nz.is_empty() {
        return None;
    }
    if nz.len() == 1 {
        let x2 = target.div(&diag[nz[0]]);
        let x = x2.sqrt()?;
        coords[nz[0]] = x;
        return Some(coords);
    }
    let (i, j) = (nz[0], nz[1]);
    for x in field.elements() {
        let rem = target.sub(&diag[i].mul(&x.mul(&x)));
        let y2 = rem.div(&diag[j]);
        if let Some(y) = y2.sqrt() {
            coords[i] = x;
            coords[j] = y;
            return Some(coords);
        }
    }
    None
}

/// Search integer vectors w with max-norm <= bound, orthogonal to the fixed
/// columns, with q(w)/target a nonzero rational square t^2; return w/t.
fn search_rational_column(
    space: &QuadSpace,
    cols: &[Vec<FieldElement>],
    target: &FieldElement,
    bound: i64,
) -> Option<Vec<FieldElement>> {
    let field = space.field();
    let m = space.dim();
    let mut idx = vec![0i64; m];
    for h in 1..=bound {
        // iterate the box [-h, h]^m, keeping only vectors of max-norm exactly h
        for v in idx.iter_mut() {
            *v = -h;
        }
        loop {
            if idx.iter().any(|&c| c.abs() == h) {
                let w: Vec<FieldElement> = idx.iter().map(|&c| field.from_int(c)).collect();
                let qw = space.evaluate(&w).unwrap();
                if !qw.is_zero() && cols.iter().all(|u| space.bilinear(&w, u).is_zero()) {
                    if let Some(t) = qw.div(target).sqrt() {
                        let ti = t.inv();
                        return Some(w.iter().map(|x| x.mul(&ti)).collect());
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
    }
    None
}

/// The full orthogonal group of a finite quadratic space, by closure from
/// the reflections.
pub fn enumerate_orthogonal_group(space: &QuadSpace) -> Result<Vec<Isometry>> {
    if !space.field().is_finite() {
        return Err(Error::UnsupportedField);
    }
    let mut gens = vec![];
    for v in space.all_vectors() {
        if !space.evaluate(&v).unwrap().is_zero() {
            gens.push(space.reflection(&v).unwrap());
        }
    }
    let id = Isometry::identity(space);
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    seen.insert(id.canonical_key());
    let mut frontier = vec![id.clone()];
    let mut out = vec![id];
    while let Some(g) = frontier.pop() {
        for t in &gens {
            let h = g.compose(t);
            if seen.insert(h.canonical_key()) {
                out.push(h.clone());
                frontier.push(h);
            }
        }
    }
    Ok(out)
}

/// All classes of PGO^+(q) over a finite field: proper isometries modulo
/// scalars, together with their translates by one proper similitude of
/// nonsquare multiplier (which exists for even dimension over F_q).
pub fn enumerate_pgo_plus_classes(space: &QuadSpace) -> Result<Vec<PGOPlusClass>> {
    if space.dim() % 2 != 0 {
        return Err(Error::OddDimension);
    }
    let all = enumerate_orthogonal_group(space)?;
    let mut reps: Vec<Similitude> = all
        .iter()
        .filter(|g| g.is_proper())
        .map(Similitude::from_isometry)
        .collect();
    let ns = space.field().least_nonsquare();
    match find_similitude_with_multiplier(space, &ns, 0)? {
        SimilitudeSearch::Found(g) => {
            let g = g.correct_to_proper()?;
            let translated: Vec<Similitude> = reps.iter().map(|h| g.compose(h)).collect();
            reps.extend(translated);
        }
        SimilitudeSearch::NotFound => {}
        SimilitudeSearch::Unknown => unreachable!("finite search is exhaustive"),
    }
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut out = vec![];
    for g in &reps {
        let class = PGOPlusClass::new(g)?;
        if seen.insert(class.canonical_key()) {
            out.push(class);
        }
    }
    Ok(out)
}

/// A random proper similitude: a random proper isometry, optionally
/// composed with a fixed proper similitude of nonsquare multiplier.
pub fn random_proper_similitude<R: Rng>(space: &QuadSpace, rng: &mut R) -> Similitude {
    let mut g = Similitude::from_isometry(&random_proper_isometry(space, rng));
    if space.dim() % 2 == 0 && space.field().is_finite() && rng.gen_bool(0.5) {
        let ns = space.field().least_nonsquare();
        if let Ok(SimilitudeSearch::Found(t)) = find_similitude_with_multiplier(space, &ns, 0) {
            if let Ok(t) = t.correct_to_proper() {
                g = t.compose(&g);
            }
        }
    }
    // scalar twist to diversify multipliers within a square class
    if space.field().is_finite() {
        let elems = space.field().elements();
        let c = loop {
            let c = &elems[rng.gen_range(0..elems.len())];
            if !c.is_zero() {
                break c.clone();
            }
        };
        g = g.scale(&c);
    }
    g
}
