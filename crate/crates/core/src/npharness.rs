//! Separable extensions L/k with explicit embeddings and norms, the
//! constructive Scharlau norm principle for proper similitudes, and
//! weak-norm-principle experiments for the maps mu_star and mu_bar with
//! obstruction-based membership decisions.

use crate::clifford::{lift_similitude_to_omega, OmegaElement};
use crate::error::{Error, Result};
use crate::field::{galois_conj, Field, FieldElement, SquareClass};
use crate::linalg::Matrix;
use crate::obstruction::{
    ObstructionContext, ObstructionResult, SClass, SpecialResult, SpinorNormDecision, UClass,
    UPoint, ZSquareClass,
};
use crate::quadext::{QuadExt, ZElem};
use crate::quadform::QuadSpace;
use crate::similitude::{random_proper_similitude, find_similitude_with_multiplier, Similitude, SimilitudeSearch};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A separable extension L/k with computable embedding, Galois action and
/// norm: either Q(sqrt m)/Q or a finite tower F_{p^{mr}}/F_{p^m}.
#[derive(Clone, Debug)]
pub enum ExtensionSpec {
    QuadraticOfQ {
        m: i64,
        top: Field,
    },
    Finite {
        base: Field,
        r: u32,
        top: Field,
        /// image in L of the canonical generator of the base field
        beta: FieldElement,
    },
}

impl ExtensionSpec {
    pub fn quadratic_of_q(m: i64) -> Result<ExtensionSpec> {
        let top = Field::quad_ext_of_rationals(m)?;
        Ok(ExtensionSpec::QuadraticOfQ { m, top })
    }

    pub fn finite(base: &Field, r: u32) -> Result<ExtensionSpec> {
        if r == 0 {
            return Err(Error::NotAnExtension);
        }
        let (p, m) = match base {
            Field::PrimeField { p } => (*p, 1u32),
            Field::FiniteField { p, m, .. } => (*p, *m),
            _ => return Err(Error::UnsupportedField),
        };
        let top = if m * r == 1 {
            Field::prime(p)?
        } else {
            Field::finite(p, m * r)?
        };
        // the base generator's minimal polynomial is the base modulus; find
        // its first root in L (deterministic in canonical element order)
        let beta = match base {
            Field::PrimeField { .. } => top.one(),
            Field::FiniteField { modulus, .. } => {
                let coeffs: Vec<FieldElement> =
                    modulus.iter().map(|&c| top.from_int(c as i64)).collect();
                top.elements()
                    .into_iter()
                    .find(|x| {
                        let mut acc = top.zero();
                        let mut pw = top.one();
                        for c in &coeffs {
                            acc = acc.add(&c.mul(&pw));
                            pw = pw.mul(x);
                        }
                        acc.is_zero()
                    })
                    .expect("the base modulus splits in the top field")
            }
            _ => unreachable!(),
        };
        Ok(ExtensionSpec::Finite {
            base: base.clone(),
            r,
            top,
            beta,
        })
    }

    pub fn base(&self) -> Field {
        match self {
            ExtensionSpec::QuadraticOfQ { .. } => Field::rationals(),
            ExtensionSpec::Finite { base, .. } => base.clone(),
        }
    }

    pub fn top(&self) -> &Field {
        match self {
            ExtensionSpec::QuadraticOfQ { top, .. } => top,
            ExtensionSpec::Finite { top, .. } => top,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            ExtensionSpec::QuadraticOfQ { .. } => 2,
            ExtensionSpec::Finite { r, .. } => *r,
        }
    }

    /// The inclusion k -> L.
    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement> {
        match self {
            ExtensionSpec::QuadraticOfQ { top, .. } => {
                let r = x.as_rational().ok_or(Error::NotAnExtension)?;
                Ok(top.from_rational_big(r.clone()))
            }
            ExtensionSpec::Finite { base, top, beta, .. } => {
                if x.field() != base {
                    return Err(Error::NotAnExtension);
                }
                match base {
                    Field::PrimeField { .. } => Ok(top.from_int(x.fp_value().unwrap() as i64)),
                    Field::FiniteField { .. } => {
                        let coeffs = x.fq_coeffs().unwrap().to_vec();
                        let mut acc = top.zero();
                        let mut pw = top.one();
                        for c in coeffs {
                            acc = acc.add(&pw.mul(&top.from_int(c as i64)));
                            pw = pw.mul(beta);
                        }
                        Ok(acc)
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    /// The i-th power of the canonical generator of Gal(L/k) applied to x.
    pub fn galois_power(&self, x: &FieldElement, i: u32) -> Result<FieldElement> {
        match self {
            ExtensionSpec::QuadraticOfQ { .. } => {
                if i % 2 == 0 {
                    Ok(x.clone())
                } else {
                    galois_conj(x, &Field::rationals())
                }
            }
            ExtensionSpec::Finite { base, r, .. } => {
                let q = base.order().ok_or(Error::UnsupportedField)?;
                let mut out = x.clone();
                for _ in 0..(i % r) {
                    out = out.pow_u128(q);
                }
                Ok(out)
            }
        }
    }

    /// N_{L/k}(x), as an element of the base field.
    pub fn norm_to_base(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut prod = x.clone();
        for i in 1..self.degree() {
            prod = prod.mul(&self.galois_power(x, i)?);
        }
        self.restrict(&prod).ok_or(Error::NotAnExtension)
    }

    /// Pull an element of L back to k, when it lies in the image of the
    /// embedding.
    pub fn restrict(&self, x: &FieldElement) -> Option<FieldElement> {
        match self {
            ExtensionSpec::QuadraticOfQ { .. } => {
                let (a, b) = x.quad_coords()?;
                if !b.is_zero() {
                    return None;
                }
                Some(Field::rationals().from_rational_big(a.clone()))
            }
            ExtensionSpec::Finite { base, top, .. } => {
                let p = base.characteristic();
                let fp = Field::prime(p).ok()?;
                let base_deg = match base {
                    Field::PrimeField { .. } => 1usize,
                    Field::FiniteField { m, .. } => *m as usize,
                    _ => return None,
                };
                let top_deg = match top {
                    Field::PrimeField { .. } => 1usize,
                    Field::FiniteField { m, .. } => *m as usize,
                    _ => return None,
                };
                let coords = |y: &FieldElement| -> Vec<FieldElement> {
                    let raw: Vec<u64> = match top {
                        Field::PrimeField { .. } => vec![y.fp_value().unwrap()],
                        _ => y.fq_coeffs().unwrap().to_vec(),
                    };
                    raw.into_iter().map(|c| fp.from_int(c as i64)).collect()
                };
                // columns: embeddings of the F_p-basis of the base field
                let mut cols = vec![];
                for j in 0..base_deg {
                    let mut v = vec![0u64; base_deg];
                    v[j] = 1;
                    let bj = match base {
                        Field::PrimeField { .. } => base.one(),
                        _ => base.fq_from_coeffs(&v),
                    };
                    cols.push(coords(&self.embed(&bj).ok()?));
                }
                let mut mat = Matrix::zero(&fp, top_deg, base_deg);
                for (j, col) in cols.iter().enumerate() {
                    for (i, c) in col.iter().enumerate() {
                        mat.set(i, j, c.clone());
                    }
                }
                let sol = mat.solve(&coords(x))?;
                let sol_u: Vec<u64> = sol.iter().map(|c| c.fp_value().unwrap()).collect();
                let cand = match base {
                    Field::PrimeField { .. } => base.from_int(sol_u[0] as i64),
                    _ => base.fq_from_coeffs(&sol_u),
                };
                if self.embed(&cand).ok()? == *x {
                    Some(cand)
                } else {
                    None
                }
            }
        }
    }
}

/// theta at the point level: a U-point for n odd, a Z*-element for n even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaPoint {
    Odd(UPoint),
    Even(ZElem),
}

impl ThetaPoint {
    pub fn class(&self) -> SClass {
        match self {
            ThetaPoint::Odd(p) => SClass::Odd(UClass::new(p.clone())),
            ThetaPoint::Even(z) => SClass::Even(ZSquareClass::new(z.clone()).unwrap()),
        }
    }
}

/// Certificate for a Yes membership decision: a proper similitude over k
/// and a central Z*-scaling whose lift maps exactly to the normed theta.
#[derive(Clone, Debug)]
pub struct YesCertificate {
    pub witness: Similitude,
    pub z_scale: ZElem,
}

#[derive(Clone, Debug)]
pub enum NPDecision {
    Yes(YesCertificate),
    No(ObstructionResult),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub index: usize,
    pub normed_theta: ThetaPoint,
    pub alpha: Option<SquareClass>,
    pub decision: NPDecision,
}

#[derive(Clone, Debug)]
pub struct NPReport {
    pub map_name: String,
    pub extension: String,
    pub samples: usize,
    pub yes: usize,
    pub no: usize,
    pub unknown: usize,
    pub outcomes: Vec<SampleOutcome>,
}

/// Harness tying a quadratic space over k to its base change over L, with
/// the discriminant extensions on both levels.
pub struct NormHarness {
    ext: ExtensionSpec,
    ctx_k: ObstructionContext,
    ctx_l: ObstructionContext,
}

impl NormHarness {
    pub fn new(space: QuadSpace, ext: ExtensionSpec) -> Result<NormHarness> {
        if space.field() != &ext.base() {
            return Err(Error::MalformedTower);
        }
        let ctx_k = ObstructionContext::new(space.clone())?;
        let diag_l: Result<Vec<FieldElement>> =
            space.diagonal().iter().map(|d| ext.embed(d)).collect();
        let space_l = QuadSpace::new(ext.top(), diag_l?)?;
        let ctx_l = match ObstructionContext::new(space_l) {
            Ok(c) => c,
            Err(Error::SplitDiscriminant) => return Err(Error::SplitDiscriminantOverL),
            Err(e) => return Err(e),
        };
        Ok(NormHarness { ext, ctx_k, ctx_l })
    }

    pub fn extension(&self) -> &ExtensionSpec {
        &self.ext
    }

    pub fn ctx_k(&self) -> &ObstructionContext {
        &self.ctx_k
    }

    pub fn ctx_l(&self) -> &ObstructionContext {
        &self.ctx_l
    }

    fn check_tower(&self, ext_l: &QuadExt) -> Result<()> {
        let expected = self.ext.embed(self.ctx_k.ext().delta())?;
        if ext_l.base() != self.ext.top() || ext_l.delta() != &expected {
            return Err(Error::MalformedTower);
        }
        Ok(())
    }

    /// N_{Z_L/Z_k} componentwise on a + b sqrt(delta).
    pub fn norm_z(&self, z: &ZElem) -> Result<ZElem> {
        self.check_tower(z.ext())?;
        let mut prod = z.clone();
        for i in 1..self.ext.degree() {
            let (a, b) = z.coords();
            let zi = z.ext().new_elem(
                self.ext.galois_power(a, i)?,
                self.ext.galois_power(b, i)?,
            );
            prod = prod.mul(&zi);
        }
        let (a, b) = prod.coords();
        let a = self.ext.restrict(a).ok_or(Error::MalformedTower)?;
        let b = self.ext.restrict(b).ok_or(Error::MalformedTower)?;
        Ok(self.ctx_k.ext().new_elem(a, b))
    }

    /// Componentwise norm of theta; the U-point invariant is preserved and
    /// asserted.
    pub fn norm_of_theta(&self, theta: &ThetaPoint) -> Result<ThetaPoint> {
        match theta {
            ThetaPoint::Odd(p) => {
                let f = self.ext.norm_to_base(p.f())?;
                let z = self.norm_z(p.z())?;
                Ok(ThetaPoint::Odd(UPoint::new(f, z)?))
            }
            ThetaPoint::Even(z) => Ok(ThetaPoint::Even(self.norm_z(z)?)),
        }
    }

    /// The parity-appropriate map applied to a lifted similitude over L.
    pub fn map_point_l(&self, omega: &OmegaElement) -> Result<ThetaPoint> {
        if self.ctx_l.n_is_odd() {
            let (f, z) = omega.mu_star()?;
            Ok(ThetaPoint::Odd(UPoint::new(f, z)?))
        } else {
            Ok(ThetaPoint::Even(omega.mu_bar()?))
        }
    }

    /// Scharlau norm principle for GO+: realize f = N_{L/k}(mu(g1)) as the
    /// multiplier of a proper similitude over k. Never fails over finite
    /// fields; None over Q when the height bound is exhausted.
    pub fn scharlau_go_plus(
        &self,
        g1: &Similitude,
        height_bound: i64,
    ) -> Result<Option<Similitude>> {
        if g1.space() != self.ctx_l.space() {
            return Err(Error::MalformedTower);
        }
        let f = self.ext.norm_to_base(g1.multiplier())?;
        match find_similitude_with_multiplier(self.ctx_k.space(), &f, height_bound)? {
            SimilitudeSearch::Found(g) => {
                let g = g.correct_to_proper()?;
                assert_eq!(g.multiplier(), &f);
                assert!(g.is_proper()?);
                Ok(Some(g))
            }
            SimilitudeSearch::NotFound => {
                assert!(
                    !self.ext.base().is_finite(),
                    "norms of multipliers are multipliers over finite fields"
                );
                Ok(None)
            }
            SimilitudeSearch::Unknown => Ok(None),
        }
    }

    /// Decide whether the normed theta lies in the image of the map over k,
    /// constructing an exact certificate on Yes.
    pub fn decide_membership(
        &self,
        normed: &ThetaPoint,
        height_bound: i64,
    ) -> Result<(Option<SquareClass>, NPDecision)> {
        let class = normed.class();
        let witness = match self.ctx_k.is_special(&class, height_bound)? {
            SpecialResult::Special(g) => g,
            SpecialResult::NotSpecial => {
                panic!("normed theta must be special (Scharlau norm principle)")
            }
            SpecialResult::Unknown => {
                return Ok((None, NPDecision::Unknown("special test exhausted".into())))
            }
        };
        let res = self.ctx_k.obstruction_alpha(&class, &witness, height_bound)?;
        let alpha = res.alpha.clone();
        match &res.verdict {
            SpinorNormDecision::Yes(cert_vectors) => {
                // alpha = Sn(h) with h the product of the certificate
                // reflections; then omega lifting witness*h hits the class
                // of theta, and a central scaling makes it exact
                let space = self.ctx_k.space();
                let mut h = Similitude::identity(space);
                for v in cert_vectors {
                    h = h.compose(&Similitude::from_isometry(&space.reflection(v)?));
                }
                let adjusted = witness.compose(&h);
                let omega = lift_similitude_to_omega(&adjusted)?;
                let z_scale = self.exact_scaling(&omega, normed)?;
                let cert = YesCertificate {
                    witness: adjusted,
                    z_scale,
                };
                assert!(self.verify_certificate(&cert, normed)?);
                Ok((Some(alpha), NPDecision::Yes(cert)))
            }
            SpinorNormDecision::No(_) => Ok((Some(alpha), NPDecision::No(res))),
            SpinorNormDecision::Unknown => Ok((
                Some(alpha),
                NPDecision::Unknown("spinor norm decision exhausted".into()),
            )),
        }
    }

    /// Find z0 with map(omega * z0) = target exactly.
    fn exact_scaling(&self, omega: &OmegaElement, target: &ThetaPoint) -> Result<ZElem> {
        match target {
            ThetaPoint::Odd(p) => {
                let (f0, z0val) = omega.mu_star()?;
                // need (N(c), c^4) = (f/f0, z/z0val)
                let fq = p.f().div(&f0);
                let zq = p.z().div(&z0val);
                zq.fourth_roots()
                    .into_iter()
                    .find(|c| c.norm() == fq)
                    .ok_or(Error::InconsistentLift)
            }
            ThetaPoint::Even(z) => {
                let base_val = omega.mu_bar()?;
                // mu_bar(omega c) = mu_bar(omega) c^2
                z.div(&base_val).sqrt().ok_or(Error::InconsistentLift)
            }
        }
    }

    /// Re-verify a Yes certificate: map(lift(witness) * z_scale) = theta.
    pub fn verify_certificate(&self, cert: &YesCertificate, target: &ThetaPoint) -> Result<bool> {
        let omega = lift_similitude_to_omega(&cert.witness)?.scale_z(&cert.z_scale);
        Ok(match target {
            ThetaPoint::Odd(p) => {
                let (f, z) = omega.mu_star()?;
                &f == p.f() && &z == p.z()
            }
            ThetaPoint::Even(z) => &omega.mu_bar()? == z,
        })
    }

    /// Weak norm principle experiment: sample lifted similitudes over L,
    /// push their theta values down by the norm, and decide membership
    /// over k. The j-commutation with norms is asserted on every sample.
    pub fn weak_np_experiment(
        &self,
        samples: usize,
        seed: u64,
        height_bound: i64,
    ) -> Result<NPReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outcomes = vec![];
        let (mut yes, mut no, mut unknown) = (0usize, 0usize, 0usize);
        for index in 0..samples {
            let g1 = random_proper_similitude(self.ctx_l.space(), &mut rng);
            let omega1 = lift_similitude_to_omega(&g1)?;
            let theta_l = self.map_point_l(&omega1)?;
            let normed = self.norm_of_theta(&theta_l)?;
            // j commutes with the norm: N(j_L(theta)) = j_k(N(theta))
            let j_l = self.ctx_l.j_map(&theta_l.class())?;
            let j_k = self.ctx_k.j_map(&normed.class())?;
            let n_of_j = SquareClass::new(&self.ext.norm_to_base(j_l.representative())?)?;
            assert_eq!(n_of_j, j_k, "j does not commute with the norm");
            let (alpha, decision) = self.decide_membership(&normed, height_bound)?;
            match &decision {
                NPDecision::Yes(_) => yes += 1,
                NPDecision::No(_) => no += 1,
                NPDecision::Unknown(_) => unknown += 1,
            }
            outcomes.push(SampleOutcome {
                index,
                normed_theta: normed,
                alpha,
                decision,
            });
        }
        Ok(NPReport {
            map_name: if self.ctx_k.n_is_odd() {
                "mu_star".into()
            } else {
                "mu_bar".into()
            },
            extension: format!("{:?}/{:?}", self.ext.top(), self.ext.base()),
            samples,
            yes,
            no,
            unknown,
            outcomes,
        })
    }

    /// Stream the non-Yes outcomes (counterexample candidates and
    /// exhaustion reports) of a weak-NP run.
    pub fn counterexample_search(
        &self,
        samples: usize,
        seed: u64,
        height_bound: i64,
    ) -> Result<Vec<SampleOutcome>> {
        let report = self.weak_np_experiment(samples, seed, height_bound)?;
        Ok(report
            .outcomes
            .into_iter()
            .filter(|o| !matches!(o.decision, NPDecision::Yes(_)))
            .collect())
    }
}
