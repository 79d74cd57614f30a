//! Acceptance gate: one pass/fail line per criterion, all arithmetic exact.

use normlab_core::brauer::{
    corestriction_consequence_check, hilbert_symbol_int, local_solvability_oracle, rat,
    ramified_places, Place, QuaternionClass,
};
use normlab_core::clifford::{lift_similitude_to_omega, spin_membership};
use normlab_core::field::{Field, SquareClass};
use normlab_core::npharness::{ExtensionSpec, NPDecision, NormHarness};
use normlab_core::obstruction::{
    enumerate_u, h1_mu4z_finite_field, u_quotient_order, SClass, SpecialResult,
    SpinorNormDecision, UClass, ZSquareClass,
};
use normlab_core::quadext::QuadExt;
use normlab_core::quadform::{random_proper_isometry, QuadSpace};
use normlab_core::similitude::{
    enumerate_pgo_plus_classes, find_similitude_with_multiplier, random_proper_similitude,
    PGOPlusClass, Similitude, SimilitudeSearch,
};
use normlab_core::obstruction::ObstructionContext;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::Command;

fn pass(n: usize, msg: &str) {
    println!("criterion {n}: PASS - {msg}");
}

fn q4_f3() -> QuadSpace {
    QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1, 1, 2]).unwrap()
}

fn q6_f3() -> QuadSpace {
    QuadSpace::from_ints(&Field::prime(3).unwrap(), &[1, 1, 1, 1, 1, 1]).unwrap()
}

fn q4_f5() -> QuadSpace {
    QuadSpace::from_ints(&Field::prime(5).unwrap(), &[1, 1, 1, 2]).unwrap()
}

fn q6_f5() -> QuadSpace {
    QuadSpace::from_ints(&Field::prime(5).unwrap(), &[1, 1, 1, 1, 1, 3]).unwrap()
}

/// Does alpha lie in the spinor norm group of the space (k*/Sn triviality)?
fn trivial_mod_spinor_norms(space: &QuadSpace, alpha: &SquareClass) -> bool {
    space
        .spinor_norm_group()
        .unwrap()
        .iter()
        .any(|c| c == alpha)
}

#[test]
fn criterion_1_identity_suite() {
    // central units z: x(z) = z^2 k*, mu_bar(z) = z^2 (n even),
    // mu_star(z) = (N(z), z^4) (n odd), over Z = F_9 for both test forms
    for space in [q4_f3(), q6_f3()] {
        let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
        let id = Similitude::identity(&space);
        let omega0 = lift_similitude_to_omega(&id).unwrap();
        for z in ext.units() {
            let omega = omega0.scale_z(&z);
            let z2 = z.mul(&z);
            let x = omega.x_map().unwrap();
            let ratio = x.div(&z2);
            assert!(ratio.in_base() && !ratio.is_zero(), "x(z) = z^2 mod k*");
            if space.dim() % 4 == 0 {
                assert_eq!(omega.mu_bar().unwrap(), z2, "mu_bar(z) = z^2");
            } else {
                let (f, zz) = omega.mu_star().unwrap();
                assert_eq!(f, z.norm(), "mu_star first component is the norm");
                assert_eq!(zz, z2.mul(&z2), "mu_star second component is z^4");
            }
        }
    }
    pass(1, "central-unit identities for x, mu_bar, mu_star on both forms over F_3");
}

#[test]
fn criterion_2_diagram_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut checked = 0usize;
    for space in [q4_f3(), q6_f3(), q4_f5(), q6_f5()] {
        let ctx = ObstructionContext::new(space.clone()).unwrap();
        for _ in 0..30 {
            // left square: i(Sn(h)) = S([h]) for proper isometries h
            let h = random_proper_isometry(&space, &mut rng);
            let sn = h.spinor_norm().unwrap();
            let class = PGOPlusClass::new(&Similitude::from_isometry(&h)).unwrap();
            assert_eq!(ctx.i_map(&sn).unwrap(), ctx.s_of(&class).unwrap());
            // right square: j(S([g])) = mu([g]) mod squares
            let g = random_proper_similitude(&space, &mut rng);
            let gc = PGOPlusClass::new(&g).unwrap();
            let j = ctx.j_map(&ctx.s_of(&gc).unwrap()).unwrap();
            assert_eq!(j, SquareClass::new(g.multiplier()).unwrap());
            checked += 2;
        }
    }
    assert!(checked >= 100);
    // kernel(j) = image(i), full enumeration over F_3 on both parities
    for space in [q4_f3(), q6_f3()] {
        let ctx = ObstructionContext::new(space.clone()).unwrap();
        let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
        let image: Vec<SClass> = space
            .field()
            .elements()
            .into_iter()
            .filter(|c| !c.is_zero())
            .map(|c| ctx.i_map(&SquareClass::new(&c).unwrap()).unwrap())
            .collect();
        let all: Vec<SClass> = if space.dim() % 4 == 2 {
            enumerate_u(&ext)
                .into_iter()
                .map(|p| SClass::Odd(UClass::new(p)))
                .collect()
        } else {
            ext.units()
                .into_iter()
                .map(|z| SClass::Even(ZSquareClass::new(z).unwrap()))
                .collect()
        };
        for c in &all {
            let in_kernel = ctx.j_map(c).unwrap().is_trivial();
            let in_image = image.iter().any(|d| d == c);
            assert_eq!(in_kernel, in_image, "kernel(j) = image(i)");
        }
    }
    pass(2, "both diagram squares on 240 random elements plus kernel(j) = image(i) over F_3");
}

#[test]
fn criterion_3_cohomology_cross_check() {
    let space = q6_f3();
    let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
    let direct = u_quotient_order(&ext);
    assert_eq!(direct, 4, "|U/U0| over F_3");
    let h1 = h1_mu4z_finite_field(&space).unwrap();
    assert_eq!(h1.order, direct as u64, "coinvariants agree with |U/U0|");
    pass(3, "|U(F_3)/U0(F_3)| = 4 = |H^1| by two independent enumerations");
}

#[test]
fn criterion_4_surjectivity_and_kernel() {
    // n even: the image of mu_bar over all lifted classes times Z* is all
    // of Z* = F_9*, and the kernel is exactly the spin-positive part
    let space = q4_f3();
    let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
    let units = ext.units();
    let one = ext.one();
    let mut image: BTreeSet<Vec<u8>> = BTreeSet::new();
    for class in enumerate_pgo_plus_classes(&space).unwrap() {
        let omega0 = lift_similitude_to_omega(class.representative()).unwrap();
        for z in &units {
            let omega = omega0.scale_z(z);
            let v = omega.mu_bar().unwrap();
            image.insert(v.canonical_key());
            assert_eq!(
                v == one,
                spin_membership(omega.value()),
                "kernel of mu_bar is the spin-positive part"
            );
        }
    }
    assert_eq!(image.len(), units.len(), "mu_bar hits all of Z*");

    // n odd sampled analogue: mu_star hits every U-point
    let space = q6_f3();
    let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
    let mut remaining: BTreeSet<Vec<u8>> = enumerate_u(&ext)
        .iter()
        .map(|p| p.canonical_key())
        .collect();
    let total = remaining.len();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..40 {
        if remaining.is_empty() {
            break;
        }
        let g = random_proper_similitude(&space, &mut rng);
        let omega0 = lift_similitude_to_omega(&g).unwrap();
        for z in ext.units() {
            let (f, zz) = omega0.scale_z(&z).mu_star().unwrap();
            let p = normlab_core::obstruction::UPoint::new(f, zz).unwrap();
            remaining.remove(&p.canonical_key());
        }
    }
    assert!(
        remaining.is_empty(),
        "sampled mu_star hit {} of {total} U-points",
        total - remaining.len()
    );
    pass(4, "mu_bar image is all of F_9* with spin kernel; sampled mu_star covers U");
}

/// Constructive membership: recompose the witness with the certificate
/// reflections, lift, and compare at the class level.
fn membership_constructively(
    ctx: &ObstructionContext,
    theta: &SClass,
    witness: &Similitude,
    cert_vectors: &[Vec<normlab_core::FieldElement>],
) -> bool {
    let space = ctx.space();
    let mut adjusted = witness.clone();
    for v in cert_vectors {
        adjusted = adjusted.compose(&Similitude::from_isometry(&space.reflection(v).unwrap()));
    }
    let omega = lift_similitude_to_omega(&adjusted).unwrap();
    let hit = if ctx.n_is_odd() {
        let (f, z) = omega.mu_star().unwrap();
        SClass::Odd(UClass::new(
            normlab_core::obstruction::UPoint::new(f, z).unwrap(),
        ))
    } else {
        SClass::Even(ZSquareClass::new(omega.mu_bar().unwrap()).unwrap())
    };
    &hit == theta
}

#[test]
fn criterion_5_obstruction_theorem_finite() {
    // exhaustive on q4/F_3: every witness class against every theta class
    let space = q4_f3();
    let ctx = ObstructionContext::new(space.clone()).unwrap();
    let ext = QuadExt::new(space.field(), &space.disc_scalar()).unwrap();
    let thetas: Vec<SClass> = {
        let mut out: Vec<SClass> = vec![];
        for z in ext.units() {
            let c = SClass::Even(ZSquareClass::new(z).unwrap());
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    };
    let class_data: Vec<_> = enumerate_pgo_plus_classes(&space)
        .unwrap()
        .into_iter()
        .map(|c| {
            let j = ctx.j_map(&ctx.s_of(&c).unwrap()).unwrap();
            (c, j)
        })
        .collect();
    for theta in &thetas {
        match ctx.is_special(theta, 0).unwrap() {
            SpecialResult::Special(_) => {}
            other => panic!("finite theta must be special, got {other:?}"),
        }
        let j_theta = ctx.j_map(theta).unwrap();
        let mut witnesses = 0usize;
        // alpha is defined against witnesses sharing theta's multiplier class
        for (class, j) in class_data.iter().filter(|(_, j)| *j == j_theta) {
            let _ = j;
            witnesses += 1;
            let res = ctx
                .obstruction_alpha(theta, class.representative(), 0)
                .unwrap();
            assert!(
                trivial_mod_spinor_norms(&space, &res.alpha),
                "alpha trivial in k*/Sn"
            );
            let certs = match &res.verdict {
                SpinorNormDecision::Yes(v) => v.clone(),
                other => panic!("finite verdict must be yes, got {other:?}"),
            };
            assert!(
                membership_constructively(&ctx, theta, class.representative(), &certs),
                "membership realized constructively"
            );
        }
        assert!(witnesses > 0, "every special theta has witnesses");
    }
    // sampled over the F_5 forms, both parities
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for space in [q4_f5(), q6_f5()] {
        let ctx = ObstructionContext::new(space.clone()).unwrap();
        for _ in 0..12 {
            let g = random_proper_similitude(&space, &mut rng);
            let c = loop {
                let c = space.field().from_int(rng.gen_range(1..5));
                if !c.is_zero() {
                    break c;
                }
            };
            let base = ctx.s_of(&PGOPlusClass::new(&g).unwrap()).unwrap();
            let theta = base.mul(&ctx.i_map(&SquareClass::new(&c).unwrap()).unwrap());
            let witness = match ctx.is_special(&theta, 0).unwrap() {
                SpecialResult::Special(w) => w,
                other => panic!("finite theta must be special, got {other:?}"),
            };
            let res = ctx.obstruction_alpha(&theta, &witness, 0).unwrap();
            assert!(trivial_mod_spinor_norms(&space, &res.alpha));
            let certs = match &res.verdict {
                SpinorNormDecision::Yes(v) => v.clone(),
                other => panic!("finite verdict must be yes, got {other:?}"),
            };
            assert!(membership_constructively(&ctx, &theta, &witness, &certs));
        }
    }
    pass(5, "image membership = spinor-norm verdict, alpha trivial in k*/Sn, exhaustive on q4/F_3");
}

#[test]
fn criterion_6_alpha_well_definedness() {
    // ker(i) is trivial for q6/F_3, so the change-of-witness law holds
    // strictly mod squares
    let space = q6_f3();
    let ctx = ObstructionContext::new(space.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..50 {
        let g = random_proper_similitude(&space, &mut rng);
        let c = space.field().from_int(rng.gen_range(1..3));
        let theta = ctx
            .s_of(&PGOPlusClass::new(&g).unwrap())
            .unwrap()
            .mul(&ctx.i_map(&SquareClass::new(&c).unwrap()).unwrap());
        let h = random_proper_isometry(&space, &mut rng);
        let gh = g.compose(&Similitude::from_isometry(&h));
        let a1 = ctx.obstruction_alpha(&theta, &g, 0).unwrap().alpha;
        let a2 = ctx.obstruction_alpha(&theta, &gh, 0).unwrap().alpha;
        let ratio = SquareClass::new(
            &a1.representative().div(a2.representative()),
        )
        .unwrap();
        assert_eq!(ratio, h.spinor_norm().unwrap(), "alpha changes by Sn(h)");
    }
    pass(6, "alpha ratio equals Sn(h) mod squares on 50 witness pairs");
}

#[test]
fn criterion_7_scharlau_norm_principle() {
    // exhaustive over F_9/F_3 on q4: every norm of an L-multiplier is the
    // multiplier of a constructed proper similitude over F_3
    let f3 = Field::prime(3).unwrap();
    let f9 = Field::finite(3, 2).unwrap();
    let ext = ExtensionSpec::finite(&f3, 2).unwrap();
    let space_l = QuadSpace::from_ints(&f9, &[1, 1, 1, 2]).unwrap();
    let space_k = q4_f3();
    for f in f9.elements() {
        if f.is_zero() {
            continue;
        }
        let g1 = match find_similitude_with_multiplier(&space_l, &f, 0).unwrap() {
            SimilitudeSearch::Found(g) => g.correct_to_proper().unwrap(),
            other => panic!("multiplier {f:?} not realized over F_9: {other:?}"),
        };
        let nf = ext.norm_to_base(g1.multiplier()).unwrap();
        let g = match find_similitude_with_multiplier(&space_k, &nf, 0).unwrap() {
            SimilitudeSearch::Found(g) => g.correct_to_proper().unwrap(),
            other => panic!("norm {nf:?} not realized over F_3: {other:?}"),
        };
        assert_eq!(g.multiplier(), &nf, "mu(g) = f verified");
        assert!(g.is_proper().unwrap());
    }
    // curated rational example: L = Q(sqrt 2), g1 = (1 + sqrt 2) id,
    // mu(g1) = 3 + 2 sqrt 2, N(mu) = 1, realized by the identity
    let q = Field::rationals();
    let space = QuadSpace::from_ints(&q, &[1, 1, 1, 3]).unwrap();
    let harness = NormHarness::new(space, ExtensionSpec::quadratic_of_q(2).unwrap()).unwrap();
    let l = harness.ctx_l().space().field().clone();
    let one_plus = l.from_int(1).add(&l.sqrt_d());
    let g1 = Similitude::identity(harness.ctx_l().space()).scale(&one_plus);
    let g = harness
        .scharlau_go_plus(&g1, 5)
        .unwrap()
        .expect("norm 1 realized over Q");
    assert!(g.multiplier().is_one());
    assert!(g.is_proper().unwrap());
    pass(7, "Scharlau norm principle exhaustive over F_9/F_3 plus the curated Q example");
}

#[test]
fn criterion_8_hilbert_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    // product formula: the symbol is -1 at an even number of places, i.e.
    // the product over all relevant places is +1
    for _ in 0..200 {
        let pick = |rng: &mut ChaCha8Rng| loop {
            let v = rng.gen_range(-40i64..=40);
            if v != 0 {
                break v;
            }
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let mut places: BTreeSet<Place> = BTreeSet::from([Place::Prime(2), Place::Real]);
        for n in [a, b] {
            let mut m = n.unsigned_abs();
            while m % 2 == 0 {
                m /= 2;
            }
            let mut p = 3u64;
            while p * p <= m {
                if m % p == 0 {
                    places.insert(Place::Prime(p));
                    while m % p == 0 {
                        m /= p;
                    }
                }
                p += 2;
            }
            if m > 2 {
                places.insert(Place::Prime(m));
            }
        }
        let product: i32 = places
            .iter()
            .map(|&pl| hilbert_symbol_int(a, b, pl).unwrap())
            .product();
        assert_eq!(product, 1, "product formula for ({a},{b})");
    }
    // symbol vs solvability oracle
    let oracle_places = [Place::Real, Place::Prime(2), Place::Prime(3), Place::Prime(5)];
    let mut checked = 0;
    while checked < 50 {
        let a = rng.gen_range(-12i64..=12);
        let b = rng.gen_range(-12i64..=12);
        if a == 0 || b == 0 {
            continue;
        }
        let place = oracle_places[rng.gen_range(0..oracle_places.len())];
        assert_eq!(
            hilbert_symbol_int(a, b, place).unwrap() == 1,
            local_solvability_oracle(&rat(a), &rat(b), place).unwrap(),
            "({a},{b}) at {place}"
        );
        checked += 1;
    }
    // (2, 5) ramifies exactly at {2, 5}
    assert_eq!(
        ramified_places(&rat(2), &rat(5)).unwrap(),
        BTreeSet::from([Place::Prime(2), Place::Prime(5)])
    );
    assert!(!QuaternionClass::new(rat(2), rat(5)).unwrap().is_split());
    // corestriction consequence: 50 certified instances, zero failures
    let q = Field::rationals();
    let mut done = 0;
    while done < 50 {
        let m = [2i64, 3, 5, 7, 6][rng.gen_range(0..5)];
        let d = loop {
            let v = rng.gen_range(-7i64..=7);
            if v != 0 && v != 1 && v != m && v != 4 && v != -4 {
                break v;
            }
        };
        let l = QuadExt::new(&q, &q.from_int(m)).unwrap();
        let s = l.new_elem(
            q.from_int(rng.gen_range(-3i64..=3)),
            q.from_int(rng.gen_range(-3i64..=3)),
        );
        let t = l.new_elem(
            q.from_int(rng.gen_range(-3i64..=3)),
            q.from_int(rng.gen_range(-3i64..=3)),
        );
        let f1 = s.mul(&s).sub(&t.mul(&t).scale(&q.from_int(d)));
        if f1.is_zero() {
            continue;
        }
        match corestriction_consequence_check(&rat(d), &f1, 3).unwrap() {
            Some(verdict) => {
                assert!(verdict, "corestriction consequence for m={m} d={d}");
                done += 1;
            }
            None => {}
        }
    }
    pass(8, "product formula x200, oracle agreement x50, (2,5) ramification, corestriction x50");
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_normlab");
    let configs = [
        (
            "obstruction",
            r#"{ "schema": "v1",
                 "form": { "field": { "kind": "fp", "p": 5 }, "diagonal": [1, 1, 1, 2] },
                 "samples": 15, "seed": 9 }"#,
        ),
        (
            "obstruction",
            r#"{ "schema": "v1",
                 "form": { "field": { "kind": "fp", "p": 3 }, "diagonal": [1, 1, 1, 2] },
                 "exhaustive": true }"#,
        ),
        (
            "hilbert",
            r#"{ "schema": "v1",
                 "pairs": [[2, 5], [-1, -1], [3, 7], [6, 10], [-2, -3]] }"#,
        ),
    ];
    for (idx, (cmd, cfg)) in configs.iter().enumerate() {
        let cfg_path = dir.path().join(format!("cfg{idx}.json"));
        std::fs::write(&cfg_path, cfg).unwrap();
        let mut outputs = vec![];
        for run in 0..2 {
            let out_path = dir.path().join(format!("out{idx}_{run}.json"));
            let status = Command::new(bin)
                .arg(cmd)
                .arg("--config")
                .arg(&cfg_path)
                .arg("--out")
                .arg(&out_path)
                .status()
                .unwrap();
            assert!(status.success(), "{cmd} run {run} failed");
            outputs.push(std::fs::read(&out_path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "byte-identical reports for {cmd}");
    }
    pass(9, "byte-identical reports across repeated seeded runs of three configurations");
}

#[test]
fn weak_np_over_f27_supplement() {
    // end-to-end norm-principle run feeding the obstruction machinery
    let f3 = Field::prime(3).unwrap();
    let ext = ExtensionSpec::finite(&f3, 3).unwrap();
    let harness = NormHarness::new(q4_f3(), ext).unwrap();
    let report = harness.weak_np_experiment(4, 123, 0).unwrap();
    assert_eq!(report.yes, report.samples);
    for o in &report.outcomes {
        if let NPDecision::Yes(cert) = &o.decision {
            assert!(harness.verify_certificate(cert, &o.normed_theta).unwrap());
        }
    }
}
