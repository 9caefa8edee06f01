//! Property tests over random residues, matrices and small subgroups.

use locconj::conjcls::{class_invariant, similarity_rep};
use locconj::families::{diagonal_swap, named, FamilyId};
use locconj::{are_conjugate, are_locally_conjugate, Mat2, Modulus, PPart, Subgroup};
use proptest::prelude::*;

fn modulus() -> impl Strategy<Value = Modulus> {
    (prop_oneof![Just(3u32), Just(5), Just(7)], 1u32..=2)
        .prop_map(|(p, k)| Modulus::new(p, k).unwrap())
}

fn matrix_in(m: Modulus) -> impl Strategy<Value = Mat2> {
    let n = m.m() as i64;
    [0..n, 0..n, 0..n, 0..n].prop_map(move |[a, b, c, d]| Mat2::new(m, a, b, c, d))
}

fn invertible_in(m: Modulus) -> impl Strategy<Value = Mat2> {
    matrix_in(m).prop_filter("invertible", Mat2::is_invertible)
}

fn mod5() -> Modulus {
    Modulus::new(5, 1).unwrap()
}

fn mod9() -> Modulus {
    Modulus::new(3, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn residue_ring_laws(m in modulus(), a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
        let (a, b, c) = (m.residue(a), m.residue(b), m.residue(c));
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, m.zero());
        if a.is_unit() {
            prop_assert_eq!(a * a.inv().unwrap(), m.one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn teichmuller_lift_is_a_multiplicative_section(p in prop_oneof![Just(3u32), Just(5), Just(7)], x in 1i64..7, y in 1i64..7) {
        let f = Modulus::new(p, 1).unwrap();
        let (x, y) = (f.residue(x), f.residue(y));
        prop_assume!(x.is_unit() && y.is_unit());
        let (tx, ty) = (x.teichmuller_lift().unwrap(), y.teichmuller_lift().unwrap());
        prop_assert_eq!(tx.reduce(), x);
        prop_assert_eq!((x * y).teichmuller_lift().unwrap(), tx * ty);
        prop_assert_eq!(tx.pow(p as u64 - 1), f.square().one());
    }

    #[test]
    fn det_is_multiplicative_and_inverse_works((m, a, b) in modulus().prop_flat_map(|m| (Just(m), matrix_in(m), invertible_in(m)))) {
        prop_assert_eq!((a * b).det(), a.det() * b.det());
        let bi = b.inv().unwrap();
        prop_assert!((b * bi).is_identity());
        prop_assert_eq!(Mat2::decode(m, a.encode()).unwrap(), a);
        prop_assert_eq!(Mat2::parse(&a.to_string(), m).unwrap(), a);
    }

    #[test]
    fn class_invariant_is_a_conjugacy_invariant((g, x) in modulus().prop_flat_map(|m| (matrix_in(m), invertible_in(m)))) {
        prop_assert_eq!(class_invariant(&x.conj(&g).unwrap()), class_invariant(&g));
    }

    #[test]
    fn similarity_rep_is_similar_to_the_input(g in matrix_in(mod5()), x in invertible_in(mod5())) {
        let rep = similarity_rep(&g).unwrap();
        prop_assert_eq!(similarity_rep(&x.conj(&g).unwrap()).unwrap(), rep);
        prop_assert_eq!(class_invariant(&rep.matrix(5)), class_invariant(&g));
    }

    #[test]
    fn p_part_round_trips(a in 0i64..3, b in 0i64..3, c in 0i64..3, d in 0i64..3) {
        let f = mod9().base();
        let k = PPart(Mat2::new(f, a, b, c, d)).embed();
        prop_assert!(k.in_kernel());
        prop_assert_eq!(k.p_part().unwrap().matrix(), Mat2::new(f, a, b, c, d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_a_subgroup(gens in proptest::collection::vec(invertible_in(mod9()), 1..3)) {
        let h = Subgroup::closure(mod9(), &gens).unwrap();
        for g in &gens {
            prop_assert!(h.contains(g));
        }
        let elems: Vec<Mat2> = h.iter().take(40).collect();
        for x in &elems {
            prop_assert!(h.contains(&x.inv().unwrap()));
            for y in &elems {
                prop_assert!(h.contains(&(*x * *y)));
            }
        }
        prop_assert_eq!(h.order() % h.kernel_part().unwrap().order(), 0);
        prop_assert_eq!(h.order(), h.kernel_part().unwrap().order() * h.image_mod_p().unwrap().order());
    }

    #[test]
    fn conjugates_are_locally_conjugate_and_found(
        gens in proptest::collection::vec(invertible_in(mod9()), 1..3),
        x in invertible_in(mod9()),
    ) {
        let h = Subgroup::closure(mod9(), &gens).unwrap();
        let hx = h.conjugate(&x).unwrap();
        prop_assert!(are_locally_conjugate(&h, &hx));
        let w = are_conjugate(&h, &hx).expect("a conjugator exists");
        prop_assert_eq!(h.conjugate(&w).unwrap(), hx);
    }

    #[test]
    fn kernel_part_is_normal(gens in proptest::collection::vec(invertible_in(mod9()), 1..3)) {
        let h = Subgroup::closure(mod9(), &gens).unwrap();
        let k = h.kernel_part().unwrap();
        prop_assert!(k.is_subgroup_of(&named(FamilyId::KerPhi, mod9()).unwrap()));
        for g in &gens {
            prop_assert!(k.is_normalized_by(g));
        }
    }

    #[test]
    fn diagonal_swap_is_an_involution(w in 1i64..9, z in 1i64..9) {
        prop_assume!(w % 3 != 0 && z % 3 != 0);
        let d = Subgroup::closure(mod9(), &[Mat2::diag(mod9(), w, z)]).unwrap();
        let s = diagonal_swap(&d).unwrap();
        prop_assert_eq!(diagonal_swap(&s).unwrap(), d.clone());
        prop_assert!(are_locally_conjugate(&d, &s));
    }
}
