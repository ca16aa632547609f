mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;

use orbiseifert::exactmath::{int, Int};
use orbiseifert::fpgroup::{
    abelianize, build_pi1_orb_presentation, coset_enumerate, parse_word, simply_connected_decision,
    tietze_simplify, tietze_with_table, CosetStatus, CosetTable, FpError, Presentation, Word,
    PI1_GENERATORS,
};
use orbiseifert::seifert::AbelianGroup;

fn order_of(a: &common::Perm) -> usize {
    let id: common::Perm = (0..a.len()).collect();
    let mut x = a.clone();
    let mut n = 1;
    while x != id {
        x = common::compose(&x, a);
        n += 1;
    }
    n
}

fn finite_order(g: &AbelianGroup) -> Option<Int> {
    (g.rank == 0).then(|| g.torsion.iter().fold(Int::one(), |a, b| a * b))
}

fn complete(n: usize) -> CosetTable {
    CosetTable {
        status: CosetStatus::Complete(n),
        rows: vec![],
        defined: n,
    }
}

#[test]
fn abelianization_examples() {
    let k = Presentation::parse(&["x", "y"], "x^2, y^2, (x y)^2").unwrap();
    assert_eq!(
        abelianize(&k),
        AbelianGroup::from_cyclic(0, &[int(2), int(2)]).unwrap()
    );
    let c6 = Presentation::parse(&["a"], "a^6").unwrap();
    assert_eq!(
        abelianize(&c6),
        AbelianGroup::from_cyclic(0, &[int(6)]).unwrap()
    );
    let free = Presentation::parse(&["a", "b"], "").unwrap();
    assert_eq!(
        abelianize(&free),
        AbelianGroup::from_cyclic(2, &[]).unwrap()
    );
}

#[test]
fn tietze_examples() {
    let p = Presentation::parse(&["a", "b"], "a b^-1").unwrap();
    let s = tietze_simplify(&p);
    assert_eq!(s.num_generators(), 1);
    assert!(s.relators.is_empty());
    let k = Presentation::parse(&["x", "y"], "x^2, y^2, (x y)^2").unwrap();
    assert_eq!(tietze_simplify(&k), k);
    assert_eq!(tietze_simplify(&tietze_simplify(&p)), tietze_simplify(&p));
}

#[test]
fn coset_examples() {
    let k = Presentation::parse(&["x", "y"], "x^2, y^2, (x y)^2").unwrap();
    assert_eq!(
        coset_enumerate(&k, &[], 100).status,
        CosetStatus::Complete(4)
    );
    let c6 = Presentation::parse(&["a"], "a^6").unwrap();
    let t = coset_enumerate(&c6, &[Word::power_of(0, 2)], 100);
    assert_eq!(t.status, CosetStatus::Complete(2));
    assert!(t.verify(&c6, &[Word::power_of(0, 2)]));
    let free = Presentation::parse(&["a", "b"], "").unwrap();
    let t = coset_enumerate(&free, &[], 100);
    assert_eq!(t.status, CosetStatus::Exhausted(100));
    assert!(!t.verify(&free, &[]));
}

#[test]
fn small_groups_match_permutation_orders() {
    for g in common::small_groups() {
        let p = Presentation::parse(g.gens, g.rels).unwrap();
        // the permutations really satisfy the relators
        let id: common::Perm = (0..g.perms[0].len()).collect();
        for r in &p.relators {
            assert_eq!(common::eval_word(r.letters(), &g.perms), id, "{}", g.name);
        }
        let order = common::closure_order(&g.perms);
        let t = coset_enumerate(&p, &[], 2000);
        assert_eq!(t.index(), Some(order), "{}", g.name);
        assert!(t.verify(&p, &[]));

        let h = Word::power_of(0, 1);
        let t = coset_enumerate(&p, std::slice::from_ref(&h), 2000);
        assert_eq!(
            t.index(),
            Some(order / order_of(&g.perms[0])),
            "{} over <{}>",
            g.name,
            g.gens[0]
        );
        assert!(t.verify(&p, &[h]));

        let ab = abelianize(&p);
        let n = finite_order(&ab).unwrap();
        assert!((Int::from(order) % n).is_zero(), "{}", g.name);

        let table = coset_enumerate(&p, &[], 2000);
        let s = tietze_with_table(&p, &table);
        assert_eq!(abelianize(&s), ab, "{}", g.name);
        assert_eq!(
            coset_enumerate(&s, &[], 2000).index(),
            Some(order),
            "{}",
            g.name
        );
    }
}

#[test]
fn orbifold_group_for_p_three() {
    let p = build_pi1_orb_presentation(&int(3), 5).unwrap();
    assert_eq!(p.generators, PI1_GENERATORS.map(String::from).to_vec());
    let ab = abelianize(&p);
    assert_eq!(ab.rank, 0);
    assert!(ab.torsion.iter().all(|t| (int(2) % t).is_zero()));
    let t = coset_enumerate(&p, &[], 10_000);
    let n = t.index().unwrap();
    assert_eq!(4 % n, 0);
    assert_eq!(simply_connected_decision(&t, true), Ok(true));

    // U^8 and U^27 together force U = 1 in the abelianization
    let mut with_u = p.clone();
    with_u.relators.push(Word::power_of(10, 1));
    assert_eq!(abelianize(&with_u), ab);

    let s = tietze_with_table(&p, &t);
    assert!(s.num_generators() <= 2);
    assert_eq!(abelianize(&s), ab);
    assert_eq!(coset_enumerate(&s, &[], 10_000).index(), Some(n));
}

#[test]
fn orbifold_group_rejects_bad_input() {
    assert!(matches!(
        build_pi1_orb_presentation(&int(9), 3),
        Err(FpError::NotPrime(_))
    ));
    assert!(matches!(
        build_pi1_orb_presentation(&int(3), 0),
        Err(FpError::BadExponent(0))
    ));
    assert!(matches!(
        build_pi1_orb_presentation(&int(3), 17),
        Err(FpError::BadExponent(17))
    ));
}

#[test]
fn simply_connected_examples() {
    assert_eq!(simply_connected_decision(&complete(4), true), Ok(true));
    assert_eq!(simply_connected_decision(&complete(1), true), Ok(true));
    assert_eq!(simply_connected_decision(&complete(4), false), Ok(false));
    assert!(simply_connected_decision(&complete(8), true).is_err());
    let exhausted = CosetTable {
        status: CosetStatus::Exhausted(10),
        rows: vec![],
        defined: 10,
    };
    assert!(simply_connected_decision(&exhausted, true).is_err());
}

fn word(gens: i32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=gens, any::<bool>()), 0..=max_len)
        .prop_map(|v| Word::new(v.into_iter().map(|(g, s)| if s { g } else { -g }).collect()))
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (1i32..=3).prop_flat_map(|n| {
        prop::collection::vec(word(n, 8), 0..=4).prop_map(move |rels| {
            let gens: Vec<String> = ["a", "b", "c"][..n as usize]
                .iter()
                .map(|s| s.to_string())
                .collect();
            Presentation::new(gens, rels).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn words_round_trip_through_text(w in word(3, 12)) {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let text = w.render(&names);
        prop_assert_eq!(parse_word(&text, &names).unwrap(), w.clone());
        // free reduction leaves no cancelling neighbours
        prop_assert!(w.letters().windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!(w.mul(&w.inverse()), Word::identity());
    }

    #[test]
    fn tietze_preserves_abelianization(p in presentation()) {
        let s = tietze_simplify(&p);
        prop_assert_eq!(abelianize(&s), abelianize(&p));
    }

    #[test]
    fn complete_index_is_a_multiple_of_the_abelian_quotient(p in presentation()) {
        let t = coset_enumerate(&p, &[], 400);
        if let Some(n) = t.index() {
            prop_assert!(t.verify(&p, &[]));
            let ab = abelianize(&p);
            let order = finite_order(&ab);
            prop_assert!(order.is_some(), "finite group with infinite abelianization");
            prop_assert!((Int::from(n) % order.unwrap()).is_zero());
            let s = tietze_with_table(&p, &t);
            prop_assert_eq!(coset_enumerate(&s, &[], 400).index(), Some(n));
        }
    }

    #[test]
    fn odd_primes_leave_no_odd_torsion(p in prop::sample::select(vec![3i64, 5, 7, 11, 13]), e in 1u32..=3) {
        let pres = build_pi1_orb_presentation(&int(p), e).unwrap();
        let ab = abelianize(&pres);
        prop_assert_eq!(ab.rank, 0);
        for t in &ab.torsion {
            prop_assert!((int(2) % t).is_zero(), "factor {}", t);
        }
    }
}
