mod common;

use common::{fixture, words};
use dwt_core::classes::ClassRef;
use dwt_core::oracle::{brute_force_barrier, power_iteration_gibbs, transfer_matrix_gibbs, TruncatedPotential};
use dwt_core::peierls::barrier;
use dwt_core::spectrum::{solve_lambda, GibbsMeasure, DEFAULT_TOL};
use dwt_core::Side;

#[test]
fn oracle_measure_is_normalized_and_shift_invariant() {
    let t = TruncatedPotential::new(&fixture("mixed.json"), 9).unwrap();
    let w = words(7);
    let o = transfer_matrix_gibbs(&t, 4.0, &w).unwrap();
    assert!((o.get("0").unwrap() + o.get("1").unwrap() - 1.0).abs() < 1e-12);
    for word in words(6) {
        let m = o.get(&word).unwrap();
        let left = o.get(&format!("0{word}")).unwrap() + o.get(&format!("1{word}")).unwrap();
        assert!((m - left).abs() < 1e-12, "{word}");
    }
}

#[test]
fn schur_and_power_iteration_agree() {
    let t = TruncatedPotential::new(&fixture("golden.json"), 7).unwrap();
    let w = words(5);
    for beta in [0.3, 1.0, 2.0] {
        let a = transfer_matrix_gibbs(&t, beta, &w).unwrap();
        let b = power_iteration_gibbs(&t, beta, &w).unwrap();
        assert!((a.loglam1 - b.loglam1).abs() < 1e-9, "beta={beta}");
        for ((word, ma), (_, mb)) in a.mu.iter().zip(&b.mu) {
            assert!((ma - mb).abs() < 1e-9, "beta={beta} {word}");
        }
    }
}

#[test]
fn deep_truncation_approaches_the_full_potential() {
    // the mixed fixture has head 5; depth 7 already freezes nothing that matters
    let r = fixture("mixed.json");
    let t = TruncatedPotential::new(&r, 7).unwrap();
    assert_eq!(t.reduced(), &r);
    let o = transfer_matrix_gibbs(&t, 6.0, &words(3)).unwrap();
    let g = GibbsMeasure::solve(&r, 6.0).unwrap();
    for (w, m) in &o.mu {
        assert!((m - g.mu(w).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn ground_energy_is_zero() {
    // -(1/β) ln λ → 0
    let t = TruncatedPotential::new(&fixture("golden.json"), 8).unwrap();
    let o = transfer_matrix_gibbs(&t, 50.0, &[]).unwrap();
    assert!(o.lambda().ln() / 50.0 < 1e-3);
    let sd = solve_lambda(t.reduced(), 50.0, DEFAULT_TOL).unwrap();
    assert!((o.loglam1 - sd.loglam1).abs() < 1e-9 * sd.loglam1.abs());
}

#[test]
fn barrier_table_matches_enumeration() {
    for name in ["golden.json", "mixed.json", "selectone.json"] {
        let t = TruncatedPotential::new(&fixture(name), 6).unwrap();
        let r = t.reduced();
        let table = barrier(r, 6);
        for from in Side::BOTH {
            let column = match from {
                Side::Zero => &table.from_fix0,
                Side::One => &table.from_fix1,
            };
            let targets = (1..=4u64)
                .flat_map(|n| [ClassRef::Zero(n), ClassRef::One(n)])
                .chain([ClassRef::Fix0, ClassRef::Fix1]);
            for to in targets {
                let est = brute_force_barrier(&t, from, to, 2, 6).unwrap();
                let expect = column.get(to);
                assert!(
                    est.value - est.bound - 1e-12 <= expect && expect <= est.value + 1e-12,
                    "{name} {from:?} -> {to}: table {expect}, enumeration {est:?}"
                );
            }
        }
    }
}

#[test]
fn fixed_points_have_zero_self_barrier() {
    let table = barrier(&fixture("golden.json"), 4);
    assert_eq!(table.from_fix0.fix0, 0.0);
    assert_eq!(table.from_fix1.fix1, 0.0);
    let r = fixture("golden.json");
    assert_eq!(table.from_fix0.fix1, r.h0().tail());
    assert_eq!(table.from_fix1.fix0, r.h1().tail());
}
