mod common;

use common::{beta_grid, fixture, random_potential, slope};
use dwt_core::asymptotics::{
    coefficient, equivalents, phase_grid, profile, FamilyTemplate, Regime,
};
use dwt_core::peierls::{
    boundary_seed, corollary_identities, lax_oleinik_step, solve_calibrated, subaction_violation,
};
use dwt_core::potential::{reduce, GeneralDoubleWell, PotentialSpec};
use dwt_core::spectrum::{solve_lambda, GibbsMeasure, DEFAULT_TOL};
use dwt_core::{Error, PlateauSeq, ReducedPotential};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family(text: &str) -> FamilyTemplate {
    serde_json::from_str(text).unwrap()
}

#[test]
fn constant_family_is_all_half_half() {
    let f = family(r#"{"h0":{"tail":"s"},"h1":{"tail":"t"}}"#);
    let grid: Vec<f64> = (1..=8).map(|i| i as f64 * 0.25).collect();
    for point in phase_grid(&f, &grid, &grid) {
        let p = point.profile.unwrap();
        assert_eq!(p.regime, Regime::Barycenter);
        assert_eq!(p.kappa, 0);
        assert_eq!(p.weights, Some((0.5, 0.5)));
    }
}

#[test]
fn regime_flips_at_unit_plateau() {
    let f: FamilyTemplate = serde_json::from_str(&common::fixture_text("phase_family.json")).unwrap();
    let m: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
    for point in phase_grid(&f, &m, &[3.0]) {
        let p = point.profile.unwrap();
        let s = point.s;
        if s < 1.0 - 1e-9 {
            assert_eq!(p.regime, Regime::SelectOne, "m={s}");
        } else {
            assert_eq!(p.regime, Regime::Barycenter, "m={s}");
        }
        if (s - 1.0).abs() < 1e-9 {
            assert_eq!(p.kappa, 1);
            assert!((p.c - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        }
    }
}

#[test]
fn invalid_grid_point_is_flagged_not_fatal() {
    let f = family(r#"{"h0":{"tail":"s"},"h1":{"tail":1.0}}"#);
    let points = phase_grid(&f, &[-1.0, 1.0], &[0.0]);
    assert!(points[0].profile.is_err());
    assert!(points[1].profile.is_ok());
}

#[test]
fn coefficient_solves_its_quadratic() {
    for k in 0..10 {
        let c = coefficient(k);
        assert!((c * c - k as f64 * c - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gamma_zero_equivalences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let r = random_potential(&mut rng, true);
        let d = r.derived();
        let e = dwt_core::asymptotics::exponents(&d);
        let gamma = e.iter().copied().fold(f64::INFINITY, f64::min);
        let tails_zero = d.hinf0 == 0.0 && d.hinf1 == 0.0;
        let all_equal = e[0] == e[1] && e[1] == e[2];
        assert_eq!(gamma == 0.0, tails_zero);
        assert_eq!(gamma == 0.0, all_equal && e[0] == 0.0);
        if d.hinf0 == d.hinf1 {
            if let Ok(p) = profile(&r) {
                assert_ne!(p.regime, Regime::SelectOne);
            }
        }
        assert_eq!(corollary_identities(&r).nonselection, gamma == 0.0);
    }
}

#[test]
fn equivalents_tend_to_one() {
    let r = fixture("kappa2.json");
    let p = profile(&r).unwrap();
    let dev = |beta: f64| {
        let sd = solve_lambda(&r, beta, DEFAULT_TOL).unwrap();
        equivalents(&r, &p, &sd).unwrap().max_deviation()
    };
    assert!(dev(40.0) < dev(10.0));
    assert!(dev(40.0) < 1e-6);
    let sel = fixture("selectone.json");
    let sd = solve_lambda(&sel, 10.0, DEFAULT_TOL).unwrap();
    assert!(matches!(equivalents(&sel, &profile(&sel).unwrap(), &sd), Err(Error::RegimeMismatch(_))));
}

#[test]
fn swapped_orientation_reports_original_labels() {
    let r = fixture("golden.json").swapped();
    let p = profile(&r).unwrap();
    assert!(p.swapped);
    let (w0, w1) = p.weights.unwrap();
    let g = GibbsMeasure::solve(&r, 60.0).unwrap();
    assert!((g.mu0() - w0).abs() < 1e-6 && (g.mu1() - w1).abs() < 1e-6);
}

#[test]
fn lambda_slope_matches_gamma_for_random_selecting_potentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let betas = beta_grid();
    let mut tested = 0;
    while tested < 10 {
        let r = random_potential(&mut rng, false);
        let Ok(p) = profile(&r) else { continue };
        let y: Vec<f64> = betas.iter().map(|&b| -solve_lambda(&r, b, DEFAULT_TOL).unwrap().loglam1).collect();
        assert!((slope(&betas, &y) / p.gamma - 1.0).abs() < 0.03, "{r:?}");
        tested += 1;
    }
}

#[test]
fn calibrated_subactions_from_different_seeds_agree() {
    let r = fixture("mixed.json");
    let p = profile(&r).unwrap();
    let v_inf = dwt_core::asymptotics::limit_subaction(&r, &p, 12);
    let a = solve_calibrated(&r, &boundary_seed(&r, v_inf.fix0, v_inf.fix1, 12), 10_000, 1e-14).unwrap();
    let mut seed = boundary_seed(&r, v_inf.fix0, v_inf.fix1, 12);
    seed.zero.iter_mut().enumerate().for_each(|(i, v)| *v += i as f64);
    let b = solve_calibrated(&r, &seed, 10_000, 1e-14).unwrap();
    assert!(a.sup_distance(&b) < 1e-12);
    assert!(a.sup_distance(&v_inf) < 1e-12);
    assert_eq!(lax_oleinik_step(&r, &a).unwrap(), a);
    assert!(subaction_violation(&r, &a) <= 1e-12);
}

#[test]
fn general_potential_reduces_through_prefix_sums() {
    let spec = PotentialSpec::from_json(&common::fixture_text("general.json")).unwrap();
    let PotentialSpec::General(g) = &spec else { panic!("general fixture") };
    let r = spec.to_reduced().unwrap();
    for n in 1..12u64 {
        let prefix0: f64 = (1..n).map(|k| g.a1.value(k)).sum();
        let prefix1: f64 = (1..n).map(|k| g.a0.value(k)).sum();
        assert!((r.h0().value(n) - g.b0.value(n) - prefix0).abs() < 1e-12, "n={n}");
        assert!((r.h1().value(n) - g.b1.value(n) - prefix1).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn reduction_without_a_terms_is_identity() {
    let zero = PlateauSeq::constant(0.0);
    let b0 = PlateauSeq::new(vec![(2, 0.3), (1, 0.9)], 1.0).unwrap();
    let b1 = PlateauSeq::new(vec![(4, 1.7)], 0.2).unwrap();
    let g = GeneralDoubleWell { a0: zero.clone(), a1: zero, b0: b0.clone(), b1: b1.clone() };
    assert_eq!(reduce(&g).unwrap(), ReducedPotential::new(b0, b1).unwrap());
}

#[test]
fn zero_b_plateau_is_rejected_with_report() {
    let spec = PotentialSpec::from_json(&common::fixture_text("invalid_zero_b.json")).unwrap();
    match spec.to_reduced() {
        Err(Error::Validation(report)) => {
            assert!(report.checks.iter().any(|c| c.item == 2 && !c.passed && c.sequence == "b0"));
        }
        other => panic!("expected a validation failure, got {other:?}"),
    }
}
