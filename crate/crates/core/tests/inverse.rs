mod common;

use common::*;
use cubicspec::inverse::*;
use cubicspec::perturbation::{spectrum_alpha, EntryClass, PerturbedEntry};
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{Basis, Mode};
use cubicspec::Error;
use proptest::prelude::*;

#[test]
fn equal_modes_give_equal_weights() {
    let basis = Basis::new(40).unwrap();
    let v = finite(&[((1, 1), c(1.0, 0.0)), ((2, 1), c(0.0, 1.0))], &basis);
    let s = spectrum_alpha(&v, 1.0, &basis, None).unwrap();
    let w = recover_weights(basis.spectrum(), &s).unwrap();
    assert!((w.weights[&1] - 0.5).abs() < 1e-6 && (w.weights[&2] - 0.5).abs() < 1e-6, "{:?}", w.weights);
    assert!((w.alpha_hat - 1.0).abs() < 1e-6);
}

#[test]
fn single_mode_weights() {
    let basis = Basis::new(20).unwrap();
    let v = finite(&[((-4, 1), c(1.0, 0.0))], &basis);
    let s = spectrum_alpha(&v, 1.0, &basis, None).unwrap();
    let w = recover_weights(basis.spectrum(), &s).unwrap();
    assert_eq!(w.weights.keys().copied().collect::<Vec<_>>(), vec![-4]);
    assert!((w.weights[&-4] - 1.0).abs() < 1e-12);
    assert!((w.alpha_hat - 1.0).abs() < 1e-9);
}

#[test]
fn constant_potential_b1() {
    let basis = Basis::new(40).unwrap();
    let v = Potential::from_fn(|_| c(1.0, 0.0), &basis);
    for alpha in [0.5, 2.0, -1.5] {
        let s = spectrum_alpha(&v, alpha, &basis, None).unwrap();
        let b = b_from_spectra(basis.spectrum(), &s).unwrap();
        assert_eq!(b.case, CaseTag::B1Case);
        assert!((b.value - alpha / 12.0).abs() <= b.spread + 1e-9, "{alpha}: {b:?}");
        let fwd = b_forward(&v, alpha).unwrap();
        assert!((fwd[0] - alpha / 12.0).abs() < 1e-12);
        assert!((b1_printed(&v, alpha).unwrap() - fwd[0]).abs() < 1e-12);
    }
}

#[test]
fn zero_potential_b() {
    let b = b_forward(&Potential::zero(10), 3.0).unwrap();
    assert_eq!(b[0], 0.0);
    assert!((b[1] + 1.0 / 12.0).abs() < 1e-15);
    assert_eq!(b[2], 0.0);
}

#[test]
fn linear_probe_mass() {
    let basis = Basis::new(40).unwrap();
    let g = default_probe(&basis);
    let total: f64 = (-40..=40).map(|n| g.weight(n)).sum();
    assert!((total - 1.0 / 3.0).abs() < 1e-12);
    // everything sits in the n = 0 eigenspace
    assert!((g.weight(0) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn complex_single_mode_recovered() {
    let basis = Basis::new(20).unwrap();
    let cn = c(0.6, -0.8);
    let v = finite(&[((3, 1), cn)], &basis);
    let probe = rich_probe(&basis);
    let b = simulate_bundle(&v, 1.2, &probe, &basis).unwrap();
    let r = reconstruct_v(&b, &probe, &basis, ReconstructOptions::default()).unwrap();
    assert!((r.v_hat.coeff(Mode::new(3, 1)) - cn).norm() < 1e-5);
    assert!(!r.zero_gauge_note);
    let lin = default_probe(&basis);
    let b = simulate_bundle(&v, 1.2, &lin, &basis).unwrap();
    assert!(matches!(reconstruct_v(&b, &lin, &basis, ReconstructOptions::default()), Err(Error::GFloorViolation { n: 3, .. })));
}

#[test]
fn zero_mode_gauge() {
    let basis = Basis::new(20).unwrap();
    let v = zero_in_sigma1(&basis);
    let probe = rich_probe(&basis);
    let b = simulate_bundle(&v, 2.0, &probe, &basis).unwrap();
    assert_eq!(b.case_tag, CaseTag::B1Case);
    let r = reconstruct_v(&b, &probe, &basis, ReconstructOptions::default()).unwrap();
    assert!(r.zero_gauge_note);
    assert!(coeff_distance(&r.v_hat, &v, &basis, true) < 1e-6);
    let v0 = (v.weight(0)).sqrt();
    let h0 = (r.v_hat.weight(0)).sqrt();
    assert!((v0 - h0).abs() < 1e-6);
}

#[test]
fn ambarzumyan() {
    let basis = Basis::new(12).unwrap();
    let s0 = basis.spectrum();
    let zero = spectrum_alpha(&Potential::zero(12), 0.7, &basis, None).unwrap();
    assert!(ambarzumyan_check(s0, &zero, 1e-12));
    let v = finite(&[((2, 1), c(1.0, 0.0))], &basis);
    let shifted = spectrum_alpha(&v, 0.5, &basis, None).unwrap();
    assert!(!ambarzumyan_check(s0, &shifted, 1e-12));
    let mut single_zero = zero.clone();
    let e = single_zero.entries.iter_mut().find(|e| e.lambda == 0.0).unwrap();
    e.mult = 1;
    assert!(!ambarzumyan_check(s0, &single_zero, 1e-12));
}

#[test]
fn bad_zero_pattern() {
    let basis = Basis::new(6).unwrap();
    let mut s = spectrum_alpha(&Potential::zero(6), 1.0, &basis, None).unwrap();
    s.entries.retain(|e| e.lambda != 0.0);
    s.entries.push(PerturbedEntry { lambda: 0.0, mult: 4, class: EntryClass::ZeroSpecial, margin: 0.0, warning: None, uncertainty: 0.0 });
    assert!(matches!(b_from_spectra(basis.spectrum(), &s), Err(Error::CaseMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weights_round_trip(seed in 0u64..100_000) {
        let basis = Basis::new(40).unwrap();
        let (v, alpha) = random_case(seed, 8, &basis);
        let s = spectrum_alpha(&v, alpha, &basis, None).unwrap();
        let res = recover_residues(basis.spectrum(), &s).unwrap();
        // alpha |v_n|^2 shares the sign of alpha
        prop_assert!(res.values.values().all(|r| r.signum() == alpha.signum()));
        let w = recover_weights(basis.spectrum(), &s).unwrap();
        prop_assert!((w.alpha_hat - alpha).abs() < 1e-8 * alpha.abs());
        for (n, x) in &w.weights {
            prop_assert!((x - v.weight(*n)).abs() < 1e-9);
        }
        prop_assert!(!ambarzumyan_check(basis.spectrum(), &s, 1e-12));
    }

    #[test]
    fn four_spectra_round_trip(seed in 0u64..100_000) {
        let basis = Basis::new(40).unwrap();
        let (v, alpha) = random_case(seed, 8, &basis);
        let probe = rich_probe(&basis);
        let b = simulate_bundle(&v, alpha, &probe, &basis).unwrap();
        let r = reconstruct_v(&b, &probe, &basis, ReconstructOptions::default()).unwrap();
        prop_assert!(coeff_distance(&r.v_hat, &v, &basis, false) < 1e-4);
        prop_assert!(!r.zero_gauge_note);
    }
}
