mod common;

use common::*;
use cubicspec::grid::{third_order_defect, GridFunction};
use cubicspec::perturbation::*;
use cubicspec::potential::Potential;
use cubicspec::spectrum_l0::{eigenfunction_l0, Basis, Mode};
use cubicspec::{Error, C64};
use proptest::prelude::*;

#[test]
fn alpha_zero_is_identity() {
    let basis = Basis::new(10).unwrap();
    let v = zero_in_sigma0(&basis);
    let sd = SecularData::new(&v, 0.0, &basis, DEFAULT_ZERO_TOL);
    assert_eq!(q_eval(&sd, c(3.0, 1.0)).unwrap().0, c(1.0, 0.0));
    let lam = c(-20.0, 4.0);
    let d = delta_alpha(&v, 0.0, lam).unwrap();
    assert!((d - cubicspec::spectrum_l0::delta0(lam)).norm() <= 1e-14 * d.norm());
}

#[test]
fn split_of_special_potentials() {
    let basis = Basis::new(10).unwrap();
    let u5 = finite(&[((5, 1), c(1.0, 0.0))], &basis);
    let (s0, s1) = split_sigma(&u5, basis.spectrum(), DEFAULT_ZERO_TOL);
    assert_eq!(s1.iter().map(|p| p.n).collect::<Vec<_>>(), vec![5]);
    assert_eq!(s0.len(), 20);
    let one = Potential::from_fn(|_| c(1.0, 0.0), &basis);
    let (_, s1) = split_sigma(&one, basis.spectrum(), DEFAULT_ZERO_TOL);
    assert!(s1.iter().any(|p| p.n == 0 && (p.weight - 1.0).abs() < 1e-12));
}

#[test]
fn delta_alpha_real_on_real_axis() {
    let basis = Basis::new(10).unwrap();
    let v = zero_in_sigma1(&basis);
    for x in [-300.0, -2.5, 7.0, 1000.0] {
        let d = delta_alpha(&v, 1.7, c(x, 0.0)).unwrap();
        assert!(d.im.abs() <= 1e-10 * d.norm(), "{x}: {d}");
    }
}

#[test]
fn single_mode_secular_root() {
    let basis = Basis::new(12).unwrap();
    for (n, alpha) in [(3i64, 0.5), (-2, -4.0), (1, 25.0)] {
        let v = finite(&[((n, 1), c(0.0, 1.0))], &basis);
        let sd = SecularData::new(&v, alpha, &basis, DEFAULT_ZERO_TOL);
        let ln = basis.lambda(n);
        let lam = c(ln * 0.5, 3.0);
        let q = q_eval(&sd, lam).unwrap().0;
        assert!((q - (1.0 + alpha / (ln - lam))).norm() < 1e-12);
        let s = spectrum_alpha(&v, alpha, &basis, None).unwrap();
        assert!(s.entries.iter().any(|e| (e.lambda - ln - alpha).abs() < 1e-9 * ln.abs()));
        assert_eq!(s.zero_multiplicity(), 2);
        let u = eigenfunction_alpha(&sd, ln + alpha).unwrap();
        let un = eigenfunction_l0(n, 1).unwrap();
        let ratio = u.eval(0.3) / un.eval(0.3);
        assert!((ratio.norm() - 1.0).abs() < 1e-9);
        assert!((u.eval(0.8) - ratio * un.eval(0.8)).norm() < 1e-9);
    }
}

#[test]
fn on_pole_rejected() {
    let basis = Basis::new(6).unwrap();
    let v = finite(&[((2, 1), c(1.0, 0.0))], &basis);
    let sd = SecularData::new(&v, 1.0, &basis, DEFAULT_ZERO_TOL);
    assert!(matches!(q_eval(&sd, c(basis.lambda(2), 0.0)), Err(Error::OnPole { n: 2 })));
}

#[test]
fn zero_cases() {
    let basis = Basis::new(20).unwrap();
    let a = spectrum_alpha(&zero_in_sigma1(&basis), 2.0, &basis, None).unwrap();
    assert_eq!(a.zero_multiplicity(), 1);
    let v = zero_in_sigma0(&basis);
    let b = spectrum_alpha(&v, 3.0, &basis, None).unwrap();
    assert_eq!(b.zero_multiplicity(), 2);
    let t = spectrum_alpha(&v, tuned_alpha(&v, &basis), &basis, None).unwrap();
    let z = t.entries.iter().find(|e| e.lambda == 0.0).unwrap();
    assert_eq!((z.mult, z.class), (3, EntryClass::ZeroSpecial));
}

#[test]
fn eigenfunction_norm_and_defect() {
    let basis = Basis::new(60).unwrap();
    let v = zero_in_sigma0(&basis);
    let alpha = 40.0;
    let sd = SecularData::new(&v, alpha, &basis, DEFAULT_ZERO_TOL);
    let s = spectrum_alpha(&v, alpha, &basis, None).unwrap();
    for mu in s.secular_roots().into_iter().filter(|m| m.abs() < 3000.0) {
        let u = eigenfunction_alpha(&sd, mu).unwrap();
        assert!((u.coefficient_norm() - 1.0).abs() < 1e-6, "mu={mu}");
        let y = GridFunction::uniform(2049, |x| u.eval(x));
        let zero = y.zeros_like();
        let extra = rank_one_term(&v, alpha, &y).unwrap();
        let d = third_order_defect(&y, &zero, c(mu, 0.0), Some(&extra));
        assert!(d < 1e-4 * (1.0 + mu.abs()), "mu={mu}: {d}");
    }
}

#[test]
fn krein_resolvent() {
    let basis = Basis::new(20).unwrap();
    let v = zero_in_sigma1(&basis);
    let f = GridFunction::uniform(2048, |x| c(x.cos(), x * (1.0 - x)));
    for lam in [c(10.0, 2.0), c(-500.0, 30.0)] {
        let y = resolvent_alpha(&v, 1.5, &f, lam).unwrap();
        let extra = rank_one_term(&v, 1.5, &y).unwrap();
        let d = third_order_defect(&y, &f, lam, Some(&extra));
        assert!(d <= 1e-4 * f.l2_norm(), "{lam}: {d}");
    }
    let r0 = resolvent_alpha(&v, 0.0, &f, c(1.0, 1.0)).unwrap();
    let direct = cubicspec::spectrum_l0::resolvent_l0(&f, c(1.0, 1.0), cubicspec::spectrum_l0::ResolventMethod::ClosedForm).unwrap();
    assert_eq!(r0, direct);
}

// -lambda R_alpha(lambda) f tends to the projection of f on the n = 0
// eigenspace when v has no zero mode.
#[test]
fn residue_at_origin() {
    let basis = Basis::new(20).unwrap();
    let v = zero_in_sigma0(&basis);
    let f = GridFunction::uniform(1025, |x| c(1.0 + x * x, (2.0 * x).sin()));
    let proj: Vec<(Mode, C64)> = basis.project(|x| f.interpolate(x));
    let p0 = |x: f64| -> C64 { proj.iter().filter(|(m, _)| m.n == 0).map(|(m, c)| c * basis.function(*m).unwrap().eval(x)).sum() };
    let eps = c(0.0, 1e-5);
    let y = resolvent_alpha(&v, 2.0, &f, eps).unwrap();
    let err = y.xs.iter().zip(&y.values).map(|(&x, r)| (-eps * r - p0(x)).norm()).fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn multiplicities_stable_under_tolerance() {
    let basis = Basis::new(30).unwrap();
    for seed in 0..4 {
        let (v, alpha) = random_case(seed, 6, &basis);
        let coarse = spectrum_alpha(&v, alpha, &basis, None).unwrap();
        let fine = spectrum_alpha(&v, alpha, &basis, Some(1e-10)).unwrap();
        let count = |s: &PerturbedSpectrum| s.entries.iter().filter(|e| e.mult > 1).count();
        assert_eq!(count(&coarse), count(&fine));
        assert_eq!(coarse.values_with_multiplicity().len(), fine.values_with_multiplicity().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interlacing(seed in 0u64..10_000, n_sup in 1i64..10) {
        let basis = Basis::new(30).unwrap();
        let (v, alpha) = random_case(seed, n_sup, &basis);
        let sd = SecularData::new(&v, alpha, &basis, DEFAULT_ZERO_TOL);
        let s = spectrum_alpha(&v, alpha, &basis, None).unwrap();
        let poles: Vec<f64> = sd.support.iter().map(|p| p.lambda).collect();
        let mus = s.secular_roots();
        for w in poles.windows(2) {
            prop_assert_eq!(mus.iter().filter(|&&m| m > w[0] && m < w[1]).count(), 1);
        }
        // residue of Q at each pole is -alpha w_n: one sign throughout
        prop_assert!(sd.support.iter().all(|p| p.weight > 0.0));
        for m in mus {
            prop_assert!(q_eval(&sd, c(m, 0.0)).unwrap().0.norm() < 1e-8);
        }
    }

    #[test]
    fn secular_identity_off_axis(re in -2000.0f64..2000.0, im in 1.0f64..100.0, alpha in -3.0f64..3.0) {
        let basis = Basis::new(30).unwrap();
        let v = zero_in_sigma1(&basis);
        let sd = SecularData::new(&v, alpha, &basis, DEFAULT_ZERO_TOL);
        let lam = c(re, im);
        let q = q_eval(&sd, lam).unwrap().0;
        let r = delta_alpha(&v, alpha, lam).unwrap() / cubicspec::spectrum_l0::delta0(lam);
        prop_assert!((q - r).norm() < 1e-6);
    }
}
