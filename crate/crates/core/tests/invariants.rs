//! Cross-module properties on randomly generated models and matrices.

use cho_core::boundstate::{classify, n2_conditions, Verdict};
use cho_core::diagonalize::{compute_a, decompose};
use cho_core::linalg::{char_poly_coeffs, jacobi_eigh, GenMatrix, SymMatrix, JACOBI_TOL};
use cho_core::model::{build_t, build_v, OscillatorModel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All complex roots of a monic polynomial (descending coefficients) by
/// Durand-Kerner iteration.
fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[1..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    for _ in 0..2000 {
        let mut delta = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}

fn random_model(rng: &mut impl Rng, n: usize, positive_omegas: bool) -> OscillatorModel {
    let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
    let mut model = if positive_omegas {
        let omegas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..2.0)).collect();
        OscillatorModel::from_omegas(masses, &omegas)
    } else {
        let k = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        OscillatorModel::new(masses, k)
    };
    for i in 0..n {
        for j in (i + 1)..n {
            model = model.with_coupling(i, j, rng.gen_range(-2.0..2.0));
        }
    }
    model
}

#[test]
fn eigenvalues_are_char_poly_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for n in 2..=5 {
        for _ in 0..200 {
            let s = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
            let eig = jacobi_eigh(&s, JACOBI_TOL, 50).unwrap();
            // skip clustered spectra, where polynomial roots are ill-conditioned
            if eig.values.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                continue;
            }
            let mut roots: Vec<f64> = durand_kerner(&char_poly_coeffs(&s.to_gen()))
                .into_iter()
                .map(|z| z.re)
                .collect();
            roots.sort_by(f64::total_cmp);
            let scale = 1.0 + eig.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            for (r, l) in roots.iter().zip(&eig.values) {
                assert!((r - l).abs() <= 1e-9 * scale, "{roots:?} vs {:?}", eig.values);
            }
        }
    }
}

#[test]
fn similarity_of_a_and_s() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in 2..=5 {
        for _ in 0..100 {
            let model = random_model(&mut rng, n, false);
            let dec = decompose(&model).unwrap();
            if dec.lambdas.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                continue;
            }
            let a = compute_a(&build_t(&model).unwrap(), &build_v(&model).unwrap()).unwrap();
            let mut roots: Vec<f64> = durand_kerner(&char_poly_coeffs(&a))
                .into_iter()
                .map(|z| z.re)
                .collect();
            roots.sort_by(f64::total_cmp);
            let scale = dec.lambdas.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            for (r, l) in roots.iter().zip(&dec.lambdas) {
                assert!((r - l).abs() <= 1e-8 * scale);
            }
        }
    }
}

#[test]
fn uncoupling_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..200 {
        let mut model = random_model(&mut rng, 3, true);
        model.set_coupling(0, 2, 0.0);
        model.set_coupling(1, 2, 0.0);
        let full = decompose(&model).unwrap().lambdas;
        let pair = OscillatorModel::two_body(
            model.masses[0],
            model.masses[1],
            model.stiffness_diag[0],
            model.stiffness_diag[1],
            model.coupling(0, 1),
        );
        let mut expect = decompose(&pair).unwrap().lambdas;
        expect.push(model.omega_sq(2));
        expect.sort_by(f64::total_cmp);
        for (a, b) in full.iter().zip(&expect) {
            assert!((a - b).abs() <= 1e-10, "{full:?} vs {expect:?}");
        }
    }
}

#[test]
fn two_oscillator_conditions_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut bound = 0;
    for _ in 0..3000 {
        let m1 = rng.gen_range(0.1..10.0);
        let m2 = rng.gen_range(0.1..10.0);
        let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let model = OscillatorModel::two_body(m1, m2, c[0], c[1], c[2]);
        let (cond1, cond2) = n2_conditions(&model).unwrap();
        let lambdas = decompose(&model).unwrap().lambdas;
        let scale = lambdas[1].abs().max(1.0);
        if cond2.abs() < 1e-8 || lambdas.iter().any(|l| l.abs() < 1e-8 * scale) {
            continue;
        }
        let explicit = cond1 > 0.0 && cond2 > 0.0;
        let sylvester = c[0] > 0.0 && cond2 > 0.0;
        let spectrum = lambdas.iter().all(|&l| l > 0.0);
        assert_eq!(explicit, sylvester);
        assert_eq!(explicit, spectrum);
        bound += explicit as usize;
    }
    assert!(bound > 300, "sample should contain bound models, got {bound}");
}

#[test]
fn boundary_of_identical_family_brackets_window() {
    // bisection on "not unbound" localises the lower edge of the window
    let unbound = |d: f64| {
        classify(&OscillatorModel::identical(3, 1.0, 1.0, d))
            .unwrap()
            .verdict
            == Verdict::Unbound
    };
    let (mut lo, mut hi) = (-2.0, 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if unbound(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(lo <= -1.0 + 1e-9 && hi >= -1.0 - 1e-9, "[{lo}, {hi}]");
}

#[test]
fn every_decomposition_satisfies_residual_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for n in 1..=8 {
        for _ in 0..50 {
            let model = random_model(&mut rng, n, false);
            let dec = decompose(&model).unwrap();
            let v = build_v(&model).unwrap();
            let c = &dec.c;
            let mut worst = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    let mut x = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            x += c.get(a, i) * v.get(a, b) * c.get(b, j);
                        }
                    }
                    let want = if i == j { dec.lambdas[i] } else { 0.0 };
                    worst = worst.max((x - want).abs());
                }
            }
            assert!(worst <= 1e-8 * (1.0 + v.max_abs()));
            assert!(dec.residual_kinetic <= 1e-8);
            assert!(dec.residual_orth <= 1e-9);
        }
    }
}

fn model_strategy() -> impl Strategy<Value = OscillatorModel> {
    (2usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1f64..10.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-3.0f64..3.0, n * (n - 1) / 2),
        )
            .prop_map(move |(m, k, d)| {
                let mut model = OscillatorModel::new(m, k);
                let mut it = d.into_iter();
                for i in 0..n {
                    for j in (i + 1)..n {
                        model = model.with_coupling(i, j, it.next().unwrap());
                    }
                }
                model
            })
    })
}

proptest! {
    #[test]
    fn scaling_v_scales_lambdas(model in model_strategy(), alpha in 0.1f64..10.0) {
        let base = decompose(&model).unwrap();
        let mut scaled = model.clone();
        scaled.stiffness_diag.iter_mut().for_each(|k| *k *= alpha);
        scaled.couplings.iter_mut().for_each(|c| c.value *= alpha);
        let dec = decompose(&scaled).unwrap();
        let spread = base.lambdas.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for (a, b) in dec.lambdas.iter().zip(&base.lambdas) {
            prop_assert!((a - alpha * b).abs() <= 1e-10 * alpha * spread.max(1e-300));
        }
    }

    #[test]
    fn sylvester_matches_spectrum(model in model_strategy()) {
        let report = classify(&model).unwrap();
        let scale = report.eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        prop_assume!(report.eigenvalues.iter().all(|l| l.abs() > 1e-8 * scale));
        prop_assume!(report.verdict != Verdict::Marginal);
        let spectrum_bound = report.eigenvalues.iter().all(|&l| l > 0.0);
        prop_assert_eq!(report.verdict == Verdict::Bound, spectrum_bound);
        prop_assert!(report.all_checks_passed(), "{:?}", report.closed_form_checks);
    }

    #[test]
    fn inverse_round_trip(rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 4)) {
        let a = GenMatrix::from_fn(4, |i, j| rows[i][j] + if i == j { 4.0 } else { 0.0 }).unwrap();
        let ai = cho_core::linalg::inverse(&a).unwrap();
        let p = cho_core::linalg::matmul(&a, &ai).unwrap();
        prop_assert!(p.max_abs_diff(&GenMatrix::identity(4).unwrap()) <= 1e-9);
    }
}
