use magtele::entanglement::{logneg_numeric, logneg_schmidt, logneg_subtracted_analytic};
use magtele::fock::{displacement_elements, overlap_fidelity, TruncatedState};
use magtele::params::{derive_params, mhz_to_rad, PhysicalParams};
use magtele::quadrature::{trapezoid_2d, QuadratureSettings};
use magtele::states::{input_state, subtracted_from_lambda, tmsv_state, InputStateSpec};
use magtele::teleport::{chi_input, chi_teleported, printed, shared_slice, Channel, Resource};
use magtele::wigner::{wigner_map, wigner_negativity, GridSpec, WignerSource};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = InputStateSpec> {
    prop_oneof![
        (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(re, im)| InputStateSpec::Coherent { beta: C64::new(re, im) }),
        Just(InputStateSpec::SinglePhoton),
        (-1.0..1.0f64).prop_map(|xi| InputStateSpec::SqueezedVacuum { xi }),
        (0.1..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(alpha0, varphi)| InputStateSpec::Cat { alpha0, varphi }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_is_normalized_and_hermitian(spec in spec_strategy(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let chi = chi_input(&spec);
        prop_assert!((chi.eval(C64::new(0.0, 0.0)) - 1.0).norm() < 1e-12);
        let a = C64::new(re, im);
        prop_assert!((chi.eval(-a) - chi.eval(a).conj()).norm() < 1e-12);
    }

    #[test]
    fn teleported_chi_keeps_hermiticity(spec in spec_strategy(), lambda in 0.0..0.9f64, gamma in 0.9..1.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let ch = Channel::new(lambda, lambda * 0.99, gamma);
        for r in Resource::ALL {
            let chi = chi_teleported(&spec, &ch, r);
            let a = C64::new(re, im);
            prop_assert!((chi.eval(-a) - chi.eval(a).conj()).norm() < 1e-12);
            prop_assert!((chi.eval(C64::new(0.0, 0.0)) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn resource_states_are_normalized_schmidt_states(lambda in 0.01..0.6f64) {
        let tm = tmsv_state(lambda, 40).unwrap();
        prop_assert!((tm.norm_sqr() - 1.0).abs() < 1e-12);
        let (sub, weight) = subtracted_from_lambda(lambda, 40).unwrap();
        prop_assert!((sub.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(weight > 0.0);
        let coeffs: Vec<f64> = (0..=40).map(|n| sub.amplitude2(n, n).norm()).collect();
        let numeric = logneg_numeric(&sub).unwrap();
        prop_assert!((numeric - logneg_schmidt(&coeffs)).abs() < 1e-8);
        // truncation at cutoff 40 grows with lambda; a few 1e-7 at the top of this range
        prop_assert!((numeric - logneg_subtracted_analytic(lambda).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn displacement_inverse(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let a = C64::new(re, im);
        // exact elements, so the truncated product is accurate on the low block
        let d = displacement_elements(8, 60, a);
        let dm = displacement_elements(60, 8, -a);
        let prod = d * dm;
        for m in 0..8 {
            for n in 0..8 {
                let want = if m == n { 1.0 } else { 0.0 };
                prop_assert!((prod[(m, n)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_fidelity_is_a_probability(a in -1.5..1.5f64, b in -1.5..1.5f64) {
        let x = input_state(&InputStateSpec::Coherent { beta: C64::new(a, 0.0) }, 30).unwrap();
        let y = input_state(&InputStateSpec::Coherent { beta: C64::new(0.0, b) }, 30).unwrap();
        let f = overlap_fidelity(&x, &y).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        let expected = (-(a * a + b * b)).exp();
        prop_assert!((f - expected).abs() < 1e-10);
    }

    #[test]
    fn coherent_threshold(lambda in 1e-6..0.99f64, gamma in 0.9500001..1.0f64) {
        prop_assert!(printed::coherent_tmsv(lambda, gamma) > 0.5);
        prop_assert!(printed::coherent_nongaussian(lambda, gamma) > 0.5);
    }

    #[test]
    fn shared_slice_is_one_at_origin(lambda in 0.0..0.95f64, gamma in 0.5..1.0f64) {
        let ch = Channel::new(lambda, lambda, gamma);
        for r in Resource::ALL {
            prop_assert!((shared_slice(&ch, r, 0.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derived_parameter_identities(g1 in 0.5..20.0f64, tau_s in 0.0..20.0f64) {
        let mut p = PhysicalParams::reference().with_g1(mhz_to_rad(g1));
        p.tau_s = tau_s * 1e-9;
        let d = derive_params(&p).unwrap();
        prop_assert!((d.lambda - d.r.tanh()).abs() < 1e-14);
        prop_assert!((d.lambda_prime - d.lambda * d.cos_theta).abs() < 1e-14);
        prop_assert!(d.lambda_prime <= d.lambda);
        prop_assert!(d.gamma > 0.0 && d.gamma <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn coherent_wigner_is_nonnegative(re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let s = input_state(&InputStateSpec::Coherent { beta: C64::new(re, im) }, 30).unwrap();
        let g = wigner_map(WignerSource::Pure(&s), &GridSpec::square(5.0, 41)).unwrap();
        prop_assert!(wigner_negativity(&g).min_value >= -1e-6);
        prop_assert!((g.normalization() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn quadrature_independent_of_thread_count(w in 0.2..2.0f64) {
        let f = move |x: f64, y: f64| (-(w * x * x + y * y)).exp() * (x * y).cos();
        let l = QuadratureSettings::default().half_width(1.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| trapezoid_2d(&f, l, 201));
        let many = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| trapezoid_2d(&f, l, 201));
        prop_assert_eq!(one.to_bits(), many.to_bits());
    }
}

#[test]
fn fock_constructors_reject_bad_shapes() {
    assert!(TruncatedState::two_mode(3, vec![C64::new(1.0, 0.0); 3]).is_err());
}
