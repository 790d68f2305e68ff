use proptest::prelude::*;
use tipctl::potentials::PotentialSpec;
use tipctl::systems::{drift, effective_noise, ControlParams, DiffusionSpec, SystemSpec};

fn duffing() -> PotentialSpec {
    PotentialSpec::tilted_duffing_default()
}

proptest! {
    #[test]
    fn zero_gain_sdde_drift_is_uncontrolled(
        tau in 0.01..2.0f64,
        xa in prop::collection::vec(-1.0..1.0f64, 2),
        x in prop::collection::vec(-1.5..1.5f64, 2),
        xd in prop::collection::vec(-1.5..1.5f64, 2),
    ) {
        let d = DiffusionSpec::constant(0.2).unwrap();
        let c = SystemSpec::controlled_sdde(duffing(), ControlParams::new(0.0, tau, xa).unwrap(), d.clone()).unwrap();
        let u = SystemSpec::uncontrolled(duffing(), d).unwrap();
        prop_assert_eq!(drift(&c, &x, Some(&xd)).unwrap(), drift(&u, &x, None).unwrap());
    }

    #[test]
    fn rescaled_drift_scales_approximating(
        alpha in 0.0..2.0f64,
        at in 0.0..0.95f64,
        xa in prop::collection::vec(-1.0..1.0f64, 2),
        x in prop::collection::vec(-1.5..1.5f64, 2),
    ) {
        let tau = if alpha > 0.0 { at / alpha } else { 0.3 };
        let ctl = ControlParams::new(alpha, tau, xa).unwrap();
        let d = DiffusionSpec::constant(0.15).unwrap();
        let approx = SystemSpec::approximating_sde(duffing(), ctl.clone(), d.clone()).unwrap();
        let resc = SystemSpec::rescaled_sde(duffing(), ctl.clone(), d).unwrap();
        let fa = drift(&approx, &x, None).unwrap();
        let fr = drift(&resc, &x, None).unwrap();
        for (a, r) in fa.iter().zip(&fr) {
            let want = (1.0 - ctl.alpha_tau()) * a;
            prop_assert!((r - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn nu_tilde_matches_beta(alpha in 0.01..3.0f64, at in 0.0..0.99f64, sigma in 0.01..2.0f64) {
        let ctl = ControlParams::new(alpha, at / alpha, vec![1.0]).unwrap();
        let e = effective_noise(&ctl, sigma).unwrap();
        let want = 0.5 * alpha * e.beta * e.beta;
        prop_assert!((e.nu_tilde - want).abs() <= 1e-12 * want);
    }
}
