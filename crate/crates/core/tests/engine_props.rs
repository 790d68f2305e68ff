use proptest::prelude::*;
use tipctl::engine::{
    simulate_ensemble, simulate_trajectory, step_predictor_corrector, InitialData, IntegratorConfig, WienerStream,
};
use tipctl::potentials::PotentialSpec;
use tipctl::systems::{drift, ControlParams, DiffusionSpec, SystemSpec};

fn controlled(alpha: f64, tau: f64, sigma: f64) -> SystemSpec {
    let ctl = ControlParams::new(alpha, tau, vec![1.0]).unwrap();
    SystemSpec::controlled_sdde(PotentialSpec::double_well(), ctl, DiffusionSpec::constant(sigma).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_path(seed in any::<u64>(), alpha in 0.0..2.0f64) {
        let sys = controlled(alpha, 0.1, 0.5);
        let cfg = IntegratorConfig::new(0.01, 5.0, 1, seed).unwrap();
        let init = InitialData::constant([1.0]);
        let a = simulate_ensemble(&sys, &init, &cfg, 3).unwrap();
        let b = simulate_ensemble(&sys, &init, &cfg, 3).unwrap();
        for (x, y) in a.trajectories.iter().zip(&b.trajectories) {
            prop_assert_eq!(&x.states, &y.states);
        }
    }

    #[test]
    fn ring_buffer_matches_full_history(seed in any::<u64>(), j in 1usize..20, x0 in -1.5..1.5f64) {
        let h = 0.01;
        let steps = 300;
        let sys = controlled(1.0, j as f64 * h, 0.5);
        let cfg = IntegratorConfig::new(h, steps as f64 * h, 1, seed).unwrap();
        let path = simulate_trajectory(&sys, &InitialData::constant([x0]), &cfg).unwrap();

        // states[k] holds X[k - j]
        let mut states = vec![vec![x0]; j + 1];
        let mut stream = WienerStream::new(seed, h);
        let mut dw = [0.0];
        for i in 0..steps {
            stream.fill(&mut dw);
            let next = step_predictor_corrector(&sys, &states[i + j], &states[i], &states[i + 1], &dw, h).unwrap();
            states.push(next);
        }
        let naive: Vec<f64> = states[j + 1..].iter().map(|s| s[0]).collect();
        prop_assert_eq!(path.states, naive);
    }

    #[test]
    fn zero_increment_step_is_deterministic_heun(x in -2.0..2.0f64, xd in -2.0..2.0f64, xd1 in -2.0..2.0f64, h in 0.001..0.05f64) {
        let sys = controlled(1.0, 0.1, 0.5);
        let got = step_predictor_corrector(&sys, &[x], &[xd], &[xd1], &[0.0], h).unwrap()[0];
        let f0 = drift(&sys, &[x], Some(&[xd])).unwrap()[0];
        let pred = x + h * f0;
        let f1 = drift(&sys, &[pred], Some(&[xd1])).unwrap()[0];
        let want = x + 0.5 * h * (f0 + f1);
        prop_assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
    }
}

#[test]
fn ou_stationary_variance() {
    let (k, sigma) = (1.0, 0.5);
    let sys = SystemSpec::uncontrolled(
        PotentialSpec::quadratic(vec![0.0], k).unwrap(),
        DiffusionSpec::constant(sigma).unwrap(),
    )
    .unwrap();
    let cfg = IntegratorConfig::new(0.01, 500.0, 10, 7).unwrap();
    let ens = simulate_ensemble(&sys, &InitialData::constant([0.0]), &cfg, 40).unwrap();
    let samples: Vec<f64> = ens.trajectories.iter().flat_map(|t| t.states[t.len() / 10..].to_vec()).collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let want = sigma * sigma / (2.0 * k);
    assert!((var - want).abs() < 0.05 * want, "variance {var} vs {want}");
}
