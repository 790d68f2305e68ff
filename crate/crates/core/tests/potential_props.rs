use proptest::prelude::*;
use tipctl::potentials::{find_critical_points, make_effective, BoxDomain, CriticalKind, PotentialSpec};

fn fd_gradient(p: &PotentialSpec, x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    (0..x.len())
        .map(|i| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            (p.value(&a).unwrap() - p.value(&b).unwrap()) / (2.0 * h)
        })
        .collect()
}

fn check_gradient(p: &PotentialSpec, x: &[f64]) -> Result<(), TestCaseError> {
    let g = p.gradient(x).unwrap();
    let fd = fd_gradient(p, x);
    for (a, b) in g.iter().zip(&fd) {
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "grad {a} fd {b} at {x:?}");
    }
    Ok(())
}

fn quartic() -> impl Strategy<Value = PotentialSpec> {
    (-3.0..-0.1f64, 0.1..2.0f64).prop_map(|(a, b)| PotentialSpec::quartic(a, b).unwrap())
}

fn duffing() -> impl Strategy<Value = PotentialSpec> {
    // a3 is drawn as a fraction of its bounded-below limit
    (0.5..1.5f64, 0.1..0.6f64, 0.1..0.5f64, 0.0..0.95f64, 0.0..0.05f64, -1.0..1.0f64).prop_map(|(a0, a1, a2, f, a4, x0)| {
        let a3 = f * (4.0 * a0 * a2).sqrt();
        PotentialSpec::tilted_duffing(a0, a1, a2, a3, a4, x0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn quartic_gradient_matches_differences(p in quartic(), x in -2.0..2.0f64) {
        check_gradient(&p, &[x])?;
    }

    #[test]
    fn duffing_gradient_matches_differences(p in duffing(), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        check_gradient(&p, &[x, y])?;
    }

    #[test]
    fn quadratic_gradient_matches_differences(
        c in prop::collection::vec(-1.0..1.0f64, 3),
        k in 0.1..5.0f64,
        x in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        check_gradient(&PotentialSpec::quadratic(c, k).unwrap(), &x)?;
    }

    #[test]
    fn effective_gradient_matches_differences(
        p in duffing(), alpha in 0.0..2.0f64, xa in prop::collection::vec(-1.0..1.0f64, 2),
        x in -1.5..1.5f64, y in -1.5..1.5f64,
    ) {
        check_gradient(&make_effective(&p, alpha, &xa).unwrap(), &[x, y])?;
    }

    #[test]
    fn zero_gain_is_the_base(p in duffing(), xa in prop::collection::vec(-1.0..1.0f64, 2), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        let e = make_effective(&p, 0.0, &xa).unwrap();
        let x = [x, y];
        prop_assert_eq!(e.value(&x).unwrap(), p.value(&x).unwrap());
        prop_assert_eq!(e.gradient(&x).unwrap(), p.gradient(&x).unwrap());
    }

    #[test]
    fn effective_adds_the_quadratic(p in quartic(), alpha in 0.0..3.0f64, xa in -1.5..1.5f64, x in -2.0..2.0f64) {
        let e = make_effective(&p, alpha, &[xa]).unwrap();
        let diff = e.value(&[x]).unwrap() - p.value(&[x]).unwrap();
        let want = 0.5 * alpha * (x - xa) * (x - xa);
        prop_assert!((diff - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn quartic_critical_set(a in -3.0..-0.1f64, b in 0.1..2.0f64) {
        let p = PotentialSpec::quartic(a, b).unwrap();
        let r = (-a / (2.0 * b)).sqrt();
        let m = r.max(1.0) * 2.0;
        let cps = find_critical_points(&p, &BoxDomain::cube(1, -m, m).unwrap(), 200).unwrap();
        prop_assert_eq!(cps.len(), 3);
        for (c, want) in cps.iter().zip([-r, 0.0, r]) {
            prop_assert!((c.location[0] - want).abs() < 1e-8, "{:?} vs {}", c.location, want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn critical_points_are_stationary(p in duffing(), alpha in 0.0..0.6f64) {
        let e = make_effective(&p, alpha, &[0.5, 0.25]).unwrap();
        let cps = find_critical_points(&e, &BoxDomain::cube(2, -1.5, 1.5).unwrap(), 60).unwrap();
        prop_assert!(!cps.is_empty());
        for c in &cps {
            let g = e.gradient(&c.location).unwrap();
            prop_assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-10);
            if c.kind == CriticalKind::Minimum {
                let eig = e.hessian(&c.location).unwrap().symmetric_eigen().eigenvalues;
                prop_assert!(eig.iter().all(|&l| l > 0.0), "eigenvalues {eig:?}");
            }
        }
    }
}
