use lkpz_core::diagnostics::{mass, mass_identity_residual};
use lkpz_core::semigroup::apply_semigroup;
use lkpz_core::symbol::SymbolTerm;
use lkpz_core::{run, Field, PeriodicGrid, ProblemSpec, SymbolSpec};
use proptest::prelude::*;

fn gaussian(grid: PeriodicGrid, amplitude: f64, width: f64) -> Field {
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amplitude * (-r2 / (2.0 * width * width)).exp()
    })
}

fn problem(lambda: f64, q: f64, dt: f64, horizon: f64) -> ProblemSpec {
    let grid = PeriodicGrid::new(1, 512, 64.0).unwrap();
    ProblemSpec {
        symbol: SymbolSpec::fractional(1.5, 1.0).unwrap(),
        lambda,
        q,
        initial: gaussian(grid, 0.5, 2.0),
        horizon,
        dt,
        sample_times: vec![horizon / 4.0, horizon / 2.0, horizon],
    }
}

#[test]
fn semigroup_composes() {
    let grid = PeriodicGrid::new(2, 64, 16.0).unwrap();
    let f = gaussian(grid, 1.0, 1.5);
    let spec = SymbolSpec::multifractional(vec![SymbolTerm::new(1.0, 1.3), SymbolTerm::new(0.5, 2.0)]).unwrap();
    let two_steps = apply_semigroup(&apply_semigroup(&f, 0.4, &spec).unwrap(), 0.7, &spec).unwrap();
    let one_step = apply_semigroup(&f, 1.1, &spec).unwrap();
    assert!(two_steps.max_abs_diff(&one_step) < 1e-13);
    assert!(apply_semigroup(&f, 0.0, &spec).unwrap().max_abs_diff(&f) < 1e-14);
    assert!(apply_semigroup(&f, -1.0, &spec).is_err());
}

#[test]
fn linear_flow_conserves_mass() {
    let traj = run(&problem(0.0, 2.0, 0.1, 8.0)).unwrap();
    assert!(traj.is_completed());
    let m0 = traj.initial_mass();
    for (_, m) in traj.mass_series() {
        assert!((m - m0).abs() < 1e-12 * m0);
    }
}

#[test]
fn source_sign_sets_mass_direction() {
    for (lambda, sign) in [(1.0, 1.0), (-1.0, -1.0)] {
        let traj = run(&problem(lambda, 1.5, 0.05, 8.0)).unwrap();
        assert!(traj.mass_is_monotone(1e-12));
        let change = traj.final_record().mass - traj.initial_mass();
        assert!(sign * change > 0.0, "lambda = {lambda}: change {change}");
        assert!(traj.sup_peak <= traj.problem.initial.max_abs() * (1.0 + 1e-9));
        assert!(traj.final_field().min() > -1e-6);
    }
}

#[test]
fn mass_residual_is_second_order() {
    let coarse = mass_identity_residual(&run(&problem(-1.0, 1.5, 0.2, 4.0)).unwrap()).unwrap();
    let fine = mass_identity_residual(&run(&problem(-1.0, 1.5, 0.1, 4.0)).unwrap()).unwrap();
    let order = (coarse / fine).log2();
    assert!(order > 1.7, "observed order {order}: {coarse:e} -> {fine:e}");
}

#[test]
fn invalid_problems_are_rejected() {
    assert!(run(&problem(1.0, 1.0, 0.1, 1.0)).is_err());
    assert!(run(&problem(1.0, 2.0, 2.0, 1.0)).is_err());
    let mut p = problem(1.0, 2.0, 0.1, 1.0);
    p.sample_times = vec![0.5, 0.25];
    assert!(run(&p).is_err());
}

proptest! {
    #[test]
    fn fractional_symbol_scales(alpha in 0.2f64..2.0, ell in 0.1f64..5.0, r in 1e-3f64..1e3, s in 0.1f64..10.0) {
        let spec = SymbolSpec::fractional(alpha, ell).unwrap();
        let a = spec.evaluate_radial(r).unwrap();
        let b = spec.evaluate_radial(s * r).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((b / a - s.powf(alpha)).abs() < 1e-12 * s.powf(alpha));
    }

    #[test]
    fn semigroup_preserves_mass_and_order(t in 0.0f64..5.0, alpha in 0.5f64..2.0, shift in 0.0f64..1.0) {
        let grid = PeriodicGrid::new(1, 128, 16.0).unwrap();
        let spec = SymbolSpec::fractional(alpha, 1.0).unwrap();
        let f = gaussian(grid, 1.0, 1.0);
        let g = f.shifted(shift);
        let sf = apply_semigroup(&f, t, &spec).unwrap();
        let sg = apply_semigroup(&g, t, &spec).unwrap();
        prop_assert!((mass(&sf) - mass(&f)).abs() < 1e-12);
        prop_assert!((sg.sub(&sf).min() - shift).abs() < 1e-12);
    }
}
