use approx::assert_relative_eq;
use proptest::prelude::*;

use ppgmres_core::balance::{balance1, balance5};
use ppgmres_core::drivers::{pp_gmres, PPGmresConfig, PolySpec};
use ppgmres_core::krylov::SolveReport;
use ppgmres_core::operators::{
    bidiagonal_operator, diagonal_operator, read_matrix_market, write_matrix_market, LinearOperator, MatrixOperator,
};
use ppgmres_core::polyprec::{PreconditionerPolynomial, RootSource};
use ppgmres_core::{BalanceMethod, Complex64};

fn roots_strategy() -> impl Strategy<Value = Vec<Complex64>> {
    let real = (0.5f64..50.0, any::<bool>()).prop_map(|(x, neg)| vec![Complex64::new(if neg { -x } else { x }, 0.0)]);
    let pair = (-50.0f64..50.0, 0.1f64..20.0)
        .prop_filter("away from the origin", |(re, _)| re.abs() > 0.5)
        .prop_map(|(re, im)| vec![Complex64::new(re, im), Complex64::new(re, -im)]);
    prop::collection::vec(prop_oneof![real, pair], 1..12).prop_map(|v| v.concat())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_vanishes_at_origin_and_is_one_at_roots(roots in roots_strategy()) {
        let p = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres).unwrap();
        prop_assert!(p.phi_eval(Complex64::new(0.0, 0.0)).norm() == 0.0);
        for r in &roots {
            // each factor carries an error of order ε relative to 1 + |r/θ|
            let scale: f64 = roots.iter().map(|t| 1.0 + (r / t).norm()).product();
            prop_assert!((p.phi_eval(*r) - 1.0).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn p_times_z_is_phi_on_a_diagonal(roots in roots_strategy(), shift in 1.0f64..5.0) {
        let p = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres).unwrap();
        let diag: Vec<f64> = (0..40).map(|i| -20.0 + i as f64 + shift / 7.0).collect();
        let op = diagonal_operator(&diag);
        let v: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let ap = op.apply_vec(&p.p_apply(&op, &v));
        let phi = p.phi_apply(&op, &v);
        let scale = phi.iter().chain(&ap).fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in ap.iter().zip(&phi) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn balancing_conditions_hold(roots in roots_strategy(), a in 0.05f64..3.0) {
        let p = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres).unwrap();
        let b1 = balance1(&p).unwrap().poly;
        let scale: f64 = roots.iter().map(|z| 1.0 / z.norm()).sum::<f64>() + 1.0;
        prop_assert!(b1.phi_deriv(Complex64::new(0.0, 0.0)).norm() <= 1e-12 * scale * 10.0);
        prop_assert!(b1.degree() == p.degree() + 1);
        let b5 = balance5(&p, a).unwrap().poly;
        let (fa, fm) = (b5.phi_eval(Complex64::new(a, 0.0)), b5.phi_eval(Complex64::new(-a, 0.0)));
        prop_assert!((fa - fm).norm() <= 1e-9 * (1.0 + fa.norm()));
    }
}

#[test]
fn matrix_market_roundtrip() {
    let op = bidiagonal_operator(&[-3.0, -1.0, 2.0, 5.0, 9.0], 0.5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    write_matrix_market(&path, op.matrix()).unwrap();
    let back = MatrixOperator::new(read_matrix_market(&path).unwrap(), "a").unwrap();
    let x = [1.0, -2.0, 0.5, 3.0, -1.0];
    for (u, v) in op.apply_vec(&x).iter().zip(back.apply_vec(&x)) {
        assert_relative_eq!(*u, v, max_relative = 1e-15);
    }
}

#[test]
fn solve_report_json_roundtrip() {
    let diag: Vec<f64> = (-10..=-1).chain(1..=80).map(f64::from).collect();
    let op = diagonal_operator(&diag);
    let b = vec![1.0 / (diag.len() as f64).sqrt(); diag.len()];
    let cfg = PPGmresConfig {
        poly: PolySpec {
            d: 8,
            balance: BalanceMethod::B1,
            ..PolySpec::default()
        },
        m: 15,
        verify_true_residual: true,
        ..PPGmresConfig::default()
    };
    let (x, r) = pp_gmres(&op, &b, &cfg).unwrap();
    assert!(r.converged);
    let back = SolveReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
    let res = ppgmres_core::operators::residual_norm(&op, &b, &x);
    assert_relative_eq!(res, r.final_true_residual.unwrap(), max_relative = 1e-12);
    assert!(r.to_csv().lines().count() == r.history.len() + 2);
}
