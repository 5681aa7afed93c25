use super::*;
use crate::krylov::restarted_gmres;
use crate::operators::{bidiagonal_operator, diagonal_operator};
use crate::rng::normal_vector;
use crate::stability::StabilityMode;

fn indefinite_diag() -> Vec<f64> {
    (-40..=-1).chain(1..=400).map(|k| k as f64).collect()
}

fn rhs(n: usize) -> Vec<f64> {
    normal_vector(&mut stream(9, streams::RHS), n)
}

#[test]
fn degree_one_matches_plain_gmres() {
    let diag: Vec<f64> = (-5..=-1).chain(1..=200).map(|k| k as f64).collect();
    let op = bidiagonal_operator(&diag, 0.5);
    let b = rhs(op.dim());
    let (_, plain) = restarted_gmres(&op, &b, 20, 1e-8, 200_000).unwrap();
    let cfg = PPGmresConfig {
        poly: PolySpec {
            d: 1,
            ..PolySpec::default()
        },
        m: 20,
        tol: 1e-8,
        max_mvp: 200_000,
        ..PPGmresConfig::default()
    };
    let op2 = bidiagonal_operator(&diag, 0.5);
    let (x, pp) = pp_gmres(&op2, &b, &cfg).unwrap();
    assert_eq!(pp.degree, 1);
    assert!(plain.converged && pp.converged);
    // φ(A) = A/θ: the same Krylov spaces, up to rounding
    let (a, c) = (plain.iterations as f64, pp.iterations as f64);
    assert!((a - c).abs() <= 0.05 * a, "{a} vs {c}");
    assert!(residual_norm(&op2, &b, &x) <= 1e-7 * norm2(&b));
}

#[test]
fn balanced_solve_converges() {
    let op = diagonal_operator(&indefinite_diag());
    let b = rhs(op.dim());
    for balance in [
        BalanceMethod::None,
        BalanceMethod::B1,
        BalanceMethod::B2,
        BalanceMethod::B3,
        BalanceMethod::B4,
    ] {
        let cfg = PPGmresConfig {
            poly: PolySpec {
                d: 25,
                balance,
                b4_inner_max: 5,
                ..PolySpec::default()
            },
            m: 20,
            tol: 1e-9,
            max_mvp: 2_000_000,
            verify_true_residual: true,
            ..PPGmresConfig::default()
        };
        let (x, rep) = pp_gmres(&op, &b, &cfg).unwrap();
        assert!(rep.converged, "{balance:?}");
        let tr = residual_norm(&op, &b, &x);
        assert!(tr <= 1e-7 * norm2(&b), "{balance:?}: {tr}");
        assert_eq!(rep.final_true_residual.map(|t| t > 0.0), Some(true));
        assert_eq!(rep.balance, balance.name());
    }
}

#[test]
fn balancing_adds_one_degree() {
    let op = diagonal_operator(&indefinite_diag());
    let mut spec = PolySpec {
        d: 10,
        stability: StabilityConfig::off(),
        ..PolySpec::default()
    };
    let none = build_polynomial(&op, &spec, 3).unwrap();
    spec.balance = BalanceMethod::B1;
    let b1 = build_polynomial(&op, &spec, 3).unwrap();
    assert_eq!(none.poly.degree(), 10);
    assert_eq!(b1.poly.degree(), 11);
    assert_eq!(none.base, b1.base);
    assert!(b1.eta.is_some());
    spec.balance = BalanceMethod::B3;
    assert_eq!(build_polynomial(&op, &spec, 3).unwrap().poly.degree(), 11);
    spec.balance = BalanceMethod::B4;
    spec.b4_inner_max = 5;
    assert_eq!(build_polynomial(&op, &spec, 3).unwrap().poly.degree(), 10);
}

#[test]
fn method5_requires_interval() {
    let op = diagonal_operator(&indefinite_diag());
    let spec = PolySpec {
        d: 5,
        balance: BalanceMethod::B5,
        ..PolySpec::default()
    };
    assert!(matches!(build_polynomial(&op, &spec, 1), Err(Error::InvalidArgument(_))));
    let spec = PolySpec {
        balance_a: Some(1.0),
        ..spec
    };
    let out = build_polynomial(&op, &spec, 1).unwrap();
    let p = out.poly.roots().unwrap();
    let (l, r) = (p.phi_eval(Complex64::new(-1.0, 0.0)), p.phi_eval(Complex64::new(1.0, 0.0)));
    assert!((l - r).norm() <= 1e-12 * (1.0 + r.norm()));
}

#[test]
fn composite_split_rule() {
    assert_eq!(composite_split(10, 5), Some((5, 2)));
    assert_eq!(composite_split(25, 5), Some((5, 5)));
    assert_eq!(composite_split(60, 15), Some((15, 4)));
    assert_eq!(composite_split(7, 5), None);
}

#[test]
fn degree_too_high_gives_up_after_retries() {
    let op = diagonal_operator(&indefinite_diag());
    let b = rhs(op.dim());
    let strict = StabilityConfig {
        mode: StabilityMode::Indefinite,
        small_side_pof_abort_log10: 0.5,
        ..StabilityConfig::default()
    };
    let mut cfg = PPGmresConfig {
        poly: PolySpec {
            d: 30,
            stability: strict,
            ..PolySpec::default()
        },
        m: 20,
        tol: 1e-8,
        ..PPGmresConfig::default()
    };
    assert!(matches!(pp_gmres(&op, &b, &cfg), Err(Error::DegreeTooHigh { .. })));
    cfg.poly.stability.small_side_pof_abort_log10 = 1e6;
    let (_, rep) = pp_gmres(&op, &b, &cfg).unwrap();
    assert_eq!(rep.retries, 0);
    assert!(rep.converged);
}

#[test]
fn report_counts_match_operator() {
    let op = diagonal_operator(&indefinite_diag());
    let b = rhs(op.dim());
    let cfg = PPGmresConfig {
        poly: PolySpec {
            d: 12,
            stability: StabilityConfig::off(),
            ..PolySpec::default()
        },
        m: 10,
        tol: 1e-8,
        ..PPGmresConfig::default()
    };
    let before = op.matvecs();
    let (_, rep) = pp_gmres(&op, &b, &cfg).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.matvecs, op.matvecs() - before);
    // construction d, each φ application d, a residual at every restart
    // after the first, the recovery d − 1 and the final check 1
    let d = rep.degree as u64;
    let expected = d + d * (rep.iterations as u64 + rep.cycles as u64 - 1) + (d - 1) + 1;
    assert_eq!(rep.matvecs, expected);
}

#[test]
fn identical_seeds_identical_reports() {
    let op = bidiagonal_operator(&indefinite_diag(), 1.0);
    let b = rhs(op.dim());
    let cfg = PPGmresConfig {
        poly: PolySpec {
            d: 10,
            balance: BalanceMethod::B1,
            ..PolySpec::default()
        },
        m: 15,
        tol: 1e-9,
        verify_true_residual: true,
        ..PPGmresConfig::default()
    };
    let (_, r1) = pp_gmres(&op, &b, &cfg).unwrap();
    let (_, r2) = pp_gmres(&op, &b, &cfg).unwrap();
    assert_eq!(r1.to_json(), r2.to_json());
}

#[test]
fn interior_eigs_on_diagonal() {
    let diag: Vec<f64> = (1..=300).map(|k| k as f64).collect();
    let op = diagonal_operator(&diag);
    let cfg = EigConfig {
        poly: PolySpec {
            d: 8,
            balance: BalanceMethod::B1,
            stability: StabilityConfig::off(),
            ..PolySpec::default()
        },
        sigma: 150.3,
        nev: 4,
        m: 30,
        k: 12,
        tol: 1e-8,
        ..EigConfig::default()
    };
    let res = pp_arnoldi_interior(&op, &cfg).unwrap();
    assert!(res.converged, "{res:?}");
    let mut got: Vec<f64> = res.values.iter().map(|z| z.re).collect();
    got.sort_by(f64::total_cmp);
    for (g, want) in got.iter().zip([149.0, 150.0, 151.0, 152.0]) {
        assert!((g - want).abs() < 1e-6, "{got:?}");
    }
    assert!(res.residuals.iter().all(|&r| r <= 1e-8));
    assert_eq!(res.values[0].re.round(), 150.0);
}

#[test]
fn interior_eigs_harmonic_variant() {
    let diag: Vec<f64> = (1..=200).map(|k| k as f64).collect();
    let op = diagonal_operator(&diag);
    let cfg = EigConfig {
        poly: PolySpec {
            d: 2,
            stability: StabilityConfig::off(),
            ..PolySpec::default()
        },
        sigma: 50.0,
        nev: 2,
        m: 30,
        k: 10,
        harmonic: true,
        ..EigConfig::default()
    };
    let res = pp_arnoldi_interior(&op, &cfg).unwrap();
    assert!(res.converged);
    assert_eq!(res.values[0].re.round(), 50.0);
}

#[test]
fn eig_config_checks() {
    let op = diagonal_operator(&[1.0, 2.0, 3.0]);
    let cfg = EigConfig {
        nev: 5,
        k: 4,
        ..EigConfig::default()
    };
    assert!(pp_arnoldi_interior(&op, &cfg).is_err());
}
