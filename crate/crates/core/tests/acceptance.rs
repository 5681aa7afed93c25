//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Seed sweeps use polynomial seeds 1 through 5 with the
//! right-hand side fixed.

use std::time::{Duration, Instant};

use ppgmres_core::analysis::{chebyshev, estimate_improvement, IntervalSpectrum};
use ppgmres_core::balance::{balance1, balance2, balance5, spline_definiteness_test, BalanceMethod};
use ppgmres_core::drivers::{build_polynomial, pp_arnoldi_interior, pp_gmres, EigConfig, PPGmresConfig, PolySpec};
use ppgmres_core::krylov::{
    arnoldi, harmonic_ritz_residual, harmonic_ritz_values, restarted_gmres_with, GmresOptions, SolveReport,
};
use ppgmres_core::operators::{
    bidiagonal_operator, diagonal_operator, example_spectrum, preset, spectrum_image, LinearOperator,
};
use ppgmres_core::polyprec::{PreconditionerPolynomial, RootSource};
use ppgmres_core::rng::{stream, streams, unit_normal_vector};
use ppgmres_core::stability::StabilityConfig;
use ppgmres_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        id,
        pass,
        detail: detail.into(),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rhs(n: usize) -> Vec<f64> {
    unit_normal_vector(&mut stream(1, streams::RHS), n)
}

fn expand(p: &PreconditionerPolynomial) -> Vec<Complex64> {
    p.roots()
        .iter()
        .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
        .collect()
}

fn random_conjugate_roots(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let d = rng.random_range(2..=40);
    let mut roots = Vec::with_capacity(d + 1);
    while roots.len() < d {
        let re = 10f64.powf(rng.random_range(-2.0..2.0));
        let re = if rng.random_bool(0.4) { -re } else { re };
        if rng.random_bool(0.5) {
            roots.push(Complex64::new(re, 0.0));
        } else {
            let im = 10f64.powf(rng.random_range(-2.0..1.5));
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        }
    }
    roots
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst12, mut worst5) = (0.0f64, 0.0f64);
    let mut errors = 0;
    // method-5 misses, and how many of them sit under the floor set by
    // rounding η, of order ε/|β| when β = π(a)/π(−a) is far from 1
    let (mut misses5, mut floored5) = (0, 0);
    for _ in 0..100 {
        let roots = random_conjugate_roots(&mut rng);
        let base = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres).unwrap();
        for out in [balance1(&base), balance2(&base)] {
            match out {
                Ok(o) => {
                    let scale: f64 = expand(&o.poly).iter().map(|z| 1.0 / z.norm()).sum();
                    let slope = o.poly.phi_deriv(Complex64::new(0.0, 0.0)).norm();
                    worst12 = worst12.max(slope / scale);
                }
                Err(_) => errors += 1,
            }
        }
        let a = 10f64.powf(rng.random_range(-1.5..1.0));
        match balance5(&base, a) {
            Ok(o) => {
                let pa = o.poly.phi_eval(Complex64::new(a, 0.0));
                let pm = o.poly.phi_eval(Complex64::new(-a, 0.0));
                let mismatch = (pa - pm).norm() / (1.0 + pa.norm());
                worst5 = worst5.max(mismatch);
                if mismatch > 1e-12 {
                    misses5 += 1;
                    let beta = base.pi_eval(Complex64::new(a, 0.0)).re / base.pi_eval(Complex64::new(-a, 0.0)).re;
                    let floor = f64::EPSILON * beta.abs().max(1.0 / beta.abs());
                    if mismatch <= floor {
                        floored5 += 1;
                    }
                }
            }
            Err(_) => errors += 1,
        }
    }
    let elapsed = t.elapsed();
    let pass = errors == 0 && worst12 <= 1e-12 && worst5 <= 1e-12 && elapsed < Duration::from_secs(1);
    outcome(
        1,
        pass,
        format!(
            "max |phi'(0)|/sum|1/theta| = {worst12:.2e}, max method-5 mismatch = {worst5:.2e} \
             ({misses5} sets above 1e-12, {floored5} of them within the eta rounding floor), \
             errors = {errors}, {elapsed:.2?}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let diag: Vec<f64> = (-100..=-1).chain(1..=500).map(|k| k as f64).collect();
    // the nonnormal twin supplies GMRES polynomials with complex roots
    let twin = bidiagonal_operator(&diag, 50.0);
    let op = diagonal_operator(&diag);
    let v = unit_normal_vector(&mut stream(2, streams::RHS), diag.len());
    let (mut worst_scalar, mut worst_p) = (0.0f64, 0.0f64);
    let mut pairs = Vec::new();
    for d in [10usize, 50, 100, 150, 200] {
        let start = unit_normal_vector(&mut stream(d as u64, streams::POLY_START), diag.len());
        let f = arnoldi(&twin, &start, d, true).unwrap();
        let poly = PreconditionerPolynomial::from_roots(&harmonic_ritz_values(&f).unwrap(), RootSource::Gmres).unwrap();
        pairs.push(poly.roots().iter().filter(|r| r.value.im > 0.0).count());
        let phiv = poly.phi_apply(&op, &v);
        let scalar: Vec<f64> = diag
            .iter()
            .zip(&v)
            .map(|(&l, &vi)| poly.phi_eval(Complex64::new(l, 0.0)).re * vi)
            .collect();
        let big = diag
            .iter()
            .map(|&l| poly.phi_eval(Complex64::new(l, 0.0)).norm())
            .fold(1.0, f64::max);
        let diff: Vec<f64> = phiv.iter().zip(&scalar).map(|(a, b)| a - b).collect();
        worst_scalar = worst_scalar.max(norm(&diff) / (big * norm(&v)));
        let apv = op.apply_vec(&poly.p_apply(&op, &v));
        let diff: Vec<f64> = apv.iter().zip(&phiv).map(|(a, b)| a - b).collect();
        worst_p = worst_p.max(norm(&diff) / norm(&v));
    }
    let elapsed = t.elapsed();
    let pass = worst_scalar <= 1e-10
        && worst_p <= 1e-10
        && pairs.iter().all(|&c| c > 0)
        && elapsed < Duration::from_secs(10);
    outcome(
        2,
        pass,
        format!(
            "degrees 10..200: scalar mismatch {worst_scalar:.2e}, |A p(A)v - phi(A)v| {worst_p:.2e}, \
             conjugate pairs per degree {pairs:?}, {elapsed:.2?}"
        ),
    )
}

fn pp_config(d: usize, balance: BalanceMethod, seed: u64) -> PPGmresConfig {
    PPGmresConfig {
        poly: PolySpec {
            d,
            balance,
            ..PolySpec::default()
        },
        m: 50,
        tol: 1e-10,
        seed,
        ..PPGmresConfig::default()
    }
}

fn criterion_3() -> Outcome {
    let op = preset("example1", 1).unwrap();
    let b = rhs(op.dim());
    let mut counts = Vec::new();
    let mut within = 0;
    for seed in SEEDS {
        let (_, r) = pp_gmres(&op, &b, &pp_config(50, BalanceMethod::B1, seed)).unwrap();
        counts.push(r.matvecs);
        if r.converged && r.matvecs as f64 <= 2.0 * 95_300.0 && r.matvecs as f64 >= 95_300.0 / 2.0 {
            within += 1;
        }
    }
    let mut sorted = counts.clone();
    sorted.sort();
    let cap = 20 * sorted[2];
    // plain GMRES(50), capped at 20x the median preconditioned count
    let opts = GmresOptions {
        reorth: false,
        ..GmresOptions::new(50, 1e-10, cap)
    };
    let (_, plain) = restarted_gmres_with(&op, &b, &opts, None).unwrap();
    let plain_ok = !plain.converged || plain.matvecs > cap;
    outcome(
        3,
        within >= 4 && plain_ok,
        format!(
            "PP(50,B1)-GMRES(50) matvecs {counts:?} ({within}/5 within 2x of 95.3k); plain GMRES(50) \
             converged={} after {} matvecs (cap {cap}, final residual {:.2e})",
            plain.converged, plain.matvecs, plain.final_shortcut
        ),
    )
}

fn criterion_4() -> Outcome {
    let op = preset("example1", 1).unwrap();
    let mut good = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let mut mins = [0.0; 2];
        for (k, balance) in [BalanceMethod::None, BalanceMethod::B1].into_iter().enumerate() {
            let spec = PolySpec {
                d: 150,
                balance,
                stability: StabilityConfig::off(),
                ..PolySpec::default()
            };
            let build = build_polynomial(&op, &spec, seed).unwrap();
            let image = spectrum_image(|z| build.poly.phi_eval(z), &op).unwrap();
            mins[k] = image.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        }
        if mins[0] < 0.0 && mins[1] > 0.0 {
            good += 1;
        }
        rows.push(format!("seed {seed}: min phi {:.2e} / min phi1 {:.2e}", mins[0], mins[1]));
    }
    outcome(4, good >= 4, format!("{good}/5 seeds show the pattern; {}", rows.join("; ")))
}

fn criterion_5() -> Outcome {
    let op = preset("example4", 1).unwrap();
    let b = rhs(op.dim());
    let mut good = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let mut plain = pp_config(50, BalanceMethod::None, seed);
        plain.max_cycles = 8000;
        plain.max_mvp = u64::MAX;
        let (_, r0) = pp_gmres(&op, &b, &plain).unwrap();
        // the balanced run only needs to be followed to 50x the unbalanced cycles
        let needed = 50 * r0.cycles;
        let mut bal = pp_config(50, BalanceMethod::B1, seed);
        bal.max_cycles = needed.min(8000);
        bal.max_mvp = u64::MAX;
        let (_, r1) = pp_gmres(&op, &b, &bal).unwrap();
        let ok = r0.converged && r0.cycles <= 30 && (!r1.converged || r1.cycles >= needed);
        if ok {
            good += 1;
        }
        rows.push(format!(
            "seed {seed}: {} cycles vs B1 {}{}",
            r0.cycles,
            if r1.converged { "" } else { ">=" },
            r1.cycles
        ));
    }
    outcome(5, good >= 4, format!("{good}/5 seeds; {}", rows.join("; ")))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let (mut violations, mut worst, mut max_pib) = (0, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = rng.random_range(8..=30);
        let mut lam: Vec<f64> = (0..n)
            .map(|_| {
                let x: f64 = rng.random_range(0.5..10.0);
                if rng.random_bool(0.3) {
                    -x
                } else {
                    x
                }
            })
            .collect();
        lam[0] = rng.random_range(20.0..60.0);
        let op = diagonal_operator(&lam);
        let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nb = norm(&b);
        b.iter_mut().for_each(|x| *x /= nb);
        let d = rng.random_range(2..=(n - 2).min(12));
        let f = arnoldi(&op, &b, d, true).unwrap();
        let mut theta = harmonic_ritz_values(&f).unwrap();
        // pin the real root relatively closest to an eigenvalue onto it
        let mut pick = (f64::INFINITY, 0, 0);
        for (j, th) in theta.iter().enumerate().filter(|(_, th)| th.im == 0.0) {
            for (k, &l) in lam.iter().enumerate() {
                let r = (th.re - l).abs() / l.abs();
                if r < pick.0 {
                    pick = (r, j, k);
                }
            }
        }
        let (_, j, k) = pick;
        theta[j] = Complex64::new(lam[k], 0.0);
        let poly = PreconditionerPolynomial::from_roots(&theta, RootSource::Gmres).unwrap();
        let jj = poly.roots().iter().position(|r| r.value == theta[j]).unwrap();
        let res = harmonic_ritz_residual(jj, &poly, &op, &b).unwrap();
        let log_pof: f64 = theta
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, th)| (1.0 - theta[j] / th).norm().log10())
            .sum();
        // Z = I for a diagonal matrix, so ‖Z⁻¹‖ = 1 and β = b
        let bound = lam[k].abs() / (b[k].abs() * 10f64.powf(log_pof));
        max_pib = max_pib.max(norm(&poly.pi_apply(&op, &b)));
        worst = worst.max(res / bound);
        if res > bound {
            violations += 1;
        }
    }
    let elapsed = t.elapsed();
    outcome(
        6,
        violations == 0 && elapsed < Duration::from_secs(5),
        format!(
            "50 trials, {violations} violations, max residual/bound {worst:.3}, max |pi(A)b| {max_pib:.3}, {elapsed:.2?}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let op = preset("example7", 1).unwrap();
    let b = rhs(op.dim());
    let mut good = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let stability = StabilityConfig {
            pofcutoff_log10: 6.0,
            // no spurious values occur for this matrix; the residual screen is off
            rncutoff: f64::INFINITY,
            ..StabilityConfig::indefinite()
        };
        let cfg = PPGmresConfig {
            poly: PolySpec {
                d: 75,
                stability,
                ..PolySpec::default()
            },
            verify_true_residual: true,
            ..pp_config(75, BalanceMethod::None, seed)
        };
        match pp_gmres(&op, &b, &cfg) {
            Ok((_, r)) => {
                let Some(c) = r.corrections.as_ref() else {
                    rows.push(format!("seed {seed}: no correction needed, true {:.1e}", r.final_true_residual.unwrap()));
                    continue;
                };
                let after = c.final_residual();
                let orders = (c.residual_before / after).log10();
                let ok = c.residual_before >= 1e-2 && after <= 1e-9 && orders >= 10.0;
                if ok {
                    good += 1;
                }
                rows.push(format!(
                    "seed {seed}: d {}+{} {:.1e} -> {:.1e} ({orders:.1} orders)",
                    r.d, r.added_copies, c.residual_before, after
                ));
            }
            Err(e) => rows.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(7, good >= 3, format!("{good}/5 seeds; {}", rows.join("; ")))
}

/// Real-rooted test polynomials: iid log-uniform and iid uniform roots of
/// either sign, and jittered Chebyshev-like nodes on one or two intervals;
/// half of them are balanced with Method 1.
fn random_real_polynomial(rng: &mut ChaCha8Rng) -> PreconditionerPolynomial {
    let d = rng.random_range(2..=29);
    let family = rng.random_range(0..4);
    let (lo, hi) = (rng.random_range(0.01..1.0), rng.random_range(2.0..100.0));
    let left = rng.random_range(-50.0..-0.5);
    let node = |k: usize, a: f64, b: f64| {
        let c = (std::f64::consts::PI * (k as f64 + 0.5) / d as f64).cos();
        0.5 * (a + b) + 0.5 * (b - a) * c
    };
    let roots: Vec<Complex64> = (0..d)
        .map(|k| {
            let x = match family {
                0 => {
                    let m = 10f64.powf(rng.random_range(-1.0..2.0));
                    if rng.random_bool(0.3) {
                        -m
                    } else {
                        m
                    }
                }
                1 => {
                    if rng.random_bool(0.3) {
                        rng.random_range(left..-0.1)
                    } else {
                        rng.random_range(0.1..hi)
                    }
                }
                2 => node(k, lo, hi) * (1.0 + rng.random_range(-0.05..0.05)),
                _ => {
                    let x: f64 = node(k, left, hi);
                    if x.abs() < 0.3 {
                        0.3f64.copysign(x)
                    } else {
                        x
                    }
                }
            };
            Complex64::new(x, 0.0)
        })
        .collect();
    let p = PreconditionerPolynomial::from_roots(&roots, RootSource::Gmres).unwrap();
    if rng.random_bool(0.5) {
        if let Ok(o) = balance1(&p) {
            return o.poly;
        }
    }
    p
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let (mut passed, mut missed, mut worst) = (0, 0, 0.0f64);
    let (mut bal_passed, mut bal_missed) = (0, 0);
    for _ in 0..1000 {
        let p = random_real_polynomial(&mut rng);
        let roots = expand(&p);
        let balanced = p.roots().iter().any(|r| r.source == RootSource::Balance);
        let verdict = spline_definiteness_test(&p, &roots);
        if !verdict.applicable || !verdict.pass {
            continue;
        }
        passed += 1;
        bal_passed += balanced as usize;
        let lo = roots.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let peak = (0..=20_000)
            .map(|i| lo + (hi - lo) * i as f64 / 20_000.0)
            .chain([0.0].into_iter().filter(|&x| lo < x && x < hi))
            .map(|x| p.pi_eval(Complex64::new(x, 0.0)).re)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(peak);
        if peak > 1.05 {
            missed += 1;
            bal_missed += balanced as usize;
        }
    }
    let elapsed = t.elapsed();

    let op = preset("example3", 1).unwrap();
    let mut rejected = 0;
    let mut right_side = 0;
    for seed in SEEDS {
        let spec = PolySpec {
            d: 40,
            balance: BalanceMethod::B1,
            ..PolySpec::default()
        };
        let build = build_polynomial(&op, &spec, seed).unwrap();
        if let Some(v) = &build.spline {
            if !v.pass {
                rejected += 1;
            }
            if v.flagged.iter().any(|f| f.left > 9800.0 && f.right < 10350.0) {
                right_side += 1;
            }
        }
    }
    outcome(
        8,
        missed == 0 && rejected >= 4 && elapsed < Duration::from_secs(30),
        format!(
            "{passed}/1000 random polynomials pass the screen, {missed} of them exceed 1.05 (worst {worst:.3}; \
             balanced subset {bal_missed}/{bal_passed}); example 3 degree 41 rejected for {rejected}/5 seeds, \
             {right_side}/5 flag an interval inside (9800, 10350); {elapsed:.2?}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst_expansion = 0.0f64;
    for delta in [1e-8, 3e-9, 1e-9, 1e-10] {
        for m in 1..=100usize {
            let inc = chebyshev(m, 1.0 + delta) - 1.0;
            let approx = (m * m) as f64 * delta;
            worst_expansion = worst_expansion.max((inc - approx).abs() / approx);
        }
    }

    let diag = example_spectrum("example2").unwrap();
    let op = diagonal_operator(&diag);
    let b = rhs(op.dim());
    let budget = 300_000;
    let opts = GmresOptions {
        reorth: false,
        ..GmresOptions::new(50, 1e-10, budget)
    };
    let (_, plain) = restarted_gmres_with(&op, &b, &opts, None).unwrap();
    // speedup = plain matvecs / preconditioned matvecs to the same reduction
    let target = plain.final_shortcut;
    let spec = IntervalSpectrum::new(-100.0, -1.0, 1.0, 4900.0).unwrap();
    let mut ok = true;
    let mut rows = Vec::new();
    for d in [27usize, 51] {
        let predicted = estimate_improvement(spec, d, 50).unwrap().speedup_matvecs;
        let mut measured: Vec<f64> = SEEDS
            .iter()
            .map(|&seed| {
                let (_, r) = pp_gmres(&op, &b, &pp_config(d, BalanceMethod::None, seed)).unwrap();
                reached_at(&r, target).map_or(0.0, |mv| plain.matvecs as f64 / mv as f64)
            })
            .collect();
        measured.sort_by(f64::total_cmp);
        let median = measured[2];
        ok &= median >= predicted / 2.0 && median <= predicted * 2.0;
        rows.push(format!(
            "d {d}: predicted {predicted:.1}, measured median {median:.2} (seeds {:?})",
            measured.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        ));
    }
    outcome(
        9,
        worst_expansion <= 1e-3 && ok,
        format!(
            "T_m(1+delta) expansion error {worst_expansion:.1e}; plain GMRES(50) reaches {target:.2e} in {} matvecs; {}",
            plain.matvecs,
            rows.join("; ")
        ),
    )
}

fn reached_at(r: &SolveReport, target: f64) -> Option<u64> {
    r.history.iter().find(|h| h.shortcut <= target).map(|h| h.cum_matvecs)
}

fn criterion_10() -> Outcome {
    let op = preset("example9", 1).unwrap();
    let (mut balanced_ok, mut unbalanced_ok) = (0, 0);
    let mut rows = Vec::new();
    for seed in SEEDS {
        let mut ranges = Vec::new();
        for balance in [BalanceMethod::B1, BalanceMethod::None] {
            let mut cfg = EigConfig {
                sigma: 500.33,
                nev: 30,
                m: 80,
                k: 40,
                tol: 1e-8,
                seed,
                ..EigConfig::default()
            };
            cfg.poly.d = 50;
            cfg.poly.balance = balance;
            let r = pp_arnoldi_interior(&op, &cfg).unwrap();
            let lo = r.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let hi = r.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            match balance {
                BalanceMethod::B1 => {
                    if r.converged && r.values.len() == 30 && lo >= 495.0 && hi <= 506.0 {
                        balanced_ok += 1;
                    }
                }
                _ => {
                    if lo < 490.0 {
                        unbalanced_ok += 1;
                    }
                }
            }
            ranges.push(format!("{lo:.1}-{hi:.1}"));
        }
        rows.push(format!("seed {seed}: B1 {} / none {}", ranges[0], ranges[1]));
    }
    outcome(
        10,
        balanced_ok >= 3 && unbalanced_ok >= 3,
        format!(
            "balanced in [495, 506] for {balanced_ok}/5, unbalanced min < 490 for {unbalanced_ok}/5; {}",
            rows.join("; ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let run = || {
        let op = preset("example2", 1).unwrap();
        let b = rhs(op.dim());
        let cfg = PPGmresConfig {
            verify_true_residual: true,
            ..pp_config(25, BalanceMethod::B1, 7)
        };
        pp_gmres(&op, &b, &cfg).unwrap().1.to_json()
    };
    let (a, b) = (run(), run());
    let eig = || {
        let op = diagonal_operator(&(1..=400).map(|k| k as f64).collect::<Vec<_>>());
        let mut cfg = EigConfig {
            sigma: 200.5,
            nev: 4,
            m: 30,
            k: 12,
            seed: 3,
            ..EigConfig::default()
        };
        cfg.poly.d = 10;
        serde_json::to_string(&pp_arnoldi_interior(&op, &cfg).unwrap()).unwrap()
    };
    let (e1, e2) = (eig(), eig());
    outcome(
        11,
        a == b && e1 == e2,
        format!(
            "solve reports identical: {} ({} bytes); eigen reports identical: {}",
            a == b,
            a.len(),
            e1 == e2
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Outcome; 11] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
    ];
    let mut failed = Vec::new();
    for c in criteria {
        let o = c();
        println!("criterion {:>2}: {}  {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(o.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
