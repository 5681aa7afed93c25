//! Leja ordering of a conjugate-closed root set with multiplicities.

use num_complex::Complex64;

/// Greedy Leja sequence over `values` (distinct, conjugate-closed) with
/// `mult[i]` copies each. Returns indices into `values`, one per applied
/// factor; for a conjugate pair only the member with positive imaginary part
/// appears and stands for the pair.
///
/// Pass `k` orders the roots with multiplicity at least `k`, continuing the
/// greedy product from everything chosen in earlier passes. Distances to
/// copies of the candidate itself are skipped. Scores are log-sums, so no
/// product ever overflows.
pub(crate) fn leja_sequence(values: &[Complex64], mult: &[usize]) -> Vec<usize> {
    let heads: Vec<usize> = (0..values.len()).filter(|&i| values[i].im >= 0.0).collect();
    let passes = heads.iter().map(|&i| mult[i]).max().unwrap_or(0);
    let total: usize = heads.iter().map(|&i| mult[i]).sum();
    let mut seq = Vec::with_capacity(total);
    let mut score = vec![0.0f64; values.len()];
    let mut started = false;

    let add_point = |z: Complex64, score: &mut [f64]| {
        for &i in &heads {
            let d = (values[i] - z).norm();
            if d > 0.0 {
                score[i] += d.ln();
            }
        }
    };

    for pass in 1..=passes {
        let mut pending: Vec<usize> = heads.iter().copied().filter(|&i| mult[i] >= pass).collect();
        while !pending.is_empty() {
            let pick = if !started {
                started = true;
                argmax(&pending, |i| values[i].norm())
            } else {
                argmax(&pending, |i| score[i])
            };
            let i = pending.remove(pick);
            seq.push(i);
            add_point(values[i], &mut score);
            if values[i].im != 0.0 {
                add_point(values[i].conj(), &mut score);
            }
        }
    }
    seq
}

fn argmax(items: &[usize], key: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (p, &i) in items.iter().enumerate() {
        let v = key(i);
        if v > best_val {
            best_val = v;
            best = p;
        }
    }
    best
}

/// Leja order of a conjugate-closed multiset; each complex root is followed
/// by its conjugate.
pub fn leja_order(roots: &[Complex64]) -> Vec<Complex64> {
    let (values, mult) = group(roots);
    leja_sequence(&values, &mult)
        .into_iter()
        .flat_map(|i| {
            let z = values[i];
            if z.im == 0.0 {
                vec![z]
            } else {
                vec![z, z.conj()]
            }
        })
        .collect()
}

/// Distinct values (pairs adjacent, positive imaginary part first) with counts.
pub(crate) fn group(roots: &[Complex64]) -> (Vec<Complex64>, Vec<usize>) {
    let mut values: Vec<Complex64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    for &z in roots {
        let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
        match values.iter().position(|&v| v == z) {
            Some(p) => mult[p] += 1,
            None => {
                values.push(z);
                mult.push(1);
            }
        }
    }
    // reorder so each positive-imaginary value is followed by its conjugate
    let mut out_v = Vec::with_capacity(values.len());
    let mut out_m = Vec::with_capacity(values.len());
    for (i, &z) in values.iter().enumerate() {
        if z.im < 0.0 {
            continue;
        }
        out_v.push(z);
        out_m.push(mult[i]);
        if z.im > 0.0 {
            if let Some(j) = values.iter().position(|&v| v == z.conj()) {
                out_v.push(values[j]);
                out_m.push(mult[j]);
            }
        }
    }
    for (i, &z) in values.iter().enumerate() {
        if z.im < 0.0 && !out_v.contains(&z) {
            out_v.push(z);
            out_m.push(mult[i]);
        }
    }
    (out_v, out_m)
}
