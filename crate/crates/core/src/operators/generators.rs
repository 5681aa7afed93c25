use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{MatrixOperator, SparseMatrix};
use crate::error::{Error, Result};
use crate::rng::{stream, streams};

/// Names accepted by [`preset`]. `rays:<angle>` takes the angle in degrees.
pub const PRESET_NAMES: &[&str] = &[
    "example1", "example2", "example3", "example4", "example7", "example9", "rays:<angle>", "hatano",
];

fn real_spectrum(diag: &[f64]) -> Vec<Complex64> {
    diag.iter().map(|&d| Complex64::new(d, 0.0)).collect()
}

/// Upper bidiagonal matrix with the given diagonal and a constant superdiagonal.
pub fn bidiagonal_operator(diag: &[f64], superdiag: f64) -> MatrixOperator {
    let n = diag.len();
    let mut t = Vec::with_capacity(2 * n);
    for (i, &d) in diag.iter().enumerate() {
        t.push((i, i, d));
        if i + 1 < n && superdiag != 0.0 {
            t.push((i, i + 1, superdiag));
        }
    }
    let m = SparseMatrix::from_triplets(n, n, &t).expect("indices in range");
    MatrixOperator::new(m, format!("bidiagonal(n={n})"))
        .and_then(|op| op.with_spectrum(real_spectrum(diag)))
        .expect("square")
}

pub fn diagonal_operator(diag: &[f64]) -> MatrixOperator {
    bidiagonal_operator(diag, 0.0)
}

/// Real block-diagonal matrix with `radial_points` eigenvalues at radii
/// `1, 2, …` on each of `rays` rays in the upper half plane plus their
/// mirror images. The `2·rays` ray angles are equally spaced over
/// `[−total/2, total/2]`. Leftover dimensions get real eigenvalues
/// continuing along the positive axis. The seed only permutes the blocks.
pub fn ray_spectrum_operator(
    n: usize,
    rays: usize,
    total_angle_deg: f64,
    radial_points: usize,
    seed: u64,
) -> Result<MatrixOperator> {
    let paired = 2 * rays * radial_points;
    if paired > n {
        return Err(Error::Dimension {
            expected: n,
            got: paired,
        });
    }
    if !(0.0..360.0).contains(&total_angle_deg) {
        return Err(Error::InvalidArgument(format!(
            "ray angle {total_angle_deg} must lie in [0, 360)"
        )));
    }
    let half = 0.5 * total_angle_deg.to_radians();
    // (eigenvalue, occupies a 2×2 block)
    let mut blocks: Vec<(Complex64, bool)> = Vec::with_capacity(rays * radial_points + n - paired);
    for k in 1..=rays {
        let alpha = half * (2 * k - 1) as f64 / (2 * rays - 1) as f64;
        for r in 1..=radial_points {
            blocks.push((Complex64::from_polar(r as f64, alpha), true));
        }
    }
    for j in 0..n - paired {
        blocks.push((Complex64::new((radial_points + 1 + j) as f64, 0.0), false));
    }
    blocks.shuffle(&mut stream(seed, streams::MATRIX));

    let mut t = Vec::new();
    let mut spectrum = Vec::with_capacity(n);
    let mut i = 0;
    for (z, pair) in blocks {
        if pair {
            t.extend([(i, i, z.re), (i, i + 1, -z.im), (i + 1, i, z.im), (i + 1, i + 1, z.re)]);
            spectrum.push(z);
            spectrum.push(z.conj());
            i += 2;
        } else {
            t.push((i, i, z.re));
            spectrum.push(z);
            i += 1;
        }
    }
    debug_assert_eq!(i, n);
    let m = SparseMatrix::from_triplets(n, n, &t)?;
    MatrixOperator::new(m, format!("rays(n={n}, rays={rays}, angle={total_angle_deg})"))?
        .with_spectrum(spectrum)
}

/// Hatano–Nelson tridiagonal matrix: diagonal `d`, subdiagonal `e^{−γ}`,
/// superdiagonal `e^{γ}`. With `periodic` the corner couplings close the
/// chain into a ring, which is what makes the spectrum complex.
/// Without `d`, entries are drawn as `0.9·4·U(0,1)`.
pub fn hatano_nelson_operator(
    n: usize,
    gamma: f64,
    d: Option<Vec<f64>>,
    periodic: bool,
    seed: u64,
) -> Result<MatrixOperator> {
    if n < 2 {
        return Err(Error::InvalidArgument("Hatano-Nelson needs n >= 2".into()));
    }
    let d = match d {
        Some(d) if d.len() != n => {
            return Err(Error::Dimension {
                expected: n,
                got: d.len(),
            })
        }
        Some(d) => d,
        None => {
            let mut rng = stream(seed, streams::MATRIX);
            (0..n).map(|_| 0.9 * 4.0 * rng.random::<f64>()).collect()
        }
    };
    let (lo, hi) = ((-gamma).exp(), gamma.exp());
    let mut t = Vec::with_capacity(3 * n + 2);
    for i in 0..n {
        t.push((i, i, d[i]));
        if i + 1 < n {
            t.push((i, i + 1, hi));
            t.push((i + 1, i, lo));
        }
    }
    if periodic && n > 2 {
        t.push((n - 1, 0, hi));
        t.push((0, n - 1, lo));
    }
    let m = SparseMatrix::from_triplets(n, n, &t)?;
    MatrixOperator::new(m, format!("hatano-nelson(n={n}, gamma={gamma})"))
}

fn range(lo: i64, hi: i64) -> impl Iterator<Item = f64> {
    (lo..=hi).map(|k| k as f64)
}

/// Diagonal entries of the named test matrix.
pub fn example_spectrum(name: &str) -> Option<Vec<f64>> {
    let v: Vec<f64> = match name {
        "example1" => range(-2500, -1).chain(range(1, 2500)).collect(),
        "example2" => range(-100, -1).chain(range(1, 4900)).collect(),
        "example3" => range(-100, -1)
            .chain(range(1, 9850))
            .chain((986..=1035).map(|k| 10.0 * k as f64))
            .collect(),
        "example4" => range(-1000, -100)
            .chain((1..=9).map(|k| k as f64 / 10.0))
            .chain(range(1, 4090))
            .collect(),
        // the printed listing repeats part of the decimal grid; this reading
        // keeps the spectrum monotone and the size at 5000
        "example7" => [-500.0, -400.0, -300.0, -200.0, -100.0, 0.001]
            .into_iter()
            .chain((1..=9).map(|k| k as f64 / 100.0))
            .chain((1..=9).map(|k| k as f64 / 10.0))
            .chain(range(1, 4971))
            .chain([5000.0, 5100.0, 5200.0, 5300.0, 5400.0])
            .collect(),
        "example9" => range(1, 500)
            .chain((1..=100).map(|k| 500.0 + k as f64 / 5.0))
            .chain(range(521, 4920))
            .collect(),
        _ => return None,
    };
    Some(v)
}

/// Builds a named test matrix. `seed` feeds the random parts (ray block
/// order, Hatano–Nelson disorder).
pub fn preset(name: &str, seed: u64) -> Result<MatrixOperator> {
    let diag = example_spectrum(name);
    let op = match name {
        "example1" | "example2" | "example3" => {
            bidiagonal_operator(&diag.expect("known preset"), 1.0)
        }
        "example7" => bidiagonal_operator(&diag.expect("known preset"), 0.1),
        "example4" | "example9" => diagonal_operator(&diag.expect("known preset")),
        "hatano" => hatano_nelson_operator(2500, 0.5, None, true, seed)?,
        _ => {
            if let Some(angle) = name.strip_prefix("rays:") {
                let angle: f64 = angle
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad ray angle in {name:?}")))?;
                ray_spectrum_operator(2000, 50, angle, 20, seed)?
            } else {
                return Err(Error::InvalidArgument(format!(
                    "unknown matrix preset {name:?}; expected one of {}",
                    PRESET_NAMES.join(", ")
                )));
            }
        }
    };
    Ok(op)
}
