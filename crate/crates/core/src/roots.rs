//! Polynomial roots and root-product expansion.
//!
//! Coefficient slices are in ascending powers of `z^-1`, which is the same
//! as descending powers of `z`: `[1, b1, b2]` is `z^2 + b1 z + b2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Roots of the polynomial `c[0] z^n + c[1] z^(n-1) + ... + c[n]`.
///
/// Leading zero coefficients lower the degree (roots at infinity are
/// dropped). Degrees one and two use closed forms; higher degrees use the
/// eigenvalues of the companion matrix.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let start = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    let c = &coeffs[start..];
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![Complex64::new(-c[1] / c[0], 0.0)],
        3 => quadratic(c[0], c[1], c[2]).to_vec(),
        _ => companion_eigenvalues(c),
    }
}

/// Roots of `a z^2 + b z + c` with real coefficients.
///
/// Uses the cancellation-free form `q = -(b + sign(b) sqrt(disc)) / 2` for
/// real roots.
pub fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            // b == 0 and disc == 0 forces c == 0
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn companion_eigenvalues(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -c[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Expands `prod (z - r_i)` into complex coefficients, descending powers of z.
pub fn poly_from_roots(rs: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for &r in rs {
        let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        p = next;
    }
    p
}

/// Greedily pairs each root in `a` with the nearest unused root in `b`.
///
/// Exact for the degree-two sets used by the notch sections.
pub fn pair_roots(a: &[Complex64], b: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    let mut used = vec![false; b.len()];
    let mut pairs = Vec::with_capacity(a.len());
    for &ra in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|(_, x), (_, y)| (**x - ra).norm().total_cmp(&(**y - ra).norm()));
        if let Some((j, &rb)) = best {
            used[j] = true;
            pairs.push((ra, rb));
        }
    }
    pairs
}
