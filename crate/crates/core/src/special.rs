//! Associated Laguerre polynomials and small polynomial helpers.

/// Evaluates the associated Laguerre polynomial `L_n^{(k)}(x)` by the
/// three-term recurrence in `n` at fixed superscript `k`.
pub fn assoc_laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Ascending power-basis coefficients of `L_n^{(k)}(x)`:
/// `sum_i (-1)^i C(n+k, n-i) x^i / i!`.
pub fn assoc_laguerre_coeffs(n: usize, k: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n + k, n - i) / factorial(i)
        })
        .collect()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Product of two ascending-coefficient polynomials.
pub fn poly_mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::default(); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = out[i + j] + ai * bj;
        }
    }
    out
}

/// `p(c·x)` from the coefficients of `p(x)`.
pub fn poly_scale_arg(p: &[f64], c: f64) -> Vec<f64> {
    let mut pow = 1.0;
    p.iter()
        .map(|&a| {
            let v = a * pow;
            pow *= c;
            v
        })
        .collect()
}
