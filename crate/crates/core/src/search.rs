//! Bracketed one-dimensional minimization.

use crate::num::Float;

/// Result of a bracketed search.
#[derive(Debug, Clone, Copy)]
pub struct SearchResult<T> {
    pub x: T,
    pub value: T,
    /// False when the coarse scan put the minimum on a domain boundary and
    /// no interior bracket existed.
    pub bracketed: bool,
}

/// Minimize `f` over `[lo, hi]` by a coarse scan followed by golden-section
/// refinement of the winning bracket.
///
/// `scan_points` function evaluations locate the best coarse sample; the
/// golden-section stage then shrinks `[x_{i-1}, x_{i+1}]` until the interval
/// is below `rel_tol * |x|`. When the best coarse sample sits on a boundary
/// the boundary point is returned with `bracketed = false`.
pub fn scan_golden_min<T: Float>(
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    scan_points: usize,
    rel_tol: T,
) -> SearchResult<T> {
    debug_assert!(scan_points >= 3);
    let n = scan_points;
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    let mut best_i = 0usize;
    let mut best_v = T::infinity();
    let xs: Vec<T> = (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + step * T::from_usize(i).unwrap()
            }
        })
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == n - 1 {
        let x = xs[best_i];
        return SearchResult {
            x,
            value: best_v,
            bracketed: false,
        };
    }
    let (x, value) = golden_min(&f, xs[best_i - 1], xs[best_i + 1], rel_tol);
    SearchResult {
        x,
        value,
        bracketed: true,
    }
}

/// Golden-section minimization on `[a, b]` to relative interval tolerance.
pub fn golden_min<T: Float>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> (T, T) {
    // inverse golden ratio
    let inv_phi = T::of(0.618_033_988_749_894_8);
    let mut a = a;
    let mut b = b;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let scale = a.abs().max(b.abs()).max(T::min_positive_value());
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * scale {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) * T::of(0.5);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum_is_found() {
        let f = |x: f64| (x - 0.3).powi(2) + 1.0;
        let r = scan_golden_min(f, -2.0, 2.0, 64, 1e-9);
        assert!(r.bracketed);
        assert!((r.x - 0.3).abs() < 1e-7, "x = {}", r.x);
    }

    #[test]
    fn boundary_minimum_is_flagged() {
        let f = |x: f64| x;
        let r = scan_golden_min(f, 1.0, 3.0, 32, 1e-9);
        assert!(!r.bracketed);
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn works_on_log_transformed_domains() {
        // minimum of x + 1/x at x = 1, searched in log space
        let f = |u: f64| {
            let x = u.exp();
            x + 1.0 / x
        };
        let r = scan_golden_min(f, (1e-6f64).ln(), (1e6f64).ln(), 64, 1e-10);
        assert!((r.x.exp() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn f32_variant_converges() {
        let f = |x: f32| (x - 1.5).powi(2);
        let r = scan_golden_min(f, 0.0f32, 4.0, 32, 1e-5);
        assert!((r.x - 1.5).abs() < 1e-3);
    }
}
