//! Real roots of scalar functions by sign-change scanning and bracketed refinement.

use crate::scalar::Real;

/// Refines a sign-changing bracket `[a, b]` to width `xtol` using the
/// Illinois variant of regula falsi, falling back to bisection whenever the
/// secant estimate stalls.
///
/// Returns `None` if `f(a)` and `f(b)` do not differ in sign.
pub fn refine_bracket<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, xtol: T) -> Option<T> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Some(a);
    }
    if fb == T::zero() {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    for iter in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let secant = (a * fb - b * fa) / (fb - fa);
        // Every third step is a plain bisection so the width keeps shrinking.
        let c = if iter % 3 == 2 || !secant.is_finite() || secant <= a.min(b) || secant >= a.max(b) {
            half * (a + b)
        } else {
            secant
        };
        let fc = f(c);
        if fc == T::zero() {
            return Some(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= half;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= half;
            }
            side = 1;
        }
    }
    Some(if fa.abs() < fb.abs() { a } else { b })
}

/// All sign changes of `f` on `[lo, hi]` sampled with spacing `step`, each
/// refined to `xtol`. Exact zeros at sample points are reported once.
pub fn scan_roots<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, step: T, xtol: T) -> Vec<T> {
    let n = ((hi - lo) / step).ceil().to_usize().unwrap_or(0).max(1);
    let node = |k: usize| {
        if k == n {
            hi
        } else {
            lo + step * T::from_usize(k).expect("grid index")
        }
    };
    let mut roots = Vec::new();
    let mut x_prev = node(0);
    let mut f_prev = f(x_prev);
    if f_prev == T::zero() {
        roots.push(x_prev);
    }
    for k in 1..=n {
        let x = node(k);
        let fx = f(x);
        if fx == T::zero() {
            roots.push(x);
        } else if f_prev != T::zero() && f_prev.signum() != fx.signum() {
            if let Some(r) = refine_bracket(&mut f, x_prev, x, xtol) {
                roots.push(r);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}
