//! Dormand–Prince 5(4) for the non-stiff reduced flow.

use pamflow_core::Real;

use crate::error::{SimError, SimResult};

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction) with
/// mixed error control `atol + rtol |y|`.
pub fn dopri5<T: Real, const N: usize, F>(mut f: F, x0: T, y0: [T; N], x1: T, rtol: f64, atol: f64) -> SimResult<[T; N]>
where
    F: FnMut(T, &[T; N]) -> SimResult<[T; N]>,
{
    if x0 == x1 {
        return Ok(y0);
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let (rtol, atol) = (T::lit(rtol), T::lit(atol));
    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y)?;
    let mut h = span * T::lit(0.01);
    let h_min = span * T::lit(1e-14);
    for _ in 0..1_000_000 {
        let remaining = (x1 - x).abs();
        if remaining <= T::zero() {
            return Ok(y);
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        let mut k = [[T::zero(); N]; 7];
        k[0] = k0;
        for s in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = T::lit(A[s][j]);
                for i in 0..N {
                    ys[i] += hs * a * kj[i];
                }
            }
            let xs = x + hs * T::lit(C[s]);
            k[s + 1] = if s == 5 { f(if last { x1 } else { xs }, &ys)? } else { f(xs, &ys)? };
            if s == 5 {
                let mut acc = T::zero();
                for i in 0..N {
                    let mut e = T::zero();
                    for (j, kj) in k.iter().enumerate() {
                        e += T::lit(E[j]) * kj[i];
                    }
                    let sc = atol + rtol * y[i].abs().max(ys[i].abs());
                    let r = hs * e / sc;
                    acc += r * r;
                }
                let err = (acc / T::from_usize(N).expect("dimension")).sqrt();
                if !err.is_finite() || ys.iter().any(|v| !v.is_finite()) {
                    h *= T::lit(0.25);
                } else if err <= T::one() {
                    x = if last { x1 } else { x + hs };
                    y = ys;
                    k0 = k[6];
                    let fac = if err == T::zero() { T::lit(5.0) } else { T::lit(0.9) * err.powf(T::lit(-0.2)) };
                    h *= fac.min(T::lit(5.0)).max(T::lit(0.2));
                    if last {
                        return Ok(y);
                    }
                } else {
                    h *= (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.1));
                }
                if h < h_min {
                    return Err(SimError::StepSizeUnderflow { t: x.as_f64(), h: h.as_f64() });
                }
            }
        }
    }
    Err(SimError::TooManySteps(1_000_000))
}
