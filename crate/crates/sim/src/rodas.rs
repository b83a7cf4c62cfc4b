//! Fourth-order Rosenbrock method with embedded third-order error estimate
//! (Rodas4), for autonomous stiff systems with an analytic Jacobian.

use pamflow_core::Real;

use crate::error::{SimError, SimResult};
use crate::linalg::Lu;

/// Autonomous system `y' = f(y)` with Jacobian.
pub trait StiffSystem<T, const N: usize> {
    fn rhs(&self, y: &[T; N]) -> SimResult<[T; N]>;
    fn jacobian(&self, y: &[T; N]) -> SimResult<[[T; N]; N]>;
}

const GAMMA: f64 = 0.25;

const A: [[f64; 4]; 5] = [
    [0.0, 0.0, 0.0, 0.0],
    [1.544, 0.0, 0.0, 0.0],
    [0.946_678_528_081_582_6, 0.255_701_169_898_328_4, 0.0, 0.0],
    [3.314_825_187_068_521, 2.896_124_015_972_201, 0.998_641_913_997_781_7, 0.0],
    [1.221_224_509_226_641, 6.019_134_481_288_629, 12.537_083_329_320_87, -0.687_886_036_105_895],
];

const C: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [-5.6688, 0.0, 0.0, 0.0, 0.0],
    [-2.430_093_356_833_875, -0.206_359_915_709_191_5, 0.0, 0.0, 0.0],
    [-0.107_352_905_815_137_5, -9.594_562_251_023_355, -20.470_286_148_096_16, 0.0, 0.0],
    [7.496_443_313_967_647, -10.246_804_314_643_52, -33.999_903_528_199_05, 11.708_908_932_061_6, 0.0],
    [
        8.083_246_795_921_522,
        -7.981_132_988_064_893,
        -31.521_594_328_743_71,
        16.319_305_431_231_36,
        -6.058_818_238_834_054,
    ],
];

/// Local error tolerances and step-size limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest admissible step relative to `1 + |t|`.
    pub h_min_rel: f64,
    pub h_max: f64,
    pub h_init: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            h_min_rel: 1e-15,
            h_max: f64::INFINITY,
            h_init: 1e-6,
        }
    }
}

/// Result of one attempted step.
#[derive(Debug, Clone, Copy)]
pub struct Attempt<T, const N: usize> {
    pub y_new: [T; N],
    /// Weighted RMS norm of the embedded error estimate; accept if `<= 1`.
    pub err: T,
}

fn axpy<T: Real, const N: usize>(y: &mut [T; N], a: T, x: &[T; N]) {
    for i in 0..N {
        y[i] += a * x[i];
    }
}

/// One Rodas4 step of size `h` from `y`.
pub fn rodas4_step<T: Real, const N: usize, S: StiffSystem<T, N>>(
    sys: &S,
    y: &[T; N],
    f0: &[T; N],
    jac: &[[T; N]; N],
    h: T,
    ctl: &StepControl,
    t: T,
) -> SimResult<Attempt<T, N>> {
    let fac = (h * T::lit(GAMMA)).recip();
    let mut m = *jac;
    for i in 0..N {
        for j in 0..N {
            m[i][j] = -m[i][j];
        }
        m[i][i] += fac;
    }
    let lu = Lu::factor(m).ok_or(SimError::SingularMatrix { t: t.as_f64() })?;
    let mut k = [[T::zero(); N]; 6];
    for stage in 0..6 {
        let mut ys = *y;
        if stage < 5 {
            for j in 0..stage {
                axpy(&mut ys, T::lit(A[stage][j]), &k[j]);
            }
        } else {
            for j in 0..4 {
                axpy(&mut ys, T::lit(A[4][j]), &k[j]);
            }
            axpy(&mut ys, T::one(), &k[4]);
        }
        let mut rhs = if stage == 0 { *f0 } else { sys.rhs(&ys)? };
        for j in 0..stage {
            axpy(&mut rhs, T::lit(C[stage][j]) / h, &k[j]);
        }
        k[stage] = lu.solve(rhs);
    }
    let mut y_new = *y;
    for j in 0..4 {
        axpy(&mut y_new, T::lit(A[4][j]), &k[j]);
    }
    axpy(&mut y_new, T::one(), &k[4]);
    axpy(&mut y_new, T::one(), &k[5]);
    let (rtol, atol) = (T::lit(ctl.rel_tol), T::lit(ctl.abs_tol));
    let mut acc = T::zero();
    for i in 0..N {
        let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
        let e = k[5][i] / sk;
        acc += e * e;
    }
    let err = (acc / T::from_usize(N).expect("dimension")).sqrt();
    Ok(Attempt { y_new, err })
}

/// Step-size factor from an error norm, with the usual safety and clamps.
pub fn step_factor<T: Real>(err: T) -> T {
    if err == T::zero() {
        return T::lit(6.0);
    }
    (T::lit(0.9) * err.powf(T::lit(-0.25))).max(T::lit(0.2)).min(T::lit(6.0))
}

/// Adaptive driver state: current point, derivative and proposed step.
#[derive(Debug, Clone)]
pub struct Rodas4<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub f: [T; N],
    pub h: T,
    pub ctl: StepControl,
    pub accepted: usize,
    pub rejected: usize,
}

/// An accepted step `(t0, y0, f0) -> (t1, y1, f1)`.
#[derive(Debug, Clone, Copy)]
pub struct Accepted<T, const N: usize> {
    pub t0: T,
    pub y0: [T; N],
    pub f0: [T; N],
    pub t1: T,
    pub y1: [T; N],
    pub f1: [T; N],
}

impl<T: Real, const N: usize> Accepted<T, N> {
    /// Cubic Hermite interpolant on the step.
    pub fn interpolate(&self, t: T) -> [T; N] {
        hermite(self.t0, &self.y0, &self.f0, self.t1, &self.y1, &self.f1, t)
    }
}

pub fn hermite<T: Real, const N: usize>(t0: T, y0: &[T; N], f0: &[T; N], t1: T, y1: &[T; N], f1: &[T; N], t: T) -> [T; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let h00 = (one + two * s) * (one - s) * (one - s);
    let h10 = s * (one - s) * (one - s);
    let h01 = s * s * (three - two * s);
    let h11 = s * s * (s - one);
    let mut out = [T::zero(); N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

impl<T: Real, const N: usize> Rodas4<T, N> {
    pub fn new<S: StiffSystem<T, N>>(sys: &S, t0: T, y0: [T; N], ctl: StepControl) -> SimResult<Self> {
        let f = sys.rhs(&y0)?;
        Ok(Self {
            t: t0,
            y: y0,
            f,
            h: T::lit(ctl.h_init),
            ctl,
            accepted: 0,
            rejected: 0,
        })
    }

    /// Advances by one accepted step, never past `t_end`.
    pub fn step<S: StiffSystem<T, N>>(&mut self, sys: &S, t_end: T) -> SimResult<Accepted<T, N>> {
        let jac = sys.jacobian(&self.y)?;
        loop {
            let h_min = T::lit(self.ctl.h_min_rel) * (T::one() + self.t.abs());
            let mut h = self.h.min(T::lit(self.ctl.h_max));
            if self.t + h > t_end {
                h = t_end - self.t;
            }
            if h < h_min {
                return Err(SimError::StepSizeUnderflow { t: self.t.as_f64(), h: h.as_f64() });
            }
            let attempt = rodas4_step(sys, &self.y, &self.f, &jac, h, &self.ctl, self.t);
            let (y_new, err) = match attempt {
                Ok(a) if a.err.is_finite() && a.y_new.iter().all(|v| v.is_finite()) => (a.y_new, a.err),
                Ok(_) | Err(SimError::SingularMatrix { .. }) | Err(SimError::Core(_)) => {
                    // Retry smaller; a failed stage evaluation usually means the step left the domain.
                    self.rejected += 1;
                    self.h = h * T::lit(0.25);
                    continue;
                }
                Err(e) => return Err(e),
            };
            if err <= T::one() {
                let f_new = sys.rhs(&y_new)?;
                let acc = Accepted {
                    t0: self.t,
                    y0: self.y,
                    f0: self.f,
                    t1: self.t + h,
                    y1: y_new,
                    f1: f_new,
                };
                self.t = acc.t1;
                self.y = y_new;
                self.f = f_new;
                self.h = h * step_factor(err);
                self.accepted += 1;
                return Ok(acc);
            }
            self.rejected += 1;
            self.h = h * step_factor(err).min(T::one());
        }
    }
}
