//! LU factorisation with partial pivoting for small dense systems.

use pamflow_core::Real;

#[derive(Debug, Clone)]
pub struct Lu<T, const N: usize> {
    lu: [[T; N]; N],
    perm: [usize; N],
}

impl<T: Real, const N: usize> Lu<T, N> {
    /// Factorises `m`; `None` if a pivot vanishes.
    pub fn factor(mut m: [[T; N]; N]) -> Option<Self> {
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..N {
            let piv = (k..N)
                .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("non-empty range");
            if !(m[piv][k].abs() > T::zero()) || !m[piv][k].is_finite() {
                return None;
            }
            m.swap(k, piv);
            perm.swap(k, piv);
            for i in k + 1..N {
                let f = m[i][k] / m[k][k];
                m[i][k] = f;
                for j in k + 1..N {
                    let t = m[k][j];
                    m[i][j] -= f * t;
                }
            }
        }
        Some(Self { lu: m, perm })
    }

    pub fn solve(&self, b: [T; N]) -> [T; N] {
        let mut x = [T::zero(); N];
        for i in 0..N {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..N).rev() {
            let mut acc = x[i];
            for j in i + 1..N {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc / self.lu[i][i];
        }
        x
    }
}
