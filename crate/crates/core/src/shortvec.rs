//! Bounded short-vector counting for positive definite integral quaternary forms.
//!
//! Candidates are proposed by a floating-point Fincke–Pohst recursion with a
//! small slack; every candidate is accepted or rejected by evaluating the form
//! exactly in integers, so the float path only affects speed.

use crate::error::{Error, Result};

const DIM: usize = 4;

/// `Q(v) = ½ vᵀ A v` with `A` symmetric, even diagonal, positive definite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntForm {
    a: [[i64; DIM]; DIM],
}

impl IntForm {
    pub fn new(a: [[i64; DIM]; DIM]) -> Result<Self> {
        for s in 0..DIM {
            if a[s][s] % 2 != 0 {
                return Err(Error::Precondition("form has an odd diagonal entry".into()));
            }
            for t in 0..DIM {
                if a[s][t] != a[t][s] {
                    return Err(Error::Precondition("form matrix is not symmetric".into()));
                }
            }
        }
        let form = IntForm { a };
        if !form.is_positive_definite() {
            return Err(Error::Precondition("form is not positive definite".into()));
        }
        Ok(form)
    }

    /// The sum-of-squares form on ℤ⁴ scaled by `c`.
    pub fn scaled_identity(c: i64) -> Self {
        let mut a = [[0; DIM]; DIM];
        for (s, row) in a.iter_mut().enumerate() {
            row[s] = 2 * c;
        }
        IntForm { a }
    }

    pub fn matrix(&self) -> &[[i64; DIM]; DIM] {
        &self.a
    }

    pub fn value(&self, v: &[i64; DIM]) -> i128 {
        let mut acc: i128 = 0;
        for s in 0..DIM {
            acc += self.a[s][s] as i128 / 2 * v[s] as i128 * v[s] as i128;
            for t in s + 1..DIM {
                acc += self.a[s][t] as i128 * v[s] as i128 * v[t] as i128;
            }
        }
        acc
    }

    /// Leading principal minors, exactly.
    fn is_positive_definite(&self) -> bool {
        // Bareiss on i128 is ample for the entry sizes used here.
        let mut m: Vec<Vec<i128>> =
            self.a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut prev: i128 = 1;
        for k in 0..DIM {
            if m[k][k] <= 0 {
                return false;
            }
            for i in k + 1..DIM {
                for j in k + 1..DIM {
                    let num = m[i][j]
                        .checked_mul(m[k][k])
                        .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j])?));
                    match num {
                        Some(v) => m[i][j] = v / prev,
                        None => return self.is_positive_definite_f64(),
                    }
                }
            }
            prev = m[k][k];
        }
        true
    }

    fn is_positive_definite_f64(&self) -> bool {
        cholesky(&self.a).is_some()
    }

    /// Gauss-style pairwise reduction; returns an equivalent form with
    /// `2|A_st| ≤ A_tt` for all `s ≠ t`.
    pub fn pair_reduced(&self) -> IntForm {
        let mut a = self.a;
        loop {
            let mut changed = false;
            for s in 0..DIM {
                for t in 0..DIM {
                    if s == t || 2 * a[s][t].abs() <= a[t][t] {
                        continue;
                    }
                    let q = (a[s][t] as f64 / a[t][t] as f64).round() as i64;
                    for k in 0..DIM {
                        a[s][k] -= q * a[t][k];
                    }
                    for k in 0..DIM {
                        a[k][s] -= q * a[k][t];
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        IntForm { a }
    }

    /// `counts[m] = #{v : Q(v) = m}` for `0 ≤ m ≤ bound`.
    pub fn theta_counts(&self, bound: u64) -> Vec<u64> {
        let form = self.pair_reduced();
        let q = cholesky(&form.a).expect("positive definite");
        let mut counts = vec![0u64; bound as usize + 1];
        let mut x = [0i64; DIM];
        let slack = 1e-9 * (bound as f64 + 1.0);
        enumerate(&form, &q, DIM - 1, bound as f64 + slack, &mut x, bound, &mut counts);
        counts
    }

    pub fn count(&self, m: u64) -> u64 {
        self.theta_counts(m)[m as usize]
    }
}

/// Cohen's quadratic-form decomposition: `Q(x) = Σᵢ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²`.
fn cholesky(a: &[[i64; DIM]; DIM]) -> Option<[[f64; DIM]; DIM]> {
    let mut q = [[0f64; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            q[i][j] = a[i][j] as f64 / 2.0;
        }
    }
    for i in 0..DIM {
        if q[i][i] <= 0.0 {
            return None;
        }
        for j in i + 1..DIM {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..DIM {
            for l in k..DIM {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    Some(q)
}

fn enumerate(
    form: &IntForm,
    q: &[[f64; DIM]; DIM],
    i: usize,
    remaining: f64,
    x: &mut [i64; DIM],
    bound: u64,
    counts: &mut [u64],
) {
    let center: f64 = -(i + 1..DIM).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let radius = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo = (center - radius - 1e-7).ceil() as i64;
    let hi = (center + radius + 1e-7).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        let d = xi as f64 - center;
        let rest = remaining - q[i][i] * d * d;
        if i == 0 {
            let v = form.value(x);
            if (0..=bound as i128).contains(&v) {
                counts[v as usize] += 1;
            }
        } else if rest > -1e-6 {
            enumerate(form, q, i - 1, rest, x, bound, counts);
        }
    }
    x[i] = 0;
}
