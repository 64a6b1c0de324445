//! Truncated Fourier basis for approximating time-varying disturbances.
//!
//! Entry `j` (1-based) of the basis vector is `1` for `j = 1`,
//! `cos(ω_l t)` for `j = 2l` and `sin(ω_l t)` for `j = 2l + 1`, with
//! `ω_l = 2πl / T`. Rust slices are 0-based, so entry `j` lives at index `j - 1`.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("number of harmonic pairs must be at least 1")]
    NoHarmonics,
    #[error("basis period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBasis {
    harmonics: usize,
    period: f64,
}

impl FourierBasis {
    pub fn new(harmonics: usize, period: f64) -> Result<Self, BasisError> {
        if harmonics < 1 {
            return Err(BasisError::NoHarmonics);
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(BasisError::InvalidPeriod(period));
        }
        Ok(Self { harmonics, period })
    }

    /// Number of harmonic pairs `L`.
    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Basis length `N = 2L + 1`.
    pub fn len(&self) -> usize {
        2 * self.harmonics + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frequency(&self, l: usize) -> f64 {
        2.0 * PI * l as f64 / self.period
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(t, &mut out);
        out
    }

    /// Writes the basis at `t` into `out`, which must have length `N`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.len(), "basis buffer length");
        out[0] = 1.0;
        // Reduce the phase first so that t and t + T agree to round-off.
        let phase = t.rem_euclid(self.period) / self.period;
        for l in 1..=self.harmonics {
            let (s, c) = (2.0 * PI * l as f64 * phase).sin_cos();
            out[2 * l - 1] = c;
            out[2 * l] = s;
        }
    }

    /// Least-squares weights `w` minimising Σₖ (Σⱼ wⱼ ψⱼ(tₖ) − yₖ)² over the
    /// samples `(tₖ, yₖ)`.
    pub fn fit(&self, samples: &[(f64, f64)]) -> Vec<f64> {
        let n = self.len();
        let mut gram = vec![0.0; n * n];
        let mut rhs = vec![0.0; n];
        let mut psi = vec![0.0; n];
        for &(t, y) in samples {
            self.eval_into(t, &mut psi);
            for r in 0..n {
                rhs[r] += psi[r] * y;
                for c in 0..n {
                    gram[r * n + c] += psi[r] * psi[c];
                }
            }
        }
        solve_dense(&mut gram, &mut rhs, n);
        rhs
    }

    /// Σⱼ wⱼ ψⱼ(t).
    pub fn reconstruct(&self, weights: &[f64], t: f64) -> f64 {
        self.eval(t).iter().zip(weights).map(|(p, w)| p * w).sum()
    }
}

/// Gaussian elimination with partial pivoting; the solution replaces `rhs`.
fn solve_dense(a: &mut [f64], rhs: &mut [f64], n: usize) {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let d = a[col * n + col];
        if d == 0.0 {
            continue;
        }
        for row in (col + 1)..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * rhs[k];
        }
        let d = a[col * n + col];
        rhs[col] = if d == 0.0 { 0.0 } else { acc / d };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_zero_and_period() {
        let b = FourierBasis::new(5, 30.0).unwrap();
        let expect = [1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        assert_eq!(b.eval(0.0), expect);
        for (x, e) in b.eval(30.0).iter().zip(expect) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn half_period_two_harmonics() {
        let b = FourierBasis::new(2, 30.0).unwrap();
        let v = b.eval(15.0);
        let expect = [1.0, -1.0, 0.0, 1.0, 0.0];
        for (x, e) in v.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FourierBasis::new(0, 30.0), Err(BasisError::NoHarmonics));
        assert_eq!(FourierBasis::new(1, 0.0), Err(BasisError::InvalidPeriod(0.0)));
        assert!(FourierBasis::new(1, f64::NAN).is_err());
        assert_eq!(FourierBasis::new(5, 30.0).unwrap().len(), 11);
    }

    #[test]
    fn fit_recovers_in_span_signal() {
        let b = FourierBasis::new(3, 10.0).unwrap();
        let w = [0.5, -1.0, 2.0, 0.0, 0.25, 3.0, -0.75];
        let samples: Vec<(f64, f64)> = (0..=400)
            .map(|k| {
                let t = 10.0 * k as f64 / 400.0;
                (t, b.reconstruct(&w, t))
            })
            .collect();
        let fit = b.fit(&samples);
        for (a, e) in fit.iter().zip(w) {
            assert!((a - e).abs() < 1e-10, "{fit:?}");
        }
    }
}
