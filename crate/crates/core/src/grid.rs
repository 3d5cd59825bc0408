//! States on a uniform 1-D grid over (0,1) with homogeneous Dirichlet boundary.
//!
//! A [`GridFunction`] stores the interior node values only; the boundary values
//! are identically zero and never stored. Two grid functions interoperate only
//! when they share the same interior dimension.

use std::f64::consts::PI;

/// A state vector on the interior nodes of a uniform Dirichlet grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    spacing: f64,
}

impl GridFunction {
    /// Zero state on `n` interior nodes.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "grid needs at least one interior node");
        GridFunction {
            values: vec![0.0; n],
            spacing: 1.0 / (n as f64 + 1.0),
        }
    }

    /// State from explicit interior values; the spacing is 1/(n+1).
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "grid needs at least one interior node");
        let spacing = 1.0 / (values.len() as f64 + 1.0);
        GridFunction { values, spacing }
    }

    /// j-th discrete sine mode, normalized in the discrete L2 inner product:
    /// `e_j(i) = sqrt(2) sin(j pi i / (n+1))`, `j = 1..=n`.
    pub fn sine_mode(j: usize, n: usize) -> Self {
        assert!(j >= 1 && j <= n, "sine mode index out of range");
        let denom = n as f64 + 1.0;
        let values = (1..=n)
            .map(|i| (2.0f64).sqrt() * (j as f64 * PI * i as f64 / denom).sin())
            .collect();
        GridFunction::from_values(values)
    }

    /// Eigenvalue of the negative 3-point Dirichlet Laplacian for mode `j`.
    pub fn laplacian_eigenvalue(j: usize, n: usize) -> f64 {
        let h = 1.0 / (n as f64 + 1.0);
        let s = (j as f64 * PI * h / 2.0).sin();
        4.0 / (h * h) * s * s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Discrete L2 inner product `h * sum(u_i v_i)`.
    pub fn dot_l2(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.len(), other.len(), "grid dimension mismatch");
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        self.spacing * s
    }

    /// Discrete L2 norm.
    pub fn norm_l2(&self) -> f64 {
        self.dot_l2(self).max(0.0).sqrt()
    }

    /// In-place `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &GridFunction) {
        assert_eq!(self.len(), other.len(), "grid dimension mismatch");
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(self.len(), other.len(), "grid dimension mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction {
            values,
            spacing: self.spacing,
        }
    }

    pub fn set_zero(&mut self) {
        for v in &mut self.values {
            *v = 0.0;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_modes_are_l2_orthonormal() {
        let n = 8;
        for j in 1..=n {
            for k in 1..=n {
                let ej = GridFunction::sine_mode(j, n);
                let ek = GridFunction::sine_mode(k, n);
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((ej.dot_l2(&ek) - expected).abs() < 1e-12, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn axpy_and_scale() {
        let mut u = GridFunction::from_values(vec![1.0, 2.0, 3.0]);
        let v = GridFunction::from_values(vec![1.0, 1.0, 1.0]);
        u.axpy(2.0, &v);
        assert_eq!(u.values(), &[3.0, 4.0, 5.0]);
        u.scale(0.5);
        assert_eq!(u.values(), &[1.5, 2.0, 2.5]);
    }

    #[test]
    fn eigenvalue_matches_laplacian_action() {
        let n = 6;
        let h = 1.0 / (n as f64 + 1.0);
        for j in [1usize, 3, 6] {
            let e = GridFunction::sine_mode(j, n);
            let lam = GridFunction::laplacian_eigenvalue(j, n);
            // -Delta_h e = lam * e
            for i in 0..n {
                let left = if i == 0 { 0.0 } else { e.values()[i - 1] };
                let right = if i + 1 == n { 0.0 } else { e.values()[i + 1] };
                let lap = (left - 2.0 * e.values()[i] + right) / (h * h);
                assert!((-lap - lam * e.values()[i]).abs() < 1e-9 * lam.max(1.0));
            }
        }
    }
}
