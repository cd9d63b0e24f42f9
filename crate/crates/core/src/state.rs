//! Real inner-product state vectors and the stage-derivative Gram matrix.
//!
//! Everything downstream (energy drift, relaxation factors, the relaxation-free
//! quadratic) is expressed in terms of plain dot products of these vectors, so
//! summation order is fixed once here and never varies between runs.

use std::ops::Index;

/// A state vector in R^m under the unweighted L2 inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    components: Vec<f64>,
}

impl State {
    pub fn new(components: Vec<f64>) -> Self {
        State { components }
    }

    pub fn zeros(m: usize) -> Self {
        State {
            components: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|x| x.is_finite())
    }

    /// Componentwise sum of this state, in index order.
    pub fn component_sum(&self) -> f64 {
        self.components.iter().sum()
    }
}

impl From<Vec<f64>> for State {
    fn from(components: Vec<f64>) -> Self {
        State { components }
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.components[i]
    }
}

/// `<u, v>` with sequential summation in index order.
///
/// Panics on length mismatch.
pub fn inner(u: &State, v: &State) -> f64 {
    assert_eq!(u.len(), v.len(), "inner product length mismatch");
    let mut acc = 0.0;
    for i in 0..u.len() {
        acc += u.components[i] * v.components[i];
    }
    acc
}

/// Squared L2 norm `<u, u>`.
pub fn energy(u: &State) -> f64 {
    inner(u, u)
}

/// `base + dt * sum_j coeffs[j] * stages[j]`.
///
/// Panics when coefficient and stage counts differ or stage lengths are
/// inconsistent with `base`.
pub fn linear_combination(base: &State, dt: f64, coeffs: &[f64], stages: &[State]) -> State {
    assert_eq!(
        coeffs.len(),
        stages.len(),
        "coefficient / stage count mismatch"
    );
    let mut out = base.components.clone();
    for (c, stage) in coeffs.iter().zip(stages) {
        assert_eq!(stage.len(), base.len(), "stage length mismatch");
        if *c == 0.0 {
            continue;
        }
        let w = dt * c;
        for (o, s) in out.iter_mut().zip(&stage.components) {
            *o += w * s;
        }
    }
    State { components: out }
}

/// L2 distance `||u - v||`.
///
/// Panics on length mismatch.
pub fn l2_distance(u: &State, v: &State) -> f64 {
    assert_eq!(u.len(), v.len(), "l2 distance length mismatch");
    let mut acc = 0.0;
    for i in 0..u.len() {
        let d = u.components[i] - v.components[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Symmetric matrix of stage-derivative inner products `G_ij = <f_i, f_j>`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Largest entry magnitude; 0 for an all-zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `sum_ij w_i * M_ij * G_ij` for a row-indexed coefficient matrix `M`.
    pub fn weighted_matrix_sum(&self, w: &[f64], m: &dyn Fn(usize, usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, wi) in w.iter().enumerate().take(self.n) {
            for j in 0..self.n {
                acc += wi * m(i, j) * self.get(i, j);
            }
        }
        acc
    }

    /// `sum_ij w1_i * w2_j * G_ij`.
    pub fn bilinear(&self, w1: &[f64], w2: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, wi) in w1.iter().enumerate().take(self.n) {
            for (j, wj) in w2.iter().enumerate().take(self.n) {
                acc += wi * wj * self.get(i, j);
            }
        }
        acc
    }
}

/// Gram matrix of the given stages, each unordered pair computed once so the
/// result is symmetric to the last bit.
pub fn gram(stages: &[State]) -> GramMatrix {
    assert!(!stages.is_empty(), "gram of an empty stage list");
    let n = stages.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let g = inner(&stages[i], &stages[j]);
            entries[i * n + j] = g;
            entries[j * n + i] = g;
        }
    }
    GramMatrix { n, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_examples() {
        assert_eq!(
            inner(&State::new(vec![1.0, 0.0]), &State::new(vec![0.0, 1.0])),
            0.0
        );
        assert_eq!(
            inner(&State::new(vec![3.0, 4.0]), &State::new(vec![3.0, 4.0])),
            25.0
        );
        assert_eq!(
            inner(
                &State::new(vec![1.0, 2.0, 3.0]),
                &State::new(vec![4.0, 5.0, 6.0])
            ),
            32.0
        );
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&State::zeros(3)), 0.0);
        let t = 0.7321f64;
        let u = State::new(vec![t.cos(), t.sin()]);
        assert!((energy(&u) - 1.0).abs() < 1e-15);
        assert_eq!(energy(&State::new(vec![1.0, -1.0, 2.0])), 6.0);
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn inner_rejects_mismatched_lengths() {
        inner(&State::zeros(2), &State::zeros(3));
    }

    #[test]
    fn linear_combination_examples() {
        let base = State::new(vec![1.0, 2.0]);
        let v = State::new(vec![3.0, -1.0]);

        let zero_coeffs = linear_combination(&base, 0.5, &[0.0, 0.0], &[v.clone(), v.clone()]);
        assert_eq!(zero_coeffs, base);

        let shifted = linear_combination(&base, 1.0, &[1.0], std::slice::from_ref(&v));
        assert_eq!(shifted, State::new(vec![4.0, 1.0]));

        // four equal stages under consistent weights act like a single stage
        let b = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        let stages = vec![v.clone(), v.clone(), v.clone(), v.clone()];
        let u = linear_combination(&base, 0.5, &b, &stages);
        let direct = linear_combination(&base, 0.5, &[1.0], &[v]);
        for i in 0..2 {
            assert!((u[i] - direct[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn energy_unchanged_by_zero_dt_combination() {
        let u = State::new(vec![0.3, -1.7, 2.9]);
        let stages = vec![State::new(vec![9.0, 9.0, 9.0])];
        let v = linear_combination(&u, 0.0, &[123.0], &stages);
        assert_eq!(energy(&v), energy(&u));
    }

    #[test]
    fn gram_examples() {
        let g = gram(&[State::new(vec![2.0, 0.0])]);
        assert_eq!(g.get(0, 0), 4.0);

        let g = gram(&[State::new(vec![1.0, 0.0]), State::new(vec![0.0, 1.0])]);
        assert_eq!(
            (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)),
            (1.0, 0.0, 0.0, 1.0)
        );

        let g = gram(&[State::new(vec![1.0, 1.0]), State::new(vec![1.0, -1.0])]);
        assert_eq!((g.get(0, 0), g.get(0, 1), g.get(1, 1)), (2.0, 0.0, 2.0));
    }

    #[test]
    fn gram_of_duplicated_stages_is_singular() {
        let a = State::new(vec![0.3, 1.2, -0.4]);
        let g = gram(&[a.clone(), a.clone()]);
        let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
        assert!(det.abs() <= 1e-12 * g.max_abs() * g.max_abs());

        let b = State::new(vec![1.0, 0.0, 2.0]);
        let g = gram(&[a.clone(), b.clone(), a.clone()]);
        // 3x3 determinant via cofactors
        let d = |i: usize, j: usize| g.get(i, j);
        let det = d(0, 0) * (d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1))
            - d(0, 1) * (d(1, 0) * d(2, 2) - d(1, 2) * d(2, 0))
            + d(0, 2) * (d(1, 0) * d(2, 1) - d(1, 1) * d(2, 0));
        let scale = g.max_abs().powi(3);
        assert!(det.abs() <= 1e-12 * scale);
    }

    #[test]
    fn gram_is_exactly_symmetric() {
        let stages: Vec<State> = (0..4)
            .map(|i| State::new((0..5).map(|j| ((i * 7 + j * 3) as f64).sin()).collect()))
            .collect();
        let g = gram(&stages);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }
}
