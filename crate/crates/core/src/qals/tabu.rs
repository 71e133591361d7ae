use super::permutation::Coefficients;
use crate::qubo::{BinarySolution, QuboProblem};

/// Tabu matrix `S`, a running sum of `z zᵀ − I + diag(z)` terms.
///
/// Stored dense and symmetric. As a quadratic form it contributes
/// `S[i][i]` to the linear coefficient of `x_i` and `2 S[i][j]` to the
/// coefficient of `x_i x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabuMatrix {
    n: usize,
    entries: Vec<f64>,
    updates: usize,
    spin_form: bool,
}

impl TabuMatrix {
    /// With `spin_form`, candidates are mapped to ±1 before the outer
    /// product; otherwise the 0/1 vector is used as is.
    pub fn zeros(n: usize, spin_form: bool) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
            updates: 0,
            spin_form,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// `S ← S + z zᵀ − I + diag(z)`.
    pub fn update(&mut self, z: &BinarySolution) {
        assert_eq!(z.len(), self.n, "tabu update dimension");
        let v: Vec<f64> = z
            .bits()
            .iter()
            .map(|&b| {
                if self.spin_form {
                    2.0 * b as f64 - 1.0
                } else {
                    b as f64
                }
            })
            .collect();
        let n = self.n;
        for i in 0..n {
            let row = &mut self.entries[i * n..(i + 1) * n];
            if v[i] != 0.0 {
                for (cell, &vj) in row.iter_mut().zip(&v) {
                    *cell += v[i] * vj;
                }
            }
            row[i] += v[i] - 1.0;
        }
        self.updates += 1;
    }

    /// The single update term for `z` as a canonical QUBO.
    pub fn update_term(z: &BinarySolution, spin_form: bool) -> QuboProblem {
        let mut s = Self::zeros(z.len(), spin_form);
        s.update(z);
        s.to_qubo()
    }

    pub fn to_qubo(&self) -> QuboProblem {
        let mut q = QuboProblem::new(self.n.max(1)).expect("n >= 1");
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                if v != 0.0 {
                    q.add(i, j, if i == j { v } else { 2.0 * v }).unwrap();
                }
            }
        }
        q
    }
}

/// `Q + λ S` as a lazily evaluated coefficient source.
pub struct Penalized<'a> {
    pub q: &'a QuboProblem,
    pub tabu: &'a TabuMatrix,
    pub lambda: f64,
}

impl Coefficients for Penalized<'_> {
    fn n(&self) -> usize {
        self.q.n()
    }

    #[inline]
    fn coeff(&self, i: usize, j: usize) -> f64 {
        let s = if i == j {
            self.tabu.get(i, i)
        } else {
            2.0 * self.tabu.get(i, j)
        };
        self.q.get(i, j) + self.lambda * s
    }
}

/// Flips every bit independently with probability `p`, drawing one
/// Bernoulli per bit in index order.
pub fn perturb_candidate<R: rand::Rng + ?Sized>(
    z: &BinarySolution,
    p: f64,
    rng: &mut R,
) -> BinarySolution {
    let p = p.clamp(0.0, 1.0);
    BinarySolution::from_bools(z.bits().iter().map(|&b| (b == 1) ^ rng.random_bool(p)))
}

pub fn tabu_update(tabu: &TabuMatrix, z: &BinarySolution) -> TabuMatrix {
    let mut next = tabu.clone();
    next.update(z);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::brute_force_qubo;
    use rand::{Rng, SeedableRng};
    use rand_mt::Mt64;

    #[test]
    fn all_ones_term_is_all_ones_matrix() {
        let s = tabu_update(
            &TabuMatrix::zeros(4, false),
            &BinarySolution::new(vec![1; 4]).unwrap(),
        );
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn all_zeros_term_is_minus_identity() {
        let s = tabu_update(&TabuMatrix::zeros(3, false), &BinarySolution::zeros(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.get(i, j), if i == j { -1.0 } else { 0.0 });
            }
        }
        assert_eq!(s.updates(), 1);
    }

    #[test]
    fn updates_stay_symmetric() {
        let mut rng = Mt64::seed_from_u64(4);
        for spin in [false, true] {
            let mut s = TabuMatrix::zeros(7, spin);
            for _ in 0..5 {
                let z =
                    BinarySolution::new((0..7).map(|_| rng.random_range(0..2)).collect()).unwrap();
                s.update(&z);
            }
            for i in 0..7 {
                for j in 0..7 {
                    assert_eq!(s.get(i, j), s.get(j, i));
                }
            }
        }
    }

    #[test]
    fn penalty_is_maximal_at_the_penalized_vector() {
        let mut rng = Mt64::seed_from_u64(12);
        for n in 1..=10 {
            let z = BinarySolution::new((0..n).map(|_| rng.random_range(0..2)).collect()).unwrap();
            let term = TabuMatrix::update_term(&z, false);
            let at_z = term.evaluate(&z).unwrap();
            for mask in 0u64..(1 << n) {
                let x =
                    BinarySolution::new((0..n).map(|i| ((mask >> i) & 1) as u8).collect()).unwrap();
                assert!(term.evaluate(&x).unwrap() <= at_z);
            }
        }
    }

    #[test]
    fn penalized_vector_never_becomes_unique_minimizer() {
        let mut rng = Mt64::seed_from_u64(13);
        for _ in 0..40 {
            let n = rng.random_range(2..=8);
            let mut q = QuboProblem::new(n).unwrap();
            for i in 0..n {
                for j in i..n {
                    q.add(i, j, rng.random_range(-4.0..4.0)).unwrap();
                }
            }
            let z = BinarySolution::new((0..n).map(|_| rng.random_range(0..2)).collect()).unwrap();
            let (opt, opt_val) = brute_force_qubo(&q).unwrap();
            if q.evaluate(&z).unwrap() <= opt_val {
                continue;
            }
            let mut s = TabuMatrix::zeros(n, false);
            s.update(&z);
            let lambda = rng.random_range(0.1..5.0);
            let pen = Penalized {
                q: &q,
                tabu: &s,
                lambda,
            };
            let mut shifted = QuboProblem::new(n).unwrap();
            for i in 0..n {
                for j in i..n {
                    shifted.add(i, j, pen.coeff(i, j)).unwrap();
                }
            }
            let fz = shifted.evaluate(&z).unwrap();
            let fo = shifted.evaluate(&opt).unwrap();
            assert!(fo < fz);
        }
    }

    #[test]
    fn candidate_perturbation_extremes() {
        let mut rng = Mt64::seed_from_u64(1);
        let z = BinarySolution::new(vec![1, 0, 1, 1, 0]).unwrap();
        assert_eq!(perturb_candidate(&z, 0.0, &mut rng), z);
        assert_eq!(
            perturb_candidate(&z, 1.0, &mut rng).bits(),
            &[0, 1, 0, 0, 1]
        );
    }

    #[test]
    fn half_probability_hamming_band() {
        let mut rng = Mt64::seed_from_u64(77);
        let z = BinarySolution::zeros(1000);
        for _ in 0..200 {
            let d = perturb_candidate(&z, 0.5, &mut rng).hamming(&z);
            assert!((400..=600).contains(&d), "{d}");
        }
    }
}
