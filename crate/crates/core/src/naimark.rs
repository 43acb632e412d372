//! Naimark extension of the ansatz POM and a shot-level simulator of the
//! optical network that realises it.
//!
//! The signal occupies modes `|H⟩₁, |V⟩₁`; the ancilla `|V⟩₂` enters in
//! vacuum, so inputs embed as `(c₊, c₋, 0)`. Detector `j` (PD1, PD2, PD3)
//! corresponds to row `j` of the unitary.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{MirrorEnsemble, QubitStateVector};
use crate::error::{Error, Result};
use crate::rng::draw_f64;
use crate::strategy::StrategyResult;

/// Shots handled per parallel work item. Counts do not depend on it.
const SHARD_SHOTS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaimarkUnitary {
    pub u: [[f64; 3]; 3],
    pub a: f64,
}

impl NaimarkUnitary {
    /// `max |(U Uᵀ − I)_{ij}|` and the same for `Uᵀ U`.
    pub fn orthogonality_residuals(&self) -> (f64, f64) {
        let u = &self.u;
        let mut row = 0.0_f64;
        let mut col = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                let rr: f64 = (0..3).map(|k| u[i][k] * u[j][k]).sum();
                let cc: f64 = (0..3).map(|k| u[k][i] * u[k][j]).sum();
                row = row.max((rr - id).abs());
                col = col.max((cc - id).abs());
            }
        }
        (row, col)
    }

    /// `U·(c₊, c₋, 0)`.
    pub fn apply(&self, state: &QubitStateVector) -> [f64; 3] {
        let (x, y) = (state.c_plus(), state.c_minus());
        self.u.map(|row| row[0] * x + row[1] * y)
    }
}

/// Orthogonal 3×3 extension whose rows restrict to `|φ₁⟩, |φ₂⟩, |φ₃⟩`.
pub fn extend_unitary(a: f64) -> Result<NaimarkUnitary> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::AnsatzOutOfRange(a));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let b = (1.0 - a * a).sqrt();
    Ok(NaimarkUnitary {
        u: [[r * a, r, r * b], [r * a, -r, r * b], [b, 0.0, -a]],
        a,
    })
}

/// Unitary for a computed strategy. The two-element regime uses `a = 1`;
/// at the degenerate corner every state is `|+⟩` and `a = 0` sends it to PD3.
pub fn strategy_unitary(result: &StrategyResult) -> Result<NaimarkUnitary> {
    let a = match result.a {
        Some(a) => a,
        None if result.degenerate => 0.0,
        None => 1.0,
    };
    extend_unitary(a)
}

/// Detection probabilities at PD1..PD3 for one input photon.
pub fn born_probabilities(u: &NaimarkUnitary, state: &QubitStateVector) -> [f64; 3] {
    u.apply(state).map(|amp| amp * amp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotReport {
    pub counts: [u64; 3],
    pub n_shots: u64,
    pub expected: [f64; 3],
    pub seed: u64,
    /// Largest `|count/N − q| / √(q(1−q)/N)` over the three detectors.
    /// Infinite when `q ∈ {0, 1}` and the count disagrees.
    pub max_sigma_deviation: f64,
}

impl ShotReport {
    fn new(counts: [u64; 3], expected: [f64; 3], seed: u64) -> Self {
        let n_shots = counts.iter().sum();
        let max_sigma_deviation = counts
            .iter()
            .zip(&expected)
            .map(|(&c, &q)| sigma_deviation(c, n_shots, q))
            .fold(0.0, f64::max);
        Self {
            counts,
            n_shots,
            expected,
            seed,
            max_sigma_deviation,
        }
    }

    pub fn frequencies(&self) -> [f64; 3] {
        let n = self.n_shots.max(1) as f64;
        self.counts.map(|c| c as f64 / n)
    }
}

/// Deviation of `hits` out of `n` from rate `q` in units of the binomial σ.
pub fn sigma_deviation(hits: u64, n: u64, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let freq = hits as f64 / n as f64;
    let sigma = (q * (1.0 - q) / n as f64).max(0.0).sqrt();
    let diff = (freq - q).abs();
    if sigma > 0.0 {
        diff / sigma
    } else if diff <= 1e-15 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    /// Detector statistics conditioned on the drawn state.
    pub per_state: [ShotReport; 3],
    /// Detector marginals over all shots.
    pub overall: ShotReport,
    /// Shots where the detector index equals the prepared state index.
    pub correct: u64,
    pub empirical_success: f64,
    pub expected_success: f64,
    pub success_sigma_deviation: f64,
}

/// First index whose cumulative weight exceeds `u`. Rounding in the last
/// cumulative sum falls back to the last index with nonzero weight.
fn inverse_cdf(weights: &[f64; 3], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(2)
}

/// `counts[state][detector]` for shots `start..end`. Shot `k` uses counter
/// `2k` for the state draw and `2k + 1` for the detector draw.
fn run_shots(
    born: &[[f64; 3]; 3],
    priors: &[f64; 3],
    seed: u64,
    start: u64,
    end: u64,
) -> [[u64; 3]; 3] {
    let mut counts = [[0u64; 3]; 3];
    for k in start..end {
        let i = inverse_cdf(priors, draw_f64(seed, 2 * k));
        let j = inverse_cdf(&born[i], draw_f64(seed, 2 * k + 1));
        counts[i][j] += 1;
    }
    counts
}

fn merge(mut a: [[u64; 3]; 3], b: [[u64; 3]; 3]) -> [[u64; 3]; 3] {
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] += b[i][j];
        }
    }
    a
}

/// Runs `n_shots` photons through the network. Shards the counter space
/// into fixed blocks processed in parallel; counts are shard-independent.
pub fn simulate_network(
    u: &NaimarkUnitary,
    e: &MirrorEnsemble,
    n_shots: u64,
    seed: u64,
) -> Result<NetworkReport> {
    simulate_network_sharded(u, e, n_shots, seed, SHARD_SHOTS)
}

pub fn simulate_network_sharded(
    u: &NaimarkUnitary,
    e: &MirrorEnsemble,
    n_shots: u64,
    seed: u64,
    shard_shots: u64,
) -> Result<NetworkReport> {
    if n_shots == 0 {
        return Err(Error::NoShots);
    }
    let shard_shots = shard_shots.max(1);
    let born: [[f64; 3]; 3] = std::array::from_fn(|i| born_probabilities(u, &e.states()[i]));
    let priors = *e.priors();
    let n_shards = n_shots.div_ceil(shard_shots);
    let table = (0..n_shards)
        .into_par_iter()
        .map(|s| {
            let start = s * shard_shots;
            let end = (start + shard_shots).min(n_shots);
            run_shots(&born, &priors, seed, start, end)
        })
        .reduce(|| [[0u64; 3]; 3], merge);

    let per_state: [ShotReport; 3] =
        std::array::from_fn(|i| ShotReport::new(table[i], born[i], seed));
    let overall_counts: [u64; 3] = std::array::from_fn(|j| (0..3).map(|i| table[i][j]).sum());
    let overall_expected: [f64; 3] =
        std::array::from_fn(|j| (0..3).map(|i| priors[i] * born[i][j]).sum());
    let overall = ShotReport::new(overall_counts, overall_expected, seed);

    let correct: u64 = (0..3).map(|i| table[i][i]).sum();
    let expected_success: f64 = (0..3).map(|i| priors[i] * born[i][i]).sum();
    Ok(NetworkReport {
        per_state,
        overall,
        correct,
        empirical_success: correct as f64 / n_shots as f64,
        expected_success,
        success_sigma_deviation: sigma_deviation(correct, n_shots, expected_success),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::make_ensemble;
    use crate::operators::outcome_prob;
    use crate::strategy::{ansatz_parameter, ansatz_povm, optimal_povm, optimal_success};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4};

    fn assert_rows(u: &NaimarkUnitary, rows: [[f64; 3]; 3]) {
        for (got, want) in u.u.iter().zip(rows) {
            for (g, w) in got.iter().zip(want) {
                assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn extend_examples() {
        let r = FRAC_1_SQRT_2;
        assert_rows(
            &extend_unitary(1.0).unwrap(),
            [[r, r, 0.0], [r, -r, 0.0], [0.0, 0.0, -1.0]],
        );
        assert_rows(
            &extend_unitary(0.0).unwrap(),
            [[0.0, r, r], [0.0, -r, r], [1.0, 0.0, 0.0]],
        );
        let a = ansatz_parameter(&make_ensemble(FRAC_PI_3, 0.2).unwrap()).unwrap();
        let (row, col) = extend_unitary(a).unwrap().orthogonality_residuals();
        assert!(row <= 1e-12 && col <= 1e-12);
        assert!(matches!(
            extend_unitary(1.0001),
            Err(Error::AnsatzOutOfRange(_))
        ));
        assert!(matches!(
            extend_unitary(-0.1),
            Err(Error::AnsatzOutOfRange(_))
        ));
    }

    #[test]
    fn rows_restrict_to_povm_vectors() {
        for a in [0.0, 0.157, 0.5, 1.0] {
            let u = extend_unitary(a).unwrap();
            let povm = ansatz_povm(a).unwrap();
            for (row, el) in u.u.iter().zip(povm.elements()) {
                assert_abs_diff_eq!(row[0] * row[0], el.a11, epsilon = 1e-15);
                assert_abs_diff_eq!(row[0] * row[1], el.a12, epsilon = 1e-15);
                assert_abs_diff_eq!(row[1] * row[1], el.a22, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn born_examples() {
        let u = extend_unitary(1.0).unwrap();
        let p = born_probabilities(&u, &QubitStateVector::PLUS);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-15);
        let d = QubitStateVector::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        let p = born_probabilities(&u, &d);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);

        let e = make_ensemble(FRAC_PI_3, 0.2).unwrap();
        let a = ansatz_parameter(&e).unwrap();
        let u = extend_unitary(a).unwrap();
        let p = born_probabilities(&u, &e.states()[2]);
        let povm = ansatz_povm(a).unwrap();
        let want = [a * a / 2.0, a * a / 2.0, 1.0 - a * a];
        for j in 0..3 {
            assert_abs_diff_eq!(p[j], want[j], epsilon = 1e-15);
            assert_abs_diff_eq!(
                p[j],
                outcome_prob(&povm.elements()[j], &e.states()[2]),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn single_shot() {
        let e = make_ensemble(FRAC_PI_3, 0.2).unwrap();
        let u = extend_unitary(0.3).unwrap();
        let r = simulate_network(&u, &e, 1, 9).unwrap();
        assert_eq!(r.overall.counts.iter().sum::<u64>(), 1);
        assert_eq!(r.overall.n_shots, 1);
        assert_eq!(simulate_network(&u, &e, 0, 9), Err(Error::NoShots));
    }

    #[test]
    fn orthogonal_states_always_identified() {
        let e = make_ensemble(FRAC_PI_4, 0.5).unwrap();
        let s = optimal_povm(&e).unwrap();
        let u = strategy_unitary(&s).unwrap();
        let r = simulate_network(&u, &e, 1000, 5).unwrap();
        assert_eq!(r.correct, 1000);
        assert_eq!(r.per_state[2].n_shots, 0);
        assert_eq!(r.success_sigma_deviation, 0.0);
    }

    #[test]
    fn shard_size_does_not_change_counts() {
        let e = make_ensemble(1.1, 0.27).unwrap();
        let u = strategy_unitary(&optimal_povm(&e).unwrap()).unwrap();
        let base = simulate_network_sharded(&u, &e, 50_000, 77, 50_000).unwrap();
        for shard in [1, 7, 1000, 1 << 16] {
            assert_eq!(
                simulate_network_sharded(&u, &e, 50_000, 77, shard).unwrap(),
                base
            );
        }
    }

    #[test]
    fn statistics_within_four_sigma() {
        let e = make_ensemble(0.9, 0.3).unwrap();
        let u = strategy_unitary(&optimal_povm(&e).unwrap()).unwrap();
        let r = simulate_network(&u, &e, 200_000, 1234).unwrap();
        for rep in r.per_state.iter().chain([&r.overall]) {
            assert!(rep.max_sigma_deviation <= 4.0, "{rep:?}");
            assert_abs_diff_eq!(rep.expected.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.expected_success, optimal_success(&e), epsilon = 1e-12);
        assert!(r.success_sigma_deviation <= 4.0);
    }

    #[test]
    fn sigma_deviation_edge_cases() {
        assert_eq!(sigma_deviation(10, 10, 1.0), 0.0);
        assert_eq!(sigma_deviation(9, 10, 1.0), f64::INFINITY);
        assert_eq!(sigma_deviation(0, 0, 0.3), 0.0);
        assert_abs_diff_eq!(sigma_deviation(60, 100, 0.5), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_cdf_skips_zero_weights() {
        assert_eq!(inverse_cdf(&[0.5, 0.5, 0.0], 0.999_999_999), 1);
        assert_eq!(inverse_cdf(&[0.0, 0.5, 0.5], 0.0), 1);
        // cumulative sum rounding below 1
        assert_eq!(inverse_cdf(&[0.3, 0.3, 0.0], 0.99), 1);
    }
}
