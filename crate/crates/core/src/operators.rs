//! Real symmetric 2×2 operators, POMs and the Helstrom certificate.

use serde::Serialize;

use crate::ensemble::{MirrorEnsemble, QubitStateVector};
use crate::error::{Error, Result};

/// Completeness and positivity tolerance for [`Povm::new`].
pub const POVM_TOL: f64 = 1e-12;

/// Default tolerance of [`check_helstrom`].
pub const DEFAULT_CERT_TOL: f64 = 1e-10;

/// Real symmetric operator `[[a11, a12], [a12, a22]]` in the `{|+⟩, |−⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Operator2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Operator2 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub const fn diag(a11: f64, a22: f64) -> Self {
        Self::new(a11, 0.0, a22)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a11, s * self.a12, s * self.a22)
    }

    /// Conjugation by `R = diag(1, −1)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.a11, -self.a12, self.a22)
    }

    /// `⟨v|O|v⟩`.
    pub fn expectation(&self, v: &QubitStateVector) -> f64 {
        let (x, y) = (v.c_plus(), v.c_minus());
        self.a11 * x * x + 2.0 * self.a12 * x * y + self.a22 * y * y
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }

    /// Closed-form eigen decomposition. Eigenvalues ascend; the columns of
    /// `vectors` are the matching unit eigenvectors.
    pub fn eigen(&self) -> SymmetricEigen {
        if self.a12 == 0.0 {
            let (lo, hi) = if self.a11 <= self.a22 {
                ([1.0, 0.0], [0.0, 1.0])
            } else {
                ([0.0, 1.0], [1.0, 0.0])
            };
            return SymmetricEigen {
                values: [self.a11.min(self.a22), self.a11.max(self.a22)],
                vectors: [lo, hi],
            };
        }
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.a11 - self.a22);
        let radius = half_diff.hypot(self.a12);
        let values = [mean - radius, mean + radius];
        // rotation angle that diagonalises the matrix
        let phi = 0.5 * (2.0 * self.a12).atan2(self.a11 - self.a22);
        let (s, c) = phi.sin_cos();
        // (c, s) belongs to the larger eigenvalue
        SymmetricEigen {
            values,
            vectors: [[-s, c], [c, s]],
        }
    }

    pub fn to_mat(self) -> Mat2 {
        Mat2([[self.a11, self.a12], [self.a12, self.a22]])
    }
}

impl std::ops::Add for Operator2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }
}

impl std::ops::Sub for Operator2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a22 - o.a22)
    }
}

impl std::iter::Sum for Operator2 {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, o| acc + o)
    }
}

/// Output of [`Operator2::eigen`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEigen {
    /// `values[0] <= values[1]`.
    pub values: [f64; 2],
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: [[f64; 2]; 2],
}

/// General real 2×2 matrix, row-major. Needed because products of
/// symmetric operators are not symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrize(&self) -> Operator2 {
        let m = &self.0;
        Operator2::new(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl std::ops::Add for Mat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

/// `weight·|v⟩⟨v|`.
pub fn projector(v: &QubitStateVector, weight: f64) -> Result<Operator2> {
    if weight.is_nan() || weight < 0.0 {
        return Err(Error::NegativeWeight(weight));
    }
    let (x, y) = (v.c_plus(), v.c_minus());
    Ok(Operator2::new(
        weight * x * x,
        weight * x * y,
        weight * y * y,
    ))
}

/// Smaller eigenvalue of a symmetric 2×2 operator, in closed form.
pub fn min_eigenvalue(o: &Operator2) -> f64 {
    let mean = 0.5 * o.trace();
    let half_diff = 0.5 * (o.a11 - o.a22);
    mean - half_diff.hypot(o.a12)
}

/// Born probability `⟨ψ|π̂|ψ⟩`, clamped to `[0, 1]`.
pub fn outcome_prob(element: &Operator2, state: &QubitStateVector) -> f64 {
    element.expectation(state).clamp(0.0, 1.0)
}

/// An ordered measurement. Constructed POMs always carry three elements,
/// one per signal state; a two-outcome strategy has an explicit zero third.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Povm {
    elements: Vec<Operator2>,
}

impl Povm {
    /// Validates completeness and positivity at [`POVM_TOL`].
    pub fn new(elements: Vec<Operator2>) -> Result<Self> {
        let povm = Self { elements };
        povm.validate(POVM_TOL)?;
        Ok(povm)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = self.completeness_defect();
        if defect.is_nan() || defect > tol {
            return Err(Error::Incomplete(defect));
        }
        for (index, el) in self.elements.iter().enumerate() {
            let min_eigenvalue = min_eigenvalue(el);
            if min_eigenvalue.is_nan() || min_eigenvalue < -tol {
                return Err(Error::NotPositive {
                    index,
                    min_eigenvalue,
                });
            }
        }
        Ok(())
    }

    /// `‖Σπ̂_j − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let sum: Operator2 = self.elements.iter().copied().sum();
        (sum - Operator2::IDENTITY).max_abs()
    }

    pub fn elements(&self) -> &[Operator2] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements indexed by signal state; a two-element POM gets `π̂₃ = 0`.
    pub fn per_state(&self) -> Result<[Operator2; 3]> {
        match self.elements.as_slice() {
            [a, b] => Ok([*a, *b, Operator2::ZERO]),
            [a, b, c] => Ok([*a, *b, *c]),
            other => Err(Error::ElementCount {
                expected: 3,
                got: other.len(),
            }),
        }
    }

    /// Conditional probability table `table[i][j] = p(j|i)`.
    pub fn conditional_table(&self, e: &MirrorEnsemble) -> Result<[[f64; 3]; 3]> {
        let els = self.per_state()?;
        let mut table = [[0.0; 3]; 3];
        for (row, state) in table.iter_mut().zip(e.states()) {
            for (cell, el) in row.iter_mut().zip(&els) {
                *cell = outcome_prob(el, state);
            }
        }
        Ok(table)
    }
}

/// `Σ_j p_j ⟨ψ_j|π̂_j|ψ_j⟩`.
pub fn success_probability(e: &MirrorEnsemble, m: &Povm) -> Result<f64> {
    let els = m.per_state()?;
    let total: f64 = e
        .states()
        .iter()
        .zip(e.priors())
        .zip(&els)
        .map(|((s, prior), el)| prior * outcome_prob(el, s))
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Weighted signal operators `p_i|ψ_i⟩⟨ψ_i|`.
pub fn weighted_signals(e: &MirrorEnsemble) -> [Operator2; 3] {
    let s = e.states();
    let pr = e.priors();
    // priors are non-negative by construction
    std::array::from_fn(|i| projector(&s[i], pr[i]).expect("non-negative prior"))
}

/// The Lagrange operator `Γ = sym(Σ_j p_j ρ_j π̂_j)`.
pub fn lagrange_operator(e: &MirrorEnsemble, m: &Povm) -> Result<Operator2> {
    let els = m.per_state()?;
    let sig = weighted_signals(e);
    let raw = sig
        .iter()
        .zip(&els)
        .map(|(s, el)| s.to_mat() * el.to_mat())
        .fold(Mat2([[0.0; 2]; 2]), |acc, x| acc + x);
    Ok(raw.symmetrize())
}

/// The three operators `Γ − p_k ρ_k` whose positivity is the inequality half
/// of the Helstrom conditions.
pub fn inequality_operators(e: &MirrorEnsemble, m: &Povm) -> Result<[Operator2; 3]> {
    let gamma = lagrange_operator(e, m)?;
    let sig = weighted_signals(e);
    Ok(sig.map(|s| gamma - s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub j: usize,
    pub k: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    /// `‖π̂_j(p_jρ_j − p_kρ_k)π̂_k‖_max` for every ordered pair `j ≠ k`.
    pub equality_residuals: Vec<PairResidual>,
    /// Smaller eigenvalue of `Γ − p_kρ_k` for `k = 1, 2, 3`.
    pub min_eigenvalues: [f64; 3],
    pub passed: bool,
    pub tolerance: f64,
}

impl CertificateReport {
    pub fn max_residual(&self) -> f64 {
        self.equality_residuals
            .iter()
            .fold(0.0_f64, |acc, r| acc.max(r.residual))
    }

    pub fn worst_eigenvalue(&self) -> f64 {
        self.min_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the Helstrom optimality conditions for `m` on `e`.
///
/// Pairs with `j = k` are skipped since the equality is vacuous there.
pub fn check_helstrom(e: &MirrorEnsemble, m: &Povm, tol: f64) -> Result<CertificateReport> {
    let els = m.per_state()?;
    let sig = weighted_signals(e);
    let mut equality_residuals = Vec::with_capacity(6);
    for j in 0..3 {
        for k in 0..3 {
            if j == k {
                continue;
            }
            let prod = els[j].to_mat() * (sig[j] - sig[k]).to_mat() * els[k].to_mat();
            equality_residuals.push(PairResidual {
                j,
                k,
                residual: prod.max_abs(),
            });
        }
    }
    let min_eigenvalues = inequality_operators(e, m)?.map(|o| min_eigenvalue(&o));
    let passed = equality_residuals.iter().all(|r| r.residual <= tol)
        && min_eigenvalues.iter().all(|&l| l >= -tol);
    Ok(CertificateReport {
        equality_residuals,
        min_eigenvalues,
        passed,
        tolerance: tol,
    })
}
