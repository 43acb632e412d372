//! Closed-form minimum-error measurement and the square-root measurement.
//!
//! Above the crossover `p* = 1/(2 + cosθ(cosθ + sinθ))` the optimum is the
//! two-outcome measurement that discriminates `ψ₁` from `ψ₂`; below it the
//! mirror-symmetric three-element ansatz
//!
//! ```text
//! π̂₁,₂ = |φ₁,₂⟩⟨φ₁,₂|,  |φ₁,₂⟩ = (a|+⟩ ± |−⟩)/√2,  π̂₃ = (1 − a²)|+⟩⟨+|
//! ```
//!
//! with `a = p cosθ sinθ / (1 − p(2 + cos²θ))` is optimal. At `p = p*` the
//! two coincide (`a = 1`).

use serde::Serialize;

use crate::ensemble::MirrorEnsemble;
use crate::error::{Error, Result};
use crate::operators::{projector, success_probability, Operator2, Povm};

/// Default half-width of the band around the crossover classified as [`RegimeTag::Boundary`].
pub const DEFAULT_TIE_TOL: f64 = 1e-12;

/// Half-width, in `sinθ` and `1 − 3p`, of the degenerate corner `θ = 0, p = 1/3`.
/// Wide enough to catch a ten-digit `1/3` typed on the command line.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Eigenvalues of ρ below this are treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeTag {
    TwoElement,
    ThreeElement,
    Boundary,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::TwoElement => "TwoElement",
            RegimeTag::ThreeElement => "ThreeElement",
            RegimeTag::Boundary => "Boundary",
        }
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub boundary_p: f64,
}

/// Crossover prior `1/(2 + cosθ(cosθ + sinθ))`.
pub fn boundary_p(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    1.0 / (2.0 + c * (c + s))
}

pub fn classify_regime(e: &MirrorEnsemble, tie_tol: f64) -> Regime {
    let boundary_p = boundary_p(e.theta());
    let p = e.p();
    let tag = if p > boundary_p + tie_tol {
        RegimeTag::TwoElement
    } else if p < boundary_p - tie_tol {
        RegimeTag::ThreeElement
    } else {
        RegimeTag::Boundary
    };
    Regime { tag, boundary_p }
}

/// `(p cosθ sinθ, 1 − p(2 + cos²θ))`, the raw numerator and denominator of `a`.
pub fn ansatz_fraction(theta: f64, p: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (p * c * s, 1.0 - p * (2.0 + c * c))
}

/// `θ = 0, p = 1/3`: the ansatz fraction is 0/0 and all states coincide.
/// The fraction is also 0/0 at `θ = π/2, p = 1/2`, but that point lies on
/// the crossover and is handled as a boundary point.
fn is_degenerate(e: &MirrorEnsemble) -> bool {
    e.theta().sin() <= DEGENERATE_TOL && (1.0 - 3.0 * e.p()).abs() <= DEGENERATE_TOL
}

/// The ansatz parameter `a` that makes the three-element POM satisfy the
/// Helstrom equality conditions.
///
/// Only defined at or below the crossover. On the boundary band it is 1.
pub fn ansatz_parameter(e: &MirrorEnsemble) -> Result<f64> {
    if is_degenerate(e) {
        return Err(Error::DegenerateCorner);
    }
    let regime = classify_regime(e, DEFAULT_TIE_TOL);
    let (num, den) = ansatz_fraction(e.theta(), e.p());
    match regime.tag {
        RegimeTag::TwoElement => Err(Error::OutOfRegime {
            p: e.p(),
            boundary: regime.boundary_p,
        }),
        RegimeTag::Boundary => Ok(1.0),
        RegimeTag::ThreeElement => Ok(num / den),
    }
}

/// The mirror-symmetric ansatz POM for `a ∈ [0, 1]`; `a = 1` is the
/// two-outcome ψ₁/ψ₂ discriminator with `π̂₃ = 0`.
pub fn ansatz_povm(a: f64) -> Result<Povm> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::AnsatzOutOfRange(a));
    }
    let h = 0.5;
    Povm::new(vec![
        Operator2::new(h * a * a, h * a, h),
        Operator2::new(h * a * a, -h * a, h),
        Operator2::diag(1.0 - a * a, 0.0),
    ])
}

/// Projectors onto `(|+⟩ ± |−⟩)/√2` with an explicit zero third element.
pub fn two_element_povm() -> Povm {
    ansatz_povm(1.0).expect("a = 1 is in range")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyResult {
    pub regime: Regime,
    /// Ansatz parameter; `None` in the two-element regime and at the
    /// degenerate corner.
    pub a: Option<f64>,
    pub povm: Povm,
    pub success: f64,
    /// Set only at `θ = 0, p = 1/3`, where every state coincides and every
    /// POM labelling the (tied) majority state is optimal.
    pub degenerate: bool,
}

pub fn optimal_povm(e: &MirrorEnsemble) -> Result<StrategyResult> {
    let regime = classify_regime(e, DEFAULT_TIE_TOL);
    let success = optimal_success(e);
    if is_degenerate(e) {
        let povm = Povm::new(vec![Operator2::ZERO, Operator2::ZERO, Operator2::IDENTITY])?;
        return Ok(StrategyResult {
            regime,
            a: None,
            povm,
            success,
            degenerate: true,
        });
    }
    let (a, povm) = match regime.tag {
        RegimeTag::TwoElement => (None, two_element_povm()),
        RegimeTag::Boundary => (Some(1.0), ansatz_povm(1.0)?),
        RegimeTag::ThreeElement => {
            let a = ansatz_parameter(e)?;
            (Some(a), ansatz_povm(a)?)
        }
    };
    Ok(StrategyResult {
        regime,
        a,
        povm,
        success,
        degenerate: false,
    })
}

/// `p(1 + sin2θ)`: success of the two-outcome strategy.
pub fn two_element_success(theta: f64, p: f64) -> f64 {
    p * (1.0 + (2.0 * theta).sin())
}

/// `(1−2p)[p sin²θ + 1 − 2p − p cos²θ] / (1 − 2p − p cos²θ)`: success of the
/// three-element strategy with the optimal `a`.
pub fn three_element_success(theta: f64, p: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let q = 1.0 - 2.0 * p;
    let den = q - p * c * c;
    q * (p * s * s + den) / den
}

/// Closed-form optimal success probability.
pub fn optimal_success(e: &MirrorEnsemble) -> f64 {
    let (theta, p) = (e.theta(), e.p());
    if is_degenerate(e) {
        return p.max(1.0 - 2.0 * p);
    }
    match classify_regime(e, DEFAULT_TIE_TOL).tag {
        RegimeTag::TwoElement | RegimeTag::Boundary => two_element_success(theta, p),
        RegimeTag::ThreeElement => three_element_success(theta, p),
    }
}

/// Square-root ("pretty good") measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareRootMeasurement {
    pub povm: Povm,
    /// ρ was singular; its null-space projector was added to `π̂₃`.
    pub singular: bool,
}

/// `π_i = ρ^{−1/2} p_i|ψ_i⟩⟨ψ_i| ρ^{−1/2}` with `ρ = Σ p_i|ψ_i⟩⟨ψ_i|`.
///
/// For a singular ρ the inverse square root is taken on its support and the
/// completeness defect is assigned to the third outcome.
pub fn srm_measurement(e: &MirrorEnsemble) -> Result<SquareRootMeasurement> {
    let signals: Vec<Operator2> = e
        .states()
        .iter()
        .zip(e.priors())
        .map(|(s, &w)| projector(s, w))
        .collect::<Result<_>>()?;
    let rho: Operator2 = signals.iter().copied().sum();
    let eig = rho.eigen();
    let mut inv_sqrt = Operator2::ZERO;
    let mut singular = false;
    for (val, vec) in eig.values.iter().zip(eig.vectors) {
        if *val > SUPPORT_TOL {
            let w = 1.0 / val.sqrt();
            inv_sqrt = inv_sqrt
                + Operator2::new(
                    w * vec[0] * vec[0],
                    w * vec[0] * vec[1],
                    w * vec[1] * vec[1],
                );
        } else {
            singular = true;
        }
    }
    let s = inv_sqrt.to_mat();
    let mut elements: Vec<Operator2> = signals
        .iter()
        .map(|sig| (s * sig.to_mat() * s).symmetrize())
        .collect();
    if singular {
        let total: Operator2 = elements.iter().copied().sum();
        elements[2] = elements[2] + (Operator2::IDENTITY - total);
    }
    Ok(SquareRootMeasurement {
        povm: Povm::new(elements)?,
        singular,
    })
}

pub fn srm_povm(e: &MirrorEnsemble) -> Result<Povm> {
    srm_measurement(e).map(|m| m.povm)
}

pub fn srm_success(e: &MirrorEnsemble) -> Result<f64> {
    success_probability(e, &srm_povm(e)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::make_ensemble;
    use crate::operators::{
        check_helstrom, inequality_operators, min_eigenvalue, DEFAULT_CERT_TOL,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn ens(theta: f64, p: f64) -> MirrorEnsemble {
        make_ensemble(theta, p).unwrap()
    }

    // (π/3, 0.2): cos = 1/2, sin² = 3/4, so
    //   a = 0.2·(1/2)·(√3/2) / (1 − 0.2·2.25) = √3/20 / 0.55
    //   success = 0.6·(0.15 + 0.6 − 0.05) / 0.55 = 0.42/0.55
    const A_PI3_02: f64 = 0.157_459_164_324_443_4;
    const SUCCESS_PI3_02: f64 = 0.42 / 0.55;

    #[test]
    fn frozen_values_match_exact_arithmetic() {
        assert_abs_diff_eq!(A_PI3_02, 3f64.sqrt() / 20.0 / 0.55, epsilon = 1e-15);
    }

    #[test]
    fn classify_examples() {
        let r = classify_regime(&ens(FRAC_PI_4, 0.5), DEFAULT_TIE_TOL);
        assert_abs_diff_eq!(r.boundary_p, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.tag, RegimeTag::TwoElement);

        let r = classify_regime(&ens(FRAC_PI_3, 0.2), DEFAULT_TIE_TOL);
        assert_eq!(r.tag, RegimeTag::ThreeElement);
        assert_abs_diff_eq!(
            r.boundary_p,
            1.0 / (2.0 + 0.5 * (0.5 + 0.75f64.sqrt())),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(r.boundary_p, 0.37272, epsilon = 1e-5);

        assert_eq!(
            classify_regime(&ens(FRAC_PI_4, 1.0 / 3.0), DEFAULT_TIE_TOL).tag,
            RegimeTag::Boundary
        );
    }

    #[test]
    fn ansatz_examples() {
        assert_abs_diff_eq!(
            ansatz_parameter(&ens(FRAC_PI_3, 0.2)).unwrap(),
            A_PI3_02,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ansatz_parameter(&ens(FRAC_PI_4, 1.0 / 3.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(ansatz_parameter(&ens(0.0, 0.2)).unwrap(), 0.0);
        // trine: a = 1/√3 gives elements of weight 2/3
        assert_abs_diff_eq!(
            ansatz_parameter(&ens(FRAC_PI_3, 1.0 / 3.0)).unwrap(),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn ansatz_errors() {
        assert_eq!(
            ansatz_parameter(&ens(0.0, 1.0 / 3.0)),
            Err(Error::DegenerateCorner)
        );
        assert!(matches!(
            ansatz_parameter(&ens(FRAC_PI_3, 0.45)),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(matches!(ansatz_povm(1.2), Err(Error::AnsatzOutOfRange(_))));
    }

    #[test]
    fn optimal_povm_examples() {
        let r = optimal_povm(&ens(FRAC_PI_4, 0.5)).unwrap();
        assert_eq!(r.regime.tag, RegimeTag::TwoElement);
        let els = r.povm.elements();
        let d = crate::ensemble::QubitStateVector::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert_abs_diff_eq!(
            (els[0] - projector(&d, 1.0).unwrap()).max_abs(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (els[1] - projector(&mirror(d), 1.0).unwrap()).max_abs(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(els[2], Operator2::ZERO);

        let r = optimal_povm(&ens(FRAC_PI_3, 1.0 / 3.0)).unwrap();
        assert_eq!(r.regime.tag, RegimeTag::ThreeElement);
        assert_abs_diff_eq!(r.success, 2.0 / 3.0, epsilon = 1e-12);

        let e = ens(FRAC_PI_3, 0.2);
        let r = optimal_povm(&e).unwrap();
        assert_abs_diff_eq!(r.a.unwrap(), A_PI3_02, epsilon = 1e-15);
        assert!(
            check_helstrom(&e, &r.povm, DEFAULT_CERT_TOL)
                .unwrap()
                .passed
        );
    }

    fn mirror(v: crate::ensemble::QubitStateVector) -> crate::ensemble::QubitStateVector {
        crate::ensemble::mirror_reflect(v)
    }

    #[test]
    fn success_examples() {
        assert_abs_diff_eq!(optimal_success(&ens(FRAC_PI_4, 0.5)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            optimal_success(&ens(FRAC_PI_3, 1.0 / 3.0)),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            optimal_success(&ens(FRAC_PI_3, 0.2)),
            SUCCESS_PI3_02,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(optimal_success(&ens(0.0, 0.2)), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_corner() {
        let e = ens(0.0, 1.0 / 3.0);
        let r = optimal_povm(&e).unwrap();
        assert!(r.degenerate);
        assert_abs_diff_eq!(r.success, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.povm.elements()[2], Operator2::IDENTITY);
        assert!(
            check_helstrom(&e, &r.povm, DEFAULT_CERT_TOL)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn theta_half_pi_outcomes_equivalent() {
        let e = ens(FRAC_PI_2, 0.2);
        let r = optimal_povm(&e).unwrap();
        assert!(
            check_helstrom(&e, &r.povm, DEFAULT_CERT_TOL)
                .unwrap()
                .passed
        );
        // ψ₁ = −ψ₂, so guessing ψ₃ on |+⟩ and ψ₁ or ψ₂ on |−⟩ gives 1 − p
        assert_abs_diff_eq!(r.success, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn three_element_inequality_structure() {
        // k = 1, 2 operators are singular, k = 3 has smaller eigenvalue 0
        for (theta, p) in [
            (FRAC_PI_3, 0.2),
            (0.3, 0.1),
            (1.2, 0.05),
            (FRAC_PI_3, 1.0 / 3.0),
        ] {
            let e = ens(theta, p);
            let r = optimal_povm(&e).unwrap();
            assert_eq!(r.regime.tag, RegimeTag::ThreeElement);
            let ops = inequality_operators(&e, &r.povm).unwrap();
            assert!(ops[0].det().abs() <= 1e-10);
            assert!(ops[1].det().abs() <= 1e-10);
            assert!(ops[0].a11 > 0.0 && ops[0].a22 > 0.0);
            assert!(min_eigenvalue(&ops[2]).abs() <= 1e-10);
        }
    }

    #[test]
    fn srm_examples() {
        let trine = ens(FRAC_PI_3, 1.0 / 3.0);
        assert_abs_diff_eq!(
            srm_success(&trine).unwrap(),
            optimal_success(&trine),
            epsilon = 1e-12
        );

        let ortho = ens(FRAC_PI_4, 0.5);
        let m = srm_measurement(&ortho).unwrap();
        assert!(!m.singular);
        assert_abs_diff_eq!(srm_success(&ortho).unwrap(), 1.0, epsilon = 1e-12);
        for (el, s) in m.povm.elements().iter().zip(ortho.states()) {
            if s.norm_sqr() > 0.0 && el.trace() > 0.5 {
                assert_abs_diff_eq!(
                    (*el - projector(s, 1.0).unwrap()).max_abs(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }

        let e = ens(FRAC_PI_3, 0.45);
        assert!(srm_success(&e).unwrap() < optimal_success(&e) - 1e-6);
    }

    #[test]
    fn srm_singular_cases_complete() {
        for (theta, p) in [(0.0, 0.2), (0.7, 0.0), (FRAC_PI_2, 0.5), (0.0, 0.5)] {
            let e = ens(theta, p);
            let m = srm_measurement(&e).unwrap();
            assert!(m.singular, "({theta}, {p})");
            assert!(m.povm.completeness_defect() <= 1e-12);
        }
        // with ρ singular at θ = 0 all states are |+⟩, and SRM recovers the prior weights
        let e = ens(0.0, 0.2);
        assert_abs_diff_eq!(
            srm_success(&e).unwrap(),
            0.2 * 0.2 * 2.0 + 0.6 * 0.6,
            epsilon = 1e-12
        );
    }
}
