//! The mirror-symmetric three-state family and its priors.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Normalisation tolerance for [`QubitStateVector`].
pub const NORM_TOL: f64 = 1e-12;

/// A real qubit state `c₊|+⟩ + c₋|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitStateVector {
    c_plus: f64,
    c_minus: f64,
}

impl QubitStateVector {
    /// Builds a state from its amplitudes, rejecting vectors whose norm
    /// differs from one by more than [`NORM_TOL`].
    pub fn new(c_plus: f64, c_minus: f64) -> Result<Self> {
        let norm2 = c_plus * c_plus + c_minus * c_minus;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(c_plus, c_minus));
        }
        Ok(Self { c_plus, c_minus })
    }

    /// `cosφ|+⟩ + sinφ|−⟩`.
    pub fn from_angle(phi: f64) -> Self {
        Self {
            c_plus: phi.cos(),
            c_minus: phi.sin(),
        }
    }

    pub const PLUS: Self = Self {
        c_plus: 1.0,
        c_minus: 0.0,
    };

    pub const MINUS: Self = Self {
        c_plus: 0.0,
        c_minus: 1.0,
    };

    pub fn c_plus(&self) -> f64 {
        self.c_plus
    }

    pub fn c_minus(&self) -> f64 {
        self.c_minus
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.c_plus * other.c_plus + self.c_minus * other.c_minus
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn neg(&self) -> Self {
        Self {
            c_plus: -self.c_plus,
            c_minus: -self.c_minus,
        }
    }
}

/// Applies the reflection `|+⟩ → |+⟩, |−⟩ → −|−⟩`.
pub fn mirror_reflect(v: QubitStateVector) -> QubitStateVector {
    QubitStateVector {
        c_plus: v.c_plus,
        c_minus: -v.c_minus,
    }
}

/// The `(θ, p)` family: `ψ₁,₂ = (cosθ, ±sinθ)`, `ψ₃ = (1, 0)` with priors
/// `(p, p, 1−2p)`.
///
/// Values are immutable after [`make_ensemble`] has validated them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MirrorEnsemble {
    theta: f64,
    p: f64,
    states: [QubitStateVector; 3],
    priors: [f64; 3],
}

impl MirrorEnsemble {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn states(&self) -> &[QubitStateVector; 3] {
        &self.states
    }

    pub fn priors(&self) -> &[f64; 3] {
        &self.priors
    }

    /// Index of the state with the largest prior (ties go to the lowest index).
    pub fn most_likely(&self) -> usize {
        let mut best = 0;
        for i in 1..3 {
            if self.priors[i] > self.priors[best] {
                best = i;
            }
        }
        best
    }
}

/// Builds the ensemble for `theta ∈ [0, π/2]` and `p ∈ [0, 1/2]`.
///
/// Out-of-range values are rejected, never reduced by symmetry or clamped.
pub fn make_ensemble(theta: f64, p: f64) -> Result<MirrorEnsemble> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::PriorOutOfRange(p));
    }
    let (sin, cos) = theta.sin_cos();
    let states = [
        QubitStateVector {
            c_plus: cos,
            c_minus: sin,
        },
        QubitStateVector {
            c_plus: cos,
            c_minus: -sin,
        },
        QubitStateVector::PLUS,
    ];
    Ok(MirrorEnsemble {
        theta,
        p,
        states,
        priors: [p, p, 1.0 - 2.0 * p],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn trine_point() {
        let e = make_ensemble(FRAC_PI_3, 1.0 / 3.0).unwrap();
        for prior in e.priors() {
            assert_abs_diff_eq!(*prior, 1.0 / 3.0, epsilon = 1e-15);
        }
        // trine states are 120° apart on the real circle: |overlap| = 1/2
        let s = e.states();
        assert_abs_diff_eq!(s[0].dot(&s[1]).abs(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s[0].dot(&s[2]).abs(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_pair_at_quarter_pi() {
        let e = make_ensemble(FRAC_PI_4, 0.5).unwrap();
        let s = e.states();
        assert_abs_diff_eq!(s[0].dot(&s[1]), 0.0, epsilon = 1e-15);
        assert_eq!(e.priors()[2], 0.0);
    }

    #[test]
    fn collapse_at_theta_zero() {
        let e = make_ensemble(0.0, 0.2).unwrap();
        for s in e.states() {
            assert_eq!(*s, QubitStateVector::PLUS);
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert_eq!(
            make_ensemble(-1e-9, 0.2),
            Err(Error::ThetaOutOfRange(-1e-9))
        );
        assert!(matches!(
            make_ensemble(1.6, 0.2),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            make_ensemble(0.3, 0.5000001),
            Err(Error::PriorOutOfRange(_))
        ));
        assert!(matches!(
            make_ensemble(0.3, -0.1),
            Err(Error::PriorOutOfRange(_))
        ));
        assert!(matches!(
            make_ensemble(f64::NAN, 0.1),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(make_ensemble(FRAC_PI_2, 0.0).is_ok());
    }

    #[test]
    fn reflection_examples() {
        let v = QubitStateVector::from_angle(FRAC_PI_3);
        let r = mirror_reflect(v);
        assert_eq!(r.c_plus(), FRAC_PI_3.cos());
        assert_eq!(r.c_minus(), -FRAC_PI_3.sin());
        assert_eq!(
            mirror_reflect(QubitStateVector::PLUS),
            QubitStateVector::PLUS
        );
        let v = QubitStateVector::new(0.6, 0.8).unwrap();
        assert_eq!(mirror_reflect(mirror_reflect(v)), v);
    }

    #[test]
    fn state_normalisation_checked() {
        assert!(QubitStateVector::new(0.6, 0.8).is_ok());
        assert!(matches!(
            QubitStateVector::new(0.6, 0.7),
            Err(Error::NotNormalized(..))
        ));
    }

    proptest! {
        #[test]
        fn reflection_permutes_states(theta in 0.0..=FRAC_PI_2, p in 0.0..=0.5f64) {
            let e = make_ensemble(theta, p).unwrap();
            let s = e.states();
            prop_assert_eq!(mirror_reflect(s[0]), s[1]);
            prop_assert_eq!(mirror_reflect(s[1]), s[0]);
            let r3 = mirror_reflect(s[2]);
            prop_assert!(r3 == s[2] || r3 == s[2].neg());
            prop_assert_eq!(e.priors().iter().sum::<f64>(), 1.0);
        }

        #[test]
        fn overlap_identities(theta in 0.0..=FRAC_PI_2, p in 0.0..=0.5f64) {
            let e = make_ensemble(theta, p).unwrap();
            let s = e.states();
            prop_assert!((s[0].dot(&s[1]) - (2.0 * theta).cos()).abs() <= 1e-12);
            prop_assert!((s[0].dot(&s[2]) - theta.cos()).abs() <= 1e-12);
            prop_assert!((s[1].dot(&s[2]) - theta.cos()).abs() <= 1e-12);
            for v in s {
                prop_assert!((v.norm_sqr() - 1.0).abs() <= NORM_TOL);
            }
        }
    }
}
