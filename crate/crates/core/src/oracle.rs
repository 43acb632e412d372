//! Brute-force bounds on the optimal success probability that do not use
//! the closed-form regime analysis.
//!
//! * The primal search evaluates explicit measurements (the mirror-symmetric
//!   ansatz family and every two-outcome projective measurement), so its
//!   best value is a lower bound.
//! * The dual search minimises `tr Γ` over symmetric `Γ` with
//!   `Γ ⪰ p_i|ψ_i⟩⟨ψ_i|` for every `i`. For any POM,
//!   `Σ p_i⟨ψ_i|π̂_i|ψ_i⟩ ≤ Σ tr(Γ π̂_i) = tr Γ`, so any feasible `Γ` is an
//!   upper bound.

use serde::Serialize;

use crate::ensemble::{MirrorEnsemble, QubitStateVector};
use crate::error::{Error, Result};
use crate::operators::{
    lagrange_operator, min_eigenvalue, projector, success_probability, weighted_signals, Operator2,
    Povm,
};
use crate::strategy::{ansatz_povm, optimal_povm, optimal_success};

/// Sandwich slack is `SLACK_FACTOR · resolution` (empirical, not a proof).
pub const SLACK_FACTOR: f64 = 0.5;

/// Golden-section iterations per line search; shrinks a bracket by ~1e-21.
const LINE_ITERS: usize = 100;

/// Cap on bracket expansions during dual refinement.
const MAX_EXPANSIONS: usize = 32;

/// Dual candidates with every `Γ − p_iρ_i` eigenvalue at or above this are feasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Half-width of the search box for the off-diagonal entry of `Γ`.
const Z_RANGE: f64 = 2.0;

/// Width of the search interval for the `|+⟩⟨+|` entry above its lower limit.
const X_RANGE: f64 = 2.0;

fn check_resolution(resolution: f64) -> Result<()> {
    if resolution > 0.0 && resolution <= 0.1 {
        Ok(())
    } else {
        Err(Error::Resolution(resolution))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalResult {
    pub success: f64,
    pub povm: Povm,
}

/// Best success over the ansatz family (`a` stepped by `resolution`) and
/// over projective pairs `{|α⟩, |α⊥⟩}` with `α ∈ [0, π)` stepped by
/// `resolution`, each outcome labelled with the state it favours most.
pub fn primal_grid_search(e: &MirrorEnsemble, resolution: f64) -> Result<PrimalResult> {
    check_resolution(resolution)?;
    let mut best: Option<PrimalResult> = None;
    let mut offer = |povm: Povm| -> Result<()> {
        let success = success_probability(e, &povm)?;
        if best.as_ref().is_none_or(|b| success > b.success) {
            best = Some(PrimalResult { success, povm });
        }
        Ok(())
    };

    let a_steps = (1.0 / resolution).ceil() as usize;
    for k in 0..=a_steps {
        let a = (k as f64 * resolution).min(1.0);
        offer(ansatz_povm(a)?)?;
    }

    let signals = weighted_signals(e);
    let mut k = 0usize;
    loop {
        let alpha = k as f64 * resolution;
        if alpha >= std::f64::consts::PI {
            break;
        }
        let v = QubitStateVector::from_angle(alpha);
        let w = QubitStateVector::from_angle(alpha + std::f64::consts::FRAC_PI_2);
        let mut elements = [Operator2::ZERO; 3];
        for dir in [v, w] {
            let proj = projector(&dir, 1.0)?;
            elements[best_label(&signals, &dir)] = elements[best_label(&signals, &dir)] + proj;
        }
        offer(Povm::new(elements.to_vec())?)?;
        k += 1;
    }
    Ok(best.expect("ansatz family is never empty"))
}

/// Index maximising `p_i |⟨ψ_i|v⟩|²`; ties go to the lowest index.
fn best_label(signals: &[Operator2; 3], v: &QubitStateVector) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if signals[i].expectation(v) > signals[best].expectation(v) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualResult {
    /// `tr Γ` of the best feasible point, the minimum of the two searches.
    pub bound: f64,
    pub gamma: Operator2,
    /// Refinement started from the Lagrange operator of the closed-form POM.
    pub warm_bound: f64,
    /// Refinement started from the coarse grid alone.
    pub cold_bound: f64,
}

/// Feasible dual problem with the `|−⟩⟨−|` entry eliminated: for fixed
/// `(x, z)` the smallest feasible `y` is `max_i C_i + (z − B_i)²/(x − A_i)`.
struct Dual {
    signals: [Operator2; 3],
    x_floor: f64,
}

impl Dual {
    fn new(e: &MirrorEnsemble) -> Self {
        let signals = weighted_signals(e);
        let x_floor = signals
            .iter()
            .map(|s| s.a11)
            .fold(f64::NEG_INFINITY, f64::max);
        Self { signals, x_floor }
    }

    fn min_y(&self, x: f64, z: f64) -> f64 {
        let mut y = f64::NEG_INFINITY;
        for s in &self.signals {
            let gap = x - s.a11;
            let dz = z - s.a12;
            let yi = if gap > 0.0 {
                s.a22 + dz * dz / gap
            } else if dz == 0.0 {
                s.a22
            } else {
                f64::INFINITY
            };
            y = y.max(yi);
        }
        y
    }

    fn objective(&self, x: f64, z: f64) -> f64 {
        x + self.min_y(x, z)
    }

    /// `min_z f(x, z)` over the full z box.
    fn profile(&self, x: f64) -> (f64, f64) {
        let z = golden_min(-Z_RANGE, Z_RANGE, |z| self.objective(x, z));
        (self.objective(x, z), z)
    }

    /// Minimises the x-profile over `[lo, hi]`, widening the bracket while
    /// the minimiser sits on an edge that is not the feasibility floor.
    fn refine(&self, mut lo: f64, mut hi: f64) -> (f64, f64) {
        let x_cap = self.x_floor + X_RANGE;
        let mut x = lo;
        for _ in 0..MAX_EXPANSIONS {
            x = golden_min(lo, hi, |x| self.profile(x).0);
            let width = hi - lo;
            let at_lo = x - lo <= 1e-6 * width && lo > self.x_floor;
            let at_hi = hi - x <= 1e-6 * width && hi < x_cap;
            if !at_lo && !at_hi {
                break;
            }
            if at_lo {
                lo = (lo - width).max(self.x_floor);
            }
            if at_hi {
                hi = (hi + width).min(x_cap);
            }
        }
        let (_, z) = self.profile(x);
        (x, z)
    }

    /// Builds `Γ` at `(x, z)` and lifts it by a multiple of the identity if
    /// rounding left any constraint slightly negative.
    fn certify(&self, x: f64, z: f64) -> Option<Operator2> {
        let y = self.min_y(x, z);
        if !y.is_finite() {
            return None;
        }
        let mut gamma = Operator2::new(x, z, y);
        let worst = self
            .signals
            .iter()
            .map(|s| min_eigenvalue(&(gamma - *s)))
            .fold(f64::INFINITY, f64::min);
        if worst < 0.0 {
            gamma = gamma + Operator2::IDENTITY.scale(-worst);
        }
        let feasible = self
            .signals
            .iter()
            .all(|s| min_eigenvalue(&(gamma - *s)) >= -FEASIBILITY_TOL);
        feasible.then_some(gamma)
    }
}

/// Golden-section minimisation of a convex function on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..LINE_ITERS {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Upper bound on the optimal success: coarse grid over the diagonal and
/// off-diagonal entries of `Γ`, then nested golden-section refinement.
///
/// The refinement runs twice, once bracketed by the coarse grid and once
/// started from the closed-form Lagrange operator; the smaller feasible trace
/// is returned and both are reported.
pub fn dual_certificate_search(e: &MirrorEnsemble, resolution: f64) -> Result<DualResult> {
    check_resolution(resolution)?;
    let dual = Dual::new(e);
    let h = (20.0 * resolution).min(0.1);
    let nx = (X_RANGE / h).ceil() as usize;
    let nz = (2.0 * Z_RANGE / h).ceil() as usize;

    let mut coarse: Option<(f64, f64, f64)> = None;
    for i in 0..=nx {
        let x = dual.x_floor + i as f64 * h;
        for k in 0..=nz {
            let z = -Z_RANGE + k as f64 * h;
            let val = dual.objective(x, z);
            if val.is_finite() && coarse.is_none_or(|(_, _, b)| val < b) {
                coarse = Some((x, z, val));
            }
        }
    }
    let (cx, _, _) = coarse.ok_or(Error::InfeasibleStart)?;

    let (x, z) = dual.refine((cx - h).max(dual.x_floor), cx + h);
    let cold = dual.certify(x, z).ok_or(Error::InfeasibleStart)?;

    let warm_start = optimal_povm(e)
        .ok()
        .and_then(|r| lagrange_operator(e, &r.povm).ok())
        .map(|g| g.a11.max(dual.x_floor))
        .unwrap_or(cx);
    let (wx, wz) = dual.refine(
        (warm_start - resolution).max(dual.x_floor),
        warm_start + resolution,
    );
    let warm = dual.certify(wx, wz).unwrap_or(cold);

    let (gamma, bound) = if warm.trace() < cold.trace() {
        (warm, warm.trace())
    } else {
        (cold, cold.trace())
    };
    Ok(DualResult {
        bound,
        gamma,
        warm_bound: warm.trace(),
        cold_bound: cold.trace(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichResult {
    pub primal_best: f64,
    pub dual_best: f64,
    pub closed_form: f64,
    /// `dual_best − primal_best`.
    pub gap: f64,
    pub resolution: f64,
    pub slack: f64,
    /// `primal_best − slack ≤ closed_form ≤ dual_best + slack`.
    pub inside: bool,
}

pub fn sandwich(e: &MirrorEnsemble, resolution: f64) -> Result<SandwichResult> {
    let primal_best = primal_grid_search(e, resolution)?.success;
    let dual_best = dual_certificate_search(e, resolution)?.bound;
    let closed_form = optimal_success(e);
    let slack = SLACK_FACTOR * resolution;
    Ok(SandwichResult {
        primal_best,
        dual_best,
        closed_form,
        gap: dual_best - primal_best,
        resolution,
        slack,
        inside: primal_best - slack <= closed_form && closed_form <= dual_best + slack,
    })
}
