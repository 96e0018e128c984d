use crate::grid::{gradient, integrate, l2_norm, ScalarField};

/// `M = ∫ u dx`.
pub fn total_population(u: &ScalarField) -> f64 {
    integrate(u)
}

/// `∫ ∇(K/P) · ∇r dx`.
pub fn correlation_integral(k: &ScalarField, p: &ScalarField, r: &ScalarField) -> f64 {
    integrate(&(&gradient(&(k / p)) * &gradient(r)))
}

/// Half-width of the band inside which the sign of
/// [`correlation_integral`] is treated as undetermined.
pub fn correlation_band(k: &ScalarField, p: &ScalarField, r: &ScalarField) -> f64 {
    1e-8 * l2_norm(&gradient(&(k / p))) * l2_norm(&gradient(r))
}

/// Amplitude `β` of the fast-dispersal limit `u → β P`.
pub fn beta_limit(r: &ScalarField, k: &ScalarField, p: &ScalarField) -> f64 {
    let num = integrate(&(r * p));
    let den = integrate(&(&(r / k) * &(p * p)));
    num / den
}

/// Fast-dispersal total population for `r = α (K/P)^λ`, independent of `α`:
/// `∫K (K/P)^(λ-1) / ∫K (K/P)^(λ-2) · ∫P`.
pub fn m_infinity(lambda: f64, k: &ScalarField, p: &ScalarField) -> f64 {
    let q = k / p;
    let num = integrate(&k.zip_with(&q, |kv, qv| kv * qv.powf(lambda - 1.0)));
    let den = integrate(&k.zip_with(&q, |kv, qv| kv * qv.powf(lambda - 2.0)));
    num / den * integrate(p)
}

/// Weighted integrals entering the appendix inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMoments {
    pub int_pu: f64,
    pub int_pk: f64,
    pub int_ru2: f64,
    pub int_rku: f64,
    pub int_rk2: f64,
}

pub fn weighted_moments(
    u: &ScalarField,
    r: &ScalarField,
    k: &ScalarField,
    p: &ScalarField,
) -> WeightedMoments {
    let rk = r * k;
    WeightedMoments {
        int_pu: integrate(&(p * u)),
        int_pk: integrate(&(p * k)),
        int_ru2: integrate(&(&(r * u) * u)),
        int_rku: integrate(&(&rk * u)),
        int_rk2: integrate(&(&rk * k)),
    }
}
