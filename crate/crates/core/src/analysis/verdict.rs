use std::fmt;

use super::functionals::{
    correlation_band, correlation_integral, m_infinity, weighted_moments, WeightedMoments,
};
use super::hypotheses::{
    deviation_from_mean, is_constant, monotone_correlation, proportional, ratio_trend,
};
use super::profile::classify_profile;
use super::table::SweepTable;
use super::AnalysisError;
use crate::grid::{gradient, integrate, l2_norm, ScalarField};
use crate::scenario::{Correlation, Fields, RatioTrend, Relations, Scenario};
use crate::solver::SolveResult;

/// Exponents on which monotonicity of the fast-dispersal limit is checked.
pub const LAMBDA_GRID: [f64; 10] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// Tolerance of whole-sweep inequalities, relative to `∫K`.
pub const QUADRATURE_MARGIN: f64 = 1e-4;

/// Tolerance of the fast-dispersal limit check, relative to `∫K`.
pub const LIMIT_RTOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClaimId {
    Thm31,
    Thm32,
    Lem33Pos,
    Lem33Neg,
    Cor34,
    Thm35Pos,
    Thm35Neg,
    Thm36,
    ThmA1,
    ThmA2Upper,
    ThmA2Lower,
    Cor23Limit,
    LouConjectureProbe,
}

impl ClaimId {
    pub const ALL: [ClaimId; 13] = [
        ClaimId::Thm31,
        ClaimId::Thm32,
        ClaimId::Lem33Pos,
        ClaimId::Lem33Neg,
        ClaimId::Cor34,
        ClaimId::Thm35Pos,
        ClaimId::Thm35Neg,
        ClaimId::Thm36,
        ClaimId::ThmA1,
        ClaimId::ThmA2Upper,
        ClaimId::ThmA2Lower,
        ClaimId::Cor23Limit,
        ClaimId::LouConjectureProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::Thm31 => "thm31",
            ClaimId::Thm32 => "thm32",
            ClaimId::Lem33Pos => "lem33_pos",
            ClaimId::Lem33Neg => "lem33_neg",
            ClaimId::Cor34 => "cor34",
            ClaimId::Thm35Pos => "thm35_pos",
            ClaimId::Thm35Neg => "thm35_neg",
            ClaimId::Thm36 => "thm36",
            ClaimId::ThmA1 => "thmA1",
            ClaimId::ThmA2Upper => "thmA2_upper",
            ClaimId::ThmA2Lower => "thmA2_lower",
            ClaimId::Cor23Limit => "cor23_limit",
            ClaimId::LouConjectureProbe => "lou_conjecture_probe",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    Violated,
    Inapplicable,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Violated => "violated",
            Verdict::Inapplicable => "inapplicable",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(value: f64, noise: f64) -> Self {
        if value > noise {
            Sign::Positive
        } else if value < -noise {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Hypothesis {
    fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            holds,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub scenario: String,
    pub claim: ClaimId,
    pub hypotheses: Vec<Hypothesis>,
    pub hypotheses_hold: bool,
    pub predicted: String,
    pub observed: String,
    pub verdict: Verdict,
    /// Rows or exponents contradicting the prediction; non-empty for
    /// violated verdicts.
    pub witnesses: Vec<String>,
    /// Sign of `M - ∫K` at the smallest `d`, for the small-dispersal claims.
    pub observed_sign: Option<Sign>,
}

impl fmt::Display for VerdictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self
            .hypotheses
            .iter()
            .map(|h| format!("{}={} ({})", h.name, if h.holds { "yes" } else { "no" }, h.detail))
            .collect();
        write!(
            f,
            "{} | {} | hypotheses: {} | predicted: {} | observed: {} | {}",
            self.scenario,
            self.claim,
            hyps.join("; "),
            self.predicted,
            self.observed,
            self.verdict
        )?;
        if !self.witnesses.is_empty() {
            write!(f, " | witnesses: {}", self.witnesses.join(", "))?;
        }
        Ok(())
    }
}

struct Outcome {
    verdict: Verdict,
    observed: String,
    witnesses: Vec<String>,
    sign: Option<Sign>,
}

impl Outcome {
    fn new(verdict: Verdict, observed: String) -> Self {
        Self {
            verdict,
            observed,
            witnesses: Vec::new(),
            sign: None,
        }
    }
}

/// Shared facts about one scenario, computed once for all claims.
struct Context<'a> {
    name: &'a str,
    fields: &'a Fields,
    table: &'a SweepTable,
    small: [&'a SolveResult; 2],
    int_k: f64,
    relations: Relations,
}

impl Context<'_> {
    fn report(&self, claim: ClaimId, hypotheses: Vec<Hypothesis>, predicted: String, eval: impl FnOnce() -> Outcome) -> VerdictReport {
        let hold = hypotheses.iter().all(|h| h.holds);
        let out = if hold {
            eval()
        } else {
            Outcome::new(Verdict::Inapplicable, "not evaluated".into())
        };
        VerdictReport {
            scenario: self.name.to_string(),
            claim,
            hypotheses,
            hypotheses_hold: hold,
            predicted,
            observed: out.observed,
            verdict: out.verdict,
            witnesses: out.witnesses,
            observed_sign: out.sign,
        }
    }

    fn assumption_a(&self) -> Hypothesis {
        let Fields { k, p, r } = self.fields;
        let flat: Vec<&str> = [("K", k), ("P", p), ("r", r)]
            .into_iter()
            .filter(|(_, f)| is_constant(f))
            .map(|(n, _)| n)
            .collect();
        if flat.is_empty() {
            Hypothesis::new("A", true, "K, P, r positive and non-constant")
        } else {
            Hypothesis::new("A", false, format!("constant: {}", flat.join(", ")))
        }
    }

    fn independent_kp(&self) -> Hypothesis {
        let dev = deviation_from_mean(&(&self.fields.k / &self.fields.p));
        let holds = !proportional(&self.fields.k, &self.fields.p);
        Hypothesis::new("K/P non-constant", holds, format!("deviation {dev:.3e}"))
    }

    fn p_prop_k_over_r(&self) -> Hypothesis {
        let Fields { k, p, r } = self.fields;
        let ratio = &(p * r) / k;
        let dev = deviation_from_mean(&ratio);
        Hypothesis::new(
            "P ∝ K/r",
            proportional(&(p * r), k),
            format!("max deviation of P r/K {dev:.3e}"),
        )
    }

    fn r_constant(&self) -> Hypothesis {
        let rr = self.fields.r.relative_range();
        Hypothesis::new("r constant", is_constant(&self.fields.r), format!("relative range {rr:.3e}"))
    }

    fn small_d_sign(&self, predicted: Sign) -> Outcome {
        let len = self.fields.k.grid().length();
        let r_min = self.fields.r.min();
        let mut signs = Vec::new();
        let mut parts = Vec::new();
        for (res, row) in self.small.iter().zip(&self.table.rows) {
            let noise = 10.0 * res.residual_norm * len / r_min + 1e-12 * self.int_k;
            let s = Sign::of(row.m_minus_int_k, noise);
            signs.push(s);
            parts.push(format!("M-intK={:.3e} at d={:.3e}", row.m_minus_int_k, row.d));
        }
        let observed = format!("{} (sign {})", parts.join(", "), signs[0].as_str());
        let (verdict, witnesses) = if signs.iter().all(|&s| s == predicted) {
            (Verdict::Confirmed, Vec::new())
        } else if predicted != Sign::Zero && signs.iter().all(|&s| s == predicted.flip()) {
            (Verdict::Violated, parts)
        } else {
            (Verdict::Indeterminate, Vec::new())
        };
        Outcome {
            verdict,
            observed,
            witnesses,
            sign: Some(signs[0]),
        }
    }

    fn all_rows(&self, above: bool) -> Outcome {
        let margin = QUADRATURE_MARGIN * self.int_k;
        let signed = |diff: f64| if above { diff } else { -diff };
        let failing: Vec<_> = self
            .table
            .rows
            .iter()
            .filter(|row| signed(row.m_minus_int_k) <= 0.0)
            .collect();
        let extreme = self
            .table
            .rows
            .iter()
            .map(|row| signed(row.m_minus_int_k))
            .fold(f64::INFINITY, f64::min);
        let observed = format!(
            "{} of {} rows fail; min {} = {:.3e}",
            failing.len(),
            self.table.rows.len(),
            if above { "M-intK" } else { "intK-M" },
            extreme
        );
        let witnesses: Vec<String> = failing
            .iter()
            .map(|row| format!("d={:.3e} M-intK={:.3e}", row.d, row.m_minus_int_k))
            .collect();
        let verdict = if failing.is_empty() {
            Verdict::Confirmed
        } else if failing.iter().any(|row| signed(row.m_minus_int_k) < -margin) {
            Verdict::Violated
        } else {
            Verdict::Indeterminate
        };
        Outcome {
            verdict,
            observed,
            witnesses,
            sign: None,
        }
    }

    fn moments(&self) -> [WeightedMoments; 2] {
        let Fields { k, p, r } = self.fields;
        self.small.map(|res| weighted_moments(&res.u, r, k, p))
    }

    /// Perturbation of a weighted integral caused by the solver residual,
    /// with `weight` bounding the integrand's sensitivity to `u`.
    fn moment_noise(&self, res: &SolveResult, weight: f64, scale: f64) -> f64 {
        let len = self.fields.k.grid().length();
        10.0 * res.residual_norm / self.fields.r.min() * weight * len + 1e-12 * scale.abs()
    }

    /// Evaluates strict inequalities `lhs_j < rhs_j` on the two smallest rows.
    fn small_d_chain(&self, checks: impl Fn(&WeightedMoments) -> Vec<(&'static str, f64, f64)>, weight: f64) -> Outcome {
        let moments = self.moments();
        let mut all_hold = true;
        let mut any_reversed = false;
        let mut parts = Vec::new();
        let mut witnesses = Vec::new();
        for ((m, res), row) in moments.iter().zip(self.small).zip(&self.table.rows) {
            for (label, lhs, rhs) in checks(m) {
                let noise = self.moment_noise(res, weight, rhs);
                let s = Sign::of(rhs - lhs, noise);
                parts.push(format!("{label}: {:.3e} at d={:.3e}", rhs - lhs, row.d));
                if s != Sign::Positive {
                    all_hold = false;
                }
                if s == Sign::Negative {
                    any_reversed = true;
                    witnesses.push(format!("d={:.3e} {label} gap {:.3e}", row.d, rhs - lhs));
                }
            }
        }
        let verdict = if all_hold {
            Verdict::Confirmed
        } else if any_reversed {
            Verdict::Violated
        } else {
            Verdict::Indeterminate
        };
        Outcome {
            verdict,
            observed: parts.join(", "),
            witnesses: if verdict == Verdict::Violated { witnesses } else { Vec::new() },
            sign: None,
        }
    }

    fn thm31(&self) -> VerdictReport {
        self.report(
            ClaimId::Thm31,
            vec![self.assumption_a(), self.p_prop_k_over_r()],
            "M(d) > intK for every d".into(),
            || self.all_rows(true),
        )
    }

    fn thm32(&self) -> VerdictReport {
        let mut k_p = vec![self.r_constant()];
        let Fields { k, p, .. } = self.fields;
        k_p.push(Hypothesis::new(
            "K, P non-constant",
            !is_constant(k) && !is_constant(p),
            format!("relative ranges {:.3e}, {:.3e}", k.relative_range(), p.relative_range()),
        ));
        k_p.push(self.independent_kp());
        self.report(ClaimId::Thm32, k_p, "M(d) < intK for every d".into(), || {
            self.all_rows(false)
        })
    }

    fn lem33(&self) -> [VerdictReport; 2] {
        let Fields { k, p, r } = self.fields;
        let i = correlation_integral(k, p, r);
        let band = correlation_band(k, p, r);
        let a = self.assumption_a();
        let in_band = i.abs() <= band;
        let detail = format!("I={i:.3e}, band={band:.3e}");
        let make = |claim, positive: bool| {
            let sign_holds = if positive { i > band } else { i < -band };
            let name = if positive { "I > 0" } else { "I < 0" };
            let predicted = if positive {
                "M(d) > intK for small d"
            } else {
                "M(d) < intK for small d"
            };
            let target = if positive { Sign::Positive } else { Sign::Negative };
            if a.holds && in_band {
                let out = self.small_d_sign(target);
                return VerdictReport {
                    scenario: self.name.to_string(),
                    claim,
                    hypotheses: vec![a.clone()],
                    hypotheses_hold: true,
                    predicted: predicted.into(),
                    observed: format!("{detail}, sign of I undetermined; {}", out.observed),
                    verdict: Verdict::Indeterminate,
                    witnesses: Vec::new(),
                    observed_sign: out.sign,
                };
            }
            self.report(
                claim,
                vec![a.clone(), Hypothesis::new(name, sign_holds, detail.clone())],
                predicted.into(),
                || self.small_d_sign(target),
            )
        };
        [make(ClaimId::Lem33Pos, true), make(ClaimId::Lem33Neg, false)]
    }

    fn cor34(&self) -> VerdictReport {
        let Fields { k, r, .. } = self.fields;
        let dev = crate::grid::inf_norm_diff(r, k).unwrap_or(f64::INFINITY) / k.sup_norm();
        let trend = self.relations.p_of_k;
        let (pred, target) = match trend {
            Some(RatioTrend::Increasing) => ("M(d) < intK for small d", Sign::Negative),
            Some(RatioTrend::Decreasing) => ("M(d) > intK for small d", Sign::Positive),
            _ => ("no prediction", Sign::Zero),
        };
        let hyps = vec![
            Hypothesis::new("r ≡ K", dev <= 1e-12, format!("max |r-K|/max K {dev:.3e}")),
            Hypothesis::new(
                "P = h(K), h(t)/t strictly monotone",
                matches!(trend, Some(RatioTrend::Increasing | RatioTrend::Decreasing)),
                format!("h(t)/t trend {}", describe(trend)),
            ),
        ];
        self.report(ClaimId::Cor34, hyps, pred.into(), || self.small_d_sign(target))
    }

    fn thm35(&self) -> [VerdictReport; 2] {
        let corr = self.relations.r_of_kp;
        let make = |claim, want: Correlation| {
            let (pred, target) = match want {
                Correlation::Positive => ("M(d) > intK for small d", Sign::Positive),
                Correlation::Negative => ("M(d) < intK for small d", Sign::Negative),
            };
            let hyps = vec![
                self.assumption_a(),
                Hypothesis::new(
                    if want == Correlation::Positive {
                        "r, K/P positively correlated"
                    } else {
                        "r, K/P negatively correlated"
                    },
                    corr == Some(want),
                    format!("relation {corr:?}"),
                ),
            ];
            self.report(claim, hyps, pred.into(), || self.small_d_sign(target))
        };
        [
            make(ClaimId::Thm35Pos, Correlation::Positive),
            make(ClaimId::Thm35Neg, Correlation::Negative),
        ]
    }

    fn thm36(&self) -> VerdictReport {
        let Fields { k, p, .. } = self.fields;
        self.report(
            ClaimId::Thm36,
            vec![self.independent_kp()],
            "m_infinity strictly increasing in lambda".into(),
            || {
                let values: Vec<f64> = LAMBDA_GRID.iter().map(|&l| m_infinity(l, k, p)).collect();
                let witnesses: Vec<String> = LAMBDA_GRID
                    .windows(2)
                    .zip(values.windows(2))
                    .filter(|(_, v)| v[1] <= v[0])
                    .map(|(l, v)| format!("lambda {}->{}: {:.6e}->{:.6e}", l[0], l[1], v[0], v[1]))
                    .collect();
                let min_inc = values
                    .windows(2)
                    .map(|v| v[1] - v[0])
                    .fold(f64::INFINITY, f64::min);
                let observed = format!(
                    "m_infinity from {:.6e} to {:.6e}, min increment {min_inc:.3e}",
                    values[0],
                    values[values.len() - 1]
                );
                Outcome {
                    verdict: if witnesses.is_empty() {
                        Verdict::Confirmed
                    } else {
                        Verdict::Violated
                    },
                    observed,
                    witnesses,
                    sign: None,
                }
            },
        )
    }

    fn thm_a1(&self) -> VerdictReport {
        let Fields { k, p, .. } = self.fields;
        let (gk, gp) = (gradient(k), gradient(p));
        let i = integrate(&(&gk * &gp));
        let band = 1e-8 * l2_norm(&gk) * l2_norm(&gp);
        let hyps = vec![
            Hypothesis::new(
                "r, K positively correlated",
                self.relations.r_of_k == Some(Correlation::Positive),
                format!("relation {}", describe(self.relations.r_of_k)),
            ),
            Hypothesis::new(
                "∫∇K·∇P < 0",
                i < -band,
                format!("∫∇K·∇P={i:.3e}, band={band:.3e}"),
            ),
        ];
        let weight = self.fields.p.max();
        self.report(ClaimId::ThmA1, hyps, "int Pu > int PK for small d".into(), || {
            self.small_d_chain(|m| vec![("int_PK < int_Pu", m.int_pk, m.int_pu)], weight)
        })
    }

    fn thm_a2(&self) -> [VerdictReport; 2] {
        let trend = self.relations.p_of_k;
        let weight = 2.0 * self.fields.r.max() * self.fields.k.max();
        let make = |claim, want: RatioTrend| {
            let hyps = vec![
                self.independent_kp(),
                Hypothesis::new(
                    if want == RatioTrend::Increasing {
                        "P = h(K), h' >= h/t"
                    } else {
                        "P = h(K), h' <= h/t"
                    },
                    trend == Some(want),
                    format!("h(t)/t trend {}", describe(trend)),
                ),
            ];
            if want == RatioTrend::Increasing {
                self.report(claim, hyps, "int ru^2 > int rKu for small d".into(), || {
                    self.small_d_chain(|m| vec![("int_rKu < int_ru2", m.int_rku, m.int_ru2)], weight)
                })
            } else {
                self.report(
                    claim,
                    hyps,
                    "int ru^2 < int rKu < int rK^2 for small d".into(),
                    || {
                        self.small_d_chain(
                            |m| {
                                vec![
                                    ("int_ru2 < int_rKu", m.int_ru2, m.int_rku),
                                    ("int_rKu < int_rK2", m.int_rku, m.int_rk2),
                                ]
                            },
                            weight,
                        )
                    },
                )
            }
        };
        [
            make(ClaimId::ThmA2Upper, RatioTrend::Increasing),
            make(ClaimId::ThmA2Lower, RatioTrend::Decreasing),
        ]
    }

    fn cor23(&self) -> VerdictReport {
        self.report(
            ClaimId::Cor23Limit,
            vec![self.p_prop_k_over_r()],
            "M(d) -> intK as d -> infinity".into(),
            || {
                let last = self.table.rows.last().expect("non-empty table");
                let gap = (last.m - self.int_k).abs();
                let observed = format!(
                    "|M-intK|={gap:.3e} at d={:.3e}; beta*intP={:.6e}",
                    last.d, self.table.m_infinity
                );
                if gap <= LIMIT_RTOL * self.int_k {
                    Outcome::new(Verdict::Confirmed, observed)
                } else {
                    Outcome {
                        verdict: Verdict::Violated,
                        observed,
                        witnesses: vec![format!("d={:.3e} M={:.6e}", last.d, last.m)],
                        sign: None,
                    }
                }
            },
        )
    }

    fn lou(&self) -> Result<VerdictReport, AnalysisError> {
        let profile = classify_profile(self.table)?;
        let p_const = is_constant(&self.fields.p);
        Ok(self.report(
            ClaimId::LouConjectureProbe,
            vec![self.assumption_a(), self.p_prop_k_over_r()],
            "M(d) unimodal (conjectured for constant P)".into(),
            || {
                let observed = format!(
                    "profile {} with {} interior maxima, unimodal={}, argmax d={:.3e}",
                    profile.shape,
                    profile.n_interior_maxima,
                    profile.is_unimodal(),
                    profile.argmax_d
                );
                if profile.is_unimodal() {
                    Outcome::new(Verdict::Confirmed, observed)
                } else if p_const {
                    Outcome {
                        verdict: Verdict::Violated,
                        observed,
                        witnesses: vec![format!("profile {}", profile.shape)],
                        sign: None,
                    }
                } else {
                    Outcome::new(
                        Verdict::Indeterminate,
                        format!("{observed}; P non-constant, outside the conjecture"),
                    )
                }
            },
        ))
    }
}

fn describe<T: fmt::Display>(value: Option<T>) -> String {
    value.map_or_else(|| "unknown".to_string(), |v| v.to_string())
}

/// Resolves the structural relations of a scenario, preferring declared
/// ones and falling back to detection along a monotone driver field.
pub fn resolve_relations(declared: &Relations, fields: &Fields) -> Relations {
    let Fields { k, p, r } = fields;
    let kp: ScalarField = k / p;
    Relations {
        p_of_k: declared.p_of_k.or_else(|| ratio_trend(k, p)),
        r_of_k: declared.r_of_k.or_else(|| monotone_correlation(k, r)),
        r_of_kp: declared.r_of_kp.or_else(|| monotone_correlation(&kp, r)),
    }
}

/// Evaluates every claim on a converged sweep.
///
/// `small_d` holds the solutions at the two smallest `d`, which must be the
/// first two rows of `table`.
pub fn verdicts(
    scenario: &Scenario,
    table: &SweepTable,
    small_d: &[SolveResult],
    fields: &Fields,
) -> Result<Vec<VerdictReport>, AnalysisError> {
    if small_d.len() < 2 || table.rows.len() < 2 {
        return Err(AnalysisError::Inconsistent(
            "verdicts need the two smallest-d solutions".into(),
        ));
    }
    let ctx = Context {
        name: &scenario.name,
        fields,
        table,
        small: [&small_d[0], &small_d[1]],
        int_k: table.int_k,
        relations: resolve_relations(&scenario.relations, fields),
    };
    let mut out = vec![ctx.thm31(), ctx.thm32()];
    out.extend(ctx.lem33());
    out.push(ctx.cor34());
    out.extend(ctx.thm35());
    out.push(ctx.thm36());
    out.push(ctx.thm_a1());
    out.extend(ctx.thm_a2());
    out.push(ctx.cor23());
    out.push(ctx.lou()?);
    Ok(out)
}
