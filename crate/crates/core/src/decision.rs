//! Composing utility and attraction factors into choice probabilities.
//!
//! The probability of choosing prospect `n` is `p_n = f_n + q_n`, where `f_n`
//! comes from a rational evaluation and `q_n` is taken from the quantized
//! attraction set by attractiveness rank. Probabilities must stay in `[0, 1]`,
//! so every `q_n` is kept within `[-f_n, 1 - f_n]` while the set still sums to
//! zero.
//!
//! All arithmetic here is exact.

use num_traits::{One, Signed, Zero};

use crate::attraction::quantized_attraction_set;
use crate::error::{QdtError, Result};
use crate::exact::{exact_from_f64, exact_from_rational64, exact_sum, to_f64, Exact};

/// Tolerance on `Σ f = 1` for a choice set and on report invariants.
pub const SUM_TOL: f64 = 1e-9;
/// Tolerance on `Σ p_exp = 1` for survey frequencies, which are often rounded.
pub const EMPIRICAL_SUM_TOL: f64 = 2e-2;

fn tol(x: f64) -> Exact {
    exact_from_f64(x).expect("finite tolerance")
}

/// Competing prospects with their utility factors and attractiveness ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceSet {
    ids: Vec<String>,
    utility_factors: Vec<Exact>,
    /// Indices into `ids`, most attractive first.
    rank: Vec<usize>,
}

impl ChoiceSet {
    /// Builds a set from float factors; each is read as its shortest decimal (`0.4` is `2/5`).
    pub fn new(ids: Vec<String>, utility_factors: &[f64], rank: &[&str]) -> Result<Self> {
        let f = utility_factors
            .iter()
            .map(|&x| exact_from_f64(x))
            .collect::<Result<Vec<_>>>()?;
        let rank: Vec<String> = rank.iter().map(|s| s.to_string()).collect();
        Self::from_exact(ids, f, &rank)
    }

    pub fn from_exact(ids: Vec<String>, utility_factors: Vec<Exact>, rank: &[String]) -> Result<Self> {
        if ids.is_empty() {
            return Err(QdtError::Validation("choice set is empty".into()));
        }
        if ids.len() != utility_factors.len() {
            return Err(QdtError::Validation(format!(
                "{} prospects but {} utility factors",
                ids.len(),
                utility_factors.len()
            )));
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(QdtError::Validation(format!("duplicate prospect id '{id}'")));
            }
        }
        for (id, f) in ids.iter().zip(&utility_factors) {
            if f.is_negative() || *f > Exact::one() {
                return Err(QdtError::Validation(format!(
                    "utility factor of '{id}' is {}, outside [0, 1]",
                    to_f64(f)
                )));
            }
        }
        let total = exact_sum(&utility_factors);
        if (&total - Exact::one()).abs() > tol(SUM_TOL) {
            return Err(QdtError::Validation(format!(
                "utility factors sum to {}, expected 1",
                to_f64(&total)
            )));
        }
        if rank.len() != ids.len() {
            return Err(QdtError::Validation(format!(
                "attractiveness rank lists {} ids for {} prospects",
                rank.len(),
                ids.len()
            )));
        }
        let mut order = Vec::with_capacity(rank.len());
        for id in rank {
            let idx = ids
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| QdtError::Validation(format!("rank refers to unknown prospect '{id}'")))?;
            if order.contains(&idx) {
                return Err(QdtError::Validation(format!("prospect '{id}' ranked twice")));
            }
            order.push(idx);
        }
        Ok(Self {
            ids,
            utility_factors,
            rank: order,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn utility_factors(&self) -> &[Exact] {
        &self.utility_factors
    }

    pub fn rank(&self) -> &[usize] {
        &self.rank
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub f: Exact,
    pub q: Exact,
    pub p: Exact,
    pub p_exp: Option<Exact>,
    pub abs_error: Option<Exact>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    pub max_abs_error: Exact,
    pub mean_abs_error: Exact,
}

/// Per-prospect `(f, q, p)`, optionally scored against observed frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub rows: Vec<ReportRow>,
    pub clamping_applied: bool,
    pub errors: Option<ErrorSummary>,
}

impl PredictionReport {
    pub fn p(&self) -> Vec<Exact> {
        self.rows.iter().map(|r| r.p.clone()).collect()
    }

    pub fn p_f64(&self) -> Vec<f64> {
        self.rows.iter().map(|r| to_f64(&r.p)).collect()
    }

    pub fn q_f64(&self) -> Vec<f64> {
        self.rows.iter().map(|r| to_f64(&r.q)).collect()
    }

    pub fn row(&self, id: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// Checks `Σp = 1`, `Σq = 0`, `p_n ∈ [0, 1]` and `p = f + q`.
    pub fn validate(&self) -> Result<()> {
        let eps = tol(SUM_TOL);
        let sp = exact_sum(self.rows.iter().map(|r| &r.p));
        if (&sp - Exact::one()).abs() > eps {
            return Err(QdtError::Validation(format!("probabilities sum to {}", to_f64(&sp))));
        }
        let sq = exact_sum(self.rows.iter().map(|r| &r.q));
        if sq.abs() > eps {
            return Err(QdtError::Validation(format!("attraction factors sum to {}", to_f64(&sq))));
        }
        for r in &self.rows {
            if r.p.is_negative() || r.p > Exact::one() {
                return Err(QdtError::Validation(format!(
                    "probability of '{}' is {}, outside [0, 1]",
                    r.id,
                    to_f64(&r.p)
                )));
            }
            if r.p != &r.f + &r.q {
                return Err(QdtError::Validation(format!("p != f + q for '{}'", r.id)));
            }
        }
        Ok(())
    }
}

/// Keeps each `q_n` within `[-f_n, 1 - f_n]` while preserving `Σq`.
///
/// Out-of-range entries are clamped; the resulting residual is shared equally
/// among entries that can still move in its direction, repeating until the
/// residual is exactly zero. The flag reports whether any clamping happened.
pub fn enforce_bounds(f: &[Exact], q: &[Exact]) -> Result<(Vec<Exact>, bool)> {
    if f.len() != q.len() {
        return Err(QdtError::Domain(format!(
            "{} utility factors but {} attraction factors",
            f.len(),
            q.len()
        )));
    }
    let lo: Vec<Exact> = f.iter().map(|x| -x.clone()).collect();
    let hi: Vec<Exact> = f.iter().map(|x| Exact::one() - x).collect();
    let target = exact_sum(q);

    let mut clamped = false;
    let mut out: Vec<Exact> = Vec::with_capacity(q.len());
    for ((x, l), h) in q.iter().zip(&lo).zip(&hi) {
        if l > h {
            return Err(QdtError::Infeasible(format!(
                "utility factor {} outside [0, 1]",
                to_f64(&-l.clone())
            )));
        }
        let c = clamp(x, l, h);
        clamped |= c != *x;
        out.push(c);
    }

    // Each pass either zeroes the residual or pins at least one more entry.
    for _ in 0..=q.len() {
        let residual = &target - exact_sum(&out);
        if residual.is_zero() {
            return Ok((out, clamped));
        }
        let free: Vec<usize> = (0..out.len())
            .filter(|&i| {
                if residual.is_positive() {
                    out[i] < hi[i]
                } else {
                    out[i] > lo[i]
                }
            })
            .collect();
        if free.is_empty() {
            return Err(QdtError::Infeasible(format!(
                "residual {} cannot be absorbed: every entry sits at its bound",
                to_f64(&residual)
            )));
        }
        let share = residual / Exact::from_integer((free.len() as i64).into());
        for i in free {
            let moved = &out[i] + &share;
            let c = clamp(&moved, &lo[i], &hi[i]);
            clamped |= c != moved;
            out[i] = c;
        }
    }
    Err(QdtError::Infeasible("rebalancing did not converge".into()))
}

fn clamp(x: &Exact, lo: &Exact, hi: &Exact) -> Exact {
    if x < lo {
        lo.clone()
    } else if x > hi {
        hi.clone()
    } else {
        x.clone()
    }
}

/// `p_n = f_n + q_n` with `Q_N` assigned in attractiveness order, then bounded.
pub fn compose_probabilities(choice_set: &ChoiceSet) -> Result<PredictionReport> {
    let set = quantized_attraction_set(choice_set.len())?;
    let mut q = vec![Exact::zero(); choice_set.len()];
    for (slot, &idx) in choice_set.rank.iter().enumerate() {
        q[idx] = exact_from_rational64(set.values()[slot]);
    }
    let (q, clamping_applied) = enforce_bounds(&choice_set.utility_factors, &q)?;
    let rows = choice_set
        .ids
        .iter()
        .zip(&choice_set.utility_factors)
        .zip(q)
        .map(|((id, f), q)| ReportRow {
            id: id.clone(),
            p: f + &q,
            f: f.clone(),
            q,
            p_exp: None,
            abs_error: None,
        })
        .collect();
    let report = PredictionReport {
        rows,
        clamping_applied,
        errors: None,
    };
    report.validate()?;
    Ok(report)
}

/// How the decoy option enters the attraction set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecoyMode {
    /// `N` counts only the competing prospects; the decoy is not a choice alternative.
    #[default]
    Excluded,
    /// The decoy joins the set with `f = 0` as the least attractive prospect;
    /// probabilities are then conditioned on not choosing it.
    Included,
}

/// Predicts choice probabilities among competing prospects in the presence of a decoy.
///
/// The ranking encodes which prospect the decoy makes more attractive.
pub fn predict_decoy(choice_set: &ChoiceSet, mode: DecoyMode) -> Result<PredictionReport> {
    if choice_set.len() < 2 {
        return Err(QdtError::Validation(
            "decoy prediction needs at least two competing prospects".into(),
        ));
    }
    match mode {
        DecoyMode::Excluded => compose_probabilities(choice_set),
        DecoyMode::Included => predict_with_decoy_member(choice_set),
    }
}

fn predict_with_decoy_member(choice_set: &ChoiceSet) -> Result<PredictionReport> {
    let mut decoy_id = String::from("decoy");
    while choice_set.ids.contains(&decoy_id) {
        decoy_id.push('_');
    }
    let mut ids = choice_set.ids.clone();
    ids.push(decoy_id);
    let mut f = choice_set.utility_factors.clone();
    f.push(Exact::zero());
    let mut rank: Vec<String> = choice_set.rank.iter().map(|&i| choice_set.ids[i].clone()).collect();
    rank.push(ids[ids.len() - 1].clone());
    let extended = compose_probabilities(&ChoiceSet::from_exact(ids, f, &rank)?)?;

    let competing = &extended.rows[..choice_set.len()];
    let mass = exact_sum(competing.iter().map(|r| &r.p));
    if mass.is_zero() {
        return Err(QdtError::Degenerate("competing prospects carry no probability".into()));
    }
    let rows: Vec<ReportRow> = competing
        .iter()
        .map(|r| {
            let p = &r.p / &mass;
            ReportRow {
                id: r.id.clone(),
                q: &p - &r.f,
                f: r.f.clone(),
                p,
                p_exp: None,
                abs_error: None,
            }
        })
        .collect();
    let report = PredictionReport {
        rows,
        clamping_applied: extended.clamping_applied,
        errors: None,
    };
    report.validate()?;
    Ok(report)
}

/// Attaches observed frequencies (in report row order) and absolute errors.
pub fn score_against_empirical(report: &PredictionReport, p_exp: &[Exact]) -> Result<PredictionReport> {
    if p_exp.len() != report.rows.len() {
        return Err(QdtError::Validation(format!(
            "{} empirical frequencies for {} prospects",
            p_exp.len(),
            report.rows.len()
        )));
    }
    if let Some(x) = p_exp.iter().find(|x| x.is_negative()) {
        return Err(QdtError::Validation(format!("negative empirical frequency {}", to_f64(x))));
    }
    let total = exact_sum(p_exp);
    if (&total - Exact::one()).abs() > tol(EMPIRICAL_SUM_TOL) {
        return Err(QdtError::Validation(format!(
            "empirical frequencies sum to {}, expected 1",
            to_f64(&total)
        )));
    }
    let mut scored = report.clone();
    let mut max = Exact::zero();
    let mut sum = Exact::zero();
    for (row, obs) in scored.rows.iter_mut().zip(p_exp) {
        let err = (&row.p - obs).abs();
        if err > max {
            max = err.clone();
        }
        sum += &err;
        row.p_exp = Some(obs.clone());
        row.abs_error = Some(err);
    }
    let mean = sum / Exact::from_integer((p_exp.len() as i64).into());
    scored.errors = Some(ErrorSummary {
        max_abs_error: max,
        mean_abs_error: mean,
    });
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityCheck {
    /// The most likely choice under `p` differs from the one under `f`.
    pub reversal: bool,
    /// One of the argmaxes is not unique; reversal is then reported as false.
    pub tie: bool,
}

fn unique_argmax<T: PartialOrd>(values: &[T]) -> Option<usize> {
    let mut best = 0;
    let mut tied = false;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
            tied = false;
        } else if values[i] == values[best] {
            tied = true;
        }
    }
    (!tied).then_some(best)
}

/// Detects a preference reversal between the rational ranking `f` and the prediction `p`.
pub fn regularity_violation_check<T: PartialOrd>(f: &[T], p: &[T]) -> Result<RegularityCheck> {
    if f.len() != p.len() || f.is_empty() {
        return Err(QdtError::Validation(format!(
            "cannot compare {} utility factors with {} probabilities",
            f.len(),
            p.len()
        )));
    }
    match (unique_argmax(f), unique_argmax(p)) {
        (Some(a), Some(b)) => Ok(RegularityCheck {
            reversal: a != b,
            tie: false,
        }),
        _ => Ok(RegularityCheck {
            reversal: false,
            tie: true,
        }),
    }
}
