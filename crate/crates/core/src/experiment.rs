//! Experiment files, run records and report rendering.
//!
//! An experiment file is a TOML document:
//!
//! ```toml
//! name = "microwave ovens"
//! attractiveness_rank = ["A", "B"]   # most attractive first
//!
//! [[prospects]]
//! id = "A"
//! f = 0.4            # or `utility = ...`, or `lottery = { payoffs = [...], probs = [...] }`
//!
//! [[prospects]]
//! id = "B"
//! f = 0.6
//!
//! [[empirical]]      # optional observed choice frequencies
//! id = "A"
//! frequency = 0.61
//!
//! [config]           # optional, used when utilities are given
//! alpha = 1.0
//! gamma = 1.0
//! utility_kind = "linear"   # or "power" with `utility_exponent`
//! ```
//!
//! All prospects must use the same form (`f`, `utility` or `lottery`).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attraction::AttractionSet;
use crate::decision::{
    compose_probabilities, predict_decoy, score_against_empirical, ChoiceSet, DecoyMode,
    ErrorSummary, PredictionReport, ReportRow, EMPIRICAL_SUM_TOL, SUM_TOL,
};
use crate::error::{QdtError, Result};
use crate::exact::{exact_from_f64, format_exact, parse_exact, to_f64, Exact};
use crate::priors::{expected_utility, utility_factors, Lottery, UtilityFactorConfig, UtilityFunction};
use crate::simulate::SweepRow;
use crate::verify::VerifyOutcome;

/// Experiment files shipped with the crate, by file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("microwave.exp", include_str!("../data/microwave.exp")),
    ("frogs.exp", include_str!("../data/frogs.exp")),
];

/// Looks up a bundled experiment by file name, with or without the `.exp` suffix
/// and ignoring any leading directories.
pub fn bundled(name: &str) -> Option<&'static str> {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    let base = base.strip_suffix(".exp").unwrap_or(base);
    BUNDLED
        .iter()
        .find(|(n, _)| n.strip_suffix(".exp") == Some(base))
        .map(|(_, text)| *text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub name: String,
    pub prospects: Vec<ProspectEntry>,
    pub attractiveness_rank: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Vec<EmpiricalEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProspectEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lottery: Option<LotteryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LotteryEntry {
    pub payoffs: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalEntry {
    pub id: String,
    pub frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Linear,
    Power,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_kind: Option<UtilityKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ProspectForm {
    Factor,
    Utility,
    Lottery,
}

impl ProspectForm {
    fn field(self) -> &'static str {
        match self {
            Self::Factor => "f",
            Self::Utility => "utility",
            Self::Lottery => "lottery",
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> QdtError {
    QdtError::Validation(format!("{field}: {msg}"))
}

impl ExperimentFile {
    /// Parses and validates an experiment document.
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = toml::from_str(text).map_err(|e| QdtError::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    fn form(&self) -> Result<ProspectForm> {
        let mut form = None;
        for (i, p) in self.prospects.iter().enumerate() {
            let given: Vec<ProspectForm> = [
                p.f.map(|_| ProspectForm::Factor),
                p.utility.map(|_| ProspectForm::Utility),
                p.lottery.as_ref().map(|_| ProspectForm::Lottery),
            ]
            .into_iter()
            .flatten()
            .collect();
            let this = match given.as_slice() {
                [one] => *one,
                [] => {
                    return Err(invalid(
                        &format!("prospects[{i}]"),
                        "needs one of `f`, `utility` or `lottery`",
                    ))
                }
                _ => {
                    return Err(invalid(
                        &format!("prospects[{i}]"),
                        "give only one of `f`, `utility` or `lottery`",
                    ))
                }
            };
            match form {
                None => form = Some(this),
                Some(f) if f != this => {
                    return Err(invalid(
                        &format!("prospects[{i}].{}", this.field()),
                        format!("all prospects must use `{}`, not a mix", f.field()),
                    ))
                }
                _ => {}
            }
        }
        form.ok_or_else(|| invalid("prospects", "at least one prospect is required"))
    }

    pub fn validate(&self) -> Result<()> {
        let form = self.form()?;
        let ids: Vec<&str> = self.prospects.iter().map(|p| p.id.as_str()).collect();
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() {
                return Err(invalid(&format!("prospects[{i}].id"), "must not be empty"));
            }
            if ids[..i].contains(id) {
                return Err(invalid(&format!("prospects[{i}].id"), format!("duplicate id '{id}'")));
            }
        }

        if form == ProspectForm::Factor {
            let mut total = 0.0;
            for (i, p) in self.prospects.iter().enumerate() {
                let f = p.f.unwrap_or_default();
                if !(0.0..=1.0).contains(&f) {
                    return Err(invalid(&format!("prospects[{i}].f"), format!("{f} is outside [0, 1]")));
                }
                total += f;
            }
            if (total - 1.0).abs() > SUM_TOL {
                return Err(invalid("prospects.f", format!("values sum to {total}, expected 1")));
            }
        }
        for (i, p) in self.prospects.iter().enumerate() {
            if let Some(u) = p.utility {
                if !u.is_finite() {
                    return Err(invalid(&format!("prospects[{i}].utility"), "must be finite"));
                }
            }
            if let Some(l) = &p.lottery {
                Lottery::new(l.payoffs.clone(), l.probs.clone())
                    .map_err(|e| invalid(&format!("prospects[{i}].lottery"), e))?;
            }
        }

        if self.attractiveness_rank.len() != ids.len() {
            return Err(invalid(
                "attractiveness_rank",
                format!("lists {} ids for {} prospects", self.attractiveness_rank.len(), ids.len()),
            ));
        }
        for (i, id) in self.attractiveness_rank.iter().enumerate() {
            if !ids.contains(&id.as_str()) {
                return Err(invalid(&format!("attractiveness_rank[{i}]"), format!("unknown id '{id}'")));
            }
            if self.attractiveness_rank[..i].contains(id) {
                return Err(invalid(&format!("attractiveness_rank[{i}]"), format!("'{id}' listed twice")));
            }
        }

        if let Some(emp) = &self.empirical {
            if emp.len() != ids.len() {
                return Err(invalid(
                    "empirical",
                    format!("{} entries for {} prospects", emp.len(), ids.len()),
                ));
            }
            let mut total = 0.0;
            for (i, e) in emp.iter().enumerate() {
                if !ids.contains(&e.id.as_str()) {
                    return Err(invalid(&format!("empirical[{i}].id"), format!("unknown id '{}'", e.id)));
                }
                if emp[..i].iter().any(|x| x.id == e.id) {
                    return Err(invalid(&format!("empirical[{i}].id"), format!("'{}' listed twice", e.id)));
                }
                if !(e.frequency >= 0.0 && e.frequency.is_finite()) {
                    return Err(invalid(&format!("empirical[{i}].frequency"), "must be nonnegative"));
                }
                total += e.frequency;
            }
            if (total - 1.0).abs() > EMPIRICAL_SUM_TOL {
                return Err(invalid("empirical.frequency", format!("values sum to {total}, expected 1")));
            }
        }

        if let Some(cfg) = &self.config {
            for (name, v) in [("alpha", cfg.alpha), ("gamma", cfg.gamma), ("utility_exponent", cfg.utility_exponent)] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(invalid(&format!("config.{name}"), format!("{v} must be positive")));
                    }
                }
            }
            if cfg.utility_exponent.is_some() && cfg.utility_kind != Some(UtilityKind::Power) {
                return Err(invalid("config.utility_exponent", "only applies to utility_kind = \"power\""));
            }
        }
        Ok(())
    }

    pub fn factor_config(&self) -> Result<UtilityFactorConfig> {
        let cfg = self.config.clone().unwrap_or_default();
        UtilityFactorConfig::new(cfg.alpha.unwrap_or(1.0), cfg.gamma.unwrap_or(1.0))
    }

    pub fn utility_function(&self) -> Result<UtilityFunction> {
        let cfg = self.config.clone().unwrap_or_default();
        match cfg.utility_kind.unwrap_or(UtilityKind::Linear) {
            UtilityKind::Linear => Ok(UtilityFunction::Linear),
            UtilityKind::Power => UtilityFunction::power(cfg.utility_exponent.unwrap_or(1.0)),
        }
    }

    /// Utility factors in prospect order, computed from utilities when needed.
    pub fn utility_factors(&self) -> Result<Vec<Exact>> {
        let raw: Vec<f64> = match self.form()? {
            ProspectForm::Factor => self.prospects.iter().map(|p| p.f.unwrap_or_default()).collect(),
            ProspectForm::Utility => {
                let u: Vec<f64> = self.prospects.iter().map(|p| p.utility.unwrap_or_default()).collect();
                utility_factors(&u, &self.factor_config()?)?.into_vec()
            }
            ProspectForm::Lottery => {
                let uf = self.utility_function()?;
                let mut u = Vec::with_capacity(self.prospects.len());
                for p in &self.prospects {
                    let l = p.lottery.as_ref().expect("form checked");
                    u.push(expected_utility(&Lottery::new(l.payoffs.clone(), l.probs.clone())?, &uf));
                }
                utility_factors(&u, &self.factor_config()?)?.into_vec()
            }
        };
        raw.into_iter().map(exact_from_f64).collect()
    }

    pub fn choice_set(&self) -> Result<ChoiceSet> {
        let ids = self.prospects.iter().map(|p| p.id.clone()).collect();
        ChoiceSet::from_exact(ids, self.utility_factors()?, &self.attractiveness_rank)
    }

    /// Observed frequencies reordered to match the prospects.
    pub fn empirical_exact(&self) -> Result<Option<Vec<Exact>>> {
        let Some(emp) = &self.empirical else {
            return Ok(None);
        };
        self.prospects
            .iter()
            .map(|p| {
                let e = emp
                    .iter()
                    .find(|e| e.id == p.id)
                    .ok_or_else(|| invalid("empirical", format!("missing id '{}'", p.id)))?;
                exact_from_f64(e.frequency)
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Composes probabilities and scores them when frequencies are present.
    pub fn predict(&self, mode: DecoyMode) -> Result<PredictionReport> {
        let cs = self.choice_set()?;
        let report = match mode {
            DecoyMode::Excluded => compose_probabilities(&cs)?,
            DecoyMode::Included => predict_decoy(&cs, mode)?,
        };
        match self.empirical_exact()? {
            Some(p_exp) => score_against_empirical(&report, &p_exp),
            None => Ok(report),
        }
    }
}

/// SHA-256 of the input, hex encoded.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub id: String,
    pub f: f64,
    pub q: f64,
    pub p: f64,
    pub p_exp: Option<f64>,
    pub abs_error: Option<f64>,
    pub f_exact: String,
    pub q_exact: String,
    pub p_exact: String,
    pub p_exp_exact: Option<String>,
    pub abs_error_exact: Option<String>,
}

/// Serializable form of a [`PredictionReport`], carrying floats and exact rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub experiment: Option<String>,
    pub decoy_mode: String,
    pub rows: Vec<RowRecord>,
    pub clamping_applied: bool,
    pub max_abs_error: Option<f64>,
    pub mean_abs_error: Option<f64>,
    pub max_abs_error_exact: Option<String>,
    pub mean_abs_error_exact: Option<String>,
}

fn parse_field(text: &str, what: &str) -> Result<Exact> {
    parse_exact(text).ok_or_else(|| QdtError::Parse(format!("{what}: '{text}' is not a rational")))
}

impl ReportRecord {
    pub fn from_report(report: &PredictionReport, experiment: Option<&str>, mode: DecoyMode) -> Self {
        let rows = report
            .rows
            .iter()
            .map(|r| RowRecord {
                id: r.id.clone(),
                f: to_f64(&r.f),
                q: to_f64(&r.q),
                p: to_f64(&r.p),
                p_exp: r.p_exp.as_ref().map(to_f64),
                abs_error: r.abs_error.as_ref().map(to_f64),
                f_exact: format_exact(&r.f),
                q_exact: format_exact(&r.q),
                p_exact: format_exact(&r.p),
                p_exp_exact: r.p_exp.as_ref().map(format_exact),
                abs_error_exact: r.abs_error.as_ref().map(format_exact),
            })
            .collect();
        let e = report.errors.as_ref();
        Self {
            experiment: experiment.map(str::to_owned),
            decoy_mode: match mode {
                DecoyMode::Excluded => "excluded".into(),
                DecoyMode::Included => "included".into(),
            },
            rows,
            clamping_applied: report.clamping_applied,
            max_abs_error: e.map(|e| to_f64(&e.max_abs_error)),
            mean_abs_error: e.map(|e| to_f64(&e.mean_abs_error)),
            max_abs_error_exact: e.map(|e| format_exact(&e.max_abs_error)),
            mean_abs_error_exact: e.map(|e| format_exact(&e.mean_abs_error)),
        }
    }

    /// Rebuilds the exact report from its serialized form and re-checks its invariants.
    pub fn to_report(&self) -> Result<PredictionReport> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            rows.push(ReportRow {
                id: r.id.clone(),
                f: parse_field(&r.f_exact, "f_exact")?,
                q: parse_field(&r.q_exact, "q_exact")?,
                p: parse_field(&r.p_exact, "p_exact")?,
                p_exp: r.p_exp_exact.as_deref().map(|t| parse_field(t, "p_exp_exact")).transpose()?,
                abs_error: r
                    .abs_error_exact
                    .as_deref()
                    .map(|t| parse_field(t, "abs_error_exact"))
                    .transpose()?,
            });
        }
        let errors = match (&self.max_abs_error_exact, &self.mean_abs_error_exact) {
            (Some(max), Some(mean)) => Some(ErrorSummary {
                max_abs_error: parse_field(max, "max_abs_error_exact")?,
                mean_abs_error: parse_field(mean, "mean_abs_error_exact")?,
            }),
            _ => None,
        };
        let report = PredictionReport {
            rows,
            clamping_applied: self.clamping_applied,
            errors,
        };
        report.validate()?;
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractionSetRecord {
    pub n_prospects: usize,
    pub values: Vec<f64>,
    pub values_exact: Vec<String>,
    pub gap: f64,
    pub gap_exact: String,
    pub q_max: f64,
    pub q_max_exact: String,
}

impl AttractionSetRecord {
    pub fn from_set(set: &AttractionSet) -> Self {
        let r2f = crate::attraction::rational_to_f64;
        Self {
            n_prospects: set.n_prospects(),
            values: set.values_f64(),
            values_exact: set.values().iter().map(|v| v.to_string()).collect(),
            gap: r2f(&set.gap()),
            gap_exact: set.gap().to_string(),
            q_max: r2f(&set.q_max()),
            q_max_exact: set.q_max().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunResult {
    Prediction(ReportRecord),
    AttractionSet(AttractionSetRecord),
    Verification(VerifyOutcome),
    Simulation { rows: Vec<SweepRow> },
}

/// One machine-readable record per run.
///
/// `timestamp` (Unix seconds) is only filled in on request, so identical
/// inputs and seeds reproduce byte-identical records by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp: Option<u64>,
    pub command: String,
    pub input_digest: Option<String>,
    pub seeds: Vec<u64>,
    pub result: RunResult,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("run records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QdtError::Parse(e.to_string()))
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Flat table with header `id,f,q,p,p_exp,abs_error`.
pub fn render_csv(record: &ReportRecord) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| QdtError::Parse(e.to_string());
    w.write_record(["id", "f", "q", "p", "p_exp", "abs_error"]).map_err(io)?;
    for r in &record.rows {
        w.write_record([
            r.id.clone(),
            r.f.to_string(),
            r.q.to_string(),
            r.p.to_string(),
            opt(r.p_exp),
            opt(r.abs_error),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| QdtError::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Human-readable prediction table.
pub fn render_table(record: &ReportRecord) -> String {
    let mut out = String::new();
    if let Some(name) = &record.experiment {
        out.push_str(&format!("experiment: {name}\n"));
    }
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}   {}\n",
        "id", "f", "q", "p", "p_exp", "abs_error", "p (exact)"
    ));
    for r in &record.rows {
        out.push_str(&format!(
            "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}   {}\n",
            r.id,
            fmt6(r.f),
            fmt6(r.q),
            fmt6(r.p),
            r.p_exp.map(fmt6).unwrap_or_else(|| "-".into()),
            r.abs_error.map(fmt6).unwrap_or_else(|| "-".into()),
            r.p_exact
        ));
    }
    if let (Some(max), Some(mean)) = (record.max_abs_error, record.mean_abs_error) {
        out.push_str(&format!("max abs error: {}  mean abs error: {}\n", fmt6(max), fmt6(mean)));
    }
    if record.clamping_applied {
        out.push_str("note: attraction factors were clamped to keep p within [0, 1]\n");
    }
    out
}

fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
