//! Reverberation and intelligibility thresholds for common space types.

use serde::{Deserialize, Serialize};

pub const PROXY_ADVISORY: &str = "proxy-based";
pub const STI_UNAVAILABLE: &str = "sti-unavailable";
pub const RT60_UNAVAILABLE: &str = "rt60-unavailable";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceRule {
    pub space_type: String,
    pub standard: Option<String>,
    pub rt60_min_s: Option<f64>,
    pub rt60_max_s: Option<f64>,
    pub sti_min: Option<f64>,
}

impl ComplianceRule {
    fn new(
        space_type: &str,
        standard: Option<&str>,
        rt60: (Option<f64>, Option<f64>),
        sti_min: Option<f64>,
    ) -> Self {
        Self {
            space_type: space_type.into(),
            standard: standard.map(Into::into),
            rt60_min_s: rt60.0,
            rt60_max_s: rt60.1,
            sti_min,
        }
    }

    pub fn has_rt60_threshold(&self) -> bool {
        self.rt60_min_s.is_some() || self.rt60_max_s.is_some()
    }
}

/// The ten built-in rules.
pub fn builtin_rules() -> Vec<ComplianceRule> {
    let max = |t| (None, Some(t));
    let range = |lo, hi| (Some(lo), Some(hi));
    vec![
        ComplianceRule::new("Classroom", Some("ANSI S12.60"), max(0.6), Some(0.60)),
        ComplianceRule::new("Open Office", Some("ISO 3382-3"), max(0.8), Some(0.50)),
        ComplianceRule::new("Private Office", None, max(0.6), Some(0.55)),
        ComplianceRule::new("Hospital Ward", None, max(0.8), Some(0.60)),
        ComplianceRule::new("Concert Hall", None, range(1.5, 2.5), None),
        ComplianceRule::new("Lecture Hall", None, max(1.0), Some(0.55)),
        ComplianceRule::new("Recording Studio", None, max(0.4), None),
        ComplianceRule::new("Worship Space", None, range(1.2, 3.0), None),
        ComplianceRule::new("Restaurant", None, max(0.9), None),
        ComplianceRule::new("Conference Room", None, max(0.7), Some(0.55)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceMetrics {
    pub rt60_s: Option<f64>,
    /// Which decay estimate supplied `rt60_s`, e.g. "T30".
    pub rt60_estimate: Option<String>,
    pub sti: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceOutcome {
    pub rule: ComplianceRule,
    pub measured: ComplianceMetrics,
    pub rt60_pass: Option<bool>,
    pub sti_pass: Option<bool>,
    pub overall: Verdict,
    pub advisory_flags: Vec<String>,
}

/// Compares the metrics against every threshold of `rule`. Boundaries are
/// inclusive. A threshold whose metric is missing is skipped and flagged;
/// the verdict is not-applicable only when nothing could be compared.
pub fn check(metrics: &ComplianceMetrics, rule: &ComplianceRule) -> ComplianceOutcome {
    let mut advisory_flags = Vec::new();
    let rt60_pass = if rule.has_rt60_threshold() {
        match metrics.rt60_s {
            Some(t) => Some(
                rule.rt60_min_s.is_none_or(|lo| t >= lo) && rule.rt60_max_s.is_none_or(|hi| t <= hi),
            ),
            None => {
                advisory_flags.push(RT60_UNAVAILABLE.to_string());
                None
            }
        }
    } else {
        None
    };
    let sti_pass = rule.sti_min.and_then(|min| {
        advisory_flags.push(PROXY_ADVISORY.to_string());
        match metrics.sti {
            Some(s) => Some(s >= min),
            None => {
                advisory_flags.push(STI_UNAVAILABLE.to_string());
                None
            }
        }
    });
    let evaluated: Vec<bool> = [rt60_pass, sti_pass].into_iter().flatten().collect();
    let overall = if evaluated.is_empty() {
        Verdict::NotApplicable
    } else if evaluated.iter().all(|&p| p) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    ComplianceOutcome {
        rule: rule.clone(),
        measured: metrics.clone(),
        rt60_pass,
        sti_pass,
        overall,
        advisory_flags,
    }
}

/// One outcome per built-in rule.
pub fn check_all(metrics: &ComplianceMetrics) -> Vec<ComplianceOutcome> {
    builtin_rules().iter().map(|r| check(metrics, r)).collect()
}
