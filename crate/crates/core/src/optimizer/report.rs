use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CountReport};

/// One rewrite rule and how often it fired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewrite {
    pub rule: String,
    pub count: usize,
}

/// Gate counts before and after a pass plus the rewrites it applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassReport {
    pub pass: String,
    pub before: CountReport,
    pub after: CountReport,
    pub rewrites: Vec<Rewrite>,
}

impl PassReport {
    pub fn fired(&self, rule: &str) -> usize {
        self.rewrites.iter().filter(|r| r.rule == rule).map(|r| r.count).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Default)]
pub(crate) struct Tally(BTreeMap<String, usize>);

impl Tally {
    pub(crate) fn add(&mut self, rule: &str, n: usize) {
        if n > 0 {
            *self.0.entry(rule.to_string()).or_insert(0) += n;
        }
    }

    pub(crate) fn bump(&mut self, rule: &str) {
        self.add(rule, 1);
    }

    pub(crate) fn absorb(&mut self, prefix: &str, report: &PassReport) {
        for r in &report.rewrites {
            self.add(&format!("{prefix}: {}", r.rule), r.count);
        }
    }

    pub(crate) fn finish(self, pass: &str, before: &Circuit, after: &Circuit) -> PassReport {
        PassReport {
            pass: pass.to_string(),
            before: before.counts(),
            after: after.counts(),
            rewrites: self.0.into_iter().map(|(rule, count)| Rewrite { rule, count }).collect(),
        }
    }
}
