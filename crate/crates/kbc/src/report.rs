//! Metric reports (JSON and TSV) and curve CSVs.
//!
//! Field order is fixed by construction and every metric is printed with
//! four decimals, so equal results serialize to equal bytes.

use kbc_core::eval::{CurvePoint, ErResult, PrResult, TcResult};
use kbc_core::{RelationId, Vocab};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

/// Renders a metric with four decimals; non-finite values become `null`.
pub fn fixed4(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:.4}");
        // Avoid "-0.0000".
        if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
            "0.0000".to_string()
        } else {
            s
        }
    } else {
        "null".to_string()
    }
}

fn raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(fixed4(v)).expect("fixed4 yields a JSON number or null")
}

/// Named metrics in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics(pub Vec<(String, f64)>);

impl Metrics {
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.0.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

impl Serialize for Metrics {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (name, v) in &self.0 {
            m.serialize_entry(name, &raw(*v))?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationRow {
    pub relation: String,
    /// `|T_k|`.
    pub targets: usize,
    pub metrics: Metrics,
}

impl Serialize for RelationRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2 + self.metrics.0.len()))?;
        m.serialize_entry("relation", &self.relation)?;
        m.serialize_entry("targets", &self.targets)?;
        for (name, v) in &self.metrics.0 {
            m.serialize_entry(name, &raw(*v))?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Er,
    Tc,
    Pr,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Er => "er",
            Protocol::Tc => "tc",
            Protocol::Pr => "pr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub protocol: Protocol,
    pub model: String,
    pub dataset: String,
    pub ks: Vec<usize>,
    pub metrics: Metrics,
    pub per_relation: Vec<RelationRow>,
    /// Echo of the run configuration.
    pub config: serde_json::Value,
}

fn relation_name(vocab: &Vocab, k: usize) -> String {
    vocab.relation_name(RelationId(k as u32)).to_string()
}

impl MetricsReport {
    fn empty(protocol: Protocol, model: &str, dataset: &str, ks: Vec<usize>, config: serde_json::Value) -> Self {
        MetricsReport {
            protocol,
            model: model.to_string(),
            dataset: dataset.to_string(),
            ks,
            metrics: Metrics::default(),
            per_relation: Vec::new(),
            config,
        }
    }

    pub fn from_pr(r: &PrResult, vocab: &Vocab, model: &str, dataset: &str, config: serde_json::Value) -> Self {
        let k = r.k;
        let mut out = Self::empty(Protocol::Pr, model, dataset, vec![k], config);
        out.metrics.push(format!("map_at_{k}"), r.map);
        out.metrics.push(format!("hits_at_{k}"), r.hits);
        for rel in &r.relations {
            let mut m = Metrics::default();
            m.push(format!("ap_at_{k}"), rel.ap);
            m.push(format!("hits_at_{k}"), rel.hits);
            m.push("weight", rel.weight);
            out.per_relation.push(RelationRow { relation: relation_name(vocab, rel.relation), targets: rel.targets, metrics: m });
        }
        out
    }

    pub fn from_er(r: &ErResult, vocab: &Vocab, model: &str, dataset: &str, config: serde_json::Value) -> Self {
        let mut out = Self::empty(Protocol::Er, model, dataset, r.ks.clone(), config);
        out.metrics.push("mrr", r.mrr);
        for (k, h) in r.ks.iter().zip(&r.hits) {
            out.metrics.push(format!("hits_at_{k}"), *h);
        }
        for rel in &r.per_relation {
            let mut m = Metrics::default();
            m.push("mrr", rel.mrr);
            for (k, h) in r.ks.iter().zip(&rel.hits) {
                m.push(format!("hits_at_{k}"), *h);
            }
            out.per_relation.push(RelationRow {
                relation: relation_name(vocab, rel.relation),
                targets: rel.questions / 2,
                metrics: m,
            });
        }
        out
    }

    pub fn from_tc(r: &TcResult, vocab: &Vocab, model: &str, dataset: &str, config: serde_json::Value) -> Self {
        let mut out = Self::empty(Protocol::Tc, model, dataset, Vec::new(), config);
        out.metrics.push("accuracy", r.accuracy);
        for rel in &r.per_relation {
            let mut m = Metrics::default();
            m.push("accuracy", rel.accuracy);
            m.push("threshold", rel.threshold.value);
            m.push("valid_accuracy", rel.threshold.valid_accuracy);
            out.per_relation.push(RelationRow {
                relation: relation_name(vocab, rel.relation),
                targets: rel.positives,
                metrics: m,
            });
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// One row per report (model × dataset), one column per global metric in
/// first-seen order; a metric a report lacks is left empty.
pub fn to_tsv(reports: &[MetricsReport]) -> String {
    let mut columns: Vec<&str> = Vec::new();
    for r in reports {
        for (name, _) in &r.metrics.0 {
            if !columns.contains(&name.as_str()) {
                columns.push(name);
            }
        }
    }
    let mut out = String::from("model\tdataset\tprotocol");
    for c in &columns {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for r in reports {
        out.push_str(&format!("{}\t{}\t{}", r.model, r.dataset, r.protocol.name()));
        for c in &columns {
            out.push('\t');
            if let Some(v) = r.metrics.get(c) {
                out.push_str(&fixed4(v));
            }
        }
        out.push('\n');
    }
    out
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("K,hits_at_k,map_at_k\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.k, fixed4(p.hits), fixed4(p.map)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_decimals() {
        assert_eq!(fixed4(0.5), "0.5000");
        assert_eq!(fixed4(1.0 / 3.0), "0.3333");
        assert_eq!(fixed4(-0.00001), "0.0000");
        assert_eq!(fixed4(f64::NAN), "null");
    }

    #[test]
    fn empty_relations_serialize_as_empty_array() {
        let r = MetricsReport::empty(Protocol::Pr, "m", "d", vec![100], serde_json::Value::Null);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["per_relation"], serde_json::json!([]));
    }

    #[test]
    fn metric_order_is_insertion_order() {
        let mut r = MetricsReport::empty(Protocol::Er, "m", "d", vec![], serde_json::Value::Null);
        r.metrics.push("z", 1.0);
        r.metrics.push("a", 0.25);
        let s = r.to_json();
        assert!(s.find("\"z\": 1.0000").unwrap() < s.find("\"a\": 0.2500").unwrap());
    }
}
