//! CSV tables and a plain-text summary of stored records.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use super::record::ExperimentRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// One CSV table per experiment id.
    pub tables: BTreeMap<String, String>,
    pub summary: String,
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => quote(s),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(other) => quote(&other.to_string()),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table(records: &[&ExperimentRecord]) -> String {
    let params: BTreeSet<&String> = records.iter().flat_map(|r| r.params.keys()).collect();
    let measured: BTreeSet<&String> = records.iter().flat_map(|r| r.measured.keys()).collect();
    let mut header: Vec<String> = params.iter().map(|k| format!("param.{k}")).collect();
    header.extend(measured.iter().map(|k| k.to_string()));
    header.extend(["flags".to_string(), "wall_time_s".to_string(), "version".to_string()]);
    let mut out = header.join(",");
    out.push('\n');
    for r in records {
        let mut row: Vec<String> = params.iter().map(|k| cell(r.params.get(*k))).collect();
        row.extend(measured.iter().map(|k| cell(r.measured.get(*k))));
        row.push(quote(&r.flags.join(";")));
        row.push(format!("{}", r.wall_time_s));
        row.push(quote(&r.version));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn headline(r: &ExperimentRecord) -> String {
    let keys = ["slope", "exponent", "a1", "a1_over_weyl", "norm_ratio", "n_doubling_change"];
    keys.iter()
        .filter_map(|k| r.number(k).map(|v| format!("{k}={v:.6e}")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Groups records by experiment id.
pub fn report(records: &[ExperimentRecord]) -> Report {
    let mut groups: BTreeMap<&str, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.experiment.as_str()).or_default().push(r);
    }
    let mut summary = String::new();
    let mut tables = BTreeMap::new();
    for (id, group) in &groups {
        tables.insert(id.to_string(), table(group));
        summary.push_str(&format!("== {id}: {} record(s)\n", group.len()));
        for (i, r) in group.iter().enumerate() {
            summary.push_str(&format!("  [{i}] {}\n", headline(r)));
            if !r.bounds.is_empty() {
                let sides: Vec<String> = r.bounds.iter().map(|(k, v)| format!("{k}: {v} bound")).collect();
                summary.push_str(&format!("      bounds: {}\n", sides.join(", ")));
            }
            if !r.flags.is_empty() {
                summary.push_str(&format!("      flags: {}\n", r.flags.join(", ")));
            }
        }
    }
    Report { tables, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_and_summary() {
        let mut a = ExperimentRecord::new("decay_gauss_sum").param("sweep", vec![3, 5]);
        a.set("slope", -0.5);
        a.bound("quantity", "exact");
        let mut b = ExperimentRecord::new("thm1_scaling").param("N", 64);
        b.set("exponent", 0.25);
        b.flag("n_doubling_moved");
        let rep = report(&[a, b]);
        assert_eq!(rep.tables.len(), 2);
        assert!(rep.tables["decay_gauss_sum"].starts_with("param.sweep,slope,flags"));
        assert!(rep.tables["decay_gauss_sum"].contains("\"[3,5]\",-0.5"));
        assert!(rep.summary.contains("slope=-5.000000e-1"));
        assert!(rep.summary.contains("flags: n_doubling_moved"));
    }
}
