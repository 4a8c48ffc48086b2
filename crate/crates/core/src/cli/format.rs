use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use super::{CurveDocument, ReportDocument};
use crate::analysis::{Estimate, Probability};
use crate::qkernel::BellOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, doc: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc)?;
    writeln!(out)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flattens a JSON document into `(dotted.path, value)` rows. Array entries
/// use their index as the path segment; `null` becomes an empty string.
pub fn flatten_json(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        let join = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(&join(k), v, rows)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&join(&i.to_string()), v, rows)),
            other => rows.push((prefix.to_string(), scalar(other))),
        }
    }
    let mut rows = Vec::new();
    walk("", v, &mut rows);
    rows
}

pub fn write_long_csv<T: Serialize>(out: &mut dyn Write, doc: &T) -> io::Result<()> {
    let value = serde_json::to_value(doc)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["field", "value"])?;
    for (k, v) in flatten_json(&value) {
        w.write_record([k, v])?;
    }
    w.flush()
}

pub fn write_curve_csv(out: &mut dyn Write, doc: &CurveDocument) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "exact", "exact_value", "closed_form"])?;
    for row in &doc.rows {
        w.write_record([
            row.n.to_string(),
            row.exact.to_string(),
            row.exact.value().to_string(),
            row.closed_form.map(|c| c.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()
}

fn prob(p: &Probability) -> String {
    format!("{} ({})", p, p.value())
}

fn opt(p: &Option<Probability>) -> String {
    p.as_ref().map(prob).unwrap_or_else(|| "n/a".into())
}

fn estimate(e: &Estimate) -> String {
    format!(
        "{}/{} = {:.6} ± {:.6} [{}]",
        e.count,
        e.total,
        e.rate,
        e.standard_error,
        if e.consistent { "consistent" } else { "OUTSIDE 4σ" }
    )
}

pub fn write_report_table(out: &mut dyn Write, doc: &ReportDocument) -> io::Result<()> {
    let r = &doc.report;
    let s = &r.scenario;
    writeln!(out, "protocol            {}", s.variant)?;
    writeln!(out, "attack              {}", s.attack)?;
    writeln!(out, "distribution        {}", s.distribution)?;
    writeln!(out, "rounds              {} ({} compared)", r.rounds, r.compared_rounds)?;
    writeln!(out)?;
    writeln!(out, "per-round detection {}", prob(&r.exact.detection))?;
    writeln!(out, "  without H         {}", opt(&r.exact.detection_without_h))?;
    writeln!(out, "  with H            {}", opt(&r.exact.detection_with_h))?;
    writeln!(out, "Eve key agreement   {}", opt(&r.exact.eve_agreement))?;
    writeln!(out, "session detection   {}", prob(&r.p_detect_session))?;
    match r.closed_form_reference {
        Some(c) => writeln!(out, "closed form         {c}")?,
        None => writeln!(out, "closed form         n/a")?,
    }
    writeln!(out, "branches            {}", r.exact.branches)?;
    if let Some(mc) = &r.monte_carlo {
        writeln!(out)?;
        writeln!(out, "Monte Carlo         {} sessions, seed {}", mc.trials, mc.seed)?;
        writeln!(out, "  session detection {}", estimate(&mc.session_detection))?;
        writeln!(out, "  round detection   {}", estimate(&mc.round_detection))?;
        if let Some(e) = &mc.eve_agreement {
            writeln!(out, "  Eve agreement     {}", estimate(e))?;
        }
    }
    writeln!(out)?;
    writeln!(out, "joint (Alice, Bob) outcome probabilities")?;
    for t in &doc.correlation_tables {
        let h = match t.hadamard {
            Some(true) => ", H",
            Some(false) => ", no H",
            None => "",
        };
        writeln!(out, "  sigma_A = {}{h}", t.alice_pauli)?;
        write!(out, "    {:<6}", "")?;
        for b in BellOutcome::ALL {
            write!(out, "{:>7}", b.symbol())?;
        }
        writeln!(out)?;
        for a in BellOutcome::ALL {
            write!(out, "    {:<6}", a.symbol())?;
            for b in BellOutcome::ALL {
                write!(out, "{:>7}", t.get(a, b).to_string())?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_curve_table(out: &mut dyn Write, doc: &CurveDocument) -> io::Result<()> {
    writeln!(
        out,
        "{} / {} / {}",
        doc.scenario.variant, doc.scenario.attack, doc.scenario.distribution
    )?;
    writeln!(out, "{:>4}  {:>22}  {:>22}", "n", "exact", "closed form")?;
    for row in &doc.rows {
        let cf = row
            .closed_form
            .map(|c| format!("{c:.16}"))
            .unwrap_or_else(|| "n/a".into());
        writeln!(out, "{:>4}  {:>22.16}  {:>22}", row.n, row.exact.value(), cf)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let v = json!({"a": {"b": 1, "c": [true, null]}, "d": "x"});
        assert_eq!(
            flatten_json(&v),
            vec![
                ("a.b".to_string(), "1".to_string()),
                ("a.c.0".to_string(), "true".to_string()),
                ("a.c.1".to_string(), String::new()),
                ("d".to_string(), "x".to_string()),
            ]
        );
    }
}
