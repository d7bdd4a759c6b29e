//! JSON expression files and CSV value tables.
//!
//! An expression file is either a bare expression tree
//! (`{"node": "sin", "child": {"node": "identity"}}`) or an object
//! `{"domain": "half_line", "components": [ ... ]}` for vector-valued
//! functions. Sampled tables are CSV with a `t` column followed by one
//! `value` column (scalar) or `value_0, value_1, …`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::handle::{FunctionHandle, GridSpec, TimeDomain};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprFile {
    #[serde(default = "default_domain")]
    pub domain: TimeDomain,
    pub components: Vec<Expr>,
}

fn default_domain() -> TimeDomain {
    TimeDomain::HalfLine
}

/// Parses an expression document. Schema errors are reported with the
/// line of the innermost offending object.
pub fn parse_expr_document(text: &str) -> Result<FunctionHandle> {
    let probe: serde_json::Value = serde_json::from_str(text)?;
    let parsed = if probe.get("components").is_some() {
        serde_json::from_value::<ExprFile>(probe.clone())
    } else {
        serde_json::from_value::<Expr>(probe.clone()).map(|e| ExprFile { domain: default_domain(), components: vec![e] })
    };
    let file = parsed.map_err(|e| anchor_error(text, &probe, e))?;
    FunctionHandle::closed_form(file.domain, file.components)
}

/// Line numbers of every `{` outside string literals, in document order.
fn object_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let (mut line, mut in_string, mut escaped) = (1, false, false);
    for c in text.chars() {
        match c {
            '\n' => line += 1,
            _ if in_string && escaped => escaped = false,
            '\\' if in_string => escaped = true,
            '"' => in_string = !in_string,
            '{' if !in_string => lines.push(line),
            _ => {}
        }
    }
    lines
}

fn preorder_objects<'a>(v: &'a serde_json::Value, out: &mut Vec<&'a serde_json::Value>) {
    match v {
        serde_json::Value::Object(map) => {
            out.push(v);
            map.values().for_each(|c| preorder_objects(c, out));
        }
        serde_json::Value::Array(items) => items.iter().for_each(|c| preorder_objects(c, out)),
        _ => {}
    }
}

/// The last object in document order that fails to parse as an expression
/// has no failing descendants, so it is where the schema error lives.
fn anchor_error(text: &str, probe: &serde_json::Value, err: serde_json::Error) -> LabError {
    let mut objects = Vec::new();
    preorder_objects(probe, &mut objects);
    let lines = object_lines(text);
    let culprit = objects.iter().enumerate().rev().find_map(|(i, o)| serde_json::from_value::<Expr>((*o).clone()).err().map(|e| (i, e)));
    match culprit {
        Some((i, e)) if lines.len() == objects.len() && i > 0 => LabError::Parse(format!("line {}: {e}", lines[i])),
        _ => LabError::Parse(format!("line {}: {err}", lines.first().copied().unwrap_or(1))),
    }
}

pub fn load_expr_file(path: &Path) -> Result<FunctionHandle> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("expr").to_string();
    parse_expr_document(&text)
        .map_err(|e| match e {
            LabError::Parse(msg) => LabError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
        .map(|h| h.with_name(name))
}

/// Writes the value table of a sampled handle.
pub fn write_sampled_csv<W: Write>(handle: &FunctionHandle, out: W) -> Result<()> {
    let (grid, values) = handle.samples().ok_or_else(|| LabError::Unsupported("CSV export needs a sampled handle".into()))?;
    let dim = handle.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    if dim == 1 {
        header.push("value".into());
    } else {
        header.extend((0..dim).map(|k| format!("value_{k}")));
    }
    w.write_record(&header)?;
    for (i, row) in values.chunks(dim).enumerate() {
        let mut rec = vec![format!("{}", grid.node(i))];
        rec.extend(row.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a uniformly spaced table back into a sampled handle.
pub fn read_sampled_csv<R: Read>(input: R, domain: TimeDomain) -> Result<FunctionHandle> {
    let mut r = csv::Reader::from_reader(input);
    let dim = r
        .headers()?
        .len()
        .checked_sub(1)
        .filter(|d| *d > 0)
        .ok_or_else(|| LabError::Parse("CSV needs a t column and at least one value column".into()))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| LabError::Parse(format!("line {}: bad number {s:?}", line + 2)))
        };
        if rec.len() != dim + 1 {
            return Err(LabError::Parse(format!("line {}: expected {} fields", line + 2, dim + 1)));
        }
        times.push(parse(&rec[0])?);
        for k in 0..dim {
            values.push(parse(&rec[k + 1])?);
        }
    }
    if times.len() < 2 {
        return Err(LabError::Parse("CSV needs at least two rows".into()));
    }
    let step = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    for (i, t) in times.iter().enumerate() {
        let expected = times[0] + i as f64 * step;
        if (t - expected).abs() > 1e-7 * step.max(1.0) {
            return Err(LabError::Parse(format!("line {}: time {t} breaks the uniform grid", i + 2)));
        }
    }
    let grid = GridSpec::with_nodes(times[0], step, times.len())?;
    FunctionHandle::sampled(domain, grid, dim, values)
}

pub fn load_sampled_csv(path: &Path, domain: TimeDomain) -> Result<FunctionHandle> {
    let file = std::fs::File::open(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sampled").to_string();
    Ok(read_sampled_csv(file, domain)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::builders;

    #[test]
    fn csv_round_trip() {
        let f = builders::sin().resample(GridSpec::new(0.0, 2.0, 0.25).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_sampled_csv(&f, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,value\n"));
        let g = read_sampled_csv(buf.as_slice(), TimeDomain::HalfLine).unwrap();
        for t in [0.0, 0.3, 1.9] {
            assert_eq!(f.eval_scalar(t).unwrap(), g.eval_scalar(t).unwrap());
        }
    }

    #[test]
    fn missing_node_field_reports_line() {
        let text = "{\n  \"node\": \"sin\",\n  \"child\": {\n    \"value\": 1.0\n  }\n}";
        let err = parse_expr_document(text).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn vector_document() {
        let text = r#"{"domain": "full_line", "components": [{"node": "cos", "child": {"node": "identity"}},
                       {"node": "sin", "child": {"node": "identity"}}]}"#;
        let f = parse_expr_document(text).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.domain(), TimeDomain::FullLine);
        assert_eq!(f.evaluate(0.0).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn invalid_quotient_rejected_at_load() {
        let text = r#"{"node": "quotient", "num": {"node": "constant", "value": 1.0}, "den": {"node": "identity"}}"#;
        assert!(matches!(parse_expr_document(text), Err(LabError::Domain(_))));
    }
}
