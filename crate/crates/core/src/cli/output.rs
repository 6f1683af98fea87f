//! CSV and JSON emission of result tables, and parsing them back.
//!
//! CSV layout: a `#` header block (`# key: value` lines) followed by a
//! header row `label,<numeric columns>,error`. Numbers use Rust's shortest
//! round-trip formatting, so re-parsing returns identical bits.

use std::io::Write;

use super::sweep::{ConfigStamp, ResultTable, Row, TableMeta};
use crate::error::{Error, Result};

pub fn write_csv(table: &ResultTable, mut out: impl Write) -> Result<()> {
    writeln!(out, "# risfso {}", table.meta.version)?;
    writeln!(out, "# command: {}", table.meta.command)?;
    for c in &table.meta.configs {
        writeln!(out, "# curve: {}", c.label)?;
        writeln!(out, "# config_sha256: {}", c.sha256)?;
        writeln!(out, "# seed: {}", c.seed)?;
        writeln!(out, "# config: {}", c.config)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label"];
    header.extend(table.columns.iter().map(String::as_str));
    header.push("error");
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![row.label.clone()];
        rec.extend(row.values.iter().map(|v| v.map(|x| format!("{x:?}")).unwrap_or_default()));
        rec.push(row.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(table: &ResultTable) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn parse_meta(lines: &[&str]) -> Result<TableMeta> {
    let mut version = None;
    let mut command = String::new();
    let mut configs: Vec<ConfigStamp> = vec![];
    for line in lines {
        let body = line.trim_start_matches('#').trim_start();
        if let Some(v) = body.strip_prefix("risfso ") {
            version = Some(v.trim().to_string());
            continue;
        }
        let (key, value) = body
            .split_once(": ")
            .ok_or_else(|| Error::Parse(format!("header line {line:?}")))?;
        let current = configs.last_mut();
        match (key, current) {
            ("command", _) => command = value.to_string(),
            ("curve", _) => configs.push(ConfigStamp {
                label: value.to_string(),
                sha256: String::new(),
                seed: 0,
                config: String::new(),
            }),
            ("config_sha256", Some(c)) => c.sha256 = value.to_string(),
            ("seed", Some(c)) => {
                c.seed = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("seed {value:?}")))?
            }
            ("config", Some(c)) => c.config = value.to_string(),
            _ => return Err(Error::Parse(format!("unexpected header line {line:?}"))),
        }
    }
    Ok(TableMeta {
        version: version.ok_or_else(|| Error::Parse("missing version line".into()))?,
        command,
        configs,
    })
}

pub fn read_csv(text: &str) -> Result<ResultTable> {
    let header_lines: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    let meta = parse_meta(&header_lines)?;
    let body: String = text
        .lines()
        .skip(header_lines.len())
        .flat_map(|l| [l, "\n"])
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers()?.clone();
    let n = header.len();
    if n < 2 || &header[0] != "label" || &header[n - 1] != "error" {
        return Err(Error::Parse("header must start with label and end with error".into()));
    }
    let columns: Vec<String> = header.iter().skip(1).take(n - 2).map(String::from).collect();
    let mut rows = vec![];
    for rec in r.records() {
        let rec = rec?;
        let mut values = Vec::with_capacity(n - 2);
        for cell in rec.iter().skip(1).take(n - 2) {
            values.push(if cell.is_empty() {
                None
            } else {
                Some(
                    cell.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("number {cell:?}")))?,
                )
            });
        }
        let error = &rec[n - 1];
        rows.push(Row {
            label: rec[0].to_string(),
            values,
            error: (!error.is_empty()).then(|| error.to_string()),
        });
    }
    Ok(ResultTable { meta, columns, rows })
}

pub fn to_json_string(table: &ResultTable) -> String {
    serde_json::to_string_pretty(table).expect("table serializes")
}

pub fn read_json(text: &str) -> Result<ResultTable> {
    Ok(serde_json::from_str(text)?)
}
