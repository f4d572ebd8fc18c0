//! Result serialization: TSV, SPARQL-results-style JSON, and an aligned
//! table for terminals. Output is byte-stable for identical inputs.

use serde_json::{json, Map, Value as Json};

use crate::query::exec::ResultTable;
use crate::term::{Literal, PrefixMap, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Tsv,
    Json,
    Pretty,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            "pretty" => Ok(OutputFormat::Pretty),
            other => Err(format!("unknown format '{other}' (expected tsv, json, or pretty)")),
        }
    }
}

pub fn serialize_results(
    table: &ResultTable,
    format: OutputFormat,
    prefixes: &PrefixMap,
) -> String {
    match format {
        OutputFormat::Tsv => to_tsv(table, prefixes),
        OutputFormat::Json => to_json(table),
        OutputFormat::Pretty => to_pretty(table, prefixes),
    }
}

fn cell_text(cell: &Option<Value>, prefixes: &PrefixMap) -> String {
    match cell {
        None => String::new(),
        Some(value) => value.display(prefixes),
    }
}

fn to_tsv(table: &ResultTable, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    let header: Vec<String> = table.header.iter().map(|h| format!("?{h}")).collect();
    out.push_str(&header.join("\t"));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| cell_text(c, prefixes)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

/// `{"head":{"vars":[...]},"results":{"bindings":[...]}}`; a binding object
/// omits variables that are unbound in that row. IRIs appear expanded;
/// non-string literals carry their XSD datatype.
fn to_json(table: &ResultTable) -> String {
    let bindings: Vec<Json> = table
        .rows
        .iter()
        .map(|row| {
            let mut object = Map::new();
            for (var, cell) in table.header.iter().zip(row) {
                if let Some(value) = cell {
                    object.insert(var.clone(), json_term(value));
                }
            }
            Json::Object(object)
        })
        .collect();
    let doc = json!({
        "head": { "vars": table.header },
        "results": { "bindings": bindings },
    });
    serde_json::to_string_pretty(&doc).expect("results serialize")
}

fn json_term(value: &Value) -> Json {
    match value {
        Value::Iri(iri) => json!({ "type": "uri", "value": iri.as_str() }),
        Value::Literal(lit) => {
            let mut object = Map::new();
            object.insert("type".into(), Json::String("literal".into()));
            object.insert("value".into(), Json::String(lit.lexical()));
            if !matches!(lit, Literal::String(_)) {
                object.insert(
                    "datatype".into(),
                    Json::String(lit.datatype().xsd_iri().into()),
                );
            }
            Json::Object(object)
        }
    }
}

fn to_pretty(table: &ResultTable, prefixes: &PrefixMap) -> String {
    let header: Vec<String> = table.header.iter().map(|h| format!("?{h}")).collect();
    let rendered: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| row.iter().map(|c| cell_text(c, prefixes)).collect())
        .collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &rendered {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let push_row = |cells: &[String], out: &mut String| {
        let line: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<width$}", width = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push_row(&header, &mut out);
    let dashes: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&dashes.join("  "));
    out.push('\n');
    for row in &rendered {
        push_row(row, &mut out);
    }
    out.push_str(&format!("({} row{})\n", table.rows.len(), if table.rows.len() == 1 { "" } else { "s" }));
    out
}
