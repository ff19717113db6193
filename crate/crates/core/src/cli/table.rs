//! Tabular command output with a commented header, written as CSV or JSON lines.

use std::io::Write;

use super::args::Format;

/// One value in an output row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Self {
        value.map_or(Cell::Empty, Cell::Float)
    }

    /// Text form used in CSV. Floats use the shortest representation that
    /// parses back to the same value.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Float(x) => {
                serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, Into::into)
            }
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Rows sharing one column list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// The cells of column `name`, in row order.
    pub fn values(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.column(name)?;
        Some(self.rows.iter().map(|row| &row[idx]).collect())
    }
}

/// Writes `header` as `# key: value` lines followed by `table`. In JSON lines
/// the header becomes a leading `{"meta": {...}}` object.
pub fn write_table<W: Write>(
    mut out: W,
    format: Format,
    header: &[(String, String)],
    table: &Table,
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            for (key, value) in header {
                writeln!(out, "# {key}: {value}")?;
            }
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(&table.columns)?;
            for row in &table.rows {
                writer.write_record(row.iter().map(Cell::render))?;
            }
            writer.flush()?;
        }
        Format::Jsonl => {
            let meta: serde_json::Map<String, serde_json::Value> = header
                .iter()
                .map(|(k, v)| (k.clone(), v.clone().into()))
                .collect();
            writeln!(out, "{}", serde_json::json!({ "meta": meta }))?;
            for row in &table.rows {
                // fields are written by hand to keep the column order
                let fields: Vec<String> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        format!("{}:{}", serde_json::Value::from(name.as_str()), cell.json())
                    })
                    .collect();
                writeln!(out, "{{{}}}", fields.join(","))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["x", "name", "n", "missing"]);
        t.push(vec![0.1.into(), "a,b".into(), 3usize.into(), Cell::Empty]);
        t.push(vec![
            1e-300.into(),
            "ok".into(),
            4u64.into(),
            Cell::Float(f64::NAN),
        ]);
        t
    }

    #[test]
    fn csv_round_trips_floats() {
        let mut buf = Vec::new();
        write_table(
            &mut buf,
            Format::Csv,
            &[("version".into(), "1".into())],
            &sample(),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# version: 1"));
        assert_eq!(lines.next(), Some("x,name,n,missing"));
        assert_eq!(lines.next(), Some("0.1,\"a,b\",3,"));
        let last = lines.next().unwrap();
        assert_eq!(
            last.split(',').next().unwrap().parse::<f64>().unwrap(),
            1e-300
        );
    }

    #[test]
    fn jsonl_keeps_column_order() {
        let mut buf = Vec::new();
        write_table(
            &mut buf,
            Format::Jsonl,
            &[("version".into(), "1".into())],
            &sample(),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], r#"{"meta":{"version":"1"}}"#);
        assert_eq!(lines[1], r#"{"x":0.1,"name":"a,b","n":3,"missing":null}"#);
        let row: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(row["x"].as_f64(), Some(1e-300));
        assert!(row["missing"].is_null());
    }

    #[test]
    fn column_lookup() {
        let t = sample();
        assert_eq!(t.column("n"), Some(2));
        assert_eq!(t.values("n").unwrap(), vec![&Cell::Int(3), &Cell::Int(4)]);
        assert!(t.values("nope").is_none());
    }
}
