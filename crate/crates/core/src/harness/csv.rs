use std::path::Path;

use super::HarnessError;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Floats use 17 significant digits in scientific form, so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) if x.is_nan() => "NaN".into(),
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(i64::from(n))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Index of the first row whose width differs from the header.
    pub fn check(&self) -> Result<(), (usize, usize)> {
        match self.rows.iter().position(|r| r.len() != self.header.len()) {
            Some(i) => Err((i, self.rows[i].len())),
            None => Ok(()),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, HarnessError> {
        if let Err((row, got)) = self.check() {
            return Err(HarnessError::Table(format!(
                "row {row} has {got} columns, header has {}",
                self.header.len()
            )));
        }
        let mut w = ::csv::WriterBuilder::new()
            .terminator(::csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let table_err = |e: ::csv::Error| HarnessError::Table(e.to_string());
        w.write_record(&self.header).map_err(table_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(table_err)?;
        }
        w.into_inner()
            .map_err(|e| HarnessError::Table(e.to_string()))
    }
}

/// Writes `table` to `path`; nothing is written if a row has the wrong width.
pub fn emit_csv(table: &CsvTable, path: &Path) -> Result<(), HarnessError> {
    let bytes = table.to_bytes()?;
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_when_empty() {
        let t = CsvTable::new(&["a", "b"]);
        assert_eq!(t.to_bytes().unwrap(), b"a,b\n");
    }

    #[test]
    fn number_rendering() {
        // 0.5125 is not exactly representable; 17 digits show the stored value
        assert_eq!(Cell::Float(0.5125).render(), "5.1249999999999996e-1");
        assert_eq!(Cell::Float(0.5).render(), "5.0000000000000000e-1");
        assert_eq!(Cell::Float(-1234567.0).render(), "-1.2345670000000000e6");
        assert_eq!(Cell::Int(-3).render(), "-3");
        assert_eq!(Cell::Bool(true).render(), "1");
        for x in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            let back: f64 = Cell::Float(x).render().parse().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn mismatch_rejected_before_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec![1.0.into(), 2.0.into()]);
        t.push(vec![1.0.into()]);
        assert!(emit_csv(&t, &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn rows_are_newline_terminated() {
        let mut t = CsvTable::new(&["x", "label"]);
        t.push(vec![Cell::Int(1), "a,b".into()]);
        let s = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(s, "x,label\n1,\"a,b\"\n");
    }

    #[test]
    fn unwritable_path_reports_path() {
        let t = CsvTable::new(&["a"]);
        let err = emit_csv(&t, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
