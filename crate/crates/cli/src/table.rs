//! Minimal CSV table: one header line, fixed float formatting, `#` footers.

use std::io::Write;

/// `{:.16e}`: 17 significant digits, lowercase exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    footers: Vec<String>,
}

/// Cells of one row plus reasons for any non-finite values.
#[derive(Debug, Default)]
pub struct Row {
    cells: Vec<String>,
    notes: Vec<String>,
}

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, column: &str, x: f64) -> &mut Self {
        if x.is_finite() {
            self.cells.push(format_float(x));
        } else {
            self.cells.push("nan".into());
            let what = if x.is_nan() { "undefined" } else { "unbounded" };
            self.notes.push(format!("{column} {what}"));
        }
        self
    }

    pub fn opt(&mut self, column: &str, x: Option<f64>, reason: &str) -> &mut Self {
        match x {
            Some(v) => self.num(column, v),
            None => {
                self.cells.push("nan".into());
                self.notes.push(format!("{column} {reason}"));
                self
            }
        }
    }

    pub fn int(&mut self, x: u64) -> &mut Self {
        self.cells.push(x.to_string());
        self
    }

    pub fn text(&mut self, s: &str) -> &mut Self {
        self.cells.push(s.to_string());
        self
    }

    /// Appends the note column and returns the finished cells.
    pub fn finish(mut self) -> Vec<String> {
        self.cells.push(self.notes.join("; "));
        self.cells
    }
}

impl Table {
    /// `header` excludes the trailing `note` column, which is added here.
    pub fn new(mut header: Vec<String>) -> Self {
        header.push("note".into());
        Self {
            header,
            rows: Vec::new(),
            footers: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn push(&mut self, row: Row) {
        let cells = row.finish();
        assert_eq!(cells.len(), self.header.len(), "row width must match header");
        self.rows.push(cells);
    }

    pub fn footer(&mut self, line: impl Into<String>) {
        self.footers.push(line.into());
    }

    pub fn write_to(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join(","))?;
        }
        for f in &self.footers {
            writeln!(out, "# {f}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}
