//! Plain-text and CSV table rendering for the CLI.

/// A rectangular table with a header row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportTable {
    pub fn new(columns: Vec<String>) -> ReportTable {
        ReportTable { columns, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Left-aligned fixed-width columns separated by two spaces.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let render = |cells: &[String]| {
            let mut line = String::new();
            for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(cell);
                if i + 1 < cells.len() {
                    line.push_str(&" ".repeat(w - cell.len()));
                }
            }
            line
        };
        let mut out = render(&self.columns);
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&render(row));
            out.push('\n');
        }
        out
    }

    /// RFC-style CSV: fields containing commas or quotes are quoted.
    pub fn to_csv(&self) -> String {
        let escape = |cell: &str| {
            if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
                format!("\"{}\"", cell.replace('"', "\"\""))
            } else {
                cell.to_string()
            }
        };
        let mut out = String::new();
        out.push_str(
            &self.columns.iter().map(|c| escape(c)).collect::<Vec<_>>().join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_alignment() {
        let mut t = ReportTable::new(vec!["S".into(), "v(S)".into()]);
        t.push_row(vec!["{1}".into(), "0".into()]);
        t.push_row(vec!["{1,2,3}".into(), "1383".into()]);
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "S        v(S)");
        assert_eq!(lines[2], "{1}      0");
        assert_eq!(lines[3], "{1,2,3}  1383");
    }

    #[test]
    fn csv_quoting() {
        let mut t = ReportTable::new(vec!["coalition".into(), "value".into()]);
        t.push_row(vec!["{1,2}".into(), "9".into()]);
        let csv = t.to_csv();
        assert_eq!(csv, "coalition,value\n\"{1,2}\",9\n");
    }
}
