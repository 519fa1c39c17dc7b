//! Report rows and their text, CSV and JSON-lines renderings.

use std::fmt;

use crate::config::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// A value recorded for reference, with nothing to compare against.
    Info,
    /// A reference value that the computation reproduces.
    Matched,
    /// A reference value that the computation does not reproduce. Recorded,
    /// never counted as a failure.
    Mismatched,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Info => "info",
            Status::Matched => "matched",
            Status::Mismatched => "mismatched",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub check_id: String,
    pub anchor: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

impl Row {
    pub fn new(
        check_id: impl Into<String>,
        anchor: impl Into<String>,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
        status: Status,
    ) -> Self {
        Row {
            check_id: check_id.into(),
            anchor: anchor.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            status,
        }
    }

    /// Passes iff the two renderings agree.
    pub fn compare(check_id: &str, anchor: &str, expected: impl fmt::Display, actual: impl fmt::Display) -> Self {
        let (e, a) = (expected.to_string(), actual.to_string());
        let status = if e == a { Status::Pass } else { Status::Fail };
        Row::new(check_id, anchor, e, a, status)
    }

    pub fn holds(check_id: &str, anchor: &str, expected: impl fmt::Display, actual: impl fmt::Display, ok: bool) -> Self {
        Row::new(check_id, anchor, expected, actual, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn info(check_id: &str, anchor: &str, value: impl fmt::Display) -> Self {
        Row::new(check_id, anchor, "-", value, Status::Info)
    }

    pub fn skip(check_id: &str, anchor: &str, reason: impl fmt::Display) -> Self {
        Row::new(check_id, anchor, "-", reason, Status::Skip)
    }

    pub fn fail(check_id: &str, anchor: &str, expected: impl fmt::Display, error: impl fmt::Display) -> Self {
        Row::new(check_id, anchor, expected, error, Status::Fail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        self.rows.extend(rows);
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::JsonLines => self.json_lines(),
        }
    }

    fn text(&self) -> String {
        let header = ["check_id", "anchor", "expected", "actual", "status"];
        let cells: Vec<[&str; 5]> = self
            .rows
            .iter()
            .map(|r| [r.check_id.as_str(), &r.anchor, &r.expected, &r.actual, r.status.name()])
            .collect();
        let mut width = header.map(str::len);
        for c in &cells {
            for (w, s) in width.iter_mut().zip(c) {
                *w = (*w).max(s.chars().count());
            }
        }
        let line = |c: [&str; 5]| {
            let mut s = String::new();
            for (i, (cell, w)) in c.iter().zip(width).enumerate() {
                if i == 4 {
                    s.push_str(cell);
                } else {
                    s.push_str(cell);
                    s.extend(std::iter::repeat(' ').take(w - cell.chars().count() + 2));
                }
            }
            s.push('\n');
            s
        };
        let mut out = line(header);
        for c in cells {
            out.push_str(&line(c));
        }
        let summary: Vec<String> = [Status::Pass, Status::Fail, Status::Skip, Status::Info, Status::Matched, Status::Mismatched]
            .iter()
            .filter(|s| self.count(**s) > 0)
            .map(|s| format!("{} {}", self.count(*s), s))
            .collect();
        out.push_str(&format!("\n{} rows: {}\n", self.rows.len(), summary.join(", ")));
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "anchor", "expected", "actual", "status"]).expect("in-memory write");
        for r in &self.rows {
            w.write_record([&r.check_id, &r.anchor, &r.expected, &r.actual, r.status.name()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    fn json_lines(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                let v = serde_json::json!({
                    "check_id": r.check_id,
                    "anchor": r.anchor,
                    "expected": r.expected,
                    "actual": r.actual,
                    "status": r.status.name(),
                });
                format!("{v}\n")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            rows: vec![
                Row::compare("su4-order", "unitary group order", 25920, 25920),
                Row::compare("x", "with, comma", "1", "2"),
                Row::info("delta", "delta", "-1"),
            ],
        }
    }

    #[test]
    fn exit_codes() {
        let r = sample();
        assert!(r.failed());
        assert_eq!(r.exit_code(), 1);
        let ok = Report { rows: vec![r.rows[0].clone(), r.rows[2].clone(), Row::new("c", "a", 0, 1, Status::Mismatched)] };
        assert_eq!(ok.exit_code(), 0);
    }

    #[test]
    fn csv_quotes_and_header() {
        let s = sample().render(Format::Csv);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("check_id,anchor,expected,actual,status"));
        assert_eq!(lines.next(), Some("su4-order,unitary group order,25920,25920,pass"));
        assert_eq!(lines.next(), Some("x,\"with, comma\",1,2,fail"));
    }

    #[test]
    fn json_lines_mirror_csv() {
        let s = sample().render(Format::JsonLines);
        let first: serde_json::Value = serde_json::from_str(s.lines().next().unwrap()).unwrap();
        assert_eq!(first["check_id"], "su4-order");
        assert_eq!(first["status"], "pass");
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn text_is_aligned() {
        let s = sample().render(Format::Text);
        let lines: Vec<_> = s.lines().collect();
        let col = lines[0].find("anchor").unwrap();
        assert_eq!(lines[1].find("unitary").unwrap(), col);
        assert!(s.ends_with("3 rows: 1 pass, 1 fail, 1 info\n"));
    }
}
