//! Pass/fail reports written as `check_id,paper_ref,value,threshold,pass`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const REPORT_HEADER: [&str; 5] = ["check_id", "paper_ref", "value", "threshold", "pass"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub check_id: String,
    /// Name of the property being checked.
    pub property: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check_id: &str, property: &str, value: f64, threshold: f64, pass: bool) {
        self.rows.push(ReportRow {
            check_id: check_id.to_string(),
            property: property.to_string(),
            value,
            threshold,
            pass,
        });
    }

    /// Row passing when `value <= threshold`.
    pub fn at_most(&mut self, check_id: &str, property: &str, value: f64, threshold: f64) {
        self.push(check_id, property, value, threshold, value <= threshold);
    }

    /// Row passing when `value < threshold`.
    pub fn below(&mut self, check_id: &str, property: &str, value: f64, threshold: f64) {
        self.push(check_id, property, value, threshold, value < threshold);
    }

    /// Row passing when `value > threshold`.
    pub fn above(&mut self, check_id: &str, property: &str, value: f64, threshold: f64) {
        self.push(check_id, property, value, threshold, value > threshold);
    }

    /// Informational row; always passes.
    pub fn info(&mut self, check_id: &str, property: &str, value: f64) {
        self.push(check_id, property, value, f64::NAN, true);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn get(&self, check_id: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.check_id == check_id)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(REPORT_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.check_id.as_str(),
                r.property.as_str(),
                &format_number(r.value),
                &format_number(r.threshold),
                if r.pass { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("report is UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(reader);
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if header != REPORT_HEADER {
            return Err(Error::Format(format!("unexpected report header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::Format(format!("bad number {:?}", &rec[i])))
            };
            let pass = match &rec[4] {
                "true" => true,
                "false" => false,
                other => return Err(Error::Format(format!("bad pass flag {other:?}"))),
            };
            rows.push(ReportRow {
                check_id: rec[0].to_string(),
                property: rec[1].to_string(),
                value: num(2)?,
                threshold: num(3)?,
                pass,
            });
        }
        Ok(Self { rows })
    }
}

/// Shortest round-trip representation (`inf`, `NaN` for non-finite values).
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new();
        r.at_most("lip", "one-lipschitz", 1e-12, 1e-9);
        r.above("sep", "separation", 0.0, 0.0);
        r.info("n", "sample-count", 50.0);
        r.push("inf", "budget", f64::INFINITY, 1.0, false);
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 2);
        let text = r.to_csv_string();
        assert!(text.starts_with("check_id,paper_ref,value,threshold,pass\n"));
        let back = Report::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.to_csv_string(), text);
        assert_eq!(back.get("lip").unwrap().value, 1e-12);
        assert!(back.get("n").unwrap().threshold.is_nan());
    }
}
