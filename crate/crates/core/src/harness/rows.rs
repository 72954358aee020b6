//! Result rows and their CSV form.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::estimators::Termination;
use crate::numeric::fmt_g17;

pub const CSV_HEADER: [&str; 13] = [
    "game",
    "algorithm",
    "n",
    "k",
    "T",
    "run",
    "seed",
    "budget_used",
    "eps_inc_exc",
    "ratio_precision",
    "binary_precision",
    "mse",
    "terminated_by",
];

/// One run of one configuration, scored at one budget checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub game: String,
    pub algorithm: String,
    pub n: usize,
    pub k: usize,
    pub budget: u64,
    pub run: usize,
    pub seed: u64,
    pub budget_used: u64,
    pub eps_inc_exc: f64,
    pub ratio_precision: f64,
    pub binary_precision: f64,
    pub mse: f64,
    pub terminated_by: Termination,
}

impl ResultRow {
    fn record(&self) -> [String; 13] {
        [
            self.game.clone(),
            self.algorithm.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.budget.to_string(),
            self.run.to_string(),
            self.seed.to_string(),
            self.budget_used.to_string(),
            fmt_g17(self.eps_inc_exc),
            fmt_g17(self.ratio_precision),
            fmt_g17(self.binary_precision),
            fmt_g17(self.mse),
            self.terminated_by.to_string(),
        ]
    }
}

/// Streams rows as CSV with LF line endings.
pub struct ResultWriter<W: Write> {
    inner: csv::Writer<W>,
    rows: usize,
}

impl<W: Write> ResultWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        inner.write_record(CSV_HEADER)?;
        Ok(ResultWriter { inner, rows: 0 })
    }

    pub fn write(&mut self, row: &ResultRow) -> Result<()> {
        self.inner.write_record(row.record())?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))
    }

    /// Flushes what was written and appends a trailer comment marking the
    /// file as incomplete.
    pub fn abandon(self, reason: &str) -> Result<W> {
        let mut out = self.finish()?;
        let reason = reason.replace('\n', " ");
        writeln!(out, "# incomplete: {reason}")?;
        out.flush()?;
        Ok(out)
    }
}

fn field(record: &csv::StringRecord, idx: usize, line: usize) -> Result<&str> {
    record
        .get(idx)
        .ok_or_else(|| Error::format(line, format!("missing column `{}`", CSV_HEADER[idx])))
}

fn parse<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = field(record, idx, line)?;
    raw.parse()
        .map_err(|e| Error::format(line, format!("column `{}`: `{raw}`: {e}", CSV_HEADER[idx])))
}

/// Reads rows back, skipping comment lines such as the incomplete trailer.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::format(1, "unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        let terminated_by = match field(&record, 12, line)? {
            "budget" => Termination::Budget,
            "stopping_rule" => Termination::StoppingRule,
            other => {
                return Err(Error::format(
                    line,
                    format!("unknown termination `{other}`"),
                ))
            }
        };
        rows.push(ResultRow {
            game: field(&record, 0, line)?.to_string(),
            algorithm: field(&record, 1, line)?.to_string(),
            n: parse(&record, 2, line)?,
            k: parse(&record, 3, line)?,
            budget: parse(&record, 4, line)?,
            run: parse(&record, 5, line)?,
            seed: parse(&record, 6, line)?,
            budget_used: parse(&record, 7, line)?,
            eps_inc_exc: parse(&record, 8, line)?,
            ratio_precision: parse(&record, 9, line)?,
            binary_precision: parse(&record, 10, line)?,
            mse: parse(&record, 11, line)?,
            terminated_by,
        });
    }
    Ok(rows)
}
