//! CSV emission with `#` header comments.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// A single CSV field.
#[derive(Debug, Clone, Copy)]
pub enum Value {
    Float(f64),
    Int(i64),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        Value::Float(x.unwrap_or(f64::NAN))
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

/// 17 significant digits; non-finite values become `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

pub struct CsvWriter {
    out: Box<dyn Write>,
    columns: usize,
    line: String,
}

impl CsvWriter {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self {
            out,
            columns: 0,
            line: String::new(),
        })
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        for line in text.lines() {
            writeln!(self.out, "# {line}")?;
        }
        Ok(())
    }

    pub fn header(&mut self, names: &[&str]) -> io::Result<()> {
        self.columns = names.len();
        writeln!(self.out, "{}", names.join(","))
    }

    pub fn row(&mut self, values: &[Value]) -> io::Result<()> {
        debug_assert_eq!(values.len(), self.columns, "row width differs from header");
        self.line.clear();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.line.push(',');
            }
            match *v {
                Value::Float(x) => self.line.push_str(&format_float(x)),
                Value::Int(n) => {
                    let _ = write!(self.line, "{n}");
                }
            }
        }
        writeln!(self.out, "{}", self.line)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
