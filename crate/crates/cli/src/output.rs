use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use taskcodes::MomentReport;

use crate::CliError;

/// Twelve significant digits, `inf` for infinities, no locale.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let rounded: f64 = format!("{x:.11e}")
        .parse()
        .expect("float formatting round-trips");
    let mag = rounded.abs();
    if rounded == 0.0 || (1e-6..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn new(out: Option<&Path>, header: &[&str]) -> Result<Self, CliError> {
        let sink: Box<dyn Write> = match out {
            Some(path) => Box::new(File::create(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?),
            None => Box::new(io::stdout().lock()),
        };
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(cells)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|source| CliError::Io {
            path: "<output>".into(),
            source,
        })
    }
}

pub fn report_cells(r: &MomentReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        num(r.rate),
        num(r.rho),
        r.description_count.to_string(),
        r.used_descriptions.to_string(),
        num(r.moment),
        num(r.lower_bound),
        num(r.upper_bound),
        num(r.m_tilde),
        num(r.delta),
    ]
}
