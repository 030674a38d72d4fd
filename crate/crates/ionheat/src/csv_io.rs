//! CSV series in long (`t,mean_n,sem,engine`) and wide form.
//!
//! Values are written with 17 significant digits so a parse reproduces them
//! bit for bit; missing statistics are written as `NaN`.

use std::io::{Read, Write};

use crate::config::Engine;

pub const SERIES_HEADER: [&str; 4] = ["t", "mean_n", "sem", "engine"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub mean_n: f64,
    pub sem: f64,
    pub engine: Engine,
}

pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_series<W: Write>(out: W, rows: &[SeriesRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for r in rows {
        w.write_record([format_value(r.t), format_value(r.mean_n), format_value(r.sem), r.engine.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn field_error(line: u64, message: String) -> csv::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, format!("record {line}: {message}")).into()
}

pub fn read_series<R: Read>(input: R) -> csv::Result<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(SERIES_HEADER) {
        return Err(field_error(0, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = i as u64 + 1;
        let num = |j: usize| -> csv::Result<f64> {
            record[j].parse().map_err(|_| field_error(line, format!("bad number `{}`", &record[j])))
        };
        rows.push(SeriesRow {
            t: num(0)?,
            mean_n: num(1)?,
            sem: num(2)?,
            engine: record[3].parse().map_err(|m| field_error(line, m))?,
        });
    }
    Ok(rows)
}

/// One column group per engine: `analytic`, `mcwf_mean,mcwf_sem`, `markovian`.
pub fn write_combined<W: Write>(out: W, rows: &[crate::report::ComparisonRow], engines: &[Engine]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t"];
    for e in engines {
        match e {
            Engine::Analytic => header.push("analytic"),
            Engine::Mcwf => header.extend(["mcwf_mean", "mcwf_sem"]),
            Engine::Markovian => header.push("markovian"),
        }
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![format_value(r.t)];
        let val = |v: Option<f64>| format_value(v.unwrap_or(f64::NAN));
        for e in engines {
            match e {
                Engine::Analytic => rec.push(val(r.analytic)),
                Engine::Mcwf => rec.extend([val(r.mcwf_mean), val(r.mcwf_sem)]),
                Engine::Markovian => rec.push(val(r.markovian)),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
