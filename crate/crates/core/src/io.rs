//! CSV signal files: header `ch0,ch1,…`, one row per sample.
//!
//! Values are written in the shortest decimal form that parses back to the
//! identical float, so a store/load cycle is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::SignalMatrix;

pub fn channel_header(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("ch{i}")).collect()
}

pub fn write_signals<T: Scalar, W: Write>(x: &SignalMatrix<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(channel_header(x.n_channels()))?;
    let mut row = Vec::with_capacity(x.n_channels());
    for n in 0..x.n_samples() {
        row.clear();
        row.extend((0..x.n_channels()).map(|c| format!("{:?}", x.get(c, n))));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_signals<T: Scalar, R: Read>(input: R) -> Result<SignalMatrix<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(map_csv(e)),
    };
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::NoSamples);
    }
    let expected = channel_header(header.len());
    if header.iter().zip(&expected).any(|(h, e)| h != e) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}", expected.join(",")),
        });
    }
    let n = header.len();
    let mut channels: Vec<Vec<T>> = vec![Vec::new(); n];
    for rec in rdr.records() {
        let rec = rec.map_err(map_csv)?;
        let line = rec.position().map_or(0, |p| p.line());
        for (c, field) in rec.iter().enumerate() {
            let v: T = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {c}: cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column {c}: non-finite value {field:?}"),
                });
            }
            channels[c].push(v);
        }
    }
    if channels[0].is_empty() {
        return Err(Error::NoSamples);
    }
    SignalMatrix::from_channels(channels)
}

fn map_csv(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => Error::Parse {
            line: pos.as_ref().map_or(0, |p| p.line()),
            message: format!("expected {expected_len} fields, found {len}"),
        },
        _ => Error::Csv(e),
    }
}

pub fn store_signals<T: Scalar>(x: &SignalMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_signals(x, std::io::BufWriter::new(file))
}

pub fn load_signals<T: Scalar>(path: impl AsRef<Path>) -> Result<SignalMatrix<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_signals(std::io::BufReader::new(file))
}
