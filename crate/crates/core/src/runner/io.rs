use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::lab::{EnergyLedger, LedgerRow, LEDGER_COLUMNS};
use crate::{Error, Result};

/// `{:.16e}`: 17 significant digits, enough to reproduce every `f64`.
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_ledger<W: Write>(ledger: &EnergyLedger, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(LEDGER_COLUMNS)?;
    for row in &ledger.rows {
        csv.write_record(row.values().map(format_value))?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads a ledger written by [`write_ledger`]. The header must match
/// [`LEDGER_COLUMNS`] exactly; the result is validated.
pub fn read_ledger<R: Read>(reader: R) -> Result<EnergyLedger> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers()?.clone();
    if !header.iter().eq(LEDGER_COLUMNS.iter().copied()) {
        return Err(Error::InvalidLedger(format!(
            "header does not match the ledger columns: {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut ledger = EnergyLedger::default();
    for (i, record) in csv.records().enumerate() {
        let record = record?;
        let mut values = [0.0; LEDGER_COLUMNS.len()];
        for (slot, (field, name)) in values.iter_mut().zip(record.iter().zip(LEDGER_COLUMNS)) {
            *slot = field.trim().parse().map_err(|_| {
                Error::InvalidLedger(format!("row {}: column {name} holds {field:?}", i + 1))
            })?;
        }
        ledger.push(row_from_values(values));
    }
    ledger.validate()?;
    Ok(ledger)
}

fn row_from_values(v: [f64; 20]) -> LedgerRow {
    LedgerRow {
        t: v[0],
        tau: v[1],
        dt: v[2],
        u_l2sq: v[3],
        u_h1sq: v[4],
        u_h2sq: v[5],
        u_sup: v[6],
        w_l2sq: v[7],
        w_h1sq: v[8],
        w_h2sq: v[9],
        w_sup: v[10],
        e_low: v[11],
        e_high: v[12],
        low_l4: v[13],
        low_sup: v[14],
        grad_high_sq: v[15],
        trilinear_w: v[16],
        lap_coupling: v[17],
        route_gap: v[18],
        w_h3sq: v[19],
    }
}

pub fn write_ledger_file(ledger: &EnergyLedger, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    write_ledger(ledger, std::io::BufWriter::new(file))
}

pub fn read_ledger_file(path: &Path) -> Result<EnergyLedger> {
    read_ledger(std::io::BufReader::new(fs::File::open(path)?))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}
