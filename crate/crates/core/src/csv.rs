//! CSV export of sweep results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::atom::Level;
use crate::error::{Error, Result};
use crate::lindblad::DensityMatrix;
use crate::sweep::{Observable, SweepResult};

pub const CSV_HEADER: &str =
    "delta,rho_aa,rho_bb,rho_cc,rho_dd,re_cd,im_cd,re_ca,im_ca,re_db,im_db,\
re_cb,im_cb,re_ab,im_ab,re_ad,im_ad,re_bd,im_bd";

/// Header columns after the leading coordinate.
const STATE_COLUMNS: &str = "rho_aa,rho_bb,rho_cc,rho_dd,re_cd,im_cd,re_ca,im_ca,re_db,im_db,\
re_cb,im_cb,re_ab,im_ab,re_ad,im_ad,re_bd,im_bd";

/// Formats with 17 significant digits, which round-trips every `f64`.
fn push_value(line: &mut String, value: f64) {
    use std::fmt::Write as _;
    write!(line, ",{value:.16e}").expect("writing to a String");
}

fn render_row(x: f64, rho: &DensityMatrix) -> String {
    let mut line = format!("{x:.16e}");
    for level in Level::ALL {
        push_value(&mut line, rho.population(level));
    }
    for key in Observable::COHERENCES {
        let value = crate::sweep::extract_observable(rho, key);
        push_value(&mut line, value.re);
        push_value(&mut line, value.im);
    }
    line.push('\n');
    line
}

/// Writes a table of density matrices keyed by a leading coordinate
/// column, e.g. `t` for trajectories.
pub fn write_states_to<'a, W: Write>(
    first_column: &str,
    rows: impl IntoIterator<Item = (f64, &'a DensityMatrix)>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "{first_column},{STATE_COLUMNS}")?;
    for (x, rho) in rows {
        out.write_all(render_row(x, rho).as_bytes())?;
    }
    out.flush()
}

/// Writes the header and one row per grid point.
pub fn write_csv_to<W: Write>(result: &SweepResult, out: W) -> io::Result<()> {
    write_states_to("delta", result.rows.iter().map(|r| (r.delta, &r.rho)), out)
}

/// Renders the whole table in memory.
pub fn render_csv(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv_to(result, &mut buf).expect("writing to a Vec");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Writes the table to `path`, replacing any existing file.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::InvalidSweep("cannot write an empty sweep".into()));
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_csv_to(result, BufWriter::new(file)).map_err(io_err)
}

/// File counterpart of [`write_states_to`].
pub fn write_states<'a>(
    first_column: &str,
    rows: impl IntoIterator<Item = (f64, &'a DensityMatrix)>,
    path: &Path,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_states_to(first_column, rows, BufWriter::new(file)).map_err(io_err)
}
