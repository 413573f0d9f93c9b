use std::io::Write;

use super::run::{SweepOutcome, SweepRecord};

pub const CSV_VERSION: &str = "# edarof-sweep v1";
pub const CSV_HEADER: &str = "inv_eta,order_m,n_p,n_r,snr_db,evm_pct,seed,wall_time_s";

pub fn csv_row(r: &SweepRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.inv_eta, r.order_m, r.n_p, r.n_r, r.snr_db, r.evm_pct, r.seed, r.wall_time_s
    )
}

/// Version line, header, one row per grid point (failed points carry `nan`
/// metrics), failure comments, then the fit line.
pub fn write_csv<W: Write>(out: &mut W, outcome: &SweepOutcome) -> std::io::Result<()> {
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for p in &outcome.points {
        match p {
            Ok(r) => writeln!(out, "{}", csv_row(r))?,
            Err(f) => writeln!(out, "{},,,,nan,nan,,", f.inv_eta)?,
        }
    }
    for f in outcome.failures() {
        writeln!(
            out,
            "# failed inv_eta={}: {}",
            f.inv_eta,
            f.error.replace('\n', " ")
        )?;
    }
    match &outcome.fit {
        Ok(fit) => writeln!(
            out,
            "# fit slope={} intercept={} r2={}",
            fit.slope, fit.intercept, fit.r_squared
        ),
        Err(e) => writeln!(out, "# fit unavailable: {e}"),
    }
}

pub fn write_plot<W: Write>(out: &mut W, outcome: &SweepOutcome) -> std::io::Result<()> {
    writeln!(out, "# inv_eta snr_db")?;
    for r in outcome.records() {
        writeln!(out, "{} {}", r.inv_eta, r.snr_db)?;
    }
    Ok(())
}

pub fn csv_string(outcome: &SweepOutcome) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, outcome).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
