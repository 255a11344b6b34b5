//! CSV output. Numbers use Rust's shortest round-trip `{:e}` form, so equal
//! inputs give byte-identical files.

use std::io::{self, Write};

use super::fit::ExponentFit;
use super::record::DiagnosticsRecord;

pub const DIAGNOSTICS_HEADER: &str = "t,M,L1,L2,Linf,G1,Gp0,G2,Gq,Ginf,Qcum,SSE_r1,SSE_r2,tail_frac";
pub const FITS_HEADER: &str = "quantity,t_a,t_b,slope,rms";

pub fn write_diagnostics(mut out: impl Write, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(out, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        let row = [
            r.t, r.mass, r.l1, r.l2, r.linf, r.g1, r.gp0, r.g2, r.gq, r.ginf, r.q_cum, r.sse_r1,
            r.sse_r2, r.tail_frac,
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_fits<'a>(
    mut out: impl Write,
    fits: impl IntoIterator<Item = (&'a str, &'a ExponentFit)>,
) -> io::Result<()> {
    writeln!(out, "{FITS_HEADER}")?;
    for (name, fit) in fits {
        writeln!(out, "{name},{:e},{:e},{:e},{:e}", fit.t_a, fit.t_b, fit.slope, fit.rms)?;
    }
    Ok(())
}
