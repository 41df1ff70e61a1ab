//! Trace CSV: `grad_computations,duality_gap,wall_ms,restarted`, one row per
//! checkpoint. Floats are written with 17 significant digits so they parse
//! back to the same value; `restarted` is 0 or 1.

use std::io::{self, BufRead, Write};

use super::Checkpoint;

pub const TRACE_HEADER: &str = "grad_computations,duality_gap,wall_ms,restarted";

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Streams checkpoints as CSV rows, flushing after each row.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{TRACE_HEADER}")?;
        Ok(TraceWriter { out })
    }

    pub fn write(&mut self, c: &Checkpoint) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{},{},{}",
            c.grad_computations,
            format_float(c.duality_gap),
            format_float(c.wall_ms),
            u8::from(c.restarted)
        )?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn write_trace<W: Write>(checkpoints: &[Checkpoint], out: W) -> io::Result<()> {
    let mut w = TraceWriter::new(out)?;
    for c in checkpoints {
        w.write(c)?;
    }
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
}

pub fn read_trace<R: BufRead>(input: R) -> io::Result<Vec<Checkpoint>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(TRACE_HEADER) {
        return Err(bad(1, "missing trace header"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let n = i + 2;
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 4 {
            return Err(bad(n, format!("expected 4 fields, got {}", f.len())));
        }
        out.push(Checkpoint {
            grad_computations: f[0].parse().map_err(|e| bad(n, e))?,
            duality_gap: f[1].parse().map_err(|e| bad(n, e))?,
            wall_ms: f[2].parse().map_err(|e| bad(n, e))?,
            restarted: match f[3] {
                "0" => false,
                "1" => true,
                other => return Err(bad(n, format!("bad restart flag '{other}'"))),
            },
        });
    }
    Ok(out)
}
