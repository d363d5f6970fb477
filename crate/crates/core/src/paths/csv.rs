//! Plain CSV with header `t,x_1,...,x_d`.
//!
//! Step paths are written as one row per piece start plus a closing row at
//! the horizon carrying the last value.

use std::io::{BufRead, Write};

use super::grid::GridPath;
use super::ops::Path;
use super::partition::Partition;
use super::rcll::RcllPath;
use crate::error::{Error, Result};

fn header<W: Write>(w: &mut W, d: usize) -> Result<()> {
    write!(w, "t")?;
    for j in 1..=d {
        write!(w, ",x_{j}")?;
    }
    writeln!(w)?;
    Ok(())
}

fn row<W: Write>(w: &mut W, t: f64, v: &[f64]) -> Result<()> {
    write!(w, "{t}")?;
    for x in v {
        write!(w, ",{x}")?;
    }
    writeln!(w)?;
    Ok(())
}

/// Writes any path in the format above. Grid paths emit their nodes.
pub fn write_csv<P: Path, W: Write>(path: &P, mut w: W) -> Result<()> {
    let d = path.dim();
    header(&mut w, d)?;
    let bp = path.breakpoints();
    let mut v = vec![0.0; d];
    for &t in &bp {
        path.eval_into(t, &mut v);
        row(&mut w, t, &v)?;
    }
    // a step path whose last jump sits at the horizon still needs a closing row
    if bp.len() == 1 || *bp.last().unwrap() < path.horizon() {
        path.eval_into(path.horizon(), &mut v);
        row(&mut w, path.horizon(), &v)?;
    }
    Ok(())
}

fn parse_rows<R: BufRead>(r: R) -> Result<(usize, Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Parameter("empty CSV".into()))??;
    let d = head.split(',').count().saturating_sub(1);
    if d == 0 || !head.starts_with('t') {
        return Err(Error::Parameter(format!("bad CSV header: {head}")));
    }
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for (no, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let fields = fields.map_err(|e| Error::Parameter(format!("line {}: {e}", no + 2)))?;
        if fields.len() != d + 1 {
            return Err(Error::Parameter(format!(
                "line {}: expected {} fields",
                no + 2,
                d + 1
            )));
        }
        ts.push(fields[0]);
        vs.push(fields[1..].to_vec());
    }
    if ts.len() < 2 {
        return Err(Error::Parameter("a path needs at least two rows".into()));
    }
    Ok((d, ts, vs))
}

pub fn read_grid_csv<R: BufRead>(r: R) -> Result<GridPath> {
    let (d, ts, vs) = parse_rows(r)?;
    GridPath::new(Partition::new(ts)?, d, vs.concat())
}

/// Inverse of [`write_csv`] for step paths: the last row only fixes the horizon
/// unless its time differs from the previous row's and its value changes.
pub fn read_rcll_csv<R: BufRead>(r: R) -> Result<RcllPath> {
    let (_, mut ts, mut vs) = parse_rows(r)?;
    if ts[0] != 0.0 {
        return Err(Error::Parameter("first row must be at t = 0".into()));
    }
    let horizon = *ts.last().unwrap();
    let n = ts.len();
    if vs[n - 1] == vs[n - 2] || ts[n - 1] == ts[n - 2] {
        ts.pop();
        vs.pop();
    }
    let initial = vs.remove(0);
    ts.remove(0);
    RcllPath::new(initial, ts, vs, horizon)
}
