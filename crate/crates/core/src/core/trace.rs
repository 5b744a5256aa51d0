//! Time-indexed record of a chain run, with CSV persistence.
//!
//! The CSV layout is one row per step:
//! `step,resampled(0|1),accepted(0|1),x_0,…,x_{d-1}` with a mandatory
//! header. Floats are written in shortest round-trip form, so a re-run with
//! the same seed and config reproduces the file byte for byte.

use std::io::{BufRead, BufReader, Read, Write};

use super::error::{Error, Result};
use super::state::State;

/// Trace of one chain: recorded coordinates per step plus run metadata.
///
/// For high-dimensional targets the trace may record only a subset of
/// coordinates (`recorded`); the resampling buffer always works on full
/// states, recording is output-side only.
#[derive(Clone, Debug)]
pub struct ChainTrace {
    dim: usize,
    recorded: Vec<usize>,
    rows: Vec<f64>,
    resampled: Vec<bool>,
    accepted: Vec<bool>,
    seed: u64,
    config_echo: serde_json::Value,
}

impl ChainTrace {
    /// `record`: coordinate indices to record, in ascending order; `None`
    /// records the full state.
    pub fn new(dim: usize, record: Option<&[usize]>, seed: u64) -> Result<Self> {
        let recorded = match record {
            None => (0..dim).collect(),
            Some(ids) => {
                if ids.is_empty() {
                    return Err(Error::InvalidConfig("empty record set".into()));
                }
                if ids.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidConfig(
                        "recorded coordinates must be strictly increasing".into(),
                    ));
                }
                if *ids.last().unwrap() >= dim {
                    return Err(Error::InvalidConfig(format!(
                        "recorded coordinate {} out of range for dim {}",
                        ids.last().unwrap(),
                        dim
                    )));
                }
                ids.to_vec()
            }
        };
        Ok(Self {
            dim,
            recorded,
            rows: Vec::new(),
            resampled: Vec::new(),
            accepted: Vec::new(),
            seed,
            config_echo: serde_json::Value::Null,
        })
    }

    pub fn set_config_echo(&mut self, echo: serde_json::Value) {
        self.config_echo = echo;
    }

    pub fn config_echo(&self) -> &serde_json::Value {
        &self.config_echo
    }

    pub fn push_row(&mut self, x: &State, resampled: bool, accepted: bool) {
        debug_assert_eq!(x.dim(), self.dim);
        for &c in &self.recorded {
            self.rows.push(x.get(c));
        }
        self.resampled.push(resampled);
        self.accepted.push(accepted);
    }

    pub fn len(&self) -> usize {
        self.resampled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resampled.is_empty()
    }

    /// Full state dimension of the model that produced the trace.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Recorded coordinate ids (ascending).
    pub fn recorded(&self) -> &[usize] {
        &self.recorded
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of accepted moves (resample events count as accepted).
    pub fn accept_count(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    /// Steps (1-based) at which the chain resampled instead of moving by the
    /// kernel.
    pub fn resample_events(&self) -> Vec<usize> {
        self.resampled
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i + 1))
            .collect()
    }

    pub fn accepted_flags(&self) -> &[bool] {
        &self.accepted
    }

    /// Scalar series of one recorded coordinate (by original coordinate id).
    pub fn series(&self, coord: usize) -> Result<Vec<f64>> {
        let w = self.recorded.len();
        let pos = self
            .recorded
            .iter()
            .position(|&c| c == coord)
            .ok_or(Error::InvalidConfig(format!("coordinate {coord} not recorded")))?;
        Ok(self.rows.iter().skip(pos).step_by(w).copied().collect())
    }

    /// Like [`ChainTrace::series`] but restricted to steps > `burn_in`.
    pub fn series_after(&self, coord: usize, burn_in: usize) -> Result<Vec<f64>> {
        let s = self.series(coord)?;
        if burn_in >= s.len() {
            return Err(Error::InvalidConfig(format!(
                "burn-in {burn_in} leaves no samples (trace length {})",
                s.len()
            )));
        }
        Ok(s[burn_in..].to_vec())
    }

    /// Row of recorded values at 0-based row index.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.recorded.len();
        &self.rows[i * w..(i + 1) * w]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "step,resampled,accepted")?;
        for &c in &self.recorded {
            write!(out, ",x_{c}")?;
        }
        writeln!(out)?;
        let w = self.recorded.len();
        for i in 0..self.len() {
            write!(
                out,
                "{},{},{}",
                i + 1,
                u8::from(self.resampled[i]),
                u8::from(self.accepted[i])
            )?;
            for v in &self.rows[i * w..(i + 1) * w] {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Read a trace back from its CSV form. Seed and config echo are not
    /// part of the CSV and come back as defaults.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty trace file".into()))??;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[0] != "step" || cols[1] != "resampled" || cols[2] != "accepted" {
            return Err(Error::Parse(format!("bad trace header: {header}")));
        }
        let mut recorded = Vec::with_capacity(cols.len() - 3);
        for c in &cols[3..] {
            let id = c
                .strip_prefix("x_")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("bad coordinate column: {c}")))?;
            recorded.push(id);
        }
        let dim = recorded.last().copied().unwrap_or(0) + 1;
        let mut trace = Self::new(dim, Some(&recorded), 0)?;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse(format!(
                    "row {}: expected {} fields, got {}",
                    lineno + 2,
                    cols.len(),
                    fields.len()
                )));
            }
            let flag = |s: &str| -> Result<bool> {
                match s {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(Error::Parse(format!("bad flag value: {s}"))),
                }
            };
            trace.resampled.push(flag(fields[1])?);
            trace.accepted.push(flag(fields[2])?);
            for f in &fields[3..] {
                let v: f64 = f
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad float: {f}")))?;
                trace.rows.push(v);
            }
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> ChainTrace {
        let mut t = ChainTrace::new(2, None, 11).unwrap();
        t.push_row(&State::new(vec![0.5, -1.25]), false, true);
        t.push_row(&State::new(vec![0.1, 3.0]), true, true);
        t.push_row(&State::new(vec![0.1, 3.0]), false, false);
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample_trace();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = ChainTrace::read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.series(0).unwrap(), t.series(0).unwrap());
        assert_eq!(back.series(1).unwrap(), t.series(1).unwrap());
        assert_eq!(back.resample_events(), vec![2]);
        assert_eq!(back.accept_count(), 2);

        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn recorded_subset() {
        let mut t = ChainTrace::new(4, Some(&[0, 2]), 0).unwrap();
        t.push_row(&State::new(vec![1.0, 2.0, 3.0, 4.0]), false, true);
        assert_eq!(t.series(2).unwrap(), vec![3.0]);
        assert!(t.series(1).is_err());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,resampled,accepted,x_0,x_2\n"));
    }

    #[test]
    fn rejects_bad_record_sets() {
        assert!(ChainTrace::new(3, Some(&[2, 1]), 0).is_err());
        assert!(ChainTrace::new(3, Some(&[3]), 0).is_err());
        assert!(ChainTrace::new(3, Some(&[]), 0).is_err());
    }

    #[test]
    fn header_is_mandatory() {
        let no_header = b"1,0,1,0.5\n";
        assert!(ChainTrace::read_csv(&no_header[..]).is_err());
    }
}
