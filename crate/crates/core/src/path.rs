//! Sampled càdlàg paths.
//!
//! A path is a strictly increasing grid of times with the right-limit value
//! `f(t)` at each time. Jumps are declared by attaching the left limit
//! `f(t-)` to the index at which they occur; the minorant machinery works with
//! the lower value `w(t) = f(t) ∧ f(t-)`.

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CadlagPath {
    times: Vec<f64>,
    values: Vec<f64>,
    left_values: Vec<Option<f64>>,
    origin_index: Option<usize>,
}

impl CadlagPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, left_values: Vec<Option<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two points".into()));
        }
        if values.len() != times.len() || left_values.len() != times.len() {
            return Err(Error::InvalidPath(format!(
                "column lengths differ: {} times, {} values, {} left values",
                times.len(),
                values.len(),
                left_values.len()
            )));
        }
        for (i, (&t, &v)) in times.iter().zip(&values).enumerate() {
            if !t.is_finite() {
                return Err(Error::InvalidPath(format!("time at index {i} is not finite")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidPath(format!("value at index {i} is not finite")));
            }
            if i > 0 && t <= times[i - 1] {
                return Err(Error::InvalidPath(format!(
                    "times not strictly increasing at index {i} ({} then {t})",
                    times[i - 1]
                )));
            }
            if let Some(l) = left_values[i] {
                if !l.is_finite() {
                    return Err(Error::InvalidPath(format!("left value at index {i} is not finite")));
                }
                if l == v {
                    return Err(Error::InvalidPath(format!(
                        "declared jump at index {i} has equal left and right values"
                    )));
                }
            }
        }
        let origin_index = times.binary_search_by(|t| t.total_cmp(&0.0)).ok();
        Ok(CadlagPath {
            times,
            values,
            left_values,
            origin_index,
        })
    }

    /// Path without declared jumps.
    pub fn continuous(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = times.len();
        CadlagPath::new(times, values, vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_values(&self) -> &[Option<f64>] {
        &self.left_values
    }

    /// Index of the sample at `t = 0`, if the grid contains it.
    pub fn origin_index(&self) -> Option<usize> {
        self.origin_index
    }

    /// `f(t_i) ∧ f(t_i-)`.
    #[inline]
    pub fn lower(&self, i: usize) -> f64 {
        match self.left_values[i] {
            Some(l) => l.min(self.values[i]),
            None => self.values[i],
        }
    }

    pub fn lower_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.lower(i)).collect()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.len() - 1]
    }

    pub fn jump_count(&self) -> usize {
        self.left_values.iter().filter(|l| l.is_some()).count()
    }

    /// Largest `i` with `t_i <= t`, i.e. the sample whose half-open cell `[t_i, t_{i+1})` holds `t`.
    pub fn cell_index(&self, t: f64) -> Option<usize> {
        let p = self.times.partition_point(|&s| s <= t);
        p.checked_sub(1)
    }

    /// Same grid, values shifted by `c`.
    pub fn shift_values(&self, c: f64) -> Result<Self> {
        CadlagPath::new(
            self.times.clone(),
            self.values.iter().map(|v| v + c).collect(),
            self.left_values.iter().map(|l| l.map(|v| v + c)).collect(),
        )
    }

    /// Same values, times shifted by `u`.
    pub fn shift_times(&self, u: f64) -> Result<Self> {
        CadlagPath::new(
            self.times.iter().map(|t| t + u).collect(),
            self.values.clone(),
            self.left_values.clone(),
        )
    }

    /// Reads the `t,value,left_value` format. Line numbers in errors are 1-based file lines.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_err(1, e))?.clone();
        let expected = ["t", "value", "left_value"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Csv {
                line: 1,
                message: format!("expected header `t,value,left_value`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut left_values = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                csv_err(line, e)
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 3 {
                return Err(Error::Csv {
                    line,
                    message: format!("expected 3 fields, found {}", record.len()),
                });
            }
            let parse = |field: &str, name: &str| -> Result<f64> {
                let v: f64 = field.parse().map_err(|_| Error::Csv {
                    line,
                    message: format!("cannot parse {name} `{field}`"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        line,
                        message: format!("{name} `{field}` is not finite"),
                    });
                }
                Ok(v)
            };
            let t = parse(&record[0], "t")?;
            let v = parse(&record[1], "value")?;
            let l = if record[2].is_empty() {
                None
            } else {
                Some(parse(&record[2], "left_value")?)
            };
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(Error::Csv {
                        line,
                        message: format!("t = {t} does not exceed the previous time {prev}"),
                    });
                }
            }
            if l == Some(v) {
                return Err(Error::Csv {
                    line,
                    message: "left_value equals value; leave it blank when there is no jump".into(),
                });
            }
            times.push(t);
            values.push(v);
            left_values.push(l);
        }
        CadlagPath::new(times, values, left_values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "value", "left_value"]).map_err(|e| csv_err(0, e))?;
        for i in 0..self.len() {
            let left = self.left_values[i].map(|l| l.to_string()).unwrap_or_default();
            w.write_record([self.times[i].to_string(), self.values[i].to_string(), left])
                .map_err(|e| csv_err(0, e))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(line: u64, e: csv::Error) -> Error {
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_short() {
        assert!(CadlagPath::continuous(vec![0.0], vec![1.0]).is_err());
        assert!(CadlagPath::continuous(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(CadlagPath::continuous(vec![1.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_and_fake_jumps() {
        assert!(CadlagPath::continuous(vec![0.0, 1.0], vec![f64::NAN, 2.0]).is_err());
        assert!(CadlagPath::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![None, Some(2.0)]).is_err());
    }

    #[test]
    fn lower_value_takes_min_of_limits() {
        let p = CadlagPath::new(vec![-1.0, 0.0, 1.0], vec![0.0, 0.0, 3.0], vec![None, None, Some(1.0)]).unwrap();
        assert_eq!(p.origin_index(), Some(1));
        assert_eq!(p.lower(2), 1.0);
        assert_eq!(p.jump_count(), 1);
    }

    #[test]
    fn cell_index_uses_half_open_cells() {
        let p = CadlagPath::continuous(vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert_eq!(p.cell_index(-0.5), None);
        assert_eq!(p.cell_index(0.0), Some(0));
        assert_eq!(p.cell_index(0.999), Some(0));
        assert_eq!(p.cell_index(1.0), Some(1));
        assert_eq!(p.cell_index(5.0), Some(2));
    }

    #[test]
    fn csv_round_trip_preserves_jumps() {
        let p = CadlagPath::new(vec![-0.5, 0.0, 0.25], vec![1.5, 0.0, -2.0], vec![None, None, Some(0.125)]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value,left_value\n"));
        assert_eq!(CadlagPath::read_csv(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let bad = "t,value,left_value\n0,1,\n1,abc,\n";
        match CadlagPath::read_csv(bad.as_bytes()) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let unsorted = "t,value,left_value\n0,1,\n1,2,\n0.5,2,\n";
        match CadlagPath::read_csv(unsorted.as_bytes()) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            CadlagPath::read_csv("time,v\n0,1\n".as_bytes()),
            Err(Error::Csv { line: 1, .. })
        ));
    }
}
