//! Probe reports: per-h left/right magnitudes, the empirical constant
//! `C(h) = left/right`, a boundedness verdict, and CSV export for plotting.

use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct CarlemanReport {
    /// strictly decreasing sweep
    pub h: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `C(h) = left/right` (skipped entries for zero/zero are recorded as 0)
    pub constant: Vec<f64>,
    /// named per-term magnitudes per h (diagnostics for the boundary probe)
    pub terms: Vec<(String, Vec<f64>)>,
    pub pass: bool,
}

impl CarlemanReport {
    /// max ≤ 2× median boundedness verdict over the nonzero entries.
    pub fn bounded_trend(constants: &[f64]) -> bool {
        let mut vals: Vec<f64> = constants.iter().copied().filter(|c| *c > 0.0).collect();
        if vals.is_empty() {
            return true; // all zero: defined as pass
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return false;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = vals[vals.len() / 2];
        let max = *vals.last().unwrap();
        max <= 2.0 * median
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut header = vec!["h".to_string(), "left".into(), "right".into(), "constant".into()];
        for (name, _) in &self.terms {
            header.push(name.clone());
        }
        writeln!(w, "{}", header.join(","))?;
        for (i, &h) in self.h.iter().enumerate() {
            let mut row = vec![
                format!("{h:.10e}"),
                format!("{:.10e}", self.left[i]),
                format!("{:.10e}", self.right[i]),
                format!("{:.10e}", self.constant[i]),
            ];
            for (_, series) in &self.terms {
                row.push(format!("{:.10e}", series[i]));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Validate a strictly decreasing h-sweep.
pub fn check_sweep(h: &[f64], min_len: usize) -> crate::error::Result<()> {
    if h.len() < min_len || h.windows(2).any(|w| w[1] >= w[0]) {
        return Err(crate::error::CarlemanError::BadSweep { min: min_len });
    }
    Ok(())
}
