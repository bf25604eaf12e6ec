//! Correlation-series container and its CSV round trip.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    G2,
    G2Cross,
    HTheta,
    WaitForward,
    WaitSide,
}

impl CorrelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::G2 => "g2",
            Self::G2Cross => "g2_AB",
            Self::HTheta => "H_theta",
            Self::WaitForward => "wait_forward",
            Self::WaitSide => "wait_side",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "g2" => Some(Self::G2),
            "g2_AB" => Some(Self::G2Cross),
            "H_theta" => Some(Self::HTheta),
            "wait_forward" => Some(Self::WaitForward),
            "wait_side" => Some(Self::WaitSide),
            _ => None,
        }
    }

    /// Intensity-style kinds must stay nonnegative up to roundoff.
    pub fn nonnegative(self) -> bool {
        matches!(self, Self::G2 | Self::G2Cross)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("tau grid not strictly increasing at index {index}")]
    NonIncreasingTau { index: usize },
    #[error("value {value} at index {index} below -1e-8 for a nonnegative kind")]
    NegativeValue { index: usize, value: f64 },
    #[error("{len_tau} tau points but {len_values} values")]
    LengthMismatch { len_tau: usize, len_values: usize },
    #[error("CSV line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Delay grid plus correlation values, with enough metadata to label a plot
/// or rebuild the series from its CSV form.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    /// Delays in inverse-kappa units when the generator is kappa-scaled.
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
    /// Second value column for complex-valued series; absent for the real
    /// correlators produced here.
    pub values_imag: Option<Vec<f64>>,
    pub kind: CorrelationKind,
    /// Local-oscillator phase, present only for quadrature-amplitude series.
    pub theta: Option<f64>,
    /// Human-readable description of the denominator applied to raw traces.
    pub normalization: String,
    /// Scenario echo carried into the CSV header.
    pub params_note: String,
}

impl CorrelationSeries {
    pub fn validate(&self) -> Result<(), SeriesError> {
        if self.values.len() != self.tau.len() {
            return Err(SeriesError::LengthMismatch {
                len_tau: self.tau.len(),
                len_values: self.values.len(),
            });
        }
        if let Some(im) = &self.values_imag {
            if im.len() != self.tau.len() {
                return Err(SeriesError::LengthMismatch {
                    len_tau: self.tau.len(),
                    len_values: im.len(),
                });
            }
        }
        for (i, pair) in self.tau.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(SeriesError::NonIncreasingTau { index: i + 1 });
            }
        }
        if self.kind.nonnegative() {
            for (i, &v) in self.values.iter().enumerate() {
                if v < -1e-8 {
                    return Err(SeriesError::NegativeValue { index: i, value: v });
                }
            }
        }
        Ok(())
    }

    /// Value at the grid point closest to the requested delay.
    pub fn value_near(&self, tau: f64) -> f64 {
        let (idx, _) = self
            .tau
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - tau).abs().partial_cmp(&(*b - tau).abs()).unwrap())
            .expect("series is nonempty");
        self.values[idx]
    }

    /// CSV with `#` metadata comments and a `tau,value[,value_imag]` header.
    /// Floats use the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# kind: {}", self.kind.as_str()).unwrap();
        if let Some(theta) = self.theta {
            writeln!(out, "# theta: {theta}").unwrap();
        }
        writeln!(out, "# normalization: {}", self.normalization).unwrap();
        writeln!(out, "# params: {}", self.params_note).unwrap();
        if self.values_imag.is_some() {
            writeln!(out, "tau,value,value_imag").unwrap();
        } else {
            writeln!(out, "tau,value").unwrap();
        }
        for (i, (t, v)) in self.tau.iter().zip(self.values.iter()).enumerate() {
            match &self.values_imag {
                Some(im) => writeln!(out, "{t},{v},{}", im[i]).unwrap(),
                None => writeln!(out, "{t},{v}").unwrap(),
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SeriesError> {
        let mut kind = None;
        let mut theta = None;
        let mut normalization = String::new();
        let mut params_note = String::new();
        let mut tau = Vec::new();
        let mut values = Vec::new();
        let mut values_imag: Option<Vec<f64>> = None;
        let mut saw_header = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| SeriesError::Parse {
                line: lineno + 1,
                reason: reason.to_string(),
            };
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("kind:") {
                    kind = Some(
                        CorrelationKind::parse(v.trim())
                            .ok_or_else(|| err("unknown correlation kind"))?,
                    );
                } else if let Some(v) = comment.strip_prefix("theta:") {
                    theta =
                        Some(v.trim().parse::<f64>().map_err(|_| err("bad theta"))?);
                } else if let Some(v) = comment.strip_prefix("normalization:") {
                    normalization = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("params:") {
                    params_note = v.trim().to_string();
                }
                continue;
            }
            if !saw_header {
                match line {
                    "tau,value" => {}
                    "tau,value,value_imag" => values_imag = Some(Vec::new()),
                    _ => return Err(err("expected header `tau,value[,value_imag]`")),
                }
                saw_header = true;
                continue;
            }
            let mut fields = line.split(',');
            let t: f64 = fields
                .next()
                .ok_or_else(|| err("missing tau"))?
                .parse()
                .map_err(|_| err("bad tau"))?;
            let v: f64 = fields
                .next()
                .ok_or_else(|| err("missing value"))?
                .parse()
                .map_err(|_| err("bad value"))?;
            tau.push(t);
            values.push(v);
            if let Some(im) = &mut values_imag {
                let vi: f64 = fields
                    .next()
                    .ok_or_else(|| err("missing value_imag"))?
                    .parse()
                    .map_err(|_| err("bad value_imag"))?;
                im.push(vi);
            }
        }

        let series = Self {
            tau,
            values,
            values_imag,
            kind: kind.ok_or(SeriesError::Parse {
                line: 0,
                reason: "missing `# kind:` comment".to_string(),
            })?,
            theta,
            normalization,
            params_note,
        };
        series.validate()?;
        Ok(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CorrelationSeries {
        CorrelationSeries {
            tau: vec![-0.5, 0.0, 0.1 + 0.2, 1.0 / 3.0 + 1.0],
            values: vec![0.82, 12.8, 1.0 - 1e-13, 0.5],
            values_imag: None,
            kind: CorrelationKind::G2,
            theta: None,
            normalization: "divided by <a^+ a>_ss^2".to_string(),
            params_note: "g=200, kappa=1".to_string(),
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let text = s.to_csv();
        let back = CorrelationSeries::from_csv(&text).unwrap();
        assert_eq!(s, back); // bitwise, thanks to shortest round-trip floats
    }

    #[test]
    fn csv_round_trip_with_theta_and_imag() {
        let mut s = sample();
        s.kind = CorrelationKind::HTheta;
        s.theta = Some(std::f64::consts::FRAC_PI_4);
        s.values_imag = Some(vec![1e-17, -2.5, 0.75, f64::MIN_POSITIVE]);
        let back = CorrelationSeries::from_csv(&s.to_csv()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn validation_rejects_malformed_series() {
        let mut s = sample();
        s.tau[2] = s.tau[1]; // not strictly increasing
        assert!(matches!(
            s.validate(),
            Err(SeriesError::NonIncreasingTau { index: 2 })
        ));

        let mut s = sample();
        s.values[0] = -1e-6;
        assert!(matches!(s.validate(), Err(SeriesError::NegativeValue { .. })));

        let mut s = sample();
        s.values.pop();
        assert!(matches!(s.validate(), Err(SeriesError::LengthMismatch { .. })));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# kind: g2\ntau,value\n0.0,1.0\nnot,a,number\n";
        match CorrelationSeries::from_csv(text) {
            Err(SeriesError::Parse { line: 4, .. }) => {}
            other => panic!("expected parse error on line 4, got {other:?}"),
        }
    }
}
