//! Log-log least-squares power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};

/// Minimum number of samples accepted by [`fit_decay`].
pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Norm index; serialized as `"inf"` when infinite.
    #[serde(with = "norm_index")]
    pub p: f64,
    pub window: [f64; 2],
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Serde adapter writing a Lebesgue exponent as a number, `"inf"`, or
/// `null` when unset.
pub mod norm_index {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else if p.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(f64::NAN),
            Some(Repr::Num(p)) => Ok(p),
            Some(Repr::Text(t)) => super::parse_norm_index(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `"inf"`, `"infinity"` or a number `>= 1`.
pub fn parse_norm_index(text: &str) -> Result<f64> {
    let t = text.trim();
    let p = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| FracError::InvalidParameter {
            name: "p",
            reason: format!("cannot parse norm index `{t}`"),
        })?,
    };
    if p.is_nan() || p < 1.0 {
        return Err(FracError::InvalidExponent(p));
    }
    Ok(p)
}

/// Ordinary least squares of `log value` against `log t`.
pub fn fit_decay(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(FracError::LengthMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < MIN_SAMPLES {
        return Err(FracError::TooFewSamples {
            needed: MIN_SAMPLES,
            got: times.len(),
        });
    }
    if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FracError::InvalidParameter {
            name: "times",
            reason: "sample times must be positive and strictly increasing".into(),
        });
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(FracError::InvalidParameter {
            name: "values",
            reason: format!("log-log fit needs positive finite values, got {v}"),
        });
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let sse: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        p: f64::NAN,
        window: [times[0], times[times.len() - 1]],
        times: times.to_vec(),
        values: values.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}

/// `count` log-spaced times covering `[t_min, t_max]`.
pub fn log_times(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                t_max
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let t = log_times(5.0, 50.0, 12);
        let v: Vec<f64> = t.iter().map(|t| 3.0 / t).collect();
        let f = fit_decay(&t, &v).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_power_law() {
        let t = log_times(5.0, 50.0, 12);
        let v: Vec<f64> = t.iter().map(|t| 3.0 / t * (1.0 + 0.01 * t.ln().sin())).collect();
        let f = fit_decay(&t, &v).unwrap();
        assert!((f.slope + 1.0).abs() < 0.02);
    }

    #[test]
    fn constant_series() {
        let t = log_times(1.0, 10.0, 9);
        let f = fit_decay(&t, &vec![2.0; 9]).unwrap();
        assert!(f.slope.abs() < 1e-14);
    }

    #[test]
    fn norm_index_round_trip() {
        let t = log_times(1.0, 10.0, 9);
        let mut f = fit_decay(&t, &vec![2.0; 9]).unwrap();
        f.p = f64::INFINITY;
        let js = serde_json::to_string(&f).unwrap();
        assert!(js.contains("\"p\":\"inf\""));
        let back: DecayFit = serde_json::from_str(&js).unwrap();
        assert!(back.p.is_infinite());
        assert_eq!(parse_norm_index("2").unwrap(), 2.0);
        assert!(parse_norm_index("0.5").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let t = log_times(1.0, 10.0, 9);
        let mut v = vec![1.0; 9];
        v[3] = 0.0;
        assert!(fit_decay(&t, &v).is_err());
        assert!(matches!(
            fit_decay(&t[..5], &v[..5]),
            Err(FracError::TooFewSamples { needed: 8, got: 5 })
        ));
    }
}
