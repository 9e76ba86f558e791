//! Scalar and axis parsing for sweep parameters.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `min:max:count[:lin|log]`, or a single value.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisSpec {
    Fixed(f64),
    Range {
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
        text: String,
    },
}

impl AxisSpec {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Self::Fixed(v) => vec![v],
            Self::Range {
                min,
                max,
                count,
                spacing,
                ..
            } => (0..count)
                .map(|k| {
                    if k + 1 == count {
                        return max;
                    }
                    let s = k as f64 / (count - 1) as f64;
                    match spacing {
                        Spacing::Linear => min + s * (max - min),
                        Spacing::Log => (min.ln() + s * (max.ln() - min.ln())).exp(),
                    }
                })
                .collect(),
        }
    }

    pub fn fixed(&self) -> Option<f64> {
        match *self {
            Self::Fixed(v) => Some(v),
            Self::Range { .. } => None,
        }
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(v) => write!(f, "{v}"),
            Self::Range { text, .. } => f.write_str(text),
        }
    }
}

/// Parses `1.5`, `pi`, `pi/2`, `0.5*pi` or `3*pi/4`.
pub fn parse_scalar(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (head, divisor) = match t.split_once('/') {
        Some((h, d)) => (
            h,
            d.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad divisor in `{s}`"))?,
        ),
        None => (t.as_str(), 1.0),
    };
    let factor = match head.trim().strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f
            .trim()
            .trim_end_matches('*')
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("bad factor in `{s}`"))?,
        None => return Err(format!("`{s}` is not a number")),
    };
    Ok(factor * PI / divisor)
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            1 => Ok(Self::Fixed(parse_scalar(parts[0])?)),
            3 | 4 => {
                let min = parse_scalar(parts[0])?;
                let max = parse_scalar(parts[1])?;
                let count: usize = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad count in `{s}`"))?;
                let spacing = match parts.get(3).map(|p| p.trim()) {
                    None | Some("lin") => Spacing::Linear,
                    Some("log") => Spacing::Log,
                    Some(other) => return Err(format!("unknown spacing `{other}`")),
                };
                if count < 2 {
                    return Err(format!("axis `{s}` needs at least 2 points"));
                }
                if min >= max || min.is_nan() || max.is_nan() {
                    return Err(format!("axis `{s}` needs min < max"));
                }
                if spacing == Spacing::Log && min <= 0.0 {
                    return Err(format!("log axis `{s}` needs min > 0"));
                }
                Ok(Self::Range {
                    min,
                    max,
                    count,
                    spacing,
                    text: s.trim().to_string(),
                })
            }
            _ => Err(format!(
                "expected a value or min:max:count[:lin|log], got `{s}`"
            )),
        }
    }
}
