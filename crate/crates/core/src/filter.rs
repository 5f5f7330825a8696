//! Applying designed filters to finite records and to sample streams.

use std::fmt;
use std::str::FromStr;

use crate::design::{design_coefficients, FilterCoefficients, FilterSpec};
use crate::error::{invalid, Error, Result};
use crate::weights::WeightKind;

/// A finite record of finite samples, optionally with an abscissa per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    values: Vec<f64>,
    abscissa: Option<Vec<f64>>,
}

impl SignalSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            values,
            abscissa: None,
        })
    }

    pub fn with_abscissa(values: Vec<f64>, abscissa: Vec<f64>) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(invalid("abscissa and values differ in length"));
        }
        let mut series = Self::new(values)?;
        series.abscissa = Some(abscissa);
        Ok(series)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn abscissa(&self) -> Option<&[f64]> {
        self.abscissa.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// How outputs near the ends of a record are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Only full windows; output has `L - q + 1` samples.
    Valid,
    /// Reflect the record about its first and last samples.
    Mirror,
    /// Refit the edge windows with the evaluation point moved off center.
    #[default]
    Polyfit,
}

impl EdgePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgePolicy::Valid => "valid",
            EdgePolicy::Mirror => "mirror",
            EdgePolicy::Polyfit => "polyfit",
        }
    }
}

impl fmt::Display for EdgePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "valid" => Ok(EdgePolicy::Valid),
            "mirror" => Ok(EdgePolicy::Mirror),
            "polyfit" => Ok(EdgePolicy::Polyfit),
            other => Err(invalid(format!("unknown edge policy `{other}`"))),
        }
    }
}

fn dot(taps: &[f64], window: &[f64]) -> f64 {
    taps.iter().zip(window).map(|(c, y)| c * y).sum()
}

/// Smooth `signal` with the taps `c`: each output is `cᵀ` times the window
/// whose evaluation position lines up with the output sample.
pub fn smooth(
    signal: &SignalSeries,
    c: &FilterCoefficients,
    edge: EdgePolicy,
) -> Result<SignalSeries> {
    let len = signal.len();
    let q = c.q();
    if len == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let y = signal.values();
    let offset = c.spec().position();

    let (values, abscissa) = match edge {
        EdgePolicy::Valid => {
            if len < q {
                return Err(Error::InsufficientData {
                    needed: q,
                    got: len,
                });
            }
            let values = y.windows(q).map(|w| dot(c.taps(), w)).collect();
            let abscissa = signal
                .abscissa()
                .map(|x| x[offset..offset + len - q + 1].to_vec());
            (values, abscissa)
        }
        EdgePolicy::Mirror => {
            let values = (0..len)
                .map(|i| {
                    c.taps()
                        .iter()
                        .enumerate()
                        .map(|(k, ck)| {
                            let idx = i as isize + k as isize - offset as isize;
                            ck * y[reflect(idx, len)]
                        })
                        .sum()
                })
                .collect();
            (values, signal.abscissa().map(<[f64]>::to_vec))
        }
        EdgePolicy::Polyfit => (
            polyfit_smooth(y, c)?,
            signal.abscissa().map(<[f64]>::to_vec),
        ),
    };

    Ok(SignalSeries { values, abscissa })
}

// Whole-sample symmetric reflection: -1 -> 1, len -> len - 2.
fn reflect(idx: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let r = idx.rem_euclid(period);
    if r < len as isize {
        r as usize
    } else {
        (period - r) as usize
    }
}

fn polyfit_smooth(y: &[f64], c: &FilterCoefficients) -> Result<Vec<f64>> {
    let len = y.len();
    let spec = c.spec();
    let q = spec.q();

    if len < q {
        // the whole record is one window; refit at every position
        let weights = match spec.weights().kind() {
            WeightKind::Custom => {
                return Err(Error::InsufficientData {
                    needed: q,
                    got: len,
                })
            }
            kind => kind.generate(len)?,
        };
        let degree = spec.degree().min(len - 1);
        return (0..len)
            .map(|pos| {
                let taps = design_coefficients(&FilterSpec::new(degree, weights.clone(), pos)?)?;
                Ok(dot(taps.taps(), y))
            })
            .collect();
    }

    let offset = spec.position();
    let last_start = len - q;
    let degree = spec.degree().min(q - 1);
    let mut edge_taps: Vec<Option<FilterCoefficients>> = vec![None; q];
    let mut taps_at = |pos: usize| -> Result<FilterCoefficients> {
        if pos == offset {
            return Ok(c.clone());
        }
        if edge_taps[pos].is_none() {
            let refit = FilterSpec::new(degree, spec.weights().clone(), pos)?;
            edge_taps[pos] = Some(design_coefficients(&refit)?);
        }
        Ok(edge_taps[pos].clone().expect("just filled"))
    };

    (0..len)
        .map(|i| {
            let start = i.saturating_sub(offset).min(last_start);
            let taps = taps_at(i - start)?;
            Ok(dot(taps.taps(), &y[start..start + q]))
        })
        .collect()
}

/// Streaming counterpart of [`smooth`] with [`EdgePolicy::Valid`].
///
/// Holds the last `q` samples in a ring buffer; every push after the window
/// has filled yields one output.
#[derive(Debug, Clone)]
pub struct StreamSmoother {
    taps: Vec<f64>,
    ring: Vec<f64>,
    head: usize,
    seen: usize,
}

impl StreamSmoother {
    pub fn new(c: &FilterCoefficients) -> Self {
        let q = c.q();
        Self {
            taps: c.taps().to_vec(),
            ring: vec![0.0; q],
            head: 0,
            seen: 0,
        }
    }

    /// Feed one sample; returns an output once `q` samples have been seen.
    pub fn push(&mut self, sample: f64) -> Option<f64> {
        let q = self.taps.len();
        self.ring[self.head] = sample;
        self.head = (self.head + 1) % q;
        self.seen += 1;
        if self.seen < q {
            return None;
        }
        // oldest sample sits at `head`
        let (newer, older) = self.ring.split_at(self.head);
        let out = self
            .taps
            .iter()
            .zip(older.iter().chain(newer))
            .map(|(c, y)| c * y)
            .sum();
        Some(out)
    }

    /// Delay in samples between an input and the output it is centered on.
    pub fn delay(&self) -> usize {
        self.taps.len().saturating_sub(1) / 2
    }
}

/// Lazily smooth an iterator of samples; see [`StreamSmoother`].
pub fn stream_smooth<I>(source: I, c: &FilterCoefficients) -> impl Iterator<Item = f64>
where
    I: IntoIterator<Item = f64>,
{
    let mut state = StreamSmoother::new(c);
    source.into_iter().filter_map(move |y| state.push(y))
}
