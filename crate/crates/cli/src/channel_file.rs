//! JSON channel description files.
//!
//! ```json
//! {
//!   "input_alphabet": ["0", "1"],
//!   "input_distribution": [0.5, 0.5],
//!   "main_channel": [[0.95, 0.05], [0.05, 0.95]],
//!   "wiretap_channel": [[0.9, 0.1], [0.1, 0.9]],
//!   "rates": [{ "rate": 0.1, "rate_prime": 0.45 }]
//! }
//! ```
//!
//! Channel matrices are row-major with one row per input symbol. An optional
//! `prefix` object (`auxiliary_alphabet`, `auxiliary_distribution`, `channel`)
//! places a channel from an auxiliary alphabet in front of both channels; the
//! auxiliary symbol then plays the role of the input. Values are kept as
//! written so that a file survives a parse/serialize round trip unchanged, and
//! are renormalized only when converted to a [`Model`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wiretap_core::prob::{Channel, Distribution, JointXZ, WiretapInstance};

use crate::error::CliError;

/// Row sums and distribution totals may deviate from 1 by this much.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub input_alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub main_output_alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wiretap_output_alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_distribution: Option<Vec<f64>>,
    pub main_channel: Vec<Vec<f64>>,
    pub wiretap_channel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Prefix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rates: Vec<RatePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prefix {
    pub auxiliary_alphabet: Vec<String>,
    pub auxiliary_distribution: Vec<f64>,
    /// One row per auxiliary symbol, one column per input symbol.
    pub channel: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePair {
    pub rate: f64,
    pub rate_prime: f64,
}

/// Validated channels, ready for computation.
#[derive(Debug, Clone)]
pub struct Model {
    pub input: Distribution,
    pub main: Channel,
    pub wiretap: Channel,
}

impl Model {
    pub fn joint(&self) -> Result<JointXZ, CliError> {
        Ok(JointXZ::new(self.input.clone(), self.wiretap.clone())?)
    }

    pub fn instance(&self, rate: f64, rate_prime: f64) -> Result<WiretapInstance, CliError> {
        Ok(WiretapInstance::new(
            self.input.clone(),
            self.main.clone(),
            self.wiretap.clone(),
            rate,
            rate_prime,
        )?)
    }
}

/// A parsed and validated file together with its content hash.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ChannelFile,
    pub model: Model,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let origin = path.display().to_string();
    let file = parse(&text, &origin)?;
    let model = file.model(&text, &origin)?;
    Ok(Loaded {
        file,
        model,
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

pub fn parse(text: &str, origin: &str) -> Result<ChannelFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid {
        origin: origin.to_string(),
        line: Some(e.line()),
        message: e.to_string(),
    })
}

pub fn to_json(file: &ChannelFile) -> String {
    serde_json::to_string_pretty(file).expect("plain data always serializes")
}

/// Line of the first occurrence of `"key"` in `text`, and the lines on which
/// each row of the nested array following it starts.
fn locate(text: &str, key: &str) -> (Option<usize>, Vec<usize>) {
    let needle = format!("\"{key}\"");
    let Some(start) = text.find(&needle) else {
        return (None, Vec::new());
    };
    let line_of = |offset: usize| text[..offset].matches('\n').count() + 1;
    let mut rows = Vec::new();
    let mut depth = 0usize;
    for (i, c) in text[start + needle.len()..].char_indices() {
        match c {
            '[' => {
                depth += 1;
                if depth == 2 {
                    rows.push(line_of(start + needle.len() + i));
                }
            }
            ']' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    break;
                }
            }
            '{' | '}' if depth == 0 => break,
            _ => {}
        }
    }
    (Some(line_of(start)), rows)
}

struct Validator<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Validator<'_> {
    fn fail(&self, line: Option<usize>, message: String) -> CliError {
        CliError::Invalid {
            origin: self.origin.to_string(),
            line,
            message,
        }
    }

    fn distribution(
        &self,
        key: &str,
        values: &[f64],
        size: usize,
    ) -> Result<Distribution, CliError> {
        let (line, _) = locate(self.text, key);
        if values.len() != size {
            return Err(self.fail(
                line,
                format!("{key} has {} entries, expected {size}", values.len()),
            ));
        }
        self.stochastic(key, values, line)
    }

    fn stochastic(
        &self,
        what: &str,
        values: &[f64],
        line: Option<usize>,
    ) -> Result<Distribution, CliError> {
        if values.is_empty() {
            return Err(self.fail(line, format!("{what} is empty")));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(self.fail(
                line,
                format!("{what} entry {i} is {v}, expected a probability"),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(self.fail(
                line,
                format!("{what} sums to {sum}, expected 1 within {STOCHASTIC_TOLERANCE:e}"),
            ));
        }
        Distribution::normalized(values.to_vec())
            .map_err(|e| self.fail(line, format!("{what}: {e}")))
    }

    fn channel(
        &self,
        key: &str,
        rows: &[Vec<f64>],
        inputs: usize,
        outputs: Option<usize>,
    ) -> Result<Channel, CliError> {
        let (line, row_lines) = locate(self.text, key);
        if rows.len() != inputs {
            return Err(self.fail(
                line,
                format!(
                    "{key} has {} rows, expected one per input symbol ({inputs})",
                    rows.len()
                ),
            ));
        }
        let width = outputs.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
        let mut dists = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let row_line = row_lines.get(r).copied().or(line);
            if row.len() != width {
                return Err(self.fail(
                    row_line,
                    format!("{key} row {r} has {} entries, expected {width}", row.len()),
                ));
            }
            dists.push(self.stochastic(&format!("{key} row {r}"), row, row_line)?);
        }
        Channel::from_rows(dists).map_err(|e| self.fail(line, format!("{key}: {e}")))
    }
}

impl ChannelFile {
    /// Checks every constraint and builds the computational model. `text` is
    /// the source the file was parsed from and is used for line numbers.
    pub fn model(&self, text: &str, origin: &str) -> Result<Model, CliError> {
        let v = Validator { text, origin };
        let nx = self.input_alphabet.len();
        if nx == 0 {
            return Err(v.fail(
                locate(text, "input_alphabet").0,
                "input_alphabet is empty".into(),
            ));
        }
        let main = v.channel(
            "main_channel",
            &self.main_channel,
            nx,
            self.main_output_alphabet.as_ref().map(Vec::len),
        )?;
        let wiretap = v.channel(
            "wiretap_channel",
            &self.wiretap_channel,
            nx,
            self.wiretap_output_alphabet.as_ref().map(Vec::len),
        )?;
        for pair in &self.rates {
            if !(pair.rate.is_finite()
                && pair.rate >= 0.0
                && pair.rate_prime.is_finite()
                && pair.rate_prime >= 0.0)
            {
                return Err(v.fail(
                    locate(text, "rates").0,
                    format!("rates must be finite and non-negative, got {pair:?}"),
                ));
            }
        }
        let declared = self
            .input_distribution
            .as_ref()
            .map(|p| v.distribution("input_distribution", p, nx))
            .transpose()?;

        let Some(prefix) = &self.prefix else {
            let input = declared.ok_or_else(|| {
                v.fail(
                    None,
                    "input_distribution is required when no prefix is given".into(),
                )
            })?;
            return Ok(Model {
                input,
                main,
                wiretap,
            });
        };

        let na = prefix.auxiliary_alphabet.len();
        let aux = v.distribution("auxiliary_distribution", &prefix.auxiliary_distribution, na)?;
        // The prefix's "channel" key is searched for after "prefix" so that
        // its row lines are found even though the name is generic.
        let offset = text.find("\"prefix\"").unwrap_or(0);
        let sub = Validator {
            text: &text[offset..],
            origin,
        };
        let front = sub
            .channel("channel", &prefix.channel, na, Some(nx))
            .map_err(|e| shift_line(e, text[..offset].matches('\n').count()))?;
        let (induced, main) = wiretap_core::prob::compose_prefix(&aux, &front, &main)?;
        let wiretap = front.compose(&wiretap)?;
        if let Some(declared) = declared {
            let gap = declared
                .probs()
                .iter()
                .zip(induced.probs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if gap > STOCHASTIC_TOLERANCE {
                return Err(v.fail(
                    locate(text, "input_distribution").0,
                    format!(
                        "input_distribution differs from the one induced by the prefix by {gap:e}"
                    ),
                ));
            }
        }
        Ok(Model {
            input: aux,
            main,
            wiretap,
        })
    }
}

fn shift_line(e: CliError, by: usize) -> CliError {
    match e {
        CliError::Invalid {
            origin,
            line,
            message,
        } => CliError::Invalid {
            origin,
            line: line.map(|l| l + by),
            message,
        },
        other => other,
    }
}
