//! Seeded instance generation and instance file I/O.
//!
//! Generation must be bit-reproducible from `(spec, n)` alone, on any
//! platform. The scheme, recorded in batch headers as [`PRNG_NAME`]:
//!
//! 1. expand the 64-bit seed into a 32-byte ChaCha8 key with four
//!    splitmix64 outputs (little-endian);
//! 2. map each `next_u64()` to `[0, 1)` by `(x >> 11) * 2^-53`;
//! 3. scale into `[low, high)` as `low + u * (high - low)`;
//! 4. draw `a0`, `t0`, `alpha`, then one rate per job, in that order.
//!
//! Draws of `alpha` at or below 1e-6 are rejected and redrawn: the swap
//! threshold divides by `alpha^(2r-1)`, which underflows for tiny `alpha`.
//! Draws of `a0` at exactly 0 are redrawn for the same validity reason.

use std::io::{BufRead, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::model::{Instance, ValidationError};

/// Name and revision of the generation scheme, recorded in batch headers.
pub const PRNG_NAME: &str = "chacha8-sm64/1";

/// Smallest `alpha` the generator will emit.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Sampling ranges and seed for instance generation. Every range is the
/// half-open interval `[low, high)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub b_range: (f64, f64),
    pub a0_range: (f64, f64),
    pub t0_range: (f64, f64),
    pub alpha_range: (f64, f64),
    pub seed: u64,
}

impl GenSpec {
    /// The default ranges: `b ~ U(0,6)`, `a0 ~ U(0.5,2.5)`, `t0 ~ U(0.5,1.5)`,
    /// `alpha ~ U(0,1)`.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            b_range: (0.0, 6.0),
            a0_range: (0.5, 2.5),
            t0_range: (0.5, 1.5),
            alpha_range: (0.0, 1.0),
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        let ranges = [
            ("b", self.b_range),
            ("a0", self.a0_range),
            ("t0", self.t0_range),
            ("alpha", self.alpha_range),
        ];
        for (field, (low, high)) in ranges {
            if !(low.is_finite() && high.is_finite() && low < high) {
                return Err(GenError::BadRange {
                    field,
                    low,
                    high,
                    reason: "low must be finite and below a finite high",
                });
            }
            if low < 0.0 {
                return Err(GenError::BadRange {
                    field,
                    low,
                    high,
                    reason: "low end must be >= 0",
                });
            }
        }
        let (low, high) = self.alpha_range;
        if high > 1.0 {
            return Err(GenError::BadRange {
                field: "alpha",
                low,
                high,
                reason: "high end must be <= 1",
            });
        }
        if high <= ALPHA_FLOOR {
            return Err(GenError::BadRange {
                field: "alpha",
                low,
                high,
                reason: "high end must exceed the 1e-6 alpha floor",
            });
        }
        Ok(())
    }
}

impl Default for GenSpec {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("{field} range [{low}, {high}) is invalid: {reason}")]
    BadRange { field: &'static str, low: f64, high: f64, reason: &'static str },
    #[error("cannot generate an instance with zero jobs")]
    ZeroJobs,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chacha_key(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Deterministic sub-seed `index` of a base seed; used for batches and
/// benchmark replications so each instance is independently regenerable.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut state = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(&mut state)
}

struct UniformSource {
    rng: ChaCha8Rng,
}

impl UniformSource {
    fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::from_seed(chacha_key(seed)) }
    }

    /// Uniform draw from `[low, high)` via the 53-bit mantissa mapping.
    fn uniform(&mut self, (low, high): (f64, f64)) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u = (self.rng.next_u64() >> 11) as f64 * SCALE;
        low + u * (high - low)
    }
}

/// Samples one instance. Identical `(spec, n)` always produce the identical
/// instance.
pub fn generate_instance(spec: &GenSpec, n: usize) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::ZeroJobs);
    }
    spec.validate()?;
    let mut source = UniformSource::new(spec.seed);
    let mut a0 = source.uniform(spec.a0_range);
    while a0 <= 0.0 {
        a0 = source.uniform(spec.a0_range);
    }
    let t0 = source.uniform(spec.t0_range);
    let mut alpha = source.uniform(spec.alpha_range);
    while alpha <= ALPHA_FLOOR {
        alpha = source.uniform(spec.alpha_range);
    }
    let b: Vec<f64> = (0..n).map(|_| source.uniform(spec.b_range)).collect();
    Ok(Instance::new(a0, alpha, t0, b).expect("validated ranges produce valid instances"))
}

/// Samples `count` instances; instance `i` uses `derive_seed(spec.seed, i)`.
pub fn generate_batch(spec: &GenSpec, n: usize, count: usize) -> Result<Vec<Instance>, GenError> {
    (0..count)
        .map(|i| {
            let sub = GenSpec { seed: derive_seed(spec.seed, i as u64), ..spec.clone() };
            generate_instance(&sub, n)
        })
        .collect()
}

/// Nine fixed deterioration-rate vectors (n = 2..=10) used as benchmark
/// fixtures. They cover only the rates; callers supply `a0`, `alpha`, `t0`.
pub fn reference_rates() -> Vec<(usize, Vec<f64>)> {
    vec![
        (2, vec![4.82, 2.98]),
        (3, vec![5.58, 4.10, 1.90]),
        (4, vec![0.59, 1.02, 2.42, 0.31]),
        (5, vec![0.59, 0.47, 1.69, 3.69, 3.63]),
        (6, vec![0.40, 3.81, 4.71, 2.96, 0.53, 1.32]),
        (7, vec![5.15, 3.28, 5.44, 1.52, 4.45, 1.87, 4.51]),
        (8, vec![4.69, 0.06, 3.25, 2.22, 5.66, 0.84, 2.34, 2.78]),
        (9, vec![0.46, 2.77, 3.32, 1.78, 4.47, 1.03, 5.17, 1.72, 4.47]),
        (10, vec![3.18, 5.28, 1.09, 4.57, 1.68, 0.54, 3.42, 2.64, 2.64, 3.67]),
    ]
}

/// Errors from reading or writing instance files.
#[derive(Debug, Error)]
pub enum InstanceIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing field \"{0}\"")]
    MissingField(&'static str),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceIoError {
    InstanceIoError::Parse { line, message: message.into() }
}

/// 17 significant digits: enough to reproduce any f64 exactly on re-parse.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one instance in the key/value text format:
///
/// ```text
/// n = 2
/// a0 = 1.0000000000000000e0
/// alpha = 5.0000000000000000e-1
/// t0 = 1.0000000000000000e0
/// b = [4.8200000000000003e0, 2.9799999999999999e0]
/// ```
///
/// Lines starting with `#` and blank lines are ignored by the reader, so
/// callers may prepend provenance comments.
pub fn write_instance<W: Write>(w: &mut W, instance: &Instance) -> Result<(), InstanceIoError> {
    writeln!(w, "n = {}", instance.n())?;
    writeln!(w, "a0 = {}", fmt_f64(instance.a0()))?;
    writeln!(w, "alpha = {}", fmt_f64(instance.alpha()))?;
    writeln!(w, "t0 = {}", fmt_f64(instance.t0()))?;
    let rates: Vec<String> = instance.rates().iter().map(|&b| fmt_f64(b)).collect();
    writeln!(w, "b = [{}]", rates.join(", "))?;
    Ok(())
}

/// The instance serialized as a string (same format as [`write_instance`]).
pub fn instance_to_string(instance: &Instance) -> String {
    let mut buf = Vec::new();
    write_instance(&mut buf, instance).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("instance text is ASCII")
}

/// Parses the key/value format written by [`write_instance`]. Each field
/// must appear exactly once; `n` must match the length of `b`.
pub fn read_instance<R: BufRead>(r: &mut R) -> Result<Instance, InstanceIoError> {
    let mut n: Option<(usize, usize)> = None;
    let mut a0: Option<f64> = None;
    let mut alpha: Option<f64> = None;
    let mut t0: Option<f64> = None;
    let mut b: Option<Vec<f64>> = None;

    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected \"key = value\", got {trimmed:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => {
                if n.is_some() {
                    return Err(parse_err(line_no, "duplicate field \"n\""));
                }
                let parsed = value
                    .parse::<usize>()
                    .map_err(|e| parse_err(line_no, format!("invalid n {value:?}: {e}")))?;
                n = Some((parsed, line_no));
            }
            "a0" | "alpha" | "t0" => {
                let slot = match key {
                    "a0" => &mut a0,
                    "alpha" => &mut alpha,
                    _ => &mut t0,
                };
                if slot.is_some() {
                    return Err(parse_err(line_no, format!("duplicate field {key:?}")));
                }
                let parsed = value
                    .parse::<f64>()
                    .map_err(|e| parse_err(line_no, format!("invalid {key} {value:?}: {e}")))?;
                *slot = Some(parsed);
            }
            "b" => {
                if b.is_some() {
                    return Err(parse_err(line_no, "duplicate field \"b\""));
                }
                let inner = value
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| parse_err(line_no, "b must be a [..] array"))?;
                let mut rates = Vec::new();
                for (k, item) in inner.split(',').enumerate() {
                    let item = item.trim();
                    if item.is_empty() && inner.trim().is_empty() {
                        break; // empty array
                    }
                    let parsed = item.parse::<f64>().map_err(|e| {
                        parse_err(line_no, format!("invalid b[{}] {item:?}: {e}", k + 1))
                    })?;
                    rates.push(parsed);
                }
                b = Some(rates);
            }
            other => {
                return Err(parse_err(line_no, format!("unknown field {other:?}")));
            }
        }
    }

    let (n, n_line) = n.ok_or(InstanceIoError::MissingField("n"))?;
    let a0 = a0.ok_or(InstanceIoError::MissingField("a0"))?;
    let alpha = alpha.ok_or(InstanceIoError::MissingField("alpha"))?;
    let t0 = t0.ok_or(InstanceIoError::MissingField("t0"))?;
    let b = b.ok_or(InstanceIoError::MissingField("b"))?;
    if b.len() != n {
        return Err(parse_err(n_line, format!("n = {n} but b has {} entries", b.len())));
    }
    Ok(Instance::new(a0, alpha, t0, b)?)
}

/// Provenance comment lines for a generated batch: scheme name, seed, and
/// sampling ranges.
pub fn batch_provenance(spec: &GenSpec, n: usize, count: usize) -> Vec<String> {
    fn range(r: (f64, f64)) -> String {
        format!("[{}, {})", r.0, r.1)
    }
    vec![
        format!("prng = {PRNG_NAME}"),
        format!("seed = {}", spec.seed),
        format!("n = {n}, count = {count}"),
        format!(
            "ranges: a0 ~ {}, t0 ~ {}, alpha ~ {}, b ~ {}",
            range(spec.a0_range),
            range(spec.t0_range),
            range(spec.alpha_range),
            range(spec.b_range)
        ),
    ]
}

/// Writes a batch: `#`-prefixed header lines, then one whitespace-separated
/// record per instance: `n a0 alpha t0 b_1 .. b_n`.
pub fn write_batch<W: Write>(
    w: &mut W,
    instances: &[Instance],
    header: &[String],
) -> Result<(), InstanceIoError> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    for instance in instances {
        let mut fields = vec![
            instance.n().to_string(),
            fmt_f64(instance.a0()),
            fmt_f64(instance.alpha()),
            fmt_f64(instance.t0()),
        ];
        fields.extend(instance.rates().iter().map(|&b| fmt_f64(b)));
        writeln!(w, "{}", fields.join(" "))?;
    }
    Ok(())
}

/// Reads a batch written by [`write_batch`], ignoring comments and blanks.
pub fn read_batch<R: BufRead>(r: &mut R) -> Result<Vec<Instance>, InstanceIoError> {
    let mut instances = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let n = fields[0]
            .parse::<usize>()
            .map_err(|e| parse_err(line_no, format!("invalid n {:?}: {e}", fields[0])))?;
        if fields.len() != n + 4 {
            return Err(parse_err(
                line_no,
                format!("expected {} fields for n = {n}, got {}", n + 4, fields.len()),
            ));
        }
        let mut reals = Vec::with_capacity(n + 3);
        for (k, field) in fields[1..].iter().enumerate() {
            let parsed = field.parse::<f64>().map_err(|e| {
                parse_err(line_no, format!("invalid field {} {field:?}: {e}", k + 2))
            })?;
            reals.push(parsed);
        }
        instances.push(Instance::new(reals[0], reals[1], reals[2], reals[3..].to_vec())?);
    }
    Ok(instances)
}
