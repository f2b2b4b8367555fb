//! JSON strategy files.
//!
//! Keys are emitted in sorted order and floats with 17 significant digits,
//! so writing a parsed file reproduces it byte for byte. Classical
//! probabilities may be exact rationals written as `"p/q"` strings.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{Number, Value};
use thiserror::Error;

use crate::classical::{ClassicalError, ClassicalStrategy, Encoding};
use crate::linalg::CMat;
use crate::quantum::{DensityMatrix, MeasurementFamily, Povm, PreparationFamily, QuantumError};
use crate::zmod::{InputSpace, InputString, ZmodError};
use crate::Task;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, IoError>;

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(IoError::Schema(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyFile {
    Classical {
        task: Task,
        strategy: ClassicalStrategy,
    },
    Quantum {
        task: Task,
        states: PreparationFamily,
        measurements: MeasurementFamily,
    },
}

impl StrategyFile {
    pub fn task(&self) -> Task {
        match self {
            StrategyFile::Classical { task, .. } | StrategyFile::Quantum { task, .. } => *task,
        }
    }

    pub fn space(&self) -> InputSpace {
        match self {
            StrategyFile::Classical { strategy, .. } => strategy.space(),
            StrategyFile::Quantum { states, .. } => states.space(),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut doc = BTreeMap::new();
        let space = self.space();
        doc.insert("n", Value::from(space.n()));
        doc.insert("m", Value::from(space.m()));
        doc.insert("task", Value::from(self.task().name()));
        match self {
            StrategyFile::Classical { strategy, .. } => {
                doc.insert("kind", Value::from("classical"));
                doc.insert("alphabet", Value::from(strategy.alphabet()));
                let k = strategy.alphabet();
                let rows: Vec<Value> = (0..k)
                    .map(|msg| {
                        Value::Array(
                            (0..space.size())
                                .map(|x| match strategy.encoding() {
                                    Encoding::Exact(v) => Value::from(v[x * k + msg].to_string()),
                                    Encoding::Float(v) => float(v[x * k + msg]),
                                })
                                .collect(),
                        )
                    })
                    .collect();
                doc.insert("encoding", Value::Array(rows));
                let decoder: Vec<Value> = strategy
                    .decoder()
                    .chunks(space.n())
                    .map(|row| Value::from(row.to_vec()))
                    .collect();
                doc.insert("decoder", Value::Array(decoder));
            }
            StrategyFile::Quantum {
                states,
                measurements,
                ..
            } => {
                doc.insert("kind", Value::from("quantum"));
                doc.insert("d", Value::from(states.dim()));
                let map: serde_json::Map<String, Value> = (0..space.size())
                    .map(|x| {
                        (
                            space.string(x).to_string(),
                            matrix_value(states.state(x).matrix()),
                        )
                    })
                    .collect();
                doc.insert("states", Value::Object(map));
                let povms: Vec<Value> = measurements
                    .povms()
                    .iter()
                    .map(|p| Value::Array(p.effects().iter().map(matrix_value).collect()))
                    .collect();
                doc.insert("povms", Value::Array(povms));
            }
        }
        Value::Object(doc.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        Self::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> Result<Self> {
        let Value::Object(obj) = doc else {
            return schema("top level must be an object");
        };
        let n = get_usize(obj, "n")?;
        let m = u32::try_from(get_usize(obj, "m")?).map_err(|_| IoError::Schema("m too large".into()))?;
        let space = InputSpace::new(n, m)?;
        let task = match obj.get("task").and_then(Value::as_str) {
            Some(t) => Task::from_str(t).map_err(IoError::Schema)?,
            None => return schema("missing string field 'task'"),
        };
        match obj.get("kind").and_then(Value::as_str) {
            Some("classical") => {
                let k = get_usize(obj, "alphabet")?;
                let strategy = parse_classical(obj, space, k)?;
                Ok(StrategyFile::Classical { task, strategy })
            }
            Some("quantum") => {
                let d = get_usize(obj, "d")?;
                let (states, measurements) = parse_quantum(obj, space, d)?;
                Ok(StrategyFile::Quantum {
                    task,
                    states,
                    measurements,
                })
            }
            _ => schema("field 'kind' must be \"classical\" or \"quantum\""),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
    }
}

/// A JSON number carrying `x` to 17 significant digits.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(Number::from_str(&text).expect("formatted float is a JSON number"))
}

fn matrix_value(a: &CMat) -> Value {
    let d = a.nrows();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let z = a[(i, j)];
            entries.push(Value::Array(vec![float(z.re), float(z.im)]));
        }
    }
    Value::Array(entries)
}

fn get_usize(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize> {
    match obj.get(key).and_then(Value::as_u64) {
        Some(v) => Ok(v as usize),
        None => schema(format!("missing non-negative integer field '{key}'")),
    }
}

fn parse_f64(v: &Value, what: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => schema(format!("{what} must be a finite number")),
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || IoError::Schema(format!("'{s}' is not a rational of the form p/q"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

fn parse_matrix(v: &Value, d: usize, what: &str) -> Result<CMat> {
    let Some(entries) = v.as_array() else {
        return schema(format!("{what} must be an array of [re, im] pairs"));
    };
    if entries.len() != d * d {
        return schema(format!("{what} has {} entries, expected {}", entries.len(), d * d));
    }
    let mut out = CMat::zeros(d, d);
    for (idx, e) in entries.iter().enumerate() {
        let pair = e.as_array().filter(|p| p.len() == 2);
        let Some(pair) = pair else {
            return schema(format!("{what} entry {idx} must be [re, im]"));
        };
        out[(idx / d, idx % d)] = Complex64::new(
            parse_f64(&pair[0], what)?,
            parse_f64(&pair[1], what)?,
        );
    }
    Ok(out)
}

fn parse_classical(
    obj: &serde_json::Map<String, Value>,
    space: InputSpace,
    k: usize,
) -> Result<ClassicalStrategy> {
    let Some(rows) = obj.get("encoding").and_then(Value::as_array) else {
        return schema("missing array field 'encoding'");
    };
    if rows.len() != k {
        return schema(format!("encoding has {} rows, expected alphabet = {k}", rows.len()));
    }
    let mut cells: Vec<&Value> = vec![&Value::Null; space.size() * k];
    for (msg, row) in rows.iter().enumerate() {
        let Some(row) = row.as_array().filter(|r| r.len() == space.size()) else {
            return schema(format!("encoding row {msg} must have {} entries", space.size()));
        };
        for (x, v) in row.iter().enumerate() {
            cells[x * k + msg] = v;
        }
    }
    let encoding = if cells.iter().all(|v| v.is_string()) {
        Encoding::Exact(
            cells
                .iter()
                .map(|v| parse_rational(v.as_str().unwrap_or_default()))
                .collect::<Result<_>>()?,
        )
    } else {
        Encoding::Float(
            cells
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(parse_rational(s)?.to_f64().unwrap_or(f64::NAN)),
                    other => parse_f64(other, "encoding entry"),
                })
                .collect::<Result<_>>()?,
        )
    };
    let Some(dec) = obj.get("decoder").and_then(Value::as_array) else {
        return schema("missing array field 'decoder'");
    };
    if dec.len() != k {
        return schema(format!("decoder has {} rows, expected {k}", dec.len()));
    }
    let mut decoder = Vec::with_capacity(k * space.n());
    for (msg, row) in dec.iter().enumerate() {
        let Some(row) = row.as_array().filter(|r| r.len() == space.n()) else {
            return schema(format!("decoder row {msg} must have {} entries", space.n()));
        };
        for v in row {
            match v.as_u64() {
                Some(b) if b < space.m() as u64 => decoder.push(b as u32),
                _ => return schema(format!("decoder row {msg} has an output outside 0..m")),
            }
        }
    }
    Ok(ClassicalStrategy::new(space, k, encoding, decoder)?)
}

fn parse_quantum(
    obj: &serde_json::Map<String, Value>,
    space: InputSpace,
    d: usize,
) -> Result<(PreparationFamily, MeasurementFamily)> {
    let Some(map) = obj.get("states").and_then(Value::as_object) else {
        return schema("missing object field 'states'");
    };
    if map.len() != space.size() {
        return Err(ZmodError::PartialDomain {
            expected: space.size(),
            got: map.len(),
        }
        .into());
    }
    let mut states: Vec<Option<DensityMatrix>> = vec![None; space.size()];
    for (key, v) in map {
        let x = space.index(InputString::parse(key, space.m())?.digits());
        let what = format!("state \"{key}\"");
        states[x] = Some(DensityMatrix::new(parse_matrix(v, d, &what)?)?);
    }
    let states: Vec<DensityMatrix> = states.into_iter().map(|s| s.expect("all keys distinct")).collect();
    let family = PreparationFamily::new(space, states)?;
    let Some(povms) = obj.get("povms").and_then(Value::as_array) else {
        return schema("missing array field 'povms'");
    };
    let povms = povms
        .iter()
        .enumerate()
        .map(|(y, p)| {
            let Some(effects) = p.as_array() else {
                return schema(format!("POVM {} must be an array of matrices", y + 1));
            };
            let effects = effects
                .iter()
                .enumerate()
                .map(|(b, e)| parse_matrix(e, d, &format!("POVM {} effect {b}", y + 1)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Povm::new(effects)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let meas = MeasurementFamily::new(space.n(), space.m(), povms)?;
    Ok((family, meas))
}
