//! JSON fan documents and exact JSON encodings.

use crate::error::{Error, Result};
use crate::fan::{ExtendedFan, StackyFan};
use crate::linalg::{fmt_rat, Int, Rat};
use serde_json::{json, Map, Value};

/// A fan as read from JSON: rays, 1-based maximal cones and optional overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanDocument {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// 1-based ray indices.
    pub max_cones: Vec<Vec<usize>>,
    pub extra_generators: Option<Vec<Vec<i64>>>,
    /// Basis of `Pic(X)` in κ-coordinates.
    pub p_basis: Option<Vec<Vec<i64>>>,
    /// Basis of `Pic^e(X)` in `𝕃*`-coordinates.
    pub q_basis: Option<Vec<Vec<i64>>>,
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.into(), message: message.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("/{key}"), "required field is missing"))
}

fn int_at(v: &Value, ptr: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(ptr, "expected an integer"))
}

fn array_at<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn int_matrix(v: &Value, ptr: &str, width: Option<usize>) -> Result<Vec<Vec<i64>>> {
    array_at(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{ptr}/{i}");
            let row = array_at(row, &rp)?;
            if let Some(w) = width {
                if row.len() != w {
                    return Err(schema(rp, format!("expected length {w}, found {}", row.len())));
                }
            }
            row.iter().enumerate().map(|(j, x)| int_at(x, &format!("{rp}/{j}"))).collect()
        })
        .collect()
}

const KNOWN_FIELDS: [&str; 6] = ["rank", "rays", "max_cones", "extra_generators", "p_basis", "q_basis"];

impl FanDocument {
    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| schema("", "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
            return Err(schema(format!("/{k}"), "unknown field"));
        }
        let rank = int_at(field(obj, "rank")?, "/rank")?;
        if rank < 1 {
            return Err(schema("/rank", "rank must be positive"));
        }
        let rank = usize::try_from(rank).map_err(|_| schema("/rank", "rank out of range"))?;
        let rays = int_matrix(field(obj, "rays")?, "/rays", Some(rank))?;
        let raw_cones = int_matrix(field(obj, "max_cones")?, "/max_cones", None)?;
        let mut max_cones = Vec::with_capacity(raw_cones.len());
        for (c, cone) in raw_cones.iter().enumerate() {
            let mut out = Vec::with_capacity(cone.len());
            for (j, &i) in cone.iter().enumerate() {
                if i < 1 || i as usize > rays.len() {
                    return Err(schema(format!("/max_cones/{c}/{j}"), format!("ray index {i} out of range 1..{}", rays.len())));
                }
                out.push(i as usize);
            }
            max_cones.push(out);
        }
        let optional = |key: &str, width: Option<usize>| -> Result<Option<Vec<Vec<i64>>>> {
            obj.get(key).map(|v| int_matrix(v, &format!("/{key}"), width)).transpose()
        };
        Ok(FanDocument {
            rank,
            rays,
            max_cones,
            extra_generators: optional("extra_generators", Some(rank))?,
            p_basis: optional("p_basis", None)?,
            q_basis: optional("q_basis", None)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| schema("", format!("malformed JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("rank".into(), json!(self.rank));
        obj.insert("rays".into(), json!(self.rays));
        obj.insert("max_cones".into(), json!(self.max_cones));
        for (key, v) in [("extra_generators", &self.extra_generators), ("p_basis", &self.p_basis), ("q_basis", &self.q_basis)] {
            if let Some(v) = v {
                obj.insert(key.into(), json!(v));
            }
        }
        Value::Object(obj)
    }

    pub fn from_fan(fan: &StackyFan) -> Self {
        FanDocument {
            rank: fan.rank(),
            rays: fan.rays().to_vec(),
            max_cones: fan.cones().iter().map(|c| c.iter().map(|i| i + 1).collect()).collect(),
            extra_generators: None,
            p_basis: None,
            q_basis: None,
        }
    }

    /// The fan with 0-based cones; geometric validity is not checked here.
    pub fn fan(&self) -> Result<StackyFan> {
        let cones = self.max_cones.iter().map(|c| c.iter().map(|i| i - 1).collect()).collect();
        StackyFan::new(self.rank, self.rays.clone(), cones)
    }

    /// Extended by `extra_generators`, or by `Gen(Σ)` when absent.
    pub fn extended(&self) -> Result<ExtendedFan> {
        let fan = self.fan()?;
        match &self.extra_generators {
            Some(extra) => ExtendedFan::with_generators(fan, extra.clone()),
            None => ExtendedFan::new(fan),
        }
    }

    pub fn kappa_basis(&self) -> Option<Vec<Vec<Int>>> {
        self.p_basis.as_ref().map(|b| b.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    pub fn q_basis_ints(&self) -> Option<Vec<Vec<Int>>> {
        self.q_basis.as_ref().map(|b| b.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }
}

/// `"num/den"`.
pub fn rat_json(q: &Rat) -> Value {
    Value::String(fmt_rat(q))
}

pub fn rat_vec_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn rat_matrix_json(m: &[Vec<Rat>]) -> Value {
    Value::Array(m.iter().map(|r| rat_vec_json(r)).collect())
}

/// Integers are emitted as JSON numbers when they fit in `i64`, as strings otherwise.
pub fn int_json(x: &Int) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

pub fn int_vec_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn int_matrix_json(m: &[Vec<Int>]) -> Value {
    Value::Array(m.iter().map(|r| int_vec_json(r)).collect())
}

/// 0-based indices as 1-based JSON numbers.
pub fn one_based(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|i| Value::from(i + 1)).collect())
}
