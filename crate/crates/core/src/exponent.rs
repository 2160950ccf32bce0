//! Serde helpers writing `p = ∞` as the string `"inf"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
    if p.is_infinite() {
        Repr::Text("inf".into()).serialize(s)
    } else {
        Repr::Num(*p).serialize(s)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) => parse(&t).map_err(serde::de::Error::custom),
    }
}

/// Parses an exponent such as `2`, `0.5`, `inf` or `∞`.
pub fn parse(text: &str) -> Result<f64, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        s => s.parse::<f64>().map_err(|e| format!("bad exponent `{text}`: {e}")),
    }
}

/// `inf` or the shortest decimal form.
pub fn format(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}
