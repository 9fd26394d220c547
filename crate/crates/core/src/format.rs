//! Instance files and exact-rational serialization helpers.
//!
//! An instance file is a JSON object:
//!
//! ```json
//! {
//!   "n": 2,
//!   "m": 2,
//!   "vertices": [1, 2, "t"],
//!   "distances": [[0, "1/2", 3], ["1/2", 0, 1], [3, 1, 0]],
//!   "permutations": [[1, 2], [2, 1]],
//!   "metric": true
//! }
//! ```
//!
//! Distance entries are integers or `"p/q"` strings. `vertices` and
//! `metric` are optional on input and always written on output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::{Instance, RawInstance};
use crate::Rational;

/// Parses an exact rational from `"p/q"`, `"p"` or surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    let q: i64 = den
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    if q == 0 {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A number in a structured file: JSON integer or rational string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberEntry {
    Int(i64),
    Text(String),
}

impl NumberEntry {
    pub fn value(&self) -> Result<Rational> {
        match self {
            NumberEntry::Int(k) => Ok(Rational::from_integer(*k)),
            NumberEntry::Text(s) => parse_rational(s),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        if r.is_integer() {
            NumberEntry::Int(*r.numer())
        } else {
            NumberEntry::Text(format_rational(r))
        }
    }
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        NumberEntry::deserialize(d)?
            .value()
            .map_err(serde::de::Error::custom)
    }
}

/// [`exact`] for optional values.
pub mod exact_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<NumberEntry>::deserialize(d)?
            .map(|e| e.value())
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexLabel {
    Player(usize),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    m: usize,
    #[serde(default)]
    vertices: Option<Vec<VertexLabel>>,
    distances: Vec<Vec<NumberEntry>>,
    permutations: Vec<Vec<usize>>,
    #[serde(default)]
    metric: Option<bool>,
}

/// Parses an instance file without validating the game itself.
pub fn parse_raw(text: &str) -> Result<RawInstance<Rational>> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance file: {e}")))?;
    if let Some(vertices) = &file.vertices {
        let ok = vertices.len() == file.n + 1
            && vertices.iter().enumerate().all(|(k, v)| match v {
                VertexLabel::Player(p) => k < file.n && *p == k + 1,
                VertexLabel::Name(s) => k == file.n && s == "t",
            });
        if !ok {
            return Err(Error::Parse(format!(
                "vertices must be [1, ..., {}, \"t\"]",
                file.n
            )));
        }
    }
    let distances = file
        .distances
        .iter()
        .map(|row| {
            row.iter()
                .map(NumberEntry::value)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawInstance {
        n: file.n,
        m: file.m,
        distances,
        permutations: file.permutations,
        metric: file.metric,
    })
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance<Rational>> {
    Instance::from_raw(parse_raw(text)?)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance<Rational>> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, inst: &Instance<Rational>) -> Result<()> {
    std::fs::write(path, instance_to_json(inst))?;
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Canonical text of an instance: one matrix row per line, stable field order.
pub fn instance_to_json(inst: &Instance<Rational>) -> String {
    let raw = inst.to_raw();
    let mut vertices: Vec<VertexLabel> = (1..=raw.n).map(VertexLabel::Player).collect();
    vertices.push(VertexLabel::Name("t".into()));
    let rows = |items: Vec<String>| {
        items
            .iter()
            .map(|r| format!("    {r}"))
            .collect::<Vec<_>>()
            .join(",\n")
    };
    let distances = raw
        .distances
        .iter()
        .map(|row| {
            json(
                &row.iter()
                    .map(NumberEntry::from_rational)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let permutations = raw.permutations.iter().map(json).collect();

    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"n\": {},", raw.n).unwrap();
    writeln!(out, "  \"m\": {},", raw.m).unwrap();
    writeln!(out, "  \"vertices\": {},", json(&vertices)).unwrap();
    writeln!(out, "  \"distances\": [\n{}\n  ],", rows(distances)).unwrap();
    write!(out, "  \"permutations\": [\n{}\n  ]", rows(permutations)).unwrap();
    if let Some(metric) = raw.metric {
        write!(out, ",\n  \"metric\": {metric}").unwrap();
    }
    writeln!(out, "\n}}").unwrap();
    out
}

/// SHA-256 of the canonical instance text, hex encoded.
pub fn digest(inst: &Instance<Rational>) -> String {
    hex::encode(Sha256::digest(instance_to_json(inst).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "n": 2, "m": 2,
        "distances": [[0, "1/2", 3], ["2/4", 0, 1], [3, 1, 0]],
        "permutations": [[1, 2], [2, 1]]
    }"#;

    #[test]
    fn parses_integers_and_fractions() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(*inst.d(0, 1), Rational::new(1, 2));
        assert_eq!(*inst.d(1, 0), Rational::new(1, 2));
        assert_eq!(inst.declared_metric(), None);
    }

    #[test]
    fn canonical_text_round_trips() {
        let inst = parse_instance(SMALL).unwrap();
        let text = instance_to_json(&inst);
        assert!(text.contains("\"vertices\": [1,2,\"t\"]"));
        assert!(text.contains("[0,\"1/2\",3]"));
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(instance_to_json(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_raw("{\"n\": 1}"), Err(Error::Parse(_))));
        let missing_perms = r#"{"n": 1, "m": 2, "distances": [[0, 1], [1, 0]]}"#;
        assert!(matches!(parse_raw(missing_perms), Err(Error::Parse(_))));
        let bad_vertices = r#"{"n": 1, "m": 2, "vertices": [1, "s"],
            "distances": [[0, 1], [1, 0]], "permutations": [[1], [1]]}"#;
        assert!(matches!(parse_raw(bad_vertices), Err(Error::Parse(_))));
        let zero_den = r#"{"n": 1, "m": 2, "distances": [[0, "1/0"], ["1/0", 0]],
            "permutations": [[1], [1]]}"#;
        assert!(matches!(parse_raw(zero_den), Err(Error::Parse(_))));
        let asym = r#"{"n": 1, "m": 2, "distances": [[0, 1], [2, 0]],
            "permutations": [[1], [1]]}"#;
        assert!(matches!(
            parse_instance(asym),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational(" 6/4 ").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_integer(-2));
        assert!(parse_rational("1.5").is_err());
        assert_eq!(format_rational(&Rational::new(10, 6)), "5/3");
        assert_eq!(format_rational(&Rational::from_integer(4)), "4");
    }
}
