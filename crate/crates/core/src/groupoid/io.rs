//! JSON groupoid files.
//!
//! ```json
//! {
//!   "objects": ["*"],
//!   "morphisms": [{"id": "e", "src": "*", "dst": "*"}],
//!   "identity": {"*": "e"},
//!   "compose": {"e": {"e": "e"}},
//!   "inverse": {"e": "e"}
//! }
//! ```
//!
//! `compose[g][f]` is `g∘f`. Writing is canonical: keys follow declaration
//! order and the output is pretty-printed with a trailing newline, so
//! `write(load(write(g))) == write(g)` byte for byte.

use std::collections::HashMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{FinGroupoid, Morphism};
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismEntry {
    id: String,
    src: String,
    dst: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupoidFile {
    objects: Vec<String>,
    morphisms: Vec<MorphismEntry>,
    identity: HashMap<String, String>,
    compose: HashMap<String, HashMap<String, String>>,
    inverse: HashMap<String, String>,
}

pub fn to_value(g: &FinGroupoid) -> Value {
    let objects: Vec<Value> = g.objects().iter().map(|o| json!(o)).collect();
    let morphisms: Vec<Value> = g
        .morphisms()
        .iter()
        .map(|f| {
            let mut m = Map::new();
            m.insert("id".into(), json!(f.name));
            m.insert("src".into(), json!(g.object_name(f.src)));
            m.insert("dst".into(), json!(g.object_name(f.dst)));
            Value::Object(m)
        })
        .collect();
    let mut identity = Map::new();
    for a in 0..g.num_objects() {
        identity.insert(
            g.object_name(a).to_string(),
            json!(g.morphism_name(g.identity(a))),
        );
    }
    let mut compose = Map::new();
    for h in 0..g.num_morphisms() {
        let mut row = Map::new();
        for f in 0..g.num_morphisms() {
            if let Some(k) = g.try_compose(h, f) {
                row.insert(g.morphism_name(f).to_string(), json!(g.morphism_name(k)));
            }
        }
        if !row.is_empty() {
            compose.insert(g.morphism_name(h).to_string(), Value::Object(row));
        }
    }
    let mut inverse = Map::new();
    for f in 0..g.num_morphisms() {
        inverse.insert(
            g.morphism_name(f).to_string(),
            json!(g.morphism_name(g.inverse(f))),
        );
    }
    let mut root = Map::new();
    root.insert("objects".into(), Value::Array(objects));
    root.insert("morphisms".into(), Value::Array(morphisms));
    root.insert("identity".into(), Value::Object(identity));
    root.insert("compose".into(), Value::Object(compose));
    root.insert("inverse".into(), Value::Object(inverse));
    Value::Object(root)
}

pub fn write_groupoid(g: &FinGroupoid) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(g)).expect("json");
    s.push('\n');
    s
}

/// Parses, size-checks and validates a groupoid.
pub fn from_value(v: Value, limits: &Limits) -> Result<FinGroupoid> {
    let file: GroupoidFile = serde_json::from_value(v)?;
    if file.objects.len() > limits.max_objects {
        return Err(Error::SizeLimit {
            what: "objects".into(),
            actual: file.objects.len(),
            limit: limits.max_objects,
        });
    }
    if file.morphisms.len() > limits.max_morphisms {
        return Err(Error::SizeLimit {
            what: "morphisms".into(),
            actual: file.morphisms.len(),
            limit: limits.max_morphisms,
        });
    }
    let obj: HashMap<&str, usize> = file
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.as_str(), i))
        .collect();
    let mor_ix: HashMap<&str, usize> = file
        .morphisms
        .iter()
        .enumerate()
        .map(|(i, f)| (f.id.as_str(), i))
        .collect();
    let find_obj = |name: &str| {
        obj.get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    };
    let find_mor = |name: &str| {
        mor_ix
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    };
    let mut morphisms = Vec::with_capacity(file.morphisms.len());
    for f in &file.morphisms {
        morphisms.push(Morphism {
            name: f.id.clone(),
            src: find_obj(&f.src)?,
            dst: find_obj(&f.dst)?,
        });
    }
    let mut identity = vec![usize::MAX; file.objects.len()];
    for (o, f) in &file.identity {
        identity[find_obj(o)?] = find_mor(f)?;
    }
    if let Some(a) = identity.iter().position(|&f| f == usize::MAX) {
        return Err(Error::InvalidGroupoid(format!(
            "no identity for {}",
            file.objects[a]
        )));
    }
    let mut inverse = vec![usize::MAX; file.morphisms.len()];
    for (f, g) in &file.inverse {
        inverse[find_mor(f)?] = find_mor(g)?;
    }
    if let Some(f) = inverse.iter().position(|&g| g == usize::MAX) {
        return Err(Error::InvalidGroupoid(format!(
            "no inverse for {}",
            file.morphisms[f].id
        )));
    }
    let mut compose = HashMap::new();
    for (h, row) in &file.compose {
        let h = find_mor(h)?;
        for (f, k) in row {
            compose.insert((h, find_mor(f)?), find_mor(k)?);
        }
    }
    let g = FinGroupoid::from_parts(file.objects, morphisms, identity, inverse, compose)?;
    g.validate().into_result(Error::InvalidGroupoid)?;
    Ok(g)
}

pub fn load_groupoid(text: &str, limits: &Limits) -> Result<FinGroupoid> {
    let v: Value = serde_json::from_str(text)?;
    from_value(v, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{bsym, bz2, codisc, disc};

    #[test]
    fn round_trip_is_bit_exact() {
        for g in [bz2(), codisc(3), disc(2), bsym(3)] {
            let text = write_groupoid(&g);
            let back = load_groupoid(&text, &Limits::default()).unwrap();
            assert_eq!(back, g);
            assert_eq!(write_groupoid(&back), text);
        }
    }

    #[test]
    fn unknown_reference_rejected() {
        let text = r#"{"objects":["a"],"morphisms":[{"id":"e","src":"a","dst":"b"}],
            "identity":{"a":"e"},"compose":{"e":{"e":"e"}},"inverse":{"e":"e"}}"#;
        assert!(matches!(
            load_groupoid(text, &Limits::default()),
            Err(Error::UnknownObject(_))
        ));
    }

    #[test]
    fn oversized_rejected() {
        let text = write_groupoid(&disc(13));
        assert!(matches!(
            load_groupoid(&text, &Limits::default()),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn invalid_table_rejected() {
        let text = r#"{"objects":["*"],"morphisms":[{"id":"e","src":"*","dst":"*"},{"id":"s","src":"*","dst":"*"}],
            "identity":{"*":"e"},"compose":{"e":{"e":"e","s":"s"},"s":{"e":"s","s":"s"}},"inverse":{"e":"e","s":"s"}}"#;
        assert!(matches!(
            load_groupoid(text, &Limits::default()),
            Err(Error::InvalidGroupoid(_))
        ));
    }
}
