//! JSON container files.
//!
//! ```json
//! {
//!   "indices": ["x"],
//!   "shapes": { groupoid },
//!   "positions": {
//!     "x": {
//!       "fibers": { "<shape>": { groupoid } },
//!       "transport": {
//!         "<shape morphism>": {
//!           "objects": { "<position>": "<position>" },
//!           "morphisms": { "<position morphism>": "<position morphism>" }
//!         }
//!       }
//!     }
//!   }
//! }
//! ```
//!
//! Groupoids use the format of [`crate::groupoid::io`]. Output is canonical
//! in the same sense.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{Map, Value};

use super::Container;
use crate::error::{Error, Result};
use crate::groupoid::io::{from_value as groupoid_from_value, to_value as groupoid_to_value};
use crate::groupoid::{FinGroupoid, GFamily, GFunctor};
use crate::limits::Limits;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportEntry {
    objects: HashMap<String, String>,
    morphisms: HashMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyEntry {
    fibers: HashMap<String, Value>,
    transport: HashMap<String, TransportEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContainerFile {
    indices: Vec<String>,
    shapes: Value,
    positions: HashMap<String, FamilyEntry>,
}

fn family_value(fam: &GFamily) -> Value {
    let base = &fam.base;
    let mut fibers = Map::new();
    for s in 0..base.num_objects() {
        fibers.insert(base.object_name(s).to_string(), groupoid_to_value(&fam.fibers[s]));
    }
    let mut transport = Map::new();
    for phi in 0..base.num_morphisms() {
        let t = &fam.transport[phi];
        let (src, dst) = (&t.source, &t.target);
        let mut objects = Map::new();
        for x in 0..src.num_objects() {
            objects.insert(src.object_name(x).to_string(), Value::from(dst.object_name(t.obj(x))));
        }
        let mut morphisms = Map::new();
        for m in 0..src.num_morphisms() {
            morphisms.insert(src.morphism_name(m).to_string(), Value::from(dst.morphism_name(t.mor(m))));
        }
        let mut entry = Map::new();
        entry.insert("objects".into(), Value::Object(objects));
        entry.insert("morphisms".into(), Value::Object(morphisms));
        transport.insert(base.morphism_name(phi).to_string(), Value::Object(entry));
    }
    let mut out = Map::new();
    out.insert("fibers".into(), Value::Object(fibers));
    out.insert("transport".into(), Value::Object(transport));
    Value::Object(out)
}

pub fn to_value(c: &Container) -> Value {
    let mut positions = Map::new();
    for (i, fam) in c.indices.iter().zip(&c.positions) {
        positions.insert(i.clone(), family_value(fam));
    }
    let mut root = Map::new();
    root.insert("indices".into(), Value::from(c.indices.clone()));
    root.insert("shapes".into(), groupoid_to_value(&c.shapes));
    root.insert("positions".into(), Value::Object(positions));
    Value::Object(root)
}

pub fn write_container(c: &Container) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(c)).expect("json");
    s.push('\n');
    s
}

fn functor_from(
    entry: &TransportEntry,
    source: &Arc<FinGroupoid>,
    target: &Arc<FinGroupoid>,
) -> Result<GFunctor> {
    let lookup_obj = |name: &str| -> Result<usize> {
        let image = entry
            .objects
            .get(name)
            .ok_or_else(|| Error::InvalidFamily(format!("transport misses position {name}")))?;
        target.object_id(image)
    };
    let lookup_mor = |name: &str| -> Result<usize> {
        let image = entry
            .morphisms
            .get(name)
            .ok_or_else(|| Error::InvalidFamily(format!("transport misses morphism {name}")))?;
        target.morphism_id(image)
    };
    if entry.objects.len() != source.num_objects() || entry.morphisms.len() != source.num_morphisms() {
        return Err(Error::InvalidFamily("transport table has extra entries".into()));
    }
    let obj_map = source.objects().iter().map(|o| lookup_obj(o)).collect::<Result<Vec<_>>>()?;
    let mor_map = source
        .morphisms()
        .iter()
        .map(|m| lookup_mor(&m.name))
        .collect::<Result<Vec<_>>>()?;
    GFunctor::new(source.clone(), target.clone(), obj_map, mor_map)
}

pub fn from_value(v: Value, limits: &Limits) -> Result<Container> {
    let file: ContainerFile = serde_json::from_value(v)?;
    let shapes = Arc::new(groupoid_from_value(file.shapes, limits)?);
    let mut positions = Vec::with_capacity(file.indices.len());
    for i in &file.indices {
        let entry = file
            .positions
            .get(i)
            .ok_or_else(|| Error::InvalidContainer(format!("no positions for index {i}")))?;
        if entry.fibers.len() != shapes.num_objects() || entry.transport.len() != shapes.num_morphisms() {
            return Err(Error::InvalidContainer(format!("positions at {i} do not match the shapes")));
        }
        let fibers = shapes
            .objects()
            .iter()
            .map(|s| {
                let v = entry
                    .fibers
                    .get(s)
                    .ok_or_else(|| Error::UnknownShape(s.clone()))?;
                Ok(Arc::new(groupoid_from_value(v.clone(), limits)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let transport = shapes
            .morphisms()
            .iter()
            .map(|m| {
                let t = entry
                    .transport
                    .get(&m.name)
                    .ok_or_else(|| Error::UnknownMorphism(m.name.clone()))?;
                functor_from(t, &fibers[m.src], &fibers[m.dst])
            })
            .collect::<Result<Vec<_>>>()?;
        positions.push(GFamily::new(shapes.clone(), fibers, transport)?);
    }
    if file.positions.len() != file.indices.len() {
        return Err(Error::InvalidContainer("positions for an undeclared index".into()));
    }
    let c = Container::new(file.indices, shapes, positions)?;
    c.validate().into_result(Error::InvalidContainer)?;
    Ok(c)
}

pub fn load_container(text: &str, limits: &Limits) -> Result<Container> {
    from_value(serde_json::from_str(text)?, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{bag_container, single_shape_groupoid};
    use crate::groupoid::codisc;

    #[test]
    fn round_trip_is_bit_exact() {
        let cs = [
            bag_container(2).unwrap(),
            single_shape_groupoid(codisc(2)),
            Container::discrete(&["x", "y"], &[vec![1, 2], vec![0, 1]]),
        ];
        for c in cs {
            let text = write_container(&c);
            let back = load_container(&text, &Limits::default()).unwrap();
            assert!(crate::container::cart::same_container(&back, &c));
            assert_eq!(write_container(&back), text);
        }
    }

    #[test]
    fn broken_transport_rejected() {
        let c = bag_container(2).unwrap();
        let swap = c.shapes.morphism_name(c.shapes.num_morphisms() - 1).to_string();
        let mut v = to_value(&c);
        let t = &mut v["positions"]["x"]["transport"][swap.as_str()]["objects"];
        t["0"] = Value::from("0");
        assert!(load_container(&v.to_string(), &Limits::default()).is_err());
    }
}
