//! On-disk formats for triangulations and angle structures.
//!
//! Both are JSON with an explicit `format` tag.  Triangulations list their
//! tetrahedra as label quadruples in index order; angle structures carry
//! the group spec string plus, per tetrahedron, the six values keyed by
//! sorted comma-joined label pairs:
//!
//! ```json
//! {"format":"angled-tri-v1","tetrahedra":[["0","1","2","3"], ...]}
//! {"format":"angled-angles-v1","group":"Z/4",
//!  "tetrahedra":[{"k":{"0,1":[2],"0,2":[1], ...}}, ...]}
//! ```
//!
//! Element coordinates are written as plain integers, so labels may not
//! contain commas and coordinates must fit in 64 bits; both restrictions
//! are enforced on write with a clear error rather than silently mangled.

use crate::abelian::{GroupElement, GroupSpec};
use crate::angles::AngleStructure;
use crate::complex::{Label, Triangulation};
use crate::error::{Error, Result};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const TRIANGULATION_FORMAT: &str = "angled-tri-v1";
pub const ANGLES_FORMAT: &str = "angled-angles-v1";

#[derive(Serialize, Deserialize)]
struct TriangulationFile {
    format: String,
    tetrahedra: Vec<[Label; 4]>,
}

#[derive(Serialize, Deserialize)]
struct AnglesFile {
    format: String,
    group: String,
    tetrahedra: Vec<TetValues>,
}

#[derive(Serialize, Deserialize)]
struct TetValues {
    k: BTreeMap<String, Vec<i64>>,
}

pub fn triangulation_to_json(t: &Triangulation) -> String {
    let file = TriangulationFile {
        format: TRIANGULATION_FORMAT.to_string(),
        tetrahedra: t.tets().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn triangulation_from_json(text: &str) -> Result<Triangulation> {
    let file: TriangulationFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedFile(e.to_string()))?;
    if file.format != TRIANGULATION_FORMAT {
        return Err(Error::MalformedFile(format!(
            "expected format {TRIANGULATION_FORMAT:?}, found {:?}",
            file.format
        )));
    }
    Ok(Triangulation::new(file.tetrahedra))
}

pub fn write_triangulation(path: &Path, t: &Triangulation) -> Result<()> {
    Ok(std::fs::write(path, triangulation_to_json(t) + "\n")?)
}

pub fn read_triangulation(path: &Path) -> Result<Triangulation> {
    triangulation_from_json(&std::fs::read_to_string(path)?)
}

pub fn structure_to_json(s: &AngleStructure) -> Result<String> {
    let mut tetrahedra = Vec::with_capacity(s.len());
    for idx in 0..s.len() {
        let mut k = BTreeMap::new();
        for ((x, y), v) in s.pairs_of(idx) {
            if x.contains(',') || y.contains(',') {
                return Err(Error::MalformedFile(format!(
                    "label {:?} contains a comma and cannot be used as a file key",
                    if x.contains(',') { x } else { y }
                )));
            }
            let coords = v
                .coords()
                .iter()
                .map(|c| {
                    c.to_i64().ok_or_else(|| {
                        Error::MalformedFile(format!(
                            "coordinate {c} of k({x},{y}) does not fit in 64 bits"
                        ))
                    })
                })
                .collect::<Result<Vec<i64>>>()?;
            k.insert(format!("{x},{y}"), coords);
        }
        tetrahedra.push(TetValues { k });
    }
    let file = AnglesFile {
        format: ANGLES_FORMAT.to_string(),
        group: s.group().to_string(),
        tetrahedra,
    };
    Ok(serde_json::to_string_pretty(&file).expect("plain data serializes"))
}

pub fn structure_from_json(text: &str) -> Result<AngleStructure> {
    let file: AnglesFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedFile(e.to_string()))?;
    if file.format != ANGLES_FORMAT {
        return Err(Error::MalformedFile(format!(
            "expected format {ANGLES_FORMAT:?}, found {:?}",
            file.format
        )));
    }
    let group: GroupSpec = file.group.parse()?;
    let mut tets = Vec::with_capacity(file.tetrahedra.len());
    for (idx, tet) in file.tetrahedra.into_iter().enumerate() {
        let mut values: BTreeMap<(Label, Label), GroupElement> = BTreeMap::new();
        for (key, coords) in tet.k {
            let Some((x, y)) = key.split_once(',') else {
                return Err(Error::MalformedFile(format!(
                    "tetrahedron {idx}: key {key:?} is not a comma-joined label pair"
                )));
            };
            if x >= y {
                return Err(Error::MalformedFile(format!(
                    "tetrahedron {idx}: key {key:?} is not sorted"
                )));
            }
            values.insert((x.to_string(), y.to_string()), group.element_from_i64(&coords)?);
        }
        tets.push(values);
    }
    AngleStructure::new(group, tets)
}

pub fn write_structure(path: &Path, s: &AngleStructure) -> Result<()> {
    Ok(std::fs::write(path, structure_to_json(s)? + "\n")?)
}

pub fn read_structure(path: &Path) -> Result<AngleStructure> {
    structure_from_json(&std::fs::read_to_string(path)?)
}

/// Convenience for tools that emit both halves of a run.
pub fn write_bundle(dir: &Path, stem: &str, t: &Triangulation, s: &AngleStructure) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let tri = dir.join(format!("{stem}.tri.json"));
    let ang = dir.join(format!("{stem}.angles.json"));
    write_triangulation(&tri, t)?;
    write_structure(&ang, s)?;
    Ok((tri, ang))
}
