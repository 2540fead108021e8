//! Container model: which methods insert into / extract from / hand off
//! containers, and which classes count as collection or map roots.
//!
//! The model is program-independent JSON; resolving it against a concrete
//! program yields ids plus diagnostics.  Entries whose class does not exist
//! in the program are inert (a warning, not an error) so one shared model
//! can serve a whole corpus; entries naming a missing method on an existing
//! class are genuine errors.

use crate::ir::{ClassId, MethodId, Program};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};

/// Which value category a container entry refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum Category {
    #[serde(rename = "COL_VALUE")]
    ColValue,
    #[serde(rename = "MAP_KEY")]
    MapKey,
    #[serde(rename = "MAP_VALUE")]
    MapValue,
}

impl Category {
    pub fn name(&self) -> &'static str {
        match self {
            Category::ColValue => "COL_VALUE",
            Category::MapKey => "MAP_KEY",
            Category::MapValue => "MAP_VALUE",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entrance {
    /// `Class.method` whose call inserts a value into the receiver.
    pub method: String,
    /// 1-based index of the inserted parameter.
    pub param: u32,
    pub category: Category,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exit {
    /// `Class.method` whose result extracts a value from the receiver.
    pub method: String,
    pub category: Category,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ContainerModel {
    #[serde(default)]
    pub entrances: Vec<Entrance>,
    #[serde(default)]
    pub exits: Vec<Exit>,
    /// `Class.method` calls that transfer hosts from receiver to result
    /// (e.g. `iterator()`).
    #[serde(default)]
    pub transfers: Vec<String>,
    #[serde(default)]
    pub collection_roots: Vec<String>,
    #[serde(default)]
    pub map_roots: Vec<String>,
}

impl ContainerModel {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// The model with names resolved against one program.
#[derive(Clone, Debug, Default)]
pub struct ResolvedModel {
    pub entrances: BTreeMap<MethodId, Vec<(u32, Category)>>,
    pub exits: BTreeMap<MethodId, Vec<Category>>,
    pub transfers: BTreeSet<MethodId>,
    pub roots: BTreeSet<ClassId>,
}

#[derive(Clone, Debug, Default)]
pub struct ModelResolution {
    pub model: ResolvedModel,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn resolve_model(program: &Program, model: &ContainerModel) -> ModelResolution {
    let mut res = ModelResolution::default();

    let lookup = |qualified: &str, res: &mut ModelResolution| -> Option<MethodId> {
        let Some((class, _)) = qualified.split_once('.') else {
            res.errors.push(format!("container model: `{qualified}` is not a Class.method name"));
            return None;
        };
        if program.class_id(class).is_none() {
            res.warnings.push(format!(
                "container model: class `{class}` not in program; entry `{qualified}` is inert"
            ));
            return None;
        }
        let methods = program.methods_by_qualified_name(qualified);
        match methods.as_slice() {
            [] => {
                res.errors.push(format!("container model: unknown method `{qualified}`"));
                None
            }
            [m] => Some(*m),
            _ => {
                res.errors.push(format!(
                    "container model: `{qualified}` is ambiguous (overloaded by arity)"
                ));
                None
            }
        }
    };

    for e in &model.entrances {
        if let Some(m) = lookup(&e.method, &mut res) {
            let arity = program.method(m).arity;
            if e.param == 0 || e.param > arity {
                res.errors.push(format!(
                    "container model: entrance `{}` has bad param index {} (arity {})",
                    e.method, e.param, arity
                ));
                continue;
            }
            res.model.entrances.entry(m).or_default().push((e.param, e.category));
        }
    }
    for e in &model.exits {
        if let Some(m) = lookup(&e.method, &mut res) {
            if program.method(m).ret_var.is_none() {
                res.errors.push(format!(
                    "container model: exit `{}` never returns a value",
                    e.method
                ));
                continue;
            }
            res.model.exits.entry(m).or_default().push(e.category);
        }
    }
    for t in &model.transfers {
        if let Some(m) = lookup(t, &mut res) {
            res.model.transfers.insert(m);
        }
    }
    for root in model.collection_roots.iter().chain(&model.map_roots) {
        match program.class_id(root) {
            Some(c) => {
                res.model.roots.insert(c);
            }
            None => res.warnings.push(format!(
                "container model: root type `{root}` not in program; ignored"
            )),
        }
    }

    // Assumption-1 responsibility: every method on a container-root subtype
    // should be classified; flag the ones that are not.
    if !res.model.roots.is_empty() {
        for class_idx in 0..program.classes.len() as u32 {
            let cid = ClassId(class_idx);
            if !res.model.roots.iter().any(|&r| program.subtype_of(cid, r)) {
                continue;
            }
            for &m in &program.class(cid).methods {
                let classified = res.model.entrances.contains_key(&m)
                    || res.model.exits.contains_key(&m)
                    || res.model.transfers.contains(&m);
                if !classified {
                    res.warnings.push(format!(
                        "container model: `{}` on container class `{}` is unclassified; \
                         values it moves are invisible to the container pattern",
                        program.qualified_name(m),
                        program.class(cid).name
                    ));
                }
            }
        }
    }

    res
}
