//! Schema: ontology classes, property definitions, and the built-in CCPO
//! subset used by the validator and the assertion-time checks.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{Datatype, Iri};
use crate::vocab;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("subclass cycle through class {0}")]
    SubclassCycle(Iri),
    #[error("class {class} names unknown parent {parent}")]
    UnknownParent { class: Iri, parent: Iri },
    #[error("property {property} names unknown class {class} in its domain or range")]
    UnknownClassReference { property: Iri, class: Iri },
    #[error("property {property} declares inverse {inverse} which is not registered")]
    UnknownInverse { property: Iri, inverse: Iri },
}

/// A schema class with its parents and the classes it is disjoint with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaClass {
    pub name: Iri,
    pub parents: Vec<Iri>,
    pub disjoint_with: BTreeSet<Iri>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyKind {
    Object,
    Data,
}

/// Range of a property: object properties range over schema classes (or any
/// IRI when left open, e.g. for untyped individuals like `ccpo:green`), data
/// properties over datatype tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyRange {
    AnyIri,
    Class(Iri),
    Datatype(Datatype),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub name: Iri,
    /// Class the subject must belong to; `None` leaves the domain open
    /// (used for union domains such as `Product or Material`).
    pub domain: Option<Iri>,
    pub range: PropertyRange,
    pub inverse_of: Option<Iri>,
}

impl PropertyDef {
    pub fn kind(&self) -> PropertyKind {
        match self.range {
            PropertyRange::Datatype(_) => PropertyKind::Data,
            _ => PropertyKind::Object,
        }
    }
}

/// The schema: class hierarchy plus property definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    classes: BTreeMap<Iri, SchemaClass>,
    properties: BTreeMap<Iri, PropertyDef>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_class(&mut self, name: &str, parents: &[&str]) {
        self.classes.insert(
            Iri::new(name),
            SchemaClass {
                name: Iri::new(name),
                parents: parents.iter().map(|p| Iri::new(*p)).collect(),
                disjoint_with: BTreeSet::new(),
            },
        );
    }

    /// Declare two classes disjoint; the relation is kept symmetric.
    pub fn declare_disjoint(&mut self, a: &str, b: &str) {
        if let Some(c) = self.classes.get_mut(&Iri::new(a)) {
            c.disjoint_with.insert(Iri::new(b));
        }
        if let Some(c) = self.classes.get_mut(&Iri::new(b)) {
            c.disjoint_with.insert(Iri::new(a));
        }
    }

    pub fn add_property(&mut self, def: PropertyDef) {
        self.properties.insert(def.name.clone(), def);
    }

    /// Register `p` and `q` as inverses of each other.
    pub fn declare_inverse(&mut self, p: &str, q: &str) {
        if let Some(def) = self.properties.get_mut(&Iri::new(p)) {
            def.inverse_of = Some(Iri::new(q));
        }
        if let Some(def) = self.properties.get_mut(&Iri::new(q)) {
            def.inverse_of = Some(Iri::new(p));
        }
    }

    pub fn class(&self, iri: &Iri) -> Option<&SchemaClass> {
        self.classes.get(iri)
    }

    pub fn property(&self, iri: &Iri) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &SchemaClass> {
        self.classes.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    /// Transitive superclasses of `class`, excluding itself, in deterministic
    /// order.
    pub fn superclasses(&self, class: &Iri) -> Vec<Iri> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            if let Some(sc) = self.classes.get(&c) {
                for parent in &sc.parents {
                    if seen.insert(parent.clone()) {
                        out.push(parent.clone());
                        stack.push(parent.clone());
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn are_disjoint(&self, a: &Iri, b: &Iri) -> bool {
        self.classes
            .get(a)
            .is_some_and(|c| c.disjoint_with.contains(b))
    }

    /// Check structural invariants: parents exist, the subclass graph is
    /// acyclic, disjointness is symmetric, class references in properties
    /// resolve, and declared inverses are mutual.
    pub fn validate(&self) -> Result<(), SchemaError> {
        for class in self.classes.values() {
            for parent in &class.parents {
                if !self.classes.contains_key(parent) {
                    return Err(SchemaError::UnknownParent {
                        class: class.name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        // Cycle check: walk up from every class with a visited set.
        for class in self.classes.keys() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![class.clone()];
            while let Some(c) = stack.pop() {
                if !seen.insert(c.clone()) {
                    continue;
                }
                if let Some(sc) = self.classes.get(&c) {
                    for parent in &sc.parents {
                        if parent == class {
                            return Err(SchemaError::SubclassCycle(class.clone()));
                        }
                        stack.push(parent.clone());
                    }
                }
            }
        }
        for def in self.properties.values() {
            if let Some(domain) = &def.domain {
                if !self.classes.contains_key(domain) {
                    return Err(SchemaError::UnknownClassReference {
                        property: def.name.clone(),
                        class: domain.clone(),
                    });
                }
            }
            if let PropertyRange::Class(range) = &def.range {
                if !self.classes.contains_key(range) {
                    return Err(SchemaError::UnknownClassReference {
                        property: def.name.clone(),
                        class: range.clone(),
                    });
                }
            }
            if let Some(inverse) = &def.inverse_of {
                match self.properties.get(inverse) {
                    Some(other) if other.inverse_of.as_ref() == Some(&def.name) => {}
                    _ => {
                        return Err(SchemaError::UnknownInverse {
                            property: def.name.clone(),
                            inverse: inverse.clone(),
                        })
                    }
                }
            }
        }
        Ok(())
    }
}

fn object(name: &str, domain: Option<&str>, range: Option<&str>) -> PropertyDef {
    PropertyDef {
        name: Iri::new(name),
        domain: domain.map(Iri::new),
        range: match range {
            Some(r) => PropertyRange::Class(Iri::new(r)),
            None => PropertyRange::AnyIri,
        },
        inverse_of: None,
    }
}

fn data(name: &str, domain: Option<&str>, datatype: Datatype) -> PropertyDef {
    PropertyDef {
        name: Iri::new(name),
        domain: domain.map(Iri::new),
        range: PropertyRange::Datatype(datatype),
        inverse_of: None,
    }
}

/// Build the CCPO schema subset: the eight disjoint top classes, their
/// product/artifact subclasses, and every property the engine ships.
pub fn ccpo_schema() -> Schema {
    use vocab::*;

    let mut schema = Schema::new();

    let tops = [
        PRODUCT,
        MATERIAL,
        ACTIVITY,
        ACTOR,
        OWNERSHIP_RECORD,
        INFORMATION_BEARING_ARTIFACT,
        DICBM_PROPERTY,
        LOCATION,
    ];
    for top in tops {
        schema.add_class(top, &[]);
    }
    for (i, a) in tops.iter().enumerate() {
        for b in &tops[i + 1..] {
            schema.declare_disjoint(a, b);
        }
    }
    schema.add_class(COMPONENT, &[PRODUCT]);
    schema.add_class(GROUPED_COMPONENT, &[PRODUCT]);
    schema.add_class(DOCUMENT, &[INFORMATION_BEARING_ARTIFACT]);
    schema.add_class(BARCODE, &[INFORMATION_BEARING_ARTIFACT]);

    schema.add_property(object(HAS_COMPONENT, Some(PRODUCT), Some(COMPONENT)));
    schema.add_property(object(IS_COMPONENT_OF, Some(COMPONENT), Some(PRODUCT)));
    schema.declare_inverse(HAS_COMPONENT, IS_COMPONENT_OF);
    schema.add_property(object(HAS_VIRGIN_MATERIAL, Some(COMPONENT), Some(MATERIAL)));
    schema.add_property(object(
        HAS_NON_VIRGIN_MATERIAL,
        Some(COMPONENT),
        Some(MATERIAL),
    ));
    schema.add_property(object(WAS_GENERATED_BY, Some(PRODUCT), Some(ACTIVITY)));
    // prov:used ranges over Product or Material; union ranges stay open.
    schema.add_property(object(USED, Some(ACTIVITY), None));
    schema.add_property(object(WAS_ASSOCIATED_WITH, Some(ACTIVITY), Some(ACTOR)));
    schema.add_property(object(
        WAS_INVOLVED_IN_ACTIVITY,
        Some(PRODUCT),
        Some(ACTIVITY),
    ));
    schema.add_property(object(
        HAS_OWNERSHIP_RECORD,
        Some(PRODUCT),
        Some(OWNERSHIP_RECORD),
    ));
    schema.add_property(object(OWNED_BY, Some(OWNERSHIP_RECORD), Some(ACTOR)));
    // Domain is Product or Material.
    schema.add_property(object(
        HAS_INFORMATION_ARTIFACT,
        None,
        Some(INFORMATION_BEARING_ARTIFACT),
    ));
    schema.add_property(object(HAS_PROPERTY, Some(PRODUCT), Some(DICBM_PROPERTY)));
    // Health states, demand levels, and routes are untyped individuals.
    schema.add_property(object(HAS_HEALTH_STATE, Some(PRODUCT), None));
    schema.add_property(object(HAS_EOL_STRATEGY, Some(PRODUCT), Some(DOCUMENT)));
    schema.add_property(object(HAS_MARKET_DEMAND, Some(PRODUCT), None));
    schema.add_property(object(SUGGESTED_EOL_ROUTE, Some(PRODUCT), None));

    // Activities and ownership records are both finite-time processes.
    schema.add_property(data(STARTED_AT_TIME, None, Datatype::Timestamp));
    schema.add_property(data(ENDED_AT_TIME, None, Datatype::Timestamp));
    schema.add_property(data(
        REFERENCE_SERVICE_LIFE,
        Some(PRODUCT),
        Datatype::Integer,
    ));
    schema.add_property(data(ACTUAL_SERVICE_LIFE, Some(PRODUCT), Datatype::Integer));
    schema.add_property(data(AT_EOL, Some(PRODUCT), Datatype::Boolean));
    schema.add_property(data(EOL_STRATEGY_EXISTS, Some(PRODUCT), Datatype::Boolean));
    schema.add_property(data(
        DESIGN_FOR_DISASSEMBLY,
        Some(PRODUCT),
        Datatype::Boolean,
    ));
    // Documents carry URL strings pointing at externally hosted product data.
    schema.add_property(data(
        HAS_LOCATION,
        Some(INFORMATION_BEARING_ARTIFACT),
        Datatype::String,
    ));
    schema.add_property(data(PROPERTY_VALUE, Some(DICBM_PROPERTY), Datatype::Decimal));

    schema
        .validate()
        .expect("built-in CCPO schema must be structurally valid");
    schema
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_schema_is_valid() {
        let schema = ccpo_schema();
        assert!(schema.validate().is_ok());
        assert!(schema.class(&Iri::new(vocab::GROUPED_COMPONENT)).is_some());
    }

    #[test]
    fn top_classes_are_pairwise_disjoint() {
        let schema = ccpo_schema();
        let tops = [
            vocab::PRODUCT,
            vocab::MATERIAL,
            vocab::ACTIVITY,
            vocab::ACTOR,
            vocab::OWNERSHIP_RECORD,
            vocab::INFORMATION_BEARING_ARTIFACT,
            vocab::DICBM_PROPERTY,
            vocab::LOCATION,
        ];
        for a in tops {
            for b in tops {
                if a != b {
                    assert!(
                        schema.are_disjoint(&Iri::new(a), &Iri::new(b)),
                        "{a} and {b} should be disjoint"
                    );
                }
            }
        }
    }

    #[test]
    fn superclasses_are_transitive() {
        let mut schema = ccpo_schema();
        schema.add_class("http://example.org/SteelFacing", &[vocab::COMPONENT]);
        let sups = schema.superclasses(&Iri::new("http://example.org/SteelFacing"));
        assert!(sups.contains(&Iri::new(vocab::COMPONENT)));
        assert!(sups.contains(&Iri::new(vocab::PRODUCT)));
    }

    #[test]
    fn subclass_cycles_are_rejected() {
        let mut schema = Schema::new();
        schema.add_class("http://example.org/A", &["http://example.org/B"]);
        schema.add_class("http://example.org/B", &["http://example.org/A"]);
        assert_eq!(
            schema.validate(),
            Err(SchemaError::SubclassCycle(Iri::new("http://example.org/A")))
        );
    }

    #[test]
    fn inverse_declaration_is_symmetric() {
        let schema = ccpo_schema();
        let p = schema.property(&Iri::new(vocab::HAS_COMPONENT)).unwrap();
        let q = schema.property(&Iri::new(vocab::IS_COMPONENT_OF)).unwrap();
        assert_eq!(p.inverse_of, Some(Iri::new(vocab::IS_COMPONENT_OF)));
        assert_eq!(q.inverse_of, Some(Iri::new(vocab::HAS_COMPONENT)));
    }
}
