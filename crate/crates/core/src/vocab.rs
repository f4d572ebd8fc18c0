//! Namespace and term constants for the CCPO schema subset.

use crate::term::{Iri, PrefixMap};

pub const CCPO_NS: &str = "http://www.semanticweb.org/ccpo#";
pub const PROV_NS: &str = "http://www.w3.org/ns/prov#";
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const CCO_NS: &str = "http://www.ontologyrepository.com/CommonCoreOntologies/";
pub const DICBM_NS: &str = "https://w3id.org/digitalconstruction/BuildingMaterials#";

macro_rules! ccpo {
    ($local:literal) => {
        concat!("http://www.semanticweb.org/ccpo#", $local)
    };
}
macro_rules! prov {
    ($local:literal) => {
        concat!("http://www.w3.org/ns/prov#", $local)
    };
}

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

// Classes. The eight top classes are pairwise disjoint.
pub const PRODUCT: &str = ccpo!("Product");
pub const COMPONENT: &str = ccpo!("Component");
pub const GROUPED_COMPONENT: &str = ccpo!("GroupedComponent");
pub const MATERIAL: &str = ccpo!("Material");
pub const ACTIVITY: &str = prov!("Activity");
pub const ACTOR: &str = ccpo!("Actor");
pub const OWNERSHIP_RECORD: &str = ccpo!("OwnershipRecord");
pub const INFORMATION_BEARING_ARTIFACT: &str =
    "http://www.ontologyrepository.com/CommonCoreOntologies/InformationBearingArtifact";
pub const DOCUMENT: &str = ccpo!("Document");
pub const BARCODE: &str = ccpo!("Barcode");
pub const DICBM_PROPERTY: &str = "https://w3id.org/digitalconstruction/BuildingMaterials#Property";
pub const LOCATION: &str = ccpo!("Location");

// Object properties.
pub const HAS_COMPONENT: &str = ccpo!("hasComponent");
pub const IS_COMPONENT_OF: &str = ccpo!("isComponentOf");
pub const HAS_VIRGIN_MATERIAL: &str = ccpo!("hasVirginMaterial");
pub const HAS_NON_VIRGIN_MATERIAL: &str = ccpo!("hasNonVirginMaterial");
pub const WAS_GENERATED_BY: &str = prov!("wasGeneratedBy");
pub const USED: &str = prov!("used");
pub const WAS_ASSOCIATED_WITH: &str = prov!("wasAssociatedWith");
pub const WAS_INVOLVED_IN_ACTIVITY: &str = ccpo!("wasInvolvedInActivity");
pub const HAS_OWNERSHIP_RECORD: &str = ccpo!("hasOwnershipRecord");
pub const OWNED_BY: &str = ccpo!("ownedBy");
pub const HAS_INFORMATION_ARTIFACT: &str = ccpo!("hasInformationArtifact");
pub const HAS_PROPERTY: &str = ccpo!("hasProperty");
pub const HAS_HEALTH_STATE: &str = ccpo!("hasHealthState");
pub const HAS_EOL_STRATEGY: &str = ccpo!("hasEoLStrategy");
pub const HAS_MARKET_DEMAND: &str = ccpo!("hasMarketDemand");
pub const SUGGESTED_EOL_ROUTE: &str = ccpo!("suggestedEoLRoute");

// Data properties.
pub const STARTED_AT_TIME: &str = prov!("startedAtTime");
pub const ENDED_AT_TIME: &str = prov!("endedAtTime");
pub const REFERENCE_SERVICE_LIFE: &str = ccpo!("referenceServiceLife");
pub const ACTUAL_SERVICE_LIFE: &str = ccpo!("actualServiceLife");
pub const AT_EOL: &str = ccpo!("atEoL");
pub const EOL_STRATEGY_EXISTS: &str = ccpo!("eolStrategyExists");
pub const DESIGN_FOR_DISASSEMBLY: &str = ccpo!("designForDisassembly");
pub const HAS_LOCATION: &str = ccpo!("hasLocation");
pub const PROPERTY_VALUE: &str = ccpo!("propertyValue");

// Health-state and market-demand individuals (untyped plain IRIs).
pub const GREEN: &str = ccpo!("green");
pub const AMBER: &str = ccpo!("amber");
pub const RED: &str = ccpo!("red");
pub const DEMAND_HIGH: &str = ccpo!("high");
pub const DEMAND_AVG: &str = ccpo!("avg");
pub const DEMAND_LOW: &str = ccpo!("low");

// End-of-life route individuals, named as printed in the ruleset.
pub const STRONG_REUSE: &str = ccpo!("StrongReuseSuggestion");
pub const WEAK_REUSE: &str = ccpo!("WeakReuse_ConsiderRefurbishmentSoon");
pub const CANNOT_REUSE: &str = ccpo!("CannotReuseDueToPoorProductHealth");
pub const FOLLOW_STRATEGY: &str = ccpo!("FollowManufacturerEoLStrategy");
pub const RECYCLE: &str = ccpo!("RecycleDueToHighMarketDemand");
pub const DO_NOT_RECYCLE: &str = ccpo!("DoNotRecycleDueToLowDemand");
pub const LANDFILL: &str = ccpo!("SendToLandfill");

pub fn iri(s: &str) -> Iri {
    Iri::new(s)
}

/// The canonical prefix table shared by parsers, serializers, and traces.
pub fn standard_prefixes() -> PrefixMap {
    let mut map = PrefixMap::new();
    map.insert("ccpo", CCPO_NS);
    map.insert("prov", PROV_NS);
    map.insert("rdf", RDF_NS);
    map.insert("xsd", XSD_NS);
    map.insert("cco", CCO_NS);
    map.insert("dicbm", DICBM_NS);
    map
}
