//! Namespace constants.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
}

/// Rule-set vocabulary.
pub mod semmap {
    pub const NS: &str = "https://example.org/semmap#";
    pub const SUBWEB: &str = "https://example.org/semmap#Subweb";
    pub const MAPPING: &str = "https://example.org/semmap#Mapping";
    pub const IRI_PREFIX: &str = "https://example.org/semmap#iriPrefix";
    pub const SUBJECT_ID: &str = "https://example.org/semmap#subjectId";
    pub const OBJECT_ID: &str = "https://example.org/semmap#objectId";
    pub const MAPPING_RELATION: &str = "https://example.org/semmap#mappingRelation";
    pub const SCOPE: &str = "https://example.org/semmap#scope";
    pub const RULE_SET_LOCATION: &str = "https://example.org/semmap#ruleSetLocation";

    pub const EQUIVALENT_PROPERTY: &str = "https://example.org/semmap#equivalentProperty";
    pub const SUB_PROPERTY_OF: &str = "https://example.org/semmap#subPropertyOf";
    pub const EQUIVALENT_CLASS: &str = "https://example.org/semmap#equivalentClass";
    pub const SUB_CLASS_OF: &str = "https://example.org/semmap#subClassOf";
    pub const SAME_AS: &str = "https://example.org/semmap#sameAs";
}
