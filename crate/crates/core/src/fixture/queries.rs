use serde::{Deserialize, Serialize};

use super::generate::PodLayout;
use super::vocab::{PodStyle, SCHEMA, SOC};
use crate::rdf::vocab::rdf;

pub const MESSAGES_OF_LIKED_USERS: &str = "Messages of liked users";
pub const FORUMS_A_USER_POSTED: &str = "Forums a user posted";
pub const USER_INFORMATION: &str = "User information";
pub const POSTS_OF_A_USER: &str = "Posts of a user";
pub const TAG_DISTRIBUTION: &str = "Tag distribution";

pub const QUERY_NAMES: [&str; 5] = [
    MESSAGES_OF_LIKED_USERS,
    FORUMS_A_USER_POSTED,
    USER_INFORMATION,
    POSTS_OF_A_USER,
    TAG_DISTRIBUTION,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedQuery {
    pub name: String,
    pub text: String,
    pub seeds: Vec<String>,
}

fn prologue() -> String {
    format!("PREFIX s: <{SCHEMA}>\nPREFIX soc: <{SOC}>\nPREFIX rdf: <{}>\n", rdf::NS)
}

/// The five demonstration queries over the canonical vocabulary, each with
/// the profile document it starts from.
pub fn canonical_queries(layout: &PodLayout) -> Vec<NamedQuery> {
    let first_v1 = layout.first_of(PodStyle::V1).unwrap_or(0);
    let first_v2 = layout.first_of(PodStyle::V2).or(layout.first_of(PodStyle::V1)).unwrap_or(0);
    let card = |i: usize| format!("{}card", layout.pod_prefix(i));
    let p = prologue();
    let q = |name: &str, seed: usize, body: String| NamedQuery {
        name: name.to_owned(),
        text: format!("{p}{body}"),
        seeds: vec![card(seed)],
    };
    vec![
        q(
            MESSAGES_OF_LIKED_USERS,
            0,
            format!(
                "SELECT DISTINCT ?message ?creator WHERE {{\n  <{}> soc:likes ?liked .\n  ?liked s:author ?creator .\n  {{ ?message rdf:type soc:Post }} UNION {{ ?message rdf:type s:Comment }}\n  ?message s:author ?creator .\n}}\n",
                layout.person(0)
            ),
        ),
        q(
            FORUMS_A_USER_POSTED,
            first_v2,
            format!(
                "SELECT DISTINCT ?forum ?forumName WHERE {{\n  ?message s:author <{}> ;\n    soc:postedIn ?forum .\n  ?forum s:name ?forumName .\n}}\n",
                layout.person(first_v2)
            ),
        ),
        q(
            USER_INFORMATION,
            0,
            format!(
                "SELECT ?friend ?name WHERE {{\n  <{}> s:knows ?friend .\n  ?friend s:name ?name .\n}}\n",
                layout.person(0)
            ),
        ),
        q(
            POSTS_OF_A_USER,
            first_v1,
            format!(
                "SELECT ?post ?text WHERE {{\n  ?post rdf:type soc:Post ;\n    s:author <{}> ;\n    s:text ?text .\n}}\n",
                layout.person(first_v1)
            ),
        ),
        q(
            TAG_DISTRIBUTION,
            0,
            format!(
                "SELECT ?tag (COUNT(?message) AS ?count) WHERE {{\n  <{}> s:knows ?friend .\n  ?message s:author ?friend ;\n    s:about ?tag .\n}}\nGROUP BY ?tag\n",
                layout.person(0)
            ),
        ),
    ]
}
