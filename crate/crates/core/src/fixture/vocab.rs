//! Vocabularies used by generated pods.

use crate::alignment::Relation;

pub const SCHEMA: &str = "http://schema.org/";
pub const SCHEMA_HTTPS: &str = "https://schema.org/";
pub const SOC: &str = "http://vocab.example.org/soc#";
pub const SOC_HTTPS: &str = "https://vocab.example.org/soc#";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
pub const ALT: &str = "http://vocab.example.org/alt#";
pub const TAGS: &str = "http://tags.example.org/";
pub const TOPICS: &str = "http://topics.example.org/";

/// Namespaces the generated documents use as vocabulary, never as pod data.
pub fn vocabulary_namespaces() -> Vec<String> {
    [SCHEMA, SCHEMA_HTTPS, SOC, SOC_HTTPS, FOAF, ALT, TAGS, TOPICS]
        .into_iter()
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PodStyle {
    Canonical,
    /// The https form of every canonical term.
    V1,
    /// Renamed terms from other vocabularies.
    V2,
}

/// The terms one pod style writes with.
#[derive(Debug, Clone)]
pub struct Terms {
    pub person: String,
    pub forum: String,
    pub post: String,
    pub comment: String,
    pub name: String,
    pub knows: String,
    pub has_posts: String,
    pub has_likes: String,
    pub author: String,
    pub text: String,
    pub posted_in: String,
    pub comment_of: String,
    pub about: String,
    pub likes: String,
    tag_ns: &'static str,
}

impl Terms {
    pub fn for_style(style: PodStyle) -> Self {
        let (schema, soc) = match style {
            PodStyle::V1 => (SCHEMA_HTTPS, SOC_HTTPS),
            _ => (SCHEMA, SOC),
        };
        let mut t = Terms {
            person: format!("{schema}Person"),
            forum: format!("{soc}Forum"),
            post: format!("{soc}Post"),
            comment: format!("{schema}Comment"),
            name: format!("{schema}name"),
            knows: format!("{schema}knows"),
            has_posts: format!("{soc}hasPosts"),
            has_likes: format!("{soc}hasLikes"),
            author: format!("{schema}author"),
            text: format!("{schema}text"),
            posted_in: format!("{soc}postedIn"),
            comment_of: format!("{soc}commentOf"),
            about: format!("{schema}about"),
            likes: format!("{soc}likes"),
            tag_ns: TAGS,
        };
        if style == PodStyle::V2 {
            t.name = format!("{FOAF}name");
            t.comment = format!("{ALT}Reply");
            t.comment_of = format!("{ALT}replyOf");
            t.posted_in = format!("{ALT}publishedIn");
            t.tag_ns = TOPICS;
        }
        t
    }

    pub fn canonical() -> Self {
        Self::for_style(PodStyle::Canonical)
    }

    pub fn tag(&self, k: usize) -> String {
        format!("{}t{k}", self.tag_ns)
    }

    fn schema_terms(&self) -> Vec<(&str, Relation)> {
        use Relation::*;
        vec![
            (&self.person, ClassEquivalence),
            (&self.forum, ClassEquivalence),
            (&self.post, ClassEquivalence),
            (&self.comment, if self.comment.starts_with(ALT) { ClassSpecialization } else { ClassEquivalence }),
            (&self.name, PredicateEquivalence),
            (&self.knows, PredicateEquivalence),
            (&self.has_posts, PredicateEquivalence),
            (&self.has_likes, PredicateEquivalence),
            (&self.author, PredicateEquivalence),
            (&self.text, PredicateEquivalence),
            (&self.posted_in, PredicateEquivalence),
            (
                &self.comment_of,
                if self.comment_of.starts_with(ALT) { PredicateSpecialization } else { PredicateEquivalence },
            ),
            (&self.about, PredicateEquivalence),
            (&self.likes, PredicateEquivalence),
        ]
    }

    /// Rewrites from this style's terms onto the canonical ones.
    pub fn mappings_to_canonical(&self, tag_count: usize) -> Vec<(String, Relation, String)> {
        let canonical = Terms::canonical();
        let mut out: Vec<(String, Relation, String)> = self
            .schema_terms()
            .into_iter()
            .zip(canonical.schema_terms())
            .filter(|((mine, _), (theirs, _))| mine != theirs)
            .map(|((mine, rel), (theirs, _))| (mine.to_owned(), rel, theirs.to_owned()))
            .collect();
        if self.tag_ns != canonical.tag_ns {
            out.extend((0..tag_count).map(|k| (self.tag(k), Relation::EntityIdentity, canonical.tag(k))));
        }
        out
    }
}
