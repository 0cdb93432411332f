use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vocab::{PodStyle, Terms};
use super::{FixtureConfig, NetworkConfiguration};
use crate::rdf::vocab::{rdf, semmap};

/// Layout decisions shared by document generation and query construction.
#[derive(Debug, Clone)]
pub struct PodLayout {
    pub base: String,
    pub styles: Vec<PodStyle>,
    pub forum_count: usize,
}

impl PodLayout {
    pub fn pod_prefix(&self, i: usize) -> String {
        format!("{}u{i}/", self.base)
    }

    pub fn person(&self, i: usize) -> String {
        format!("{}card#me", self.pod_prefix(i))
    }

    pub fn forum(&self, m: usize) -> String {
        format!("{}forums/f{m}", self.base)
    }

    pub fn first_of(&self, style: PodStyle) -> Option<usize> {
        self.styles.iter().position(|s| *s == style)
    }

    pub fn variant_pods(&self) -> impl Iterator<Item = usize> + '_ {
        self.styles.iter().enumerate().filter(|(_, s)| **s != PodStyle::Canonical).map(|(i, _)| i)
    }
}

pub(super) struct Generated {
    pub layout: PodLayout,
    pub documents: BTreeMap<String, String>,
    pub rule_set_documents: Vec<String>,
}

fn is_comment(k: usize) -> bool {
    k % 4 == 3
}

pub(super) fn generate_documents(cfg: &FixtureConfig) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.random_seed);
    let n = cfg.pod_count;
    let fraction = match cfg.configuration {
        NetworkConfiguration::Base => 0.0,
        NetworkConfiguration::Heterogeneous => cfg.variant_fraction,
    };
    let variant_count = ((n as f64) * fraction).round() as usize;

    let mut candidates: Vec<usize> = (1..n).collect();
    candidates.shuffle(&mut rng);
    let mut variants: Vec<usize> = if variant_count >= n {
        (0..n).collect()
    } else {
        candidates.into_iter().take(variant_count).collect()
    };
    variants.sort_unstable();
    let mut styles = vec![PodStyle::Canonical; n];
    for (r, i) in variants.iter().enumerate() {
        styles[*i] = if r % 2 == 0 { PodStyle::V1 } else { PodStyle::V2 };
    }
    let layout = PodLayout {
        base: cfg.base.clone(),
        styles,
        forum_count: (n / 2).max(2),
    };

    let mut knows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let connect = |a: usize, b: usize, knows: &mut [BTreeSet<usize>]| {
        if a != b {
            knows[a].insert(b);
            knows[b].insert(a);
        }
    };
    for i in 0..n {
        connect(i, (i + 1) % n, &mut knows);
    }
    for i in 0..n {
        if n > 2 {
            let j = rng.random_range(0..n);
            connect(i, j, &mut knows);
        }
    }
    if let Some(&v) = variants.iter().find(|&&v| v != 0) {
        connect(0, v, &mut knows);
    }

    let mut documents = BTreeMap::new();
    let mut rule_set_documents = Vec::new();
    for m in 0..layout.forum_count {
        let c = Terms::canonical();
        documents.insert(
            layout.forum(m),
            format!(
                "<#forum> <{}> <{}> ;\n    <{}> \"Forum {m}\" .\n",
                rdf::TYPE,
                c.forum,
                c.name
            ),
        );
    }

    for (i, friends_of) in knows.iter().enumerate() {
        let style = layout.styles[i];
        let t = Terms::for_style(style);
        let prefix = layout.pod_prefix(i);

        let mut card = String::new();
        let _ = writeln!(card, "<#me> <{}> <{}> ;", rdf::TYPE, t.person);
        let _ = writeln!(card, "    <{}> \"User {i}\" ;", t.name);
        if !friends_of.is_empty() {
            let friends: Vec<String> = friends_of.iter().map(|j| format!("<{}>", layout.person(*j))).collect();
            let _ = writeln!(card, "    <{}> {} ;", t.knows, friends.join(", "));
        }
        let _ = writeln!(card, "    <{}> <posts> ;", t.has_posts);
        let _ = writeln!(card, "    <{}> <likes> .", t.has_likes);
        if style != PodStyle::Canonical {
            let _ = writeln!(card, "<> <{}> <rules> .", semmap::RULE_SET_LOCATION);
        }
        documents.insert(format!("{prefix}card"), card);

        let mut posts = String::new();
        for k in 0..cfg.posts_per_pod {
            let tag = t.tag(rng.random_range(0..cfg.tag_vocabulary_size));
            if is_comment(k) {
                let (j, target) = random_post(&mut rng, n, i, cfg.posts_per_pod);
                let _ = writeln!(posts, "<#p{k}> <{}> <{}> ;", rdf::TYPE, t.comment);
                let _ = writeln!(posts, "    <{}> <{}posts#p{target}> ;", t.comment_of, layout.pod_prefix(j));
            } else {
                let forum = rng.random_range(0..layout.forum_count);
                let _ = writeln!(posts, "<#p{k}> <{}> <{}> ;", rdf::TYPE, t.post);
                let _ = writeln!(posts, "    <{}> <{}#forum> ;", t.posted_in, layout.forum(forum));
            }
            let _ = writeln!(posts, "    <{}> <card#me> ;", t.author);
            let _ = writeln!(posts, "    <{}> \"Message {k} by user {i}\"@en ;", t.text);
            let _ = writeln!(posts, "    <{}> <{tag}> .", t.about);
        }
        documents.insert(format!("{prefix}posts"), posts);

        let mut liked = BTreeSet::new();
        let available = (n.saturating_sub(1)).max(1) * cfg.posts_per_pod;
        while liked.len() < cfg.likes_per_pod.min(available) {
            liked.insert(random_post(&mut rng, n, i, cfg.posts_per_pod));
        }
        let mut likes = String::new();
        if !liked.is_empty() {
            let objects: Vec<String> = liked
                .iter()
                .map(|(j, k)| format!("<{}posts#p{k}>", layout.pod_prefix(*j)))
                .collect();
            let _ = writeln!(likes, "<card#me> <{}> {} .", t.likes, objects.join(",\n    "));
        }
        documents.insert(format!("{prefix}likes"), likes);

        if style != PodStyle::Canonical {
            let rules = rule_set_text(&prefix, &t, cfg.tag_vocabulary_size);
            let iri = format!("{prefix}rules");
            documents.insert(iri.clone(), rules);
            rule_set_documents.push(iri);
        }
    }
    Generated {
        layout,
        documents,
        rule_set_documents,
    }
}

/// A message of some other pod (any pod when there is only one).
fn random_post(rng: &mut ChaCha8Rng, n: usize, me: usize, posts: usize) -> (usize, usize) {
    let j = if n == 1 {
        me
    } else {
        (me + 1 + rng.random_range(0..n - 1)) % n
    };
    (j, rng.random_range(0..posts.max(1)))
}

fn rule_set_text(prefix: &str, terms: &Terms, tag_count: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@prefix semmap: <{}> .", semmap::NS);
    let _ = writeln!(out, "<#subweb> a semmap:Subweb ;\n    semmap:iriPrefix \"{prefix}\" .");
    for (n, (source, relation, target)) in terms.mappings_to_canonical(tag_count).into_iter().enumerate() {
        let local = relation.iri().strip_prefix(semmap::NS).expect("semmap relation");
        let _ = writeln!(
            out,
            "<#m{n}> a semmap:Mapping ;\n    semmap:subjectId <{source}> ;\n    semmap:mappingRelation semmap:{local} ;\n    semmap:objectId <{target}> ;\n    semmap:scope <#subweb> ."
        );
    }
    out
}
