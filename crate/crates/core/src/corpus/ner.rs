//! CoNLL-2003-style NER corpus: one token per line with whitespace-separated
//! columns (first column surface form, last column NER tag), blank lines
//! between sentences, `-DOCSTART-` lines skipped.
//!
//! Both common tag schemes are accepted. Under IOB1, `I-X` opens an entity
//! and `B-X` only separates adjacent same-type entities; under BIO2, `B-X`
//! opens and `I-X` continues. Extraction is tolerant the way the standard
//! conlleval script is: an `I-X` with no open entity of type `X` starts one.
//! Serialization always emits the canonical tags of the declared scheme.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// The four CoNLL-2003 entity types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Per,
    Org,
    Loc,
    Misc,
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityType::Per => "PER",
            EntityType::Org => "ORG",
            EntityType::Loc => "LOC",
            EntityType::Misc => "MISC",
        })
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PER" => Ok(EntityType::Per),
            "ORG" => Ok(EntityType::Org),
            "LOC" => Ok(EntityType::Loc),
            "MISC" => Ok(EntityType::Misc),
            other => Err(Error::invalid(format!("unknown entity type {other:?}"))),
        }
    }
}

/// Tagging scheme of an NER file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagScheme {
    /// CoNLL-2003 original: `I-X` opens, `B-X` separates adjacent entities.
    #[default]
    Iob1,
    /// `B-X` opens every entity, `I-X` continues it.
    Bio2,
}

impl FromStr for TagScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iob1" => Ok(TagScheme::Iob1),
            "bio2" | "iob2" => Ok(TagScheme::Bio2),
            other => Err(Error::invalid(format!("unknown tag scheme {other:?}"))),
        }
    }
}

/// A parsed NER tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NerTag {
    Outside,
    Begin(EntityType),
    Inside(EntityType),
}

impl fmt::Display for NerTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NerTag::Outside => f.write_str("O"),
            NerTag::Begin(t) => write!(f, "B-{t}"),
            NerTag::Inside(t) => write!(f, "I-{t}"),
        }
    }
}

impl FromStr for NerTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(NerTag::Outside);
        }
        match s.split_once('-') {
            Some(("B", t)) => Ok(NerTag::Begin(t.parse()?)),
            Some(("I", t)) => Ok(NerTag::Inside(t.parse()?)),
            _ => Err(Error::invalid(format!("unknown tag prefix in {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerToken {
    pub form: String,
    pub tag: NerTag,
}

/// An entity span; `end` is exclusive and `end - start >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entity {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub entity_type: EntityType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerCorpus {
    sentences: Vec<Vec<NerToken>>,
    entities: Vec<Entity>,
    scheme: TagScheme,
}

impl NerCorpus {
    /// Build a corpus from tagged sentences, extracting entity spans.
    pub fn from_sentences(sentences: Vec<Vec<NerToken>>, scheme: TagScheme) -> Self {
        let entities = extract_entities(&sentences);
        Self {
            sentences,
            entities,
            scheme,
        }
    }

    pub fn sentences(&self) -> &[Vec<NerToken>] {
        &self.sentences
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn scheme(&self) -> TagScheme {
        self.scheme
    }

    pub fn entities_of_sentence(&self, sentence: usize) -> impl Iterator<Item = &Entity> {
        self.entities
            .iter()
            .filter(move |e| e.sentence == sentence)
    }

    /// Per-token entity type (`None` = outside) for one sentence.
    pub fn token_entity_types(&self, sentence: usize) -> Vec<Option<EntityType>> {
        let mut types = vec![None; self.sentences[sentence].len()];
        for e in self.entities_of_sentence(sentence) {
            for slot in &mut types[e.start..e.end] {
                *slot = Some(e.entity_type);
            }
        }
        types
    }

    /// Canonical tags for one sentence regenerated from the entity spans
    /// under the corpus scheme.
    pub fn canonical_tags(&self, sentence: usize) -> Vec<NerTag> {
        let mut tags = vec![NerTag::Outside; self.sentences[sentence].len()];
        let mut spans: Vec<&Entity> = self.entities_of_sentence(sentence).collect();
        spans.sort_by_key(|e| e.start);
        let mut prev: Option<&Entity> = None;
        for e in spans {
            for tag in &mut tags[e.start..e.end] {
                *tag = NerTag::Inside(e.entity_type);
            }
            let begins = match self.scheme {
                TagScheme::Bio2 => true,
                // IOB1 uses B- only when the previous token ends a same-type entity.
                TagScheme::Iob1 => {
                    prev.is_some_and(|p| p.end == e.start && p.entity_type == e.entity_type)
                }
            };
            if begins {
                tags[e.start] = NerTag::Begin(e.entity_type);
            }
            prev = Some(e);
        }
        tags
    }

    /// Serialize as `form tag` lines with blank lines between sentences,
    /// using canonical tags of the corpus scheme.
    pub fn write_conll<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, sentence) in self.sentences.iter().enumerate() {
            if s > 0 {
                writeln!(w)?;
            }
            for (token, tag) in sentence.iter().zip(self.canonical_tags(s)) {
                writeln!(w, "{} {}", token.form, tag)?;
            }
        }
        Ok(())
    }
}

/// Parse a CoNLL-2003-style stream under the declared scheme.
pub fn parse_ner<R: BufRead>(reader: R, scheme: TagScheme) -> Result<NerCorpus> {
    let mut sentences = Vec::new();
    let mut current: Vec<NerToken> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        let Some(form) = fields.next() else {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        };
        if form == "-DOCSTART-" {
            continue;
        }
        let tag_field = fields
            .last()
            .ok_or_else(|| Error::parse(lineno, "expected at least two columns"))?;
        let tag = tag_field
            .parse::<NerTag>()
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        current.push(NerToken {
            form: form.to_string(),
            tag,
        });
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(NerCorpus::from_sentences(sentences, scheme))
}

fn extract_entities(sentences: &[Vec<NerToken>]) -> Vec<Entity> {
    let mut entities = Vec::new();
    for (s, sentence) in sentences.iter().enumerate() {
        let mut open: Option<(EntityType, usize)> = None;
        let close = |open: &mut Option<(EntityType, usize)>, end: usize, out: &mut Vec<Entity>| {
            if let Some((entity_type, start)) = open.take() {
                out.push(Entity {
                    sentence: s,
                    start,
                    end,
                    entity_type,
                });
            }
        };
        for (i, token) in sentence.iter().enumerate() {
            match token.tag {
                NerTag::Outside => close(&mut open, i, &mut entities),
                NerTag::Begin(t) => {
                    close(&mut open, i, &mut entities);
                    open = Some((t, i));
                }
                NerTag::Inside(t) => match open {
                    Some((cur, _)) if cur == t => {}
                    _ => {
                        close(&mut open, i, &mut entities);
                        open = Some((t, i));
                    }
                },
            }
        }
        close(&mut open, sentence.len(), &mut entities);
    }
    entities
}
