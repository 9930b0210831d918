use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{CorpusError, DocumentRecord};

/// A training input symbol.
///
/// The derived ordering is the catalog ordering: languages before task-years,
/// languages by code, task-years by category then ascending year.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Language(String),
    TaskYear { category: String, year: i32 },
}

impl Entity {
    pub fn language(code: impl Into<String>) -> Self {
        Entity::Language(code.into())
    }

    pub fn task_year(category: impl Into<String>, year: i32) -> Self {
        Entity::TaskYear {
            category: category.into(),
            year,
        }
    }

    pub fn is_language(&self) -> bool {
        matches!(self, Entity::Language(_))
    }

    /// Parses a canonical name. A name whose last `_`-separated piece is an
    /// integer is a task-year, anything else is a language code.
    pub fn parse(name: &str) -> Option<Self> {
        if name.is_empty() {
            return None;
        }
        match name.rsplit_once('_') {
            Some((category, year)) if !category.is_empty() => match year.parse::<i32>() {
                Ok(year) => Some(Entity::task_year(category, year)),
                Err(_) => Some(Entity::language(name)),
            },
            _ => Some(Entity::language(name)),
        }
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Language(code) => f.write_str(code),
            Entity::TaskYear { category, year } => write!(f, "{category}_{year}"),
        }
    }
}

/// Stable, bijective indexing of all entities seen in a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityCatalog {
    entities: Vec<Entity>,
    index: HashMap<Entity, usize>,
}

impl EntityCatalog {
    /// Builds a catalog from a sorted, duplicate-free entity list.
    pub fn from_sorted(entities: Vec<Entity>) -> Option<Self> {
        if entities.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        let index = entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Some(Self { entities, index })
    }

    pub fn build(corpus: &[DocumentRecord]) -> Result<Self, CorpusError> {
        if corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let set: BTreeSet<Entity> = corpus.iter().flat_map(DocumentRecord::entities).collect();
        Ok(Self::from_sorted(set.into_iter().collect()).expect("BTreeSet iterates sorted"))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn get(&self, idx: usize) -> Option<&Entity> {
        self.entities.get(idx)
    }

    pub fn index_of(&self, entity: &Entity) -> Option<usize> {
        self.index.get(entity).copied()
    }

    /// Indices of all language entities, in catalog order.
    pub fn language_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entities
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_language())
            .map(|(i, _)| i)
    }

    pub fn names(&self) -> Vec<String> {
        self.entities.iter().map(ToString::to_string).collect()
    }
}

/// Convenience wrapper matching the corpus-level operation name.
pub fn build_entity_catalog(corpus: &[DocumentRecord]) -> Result<EntityCatalog, CorpusError> {
    EntityCatalog::build(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, cat: &str, year: i32, langs: &[&str]) -> DocumentRecord {
        DocumentRecord {
            id: id.into(),
            task_category: cat.into(),
            year,
            languages: langs.iter().map(|s| s.to_string()).collect(),
            tokens: vec!["w".into()],
        }
    }

    #[test]
    fn single_record() {
        let cat = EntityCatalog::build(&[rec("a", "food", 2018, &["spa"])]).unwrap();
        assert_eq!(cat.names(), vec!["spa", "food_2018"]);
    }

    #[test]
    fn shared_task_year_dedups() {
        let cat = EntityCatalog::build(&[
            rec("a", "food", 2018, &[]),
            rec("b", "food", 2018, &["spa"]),
        ])
        .unwrap();
        assert_eq!(cat.len(), 2);
    }

    #[test]
    fn years_produce_one_entity_each() {
        let corpus: Vec<_> = (2015..=2019)
            .map(|y| rec(&format!("c{y}"), "computers", y, &[]))
            .collect();
        let cat = EntityCatalog::build(&corpus).unwrap();
        assert_eq!(cat.len(), 5);
        assert_eq!(cat.names()[0], "computers_2015");
        assert_eq!(cat.names()[4], "computers_2019");
    }

    #[test]
    fn ordering_and_bijection() {
        let cat = EntityCatalog::build(&[
            rec("a", "travel", 2019, &["spa", "jpn"]),
            rec("b", "arts", 2020, &["ara"]),
            rec("c", "arts", 2018, &[]),
        ])
        .unwrap();
        assert_eq!(
            cat.names(),
            vec!["ara", "jpn", "spa", "arts_2018", "arts_2020", "travel_2019"]
        );
        for (i, e) in cat.entities().iter().enumerate() {
            assert_eq!(cat.index_of(e), Some(i));
        }
        assert_eq!(cat.language_indices().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn existing_indices_stable_under_redundant_records() {
        let mut corpus = vec![
            rec("a", "food", 2018, &["spa"]),
            rec("b", "arts", 2019, &["jpn"]),
        ];
        let before = EntityCatalog::build(&corpus).unwrap();
        corpus.push(rec("c", "arts", 2019, &["spa", "jpn"]));
        assert_eq!(EntityCatalog::build(&corpus).unwrap(), before);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            EntityCatalog::build(&[]),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn parse_canonical_names() {
        assert_eq!(
            Entity::parse("computers_2019"),
            Some(Entity::task_year("computers", 2019))
        );
        assert_eq!(Entity::parse("spa"), Some(Entity::language("spa")));
        assert_eq!(Entity::parse("pt_br"), Some(Entity::language("pt_br")));
        assert_eq!(Entity::parse(""), None);
        let e = Entity::task_year("home_garden", 2011);
        assert_eq!(Entity::parse(&e.to_string()), Some(e));
    }
}
