// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! VerbNet-format verb-class lexicon.
//!
//! Only class ids and memberships are modeled. Each XML file holds one
//! `VNCLASS` root with `MEMBERS/MEMBER[@name]` and nested
//! `SUBCLASSES/VNSUBCLASS` elements.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::text::normalize;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}: malformed XML: {message}")]
    Xml { file: String, message: String },
    #[error("{file}: class element without an ID attribute")]
    MissingId { file: String },
    #[error("duplicate class id {id:?}")]
    DuplicateClass { id: String },
    #[error("class {id:?} references unknown class {missing:?}")]
    DanglingReference { id: String, missing: String },
    #[error("subclass cycle through {id:?}")]
    Cycle { id: String },
    #[error("unknown class id {0:?}")]
    UnknownClass(String),
}

/// One class or subclass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbClass {
    pub class_id: String,
    pub members: BTreeSet<String>,
    pub subclass_ids: Vec<String>,
    pub parent_id: Option<String>,
}

impl VerbClass {
    pub fn new<I, S>(class_id: impl Into<String>, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        VerbClass {
            class_id: class_id.into(),
            members: members.into_iter().map(|m| member_name(m.as_ref())).collect(),
            subclass_ids: Vec::new(),
            parent_id: None,
        }
    }

    /// Marks `child` as a subclass of `self`.
    pub fn adopt(&mut self, child: &mut VerbClass) {
        self.subclass_ids.push(child.class_id.clone());
        child.parent_id = Some(self.class_id.clone());
    }
}

/// Multi-word members use underscores in VerbNet; surface text uses spaces.
fn member_name(raw: &str) -> String {
    normalize(&raw.replace('_', " "))
}

/// Counts gathered while loading a lexicon directory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub files: usize,
    pub classes: usize,
    pub subclasses: usize,
    pub lemmas: usize,
    pub memberships: usize,
    pub empty_classes: Vec<String>,
    /// Subclass ids that do not extend their parent's id.
    pub irregular_subclass_ids: Vec<String>,
}

/// Immutable class index with the lemma → classes transpose.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerbLexicon {
    classes: BTreeMap<String, VerbClass>,
    inverse: BTreeMap<String, BTreeSet<String>>,
}

impl VerbLexicon {
    /// Indexes a set of classes, checking id uniqueness, parent/subclass
    /// references and acyclicity.
    pub fn from_classes(classes: Vec<VerbClass>) -> Result<Self, LexiconError> {
        let mut map = BTreeMap::new();
        for class in classes {
            let id = class.class_id.clone();
            if map.insert(id.clone(), class).is_some() {
                return Err(LexiconError::DuplicateClass { id });
            }
        }
        for class in map.values() {
            let refs = class.subclass_ids.iter().chain(class.parent_id.iter());
            for r in refs {
                if !map.contains_key(r) {
                    return Err(LexiconError::DanglingReference {
                        id: class.class_id.clone(),
                        missing: r.clone(),
                    });
                }
            }
        }
        for id in map.keys() {
            let mut seen = BTreeSet::new();
            let mut cursor = Some(id);
            while let Some(c) = cursor {
                if !seen.insert(c) {
                    return Err(LexiconError::Cycle { id: id.clone() });
                }
                cursor = map[c].parent_id.as_ref();
            }
        }
        let mut inverse: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for class in map.values() {
            for m in &class.members {
                inverse
                    .entry(m.clone())
                    .or_default()
                    .insert(class.class_id.clone());
            }
        }
        Ok(VerbLexicon {
            classes: map,
            inverse,
        })
    }

    pub fn class(&self, id: &str) -> Option<&VerbClass> {
        self.classes.get(id)
    }

    pub fn classes(&self) -> impl Iterator<Item = &VerbClass> {
        self.classes.values()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.inverse.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Every class (subclasses included) listing `lemma` as a member.
    pub fn classes_for_verb(&self, lemma: &str) -> BTreeSet<String> {
        self.inverse.get(lemma).cloned().unwrap_or_default()
    }

    /// Union of member sets; with `include_subclasses` the union also covers
    /// all transitive subclasses.
    pub fn members_of_classes<'a, I>(
        &self,
        ids: I,
        include_subclasses: bool,
    ) -> Result<BTreeSet<String>, LexiconError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&str> = Vec::new();
        for id in ids {
            if !self.classes.contains_key(id) {
                return Err(LexiconError::UnknownClass(id.clone()));
            }
            stack.push(id);
        }
        while let Some(id) = stack.pop() {
            let class = &self.classes[id];
            out.extend(class.members.iter().cloned());
            if include_subclasses {
                stack.extend(class.subclass_ids.iter().map(String::as_str));
            }
        }
        Ok(out)
    }

    fn report(&self, files: usize) -> LoadReport {
        let mut report = LoadReport {
            files,
            classes: self.classes.len(),
            lemmas: self.inverse.len(),
            ..Default::default()
        };
        for class in self.classes.values() {
            report.memberships += class.members.len();
            if class.members.is_empty() {
                report.empty_classes.push(class.class_id.clone());
            }
            if let Some(parent) = &class.parent_id {
                report.subclasses += 1;
                if !class.class_id.starts_with(&format!("{parent}-")) {
                    report.irregular_subclass_ids.push(class.class_id.clone());
                }
            }
        }
        report
    }
}

/// Parses one VerbNet XML document into its classes (root first).
pub fn parse_verbnet_xml(file: &str, text: &str) -> Result<Vec<VerbClass>, LexiconError> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(text, opts).map_err(|e| LexiconError::Xml {
        file: file.to_string(),
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "VNCLASS" {
        return Err(LexiconError::Xml {
            file: file.to_string(),
            message: format!("root element is <{}>, expected <VNCLASS>", root.tag_name().name()),
        });
    }
    let mut out = Vec::new();
    collect_class(file, root, None, &mut out)?;
    Ok(out)
}

fn collect_class(
    file: &str,
    node: roxmltree::Node<'_, '_>,
    parent: Option<usize>,
    out: &mut Vec<VerbClass>,
) -> Result<(), LexiconError> {
    let id = node
        .attribute("ID")
        .ok_or_else(|| LexiconError::MissingId {
            file: file.to_string(),
        })?
        .trim()
        .to_string();
    let members: Vec<&str> = node
        .children()
        .filter(|c| c.has_tag_name("MEMBERS"))
        .flat_map(|m| m.children().filter(|c| c.has_tag_name("MEMBER")))
        .filter_map(|m| m.attribute("name"))
        .collect();
    let index = out.len();
    let mut class = VerbClass::new(id, members);
    if let Some(p) = parent {
        class.parent_id = Some(out[p].class_id.clone());
        let child_id = class.class_id.clone();
        out[p].subclass_ids.push(child_id);
    }
    out.push(class);
    let subclasses = node
        .children()
        .filter(|c| c.has_tag_name("SUBCLASSES"))
        .flat_map(|s| s.children().filter(|c| c.has_tag_name("VNSUBCLASS")));
    for sub in subclasses {
        collect_class(file, sub, Some(index), out)?;
    }
    Ok(())
}

/// Loads every `*.xml` file of a directory (non-recursive, sorted by name).
pub fn load_verbnet(dir: &Path) -> Result<(VerbLexicon, LoadReport), LexiconError> {
    let io_err = |source| LexiconError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")))
        .collect();
    files.sort();
    let mut classes = Vec::new();
    for path in &files {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.clone(),
            source,
        })?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        classes.extend(parse_verbnet_xml(&name, &text)?);
    }
    let lexicon = VerbLexicon::from_classes(classes)?;
    let report = lexicon.report(files.len());
    if files.is_empty() {
        log::warn!("{}: no VerbNet XML files found", dir.display());
    }
    if !report.empty_classes.is_empty() {
        log::warn!("{} VerbNet classes have no members", report.empty_classes.len());
    }
    Ok((lexicon, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARENT_AND_SUB: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE VNCLASS SYSTEM "vn_class-3.dtd">
<VNCLASS ID="calibratable_cos-45.6" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance">
  <MEMBERS>
    <MEMBER name="rise" wn="rise%2:38:00" grouping=""/>
    <MEMBER name="climb" wn="" grouping=""/>
  </MEMBERS>
  <THEMROLES/>
  <FRAMES/>
  <SUBCLASSES>
    <VNSUBCLASS ID="calibratable_cos-45.6-1">
      <MEMBERS>
        <MEMBER name="soar"/>
        <MEMBER name="rise"/>
      </MEMBERS>
      <SUBCLASSES/>
    </VNSUBCLASS>
  </SUBCLASSES>
</VNCLASS>
"#;

    fn ids(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn fixture() -> VerbLexicon {
        VerbLexicon::from_classes(parse_verbnet_xml("f.xml", PARENT_AND_SUB).unwrap()).unwrap()
    }

    #[test]
    fn parses_nested_subclasses() {
        let classes = parse_verbnet_xml("f.xml", PARENT_AND_SUB).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].subclass_ids, ["calibratable_cos-45.6-1"]);
        assert_eq!(classes[1].parent_id.as_deref(), Some("calibratable_cos-45.6"));
        assert_eq!(classes[1].members, ids(&["rise", "soar"]));
    }

    #[test]
    fn lemma_in_parent_and_subclass_returns_both() {
        let lex = fixture();
        assert_eq!(
            lex.classes_for_verb("rise"),
            ids(&["calibratable_cos-45.6", "calibratable_cos-45.6-1"])
        );
        assert!(lex.classes_for_verb("zzz").is_empty());
    }

    #[test]
    fn members_with_and_without_subclasses() {
        let lex = fixture();
        let parent = ids(&["calibratable_cos-45.6"]);
        assert_eq!(
            lex.members_of_classes(&parent, true).unwrap(),
            ids(&["climb", "rise", "soar"])
        );
        assert_eq!(
            lex.members_of_classes(&parent, false).unwrap(),
            ids(&["climb", "rise"])
        );
        assert!(lex.members_of_classes(&BTreeSet::new(), true).unwrap().is_empty());
        assert!(matches!(
            lex.members_of_classes(&ids(&["nope-1"]), true),
            Err(LexiconError::UnknownClass(id)) if id == "nope-1"
        ));
    }

    #[test]
    fn underscores_become_spaces() {
        let c = VerbClass::new("x-1", ["set_up", "Carry_Out"]);
        assert_eq!(c.members, ids(&["carry out", "set up"]));
    }

    #[test]
    fn malformed_xml_names_the_file() {
        let err = parse_verbnet_xml("broken.xml", "<VNCLASS ID='a'><MEMBERS>").unwrap_err();
        assert!(err.to_string().contains("broken.xml"), "{err}");
        let err = parse_verbnet_xml("odd.xml", "<FOO/>").unwrap_err();
        assert!(matches!(err, LexiconError::Xml { .. }));
        let err = parse_verbnet_xml("noid.xml", "<VNCLASS/>").unwrap_err();
        assert!(matches!(err, LexiconError::MissingId { .. }));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = VerbClass::new("a-1", ["x"]);
        let b = VerbClass::new("a-1", ["y"]);
        assert!(matches!(
            VerbLexicon::from_classes(vec![a, b]),
            Err(LexiconError::DuplicateClass { id }) if id == "a-1"
        ));
    }

    #[test]
    fn cycles_and_dangling_references_rejected() {
        let mut a = VerbClass::new("a", ["x"]);
        let mut b = VerbClass::new("b", ["y"]);
        a.adopt(&mut b);
        b.adopt(&mut a);
        assert!(matches!(
            VerbLexicon::from_classes(vec![a, b]),
            Err(LexiconError::Cycle { .. })
        ));
        let mut c = VerbClass::new("c", ["z"]);
        c.subclass_ids.push("ghost".into());
        assert!(matches!(
            VerbLexicon::from_classes(vec![c]),
            Err(LexiconError::DanglingReference { .. })
        ));
    }

    #[test]
    fn directory_loading() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.xml"), PARENT_AND_SUB).unwrap();
        std::fs::write(
            dir.path().join("b.xml"),
            r#"<VNCLASS ID="empty-1.1"><MEMBERS/></VNCLASS>"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let (lex, report) = load_verbnet(dir.path()).unwrap();
        assert_eq!(report.files, 2);
        assert_eq!(report.classes, 3);
        assert_eq!(report.subclasses, 1);
        assert_eq!(report.lemmas, 3);
        assert_eq!(report.empty_classes, ["empty-1.1"]);
        assert!(report.irregular_subclass_ids.is_empty());
        let (again, _) = load_verbnet(dir.path()).unwrap();
        assert_eq!(lex, again);
    }

    #[test]
    fn empty_directory_gives_empty_lexicon() {
        let dir = tempfile::tempdir().unwrap();
        let (lex, report) = load_verbnet(dir.path()).unwrap();
        assert!(lex.is_empty());
        assert_eq!(report.files, 0);
    }

    #[test]
    fn duplicate_across_files_is_a_load_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.xml"), PARENT_AND_SUB).unwrap();
        std::fs::write(dir.path().join("b.xml"), PARENT_AND_SUB).unwrap();
        assert!(matches!(
            load_verbnet(dir.path()),
            Err(LexiconError::DuplicateClass { .. })
        ));
    }

    #[test]
    fn missing_directory_is_io_error() {
        assert!(matches!(
            load_verbnet(Path::new("/definitely/not/here")),
            Err(LexiconError::Io { .. })
        ));
    }
}
