use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::browsing::KnowledgeSystem;
use crate::context::{ConceptualView, FormalContext};
use crate::error::{Error, Result};
use crate::interchange::{parse_clif, parse_fcif, parse_views};
use crate::scaling::{interpret, parse_records, parse_scales};

/// Named contexts and lattices loaded from a workspace directory:
///
/// ```text
/// contexts/<id>.fcif   formal contexts
/// lattices/<id>.clif   concept lattices
/// records/<id>.rec     metadata records, interpreted with scales/<id>.cfg
/// scales/<id>.cfg      conceptual scales
/// views/<id>.views     conceptual views for context or lattice <id>
/// ```
///
/// Every context also becomes a lattice of the same id, built from its
/// purified, reduced form. A CLIF file of that id takes precedence.
#[derive(Debug, Default)]
pub struct Workspace {
    root: PathBuf,
    contexts: BTreeMap<String, (String, FormalContext)>,
    lattices: BTreeMap<String, Arc<KnowledgeSystem>>,
}

fn files_with(dir: &Path, ext: &str) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some(ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push((stem.to_owned(), path.clone()));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Attaches the file name to positioned errors.
fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

impl Workspace {
    pub fn load(root: impl Into<PathBuf>) -> Result<Workspace> {
        let root = root.into();
        if !root.is_dir() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("workspace `{}` is not a directory", root.display()),
            )));
        }
        let mut views: BTreeMap<String, Vec<ConceptualView>> = BTreeMap::new();
        for (id, path) in files_with(&root.join("views"), "views")? {
            views.insert(id, parse_views(&read(&path)?).map_err(|e| in_file(&path, e))?);
        }
        let mut ws = Workspace {
            root: root.clone(),
            ..Workspace::default()
        };
        for (id, path) in files_with(&root.join("contexts"), "fcif")? {
            let doc = parse_fcif(&read(&path)?).map_err(|e| in_file(&path, e))?;
            let ctx = doc.to_context()?;
            ws.contexts.insert(id, (doc.type_name, ctx));
        }
        for (id, path) in files_with(&root.join("records"), "rec")? {
            let scale_path = root.join("scales").join(format!("{id}.cfg"));
            if !scale_path.is_file() {
                log::warn!("records `{id}` have no scales/{id}.cfg; skipped");
                continue;
            }
            if ws.contexts.contains_key(&id) {
                log::warn!("records `{id}` shadowed by contexts/{id}.fcif");
                continue;
            }
            let records = parse_records(&read(&path)?).map_err(|e| in_file(&path, e))?;
            let scales = parse_scales(&read(&scale_path)?)?;
            ws.contexts.insert(id.clone(), (id, interpret(&records, &scales)?));
        }
        let no_views = Vec::new();
        for (id, (_, ctx)) in &ws.contexts {
            let v = views.get(id).unwrap_or(&no_views);
            ws.lattices
                .insert(id.clone(), Arc::new(KnowledgeSystem::prepare(ctx, v, true)?));
        }
        for (id, path) in files_with(&root.join("lattices"), "clif")? {
            let doc = parse_clif(&read(&path)?).map_err(|e| in_file(&path, e))?;
            let lattice = doc.to_lattice()?;
            let v = views.get(&id).unwrap_or(&no_views);
            ws.lattices.insert(id, Arc::new(KnowledgeSystem::new(lattice, v)?));
        }
        Ok(ws)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// `(id, type name, context)` in id order.
    pub fn contexts(&self) -> impl Iterator<Item = (&str, &str, &FormalContext)> {
        self.contexts.iter().map(|(id, (t, c))| (id.as_str(), t.as_str(), c))
    }

    pub fn lattice_ids(&self) -> impl Iterator<Item = &str> {
        self.lattices.keys().map(String::as_str)
    }

    pub fn lattice(&self, id: &str) -> Option<&Arc<KnowledgeSystem>> {
        self.lattices.get(id)
    }

    /// Adds or replaces a lattice, as the service would after a build.
    pub fn insert_lattice(&mut self, id: impl Into<String>, system: KnowledgeSystem) {
        self.lattices.insert(id.into(), Arc::new(system));
    }
}
