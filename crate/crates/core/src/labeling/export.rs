use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{build_entry_reserved, emit_tex, renumber_avoiding, TagRegistry};
use crate::eps::{write_eps, TextPlacement};
use crate::expr::{print_source, HookSet};
use crate::scene::{auto_wrap, expand_decorations, ExportOptions, Scene, TextContent};
use crate::Error;

#[derive(Debug, Clone)]
pub struct ExportOutput {
    pub eps_path: PathBuf,
    pub tex_path: PathBuf,
    pub eps: Vec<u8>,
    pub tex: String,
    pub registry: TagRegistry,
    pub placements: Vec<TextPlacement>,
    pub warnings: Vec<String>,
    /// Text primitives in the expanded scene.
    pub label_count: usize,
    pub tagged_count: usize,
}

/// Runs the export pipeline without touching the file system.
///
/// Decorations are always expanded so ticks and labels get drawn. With
/// automatic positioning off, text anchors are ignored and every Automatic
/// alignment falls back to `bc`; only directives present in the input are
/// tagged.
pub fn build_export(
    scene: &Scene,
    basename: &str,
    opts: &ExportOptions,
    hooks: &HookSet,
) -> Result<ExportOutput, Error> {
    if basename.is_empty() {
        return Err(Error::Document("basename must not be empty".to_string()));
    }
    scene.validate()?;
    let mut expanded = expand_decorations(scene);
    if opts.effective_auto_convert() {
        expanded = auto_wrap(&expanded);
    }

    let reserved: HashSet<String> = expanded
        .texts()
        .filter_map(|(_, t)| match &t.content {
            TextContent::Directive(d) => d.psfrag_tag.clone(),
            TextContent::Bare(_) => None,
        })
        .collect();

    let mut registry = TagRegistry::new();
    let mut tagged: Vec<(usize, String)> = Vec::new();
    let mut warnings = Vec::new();
    let mut label_count = 0;
    for (i, t) in expanded.texts() {
        label_count += 1;
        let TextContent::Directive(d) = &t.content else { continue };
        let (entry, w) = build_entry_reserved(d, Some(t.anchor), hooks, opts, &registry, &reserved)?;
        warnings.extend(w);
        tagged.push((i, entry.tag.clone()));
        registry.insert(entry, print_source(&d.expr))?;
    }

    let mut tag_text: HashMap<usize, String> = tagged.into_iter().collect();
    let (mut eps, mut placements) = write_eps(&expanded, &tag_text)?;
    if opts.renumber_tags {
        // New tags must not collide with plain strings shown in the figure.
        let untagged: HashSet<String> =
            placements.iter().filter(|p| !p.tagged).map(|p| p.text.clone()).collect();
        let (renamed, map) = renumber_avoiding(&registry, &untagged);
        registry = renamed;
        for tag in tag_text.values_mut() {
            *tag = map[tag.as_str()].clone();
        }
        (eps, placements) = write_eps(&expanded, &tag_text)?;
    }
    let tex = emit_tex(&registry);
    Ok(ExportOutput {
        eps_path: PathBuf::from(format!("{basename}{}", opts.eps_suffix)),
        tex_path: PathBuf::from(format!("{basename}{}", opts.tex_suffix)),
        eps,
        tex,
        tagged_count: registry.len(),
        registry,
        placements,
        warnings,
        label_count,
    })
}

/// Builds the export and writes `basename+eps_suffix` and
/// `basename+tex_suffix`.
pub fn psfrag_export(
    scene: &Scene,
    basename: &str,
    opts: &ExportOptions,
    hooks: &HookSet,
) -> Result<ExportOutput, Error> {
    let out = build_export(scene, basename, opts, hooks)?;
    write_export(&out)?;
    Ok(out)
}

/// Writes both files of an export. Nothing is replaced unless both
/// temporary files were written successfully.
pub fn write_export(out: &ExportOutput) -> Result<(), Error> {
    write_files_atomically(&[(&out.eps_path, &out.eps), (&out.tex_path, out.tex.as_bytes())])
}

/// Writes each file to a temporary sibling first, then renames them all
/// into place.
pub fn write_files_atomically(files: &[(&Path, &[u8])]) -> Result<(), Error> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(*path, e))?;
        tmp.write_all(bytes).map_err(|e| Error::io(*path, e))?;
        tmp.flush().map_err(|e| Error::io(*path, e))?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    }
    Ok(())
}
