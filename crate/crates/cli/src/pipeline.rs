//! lex → canonicalize → replace → extract → pages → dump → report, one
//! input file per task.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use semtex_core::lexer::SourceDocument;
use semtex_core::metadata::Origin;
use semtex_core::{
    emit_dump, render_page, stats_report, Bibliography, Extractor, Formula, FormulaPage, Glossary,
    ReplacementStats, Report, SubstitutionDef,
};

use crate::{PipelineConfig, PipelineError};

/// What one input file contributed.
#[derive(Debug, Clone, Default)]
pub struct FileResult {
    pub name: String,
    pub formulae: Vec<Formula>,
    pub defs: Vec<SubstitutionDef>,
    pub pages: Vec<FormulaPage>,
    pub stats: ReplacementStats,
    /// Formula-level problems; the rest of the file still counts.
    pub issues: Vec<String>,
    /// Set when the whole file was rejected.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<FileResult>,
    pub dump: String,
    pub report: Report,
}

impl RunOutput {
    pub fn file_errors(&self) -> usize {
        self.files.iter().filter(|f| f.error.is_some()).count()
    }

    pub fn formulae(&self) -> impl Iterator<Item = &Formula> {
        self.files.iter().flat_map(|f| &f.formulae)
    }
}

/// Gives unlabeled formulae (`f3`) an id that cannot collide across files.
fn qualify_ids(
    stem: &str,
    formulae: &mut [Formula],
    removed: &mut [Formula],
    defs: &mut [SubstitutionDef],
) {
    let renames: HashMap<String, String> = formulae
        .iter()
        .chain(removed.iter())
        .filter(|f| f.label.is_none())
        .map(|f| (f.id.clone(), format!("{stem}.{}", f.id)))
        .collect();
    let rename = |id: &mut String| {
        if let Some(new) = renames.get(id) {
            *id = new.clone();
        }
    };
    for f in formulae.iter_mut().chain(removed.iter_mut()) {
        rename(&mut f.id);
        for a in &mut f.annotations {
            if let Origin::Formula(id) = &mut a.origin {
                rename(id);
            }
        }
    }
    for d in defs {
        rename(&mut d.def_formula_id);
    }
}

pub fn file_stem(name: &str) -> &str {
    let base = name.rsplit('/').next().unwrap_or(name);
    base.strip_suffix(".tex").unwrap_or(base)
}

/// Runs everything up to page rendering for one source text.
pub fn process_source(
    name: &str,
    source: &str,
    cfg: &PipelineConfig,
    g: &Glossary,
    bib: &Bibliography,
) -> FileResult {
    let mut out = FileResult {
        name: name.to_owned(),
        ..Default::default()
    };
    let stem = file_stem(name);
    let doc = match SourceDocument::parse(source) {
        Ok(d) => d,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let extractor = Extractor::new(g, cfg.extractor.clone());
    let mut ex = match extractor.extract(&doc, cfg.citation_key_for(stem)) {
        Ok(x) => x,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.stats = ex.stats();
    qualify_ids(stem, &mut ex.formulae, &mut ex.removed, &mut ex.defs);
    out.issues.extend(
        ex.issues
            .iter()
            .map(|i| format!("{name}: {}: {}", i.id, i.message)),
    );
    let corpus = cfg.corpus_for(stem);
    for f in &ex.formulae {
        match render_page(f, g, bib, corpus) {
            Ok(p) => out.pages.push(p),
            Err(e) => out.issues.push(format!("{name}: {}: {e}", f.id)),
        }
    }
    out.formulae = ex.formulae;
    out.defs = ex.defs;
    out
}

fn process_file(
    path: &Path,
    name: &str,
    cfg: &PipelineConfig,
    g: &Glossary,
    bib: &Bibliography,
) -> FileResult {
    match std::fs::read_to_string(path) {
        Ok(src) => process_source(name, &src, cfg, g, bib),
        Err(e) => FileResult {
            name: name.to_owned(),
            error: Some(e.to_string()),
            ..Default::default()
        },
    }
}

/// Runs `f` on a pool of `workers` threads (0 = default size).
pub fn with_workers<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::ConfigInvalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Processes every input file concurrently and folds the results in input
/// order, so output never depends on scheduling.
pub fn collect_files(
    cfg: &PipelineConfig,
    g: &Glossary,
    bib: &Bibliography,
) -> Result<Vec<FileResult>, PipelineError> {
    let files: Vec<(PathBuf, String)> = cfg.input_files()?;
    with_workers(cfg.workers, || {
        files
            .par_iter()
            .map(|(p, n)| process_file(p, n, cfg, g, bib))
            .collect()
    })
}

/// Report over file results, file-level errors listed first.
pub fn build_report(files: &[FileResult], g: &Glossary) -> Report {
    let mut stats = ReplacementStats::default();
    for f in files {
        stats.merge(&f.stats);
    }
    let formulae: Vec<Formula> = files
        .iter()
        .flat_map(|f| f.formulae.iter().cloned())
        .collect();
    let defs: Vec<SubstitutionDef> = files.iter().flat_map(|f| f.defs.iter().cloned()).collect();
    let mut report = stats_report(&stats, &formulae, &defs, g);
    report.pages = files.iter().map(|f| f.pages.len()).sum();
    report.issues = files
        .iter()
        .filter_map(|f| f.error.as_ref().map(|e| format!("{}: {e}", f.name)))
        .chain(files.iter().flat_map(|f| f.issues.iter().cloned()))
        .collect();
    report
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    let g = cfg.load_glossary()?;
    let bib = cfg.load_bibliography()?;
    let files = collect_files(cfg, &g, &bib)?;
    let pages: Vec<FormulaPage> = files.iter().flat_map(|f| f.pages.iter().cloned()).collect();
    let dump = emit_dump(&pages, &cfg.siteinfo)?;
    let report = build_report(&files, &g);
    Ok(RunOutput {
        files,
        dump,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, src: &str) -> FileResult {
        process_source(
            name,
            src,
            &PipelineConfig::default(),
            &Glossary::shipped(),
            &Bibliography::shipped(),
        )
    }

    #[test]
    fn unlabeled_ids_qualified() {
        let r = run("sub/a.tex", "\\begin{equation}x=1\\end{equation}\\begin{equation}\\label{2.1}\\Gamma(z)\\end{equation}");
        let ids: Vec<_> = r.formulae.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, vec!["a.f1", "2.1"]);
        assert_eq!(r.pages[0].title, "Formula:KLS:a.f1");
    }

    #[test]
    fn substitution_origin_follows_rename() {
        let r = run(
            "t.tex",
            "\\begin{equation}F=2A(x)\\end{equation}\\begin{equation}A(x)=x^2\\end{equation}",
        );
        assert_eq!(r.defs[0].def_formula_id, "t.f2");
        assert_eq!(
            r.formulae[0].annotations[0].origin,
            Origin::Formula("t.f2".into())
        );
    }

    #[test]
    fn lex_error_is_file_level() {
        let r = run("bad.tex", "\\begin{equation}\\frac{1}{2\\end{equation}");
        assert!(r.error.is_some());
        assert!(r.pages.is_empty());
    }

    #[test]
    fn canon_error_is_formula_level() {
        let r = run(
            "c.tex",
            "\\begin{equation}\\left(x\\end{equation}\\begin{equation}y\\end{equation}",
        );
        assert!(r.error.is_none());
        assert_eq!(r.pages.len(), 1);
        assert_eq!(r.issues.len(), 1);
        assert!(r.issues[0].starts_with("c.tex: f1: "), "{}", r.issues[0]);
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("kls/kls_mini.tex"), "kls_mini");
        assert_eq!(file_stem("x.tex"), "x");
    }
}
