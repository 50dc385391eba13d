use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use semtex_core::page::SiteInfo;
use semtex_core::{Bibliography, ExtractorConfig, Glossary};
use serde::{Deserialize, Serialize};

use crate::PipelineError;

/// Per-file settings, keyed by file stem in [`PipelineConfig::files`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileOverride {
    pub corpus: Option<String>,
    pub citation_key: Option<String>,
}

/// Everything a run needs. Loaded from JSON; command line flags override
/// individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// `.tex` files, or directories searched recursively.
    pub inputs: Vec<PathBuf>,
    /// Unset means the glossary bundled with the library.
    pub glossary: Option<PathBuf>,
    /// Citation keys to book metadata. Unset means the bundled one.
    pub bibliography: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Page title prefix, `Formula:<corpus>:<id>`.
    pub corpus: String,
    pub citation_key: String,
    pub files: BTreeMap<String, FileOverride>,
    pub extractor: ExtractorConfig,
    pub endpoint: Option<String>,
    pub siteinfo: SiteInfo,
    /// 0 lets the thread pool decide.
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            glossary: None,
            bibliography: None,
            out: None,
            report: None,
            corpus: "KLS".into(),
            citation_key: "KLS".into(),
            files: BTreeMap::new(),
            extractor: ExtractorConfig::default(),
            endpoint: None,
            siteinfo: SiteInfo::default(),
            workers: 0,
        }
    }
}

fn invalid(msg: impl Into<String>) -> PipelineError {
    PipelineError::ConfigInvalid(msg.into())
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn corpus_for(&self, stem: &str) -> &str {
        self.files
            .get(stem)
            .and_then(|f| f.corpus.as_deref())
            .unwrap_or(&self.corpus)
    }

    pub fn citation_key_for(&self, stem: &str) -> &str {
        self.files
            .get(stem)
            .and_then(|f| f.citation_key.as_deref())
            .unwrap_or(&self.citation_key)
    }

    /// Checks paths and the endpoint without touching the network.
    pub fn validate(&self) -> Result<(), PipelineError> {
        for p in &self.inputs {
            if !p.exists() {
                return Err(invalid(format!("input {} does not exist", p.display())));
            }
        }
        for p in self.glossary.iter().chain(&self.bibliography) {
            if !p.is_file() {
                return Err(invalid(format!("{} does not exist", p.display())));
            }
        }
        if let Some(e) = &self.endpoint {
            check_endpoint(e)?;
        }
        if self.corpus.is_empty() || self.corpus.contains(':') {
            return Err(invalid(format!(
                "corpus prefix `{}` must be non-empty and free of `:`",
                self.corpus
            )));
        }
        Ok(())
    }

    pub fn load_glossary(&self) -> Result<Glossary, PipelineError> {
        match &self.glossary {
            Some(p) => Glossary::load(p).map_err(|e| invalid(format!("{}: {e}", p.display()))),
            None => Ok(Glossary::shipped()),
        }
    }

    /// The bibliography, checked to cover every citation key in use.
    pub fn load_bibliography(&self) -> Result<Bibliography, PipelineError> {
        let bib = match &self.bibliography {
            Some(p) => {
                Bibliography::load(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?
            }
            None => Bibliography::shipped(),
        };
        let keys = std::iter::once(self.citation_key.as_str()).chain(
            self.files
                .values()
                .filter_map(|f| f.citation_key.as_deref()),
        );
        for k in keys {
            bib.get(k).map_err(|e| invalid(e.to_string()))?;
        }
        Ok(bib)
    }

    /// Every input `.tex` file, sorted, with the name it is reported under
    /// (relative to the directory it was found in).
    pub fn input_files(&self) -> Result<Vec<(PathBuf, String)>, PipelineError> {
        let mut out = Vec::new();
        for root in &self.inputs {
            if root.is_dir() {
                let mut found = Vec::new();
                walk(root, &mut found).map_err(|e| invalid(format!("{}: {e}", root.display())))?;
                found.sort();
                for p in found {
                    let rel = p.strip_prefix(root).unwrap_or(&p);
                    let name = rel
                        .components()
                        .map(|c| c.as_os_str().to_string_lossy())
                        .collect::<Vec<_>>()
                        .join("/");
                    out.push((p, name));
                }
            } else {
                let name = root
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                out.push((root.clone(), name));
            }
        }
        Ok(out)
    }
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "tex") {
            out.push(path);
        }
    }
    Ok(())
}

pub fn check_endpoint(e: &str) -> Result<(), PipelineError> {
    let uri: ureq::http::Uri = e
        .parse()
        .map_err(|_| invalid(format!("endpoint `{e}` is not a URL")))?;
    match (uri.scheme_str(), uri.host()) {
        (Some("http" | "https"), Some(h)) if !h.is_empty() => Ok(()),
        _ => Err(invalid(format!(
            "endpoint `{e}` must be an absolute http(s) URL"
        ))),
    }
}
