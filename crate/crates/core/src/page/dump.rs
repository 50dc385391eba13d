use std::collections::HashSet;
use std::fmt::Write as _;

use quick_xml::escape::partial_escape;
use serde::{Deserialize, Serialize};

use super::FormulaPage;
use crate::error::PageError;

/// Fixed header fields of the export. The defaults pin every value so
/// that dumps are byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiteInfo {
    pub sitename: String,
    pub dbname: String,
    pub base: String,
    pub generator: String,
    /// Export schema version, e.g. `0.10`.
    pub schema_version: String,
    pub timestamp: String,
    pub contributor: String,
}

impl Default for SiteInfo {
    fn default() -> Self {
        SiteInfo {
            sitename: "Formula Wiki".into(),
            dbname: "formulawiki".into(),
            base: "http://localhost/wiki/Main_Page".into(),
            generator: concat!("semtex ", env!("CARGO_PKG_VERSION")).into(),
            schema_version: "0.10".into(),
            timestamp: "2000-01-01T00:00:00Z".into(),
            contributor: "SeedingBot".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WikiDump {
    pub pages: Vec<FormulaPage>,
    pub siteinfo: SiteInfo,
}

impl WikiDump {
    pub fn to_xml(&self) -> Result<String, PageError> {
        emit_dump(&self.pages, &self.siteinfo)
    }
}

fn text(s: &str) -> std::borrow::Cow<'_, str> {
    partial_escape(s)
}

/// Serializes `pages` in order. Page and revision ids are their 1-based
/// positions. Output is UTF-8 with LF line endings.
pub fn emit_dump(pages: &[FormulaPage], site: &SiteInfo) -> Result<String, PageError> {
    let mut seen = HashSet::new();
    for p in pages {
        if !seen.insert(p.title.as_str()) {
            return Err(PageError::DuplicateTitle(p.title.clone()));
        }
    }
    let v = text(&site.schema_version);
    let mut x = String::new();
    let _ = writeln!(
        x,
        "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-{v}/\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://www.mediawiki.org/xml/export-{v}/ http://www.mediawiki.org/xml/export-{v}.xsd\" \
         version=\"{v}\" xml:lang=\"en\">"
    );
    x.push_str("  <siteinfo>\n");
    let _ = writeln!(x, "    <sitename>{}</sitename>", text(&site.sitename));
    let _ = writeln!(x, "    <dbname>{}</dbname>", text(&site.dbname));
    let _ = writeln!(x, "    <base>{}</base>", text(&site.base));
    let _ = writeln!(x, "    <generator>{}</generator>", text(&site.generator));
    x.push_str("    <case>first-letter</case>\n");
    x.push_str("    <namespaces>\n");
    x.push_str("      <namespace key=\"0\" case=\"first-letter\" />\n");
    x.push_str("    </namespaces>\n");
    x.push_str("  </siteinfo>\n");
    for (i, p) in pages.iter().enumerate() {
        let id = i + 1;
        let body = p.wikitext.replace("\r\n", "\n");
        x.push_str("  <page>\n");
        let _ = writeln!(x, "    <title>{}</title>", text(&p.title));
        x.push_str("    <ns>0</ns>\n");
        let _ = writeln!(x, "    <id>{id}</id>");
        x.push_str("    <revision>\n");
        let _ = writeln!(x, "      <id>{id}</id>");
        let _ = writeln!(x, "      <timestamp>{}</timestamp>", text(&site.timestamp));
        let _ = writeln!(
            x,
            "      <contributor>\n        <username>{}</username>\n      </contributor>",
            text(&site.contributor)
        );
        x.push_str("      <model>wikitext</model>\n");
        x.push_str("      <format>text/x-wiki</format>\n");
        let _ = writeln!(
            x,
            "      <text xml:space=\"preserve\" bytes=\"{}\">{}</text>",
            body.len(),
            text(&body)
        );
        x.push_str("    </revision>\n");
        x.push_str("  </page>\n");
    }
    x.push_str("</mediawiki>\n");
    Ok(x)
}
