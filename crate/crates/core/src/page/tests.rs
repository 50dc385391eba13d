use super::*;
use crate::lexer::SourceDocument;
use crate::macros::ReplacementStats;
use crate::metadata::{Extractor, ExtractorConfig};

fn formulae(src: &str) -> Vec<Formula> {
    let g = Glossary::shipped();
    let doc = SourceDocument::parse(src).unwrap();
    Extractor::new(&g, ExtractorConfig::default())
        .extract(&doc, "KLS")
        .unwrap()
        .formulae
}

fn one(body: &str) -> Formula {
    formulae(&format!("\\begin{{equation}}{body}\\end{{equation}}")).remove(0)
}

fn names(entries: &[SymbolsListEntry]) -> Vec<&str> {
    entries.iter().map(|e| e.macro_name.as_str()).collect()
}

#[test]
fn symbols_deduplicated() {
    let g = Glossary::shipped();
    let f = one(r"\Gamma(z)+\Gamma(w)");
    assert_eq!(f.source_semantic, r"\EulerGamma@{z}+\EulerGamma@{w}");
    assert_eq!(names(&build_symbols_list(&f, &g)), vec!["EulerGamma"]);
}

#[test]
fn no_macros_no_symbols() {
    assert!(build_symbols_list(&one("x+y"), &Glossary::shipped()).is_empty());
}

#[test]
fn symbols_from_constraint() {
    let g = Glossary::shipped();
    let f = one(r"P_n^{(\alpha,\beta)}(x)=1, \quad (a;q)_n>0");
    assert_eq!(f.annotations[0].body, r"\qPochhammer@{a}{q}{n}>0");
    assert_eq!(
        names(&build_symbols_list(&f, &g)),
        vec!["Jacobi", "qPochhammer"]
    );
}

#[test]
fn constraint_section_only() {
    let g = Glossary::shipped();
    let f = one(r"p_n(x;a|q)=1, \quad 0<a<q^{-1}");
    let page = render_page(&f, &g, &Bibliography::shipped(), "KLS").unwrap();
    assert!(page
        .wikitext
        .contains("== Constraints ==\n* <math>0<a<q^{-1}</math>\n"));
    assert!(!page.wikitext.contains("== Substitutions =="));
    assert!(!page.wikitext.contains("== Proof =="));
    assert!(!page.wikitext.contains("== Notes =="));
    assert_eq!(page.title, "Formula:KLS:f1");
    assert_eq!(
        primary_math(&page.wikitext),
        Some(f.source_semantic.as_str())
    );
}

#[test]
fn symbols_list_links() {
    let g = Glossary::shipped();
    let f = one(r"p_n(x;a|q)\Gamma(z)");
    let page = render_page(&f, &g, &Bibliography::shipped(), "KLS").unwrap();
    assert!(page.wikitext.contains(
        "* <span class=\"plainlinks\">[http://dlmf.nist.gov/5.2#E1 <math>\\EulerGamma@{z}</math>]</span> : EulerGamma : Euler gamma function\n"
    ));
    assert!(page
        .wikitext
        .contains("* [[Definition:littleqLaguerre|<math>\\littleqLaguerre{n}@{x}{a}{q}</math>]] : littleqLaguerre : little q-Laguerre polynomial\n"));
}

#[test]
fn bibliography_line() {
    let g = Glossary::shipped();
    let f = formulae("\\begin{equation}\\label{9.8.2}x\\end{equation}").remove(0);
    let page = render_page(&f, &g, &Bibliography::shipped(), "KLS").unwrap();
    assert!(
        page.wikitext.ends_with(", 2010, equation (9.8.2)\n"),
        "{}",
        page.wikitext
    );
}

#[test]
fn missing_bib_entry() {
    let g = Glossary::shipped();
    let f = one("x");
    let err = render_page(&f, &g, &Bibliography::default(), "KLS").unwrap_err();
    assert_eq!(err, PageError::MissingBibEntry("KLS".into()));
}

#[test]
fn prose_math_becomes_tags() {
    assert_eq!(
        prose_to_wikitext(r"where $0<q<1$ and \$5"),
        r"where <math>0<q<1</math> and \$5"
    );
}

fn page(title: &str, wikitext: &str) -> FormulaPage {
    FormulaPage {
        title: title.into(),
        wikitext: wikitext.into(),
        formula_id: title.into(),
    }
}

fn well_formed(xml: &str) -> bool {
    let mut r = quick_xml::Reader::from_str(xml);
    let mut depth = 0i32;
    loop {
        match r.read_event() {
            Ok(quick_xml::events::Event::Start(_)) => depth += 1,
            Ok(quick_xml::events::Event::End(_)) => depth -= 1,
            Ok(quick_xml::events::Event::Eof) => return depth == 0,
            Ok(_) => {}
            Err(_) => return false,
        }
    }
}

#[test]
fn empty_dump() {
    let xml = emit_dump(&[], &SiteInfo::default()).unwrap();
    assert!(well_formed(&xml));
    assert!(xml.contains("<siteinfo>"));
    assert!(!xml.contains("<page>"));
}

#[test]
fn escaping() {
    let xml = emit_dump(
        &[page("Formula:T:1", "<math>a<b & c</math>")],
        &SiteInfo::default(),
    )
    .unwrap();
    assert!(xml.contains("&lt;math&gt;a&lt;b &amp; c&lt;/math&gt;"));
    assert!(well_formed(&xml));
    assert!(!xml.contains('\r'));
}

#[test]
fn duplicate_title() {
    let err = emit_dump(
        &[page("Formula:T:1", "a"), page("Formula:T:1", "b")],
        &SiteInfo::default(),
    )
    .unwrap_err();
    assert_eq!(err, PageError::DuplicateTitle("Formula:T:1".into()));
}

#[test]
fn empty_report() {
    let r = stats_report(&ReplacementStats::default(), &[], &[], &Glossary::shipped());
    let text = r.to_string();
    assert!(text.contains("pages: 0\n"));
    assert!(text.contains("total replacements: 0\n"));
    assert!(text.contains("average per formula: 0.00\n"));
    assert!(text.contains("non-empty symbols lists: 0/0 (0.00%)\n"));
}

#[test]
fn report_average_two_decimals() {
    let mut stats = ReplacementStats::default();
    for _ in 0..2 {
        stats.record("sin");
    }
    stats.formulae = 3;
    let text = stats_report(&stats, &[], &[], &Glossary::shipped()).to_string();
    assert!(text.contains("average per formula: 0.67\n"));
}
