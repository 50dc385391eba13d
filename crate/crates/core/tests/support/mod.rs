//! Fixtures, formula generators and a brute-force replacement counter shared
//! by the property tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use proptest::prelude::*;
use regex::Regex;
use semtex_core::{build_groups, tokenize, CanonicalTree, Glossary};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

/// Every `.tex` under the fixture directory, sorted.
pub fn fixture_files() -> Vec<PathBuf> {
    fn walk(dir: &std::path::Path, out: &mut Vec<PathBuf>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(&p, out);
            } else if p.extension().is_some_and(|e| e == "tex") {
                out.push(p);
            }
        }
    }
    let mut out = Vec::new();
    walk(&fixture_dir(), &mut out);
    out
}

pub fn canon(g: &Glossary, src: &str) -> CanonicalTree {
    let tree = build_groups(&tokenize(src)).expect("balanced input");
    g.canonicalizer()
        .canonicalize(&tree)
        .expect("canonicalizable input")
}

// ---- generator -------------------------------------------------------------

const LEAVES: &[&str] = &[
    "x",
    "z",
    "n",
    "q",
    "a",
    "b",
    "2",
    "1",
    r"\alpha",
    r"\beta",
    "q^{2}",
    "a+b",
    "-n",
    "x^2",
    "2n+1",
    r"\frac{1}{2}",
];
const INDICES: &[&str] = &["n", "k", "N", "{n+1}", "{2n}", r"\nu", "2", "m"];
const TOKEN_ARGS: &[&str] = &["x", "z", "2", r"\theta", r"\phi", "{x+1}", "{2z}", "{}"];
const SPACES: &[&str] = &[
    "",
    "",
    " ",
    r"\,",
    r"\;",
    r"\! ",
    r"\quad ",
    "~",
    r"\ ",
    r"\hspace{2pt}",
];
const PARENS: &[(&str, &str)] = &[
    ("(", ")"),
    ("(", ")"),
    (r"\left(", r"\right)"),
    (r"\bigl(", r"\bigr)"),
    (r"\Big(", r"\Big)"),
    (r"\lparen ", ")"),
    ("(", r"\rparen "),
];
const BARS: &[&str] = &["|", "|", r"\mid ", r"\vert ", r"\middle|", r"\lvert "];
const NOISE: &[&str] = &[
    "+",
    "-",
    "=",
    ",",
    "<",
    r"\leq ",
    " ",
    "f(x)",
    "(a,b)",
    r"\sinh x",
    r"\Gamma z",
    "P^{(a)}",
    "p_n(x)",
    "R(x)",
    r"\phi(x)",
    "{}_2",
    r"\cos(x)",
    "(q;q)",
    r"\sum_{k=0}^{n}",
    "e^{i\\theta}",
    r"\{a\}",
    r"\|x\|",
    "[0,1]",
    "x_{n}",
    "% c\n",
    "&",
];

fn parens() -> impl Strategy<Value = (String, String)> {
    proptest::sample::select(PARENS).prop_map(|(o, c)| (o.to_owned(), c.to_owned()))
}

fn pick(xs: &'static [&'static str]) -> impl Strategy<Value = String> {
    proptest::sample::select(xs).prop_map(str::to_owned)
}

/// A presentation-form instance of one glossary rule, with argument
/// strategy `arg`. Delimiter and spacing variants are drawn freely.
fn instance(arg: BoxedStrategy<String>) -> BoxedStrategy<String> {
    let sp = || pick(SPACES);
    let idx = pick(INDICES).boxed();
    prop_oneof![
        (sp(), pick(TOKEN_ARGS), proptest::bool::ANY).prop_map(|(s, a, sin)| {
            // a bare letter needs something to end the control word
            let s = if s.is_empty() && a.starts_with(|c: char| c.is_ascii_alphabetic()) {
                " ".to_owned()
            } else {
                s
            };
            format!("{}{s}{a}", if sin { r"\sin" } else { r"\cos" })
        }),
        (sp(), parens(), arg.clone()).prop_map(|(s, (o, c), a)| format!(r"\Gamma{s}{o}{a}{c}")),
        (parens(), arg.clone(), idx.clone()).prop_map(|((o, c), a, n)| format!("{o}{a}{c}_{n}")),
        (parens(), arg.clone(), sp(), arg.clone(), idx.clone())
            .prop_map(|((o, c), a, s, q, n)| format!("{o}{a};{s}{q}{c}_{n}")),
        (
            idx.clone(),
            arg.clone(),
            arg.clone(),
            parens(),
            arg.clone(),
            sp()
        )
            .prop_map(|(n, a, b, (o, c), x, s)| format!("P_{n}^{{({a},{s}{b})}}{s}{o}{x}{c}")),
        (
            idx.clone(),
            parens(),
            arg.clone(),
            arg.clone(),
            pick(BARS),
            arg.clone()
        )
            .prop_map(|(n, (o, c), x, a, bar, q)| format!("p_{n}{o}{x};{a}{bar}{q}{c}")),
        (idx.clone(), parens(), arg.clone(), arg.clone(), arg.clone())
            .prop_map(|(n, (o, c), x, a, d)| format!("R_{n}{o}{x};{a},b,c,{d}{c}")),
        (pick(LEAVES), pick(LEAVES), arg.clone(), arg).prop_map(|(u, l, q, z)| format!(
            r"{{}}_2\phi_1\left(\genfrac{{}}{{}}{{0pt}}{{}}{{{u},b}}{{{l}}};{q},{z}\right)"
        )),
    ]
    .boxed()
}

/// Rule instances whose arguments are leaves or rule instances over leaves.
pub fn rule_instance() -> BoxedStrategy<String> {
    let inner = instance(pick(LEAVES).boxed());
    instance(prop_oneof![3 => pick(LEAVES), 1 => inner].boxed())
}

/// Math bodies mixing rule instances, near misses and filler.
pub fn formula() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![2 => rule_instance(), 2 => pick(NOISE), 1 => pick(LEAVES), 1 => pick(SPACES)],
        0..10,
    )
    .prop_map(|parts| parts.concat())
}

// ---- brute-force oracle ----------------------------------------------------

struct OracleRule {
    name: &'static str,
    re: Regex,
}

fn oracle_rules() -> &'static [OracleRule] {
    static RULES: OnceLock<Vec<OracleRule>> = OnceLock::new();
    RULES.get_or_init(|| {
        let br = r"\{(?:[^{}]|\{[^{}]*\})*\}";
        let cs = r"\\[A-Za-z]+|\\[^A-Za-z]";
        let paren = format!(r"\((?:[^(){{}}\\]|{cs}|{br})*\)");
        let bal = format!(r"((?:[^;,|()\[\]{{}}\\]|{cs}|{br}|{paren})+)");
        let grp = format!(r"({br}|\\[A-Za-z]+|\\[^A-Za-z]|[^()\[\],;|=<>+\-{{}}\\\s])");
        let tok = format!(r"(?: ([A-Za-z])|({br}|\\[A-Za-z]+|[0-9]))");
        // priority first, then longer patterns, then name
        let defs: Vec<(&'static str, String)> = vec![
            ("qHypergeometric", format!(r"\{{\}}_{grp}\\phi_{grp}\(\\genfrac\{{\}}\{{\}}\{{0pt\}}\{{\}}{grp}{grp};{bal},{bal}\)")),
            ("Racah", format!(r"R_{grp}\({bal};{bal},{bal},{bal},{bal}\)")),
            ("Jacobi", format!(r"P_{grp}\^\{{\({bal},{bal}\)\}}\({bal}\)")),
            ("littleqLaguerre", format!(r"p_{grp}\({bal};{bal}\|{bal}\)")),
            ("qPochhammer", format!(r"\({bal};{bal}\)_{grp}")),
            ("Pochhammer", format!(r"\({bal}\)_{grp}")),
            ("EulerGamma", format!(r"\\Gamma\({bal}\)")),
            ("cos", format!(r"\\cos{tok}")),
            ("sin", format!(r"\\sin{tok}")),
        ];
        defs.into_iter().map(|(name, re)| OracleRule { name, re: Regex::new(&format!("^(?:{re})")).unwrap() }).collect()
    })
}

fn token_starts(text: &str) -> Vec<usize> {
    static TOK: OnceLock<Regex> = OnceLock::new();
    let re = TOK.get_or_init(|| Regex::new(r"\\[A-Za-z]+|\\.|(?s:.)").unwrap());
    re.find_iter(text).map(|m| m.start()).collect()
}

/// Counts rule firings in canonical LaTeX text by trying every rule at every
/// token start, leftmost first, recursing into captured arguments.
pub fn brute_force_counts(text: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    scan(text, &mut counts);
    counts
}

fn scan(text: &str, counts: &mut BTreeMap<String, u64>) {
    let starts = token_starts(text);
    let mut resume = 0;
    for &p in &starts {
        if p < resume {
            continue;
        }
        let rest = &text[p..];
        for rule in oracle_rules() {
            if let Some(c) = rule.re.captures(rest) {
                *counts.entry(rule.name.to_owned()).or_default() += 1;
                for m in c.iter().skip(1).flatten() {
                    scan(m.as_str(), counts);
                }
                resume = p + c.get(0).unwrap().end();
                break;
            }
        }
    }
}
