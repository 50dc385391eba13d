use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use semtex::pipeline::collect_files;
use semtex::{
    request_mathml, rewrite_source, run_pipeline, MockRenderService, PipelineConfig, RenderError,
};

#[derive(Parser)]
#[command(
    name = "semtex",
    version,
    about = "Semantic enrichment of LaTeX formula sources into a MediaWiki XML dump"
)]
struct Cli {
    /// JSON pipeline configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Sources {
    /// Input .tex file or directory (repeatable).
    #[arg(long = "input", short)]
    inputs: Vec<PathBuf>,
    /// Glossary JSON; the bundled glossary when omitted.
    #[arg(long)]
    glossary: Option<PathBuf>,
}

#[derive(Args, Default)]
struct Build {
    #[command(flatten)]
    sources: Sources,
    /// Bibliography JSON; the bundled one when omitted.
    #[arg(long)]
    bib: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Page title prefix.
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long)]
    citation_key: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: sources to dump and report.
    Convert {
        #[command(flatten)]
        build: Build,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rewrite math in the sources with semantic macros, for review.
    Replace {
        #[command(flatten)]
        sources: Sources,
        /// Output directory, mirroring the input layout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the run report without writing a dump.
    Stats {
        #[command(flatten)]
        build: Build,
    },
    /// Send every formula to a rendering service and report failures.
    VerifyRender {
        #[command(flatten)]
        build: Build,
        #[arg(long, env = "SEMTEX_ENDPOINT")]
        endpoint: Option<String>,
        /// Check at most this many formulae.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Serve the bundled mock rendering service.
    MockRender {
        #[arg(long, default_value = "127.0.0.1:8099")]
        addr: String,
    },
}

fn base_config(path: Option<&Path>) -> Result<PipelineConfig> {
    Ok(match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    })
}

fn apply_sources(cfg: &mut PipelineConfig, s: Sources) {
    if !s.inputs.is_empty() {
        cfg.inputs = s.inputs;
    }
    if s.glossary.is_some() {
        cfg.glossary = s.glossary;
    }
}

fn apply_build(cfg: &mut PipelineConfig, b: Build) {
    apply_sources(cfg, b.sources);
    if b.bib.is_some() {
        cfg.bibliography = b.bib;
    }
    if let Some(w) = b.workers {
        cfg.workers = w;
    }
    if let Some(c) = b.corpus {
        cfg.corpus = c;
    }
    if let Some(k) = b.citation_key {
        cfg.citation_key = k;
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn convert(cfg: PipelineConfig) -> Result<ExitCode> {
    let Some(out) = cfg.out.clone() else {
        bail!("no output path: pass --out or set `out` in the config")
    };
    let run = run_pipeline(&cfg)?;
    write(&out, &run.dump)?;
    let report = run.report.to_string();
    if let Some(r) = &cfg.report {
        write(r, &report)?;
    }
    print!("{report}");
    Ok(if run.file_errors() > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn stats(cfg: PipelineConfig) -> Result<ExitCode> {
    let run = run_pipeline(&cfg)?;
    print!("{}", run.report);
    Ok(if run.file_errors() > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn replace(cfg: PipelineConfig, out: &Path) -> Result<ExitCode> {
    cfg.validate()?;
    let g = cfg.load_glossary()?;
    let mut failed = 0;
    let mut total = 0;
    for (path, name) in cfg.input_files()? {
        let src = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        match rewrite_source(&src, &g) {
            Ok(r) => {
                for i in &r.issues {
                    eprintln!("warning: {name}: {i}");
                }
                total += r.stats.total;
                write(&out.join(&name), &r.text)?;
            }
            Err(e) => {
                eprintln!("error: {name}: {e}");
                failed += 1;
            }
        }
    }
    println!("replacements: {total}");
    Ok(if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn verify_render(cfg: PipelineConfig, limit: Option<usize>) -> Result<ExitCode> {
    cfg.validate()?;
    let Some(endpoint) = cfg.endpoint.clone() else {
        bail!("no endpoint: pass --endpoint or set SEMTEX_ENDPOINT")
    };
    let g = cfg.load_glossary()?;
    let bib = cfg.load_bibliography()?;
    let files = collect_files(&cfg, &g, &bib)?;
    let formulae: Vec<_> = files
        .iter()
        .flat_map(|f| &f.formulae)
        .take(limit.unwrap_or(usize::MAX))
        .collect();
    let mut ok = 0;
    let mut warnings = 0;
    for f in &formulae {
        match request_mathml(&f.source_semantic, &endpoint) {
            Ok(_) => ok += 1,
            Err(e @ RenderError::ServiceUnreachable(_)) => {
                // no point asking again
                println!("warning: {e}");
                warnings += formulae.len() - ok;
                break;
            }
            Err(e) => {
                println!("warning: {}: {e}", f.id);
                warnings += 1;
            }
        }
    }
    println!("rendered: {ok}/{}", formulae.len());
    println!("warnings: {warnings}");
    Ok(if files.iter().any(|f| f.error.is_some()) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = base_config(cli.config.as_deref())?;
    match cli.command {
        Command::Convert { build, out, report } => {
            apply_build(&mut cfg, build);
            if out.is_some() {
                cfg.out = out;
            }
            if report.is_some() {
                cfg.report = report;
            }
            convert(cfg)
        }
        Command::Stats { build } => {
            apply_build(&mut cfg, build);
            stats(cfg)
        }
        Command::Replace { sources, out } => {
            apply_sources(&mut cfg, sources);
            replace(cfg, &out)
        }
        Command::VerifyRender {
            build,
            endpoint,
            limit,
        } => {
            apply_build(&mut cfg, build);
            if endpoint.is_some() {
                cfg.endpoint = endpoint;
            }
            verify_render(cfg, limit)
        }
        Command::MockRender { addr } => {
            let mock = MockRenderService::bind(&addr).with_context(|| format!("binding {addr}"))?;
            println!("mock rendering service at {}", mock.endpoint());
            mock.wait();
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
