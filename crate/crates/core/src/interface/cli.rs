//! The `cks` command line.
//!
//! Exit status is 0 on success, 1 when the command line itself is wrong and
//! 2 when an input file is unreadable or does not make sense.

use std::ffi::OsString;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::Workspace;
use crate::browsing::{BrowseSession, KnowledgeSystem, Scope};
use crate::context::{AttributeToken, ConceptualView};
use crate::error::{Error, Result};
use crate::hyperize::{emit_web, graph_json, hyperize, parse_link_graph, HyperizationConfig, Orientation};
use crate::interchange::{clif_to_fcif, fcif_to_clif, parse_clif, parse_fcif, parse_views, FcifDocument};
use crate::linkage::{format_links, Mode};
use crate::scaling::{emit_records, interpret, parse_records, parse_scales, summarize_document};

#[derive(Debug, Parser)]
#[command(
    name = "cks",
    version,
    about = "Concept lattices, conceptual browsing and hyperization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QueryKind {
    #[value(alias = "intensional")]
    Int,
    #[value(alias = "extensional")]
    Ext,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert between FCIF and CLIF; the target format follows the output
    /// extension, or is the other format when writing to stdout.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a lattice and print its statistics.
    Lattice {
        input: PathBuf,
        /// Also list every concept.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        raw: bool,
    },
    /// Print a similarity (global) or difference (local) ranking.
    Rank {
        input: PathBuf,
        /// View, object, attribute or 1-based concept index.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value = "ext")]
        mode: Mode,
        #[arg(long, default_value = "global")]
        scope: Scope,
        #[arg(long)]
        views: Option<PathBuf>,
        /// Keep the context as given instead of purifying and reducing it.
        #[arg(long)]
        raw: bool,
    },
    /// Rank labels against a goal made of attributes (int) or objects (ext).
    Query {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: QueryKind,
        elements: Vec<String>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        views: Option<PathBuf>,
        #[arg(long)]
        raw: bool,
    },
    /// Records and scales to crisp links between concept pages.
    Hyperize {
        records: PathBuf,
        #[arg(long)]
        scales: PathBuf,
        /// Link graph of `node` and `edge` lines.
        #[arg(long)]
        links: Option<PathBuf>,
        #[arg(long)]
        views: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
        #[arg(long, default_value = "cross")]
        orientation: Orientation,
        #[arg(long)]
        raw: bool,
        /// Directory for the generated pages.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        graph_json: Option<PathBuf>,
        /// Print document-to-document links instead of concept links.
        #[arg(long)]
        object_links: bool,
    },
    /// Interpret records through scales and print the FCIF context.
    Scale {
        records: PathBuf,
        #[arg(long)]
        scales: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// TYPE name; defaults to the records file stem.
        #[arg(long = "type")]
        type_name: Option<String>,
    },
    /// Summarize documents into metadata records.
    Summarize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Parse-check files by extension (.fcif .clif .views .rec .cfg .links).
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Serve a workspace over HTTP.
    Serve {
        workspace: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: SocketAddr,
    },
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line, `args[0]` being the program name.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = CliOutput::default();
    if let Err(e) = execute(cli.command, &mut out) {
        out.code = 2;
        out.stderr.push_str(&format!("error: {e}\n"));
    }
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

/// Views from `explicit`, else from `<stem>.views` next to `input`.
fn load_views(input: &Path, explicit: Option<&Path>) -> Result<Vec<ConceptualView>> {
    let sibling = input.with_extension("views");
    match explicit {
        Some(p) => parse_views(&read(p)?),
        None if sibling.is_file() => parse_views(&read(&sibling)?),
        None => Ok(Vec::new()),
    }
}

fn load_system(input: &Path, views: Option<&Path>, raw: bool) -> Result<KnowledgeSystem> {
    let views = load_views(input, views)?;
    match extension(input) {
        "fcif" => {
            let ctx = parse_fcif(&read(input)?)?.to_context()?;
            KnowledgeSystem::prepare(&ctx, &views, !raw)
        }
        "clif" => KnowledgeSystem::new(parse_clif(&read(input)?)?.to_lattice()?, &views),
        other => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("{}: expected a .fcif or .clif file, not `.{other}`", input.display()),
        ))),
    }
}

fn execute(command: Command, out: &mut CliOutput) -> Result<()> {
    match command {
        Command::Convert { input, output } => {
            let text = read(&input)?;
            let target = output.as_deref().map(extension).unwrap_or(match extension(&input) {
                "clif" => "fcif",
                _ => "clif",
            });
            let converted = match (extension(&input), target) {
                ("fcif", "clif") => fcif_to_clif(&parse_fcif(&text)?)?.emit(),
                ("fcif", "fcif") => parse_fcif(&text)?.emit(),
                ("clif", "fcif") => clif_to_fcif(&parse_clif(&text)?)?.emit(),
                ("clif", "clif") => parse_clif(&text)?.emit(),
                (from, to) => {
                    return Err(Error::Io(std::io::Error::new(
                        std::io::ErrorKind::InvalidInput,
                        format!("cannot convert `.{from}` to `.{to}`"),
                    )))
                }
            };
            match output {
                Some(path) => write(&path, &converted)?,
                None => out.stdout.push_str(&converted),
            }
        }
        Command::Lattice { input, list, raw } => {
            let system = load_system(&input, None, raw)?;
            let l = system.lattice();
            let (joins, meets) = l.irreducibles();
            out.stdout.push_str(&format!(
                "objects: {}\nattributes: {}\nconcepts: {}\ncovers: {}\njoin-irreducible: {}\nmeet-irreducible: {}\n",
                l.context().object_count(),
                l.context().attribute_count(),
                l.len(),
                l.cover_count(),
                joins.len(),
                meets.len()
            ));
            if list {
                for k in 0..l.len() {
                    let c = &l.concepts()[k];
                    let extent: Vec<&str> = l.context().object_names(&c.extent).collect();
                    let intent: Vec<String> = l
                        .context()
                        .attribute_tokens(&c.intent)
                        .map(ToString::to_string)
                        .collect();
                    out.stdout.push_str(&format!(
                        "{} {} {{{}}} {{{}}}\n",
                        k + 1,
                        system.full_label(k),
                        extent.join(", "),
                        intent.join(", ")
                    ));
                }
            }
        }
        Command::Rank {
            input,
            state,
            mode,
            scope,
            views,
            raw,
        } => {
            let system = std::sync::Arc::new(load_system(&input, views.as_deref(), raw)?);
            let mut session = BrowseSession::new(system.clone(), mode);
            if let Some(name) = state {
                session.transition(system.concept_named(&name)?)?;
            }
            session.set_scope(scope)?;
            out.stdout.push_str(&session.ranking()?.render());
        }
        Command::Query {
            input,
            kind,
            elements,
            threshold,
            views,
            raw,
        } => {
            let system = load_system(&input, views.as_deref(), raw)?;
            let mut result = match kind {
                QueryKind::Int => {
                    let tokens = elements
                        .iter()
                        .map(|e| e.parse::<AttributeToken>())
                        .collect::<Result<Vec<_>>>()?;
                    system.intensional_query(&tokens)?
                }
                QueryKind::Ext => {
                    let names: Vec<&str> = elements.iter().map(String::as_str).collect();
                    system.extensional_query(&names)?
                }
            };
            if let Some(t) = threshold {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::ThresholdOutOfRange(t));
                }
                result.ranking = result.ranking.threshold_filter(t);
            }
            if let Some(k) = result.landing {
                out.stdout
                    .push_str(&format!("landing: {} {}\n", k + 1, system.full_label(k)));
            }
            out.stdout.push_str(&result.ranking.render());
        }
        Command::Hyperize {
            records,
            scales,
            links,
            views,
            threshold,
            orientation,
            raw,
            out: out_dir,
            graph_json: json_path,
            object_links,
        } => {
            let records = parse_records(&read(&records)?)?;
            let mut config = HyperizationConfig::new(parse_scales(&read(&scales)?)?, threshold)?;
            config.orientation = orientation;
            config.raw_counts = raw;
            let graph = links
                .as_deref()
                .map(|p| read(p).and_then(|t| parse_link_graph(&t)))
                .transpose()?;
            let views = match views {
                Some(p) => parse_views(&read(&p)?)?,
                None => Vec::new(),
            };
            let h = hyperize(&records, graph.as_ref(), &views, &config)?;
            if let Some(dir) = out_dir {
                let written = emit_web(&h.system, &h.links, &dir)?;
                log::info!("wrote {} files to {}", written.len(), dir.display());
            }
            if let Some(path) = json_path {
                let text =
                    serde_json::to_string_pretty(&graph_json(&h.system, &h.links)).expect("json values serialize");
                write(&path, &(text + "\n"))?;
            }
            if object_links {
                for (g, h, w) in h.object_links()? {
                    out.stdout.push_str(&format!("{g} {h} {w:.6}\n"));
                }
            } else {
                out.stdout.push_str(&format_links(&h.links));
            }
        }
        Command::Scale {
            records,
            scales,
            output,
            type_name,
        } => {
            let type_name = type_name.unwrap_or_else(|| {
                records
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("context")
                    .to_owned()
            });
            let ctx = interpret(&parse_records(&read(&records)?)?, &parse_scales(&read(&scales)?)?)?;
            let text = FcifDocument::from_context(type_name, &ctx).emit();
            match output {
                Some(path) => write(&path, &text)?,
                None => out.stdout.push_str(&text),
            }
        }
        Command::Summarize { files } => {
            let records = files
                .iter()
                .map(|f| summarize_document(f, None))
                .collect::<Result<Vec<_>>>()?;
            out.stdout.push_str(&emit_records(&records));
        }
        Command::Validate { files } => {
            let mut failed = 0;
            for file in &files {
                match validate(file) {
                    Ok(()) => out.stdout.push_str(&format!("{}: ok\n", file.display())),
                    Err(e) => {
                        failed += 1;
                        out.stderr.push_str(&diagnostic(file, &e));
                    }
                }
            }
            if failed > 0 {
                out.code = 2;
            }
        }
        Command::Serve { workspace, bind } => {
            let ws = Workspace::load(&workspace)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(super::service::serve(ws, bind))?;
        }
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let text = read(path)?;
    match extension(path) {
        "fcif" => {
            parse_fcif(&text)?.to_context()?;
        }
        "clif" => {
            parse_clif(&text)?.to_lattice()?;
        }
        "views" => {
            parse_views(&text)?;
        }
        "rec" => {
            parse_records(&text)?;
        }
        "cfg" => {
            parse_scales(&text)?;
        }
        "links" => {
            parse_link_graph(&text)?;
        }
        other => {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("unknown file type `.{other}`"),
            )))
        }
    }
    Ok(())
}

/// `file:line:column: message` when the error has a position.
fn diagnostic(path: &Path, e: &Error) -> String {
    let p = path.display();
    match e {
        Error::Syntax { line, column, message } => format!("{p}:{line}:{column}: {message}\n"),
        Error::Undeclared { line, column, name } => format!("{p}:{line}:{column}: undeclared name `{name}`\n"),
        Error::DuplicateDeclaration { line, column, name } => {
            format!("{p}:{line}:{column}: duplicate declaration of `{name}`\n")
        }
        other => format!("{p}: {other}\n"),
    }
}
