//! The `famvar` command line.
//!
//! Exit status is 0 on success, 1 when the input is well-formed but the
//! command reports diagnostics (invalid model, conflict, incomplete
//! configuration, ...) and 2 for usage and I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::configure::{
    apply_requirements, enumerate_products, product_model, Decision, Requirements, Session,
};
use crate::derive::{
    decision_table_text, decision_table_xml, derive_decision_table, export_feature_tree,
    feature_tree_dot, feature_tree_text, feature_tree_xml, reduce_decision_table,
};
use crate::diag::Diagnostic;
use crate::error::Error;
use crate::io::{
    parse_configuration, parse_family_model, parse_model_document, parse_requirements_for,
    render_table, serialize_configuration, serialize_family_model, serialize_model_document,
};
use crate::model::{validate_model, AreaId, FamilyModel, Target, ValueId, VariantId};
use crate::trace::{check_traces, customize_document, document_dot, document_text, trace_backward, trace_forward};

pub const SUCCESS: i32 = 0;
pub const DIAGNOSTICS: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Xml,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "famvar", version, about = "Variability management for system families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a variant model and list its diagnostics.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the variant table, or the canonical model with `--format xml`.
    Table {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the decision table, reduced for a requirements file if given.
    Decisions {
        model: PathBuf,
        requirements: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Customize a model for a requirements file.
    Customize {
        model: PathBuf,
        requirements: PathBuf,
        /// Writes model.xml and decisions.txt into this directory.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "xml")]
        format: Format,
    },
    /// List or count the valid products of an area.
    Enumerate {
        model: PathBuf,
        #[arg(long)]
        area: String,
        #[arg(long)]
        count: bool,
        #[arg(long, env = "FAMVAR_MAX_SPACE", default_value_t = crate::configure::DEFAULT_MAX_SPACE)]
        max_space: u128,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Replay a list of decisions and print their consequences.
    Configure {
        model: PathBuf,
        #[arg(long, required_unless_present = "requirements")]
        area: Option<String>,
        #[arg(long, conflicts_with = "area")]
        requirements: Option<PathBuf>,
        /// Values to include, applied in command-line order.
        #[arg(long, value_delimiter = ',')]
        decide: Vec<ValueId>,
        /// Variants to exclude, interleaved with `--decide` by position.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<VariantId>,
        /// Writes configuration.xml and product.xml into this directory.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check document traces, or follow them with `--forward`/`--backward`.
    Trace {
        model: PathBuf,
        #[arg(required = true)]
        documents: Vec<PathBuf>,
        #[arg(long, conflicts_with = "backward")]
        forward: Option<Target>,
        #[arg(long)]
        backward: Option<String>,
    },
    /// Derive the document of one product from a configuration.
    CustomizeDoc {
        model: PathBuf,
        configuration: PathBuf,
        document: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "xml")]
        format: Format,
    },
    /// Print the feature tree of a model.
    ExportFeatures {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Engine(Error),
    Report(Vec<Diagnostic>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the CLI against `std::env::args` and the process streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { SUCCESS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return USAGE;
        }
    };
    let sub = matches.subcommand().map(|(_, m)| m.clone()).unwrap_or_default();
    match execute(cli.command, &sub, out) {
        Ok(()) => SUCCESS,
        Err(failure) => report(failure, err),
    }
}

fn report(failure: Failure, err: &mut dyn Write) -> i32 {
    match failure {
        Failure::Usage(msg) => {
            let _ = writeln!(err, "error: {msg}");
            USAGE
        }
        Failure::Io(path, e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            USAGE
        }
        Failure::Engine(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.code());
            if matches!(e, Error::InvalidModel(_) | Error::DanglingTrace(_)) {
                for d in e.diagnostics() {
                    let _ = writeln!(err, "{d}");
                }
            }
            DIAGNOSTICS
        }
        Failure::Report(diagnostics) => {
            for d in diagnostics {
                let _ = writeln!(err, "{d}");
            }
            DIAGNOSTICS
        }
    }
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
}

fn load_model(path: &Path) -> std::result::Result<FamilyModel, Failure> {
    Ok(parse_family_model(&read(path)?)?)
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::Usage(format!("--format {format:?} is not available for `{command}`").to_lowercase())
}

fn diagnostics_xml(diagnostics: &[Diagnostic]) -> String {
    let mut w = crate::io::xml::Writer::new();
    if diagnostics.is_empty() {
        w.empty("diagnostics", &[]);
    } else {
        w.open("diagnostics", &[]);
        for d in diagnostics {
            w.empty(
                "diagnostic",
                &[("code", d.code.token()), ("subject", &d.subject), ("message", &d.message)],
            );
        }
        w.close("diagnostics");
    }
    w.finish()
}

/// The decisions in the order they appeared on the command line.
fn ordered_decisions(matches: &ArgMatches, decide: &[ValueId], exclude: &[VariantId]) -> Vec<Decision> {
    let positions = |id: &str| -> Vec<usize> {
        matches
            .indices_of(id)
            .map(|i| i.collect())
            .unwrap_or_default()
    };
    let mut all: Vec<(usize, Decision)> = positions("decide")
        .into_iter()
        .zip(decide.iter().map(|v| Decision::Include(*v)))
        .chain(
            positions("exclude")
                .into_iter()
                .zip(exclude.iter().map(|v| Decision::Exclude(*v))),
        )
        .collect();
    all.sort_by_key(|(i, _)| *i);
    all.into_iter().map(|(_, d)| d).collect()
}

fn execute(command: Command, matches: &ArgMatches, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { model, format } => {
            let bytes = read(&model)?;
            // Parse errors carry the same diagnostics validate_model reports.
            let diagnostics = match parse_family_model(&bytes) {
                Ok(m) => validate_model(&m),
                Err(e) => e.diagnostics(),
            };
            match format {
                Format::Text => {
                    for d in &diagnostics {
                        emit(out, &format!("{d}\n"))?;
                    }
                }
                Format::Xml => emit(out, &diagnostics_xml(&diagnostics))?,
                Format::Dot => return Err(unsupported(format, "validate")),
            }
            if diagnostics.is_empty() {
                Ok(())
            } else {
                Err(Failure::Report(Vec::new()))
            }
        }
        Command::Table { model, format } => {
            let model = load_model(&model)?;
            match format {
                Format::Text => emit(out, &render_table(&model)),
                Format::Xml => emit(out, &serialize_family_model(&model)?),
                Format::Dot => Err(unsupported(format, "table")),
            }
        }
        Command::Decisions {
            model,
            requirements,
            format,
        } => {
            let model = load_model(&model)?;
            let mut table = derive_decision_table(&model)?;
            if let Some(path) = requirements {
                let reqs = parse_requirements_for(&read(&path)?, &model)?;
                let custom = apply_requirements(&model, &reqs)?;
                table = reduce_decision_table(&table, &custom.model, &reqs)?;
            }
            match format {
                Format::Text => emit(out, &decision_table_text(&table)),
                Format::Xml => emit(out, &decision_table_xml(&table)),
                Format::Dot => Err(unsupported(format, "decisions")),
            }
        }
        Command::Customize {
            model,
            requirements,
            out: dir,
            format,
        } => {
            let model = load_model(&model)?;
            let reqs = parse_requirements_for(&read(&requirements)?, &model)?;
            let custom = apply_requirements(&model, &reqs)?;
            let table = reduce_decision_table(&derive_decision_table(&model)?, &custom.model, &reqs)?;
            let rendered = match format {
                Format::Xml => serialize_family_model(&custom.model)?,
                Format::Text => render_table(&custom.model),
                Format::Dot => return Err(unsupported(format, "customize")),
            };
            match dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
                    write_file(&dir.join("model.xml"), &serialize_family_model(&custom.model)?)?;
                    write_file(&dir.join("decisions.txt"), &decision_table_text(&table))
                }
                None => emit(out, &rendered),
            }
        }
        Command::Enumerate {
            model,
            area,
            count,
            max_space,
            format,
        } => {
            let model = load_model(&model)?;
            let products = enumerate_products(&model, &AreaId::new(area), max_space)?;
            if count {
                return emit(out, &format!("{}\n", products.count()));
            }
            match format {
                Format::Text => {
                    for p in products {
                        emit(out, &format!("{}\n", p.summary()))?;
                    }
                    Ok(())
                }
                Format::Xml => {
                    for p in products {
                        emit(out, &serialize_configuration(&p))?;
                    }
                    Ok(())
                }
                Format::Dot => Err(unsupported(format, "enumerate")),
            }
        }
        Command::Configure {
            model,
            area,
            requirements,
            ref decide,
            ref exclude,
            out: dir,
            format,
        } => {
            let full = load_model(&model)?;
            let mut session = match requirements {
                Some(path) => Session::with_requirements(&full, &parse_requirements_for(&read(&path)?, &full)?)?,
                None => {
                    let reqs = Requirements::new(AreaId::new(area.unwrap_or_default()));
                    reqs.check_against(&full)?;
                    Session::new(&full, &reqs.area)?
                }
            };
            for decision in ordered_decisions(matches, decide, exclude) {
                let outcome = session.apply(decision)?;
                emit(out, &format!("{decision}\n"))?;
                for c in &outcome.consequences {
                    emit(out, &format!("  {c}\n"))?;
                }
                if !outcome.accepted {
                    return Err(Failure::Report(Vec::new()));
                }
            }
            let mut config = session.configuration()?;
            config.extend_excluded(&full);
            match format {
                Format::Text => emit(out, &format!("{}\n", config.summary()))?,
                Format::Xml => emit(out, &serialize_configuration(&config))?,
                Format::Dot => return Err(unsupported(format, "configure")),
            }
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
                write_file(&dir.join("configuration.xml"), &serialize_configuration(&config))?;
                let product = product_model(&full, &config);
                if !product.variants.is_empty() {
                    write_file(&dir.join("product.xml"), &serialize_family_model(&product)?)?;
                }
            }
            Ok(())
        }
        Command::Trace {
            model,
            documents,
            forward,
            backward,
        } => {
            let model = load_model(&model)?;
            let docs = documents
                .iter()
                .map(|p| Ok(parse_model_document(&read(p)?)?))
                .collect::<std::result::Result<Vec<_>, Failure>>()?;
            if let Some(id) = forward {
                for r in trace_forward(&model, id, &docs)? {
                    emit(out, &format!("{} {}\n", r.document, r.element))?;
                }
                return Ok(());
            }
            if let Some(element) = backward {
                let tag = trace_backward(&docs, &element)?;
                let line = tag.map_or_else(|| "untagged".to_owned(), |t| format!("{t} {}", model.label(t)));
                return emit(out, &format!("{line}\n"));
            }
            let diagnostics: Vec<Diagnostic> = docs.iter().flat_map(|d| check_traces(d, &model)).collect();
            if diagnostics.is_empty() {
                Ok(())
            } else {
                Err(Failure::Report(diagnostics))
            }
        }
        Command::CustomizeDoc {
            model,
            configuration,
            document,
            out: dir,
            format,
        } => {
            let model = load_model(&model)?;
            let mut config = parse_configuration(&read(&configuration)?)?;
            config.extend_excluded(&model);
            let doc = parse_model_document(&read(&document)?)?;
            let custom = customize_document(&doc, &model, &config)?;
            let rendered = match format {
                Format::Xml => serialize_model_document(&custom),
                Format::Text => document_text(&custom),
                Format::Dot => document_dot(&custom),
            };
            match dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(dir.clone(), e))?;
                    let ext = match format {
                        Format::Xml => "xml",
                        Format::Text => "txt",
                        Format::Dot => "dot",
                    };
                    let name = document.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "document".into());
                    write_file(&dir.join(format!("{name}.{ext}")), &rendered)
                }
                None => emit(out, &rendered),
            }
        }
        Command::ExportFeatures { model, format } => {
            let tree = export_feature_tree(&load_model(&model)?)?;
            emit(
                out,
                &match format {
                    Format::Text => feature_tree_text(&tree),
                    Format::Dot => feature_tree_dot(&tree),
                    Format::Xml => feature_tree_xml(&tree),
                },
            )
        }
        Command::Serve { port, host } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io("<runtime>".into(), e))?;
            let addr = format!("{host}:{port}");
            runtime
                .block_on(crate::service::serve(&addr))
                .map_err(|e| Failure::Io(addr.into(), e))
        }
    }
}
