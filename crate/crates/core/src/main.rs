use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use labelforge::eps::scan_tags;
use labelforge::expr::HookSet;
use labelforge::format::{parse_hooks, parse_scene};
use labelforge::labeling::{parse_tex, psfrag_export, renumber_pair, write_files_atomically, TagRegistry};
use labelforge::preview::{default_measure, substitute_preview};
use labelforge::scene::ExportOptions;
use labelforge::Error;

/// Export plot scenes to tagged EPS plus psfrag replacement macros.
#[derive(Parser)]
#[command(name = "labelforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write BASENAME-psfrag.eps and BASENAME-psfrag.tex for a scene file.
    Export {
        scene: PathBuf,
        /// Output prefix; defaults to the scene path without its extension.
        #[arg(long)]
        basename: Option<String>,
        #[arg(long, default_value = "-psfrag.tex")]
        tex_suffix: String,
        #[arg(long, default_value = "-psfrag.eps")]
        eps_suffix: String,
        /// Replace tags by the shortest tags a, b, ..., Z, aa, ...
        #[arg(long)]
        renumber_tags: bool,
        /// Tag only labels that carry an explicit psfrag directive.
        #[arg(long)]
        no_auto_convert: bool,
        /// Ignore text anchors; implies --no-auto-convert.
        #[arg(long)]
        no_auto_position: bool,
        /// Hook definition file.
        #[arg(long, env = "LABELFORGE_HOOKS")]
        hooks: Option<PathBuf>,
    },
    /// List the strings shown in an EPS with their device placement.
    Inspect {
        eps: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Renumber the tags of an EPS and its tex file in place, keeping .bak copies.
    Renumber { eps: PathBuf, tex: PathBuf },
    /// Draw each replacement as a placed box in a copy of the EPS.
    Preview {
        eps: PathBuf,
        tex: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Fail when a shown string has no psfrag entry.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
    Json,
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn read_text(path: &Path) -> Result<String, Error> {
    let bytes = read(path)?;
    String::from_utf8(bytes).map_err(|e| {
        Error::Document(format!("{}: invalid UTF-8 at byte {}", path.display(), e.utf8_error().valid_up_to()))
    })
}

/// Prints a line; a closed stdout (e.g. piped into `head`) is not an error.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Export {
            scene,
            basename,
            tex_suffix,
            eps_suffix,
            renumber_tags,
            no_auto_convert,
            no_auto_position,
            hooks,
        } => {
            let parsed = parse_scene(&read_text(&scene)?)?;
            let hooks = match hooks {
                Some(path) => parse_hooks(&read_text(&path)?)?,
                None => HookSet::new(),
            };
            let basename = basename.unwrap_or_else(|| scene.with_extension("").to_string_lossy().into_owned());
            let opts = ExportOptions {
                tex_suffix,
                eps_suffix,
                renumber_tags,
                auto_convert_text: !no_auto_convert,
                auto_position: !no_auto_position,
            };
            let out = psfrag_export(&parsed, &basename, &opts, &hooks)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            say(&format!("{} labels, {} tagged", out.label_count, out.tagged_count));
        }
        Command::Inspect { eps, format } => {
            let occurrences = scan_tags(&read(&eps)?)?;
            match format {
                Format::Text | Format::Tsv => {
                    let sep = if matches!(format, Format::Tsv) { "\t" } else { "  " };
                    if matches!(format, Format::Tsv) {
                        say("tag\tx\ty\trot\tscale");
                    }
                    for o in &occurrences {
                        say(&format!(
                            "{}{sep}{:.3}{sep}{:.3}{sep}{:.3}{sep}{:.3}",
                            o.tag, o.device_position.x, o.device_position.y, o.rotation, o.scale
                        ));
                    }
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = occurrences
                        .iter()
                        .map(|o| {
                            serde_json::json!({
                                "tag": o.tag,
                                "x": o.device_position.x,
                                "y": o.device_position.y,
                                "rot": o.rotation,
                                "scale": o.scale,
                                "font_size": o.font_size,
                                "offset": o.byte_span.start,
                            })
                        })
                        .collect();
                    say(&serde_json::to_string_pretty(&rows).expect("plain JSON values"));
                }
            }
        }
        Command::Renumber { eps, tex } => {
            let eps_bytes = read(&eps)?;
            let tex_text = read_text(&tex)?;
            let (new_eps, new_tex, map) = renumber_pair(&eps_bytes, &tex_text)?;
            write_files_atomically(&[
                (&with_suffix(&eps, ".bak"), &eps_bytes),
                (&with_suffix(&tex, ".bak"), tex_text.as_bytes()),
            ])?;
            write_files_atomically(&[(&eps, &new_eps), (&tex, new_tex.as_bytes())])?;
            say(&format!("{} tags renamed", map.len()));
        }
        Command::Preview { eps, tex, output, strict } => {
            let eps_bytes = read(&eps)?;
            let registry = TagRegistry::from_entries(parse_tex(&read_text(&tex)?)?)?;
            let preview = substitute_preview(&eps_bytes, &registry, default_measure)?;
            for w in &preview.warnings {
                eprintln!("warning: {w}");
            }
            if strict && !preview.warnings.is_empty() {
                eprintln!("error: {} unmatched or untracked strings (--strict)", preview.warnings.len());
                return Ok(ExitCode::from(2));
            }
            write_files_atomically(&[(&output, &preview.bytes)])?;
            say(&format!("{} substituted", preview.placed.len()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
