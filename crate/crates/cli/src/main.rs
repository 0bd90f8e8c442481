use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use vecstruct_core::cache::GroupCache;
use vecstruct_core::geometry::CATALOG;
use vecstruct_core::groups::GroupId;
use vecstruct_core::{run_suite, Error, SuiteConfig, SuiteId};

const EXIT_USAGE: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

/// Verify G-structures of vectorial type: algebra, group catalog, torsion
/// classification and chart-level models.
#[derive(Debug, Parser)]
#[command(name = "vecstruct", version)]
struct Cli {
    /// Suite to run: algebra, groups, torsion, manifold or all.
    #[arg(long)]
    suite: Option<String>,

    /// Restrict the groups and torsion suites to one group.
    #[arg(long)]
    group: Option<String>,

    /// Restrict the manifold suite to one model.
    #[arg(long)]
    model: Option<String>,

    /// Model parameters as k=v; repeat the flag or separate with commas.
    #[arg(long, value_name = "K=V", value_delimiter = ',')]
    params: Vec<String>,

    /// Replace every floating-point tolerance.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Central-difference step.
    #[arg(long)]
    fd_step: Option<f64>,

    /// Number of sample points per chart-level identity.
    #[arg(long)]
    grid_points: Option<usize>,

    /// Seed for every random draw.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Enable the Spin(9) 8-form job.
    #[arg(long)]
    stretch: bool,

    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Structure-group cache directory [env: VECSTRUCT_CACHE_DIR].
    #[arg(long, value_name = "PATH")]
    cache_dir: Option<PathBuf>,

    /// Print the suite, group and model catalog and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    suite: Option<String>,
    group: Option<String>,
    model: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    tolerance: Option<f64>,
    fd_step: Option<f64>,
    grid_points: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
    stretch: Option<bool>,
    cache_dir: Option<PathBuf>,
}

fn catalog() -> String {
    let mut out = String::new();
    out.push_str("suites:\n");
    for s in SuiteId::NAMES {
        out.push_str(&format!("  {s}\n"));
    }
    out.push_str("groups:\n");
    for g in GroupId::NAMES.iter().chain(&["SU2"]) {
        out.push_str(&format!("  {g}\n"));
    }
    out.push_str("models:\n");
    for m in CATALOG {
        let params: Vec<String> = m.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("  {:<18} {}", m.name, m.summary));
        if !params.is_empty() {
            out.push_str(&format!(" [{}]", params.join(", ")));
        }
        out.push('\n');
    }
    out
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n\n{}", catalog());
    ExitCode::from(EXIT_USAGE)
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in raw.iter().filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("parameter `{item}` is not of the form k=v"))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("parameter `{k}` has non-numeric value `{v}`"))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

struct Resolved {
    suite: SuiteId,
    config: SuiteConfig,
    format: Format,
    output: Option<PathBuf>,
}

fn resolve(cli: Cli) -> Result<Resolved, String> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let suite_name = cli.suite.or(file.suite).unwrap_or_else(|| "all".into());
    let suite = SuiteId::parse(&suite_name).map_err(|e| e.to_string())?;
    let mut params = file.params;
    params.extend(parse_params(&cli.params)?);
    let defaults = SuiteConfig::default();
    let cache_dir = cli
        .cache_dir
        .or(file.cache_dir)
        .unwrap_or_else(|| GroupCache::from_env().dir().to_path_buf());
    let config = SuiteConfig {
        seed: cli.seed.or(file.seed).unwrap_or(defaults.seed),
        grid_points: cli.grid_points.or(file.grid_points).unwrap_or(defaults.grid_points),
        fd_step: cli.fd_step.or(file.fd_step).unwrap_or(defaults.fd_step),
        tolerance: cli.tolerance.or(file.tolerance),
        group: cli.group.or(file.group),
        model: cli.model.or(file.model),
        params,
        stretch: cli.stretch || file.stretch.unwrap_or(false),
        cache_dir: Some(cache_dir),
    };
    Ok(Resolved {
        suite,
        config,
        format: cli.format.or(file.format).unwrap_or(Format::Json),
        output: cli.output.or(file.output),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if cli.list {
        print!("{}", catalog());
        return ExitCode::SUCCESS;
    }
    let r = match resolve(cli) {
        Ok(r) => r,
        Err(msg) => return usage_error(msg),
    };
    let report = match run_suite(r.suite, &r.config) {
        Ok(rep) => rep,
        Err(e @ (Error::UnknownName { .. } | Error::InvalidParameter { .. })) => return usage_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let body = match r.format {
        Format::Json => match report.to_json() {
            Ok(s) => s + "\n",
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        Format::Text => report.to_text(),
    };
    match &r.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{body}"),
    }
    if r.format == Format::Json && r.output.is_some() {
        eprint!("{}", summary_line(&report));
    }
    ExitCode::from(report.exit_code() as u8)
}

fn summary_line(report: &vecstruct_core::VerificationReport) -> String {
    let s = &report.summary;
    format!(
        "{}: {} cases, {} pass, {} fail, {} skipped, {} not computed\n",
        report.header.suite, s.total, s.pass, s.fail, s.skipped, s.not_computed
    )
}
