//! Batch front end for the right LCM monoid toolkit: load a family from a
//! config file, run the scale-existence pipeline, and emit meet graphs,
//! reports, completion diagrams, and ζ tables.
//!
//! Exit codes: 0 when the analysis succeeds (for `analyze`: the scale
//! exists), 1 when the scale is absent, 2 when the verdict is inconclusive
//! (enumeration cap too small), and 3 for usage, config, parse, or I/O
//! errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use monoid_scales::core_graph::{build_core_graph, CoreGraph};
use monoid_scales::families::{load_family_from_path, FileConfig};
use monoid_scales::grid::{word_lcm, IrreducibleWord};
use monoid_scales::kernel::{LcmOutcome, MonoidHandle};
use monoid_scales::scale::{
    check_conditions, condition_samples, zeta_partial, NxSubsemigroup, ScaleReport,
};

const EXIT_ABSENT: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_ERROR: u8 = 3;

/// Consulted when neither `--cap` nor the config's `run.class_cap` is set.
const CAP_ENV: &str = "MONOID_SCALES_CAP";
const DEFAULT_CAP: usize = 64;

#[derive(Parser)]
#[command(name = "monoid-scales", version, about = "Analysis tool for right LCM monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the four scale-existence conditions and write artifacts.
    Analyze {
        /// Family config file (TOML, or JSON with a .json extension).
        config: PathBuf,
        /// Cap on enumerated irreducible classes (overrides the config).
        #[arg(long)]
        cap: Option<usize>,
        /// Directory for scale.json, graph.dot, and zeta.csv artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the right LCM of two elements, or of two irreducible words
    /// square by square with --grid.
    Lcm {
        config: PathBuf,
        /// Left element (with --grid: a word of irreducible letters).
        s: String,
        /// Right element (with --grid: a word of irreducible letters).
        t: String,
        /// Run the completion diagram and print it.
        #[arg(long)]
        grid: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Evaluate ζ partial sums against Euler closed forms; CSV on stdout.
    Zeta {
        config: PathBuf,
        /// Comma-separated inverse-temperature values, e.g. --beta 2,3.
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
        /// Largest scale value included in the partial sum.
        #[arg(long)]
        cutoff: u64,
        /// Restrict the value semigroup to these generators instead of the
        /// analyzed component cardinalities, e.g. --generators 2.
        #[arg(long, value_delimiter = ',')]
        generators: Option<Vec<u64>>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Export the meet graph of noncore irreducible classes as DOT.
    Graph {
        config: PathBuf,
        /// Output DOT file.
        #[arg(long)]
        dot: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Analyze { config, cap, out } => {
            let loaded = load(&config, cap)?;
            cmd_analyze(&loaded, out.as_deref())
        }
        Command::Lcm { config, s, t, grid, cap } => {
            let loaded = load(&config, cap)?;
            cmd_lcm(&loaded, &s, &t, grid)
        }
        Command::Zeta { config, beta, cutoff, generators, cap } => {
            let loaded = load(&config, cap)?;
            cmd_zeta(&loaded, &beta, cutoff, generators.as_deref())
        }
        Command::Graph { config, dot, cap } => {
            let loaded = load(&config, cap)?;
            cmd_graph(&loaded, &dot)
        }
    }
}

struct Loaded {
    handle: MonoidHandle,
    config: FileConfig,
    cap: usize,
}

fn load(config_path: &Path, cap_flag: Option<usize>) -> Result<Loaded, String> {
    let (handle, config) = load_family_from_path(config_path).map_err(|e| e.to_string())?;
    let cap = resolve_cap(cap_flag, &config)?;
    Ok(Loaded { handle, config, cap })
}

/// Cap precedence: --cap, then the config's run.class_cap, then the
/// MONOID_SCALES_CAP environment variable, then the built-in default.
fn resolve_cap(flag: Option<usize>, config: &FileConfig) -> Result<usize, String> {
    let validate = |cap: usize, source: &str| {
        if cap == 0 {
            Err(format!("{source} must be positive"))
        } else {
            Ok(cap)
        }
    };
    if let Some(cap) = flag {
        return validate(cap, "--cap");
    }
    if let Some(cap) = config.run.class_cap {
        return validate(cap, "run.class_cap");
    }
    if let Ok(value) = std::env::var(CAP_ENV) {
        let cap: usize = value
            .trim()
            .parse()
            .map_err(|_| format!("{CAP_ENV} must be a positive integer, got `{value}`"))?;
        return validate(cap, CAP_ENV);
    }
    Ok(DEFAULT_CAP)
}

fn analyze_pipeline(loaded: &Loaded) -> Result<(CoreGraph, ScaleReport), String> {
    let graph = build_core_graph(&loaded.handle, loaded.cap).map_err(|e| e.to_string())?;
    let samples = condition_samples(&loaded.handle, &graph).map_err(|e| e.to_string())?;
    let report = check_conditions(&loaded.handle, &graph, &samples).map_err(|e| e.to_string())?;
    Ok((graph, report))
}

fn cmd_analyze(loaded: &Loaded, out: Option<&Path>) -> Result<u8, String> {
    let (graph, report) = analyze_pipeline(loaded)?;

    println!("family kind: {}", loaded.config.kind);
    println!(
        "stored classes: {} (cap {}, exhaustive: {})",
        graph.vertices().len(),
        loaded.cap,
        graph.exhaustive()
    );
    println!("condition (i):   {}", report.cond_i);
    println!("condition (ii):  {}", report.cond_ii);
    println!("condition (iii): {} ({} samples)", report.cond_iii, report.cond_iii_samples);
    println!("condition (iv):  {}", report.cond_iv);

    let code = if report.exists {
        let values: Vec<String> =
            report.scale_on_components.values().map(|v| v.to_string()).collect();
        println!("scale exists: values generated by {{{}}}", values.join(", "));
        0
    } else if let Some((label, reason)) = report.failing_condition() {
        println!("condition ({label}) failed: {reason}");
        EXIT_ABSENT
    } else {
        let reason = [&report.cond_i, &report.cond_ii, &report.cond_iii, &report.cond_iv]
            .iter()
            .find_map(|v| if v.is_inconclusive() { v.reason() } else { None })
            .unwrap_or("verdicts undetermined");
        println!("inconclusive: {reason}");
        EXIT_INCONCLUSIVE
    };

    if let Some(dir) = out {
        write_artifacts(loaded, &graph, &report, dir)?;
    }
    Ok(code)
}

fn write_artifacts(
    loaded: &Loaded,
    graph: &CoreGraph,
    report: &ScaleReport,
    dir: &Path,
) -> Result<(), String> {
    std::fs::create_dir_all(dir)
        .map_err(|e| format!("cannot create output directory `{}`: {e}", dir.display()))?;
    let write = |name: &str, contents: &str| -> Result<(), String> {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| format!("cannot write `{}`: {e}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    };

    let json = serde_json::to_string_pretty(&report.to_json())
        .map_err(|e| format!("cannot serialize report: {e}"))?;
    write("scale.json", &format!("{json}\n"))?;
    write("graph.dot", &render_dot(&loaded.handle, graph))?;

    if let Some(zeta) = &loaded.config.zeta {
        if zeta.betas.is_empty() {
            return Err("zeta.betas must be nonempty when a zeta table is requested".into());
        }
        if !report.exists {
            return Err("zeta.csv requested but no scale exists for this family".into());
        }
        let nx = scale_values(report)?;
        write("zeta.csv", &zeta_csv(&nx, &zeta.betas, zeta.cutoff)?)?;
    }
    Ok(())
}

fn cmd_lcm(loaded: &Loaded, s_spec: &str, t_spec: &str, grid: bool) -> Result<u8, String> {
    let handle = &loaded.handle;
    if !grid {
        let s = handle.parse_element(s_spec).map_err(|e| e.to_string())?;
        let t = handle.parse_element(t_spec).map_err(|e| e.to_string())?;
        match handle.right_lcm(&s, &t).map_err(|e| e.to_string())? {
            LcmOutcome::Orthogonal => println!("Orthogonal"),
            LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } => {
                println!("Meet lcm={}", handle.format_element(&lcm));
                println!("  s-cofactor: {}", handle.format_element(&cofactor_left));
                println!("  t-cofactor: {}", handle.format_element(&cofactor_right));
            }
        }
        return Ok(0);
    }

    let graph = build_core_graph(handle, loaded.cap).map_err(|e| e.to_string())?;
    let parse_word = |spec: &str| -> Result<IrreducibleWord, String> {
        let mut letters = Vec::new();
        for token in split_letters(spec) {
            letters.push(handle.parse_element(&token).map_err(|e| e.to_string())?);
        }
        IrreducibleWord::new(handle, &graph, letters).map_err(|e| e.to_string())
    };
    let s = parse_word(s_spec)?;
    let t = parse_word(t_spec)?;
    let diagram = word_lcm(handle, &graph, &s, &t).map_err(|e| e.to_string())?;
    print!("{}", diagram.render_text(handle));
    Ok(0)
}

/// Splits a word spec into letters at top-level boundaries: whitespace
/// outside parentheses, and the closing of a top-level `(...)` group, so
/// both `(0,2)(0,2)` and `a b^2 c` tokenize.
fn split_letters(spec: &str) -> Vec<String> {
    let mut letters = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut flush = |buf: &mut String| {
        if !buf.trim().is_empty() {
            letters.push(std::mem::take(buf).trim().to_string());
        } else {
            buf.clear();
        }
    };
    for ch in spec.chars() {
        match ch {
            '(' => {
                if depth == 0 {
                    flush(&mut current);
                }
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
                if depth == 0 {
                    flush(&mut current);
                }
            }
            c if c.is_whitespace() && depth == 0 => flush(&mut current),
            c => current.push(c),
        }
    }
    flush(&mut current);
    letters
}

/// The scale's value semigroup: component cardinalities as generators.
fn scale_values(report: &ScaleReport) -> Result<NxSubsemigroup, String> {
    let gens: Vec<u64> = report.scale_on_components.values().copied().collect();
    NxSubsemigroup::new(&gens).map_err(|e| e.to_string())
}

fn cmd_zeta(
    loaded: &Loaded,
    betas: &[f64],
    cutoff: u64,
    generators: Option<&[u64]>,
) -> Result<u8, String> {
    if betas.is_empty() {
        return Err("--beta requires at least one value".into());
    }
    if cutoff < 1 {
        return Err("--cutoff must be at least 1".into());
    }
    let (_, report) = analyze_pipeline(loaded)?;
    if !report.exists {
        if report.is_inconclusive() {
            eprintln!("scale analysis inconclusive at cap {}; raise the cap", loaded.cap);
            return Ok(EXIT_INCONCLUSIVE);
        }
        if let Some((label, reason)) = report.failing_condition() {
            eprintln!("no scale: condition ({label}) failed: {reason}");
        }
        return Ok(EXIT_ABSENT);
    }
    let nx = match generators {
        Some(gens) => NxSubsemigroup::new(gens)
            .map_err(|e| format!("--generators must freely generate: {e}"))?,
        None => scale_values(&report)?,
    };
    print!("{}", zeta_csv(&nx, betas, cutoff)?);
    Ok(0)
}

fn zeta_csv(nx: &NxSubsemigroup, betas: &[f64], cutoff: u64) -> Result<String, String> {
    let mut out = String::from("beta,partial_sum,euler_closed_form,abs_diff\n");
    for &beta in betas {
        let z = zeta_partial(nx, beta, cutoff).map_err(|e| e.to_string())?;
        match (z.euler_closed_form, z.abs_diff()) {
            (Some(euler), Some(diff)) => {
                let _ = writeln!(out, "{beta},{:.12},{euler:.12},{diff:.3e}", z.partial_sum);
            }
            _ => {
                let _ = writeln!(out, "{beta},{:.12},divergent,", z.partial_sum);
            }
        }
    }
    Ok(out)
}

fn cmd_graph(loaded: &Loaded, dot_path: &Path) -> Result<u8, String> {
    let graph = build_core_graph(&loaded.handle, loaded.cap).map_err(|e| e.to_string())?;
    let dot = render_dot(&loaded.handle, &graph);
    std::fs::write(dot_path, dot)
        .map_err(|e| format!("cannot write `{}`: {e}", dot_path.display()))?;
    println!(
        "meet graph: {} vertices, {} edges, {} coconnected components -> {}",
        graph.vertices().len(),
        graph.edges().len(),
        graph.components().len(),
        dot_path.display()
    );
    Ok(0)
}

/// DOT rendering of the meet graph: one cluster per coconnected component,
/// vertices labeled by their class representatives. Node and edge order
/// follow the stored indices, so output is deterministic.
fn render_dot(handle: &MonoidHandle, graph: &CoreGraph) -> String {
    let mut out = String::from("graph meet_graph {\n");
    let _ = writeln!(out, "  node [shape=box];");
    for (c, members) in graph.components().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{c} {{");
        let _ = writeln!(out, "    label=\"component {c}\";");
        for &v in members {
            let label = handle.format_element(&graph.vertices()[v]).replace('"', "\\\"");
            let _ = writeln!(out, "    n{v} [label=\"{label}\"];");
        }
        let _ = writeln!(out, "  }}");
    }
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "  n{a} -- n{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::split_letters;

    #[test]
    fn letter_splitting_handles_parentheses_and_spaces() {
        assert_eq!(split_letters("(0,2)(0,2)"), vec!["(0,2)", "(0,2)"]);
        assert_eq!(split_letters("a b^2 c"), vec!["a", "b^2", "c"]);
        assert_eq!(split_letters(" (1,3) "), vec!["(1,3)"]);
        assert_eq!(split_letters("((3),p q)((0),e)"), vec!["((3),p q)", "((0),e)"]);
        assert!(split_letters("  ").is_empty());
    }
}
