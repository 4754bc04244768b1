use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use catrace::compile::{self, CompiledArtifact, UltimateOutcome};
use catrace::format;
use catrace::freeze::{self, Border};
use catrace::gadget;
use catrace::trace::{self, Engine};
use catrace::verify::{self, Mode};
use catrace::{CellularAutomaton, DeterministicOrbit, Error, PartialCA, PeriodicConfiguration, Result, SubshiftHandle};

#[derive(Parser)]
#[command(name = "catrace", version, about = "Traces of cellular automata and trace compilers")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depth-k width-w trace of a CA, one block per line.
    Trace(TraceArgs),
    /// Search for a configuration whose cell-0 column starts with a word.
    Contains(ContainsArgs),
    /// Space-time diagram of a periodic configuration.
    Diagram(DiagramArgs),
    /// Compile a subshift into an automaton tracing it.
    Compile(CompileArgs),
    /// Compare the trace of a CA with a target subshift.
    Verify(VerifyArgs),
    /// Check that a word list is p-freezing.
    FreezeCheck(FreezeArgs),
    /// Spreading-controlled products.
    #[command(subcommand)]
    Gadget(GadgetCommand),
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    ca: PathBuf,
    /// Subshift file restricting the initial configurations.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    width: usize,
    /// naive, transducer, both or auto.
    #[arg(long, default_value = "auto")]
    engine: String,
    /// Union of the track projections (stacked alphabets).
    #[arg(long)]
    poly: bool,
}

#[derive(Args)]
struct ContainsArgs {
    #[arg(long)]
    ca: PathBuf,
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    column: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImageFormat {
    Txt,
    Pgm,
}

#[derive(Args)]
struct DiagramArgs {
    #[arg(long)]
    ca: PathBuf,
    /// Period of the initial configuration, placed at cell 0.
    #[arg(long)]
    init: String,
    #[arg(long)]
    steps: usize,
    /// Cells shown, as `a..b`.
    #[arg(long, default_value = "0..40")]
    viewport: String,
    #[arg(long, value_enum, default_value_t = ImageFormat::Txt)]
    format: ImageFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    SftPolytrace,
    Partial,
    Full,
    Ultimate,
    Border,
    Nilpotent,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(value_enum)]
    construction: Construction,
    /// Subshift file.
    #[arg(long = "in")]
    input: PathBuf,
    /// CA file to write; the provenance goes to `<out>.prov` and the domain
    /// of a partial result to `<out>.domain`.
    #[arg(long)]
    out: PathBuf,
    /// Letter map `ξ(a),ξ(b),…` (`_` outside the domain).
    #[arg(long)]
    xi: Option<String>,
    /// Border file for `border`.
    #[arg(long)]
    border: Option<PathBuf>,
    /// Build a dynamic border from this word instead.
    #[arg(long)]
    dynamic: Option<String>,
    /// Build the static border `1 0^k` instead.
    #[arg(long = "static")]
    static_border: bool,
    /// Write the border used to this file.
    #[arg(long)]
    border_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    ca: PathBuf,
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    depth: usize,
    /// exact, ultimate:J or inclusion.
    #[arg(long, default_value = "exact")]
    mode: String,
}

#[derive(Args)]
struct FreezeArgs {
    #[arg(long)]
    words: PathBuf,
    #[arg(long)]
    p: usize,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// H on (A1 ⊔ A2) × B from F1, F2, N and N2.
    Product {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long)]
        n: PathBuf,
        #[arg(long)]
        n2: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// The four-layer gadget over a onesided CA G on {0,1}.
    FourLayer {
        #[arg(long)]
        g: PathBuf,
        /// Letter map for N (const-0 when absent).
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        n2: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn load_ca(path: &Path) -> Result<CellularAutomaton> {
    format::parse_ca(&read(path)?).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn load_subshift(path: &Path) -> Result<SubshiftHandle> {
    format::parse_subshift(&read(path)?).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Trace(a) => run_trace(a, cli.json),
        Command::Contains(a) => run_contains(a, cli.json),
        Command::Diagram(a) => run_diagram(a),
        Command::Compile(a) => run_compile(a, cli.json),
        Command::Verify(a) => run_verify(a, cli.json),
        Command::FreezeCheck(a) => run_freeze(a, cli.json),
        Command::Gadget(g) => run_gadget(g, cli.json),
    }
}

fn run_trace(a: &TraceArgs, as_json: bool) -> Result<u8> {
    let ca = load_ca(&a.ca)?;
    let t = match &a.domain {
        Some(d) => {
            let p = PartialCA::new(ca, load_subshift(d)?)?;
            trace_with(&p, a)?
        }
        None => trace_with(&ca, a)?,
    };
    let lines = t.format_lines();
    if as_json {
        println!("{}", json!({ "depth": t.height(), "width": t.width(), "count": lines.len(), "blocks": lines }));
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(0)
}

fn run_contains(a: &ContainsArgs, as_json: bool) -> Result<u8> {
    let ca = load_ca(&a.ca)?;
    let column = ca.alphabet().parse_word(&a.column)?;
    let found = match &a.domain {
        Some(d) => trace::find_column(&PartialCA::new(ca.clone(), load_subshift(d)?)?, &column, trace::search::DEFAULT_NODE_CAP)?,
        None => trace::find_column(&ca, &column, trace::search::DEFAULT_NODE_CAP)?,
    };
    let window = found.as_ref().map(|(lo, w)| (lo, ca.alphabet().format_word(w)));
    if as_json {
        println!(
            "{}",
            json!({ "column": a.column, "member": found.is_some(), "lo": window.as_ref().map(|w| w.0), "window": window.as_ref().map(|w| &w.1) })
        );
    } else {
        match &window {
            Some((lo, w)) => println!("IN lo={lo} window={w}"),
            None => println!("NOT IN"),
        }
    }
    Ok(if found.is_some() { 0 } else { 1 })
}

fn trace_with<T: trace::Traceable>(f: &T, a: &TraceArgs) -> Result<trace::ColumnLanguage> {
    if a.poly {
        if a.width != 1 {
            return Err(Error::Usage("--poly takes width 1".into()));
        }
        return trace::polytrace(f, a.depth);
    }
    match a.engine.as_str() {
        "auto" => trace::trace_auto(f, a.depth, a.width),
        e => trace::trace(f, a.depth, a.width, e.parse::<Engine>()?),
    }
}

fn run_diagram(a: &DiagramArgs) -> Result<u8> {
    let ca = load_ca(&a.ca)?;
    let period = ca.alphabet().parse_word(&a.init)?;
    let x = PeriodicConfiguration::new(period, 0)?;
    let (lo, hi) = a
        .viewport
        .split_once("..")
        .and_then(|(l, h)| Some((l.trim().parse::<i64>().ok()?, h.trim().parse::<i64>().ok()?)))
        .ok_or_else(|| Error::Usage(format!("viewport must read a..b, got {:?}", a.viewport)))?;
    let d = trace::diagram(&ca, &x, a.steps, lo, hi)?;
    match a.format {
        ImageFormat::Txt => print!("{}", d.to_text(&ca)),
        ImageFormat::Pgm => print!("{}", d.to_pgm(ca.alphabet().len())),
    }
    Ok(0)
}

fn xi_map(sigma: &SubshiftHandle, xi: &Option<String>) -> Result<Option<DeterministicOrbit>> {
    xi.as_deref().map(|s| DeterministicOrbit::parse(sigma.alphabet().clone(), s)).transpose()
}

fn sft_of(sigma: &SubshiftHandle) -> Result<&catrace::Sft> {
    match sigma {
        SubshiftHandle::Sft(s) => Ok(s),
        _ => Err(Error::Precondition("this construction needs an SFT (type: sft)".into())),
    }
}

fn border_for(a: &CompileArgs, sigma: &SubshiftHandle, k: usize) -> Result<Border> {
    let alphabet = sigma.alphabet().clone();
    let sources = [a.border.is_some(), a.dynamic.is_some(), a.static_border, a.xi.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(Error::Usage("give exactly one of --border, --dynamic, --static, --xi".into()));
    }
    if let Some(p) = &a.border {
        return format::parse_border(&read(p)?);
    }
    if let Some(u) = &a.dynamic {
        return freeze::dynamic_border(alphabet.clone(), &alphabet.parse_word(u)?, k);
    }
    if a.static_border {
        if alphabet.len() < 2 {
            return Err(Error::Usage("a static border needs two letters".into()));
        }
        return freeze::static_border(alphabet, 0, 1, k);
    }
    let xi = xi_map(sigma, &a.xi)?
        .and_then(|o| o.total_map())
        .ok_or_else(|| Error::Usage("--xi must be total for a border".into()))?;
    freeze::xi_border(alphabet, &xi, k, 3)
}

fn run_compile(a: &CompileArgs, as_json: bool) -> Result<u8> {
    let sigma = load_subshift(&a.input)?;
    let polytracer = || -> Result<Option<(CellularAutomaton, compile::BlockRecipe)>> {
        match &sigma {
            SubshiftHandle::Sft(s) => Ok(Some((compile::sft_polytracer(s)?, compile::sft_polytracer_recipe(s)))),
            _ => Ok(None),
        }
    };
    let art: CompiledArtifact = match a.construction {
        Construction::SftPolytrace => {
            let s = sft_of(&sigma)?;
            let g = compile::sft_polytracer(s)?;
            CompiledArtifact {
                result: compile::Compiled::Total(g),
                provenance: compile::Provenance::new("sft-polytrace").note("k", s.order()),
                witness: None,
                offset: 0,
            }
        }
        Construction::Partial => {
            let p = polytracer()?;
            compile::partial_trace_compile(&sigma, p.as_ref().map(|(g, r)| (g, r.clone())))?
        }
        Construction::Nilpotent => compile::nilpotent_partial_ca(&sigma)?,
        Construction::Full => {
            let g = compile::sft_polytracer(sft_of(&sigma)?)?;
            let xi = match xi_map(&sigma, &a.xi)? {
                Some(o) => o,
                None => sigma
                    .contains_deterministic(false)
                    .ok_or_else(|| Error::Precondition("no total deterministic subshift inside".into()))?,
            };
            let xi = xi.total_map().ok_or_else(|| Error::Usage("--xi must be total for full".into()))?;
            compile::polytrace_to_trace(&compile::totalize(&g)?, &xi, None)?
        }
        Construction::Ultimate => {
            let xi = match xi_map(&sigma, &a.xi)? {
                Some(o) => o,
                None => sigma
                    .contains_deterministic(true)
                    .ok_or_else(|| Error::Precondition("no deterministic subshift inside".into()))?,
            };
            let p = polytracer()?;
            match compile::ultimate_trace_compile(&sigma, p.as_ref().map(|(g, r)| (g, r.clone())), &xi)? {
                UltimateOutcome::Compiled(art) => art,
                UltimateOutcome::Unsupported { branch, reason } => {
                    if as_json {
                        println!("{}", json!({ "outcome": "unsupported", "branch": branch, "reason": reason }));
                    } else {
                        println!("UNSUPPORTED branch={branch}: {reason}");
                    }
                    return Ok(2);
                }
            }
        }
        Construction::Border => {
            let s = sft_of(&sigma)?;
            let g = compile::sft_polytracer(s)?;
            let b = border_for(a, &sigma, s.order())?;
            if let Some(p) = &a.border_out {
                write(p, &format::emit_border(&b))?;
            }
            let l = b.word_length();
            CompiledArtifact {
                result: compile::Compiled::Partial(compile::border_compose(&g, &b)?),
                provenance: compile::Provenance::new("border").note("k", s.order()).note("l", l).note("h", s.order() + l),
                witness: None,
                offset: 0,
            }
        }
    };
    write(&a.out, &format::emit_ca(art.automaton()))?;
    let witness = art.witness.as_ref().map(|w| w.description.as_str());
    write(&with_suffix(&a.out, ".prov"), &format::emit_provenance(&art.provenance, art.offset, witness))?;
    let domain = art.result.domain().map(|_| with_suffix(&a.out, ".domain"));
    if let (Some(d), Some(path)) = (art.result.domain(), &domain) {
        write(path, &format::emit_subshift(d))?;
    }
    let ca = art.automaton();
    if as_json {
        println!(
            "{}",
            json!({
                "construction": art.provenance.construction,
                "branch": art.provenance.branch,
                "offset": art.offset,
                "anchor": ca.anchor(),
                "diameter": ca.diameter(),
                "letters": ca.alphabet().len(),
                "out": a.out.display().to_string(),
                "domain": domain.map(|d| d.display().to_string()),
            })
        );
    } else {
        println!(
            "{} anchor={} diameter={} letters={} offset={} -> {}",
            art.provenance.construction,
            ca.anchor(),
            ca.diameter(),
            ca.alphabet().len(),
            art.offset,
            a.out.display()
        );
    }
    Ok(0)
}

fn run_verify(a: &VerifyArgs, as_json: bool) -> Result<u8> {
    let ca = load_ca(&a.ca)?;
    let target = load_subshift(&a.target)?;
    let mode: Mode = a.mode.parse()?;
    let report = match &a.domain {
        Some(d) => verify::check_trace(&PartialCA::new(ca, load_subshift(d)?)?, &target, a.depth, mode),
        None => verify::check_trace(&ca, &target, a.depth, mode),
    };
    if as_json {
        println!("{}", serde_json::to_string(&report).expect("serializable report"));
    } else {
        println!("{report}");
    }
    Ok(report.outcome.exit_code() as u8)
}

fn run_freeze(a: &FreezeArgs, as_json: bool) -> Result<u8> {
    let (alphabet, words) = format::parse_words(&read(&a.words)?)?;
    let c = freeze::freezing_counterexample(&words, a.p)?;
    let c = c.map(|w| alphabet.format_word(&w));
    if as_json {
        println!("{}", json!({ "p": a.p, "freezing": c.is_none(), "counterexample": c }));
    } else {
        match &c {
            None => println!("PASS {}-freezing", a.p),
            Some(w) => println!("FAIL counterexample={w}"),
        }
    }
    Ok(if c.is_none() { 0 } else { 1 })
}

fn run_gadget(g: &GadgetCommand, as_json: bool) -> Result<u8> {
    let (h, out) = match g {
        GadgetCommand::Product { f1, f2, n, n2, out } => {
            let spec =
                gadget::ControlledProductSpec::from_parts(&load_ca(f1)?, &load_ca(f2)?, &load_ca(n)?, &load_ca(n2)?, None)?;
            (gadget::controlled_product(&spec)?, out)
        }
        GadgetCommand::FourLayer { g, xi, n2, out } => {
            let g = load_ca(g)?;
            let xi = xi.as_deref().map(|s| DeterministicOrbit::parse(g.alphabet().clone(), s)).transpose()?;
            let xi = match xi {
                Some(o) => Some(o.total_map().ok_or_else(|| Error::Usage("--xi must be total".into()))?),
                None => None,
            };
            (gadget::four_layer_gadget(&g, xi.as_deref(), &load_ca(n2)?)?.0, out)
        }
    };
    write(out, &format::emit_ca(&h))?;
    if as_json {
        println!(
            "{}",
            json!({ "letters": h.alphabet().len(), "anchor": h.anchor(), "diameter": h.diameter(), "out": out.display().to_string() })
        );
    } else {
        println!("letters={} anchor={} diameter={} -> {}", h.alphabet().len(), h.anchor(), h.diameter(), out.display());
    }
    Ok(0)
}
