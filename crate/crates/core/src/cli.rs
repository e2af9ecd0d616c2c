//! Command-line front end.

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::catalog::{builtin_diagram, random_instance};
use crate::coloring::{coloring_from_block, element_token, enumerate_colorings, enumerate_tricolorings, GColoring};
use crate::diagram::{parse_kld, serialize_kld, serialize_kld_colored, LinkDiagram};
use crate::error::{Error, Result};
use crate::group::{builtin_sigma3, group_from_token, FiniteGroup, StabilizerSet};
use crate::moves::{parse_log, replay, serialize_log};
use crate::oracle::{prove_equivalent, Search, DEFAULT_MAX_STATES};
use crate::reduce::{classify, serialize_trace};

#[derive(Parser, Debug)]
#[command(
    name = "linkforge",
    version,
    about = "Colored link diagrams and the tricolored trefoil invariant"
)]
pub struct Cli {
    /// Output style; key=value lines are the same in both.
    #[arg(long, value_enum, default_value_t = Mode::Human, global = true)]
    pub mode: Mode,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a KLD file and its coloring block.
    Validate { path: String },
    /// Count (and list) the colorings of a diagram.
    Colorings {
        path: String,
        #[arg(long, default_value = "sigma3")]
        group: String,
        /// `inversions` (the default stabilizer set of the group) or `all`.
        #[arg(long, default_value = "inversions")]
        stabilizers: String,
    },
    /// Apply a move log and print the resulting KLD.
    ApplyMove { path: String, log: String },
    /// Classify a tricolored diagram.
    Classify {
        path: String,
        #[arg(long)]
        trace: Option<String>,
    },
    /// Search for a move path between two colored diagrams.
    Oracle {
        a: String,
        b: String,
        #[arg(long)]
        max_crossings: Option<usize>,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Print a seeded random tricolored diagram.
    Random {
        #[arg(long)]
        crossings: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceBound(_) => 2,
        _ => 1,
    }
}

fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidParameter(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{path}: {e}")))
}

struct Input {
    d: LinkDiagram,
    colored: Option<(FiniteGroup, StabilizerSet, GColoring)>,
}

fn load(path: &str) -> Result<Input> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return Ok(Input {
            d: builtin_diagram(name)?,
            colored: None,
        });
    }
    let (d, block) = parse_kld(&read_text(path)?)?;
    let colored = coloring_from_block(&d, &block)?;
    Ok(Input { d, colored })
}

/// The file's tricoloring, or else the first nonconstant one.
fn tricolored(input: &Input) -> Result<GColoring> {
    match &input.colored {
        Some((g, _, psi)) if g.order() == 6 => Ok(psi.clone()),
        Some(_) => Err(Error::Coloring("classification needs a sigma3 coloring".into())),
        None => {
            let all = enumerate_tricolorings(&input.d);
            Ok(all.iter().find(|c| !c.is_constant()).unwrap_or(&all[0]).clone())
        }
    }
}

fn colored_kld(d: &LinkDiagram, g: &FiniteGroup, token: &str, psi: &GColoring) -> String {
    let toks: Vec<String> = psi.values.iter().map(|&v| element_token(g, v)).collect();
    serialize_kld_colored(d, token, &toks)
}

/// Runs one subcommand, writing to `out`; returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let human = cli.mode == Mode::Human;
    let mut w = |s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cli.command {
        Command::Validate { path } => {
            let input = load(&path)?;
            input.d.validate()?;
            w(format!(
                "valid=true crossings={} components={} colored={}",
                input.d.num_crossings(),
                input.d.num_components(),
                input.colored.is_some()
            ));
        }
        Command::Colorings {
            path,
            group,
            stabilizers,
        } => {
            let input = load(&path)?;
            let (g, s) = group_from_token(&group)?;
            let s = match stabilizers.as_str() {
                "inversions" => s,
                "all" => StabilizerSet::full(&g),
                t => return Err(Error::InvalidParameter(format!("unknown stabilizer token `{t}`"))),
            };
            let all = enumerate_colorings(&input.d, &g, &s)?;
            w(format!("count={}", all.len()));
            if !human {
                for c in &all {
                    let toks: Vec<String> = c.values.iter().map(|&v| element_token(&g, v)).collect();
                    w(format!("coloring={}", toks.join(",")));
                }
            }
        }
        Command::ApplyMove { path, log } => {
            let input = load(&path)?;
            let moves = parse_log(&read_text(&log)?)?;
            let (g, psi) = match &input.colored {
                Some((g, _, psi)) => (g.clone(), psi.clone()),
                None => {
                    let (g, _) = builtin_sigma3();
                    let psi = GColoring::constant(&input.d, g.element("s12").unwrap());
                    (g, psi)
                }
            };
            let (d, psi) = replay(&input.d, &g, &psi, &moves)?;
            let text = if input.colored.is_some() {
                let token = if g.order() == 6 {
                    "sigma3".to_string()
                } else {
                    format!("dihedral:{}", g.order() / 2)
                };
                colored_kld(&d, &g, &token, &psi)
            } else {
                serialize_kld(&d)
            };
            let _ = write!(out, "{text}");
        }
        Command::Classify { path, trace } => {
            let input = load(&path)?;
            let psi = tricolored(&input)?;
            let r = classify(&input.d, &psi)?;
            if let Some(t) = trace {
                std::fs::write(&t, serialize_trace(&r.trace))
                    .map_err(|e| Error::InvalidParameter(format!("{t}: {e}")))?;
            }
            w(format!("class={} i={}", r.class, r.i));
            if human {
                w(format!(
                    "# {} trefoils split, {} trace lines",
                    r.ledger.events.len(),
                    r.trace.len()
                ));
            }
        }
        Command::Oracle {
            a,
            b,
            max_crossings,
            max_states,
        } => {
            let (ia, ib) = (load(&a)?, load(&b)?);
            let (g, _) = builtin_sigma3();
            let (pa, pb) = (tricolored(&ia)?, tricolored(&ib)?);
            let bound = max_crossings.unwrap_or(ia.d.num_crossings().max(ib.d.num_crossings()) + 2);
            let states = match max_states {
                Some(m) => m,
                None => match std::env::var("LINKFORGE_MAX_STATES") {
                    Ok(v) => v
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("LINKFORGE_MAX_STATES=`{v}`")))?,
                    Err(_) => DEFAULT_MAX_STATES,
                },
            };
            match prove_equivalent(&g, (&ia.d, &pa), (&ib.d, &pb), bound, states)? {
                Search::Found(path) => {
                    w(format!("found=true moves={}", path.len()));
                    let _ = write!(out, "{}", serialize_log(&path));
                }
                Search::NotFound => {
                    w("found=false".into());
                    return Ok(3);
                }
            }
        }
        Command::Random { crossings, seed } => {
            let (d, psi) = random_instance(crossings, seed)?;
            let (g, _) = builtin_sigma3();
            let _ = write!(out, "{}", colored_kld(&d, &g, "sigma3", &psi));
        }
    }
    Ok(0)
}
