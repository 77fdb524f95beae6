//! Command-line front end.
//!
//! Exit codes: 0 success (and every property holds), 1 some property fails,
//! 2 usage, parse or validation error, 3 state explosion.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::check::check;
use crate::compose::compose;
use crate::io::{load_net, load_props, load_sync, save_net};
use crate::model::{build_model, deadlock_states, export_dot, ModelError, DEFAULT_MAX_STATES};
use crate::petri::PetriNet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_EXPLOSION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "netcheck",
    version,
    about = "Compose Petri nets, build their state models, and check CTL properties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compose component nets under a synchronization file
    Compose {
        /// Component net files
        #[arg(long = "net", required = true, num_args = 1..)]
        nets: Vec<PathBuf>,
        /// Synchronization file
        #[arg(long)]
        sync: PathBuf,
        /// Output net file
        #[arg(short = 'o')]
        out: PathBuf,
    },
    /// Build the reachable state model and print its size
    Reach {
        net: PathBuf,
        /// Also write the state model as a Graphviz DOT file
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Abort once more than this many states are discovered
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Check every property of a property file at the initial state
    Check {
        net: PathBuf,
        props: PathBuf,
        /// Print witness and counterexample traces
        #[arg(long)]
        witness: bool,
    },
    /// Step through the token game interactively
    Simulate { net: PathBuf },
}

/// Diagnostic destined for stderr, with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ERROR,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Explosion { .. } => EXIT_EXPLOSION,
            _ => EXIT_ERROR,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn read_net(path: &Path) -> Result<PetriNet, Failure> {
    load_net(&read(path)?).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::error(format!("i/o error: {e}"))
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(cli.command, stdin, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: Command, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Compose { nets, sync, out: path } => {
            let nets = nets
                .iter()
                .map(|p| read_net(p))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = load_sync(&read(&sync)?, &nets)
                .map_err(|e| Failure::error(format!("{}: {e}", sync.display())))?;
            let composed = compose(&nets, &spec).map_err(|e| Failure::error(e.to_string()))?;
            fs::write(&path, save_net(&composed.net))
                .map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
            Ok(EXIT_OK)
        }
        Command::Reach {
            net,
            dot,
            max_states,
        } => {
            let net = read_net(&net)?;
            let model = build_model(&net, max_states)?;
            writeln!(
                out,
                "states: {}, edges: {}, deadlocks: {}",
                model.len(),
                model.edges().len(),
                deadlock_states(&model).len()
            )
            .map_err(io_err)?;
            if let Some(path) = dot {
                fs::write(&path, export_dot(&model))
                    .map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            net,
            props,
            witness,
        } => {
            let net = read_net(&net)?;
            let props = load_props(&read(&props)?)
                .map_err(|e| Failure::error(format!("{}: {e}", props.display())))?;
            let model = build_model(&net, DEFAULT_MAX_STATES)?;
            let mut code = EXIT_OK;
            for (name, f) in &props {
                let res = check(&model, f).map_err(|e| Failure::error(format!("{name}: {e}")))?;
                let verdict = if res.holds_at_initial { "HOLDS" } else { "FAILS" };
                writeln!(out, "{name}: {verdict}  {f}").map_err(io_err)?;
                if !res.holds_at_initial {
                    code = EXIT_FAILS;
                }
                if witness {
                    if let Some(t) = &res.trace {
                        for line in t.render(&model).lines() {
                            writeln!(out, "  {line}").map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(code)
        }
        Command::Simulate { net } => {
            let net = read_net(&net)?;
            simulate(&net, stdin, out).map_err(io_err)?;
            Ok(EXIT_OK)
        }
    }
}

fn simulate(net: &PetriNet, input: &mut dyn BufRead, out: &mut dyn Write) -> std::io::Result<()> {
    let mut marking = net.initial().clone();
    loop {
        writeln!(out, "marking: {{{}}}", net.marked_names(&marking).join(", "))?;
        let enabled = net.enabled(&marking).expect("marking belongs to net");
        let names: Vec<&str> = enabled
            .iter()
            .map(|&t| net.transition(t).name.as_str())
            .collect();
        if names.is_empty() {
            writeln!(out, "enabled: none (dead end)")?;
        } else {
            writeln!(out, "enabled: {}", names.join(", "))?;
        }
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let choice = line.trim();
        if choice == "quit" {
            return Ok(());
        }
        match enabled.iter().find(|&&t| net.transition(t).name == choice) {
            Some(&t) => marking = net.fire(&marking, t).expect("transition is enabled"),
            None => writeln!(out, "`{choice}` is not an enabled transition")?,
        }
    }
}
