use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sitkernel::{persist, run_script, Session, Status};
use sitkernel_core::syntax::needs_more;
use sitkernel_core::{Config, Kb};

/// Situation-theoretic knowledge base and query interpreter.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Knowledge-base file to load first.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Run the statements in FILE and exit instead of reading a terminal.
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Backward-chaining depth limit.
    #[arg(long)]
    depth: Option<u32>,
    /// Accepted assertions allowed per forward-chaining run.
    #[arg(long)]
    max_firings: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = Config::default();
    if let Some(d) = args.depth {
        config.depth = d;
    }
    if let Some(m) = args.max_firings {
        config.max_firings = m;
    }
    let mut kb = Kb::with_config(config);
    if let Some(path) = &args.kb {
        if let Err(e) = persist::load_kb(&mut kb, path) {
            eprintln!("sitkernel: {e}");
            return ExitCode::from(2);
        }
    }
    let mut session = Session::new(kb);
    match &args.batch {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("sitkernel: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            let (out, ok) = run_script(&mut session, &text);
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        None => repl(&mut session),
    }
}

fn repl(session: &mut Session) -> ExitCode {
    let interactive = io::stdin().is_terminal();
    let mut stdout = io::stdout();
    let mut buffer = String::new();
    let mut lines = io::stdin().lock().lines();
    loop {
        if interactive {
            let prompt = if buffer.is_empty() { session.state.prompt() } else { ".. " };
            print!("{prompt}");
            let _ = stdout.flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        if !buffer.is_empty() {
            buffer.push('\n');
        }
        buffer.push_str(&line);
        if needs_more(&buffer) {
            continue;
        }
        let text = std::mem::take(&mut buffer);
        if text.trim().is_empty() || text.trim_start().starts_with(';') {
            continue;
        }
        let step = session.step(&text);
        print!("{}", step.output);
        if step.status == Status::Quit {
            break;
        }
    }
    ExitCode::SUCCESS
}
