//! The interactive loop: statements in, text out.

use std::fmt::Write as _;
use std::path::Path;

use sitkernel_core::query::render_solution;
use sitkernel_core::syntax::{parse_statement, Directive, InputMode, Listing, Statement};
use sitkernel_core::{Firing, FiringOutcome, Kb, Query, QueryOptions, Symbol};

use crate::{graph, persist};

/// Per-session defaults. Directives change these and nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    pub mode: InputMode,
    pub anchor: Option<Symbol>,
    pub perspective: Option<Symbol>,
    pub antecedent: Option<Symbol>,
    pub search: Option<Symbol>,
    /// `None` is unbounded.
    pub solutions: Option<usize>,
    /// Print every rule firing, not only refusals.
    pub trace: bool,
    pub anchor_trace: bool,
    pub show_anchors: bool,
}

impl Default for SessionState {
    fn default() -> Self {
        SessionState {
            mode: InputMode::Assert,
            anchor: None,
            perspective: None,
            antecedent: None,
            search: None,
            solutions: None,
            trace: false,
            anchor_trace: false,
            show_anchors: true,
        }
    }
}

impl SessionState {
    pub fn prompt(&self) -> &'static str {
        match self.mode {
            InputMode::Assert => "I> ",
            InputMode::Query => "Q> ",
        }
    }

    pub fn query_options(&self) -> QueryOptions {
        QueryOptions {
            perspective: self.perspective.clone(),
            antecedent: self.antecedent.clone(),
            search: self.search.clone(),
            anchoring: self.anchor.clone(),
            max_solutions: self.solutions,
            show_anchors: self.show_anchors,
            show_trace: self.anchor_trace,
            depth: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The input was refused; the session carries on.
    Failed,
    Quit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub output: String,
    pub status: Status,
}

impl Step {
    fn ok(output: String) -> Step {
        Step { output, status: Status::Ok }
    }

    fn failed(msg: impl std::fmt::Display) -> Step {
        Step { output: format!("error: {msg}\n"), status: Status::Failed }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Session {
    pub kb: Kb,
    pub state: SessionState,
}

impl Session {
    pub fn new(kb: Kb) -> Session {
        Session { kb, state: SessionState::default() }
    }

    /// Runs one complete statement.
    pub fn step(&mut self, text: &str) -> Step {
        let st = match parse_statement(text, self.state.mode) {
            Ok(st) => st,
            Err(e) => return Step::failed(e),
        };
        match st {
            Statement::Directive(d) => self.directive(d),
            Statement::Query(atoms) => {
                let q = match self.kb.resolve_atoms(&atoms) {
                    Ok(a) => Query::new(a),
                    Err(e) => return Step::failed(e),
                };
                let opts = self.state.query_options();
                match self.kb.evaluate(&q, &opts) {
                    Ok(sols) if sols.is_empty() => Step::ok("No solutions.\n".into()),
                    Ok(sols) => {
                        let parts: Vec<String> = sols.iter().enumerate().map(|(i, s)| render_solution(i + 1, s, &opts)).collect();
                        Step::ok(parts.join("\n"))
                    }
                    Err(e) => Step::failed(e),
                }
            }
            st => {
                self.kb.config.antecedent_perspective = self.state.antecedent.clone();
                let anchor = if matches!(st, Statement::Proposition { .. }) { self.state.anchor.clone() } else { None };
                let result = self.kb.apply(&st, anchor.as_deref());
                let firings = self.kb.take_firings();
                let mut out = self.firings(&firings);
                match result {
                    Ok(_) => Step::ok(out),
                    Err(e) => {
                        let _ = writeln!(out, "error: {e}");
                        Step { output: out, status: Status::Failed }
                    }
                }
            }
        }
    }

    fn firings(&self, firings: &[Firing]) -> String {
        let mut out = String::new();
        for f in firings {
            if self.state.trace || matches!(f.outcome, FiringOutcome::Refused(_)) {
                let _ = writeln!(out, "{f}");
            }
        }
        out
    }

    fn directive(&mut self, d: Directive) -> Step {
        let s = &mut self.state;
        match d {
            Directive::Mode(m) => s.mode = m,
            Directive::Anchor(a) => match a {
                Some(a) if !self.kb.store().contains(&a) => return Step::failed(format!("unknown situation `{a}`")),
                a => s.anchor = a,
            },
            Directive::Perspective(g) => s.perspective = g,
            Directive::AntecedentPerspective(g) => s.antecedent = g,
            Directive::Search(g) => s.search = g,
            Directive::Solutions(n) => s.solutions = n,
            Directive::Trace(on) => s.trace = on,
            Directive::AnchorTrace(on) => s.anchor_trace = on,
            Directive::Anchors(on) => s.show_anchors = on,
            Directive::Quit => return Step { output: String::new(), status: Status::Quit },
            Directive::Chain => {
                self.kb.config.antecedent_perspective = self.state.antecedent.clone();
                let result = self.kb.forward_chain();
                let firings = self.kb.take_firings();
                let mut out = self.firings(&firings);
                let added = firings.iter().filter(|f| f.outcome == FiringOutcome::Accepted).count();
                return match result {
                    Ok(_) => {
                        let _ = writeln!(out, "{added} new fact{}", if added == 1 { "" } else { "s" });
                        Step::ok(out)
                    }
                    Err(e) => {
                        let _ = writeln!(out, "error: {e}");
                        Step { output: out, status: Status::Failed }
                    }
                };
            }
            Directive::Load(p) => {
                return match persist::load_kb(&mut self.kb, Path::new(&p)) {
                    Ok(()) => Step::ok(format!("loaded {p}\n")),
                    Err(e) => Step::failed(e),
                }
            }
            Directive::Save(p) => {
                return match persist::save_kb(&self.kb, Path::new(&p)) {
                    Ok(()) => Step::ok(format!("saved {p}\n")),
                    Err(e) => Step::failed(e),
                }
            }
            Directive::ExportDot(p) => {
                return match graph::export_graph(self.kb.store(), Path::new(&p)) {
                    Ok(()) => Step::ok(format!("wrote {p}\n")),
                    Err(e) => Step::failed(e),
                }
            }
            Directive::List(l) => return Step::ok(self.listing(l)),
        }
        Step::ok(String::new())
    }

    fn listing(&self, l: Listing) -> String {
        use sitkernel_core::ontology::{Declared, Entity};
        let mut out = String::new();
        let reg = self.kb.registry();
        match l {
            Listing::Situations => {
                let store = self.kb.store();
                for s in store.situations() {
                    let sit = store.situation(s).expect("listed");
                    let _ = write!(out, "{s}");
                    if !sit.parents().is_empty() {
                        let ps: Vec<&str> = sit.parents().iter().map(Symbol::as_str).collect();
                        let _ = write!(out, " (part of {})", ps.join(", "));
                    }
                    let facts = sit.own().iter().filter(|i| !self.kb.is_bookkeeping(i)).count();
                    let _ = writeln!(out, ": {facts} fact{}", if facts == 1 { "" } else { "s" });
                }
            }
            Listing::Relations | Listing::Parameters => {
                for d in reg.declarations() {
                    let Declared::Name(n) = d else { continue };
                    let wanted = match reg.entity(n) {
                        Some(Entity::Relation(_)) => l == Listing::Relations,
                        Some(Entity::Parameter(_)) => l == Listing::Parameters,
                        _ => false,
                    };
                    if let Some(st) = wanted.then(|| persist::declaration(&self.kb, d)).flatten() {
                        let _ = writeln!(out, "{st}");
                    }
                }
            }
            Listing::Constraints => {
                for c in self.kb.constraints() {
                    let _ = writeln!(out, "{}", persist::constraint_def(c));
                }
            }
        }
        out
    }
}

/// Runs a script, one statement at a time, and collects the output. Stops
/// early at `:quit`. Returns whether every statement succeeded.
pub fn run_script(session: &mut Session, text: &str) -> (String, bool) {
    let mut out = String::new();
    let mut ok = true;
    for (line, chunk) in sitkernel_core::syntax::split_statements(text) {
        let step = session.step(&chunk);
        if step.status == Status::Failed {
            ok = false;
            let _ = write!(out, "line {}: ", line + 1);
        }
        out.push_str(&step.output);
        if step.status == Status::Quit {
            break;
        }
    }
    (out, ok)
}
