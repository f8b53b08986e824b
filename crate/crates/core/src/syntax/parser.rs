use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::lexer::{lex, Spanned, Tok};
use super::{AtomExpr, ConstraintDef, Directive, InfonExpr, InputMode, Listing, Statement, SyntaxError};
use crate::engine::{ConstraintClass, Direction, Mode};
use crate::ontology::{builtin, Kind, ParamBase, Polarity, RoleKinds, Symbol, Term};

type PResult<T> = Result<T, SyntaxError>;

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |s| s.at)
    }

    fn error(&self, message: &str, expected: &str) -> SyntaxError {
        let found = self.peek().map_or_else(|| "end of input".to_string(), Tok::describe);
        let msg = alloc::format!("{message}, found {found}");
        SyntaxError::at(self.text, self.offset(), msg, (!expected.is_empty()).then(|| expected.to_string()))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error("unexpected token", &t.describe()).with_context(what))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input", "end of statement"))
        }
    }

    fn name(&mut self, what: &str) -> PResult<Symbol> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let s = Symbol::new(n);
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("unexpected token", what)),
        }
    }

    fn type_name(&mut self) -> PResult<Kind> {
        match self.peek() {
            Some(Tok::Type(t)) => {
                let k = Kind::from_name(t);
                self.pos += 1;
                Ok(k)
            }
            _ => Err(self.error("unexpected token", "a kind such as `~IND`")),
        }
    }

    fn arg(&mut self) -> PResult<Term> {
        let t = match self.peek() {
            Some(Tok::Name(n)) if n == "-" => Term::Null,
            Some(Tok::Name(n)) => Term::name(n),
            Some(Tok::Var(v)) => Term::var(v),
            Some(Tok::Type(t)) => Term::Kind(Kind::from_name(t)),
            _ => return Err(self.error("unexpected token", "an argument (name, `?var`, `~KIND` or `-`)")),
        };
        self.pos += 1;
        Ok(t)
    }

    fn infon(&mut self) -> PResult<InfonExpr> {
        self.expect(Tok::LInfon, "infon")?;
        let relation = self.name("a relation name")?;
        let mut args = Vec::new();
        let mut last_at = self.offset();
        loop {
            if self.eat(&Tok::RInfon) {
                break;
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error("unexpected token", "`,` or `>>`"));
            }
            last_at = self.offset();
            args.push(self.arg()?);
        }
        let polarity = match args.pop() {
            Some(Term::Name(p)) if p.as_str() == "1" => Polarity::Pos,
            Some(Term::Name(p)) if p.as_str() == "0" => Polarity::Neg,
            _ => {
                return Err(SyntaxError::at(
                    self.text,
                    last_at,
                    "an infon must end with its polarity".into(),
                    Some("`0` or `1` before `>>`".into()),
                ))
            }
        };
        Ok(InfonExpr::Literal { relation, args, polarity })
    }

    fn infon_item(&mut self) -> PResult<InfonExpr> {
        match self.peek() {
            Some(Tok::LInfon) => self.infon(),
            Some(Tok::Name(n)) => {
                let s = Symbol::new(n);
                self.pos += 1;
                Ok(InfonExpr::Named(s))
            }
            _ => Err(self.error("unexpected token", "an infon `<<...>>` or an infon name")),
        }
    }

    fn infonset(&mut self) -> PResult<Vec<InfonExpr>> {
        if !self.eat(&Tok::LBrace) {
            return Ok(alloc::vec![self.infon_item()?]);
        }
        let mut out = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.push(self.infon_item()?);
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error("unexpected token", "`,` or `}`"));
            }
        }
    }

    fn supp(&mut self) -> PResult<Mode> {
        match self.peek() {
            Some(Tok::Supp(m)) => {
                let m = *m;
                self.pos += 1;
                Ok(m)
            }
            _ => Err(self.error("unexpected token", "`|=` or `|/=`")),
        }
    }

    /// `(NAME|VAR) SUPP infonset`, expanded to one atom per infon.
    fn atom_group(&mut self) -> PResult<(Term, Mode, Vec<InfonExpr>)> {
        let situation = match self.peek() {
            Some(Tok::Name(n)) => Term::name(n),
            Some(Tok::Var(v)) => Term::var(v),
            _ => return Err(self.error("unexpected token", "a situation name or `?var`")),
        };
        self.pos += 1;
        let mode = self.supp()?;
        let before = self.offset();
        let infons = self.infonset()?;
        if infons.is_empty() {
            return Err(SyntaxError::at(self.text, before, "empty infon set".into(), Some("at least one infon".into())));
        }
        Ok((situation, mode, infons))
    }

    fn atoms(&mut self, stop: impl Fn(Option<&Tok>) -> bool) -> PResult<Vec<AtomExpr>> {
        let mut out = Vec::new();
        loop {
            let (situation, mode, infons) = self.atom_group()?;
            out.extend(infons.into_iter().map(|infon| AtomExpr { situation: situation.clone(), mode, infon }));
            if stop(self.peek()) {
                return Ok(out);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error("unexpected token", "`,`, an arrow or end of statement"));
            }
        }
    }

    fn role(&mut self) -> PResult<RoleKinds> {
        if self.eat(&Tok::LBrace) {
            let mut set = BTreeSet::new();
            loop {
                set.insert(self.type_name()?);
                if self.eat(&Tok::RBrace) {
                    return Ok(set);
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.error("unexpected token", "`,` or `}`"));
                }
            }
        }
        Ok(core::iter::once(self.type_name()?).collect())
    }

    fn relation_decl(&mut self) -> PResult<Statement> {
        self.expect(Tok::Lt, "relation declaration")?;
        let name = self.name("a relation name")?;
        self.expect(Tok::Pipe, "relation declaration")?;
        let mut roles = alloc::vec![self.role()?];
        while self.eat(&Tok::Comma) {
            roles.push(self.role()?);
        }
        self.expect(Tok::Gt, "relation declaration")?;
        let mut minimality = None;
        if self.eat(&Tok::LBracket) {
            let at = self.offset();
            let n = self.name("the minimality count")?;
            minimality = Some(n.as_str().parse::<usize>().map_err(|_| {
                SyntaxError::at(self.text, at, alloc::format!("`{n}` is not a count"), Some("a number".into()))
            })?);
            self.expect(Tok::RBracket, "minimality")?;
        }
        self.end()?;
        Ok(Statement::Relation { name, roles, minimality })
    }

    fn type_decl(&mut self) -> PResult<Statement> {
        let name = match self.type_name()? {
            Kind::Type(t) => t,
            Kind::Basic(b) => return Err(SyntaxError::at(self.text, 0, alloc::format!("cannot redefine {b}"), None)),
        };
        self.expect(Tok::Eq, "type abstraction")?;
        self.expect(Tok::LBracket, "type abstraction")?;
        let param = self.name("a parameter")?;
        self.expect(Tok::Pipe, "type abstraction")?;
        let grounding = self.name("a grounding situation")?;
        self.expect(Tok::Supp(Mode::Supports), "type abstraction")?;
        let conditions = self.infonset()?;
        self.expect(Tok::RBracket, "type abstraction")?;
        self.end()?;
        Ok(Statement::TypeDef { name, param, grounding, conditions })
    }

    fn equate(&mut self) -> PResult<Statement> {
        let name = self.name("a name")?;
        self.expect(Tok::Eq, "definition")?;
        let st = match self.peek() {
            Some(Tok::LInfon) => Statement::InfonName { name, infon: self.infon()? },
            Some(Tok::Name(_)) => {
                let target = self.name("a name")?;
                if self.eat(&Tok::Caret) {
                    Statement::Parameter { name, base: ParamBase::Param(target), restrictions: self.infonset()? }
                } else {
                    Statement::Alias { name, target }
                }
            }
            Some(Tok::Type(_)) => {
                let at = self.offset();
                let base = match self.type_name()? {
                    Kind::Basic(b) => b,
                    Kind::Type(t) => {
                        return Err(SyntaxError::at(
                            self.text,
                            at,
                            alloc::format!("`~{t}` is not a basic kind"),
                            Some("a basic kind or a parameter".into()),
                        ))
                    }
                };
                let restrictions = if self.eat(&Tok::Caret) { self.infonset()? } else { Vec::new() };
                Statement::Parameter { name, base: ParamBase::Kind(base), restrictions }
            }
            _ => return Err(self.error("unexpected token", "an infon, a name or a kind")),
        };
        self.end()?;
        Ok(st)
    }

    fn is_clause(t: Option<&Tok>, word: &str) -> bool {
        matches!(t, Some(Tok::Name(n)) if n == word)
    }

    fn constraint(&mut self) -> PResult<Statement> {
        let group = self.name("a constraint group")?;
        self.expect(Tok::Colon, "constraint")?;
        let name = self.name("a constraint name")?;
        self.expect(Tok::Colon, "constraint")?;
        let left = self.atoms(|t| matches!(t, Some(Tok::Arrow(_))))?;
        let direction = match self.bump() {
            Some(Tok::Arrow(d)) => d,
            _ => unreachable!("atoms stops at an arrow"),
        };
        let stop = |t: Option<&Tok>| t.is_none() || Self::is_clause(t, "UNDER-CONDITIONS") || Self::is_clause(t, "CLASS");
        let right = self.atoms(stop)?;
        let (antecedents, consequents) = match direction {
            Direction::Backward => (right, left),
            _ => (left, right),
        };
        let mut conditions = Vec::new();
        if Self::is_clause(self.peek(), "UNDER-CONDITIONS") {
            self.pos += 1;
            self.expect(Tok::Colon, "background conditions")?;
            loop {
                let at = self.offset();
                let sit = self.name("`w`")?;
                if sit.as_str() != builtin::WORLD {
                    return Err(SyntaxError::at(
                        self.text,
                        at,
                        alloc::format!("background conditions may only mention w, not `{sit}`"),
                        Some("`w`".into()),
                    ));
                }
                if !self.eat(&Tok::Colon) {
                    self.expect(Tok::Supp(Mode::Supports), "background condition")?;
                }
                conditions.extend(self.infonset()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let mut class = None;
        if Self::is_clause(self.peek(), "CLASS") {
            self.pos += 1;
            self.expect(Tok::Colon, "constraint class")?;
            let at = self.offset();
            let c = self.name("`necessary`, `nomic` or `conventional`")?;
            class = Some(ConstraintClass::from_name(c.as_str()).ok_or_else(|| {
                SyntaxError::at(self.text, at, alloc::format!("unknown constraint class `{c}`"), Some("`necessary`, `nomic` or `conventional`".into()))
            })?);
        }
        self.end()?;
        Ok(Statement::Constraint(ConstraintDef { group, name, antecedents, direction, consequents, conditions, class }))
    }

    fn statement(&mut self, mode: InputMode) -> PResult<Statement> {
        match (self.peek(), self.peek_at(1), self.peek_at(2), self.peek_at(3)) {
            (None, ..) => Err(self.error("empty statement", "a statement")),
            (Some(Tok::Lt), ..) => self.relation_decl(),
            (Some(Tok::Type(_)), Some(Tok::Eq), ..) => self.type_decl(),
            (Some(Tok::Name(_)), Some(Tok::Colon), Some(Tok::Type(_)), _) => {
                let name = self.name("a name")?;
                self.pos += 1;
                let kind = self.type_name()?;
                self.end()?;
                Ok(Statement::Object { name, kind })
            }
            (Some(Tok::Name(_)), Some(Tok::Colon), Some(Tok::Name(_)), Some(Tok::Colon)) => self.constraint(),
            (Some(Tok::Name(_)), Some(Tok::Eq), ..) => self.equate(),
            (Some(Tok::Name(_) | Tok::Var(_)), Some(Tok::Supp(_)), ..) => {
                let start = self.offset();
                let atoms = self.atoms(|t| t.is_none())?;
                if mode == InputMode::Query {
                    return Ok(Statement::Query(atoms));
                }
                let situation = match &atoms[0].situation {
                    Term::Name(n) => n.clone(),
                    _ => {
                        return Err(SyntaxError::at(
                            self.text,
                            start,
                            "variables are only allowed in queries and constraints".into(),
                            Some("query mode (`Q>` or `:mode query`)".into()),
                        ))
                    }
                };
                let mode = atoms[0].mode;
                if atoms.iter().any(|a| a.situation != atoms[0].situation || a.mode != mode) {
                    return Err(SyntaxError::at(
                        self.text,
                        start,
                        "an assertion is about one situation".into(),
                        Some("query mode (`Q>` or `:mode query`)".into()),
                    ));
                }
                Ok(Statement::Proposition { situation, mode, infons: atoms.into_iter().map(|a| a.infon).collect() })
            }
            (Some(Tok::Name(_)), Some(Tok::Colon), ..) => {
                self.pos += 2;
                Err(self.error("unexpected token", "a kind such as `~IND`, or a constraint name followed by `:`"))
            }
            (Some(Tok::Name(_) | Tok::Var(_)), ..) => {
                self.pos += 1;
                Err(self.error("unexpected token", "`:`, `=`, `|=` or `|/=`"))
            }
            _ => Err(self.error("unexpected token", "a declaration, proposition, constraint or query")),
        }
    }
}

trait WithContext {
    fn with_context(self, what: &str) -> Self;
}

impl WithContext for SyntaxError {
    fn with_context(mut self, what: &str) -> Self {
        self.message = alloc::format!("{} in {what}", self.message);
        self
    }
}

fn on_off(arg: &str, text: &str) -> PResult<bool> {
    match arg {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(directive_error(text, "`on` or `off`")),
    }
}

fn directive_error(text: &str, expected: &str) -> SyntaxError {
    SyntaxError::at(text, 0, "bad directive argument".into(), Some(expected.into()))
}

fn optional_name(arg: &str, text: &str, what: &str) -> PResult<Option<Symbol>> {
    match arg {
        "" => Err(directive_error(text, what)),
        "off" => Ok(None),
        n => Ok(Some(Symbol::new(n))),
    }
}

fn directive(text: &str) -> PResult<Statement> {
    let body = text.trim().trim_start_matches(':');
    let (cmd, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
    let rest = rest.trim();
    // path arguments keep everything; other arguments drop trailing comments
    let arg = rest.split(';').next().unwrap_or("").trim();
    let d = match cmd {
        "mode" => Directive::Mode(match arg {
            "assert" => InputMode::Assert,
            "query" => InputMode::Query,
            _ => return Err(directive_error(text, "`assert` or `query`")),
        }),
        "anchor" => Directive::Anchor(optional_name(arg, text, "a situation or `off`")?),
        "perspective" => Directive::Perspective(optional_name(arg, text, "a group or `off`")?),
        "antecedent-perspective" => Directive::AntecedentPerspective(optional_name(arg, text, "a group or `off`")?),
        "search" => Directive::Search(optional_name(arg, text, "a group or `off`")?),
        "solutions" => Directive::Solutions(match arg {
            "all" => None,
            n => match n.parse::<usize>() {
                Ok(k) if k >= 1 => Some(k),
                _ => return Err(directive_error(text, "a count of at least 1 or `all`")),
            },
        }),
        "trace" => Directive::Trace(on_off(arg, text)?),
        "anchortrace" => Directive::AnchorTrace(on_off(arg, text)?),
        "anchors" => Directive::Anchors(on_off(arg, text)?),
        "chain" if arg.is_empty() => Directive::Chain,
        "load" | "save" | "export-dot" => {
            if rest.is_empty() {
                return Err(directive_error(text, "a file path"));
            }
            let path = String::from(rest);
            match cmd {
                "load" => Directive::Load(path),
                "save" => Directive::Save(path),
                _ => Directive::ExportDot(path),
            }
        }
        "list" => Directive::List(match arg {
            "situations" => Listing::Situations,
            "relations" => Listing::Relations,
            "constraints" => Listing::Constraints,
            "parameters" => Listing::Parameters,
            _ => return Err(directive_error(text, "`situations`, `relations`, `constraints` or `parameters`")),
        }),
        "quit" if arg.is_empty() => Directive::Quit,
        "chain" | "quit" => return Err(directive_error(text, "no argument")),
        _ => return Err(SyntaxError::at(text, 0, alloc::format!("unknown directive `:{cmd}`"), None)),
    };
    Ok(Statement::Directive(d))
}

/// Parses one statement. `I>` and `Q>` prefixes override `mode`.
pub fn parse_statement(text: &str, mode: InputMode) -> Result<Statement, SyntaxError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with(':') {
        return directive(trimmed);
    }
    let lead = text.len() - trimmed.len();
    let (mode, body_at) = match trimmed.get(..2) {
        Some("I>") => (InputMode::Assert, lead + 2),
        Some("Q>") => (InputMode::Query, lead + 2),
        _ => (mode, 0),
    };
    let toks = lex(&text[body_at..]).map_err(|e| if body_at == 0 { e } else { reposition(text, body_at, e) })?;
    let toks = toks.into_iter().map(|s| Spanned { at: s.at + body_at, tok: s.tok }).collect();
    let mut p = Parser { text, toks, pos: 0 };
    p.statement(mode)
}

fn reposition(text: &str, shift: usize, e: SyntaxError) -> SyntaxError {
    // lexing errors are positioned relative to the body; recompute against the full text
    let body = &text[shift..];
    let mut off = 0;
    for (n, line) in body.split_inclusive('\n').enumerate() {
        if n + 1 == e.line {
            off += line.char_indices().nth(e.column - 1).map_or(line.len(), |(i, _)| i);
            break;
        }
        off += line.len();
    }
    SyntaxError::at(text, shift + off, e.message, e.expected)
}
