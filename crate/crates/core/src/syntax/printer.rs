use core::fmt::{self, Display, Formatter};

use super::{AtomExpr, ConstraintDef, Directive, InfonExpr, InputMode, Listing, Statement};
use crate::engine::Direction;
use crate::ontology::{Kind, ParamBase, RoleKinds};

impl Display for InfonExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            InfonExpr::Named(n) => n.fmt(f),
            InfonExpr::Literal { relation, args, polarity } => {
                write!(f, "<<{relation}")?;
                for a in args {
                    write!(f, ", {a}")?;
                }
                write!(f, ", {polarity}>>")
            }
        }
    }
}

impl Display for AtomExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.situation, self.mode, self.infon)
    }
}

/// Writes an infon set: a lone infon bare, anything else in braces.
pub(crate) struct InfonSet<'a, T>(pub &'a [T]);

impl<T: Display> Display for InfonSet<'_, T> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return self.0[0].fmt(f);
        }
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            x.fmt(f)?;
        }
        f.write_str("}")
    }
}

fn atoms(f: &mut Formatter<'_>, atoms: &[AtomExpr]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        a.fmt(f)?;
    }
    Ok(())
}

fn role(f: &mut Formatter<'_>, r: &RoleKinds) -> fmt::Result {
    if r.len() == 1 {
        return r.iter().next().expect("one").fmt(f);
    }
    f.write_str("{")?;
    for (i, k) in r.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        k.fmt(f)?;
    }
    f.write_str("}")
}

impl Display for ConstraintDef {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: ", self.group, self.name)?;
        let (left, right) = match self.direction {
            Direction::Backward => (&self.consequents, &self.antecedents),
            _ => (&self.antecedents, &self.consequents),
        };
        atoms(f, left)?;
        write!(f, " {} ", self.direction)?;
        atoms(f, right)?;
        if !self.conditions.is_empty() {
            write!(f, " UNDER-CONDITIONS: w |= {}", InfonSet(&self.conditions))?;
        }
        if let Some(c) = self.class {
            write!(f, " CLASS: {c}")?;
        }
        Ok(())
    }
}

impl Display for Directive {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let opt = |o: &Option<crate::ontology::Symbol>| o.as_ref().map_or_else(|| alloc::string::String::from("off"), |s| alloc::format!("{s}"));
        let on = |b: bool| if b { "on" } else { "off" };
        match self {
            Directive::Mode(InputMode::Assert) => f.write_str(":mode assert"),
            Directive::Mode(InputMode::Query) => f.write_str(":mode query"),
            Directive::Anchor(s) => write!(f, ":anchor {}", opt(s)),
            Directive::Perspective(s) => write!(f, ":perspective {}", opt(s)),
            Directive::AntecedentPerspective(s) => write!(f, ":antecedent-perspective {}", opt(s)),
            Directive::Search(s) => write!(f, ":search {}", opt(s)),
            Directive::Solutions(None) => f.write_str(":solutions all"),
            Directive::Solutions(Some(n)) => write!(f, ":solutions {n}"),
            Directive::Trace(b) => write!(f, ":trace {}", on(*b)),
            Directive::AnchorTrace(b) => write!(f, ":anchortrace {}", on(*b)),
            Directive::Anchors(b) => write!(f, ":anchors {}", on(*b)),
            Directive::Chain => f.write_str(":chain"),
            Directive::Load(p) => write!(f, ":load {p}"),
            Directive::Save(p) => write!(f, ":save {p}"),
            Directive::ExportDot(p) => write!(f, ":export-dot {p}"),
            Directive::List(l) => f.write_str(match l {
                Listing::Situations => ":list situations",
                Listing::Relations => ":list relations",
                Listing::Constraints => ":list constraints",
                Listing::Parameters => ":list parameters",
            }),
            Directive::Quit => f.write_str(":quit"),
        }
    }
}

/// Canonical text. Queries carry a `Q>` prefix so they read back as queries
/// in either input mode.
impl Display for Statement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Object { name, kind } => write!(f, "{name}: {kind}"),
            Statement::Relation { name, roles, minimality } => {
                write!(f, "<{name} | ")?;
                for (i, r) in roles.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    role(f, r)?;
                }
                f.write_str(">")?;
                if let Some(m) = minimality {
                    write!(f, " [{m}]")?;
                }
                Ok(())
            }
            Statement::Parameter { name, base, restrictions } => {
                match base {
                    ParamBase::Param(p) => write!(f, "{name} = {p}")?,
                    ParamBase::Kind(k) => write!(f, "{name} = {}", Kind::Basic(*k))?,
                }
                match (base, restrictions.is_empty()) {
                    (ParamBase::Kind(_), true) => Ok(()),
                    (_, true) => f.write_str(" ^ {}"),
                    _ => write!(f, " ^ {}", InfonSet(restrictions)),
                }
            }
            Statement::Alias { name, target } => write!(f, "{name} = {target}"),
            Statement::TypeDef { name, param, grounding, conditions } => {
                write!(f, "~{name} = [{param} | {grounding} |= {}]", InfonSet(conditions))
            }
            Statement::InfonName { name, infon } => write!(f, "{name} = {infon}"),
            Statement::Proposition { situation, mode, infons } => {
                if infons.is_empty() {
                    write!(f, "{situation} {mode} {{}}")
                } else {
                    write!(f, "{situation} {mode} {}", InfonSet(infons))
                }
            }
            Statement::Constraint(c) => c.fmt(f),
            Statement::Query(a) => {
                f.write_str("Q> ")?;
                atoms(f, a)
            }
            Statement::Directive(d) => d.fmt(f),
        }
    }
}
