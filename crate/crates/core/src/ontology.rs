//! Kinds, objects, relations, parameters, infons and parametric types.
//!
//! Every named thing in a knowledge base has exactly one kind. Objects carry a
//! basic kind or a parametric type; relations carry per-role appropriateness
//! conditions and a minimality count; parameters range over a single basic
//! kind and may be restricted by infons that the world situation must support
//! once the parameter is anchored.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use crate::error::Error;
use crate::kb::Kb;
use crate::store::Store;
use crate::Result;

/// Interned-ish identifier. Cheap to clone, ordered by its text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl core::ops::Deref for Symbol {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// The nine primitive kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicKind {
    Ind,
    Tim,
    Loc,
    Rel,
    Pol,
    Inf,
    Par,
    Sit,
    Typ,
}

impl BasicKind {
    pub const ALL: [BasicKind; 9] = [
        BasicKind::Ind,
        BasicKind::Tim,
        BasicKind::Loc,
        BasicKind::Rel,
        BasicKind::Pol,
        BasicKind::Inf,
        BasicKind::Par,
        BasicKind::Sit,
        BasicKind::Typ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasicKind::Ind => "IND",
            BasicKind::Tim => "TIM",
            BasicKind::Loc => "LOC",
            BasicKind::Rel => "REL",
            BasicKind::Pol => "POL",
            BasicKind::Inf => "INF",
            BasicKind::Par => "PAR",
            BasicKind::Sit => "SIT",
            BasicKind::Typ => "TYP",
        }
    }

    pub fn from_name(name: &str) -> Option<BasicKind> {
        BasicKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Name of the unrestricted system parameter ranging over this kind (`IND1`, ...).
    pub fn default_parameter(self) -> Symbol {
        let mut s = String::from(self.name());
        s.push('1');
        Symbol::from(s)
    }
}

impl fmt::Display for BasicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "~{}", self.name())
    }
}

/// A kind: one of the primitives or a user-defined parametric type.
/// Parametric type names are stored without the `~` sigil.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Basic(BasicKind),
    Type(Symbol),
}

impl Kind {
    /// Resolves the text after the sigil; basic names win.
    pub fn from_name(name: &str) -> Kind {
        match BasicKind::from_name(name) {
            Some(b) => Kind::Basic(b),
            None => Kind::Type(Symbol::new(name)),
        }
    }
}

impl From<BasicKind> for Kind {
    fn from(b: BasicKind) -> Self {
        Kind::Basic(b)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Basic(b) => b.fmt(f),
            Kind::Type(t) => write!(f, "~{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Neg,
    Pos,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Neg => Polarity::Pos,
            Polarity::Pos => Polarity::Neg,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Neg => "0",
            Polarity::Pos => "1",
        })
    }
}

/// An infon argument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Any declared name: object, situation, parameter, relation or named infon.
    Name(Symbol),
    /// A kind used as an object, e.g. the second argument of `of-type`.
    Kind(Kind),
    /// Constraint or query variable, written `?X`.
    Var(Symbol),
    /// The null object `-` filling an unused role.
    Null,
}

impl Term {
    pub fn name(s: &str) -> Term {
        Term::Name(Symbol::new(s))
    }

    pub fn var(s: &str) -> Term {
        Term::Var(Symbol::new(s))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_name(&self) -> Option<&Symbol> {
        match self {
            Term::Name(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(s) => s.fmt(f),
            Term::Kind(k) => k.fmt(f),
            Term::Var(v) => write!(f, "?{v}"),
            Term::Null => f.write_str("-"),
        }
    }
}

/// `<<relation, arg1, ..., argN, polarity>>`, normalized to full arity.
///
/// Equality is structural: same relation, positionally equal arguments
/// (`Null` equals only `Null`), same polarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Infon {
    pub relation: Symbol,
    pub args: Vec<Term>,
    pub polarity: Polarity,
}

impl Infon {
    /// Builds an infon without validation. Use [`Kb::make_infon`] for checked construction.
    pub fn new(relation: &str, args: Vec<Term>, polarity: Polarity) -> Infon {
        Infon { relation: Symbol::new(relation), args, polarity }
    }

    /// Same infon with the opposite polarity.
    pub fn dual(&self) -> Infon {
        Infon { relation: self.relation.clone(), args: self.args.clone(), polarity: self.polarity.flip() }
    }

    pub fn is_saturated(&self) -> bool {
        self.args.iter().all(|a| *a != Term::Null)
    }

    pub fn filled(&self) -> usize {
        self.args.iter().filter(|a| **a != Term::Null).count()
    }

    pub fn has_vars(&self) -> bool {
        self.args.iter().any(Term::is_var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|a| match a {
            Term::Var(v) => Some(v),
            _ => None,
        })
    }

    pub fn mentions(&self, name: &Symbol) -> bool {
        self.args.iter().any(|a| a.as_name() == Some(name))
    }

    /// Replaces every occurrence of the name `from` with `to`.
    pub fn rename(&self, from: &Symbol, to: &Term) -> Infon {
        self.map_args(|_, a| if a.as_name() == Some(from) { to.clone() } else { a.clone() })
    }

    pub(crate) fn map_args(&self, mut f: impl FnMut(usize, &Term) -> Term) -> Infon {
        Infon {
            relation: self.relation.clone(),
            args: self.args.iter().enumerate().map(|(i, a)| f(i, a)).collect(),
            polarity: self.polarity,
        }
    }

    /// Smallest infon of a relation in the derived ordering; used for range scans.
    pub(crate) fn lower_bound(relation: &Symbol) -> Infon {
        Infon { relation: relation.clone(), args: Vec::new(), polarity: Polarity::Neg }
    }
}

impl fmt::Display for Infon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<<{}", self.relation)?;
        for a in &self.args {
            write!(f, ", {a}")?;
        }
        write!(f, ", {}>>", self.polarity)
    }
}

/// Kinds admitted by one argument role. Appropriate if any member matches.
pub type RoleKinds = BTreeSet<Kind>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: Symbol,
    pub roles: Vec<RoleKinds>,
    pub minimality: usize,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.roles.len()
    }
}

/// What a parameter was declared from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamBase {
    Param(Symbol),
    Kind(BasicKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: Symbol,
    pub base: ParamBase,
    pub base_kind: BasicKind,
    /// Restrictions as declared, mentioning the base parameter.
    pub declared: Vec<Infon>,
    /// All restrictions, inherited ones included, mentioning this parameter.
    pub restrictions: BTreeSet<Infon>,
}

/// `[param | grounding |= conditions]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAbstraction {
    pub name: Symbol,
    pub param: Symbol,
    pub grounding: Symbol,
    pub conditions: Vec<Infon>,
    pub base_kind: BasicKind,
}

impl TypeAbstraction {
    pub fn instantiate(&self, candidate: &Symbol) -> Vec<Infon> {
        let to = Term::Name(candidate.clone());
        self.conditions.iter().map(|c| c.rename(&self.param, &to)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entity {
    /// Individuals, times, places, polarities, situations, or members of a parametric type.
    Object { kind: Kind, basic: BasicKind },
    Relation(Relation),
    Parameter(Parameter),
    Infon(Infon),
}

impl Entity {
    pub fn kind(&self) -> Kind {
        match self {
            Entity::Object { kind, .. } => kind.clone(),
            Entity::Relation(_) => Kind::Basic(BasicKind::Rel),
            Entity::Parameter(_) => Kind::Basic(BasicKind::Par),
            Entity::Infon(_) => Kind::Basic(BasicKind::Inf),
        }
    }

    pub fn basic_kind(&self) -> BasicKind {
        match self {
            Entity::Object { basic, .. } => *basic,
            Entity::Relation(_) => BasicKind::Rel,
            Entity::Parameter(_) => BasicKind::Par,
            Entity::Infon(_) => BasicKind::Inf,
        }
    }
}

/// A user declaration, in the order it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declared {
    Name(Symbol),
    Type(Symbol),
}

/// Name tables. Entities and parametric types live in separate namespaces
/// because type names always carry the `~` sigil in concrete syntax.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub(crate) entities: BTreeMap<Symbol, Entity>,
    pub(crate) types: BTreeMap<Symbol, TypeAbstraction>,
    pub(crate) order: Vec<Declared>,
}

impl Registry {
    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        match self.entities.get(name) {
            Some(Entity::Relation(r)) => Some(r),
            _ => None,
        }
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        match self.entities.get(name) {
            Some(Entity::Parameter(p)) => Some(p),
            _ => None,
        }
    }

    pub fn type_abstraction(&self, name: &str) -> Option<&TypeAbstraction> {
        self.types.get(name)
    }

    /// User declarations in declaration order (built-ins excluded).
    pub fn declarations(&self) -> &[Declared] {
        &self.order
    }

    pub fn names(&self) -> impl Iterator<Item = (&Symbol, &Entity)> {
        self.entities.iter()
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeAbstraction> {
        self.types.values()
    }

    pub fn kind_exists(&self, kind: &Kind) -> bool {
        match kind {
            Kind::Basic(_) => true,
            Kind::Type(t) => self.types.contains_key(t),
        }
    }
}

/// Well-known relation names interpreted by the store.
pub mod builtin {
    pub const OF_TYPE: &str = "of-type";
    pub const ANCHOR: &str = "anchor";
    pub const PART_OF: &str = "part-of";
    pub const MAKE_PART_OF: &str = "make-part-of";
    pub const TIME_OF: &str = "time-of";
    pub const PLACE_OF: &str = "place-of";
    pub const WORLD: &str = "w";
}

pub(crate) fn any_kind() -> RoleKinds {
    BasicKind::ALL.into_iter().map(Kind::Basic).collect()
}

pub(crate) fn role(kind: BasicKind) -> RoleKinds {
    core::iter::once(Kind::Basic(kind)).collect()
}

pub(crate) fn of_type_in(reg: &Registry, store: &Store, name: &Symbol, kind: &Kind) -> bool {
    let Some(entity) = reg.entity(name) else { return false };
    match kind {
        Kind::Basic(b) => entity.basic_kind() == *b,
        Kind::Type(t) => {
            let Some(ty) = reg.types.get(t) else { return false };
            entity.basic_kind() == ty.base_kind && ty.instantiate(name).iter().all(|c| store.supports_directly(&ty.grounding, c))
        }
    }
}

impl Kb {
    /// Kind of a ground term, if it denotes something.
    pub fn kind_of(&self, term: &Term) -> Option<Kind> {
        match term {
            Term::Name(n) => self.registry.entity(n).map(Entity::kind),
            Term::Kind(_) => Some(Kind::Basic(BasicKind::Typ)),
            Term::Var(_) | Term::Null => None,
        }
    }

    pub fn basic_kind_of(&self, term: &Term) -> Option<BasicKind> {
        match term {
            Term::Name(n) => self.registry.entity(n).map(Entity::basic_kind),
            Term::Kind(_) => Some(BasicKind::Typ),
            Term::Var(_) | Term::Null => None,
        }
    }

    /// Membership in a kind. Basic kinds compare the basic kind; parametric types
    /// additionally require the grounding situation to directly support the
    /// instantiated conditions.
    pub fn of_type(&self, name: &Symbol, kind: &Kind) -> bool {
        of_type_in(&self.registry, &self.store, name, kind)
    }

    fn fits_role(&self, term: &Term, role: &RoleKinds) -> bool {
        match term {
            Term::Null | Term::Var(_) => true,
            Term::Kind(_) => role.contains(&Kind::Basic(BasicKind::Typ)),
            Term::Name(n) => match self.registry.entity(n) {
                None => false,
                Some(Entity::Parameter(p)) => role.iter().any(|k| match k {
                    Kind::Basic(b) => *b == BasicKind::Par || *b == p.base_kind,
                    Kind::Type(t) => self.registry.types.get(t).is_some_and(|ty| ty.base_kind == p.base_kind),
                }),
                Some(e) => {
                    let declared = e.kind();
                    role.iter().any(|k| match k {
                        Kind::Basic(b) => *b == e.basic_kind(),
                        Kind::Type(_) => *k == declared || self.of_type(n, k),
                    })
                }
            },
        }
    }

    /// Validates and normalizes an infon: pads missing trailing roles with
    /// `Null`, checks appropriateness of every filled argument and the
    /// relation's minimality. Variables are accepted only when `allow_vars`.
    pub fn make_infon(&self, relation: &str, args: Vec<Term>, polarity: Polarity, allow_vars: bool) -> Result<Infon> {
        let rel = self.registry.relation(relation).ok_or_else(|| Error::UnknownRelation(Symbol::new(relation)))?;
        if args.len() > rel.arity() {
            return Err(Error::TooManyArguments { relation: rel.name.clone(), given: args.len(), arity: rel.arity() });
        }
        let mut args = args;
        args.resize(rel.arity(), Term::Null);
        for (position, (arg, role)) in args.iter().zip(&rel.roles).enumerate() {
            match arg {
                Term::Var(v) if !allow_vars => return Err(Error::UnexpectedVariable(v.clone())),
                Term::Name(n) if self.registry.entity(n).is_none() => return Err(Error::UnknownName(n.clone())),
                Term::Kind(k) if !self.registry.kind_exists(k) => return Err(Error::UnknownKind(k.clone())),
                _ => {}
            }
            if !self.fits_role(arg, role) {
                return Err(Error::Inappropriate {
                    relation: rel.name.clone(),
                    position: position + 1,
                    arg: arg.clone(),
                    expected: role.iter().cloned().collect(),
                });
            }
        }
        let infon = Infon { relation: rel.name.clone(), args, polarity };
        if infon.filled() < rel.minimality {
            return Err(Error::MinimalityUnmet { relation: rel.name.clone(), filled: infon.filled(), minimality: rel.minimality });
        }
        Ok(infon)
    }

    /// Re-validates an already built infon (normalization is idempotent).
    pub fn validate_infon(&self, infon: &Infon, allow_vars: bool) -> Result<Infon> {
        self.make_infon(&infon.relation, infon.args.clone(), infon.polarity, allow_vars)
    }

    fn check_unused(&self, name: &Symbol) -> Result<()> {
        if self.registry.entities.contains_key(name) {
            Err(Error::DuplicateName(name.clone()))
        } else {
            Ok(())
        }
    }

    /// `bob: ~IND`. Situations (`~SIT`) get an empty store entry; members of a
    /// parametric type get the type's basic kind and the instantiated
    /// conditions are asserted into the grounding situation.
    pub fn declare_object(&mut self, name: &str, kind: Kind) -> Result<()> {
        let sym = Symbol::new(name);
        self.check_unused(&sym)?;
        let basic = match &kind {
            Kind::Basic(b @ (BasicKind::Ind | BasicKind::Tim | BasicKind::Loc | BasicKind::Pol | BasicKind::Sit)) => *b,
            Kind::Basic(b) => return Err(Error::KindNeedsOwnForm(*b)),
            Kind::Type(t) => self.registry.types.get(t).ok_or_else(|| Error::UnknownKind(kind.clone()))?.base_kind,
        };
        let snapshot = (self.registry.clone(), self.store.clone(), self.bookkeeping.clone());
        let result = self.declare_object_inner(sym, kind, basic);
        if result.is_err() {
            (self.registry, self.store, self.bookkeeping) = snapshot;
        }
        result?;
        self.chain_after_change()
    }

    pub(crate) fn declare_object_inner(&mut self, sym: Symbol, kind: Kind, basic: BasicKind) -> Result<()> {
        self.registry.entities.insert(sym.clone(), Entity::Object { kind: kind.clone(), basic });
        self.registry.order.push(Declared::Name(sym.clone()));
        if basic == BasicKind::Sit {
            self.store.create(sym.clone())?;
        }
        self.record_of_type(&sym, Kind::Basic(basic))?;
        if let Kind::Type(t) = &kind {
            self.record_of_type(&sym, kind.clone())?;
            let ty = self.registry.types[t].clone();
            let conditions = ty.instantiate(&sym);
            for c in &conditions {
                self.validate_infon(c, false)?;
            }
            self.assert_infons(&ty.grounding, &conditions, None)?;
        }
        Ok(())
    }

    /// Adds the `of-type` bookkeeping fact for `name` to w.
    pub(crate) fn record_of_type(&mut self, name: &Symbol, kind: Kind) -> Result<()> {
        let fact = Infon {
            relation: Symbol::new(builtin::OF_TYPE),
            args: alloc::vec![Term::Name(name.clone()), Term::Kind(kind)],
            polarity: Polarity::Pos,
        };
        let world = self.store.world().clone();
        self.store.insert(&world, fact.clone());
        self.store.check_coherent(core::iter::once(&world))?;
        self.bookkeeping.insert(fact);
        Ok(())
    }

    /// `<sees | ~IND, ~SIT> [1]`.
    pub fn declare_relation(&mut self, name: &str, roles: Vec<RoleKinds>, minimality: usize) -> Result<()> {
        let sym = Symbol::new(name);
        self.check_unused(&sym)?;
        if roles.is_empty() {
            return Err(Error::EmptyRoles(sym));
        }
        if let Some(position) = roles.iter().position(BTreeSet::is_empty) {
            return Err(Error::EmptyRole { relation: sym, position: position + 1 });
        }
        if minimality < 1 || minimality > roles.len() {
            return Err(Error::MinimalityOutOfRange { relation: sym, minimality, arity: roles.len() });
        }
        for k in roles.iter().flatten() {
            if !self.registry.kind_exists(k) {
                return Err(Error::UnknownKind(k.clone()));
            }
        }
        self.registry.entities.insert(sym.clone(), Entity::Relation(Relation { name: sym.clone(), roles, minimality }));
        self.registry.order.push(Declared::Name(sym.clone()));
        self.record_of_type(&sym, Kind::Basic(BasicKind::Rel))?;
        self.chain_after_change()
    }

    /// `E = IND1 ^ <<sees, IND1, sit1, 1>>`. Restrictions written against the
    /// base are rewritten to mention the new parameter and accumulate with the
    /// base's own restrictions.
    pub fn declare_parameter(&mut self, name: &str, base: ParamBase, restrictions: Vec<Infon>) -> Result<()> {
        let sym = Symbol::new(name);
        self.check_unused(&sym)?;
        let (base_kind, mut all, base_name) = match &base {
            ParamBase::Kind(k) => (*k, BTreeSet::new(), k.default_parameter()),
            ParamBase::Param(p) => match self.registry.entity(p) {
                Some(Entity::Parameter(bp)) => (bp.base_kind, bp.restrictions.clone(), p.clone()),
                Some(_) => return Err(Error::InvalidParameterBase(p.clone())),
                None => return Err(Error::UnknownName(p.clone())),
            },
        };
        let me = Term::Name(sym.clone());
        all = all.into_iter().map(|r| r.rename(&base_name, &me)).collect();
        let param = Parameter { name: sym.clone(), base, base_kind, declared: restrictions.clone(), restrictions: BTreeSet::new() };
        self.registry.entities.insert(sym.clone(), Entity::Parameter(param));
        let mut checked = Vec::new();
        for r in &restrictions {
            match self.validate_infon(&r.rename(&base_name, &me), false) {
                Ok(v) => checked.push(v),
                Err(e) => {
                    self.registry.entities.remove(&sym);
                    return Err(Error::IllFormedRestriction { parameter: sym, source: alloc::boxed::Box::new(e) });
                }
            }
        }
        all.extend(checked);
        if let Some(Entity::Parameter(p)) = self.registry.entities.get_mut(&sym) {
            p.restrictions = all;
        }
        self.registry.order.push(Declared::Name(sym.clone()));
        self.record_of_type(&sym, Kind::Basic(BasicKind::Par))?;
        self.chain_after_change()
    }

    /// `~SITALL = [SIT1 | w |= <<sees, bob, SIT1, 1>>]`.
    pub fn define_type_abstraction(&mut self, name: &str, param: &str, grounding: &str, conditions: Vec<Infon>) -> Result<()> {
        let sym = Symbol::new(name);
        if BasicKind::from_name(name).is_some() || self.registry.types.contains_key(&sym) {
            return Err(Error::DuplicateName(sym));
        }
        let param = Symbol::new(param);
        let p = self.registry.parameter(&param).ok_or_else(|| Error::NotAParameter(Term::Name(param.clone())))?;
        let base_kind = p.base_kind;
        let grounding = Symbol::new(grounding);
        if !self.store.contains(&grounding) {
            return Err(Error::UnknownSituation(grounding));
        }
        if conditions.is_empty() || !conditions.iter().any(|c| c.mentions(&param)) {
            return Err(Error::ParameterNotInConditions { ty: sym, parameter: param });
        }
        let conditions = conditions.iter().map(|c| self.validate_infon(c, false)).collect::<Result<Vec<_>>>()?;
        self.registry.types.insert(sym.clone(), TypeAbstraction { name: sym.clone(), param, grounding, conditions, base_kind });
        self.registry.order.push(Declared::Type(sym.clone()));
        let world = self.store.world().clone();
        let fact = Infon {
            relation: Symbol::new(builtin::OF_TYPE),
            args: alloc::vec![Term::Kind(Kind::Type(sym)), Term::Kind(Kind::Basic(BasicKind::Typ))],
            polarity: Polarity::Pos,
        };
        self.store.insert(&world, fact.clone());
        self.bookkeeping.insert(fact);
        self.chain_after_change()
    }

    /// `infon1 = <<sees, bob, sit1, 1>>`. Renaming a named infon is allowed.
    pub fn name_infon(&mut self, name: &str, infon: Infon) -> Result<()> {
        let sym = Symbol::new(name);
        self.check_unused(&sym)?;
        let infon = self.validate_infon(&infon, false)?;
        self.registry.entities.insert(sym.clone(), Entity::Infon(infon));
        self.registry.order.push(Declared::Name(sym.clone()));
        self.record_of_type(&sym, Kind::Basic(BasicKind::Inf))?;
        self.chain_after_change()
    }

    pub fn named_infon(&self, name: &str) -> Result<Infon> {
        match self.registry.entity(name) {
            Some(Entity::Infon(i)) => Ok(i.clone()),
            Some(_) => Err(Error::NotAnInfon(Symbol::new(name))),
            None => Err(Error::UnknownName(Symbol::new(name))),
        }
    }

    pub(crate) fn install_builtins(&mut self) {
        let sit = || role(BasicKind::Sit);
        let rels: [(&str, Vec<RoleKinds>); 6] = [
            (builtin::OF_TYPE, alloc::vec![any_kind(), role(BasicKind::Typ)]),
            (builtin::ANCHOR, alloc::vec![role(BasicKind::Par), any_kind()]),
            (builtin::PART_OF, alloc::vec![sit(), sit()]),
            (builtin::MAKE_PART_OF, alloc::vec![sit(), sit()]),
            (builtin::TIME_OF, alloc::vec![sit(), role(BasicKind::Tim)]),
            (builtin::PLACE_OF, alloc::vec![sit(), role(BasicKind::Loc)]),
        ];
        let world = self.store.world().clone();
        self.registry.entities.insert(world.clone(), Entity::Object { kind: Kind::Basic(BasicKind::Sit), basic: BasicKind::Sit });
        let mut facts = Vec::new();
        let of_type = |name: Term, kind: BasicKind| Infon {
            relation: Symbol::new(builtin::OF_TYPE),
            args: alloc::vec![name, Term::Kind(Kind::Basic(kind))],
            polarity: Polarity::Pos,
        };
        for k in BasicKind::ALL {
            facts.push(of_type(Term::Kind(Kind::Basic(k)), BasicKind::Typ));
        }
        facts.push(of_type(Term::Name(world.clone()), BasicKind::Sit));
        for (name, roles) in rels {
            let sym = Symbol::new(name);
            self.registry
                .entities
                .insert(sym.clone(), Entity::Relation(Relation { name: sym.clone(), minimality: roles.len(), roles }));
            facts.push(of_type(Term::Name(sym), BasicKind::Rel));
        }
        for k in BasicKind::ALL {
            let sym = k.default_parameter();
            let p = Parameter {
                name: sym.clone(),
                base: ParamBase::Kind(k),
                base_kind: k,
                declared: Vec::new(),
                restrictions: BTreeSet::new(),
            };
            self.registry.entities.insert(sym.clone(), Entity::Parameter(p));
            facts.push(of_type(Term::Name(sym), BasicKind::Par));
        }
        for f in facts {
            self.store.insert(&world, f.clone());
            self.bookkeeping.insert(f);
        }
    }
}
