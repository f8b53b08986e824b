use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ontology::{BasicKind, Infon, Kind, Symbol, Term};
use crate::syntax::SyntaxError;

fn kinds(ks: &[Kind]) -> String {
    let mut s = String::new();
    for (i, k) in ks.iter().enumerate() {
        if i > 0 {
            s.push_str(" or ");
        }
        s.push_str(&alloc::format!("{k}"));
    }
    s
}

fn show_frontier(f: &[(Symbol, Infon)]) -> String {
    let mut s = String::new();
    for (i, (sit, inf)) in f.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&alloc::format!("{sit} |= {inf}"));
    }
    s
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),

    // declarations
    #[error("unknown relation `{0}`")]
    UnknownRelation(Symbol),
    #[error("unknown name `{0}`")]
    UnknownName(Symbol),
    #[error("unknown kind `{0}`")]
    UnknownKind(Kind),
    #[error("unknown situation `{0}`")]
    UnknownSituation(Symbol),
    #[error("`{0}` is not a situation")]
    NotASituation(Term),
    #[error("`{0}` is already declared")]
    DuplicateName(Symbol),
    #[error("objects of kind {0} have their own declaration form")]
    KindNeedsOwnForm(BasicKind),
    #[error("relation `{0}` needs at least one role")]
    EmptyRoles(Symbol),
    #[error("role {position} of `{relation}` admits no kind")]
    EmptyRole { relation: Symbol, position: usize },
    #[error("minimality {minimality} of `{relation}` is outside 1..={arity}")]
    MinimalityOutOfRange { relation: Symbol, minimality: usize, arity: usize },
    #[error("`{0}` is not a parameter and cannot be a parameter base")]
    InvalidParameterBase(Symbol),
    #[error("restriction of parameter `{parameter}` is ill-formed: {source}")]
    IllFormedRestriction { parameter: Symbol, source: Box<Error> },
    #[error("`{0}` is not a parameter")]
    NotAParameter(Term),
    #[error("conditions of type ~{ty} do not mention `{parameter}`")]
    ParameterNotInConditions { ty: Symbol, parameter: Symbol },
    #[error("`{0}` is not a named infon")]
    NotAnInfon(Symbol),

    // infon formation
    #[error("`{relation}` takes at most {arity} arguments, got {given}")]
    TooManyArguments { relation: Symbol, given: usize, arity: usize },
    #[error("variable `?{0}` is not allowed here")]
    UnexpectedVariable(Symbol),
    #[error("argument {position} of `{relation}` is `{arg}`, expected {}", kinds(expected))]
    Inappropriate { relation: Symbol, position: usize, arg: Term, expected: Vec<Kind> },
    #[error("`{relation}` needs at least {minimality} filled roles, got {filled}")]
    MinimalityUnmet { relation: Symbol, filled: usize, minimality: usize },

    // store
    #[error("making `{child}` part of `{parent}` would create a cycle")]
    PartOfCycle { child: Symbol, parent: Symbol },
    #[error("situation `{situation}` would support both {infon} and {dual}")]
    Incoherent { situation: Symbol, infon: Infon, dual: Infon },
    #[error("`{situation}` already has {relation} `{existing}`, cannot also be `{new}`")]
    LocationConflict { situation: Symbol, relation: Symbol, existing: Symbol, new: Symbol },
    #[error("hierarchy facts cannot be negative: {0}")]
    NegativeHierarchyFact(Infon),
    #[error("arguments of {0} must be concrete objects of the right kind")]
    SpecialArgsNotConcrete(Infon),
    #[error("parameter `{parameter}` cannot be anchored to `{target}`: kinds differ")]
    AnchorKindMismatch { parameter: Symbol, target: Term },
    #[error("parameter `{parameter}` cannot be anchored to `{target}`: w does not support {restriction}")]
    AnchorRestriction { parameter: Symbol, target: Term, restriction: Infon },
    #[error("parameter `{parameter}` is already anchored to `{existing}` in `{situation}`, cannot anchor to `{new}`")]
    AnchorDuplicate { situation: Symbol, parameter: Symbol, existing: Term, new: Term },
    #[error("anchoring `{parameter}` to `{target}` would make an anchor cycle in `{situation}`")]
    AnchorCycle { situation: Symbol, parameter: Symbol, target: Term },
    #[error("{0} contradicts the declarations")]
    OfTypeConflict(Infon),
    #[error("`|/=` propositions cannot be asserted (in `{0}`)")]
    NegativeAssertion(Symbol),
    #[error("empty proposition for `{0}`")]
    EmptyProposition(Symbol),

    // constraints and inference
    #[error("constraint `{name}` already exists in group `{group}`")]
    DuplicateConstraint { group: Symbol, name: Symbol },
    #[error("constraint `{0}` needs antecedents and consequents")]
    EmptyConstraintSide(Symbol),
    #[error("no constraints in group `{0}`")]
    UnknownGroup(Symbol),
    #[error("consequent variable `?{var}` of `{constraint}` does not occur in an antecedent")]
    UnboundConsequentVariable { constraint: Symbol, var: Symbol },
    #[error("consequent `{atom}` of `{constraint}` must use `|=`")]
    NegatedConsequent { constraint: Symbol, atom: String },
    #[error("cannot evaluate non-ground `|/=` atom `{0}`")]
    NonGroundNegation(String),
    #[error("proof depth limit {depth} reached")]
    DepthExhausted { depth: u32 },
    #[error("forward chaining stopped after {cap} assertions; pending: {}", show_frontier(frontier))]
    FiringCapExhausted { cap: usize, frontier: Vec<(Symbol, Infon)> },
    #[error("queries and directives cannot be applied to a knowledge base")]
    NotApplicable,
    #[error("constraint `{0}` depends negatively on its own conclusion")]
    Unstratified(Symbol),
}
