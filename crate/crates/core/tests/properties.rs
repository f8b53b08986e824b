use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sitkernel_core::syntax::{parse_statement, split_statements, InputMode, Statement};
use sitkernel_core::{Atom, Error, Infon, Kb, Mode, Polarity, Query, QueryOptions, Term};

fn try_load(kb: &mut Kb, text: &str) -> Result<(), Error> {
    for (_, chunk) in split_statements(text) {
        let st = parse_statement(&chunk, InputMode::Assert).unwrap_or_else(|e| panic!("`{chunk}`: {e}"));
        kb.apply(&st, None)?;
    }
    Ok(())
}

fn load(kb: &mut Kb, text: &str) {
    try_load(kb, text).unwrap_or_else(|e| panic!("{e}\n{text}"));
}

fn query(text: &str) -> Query {
    let Statement::Query(atoms) = parse_statement(text, InputMode::Query).unwrap() else { panic!("{text}") };
    Query::new(
        atoms
            .iter()
            .map(|a| {
                let sitkernel_core::syntax::InfonExpr::Literal { relation, args, polarity } = &a.infon else { panic!() };
                Atom::new(a.situation.clone(), a.mode, Infon::new(relation, args.clone(), *polarity))
            })
            .collect(),
    )
}

fn sit(i: usize) -> String {
    format!("s{i}")
}

/// Reachability over `child -> parent` edges, reflexive.
fn reach(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(c, p) in edges {
        r[c][p] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (Just(n), proptest::sample::subsequence(pairs, 0..=m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(n, es, perm)| (n, es.into_iter().map(|(i, j)| (perm[i], perm[j])).collect()))
    })
}

fn hierarchy(n: usize, edges: &[(usize, usize)]) -> Kb {
    let mut kb = Kb::new();
    let mut text = String::from("<p | ~SIT>\n");
    for i in 0..n {
        text += &format!("{}: ~SIT\n", sit(i));
    }
    for i in 0..n {
        text += &format!("{} |= <<p, {}, 1>>\n", sit(i), sit(i));
    }
    for &(c, p) in edges {
        text += &format!("{} |= <<part-of, {}, {}, 1>>\n", sit(p), sit(c), sit(p));
    }
    load(&mut kb, &text);
    kb
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn part_of_is_a_partial_order((n, edges) in dag()) {
        let kb = hierarchy(n, &edges);
        let store = kb.store();
        let r = reach(n, &edges);
        for i in 0..n {
            prop_assert!(store.part_of(&sit(i), &sit(i)));
            prop_assert!(store.part_of("w", &sit(i)));
            for j in 0..n {
                prop_assert_eq!(store.part_of(&sit(i), &sit(j)), r[i][j], "{} in {}", i, j);
                if i != j && r[i][j] {
                    let derived = Infon::new("part-of", vec![Term::name(&sit(i)), Term::name(&sit(j))], Polarity::Pos);
                    prop_assert!(store.supports_directly(&sit(j), &derived));
                    // the reverse edge would close a cycle
                    let mut k2 = kb.clone();
                    let back = format!("{} |= <<part-of, {}, {}, 1>>", sit(i), sit(j), sit(i));
                    let refused = try_load(&mut k2, &back);
                    prop_assert!(matches!(refused, Err(Error::PartOfCycle { .. })), "{:?}", refused);
                    prop_assert_eq!(k2.store(), kb.store());
                }
            }
        }
    }

    #[test]
    fn effective_sets_match_traversal((n, edges) in dag()) {
        let kb = hierarchy(n, &edges);
        let store = kb.store();
        let r = reach(n, &edges);
        let own = |s: &str| store.situation(s).unwrap().own().clone();
        for j in 0..n {
            let mut oracle = own("w");
            for i in 0..n {
                if r[i][j] {
                    oracle.extend(own(&sit(i)));
                }
            }
            let eff = store.effective_infons(&sit(j));
            prop_assert_eq!(&eff, &oracle);
            for i in 0..n {
                if r[i][j] {
                    prop_assert!(store.effective_infons(&sit(i)).is_subset(&eff));
                }
            }
            for f in store.effective_infons("w") {
                prop_assert!(store.supports_directly(&sit(j), &f));
            }
        }
    }

    #[test]
    fn refused_assertions_leave_the_store_alone(
        (n, edges) in dag(),
        facts in proptest::collection::vec((0usize..8, 0usize..3, any::<bool>()), 1..30),
    ) {
        let mut kb = hierarchy(n, &edges);
        load(&mut kb, "<q | ~IND>\na: ~IND\nb: ~IND\nc: ~IND");
        for (s, o, pos) in facts {
            let target = if s >= n { "w".to_string() } else { sit(s) };
            let text = format!("{} |= <<q, {}, {}>>", target, ["a", "b", "c"][o], u8::from(pos));
            let before = kb.store().clone();
            match try_load(&mut kb, &text) {
                Ok(()) => {}
                Err(Error::Incoherent { .. }) => prop_assert_eq!(kb.store(), &before),
                Err(e) => prop_assert!(false, "{}", e),
            }
            prop_assert!(kb.store().audit().is_ok());
        }
    }

    #[test]
    fn derived_infons_revalidate(rel in 0usize..3, a in 0usize..4, b in 0usize..4, pos in any::<bool>()) {
        let mut kb = Kb::new();
        load(&mut kb, "<r0 | ~IND>\n<r1 | ~IND, ~SIT> [1]\n<r2 | {~IND, ~SIT}, ~IND> [2]\nx: ~IND\ny: ~IND\nt: ~SIT");
        let pick = |i: usize| match i {
            0 => Term::Null,
            1 => Term::name("x"),
            2 => Term::name("y"),
            _ => Term::name("t"),
        };
        let args: Vec<Term> = [pick(a), pick(b)].into_iter().take(rel.max(1)).collect();
        let pol = if pos { Polarity::Pos } else { Polarity::Neg };
        if let Ok(i) = kb.make_infon(&format!("r{rel}"), args, pol, false) {
            prop_assert_eq!(kb.validate_infon(&i, false).unwrap(), i.clone());
            let rel = kb.registry().relation(&i.relation).unwrap();
            prop_assert_eq!(i.args.len(), rel.arity());
            prop_assert!(i.filled() >= rel.minimality);
        }
    }
}

// ---- forward chaining ----

#[derive(Debug, Clone)]
struct Rule {
    sit: Option<usize>,
    from: Vec<(usize, Vec<usize>)>,
    to: (usize, Vec<usize>, bool),
}

const OBJECTS: [&str; 3] = ["a", "b", "c"];
const VARS: [&str; 2] = ["?X", "?Y"];

fn relation_arity(r: usize) -> usize {
    1 + r % 2
}

fn arg_pick() -> impl Strategy<Value = usize> {
    0usize..5
}

fn rule() -> impl Strategy<Value = Rule> {
    let atom = || (0usize..4, proptest::collection::vec(arg_pick(), 2));
    (proptest::option::of(0usize..3), proptest::collection::vec(atom(), 1..3), atom(), proptest::bool::weighted(0.85))
        .prop_map(|(sit, from, (r, args), pos)| Rule { sit, from, to: (r, args, pos) })
}

fn arg_text(i: usize, allowed_vars: &BTreeSet<usize>) -> String {
    if i < 2 && allowed_vars.contains(&i) {
        VARS[i].to_string()
    } else if i < 2 {
        OBJECTS[i].to_string()
    } else {
        OBJECTS[i - 2].to_string()
    }
}

fn rules_text(rules: &[Rule], dir: &str) -> String {
    let mut out = String::new();
    for (k, r) in rules.iter().enumerate() {
        let s = r.sit.map_or("?S".to_string(), sit);
        let all: BTreeSet<usize> = [0, 1].into();
        let mut bound = BTreeSet::new();
        let ants: Vec<String> = r
            .from
            .iter()
            .map(|(rel, args)| {
                let a = &args[..relation_arity(*rel)];
                bound.extend(a.iter().filter(|&&i| i < 2));
                let txt: Vec<String> = a.iter().map(|&i| arg_text(i, &all)).collect();
                format!("{s} |= <<r{rel}, {}, 1>>", txt.join(", "))
            })
            .collect();
        let (rel, args, pos) = &r.to;
        let txt: Vec<String> = args[..relation_arity(*rel)].iter().map(|&i| arg_text(i, &bound)).collect();
        let head = format!("{s} |= <<r{rel}, {}, {}>>", txt.join(", "), u8::from(*pos));
        let line = if dir == "<=" { format!("{head} <= {}", ants.join(", ")) } else { format!("{} {dir} {head}", ants.join(", ")) };
        out += &format!("G: R{k}: {line}\n");
    }
    out
}

fn decls() -> String {
    let mut t = String::from("a: ~IND\nb: ~IND\nc: ~IND\n");
    for i in 0..3 {
        t += &format!("{}: ~SIT\n", sit(i));
    }
    for r in 0..4 {
        let roles = vec!["~IND"; relation_arity(r)].join(", ");
        t += &format!("<r{r} | {roles}>\n");
    }
    t
}

fn facts_text(facts: &[(usize, usize, usize, usize)]) -> String {
    facts
        .iter()
        .map(|&(s, r, x, y)| {
            let args: Vec<&str> = [OBJECTS[x], OBJECTS[y]].into_iter().take(relation_arity(r)).collect();
            format!("{} |= <<r{r}, {}, 1>>\n", sit(s), args.join(", "))
        })
        .collect()
}

fn stored(kb: &Kb) -> BTreeMap<String, BTreeSet<Infon>> {
    kb.store().situations().map(|s| (s.to_string(), kb.store().situation(s).unwrap().own().clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_chaining_reaches_a_fixpoint(
        rules in proptest::collection::vec(rule(), 1..6),
        facts in proptest::collection::vec((0usize..3, 0usize..4, 0usize..3, 0usize..3), 0..10),
    ) {
        let mut kb = Kb::new();
        kb.config.auto_chain = false;
        load(&mut kb, &decls());
        load(&mut kb, &rules_text(&rules, "=>"));
        load(&mut kb, &facts_text(&facts));
        kb.forward_chain().unwrap();
        let after = stored(&kb);
        prop_assert!(kb.forward_chain().unwrap().iter().all(|f| !matches!(f.outcome, sitkernel_core::FiringOutcome::Accepted)));
        prop_assert_eq!(stored(&kb), after);
        prop_assert!(kb.store().audit().is_ok());
        for s in kb.store().situations() {
            for i in kb.store().situation(s).unwrap().own() {
                prop_assert!(!i.has_vars(), "{} leaked into {}", i, s);
            }
        }
        // a rule naming s0 never writes elsewhere
        for f in kb.take_firings() {
            let c = kb.constraint(&f.group, &f.constraint).unwrap();
            if let Term::Name(n) = &c.consequents[0].situation {
                prop_assert_eq!(n, &f.situation);
            }
        }
    }

    #[test]
    fn bidirectional_rules_agree(
        rules in proptest::collection::vec(rule(), 1..5),
        facts in proptest::collection::vec((0usize..3, 0usize..4, 0usize..3, 0usize..3), 0..8),
    ) {
        let pos: Vec<Rule> = rules.into_iter().map(|mut r| { r.to.2 = true; r }).collect();
        let mut fwd = Kb::new();
        load(&mut fwd, &decls());
        load(&mut fwd, &facts_text(&facts));
        let mut back = fwd.clone();
        back.config.auto_chain = false;
        load(&mut back, &rules_text(&pos, "<=>"));
        load(&mut fwd, &rules_text(&pos, "<=>"));
        fwd.forward_chain().unwrap();
        for s in 0..3 {
            for r in 0..4 {
                let vars: Vec<Term> = (0..relation_arity(r)).map(|i| Term::var(&format!("V{i}"))).collect();
                let goal = Atom::new(Term::name(&sit(s)), Mode::Supports, Infon::new(&format!("r{r}"), vars, Polarity::Pos));
                let proved: BTreeSet<Infon> = back
                    .backward_prove(&goal, Some("G"), None, 256)
                    .unwrap()
                    .iter()
                    .map(|b| goal.substitute(b).infon)
                    .collect();
                let chased: BTreeSet<Infon> = fwd
                    .store()
                    .effective_infons(&sit(s))
                    .into_iter()
                    .filter(|i| i.relation.as_str() == format!("r{r}"))
                    .collect();
                prop_assert_eq!(proved, chased, "s{} r{}", s, r);
            }
        }
    }
}

// ---- queries ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn queries_match_brute_force(
        rules in proptest::collection::vec(rule(), 0..4),
        facts in proptest::collection::vec((0usize..3, 0usize..4, 0usize..3, 0usize..3), 0..12),
        r1 in 0usize..4,
        r2 in 0usize..4,
        neg in any::<bool>(),
    ) {
        let pos: Vec<Rule> = rules.into_iter().map(|mut r| { r.to.2 = true; r }).collect();
        let mut kb = Kb::new();
        kb.config.auto_chain = false;
        load(&mut kb, &decls());
        load(&mut kb, &facts_text(&facts));
        load(&mut kb, &rules_text(&pos, "<="));
        let a1 = ["?X", "?Y"][..relation_arity(r1)].join(", ");
        let a2 = vec!["?X"; relation_arity(r2)].join(", ");
        let mode = if neg { "|/=" } else { "|=" };
        let text = format!("?S |= <<r{r1}, {a1}, 1>>, ?S {mode} <<r{r2}, {a2}, 1>>");
        let q = query(&text);
        let group = (!pos.is_empty()).then_some("G");
        let opts = QueryOptions { perspective: group.map(Into::into), ..QueryOptions::default() };
        let got: BTreeSet<BTreeMap<String, Term>> = kb
            .evaluate(&q, &opts)
            .unwrap()
            .into_iter()
            .map(|s| s.bindings.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
            .collect();
        let mut oracle = BTreeSet::new();
        let vars: Vec<&str> = if relation_arity(r1) == 2 { vec!["X", "Y"] } else { vec!["X"] };
        let values: Vec<Term> = OBJECTS.iter().map(|o| Term::name(o)).collect();
        let mut bindings: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
        for v in &vars {
            bindings = bindings
                .into_iter()
                .flat_map(|b| values.iter().map(move |x| { let mut b = b.clone(); b.insert(v.to_string(), x.clone()); b }))
                .collect();
        }
        for s in kb.store().situations() {
            for b in &bindings {
                let mut b = b.clone();
                b.insert("S".into(), Term::Name(s.clone()));
                let holds = q.atoms.iter().all(|a| {
                    let ground = a.infon.args.iter().map(|t| match t { Term::Var(v) => b[v.as_str()].clone(), t => t.clone() }).collect();
                    let i = Infon { args: ground, ..a.infon.clone() };
                    let yes = kb.supports(s, &i, group).unwrap();
                    yes == (a.mode == Mode::Supports)
                });
                if holds {
                    oracle.insert(b);
                }
            }
        }
        prop_assert_eq!(&got, &oracle, "{}", text);
        let all = kb.evaluate(&q, &opts).unwrap();
        for k in 1..=all.len() {
            let some = kb.evaluate(&q, &QueryOptions { max_solutions: Some(k), ..opts.clone() }).unwrap();
            prop_assert_eq!(&some[..], &all[..k]);
        }
        for s in &all {
            prop_assert!(s.atoms.iter().all(|a| a.is_ground()));
        }
    }
}

// ---- anchoring ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anchoring_is_idempotent(
        anchors in proptest::collection::vec((0usize..4, 0usize..6), 0..6),
        args in proptest::collection::vec(0usize..6, 2),
    ) {
        let mut kb = Kb::new();
        load(&mut kb, "<r | ~IND, ~IND>\na: ~IND\nb: ~IND\nP0 = ~IND\nP1 = ~IND\nP2 = ~IND\nP3 = ~IND\nanch: ~SIT");
        let names = ["P0", "P1", "P2", "P3", "a", "b"];
        for (p, t) in anchors {
            let _ = try_load(&mut kb, &format!("anch |= <<anchor, {}, {}, 1>>", names[p], names[t]));
        }
        prop_assert!(kb.store().audit().is_ok());
        let i = Infon::new("r", args.iter().map(|&k| Term::name(names[k])).collect(), Polarity::Pos);
        let once = kb.apply_anchoring(&i, "anch").unwrap();
        prop_assert_eq!(kb.apply_anchoring(&once, "anch").unwrap(), once.clone());
        // with nothing anchored the infon comes back verbatim
        prop_assert_eq!(kb.apply_anchoring(&i, "w").unwrap(), i);
    }
}
