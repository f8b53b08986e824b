use sitkernel::graph::{reduced_edges, to_dot};
use sitkernel::persist::{load_kb, load_str, save_kb, save_string};
use sitkernel::{run_script, Session, Status};
use sitkernel_core::syntax::InputMode;
use sitkernel_core::Kb;

const SETUP: &str = "
<p | ~IND>
a: ~IND
b: ~IND
s1: ~SIT
s2: ~SIT
s1 |= {<<p, a, 1>>, <<p, b, 1>>}
";

fn session(text: &str) -> Session {
    let mut s = Session::default();
    let (out, ok) = run_script(&mut s, text);
    assert!(ok, "{out}");
    s
}

#[test]
fn solution_cap() {
    let mut s = session(SETUP);
    let all = s.step("Q> s1 |= <<p, ?X, 1>>").output;
    assert_eq!(all.matches("Solution").count(), 2);
    s.step(":solutions 1");
    let one = s.step("Q> s1 |= <<p, ?X, 1>>").output;
    assert_eq!(one, "Solution 1:\ns1 |= <<p, a, 1>>\n");
    assert!(all.starts_with(&one));
    assert_eq!(s.step("Q> s2 |= <<p, ?X, 1>>").output, "No solutions.\n");
}

#[test]
fn directives_leave_the_store_alone() {
    let mut s = session(SETUP);
    let before = save_string(&s.kb);
    for d in [":mode query", ":anchor s2", ":perspective G", ":search G", ":solutions 3", ":trace on", ":anchortrace on", ":anchors off", ":list situations", ":mode assert"] {
        assert_eq!(s.step(d).status, Status::Ok, "{d}");
    }
    assert_eq!(save_string(&s.kb), before);
    assert_eq!(s.state.mode, InputMode::Assert);
    assert_eq!(s.state.solutions, Some(3));
    assert_eq!(s.step(":anchor nowhere").status, Status::Failed);
}

#[test]
fn errors_do_not_stop_the_session() {
    let mut s = session(SETUP);
    let bad = s.step("s1 |= <<p, a>>");
    assert_eq!(bad.status, Status::Failed);
    assert!(bad.output.starts_with("error: syntax error at line 1, column 12"), "{}", bad.output);
    let refused = s.step("s1 |= <<p, a, 0>>");
    assert!(refused.output.contains("would support both"), "{}", refused.output);
    assert_eq!(s.step("s2 |= <<p, a, 0>>").status, Status::Ok);
    assert_eq!(s.step(":quit").status, Status::Quit);
}

#[test]
fn trace_shows_firings() {
    let mut s = session("<p | ~IND>\n<q | ~IND>\na: ~IND\ns: ~SIT\nG: F: ?S |= <<p, ?X, 1>> => ?S |= <<q, ?X, 1>>");
    assert_eq!(s.step("s |= <<p, a, 1>>").output, "");
    s.step(":trace on");
    s.step("b: ~IND");
    let out = s.step("s |= <<p, b, 1>>").output;
    assert_eq!(out, "fire G: F {?S=s, ?X=b} => s |= <<q, b, 1>> accepted\n");
    assert_eq!(s.step(":chain").output, "0 new facts\n");
}

#[test]
fn empty_store_file() {
    let text = save_string(&Kb::new());
    assert!(text.lines().all(|l| l.starts_with(';')), "{text}");
    let mut kb = Kb::new();
    load_str(&mut kb, &text).unwrap();
    assert_eq!(save_string(&kb), text);
    assert_eq!(kb.store().situations().count(), 1);
}

#[test]
fn file_round_trip_through_disk() {
    let s = session(&format!("{SETUP}\ns1 |= <<part-of, s2, s1, 1>>\nG: B: ?S |= <<p, ?X, 0>> <= ?S |= <<p, ?X, 1>>, s2 |/= <<p, ?X, 1>>"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kb.sit");
    save_kb(&s.kb, &path).unwrap();
    let mut fresh = Session::default();
    assert_eq!(fresh.step(&format!(":load {}", path.display())).status, Status::Ok);
    assert_eq!(save_string(&fresh.kb), save_string(&s.kb));
    let mut kb = Kb::new();
    load_kb(&mut kb, &path).unwrap();
    assert_eq!(save_string(&kb), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn load_refusal_names_the_statement() {
    let mut kb = Kb::new();
    let err = load_str(&mut kb, "<p | ~IND>\na: ~IND\nw |= <<p, a, 1>>\nw |= <<p, a, 0>>\n").unwrap_err();
    assert!(err.to_string().starts_with("line 4: `w |= <<p, a, 0>>`"), "{err}");
    assert_eq!(save_string(&kb), save_string(&Kb::new()));
    let err = load_str(&mut kb, "a: ~IND\n:quit\n").unwrap_err();
    assert!(err.to_string().contains("does not belong"), "{err}");
    let err = load_str(&mut kb, "a: ~IND\nb ~IND\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}

fn is_reduced(edges: &[(String, String)]) -> bool {
    // no edge is implied by a two-step path
    edges.iter().all(|(c, p)| !edges.iter().any(|(c2, m)| c2 == c && m != p && edges.iter().any(|(m2, p2)| m2 == m && p2 == p)))
}

#[test]
fn dot_export() {
    let empty = to_dot(Kb::new().store());
    assert_eq!(empty, "digraph situations {\n  \"w\";\n}\n");

    let s = session("sit1: ~SIT\nsit2: ~SIT\nsit1 |= <<part-of, sit2, sit1, 1>>");
    let edges: Vec<(String, String)> = reduced_edges(s.kb.store()).into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(edges, [("sit1".into(), "w".into()), ("sit2".into(), "sit1".into())]);

    let mut chain = String::new();
    for i in 1..=5 {
        chain += &format!("c{i}: ~SIT\n");
    }
    for i in 1..5 {
        chain += &format!("c{} |= <<part-of, c{i}, c{}, 1>>\n", i + 1, i + 1);
    }
    // a shortcut edge that the reduction must drop
    chain += "c5 |= <<part-of, c1, c5, 1>>\n";
    let s = session(&chain);
    let edges: Vec<(String, String)> = reduced_edges(s.kb.store()).into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(edges.len(), 5, "{edges:?}");
    assert!(is_reduced(&edges));
    assert!(to_dot(s.kb.store()).contains("  \"c4\" -> \"c5\";\n"));
}
