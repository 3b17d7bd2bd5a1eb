//! Hermetic pairs-directory corpora.

use std::fs;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub fn write_case(project: &Path, case: &str, before: &str, after: &str) {
    let dir = project.join(case);
    fs::create_dir_all(&dir).expect("create case dir");
    fs::write(dir.join("before.ast"), before).expect("write before");
    fs::write(dir.join("after.ast"), after).expect("write after");
}

fn unit(class: &str, method: &str, statements: &[String]) -> String {
    format!(
        r#"(unit (class (id "{class}") (method (id "{method}") (block {}))))"#,
        statements.join(" ")
    )
}

pub fn equals_call(receiver: &str, arg: &str) -> String {
    format!(r#"(call {receiver} (name "equals") {arg})"#)
}

const ARGS_I: &str = r#"(index (id "args") (id "i"))"#;

fn lit(s: &str) -> String {
    format!(r#"(lit:string "{s}")"#)
}

fn flag(var: &str) -> String {
    format!(r#"(block (assign (id "{var}") (lit:bool "true")))"#)
}

/// The launcher edit split over two projects: one project swaps the
/// `--launchdiag` comparison, the other swaps both halves of the
/// `--noclasspath || -noclasspath` test. Returns the project directories.
pub fn launcher_corpus(root: &Path) -> Vec<PathBuf> {
    let a = root.join("ant-launcher");
    let b = root.join("ant-main");
    let usage = r#"(expr (call (id "this") (name "usage")))"#.to_owned();

    let before = unit(
        "Launcher",
        "run",
        &[
            usage.clone(),
            format!(
                "(if {} {})",
                equals_call(ARGS_I, &lit("--launchdiag")),
                flag("launchDiag")
            ),
        ],
    );
    let after = unit(
        "Launcher",
        "run",
        &[
            usage.clone(),
            format!(
                "(if {} {})",
                equals_call(&lit("--launchdiag"), ARGS_I),
                flag("launchDiag")
            ),
        ],
    );
    write_case(&a, "r1", &before, &after);

    let test = |x: &str, y: &str| format!("(or {x} {y})");
    let before = unit(
        "Main",
        "parse",
        &[
            usage.clone(),
            format!(
                "(if {} {})",
                test(
                    &equals_call(ARGS_I, &lit("--noclasspath")),
                    &equals_call(ARGS_I, &lit("-noclasspath"))
                ),
                flag("noClasspath")
            ),
        ],
    );
    let after = unit(
        "Main",
        "parse",
        &[
            usage,
            format!(
                "(if {} {})",
                test(
                    &equals_call(&lit("--noclasspath"), ARGS_I),
                    &equals_call(&lit("-noclasspath"), ARGS_I)
                ),
                flag("noClasspath")
            ),
        ],
    );
    write_case(&b, "r1", &before, &after);
    vec![a, b]
}

/// One planted rewrite: its name and, per instance, the project index,
/// case name and full before/after files.
#[derive(Clone, Debug)]
pub struct Planted {
    pub name: &'static str,
    pub instances: Vec<Instance>,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub project: usize,
    pub case: String,
    pub before: String,
    pub after: String,
}

#[derive(Clone, Debug)]
pub struct PlantedCorpus {
    pub projects: Vec<PathBuf>,
    pub planted: Vec<Planted>,
    pub noise: usize,
}

impl PlantedCorpus {
    pub fn planted_edits(&self) -> usize {
        self.planted.iter().map(|p| p.instances.len()).sum()
    }
}

const VARS: &[&str] = &[
    "name", "key", "value", "line", "token", "path", "mode", "kind", "text", "user", "host", "arg",
];
const STRINGS: &[&str] = &[
    "yes", "-v", "--help", "utf-8", "GET", "none", "quit", "*", "main", "tmp", "true", "x",
];

/// One statement rewrite per planted pattern, parameterized by a seed.
fn planted_statement(pattern: usize, rng: &mut StdRng) -> (String, String) {
    let var = *VARS.choose(rng).expect("vars");
    let s = *STRINGS.choose(rng).expect("strings");
    let n = rng.random_range(0..1000);
    let id = |v: &str| format!(r#"(id "{v}")"#);
    match pattern {
        0 => {
            let then = r#"(block (return (lit:bool "true")))"#;
            (
                format!("(if {} {then})", equals_call(&id(var), &lit(s))),
                format!("(if {} {then})", equals_call(&lit(s), &id(var))),
            )
        }
        1 => (
            format!(r#"(return (binop:eq (call (id "{var}") (name "size")) (lit:int "0")))"#),
            format!(r#"(return (call (id "{var}") (name "isEmpty")))"#),
        ),
        2 => (
            format!(
                r#"(local (type "Integer") (id "{var}") (new (type "Integer") (lit:int "{n}")))"#
            ),
            format!(
                r#"(local (type "Integer") (id "{var}") (call (id "Integer") (name "valueOf") (lit:int "{n}")))"#
            ),
        ),
        3 => (
            format!(r#"(throw (new (type "Exception") (lit:string "{s}")))"#),
            format!(r#"(throw (new (type "IllegalStateException") (lit:string "{s}")))"#),
        ),
        4 => (
            format!(r#"(expr (call (id "{var}") (name "printStackTrace")))"#),
            format!(r#"(expr (call (id "LOG") (name "error") (id "{var}")))"#),
        ),
        _ => unreachable!("five planted patterns"),
    }
}

pub const PLANTED_NAMES: [&str; 5] = [
    "swap equals receiver",
    "size() == 0 to isEmpty()",
    "new Integer to valueOf",
    "Exception to IllegalStateException",
    "printStackTrace to logger",
];

/// Three projects, five planted rewrites with 8 to 12 instances each,
/// spread round-robin over the projects, and `noise` one-off edits.
pub fn planted_corpus(root: &Path, seed: u64, noise: usize) -> PlantedCorpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let projects: Vec<PathBuf> = (1..=3).map(|k| root.join(format!("project{k}"))).collect();
    let mut case = 0usize;
    let mut next_case = || {
        case += 1;
        format!("c{case:04}")
    };
    let keep = r#"(expr (call (id "System") (name "gc")))"#.to_owned();

    let mut planted = Vec::new();
    for (p, name) in PLANTED_NAMES.iter().enumerate() {
        let count = 8 + p; // 8, 9, 10, 11, 12
        let mut instances = Vec::new();
        for k in 0..count {
            let (b, a) = planted_statement(p, &mut rng);
            let class = format!("C{}", 100 * p + k);
            let before = unit(&class, "m", &[keep.clone(), b]);
            let after = unit(&class, "m", &[keep.clone(), a]);
            let project = k % projects.len();
            let case = next_case();
            write_case(&projects[project], &case, &before, &after);
            instances.push(Instance {
                project,
                case,
                before,
                after,
            });
        }
        planted.push(Planted { name, instances });
    }
    for k in 0..noise {
        let before = unit(
            "N",
            "m",
            &[keep.clone(), format!(r#"(noise{k} (x "a") (y "b"))"#)],
        );
        let after = unit(
            "N",
            "m",
            &[keep.clone(), format!(r#"(noise{k} (x "c") (y "b"))"#)],
        );
        write_case(&projects[k % projects.len()], &next_case(), &before, &after);
    }
    PlantedCorpus {
        projects,
        planted,
        noise,
    }
}

/// A single project of `commits` revision pairs over one evolving class of
/// `methods` methods; each commit applies a few of the planted rewrites and
/// some renames.
pub fn history_corpus(root: &Path, commits: usize, methods: usize, seed: u64) -> PathBuf {
    let mut rng = StdRng::seed_from_u64(seed);
    let project = root.join("history");
    let mut bodies: Vec<String> = (0..methods)
        .map(|_| {
            let p = rng.random_range(0..5);
            planted_statement(p, &mut rng).0
        })
        .collect();
    let render = |bodies: &[String]| {
        let methods: Vec<String> = bodies
            .iter()
            .enumerate()
            .map(|(k, b)| {
                format!(
                    r#"(method (id "m{k}") (params (param (type "int") (id "a")) (param (type "String") (id "b"))) (block (expr (call (id "System") (name "gc"))) {b} (return (id "a"))))"#
                )
            })
            .collect();
        format!(
            r#"(unit (package (id "demo")) (class (id "Big") {}))"#,
            methods.join(" ")
        )
    };
    for c in 0..commits {
        let before = render(&bodies);
        for _ in 0..rng.random_range(1..=3) {
            let slot = rng.random_range(0..methods);
            let p = rng.random_range(0..5);
            let (b, a) = planted_statement(p, &mut rng);
            // half the time rewrite in place, otherwise replace outright
            bodies[slot] = if rng.random_bool(0.5) { a } else { b };
        }
        let after = render(&bodies);
        write_case(&project, &format!("c{c:04}"), &before, &after);
    }
    project
}
