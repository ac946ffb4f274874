//! Random straight-line library programs whose dataflow is known by
//! construction, plus a brute-force scorer over that known graph.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;

const FUNCS: [&str; 5] = ["abs", "log", "exp", "add", "mul"];
const VARS: [&str; 5] = ["a", "b", "c", "d", "e"];

pub struct Generated {
    pub source: String,
    pub statements: usize,
    pub nodes: Vec<(String, String)>,
    pub edges: BTreeSet<(usize, usize)>,
}

/// Rendered expression: source text, canonical text, value producers.
struct Expr {
    text: String,
    canon: String,
    producers: BTreeSet<usize>,
}

struct Builder<'r, R: Rng> {
    rng: &'r mut R,
    env: HashMap<&'static str, BTreeSet<usize>>,
    nodes: Vec<(String, String)>,
    edges: BTreeSet<(usize, usize)>,
}

impl<R: Rng> Builder<'_, R> {
    fn defined(&mut self) -> Option<&'static str> {
        let vars: Vec<&'static str> = VARS.iter().copied().filter(|v| self.env.contains_key(v)).collect();
        vars.choose(self.rng).copied()
    }

    fn sep(&mut self) -> &'static str {
        [", ", " , ", ","].choose(self.rng).unwrap()
    }

    fn atom(&mut self) -> Expr {
        match (self.rng.random_range(0..3), self.defined()) {
            (0, Some(v)) => Expr { text: v.into(), canon: v.into(), producers: self.env[v].clone() },
            (1, Some(v)) => Expr { text: format!("{v} * 2"), canon: format!("{v}*2"), producers: self.env[v].clone() },
            _ => {
                let n = self.rng.random_range(1..3).to_string();
                Expr { text: n.clone(), canon: n, producers: BTreeSet::new() }
            }
        }
    }

    fn call(&mut self, nested: bool) -> Expr {
        let func = *FUNCS.choose(self.rng).unwrap();
        let argc = self.rng.random_range(0..=3);
        let mut args = Vec::new();
        for _ in 0..argc {
            let arg = if nested && self.rng.random_bool(0.3) { self.call(false) } else { self.atom() };
            args.push(arg);
        }
        let mut text = String::new();
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                let s = self.sep();
                text.push_str(s);
            }
            text.push_str(&a.text);
        }
        let canon: Vec<&str> = args.iter().map(|a| a.canon.as_str()).collect();
        let canon = canon.join(",");
        let api = format!("torch.{func}");
        let id = self.nodes.len();
        for a in &args {
            self.edges.extend(a.producers.iter().map(|&p| (p, id)));
        }
        self.nodes.push((api.clone(), canon.clone()));
        let pad = if self.rng.random_bool(0.2) { " " } else { "" };
        Expr {
            text: format!("{api}({pad}{text}{pad})"),
            canon: format!("{api}({canon})"),
            producers: BTreeSet::from([id]),
        }
    }
}

/// A program of `1..=max_statements` statements after the import line.
pub fn generate<R: Rng>(rng: &mut R, max_statements: usize) -> Generated {
    let statements = rng.random_range(1..=max_statements);
    let mut b = Builder { rng, env: HashMap::new(), nodes: Vec::new(), edges: BTreeSet::new() };
    let mut source = String::from("import torch\n");
    for _ in 0..statements {
        let target = *VARS.choose(b.rng).unwrap();
        let line = match b.rng.random_range(0..10) {
            0 => {
                b.env.insert(target, BTreeSet::new());
                format!("{target} = 2")
            }
            1 => match b.defined() {
                Some(v) => {
                    let p = b.env[v].clone();
                    b.env.insert(target, p);
                    format!("{target} = {v} + 1")
                }
                None => {
                    b.env.insert(target, BTreeSet::new());
                    format!("{target} = 1")
                }
            },
            2 => b.call(true).text,
            _ => {
                let e = b.call(true);
                b.env.insert(target, e.producers);
                format!("{target} = {}", e.text)
            }
        };
        source.push_str(&line);
        source.push('\n');
    }
    Generated { source, statements, nodes: b.nodes, edges: b.edges }
}

fn longest_from(node: usize, edges: &BTreeSet<(usize, usize)>) -> u32 {
    edges.iter().filter(|e| e.0 == node).map(|&(_, to)| 1 + longest_from(to, edges)).max().unwrap_or(0)
}

/// (D, U, R) by exhaustive path enumeration and a hash-set census.
pub fn brute_force(g: &Generated) -> (u32, u32, u32) {
    let depth = (0..g.nodes.len()).map(|n| longest_from(n, &g.edges)).max().unwrap_or(0);
    let unique = g.nodes.iter().map(|n| n.0.as_str()).collect::<HashSet<_>>().len() as u32;
    let mut seen = HashSet::new();
    let repeats = g.nodes.iter().filter(|n| !seen.insert((*n).clone())).count() as u32;
    (depth, unique, repeats)
}
