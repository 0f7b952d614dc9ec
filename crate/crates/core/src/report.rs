//! Line-oriented result files.
//!
//! ```text
//! kpcst-result 1
//! objective 4
//! edge_cost 4
//! penalty_cost 0
//! vertices 0 1
//! edges 0
//! chosen 1
//! iteration 1 n=2 branch=PV objective=4 lambda=1 tau=S{1}
//! certificate 1 PV
//! lambda 1
//! tau S{1}
//! graph 0 1
//! tree_vertices 0 1
//! tree_edges 0
//! W 1
//! w 1
//! y {0} 2
//! y {1} 2
//! ineq pv_edge 4 8
//! end
//! ```
//!
//! All numbers are exact. With `decimal` a rounded value follows the exact
//! one after `~`; readers ignore it.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::growth::{format_tau, parse_tau};
use crate::instance::{check_tree, edge_cost, penalty_cost, Instance, Tree};
use crate::laminar::fmt_set;
use crate::numeric::Rational;
use crate::oracle::ExactResult;
use crate::solver::{check_certificate, localize_tree, Certificate, Inequality, Solution};

pub const HEADER: &str = "kpcst-result 1";

#[derive(Clone, Copy, Debug, Default)]
pub struct WriteOptions {
    pub certificates: bool,
    pub decimal: bool,
}

fn num(r: &Rational, decimal: bool) -> String {
    if decimal {
        format!("{r} ~{:.6}", r.to_f64())
    } else {
        r.to_string()
    }
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(|x| format!(" {x}")).collect()
}

pub fn write_solution(sol: &Solution, opts: &WriteOptions) -> String {
    let d = opts.decimal;
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "objective {}", num(&sol.objective, d)).unwrap();
    writeln!(out, "edge_cost {}", num(&sol.edge_cost, d)).unwrap();
    writeln!(out, "penalty_cost {}", num(&sol.penalty_cost, d)).unwrap();
    writeln!(out, "vertices{}", list(&sol.tree.vertices)).unwrap();
    writeln!(out, "edges{}", list(&sol.tree.edges)).unwrap();
    writeln!(out, "chosen {}", sol.iterations[sol.chosen].iteration).unwrap();
    for r in &sol.iterations {
        write!(out, "iteration {} n={} branch={} objective={}", r.iteration, r.n, r.branch, r.objective).unwrap();
        if let (Some(l), Some(t)) = (&r.lambda, &r.tau) {
            write!(out, " lambda={l} tau={}", format_tau(t)).unwrap();
        }
        writeln!(out).unwrap();
    }
    if opts.certificates {
        for c in &sol.certificates {
            write_certificate(&mut out, c);
        }
    }
    out
}

fn write_certificate(out: &mut String, c: &Certificate) {
    writeln!(out, "certificate {} {}", c.iteration, c.branch).unwrap();
    writeln!(out, "lambda {}", c.lambda).unwrap();
    let tau = if c.tau.is_empty() { "-".to_string() } else { format_tau(&c.tau) };
    writeln!(out, "tau {tau}").unwrap();
    writeln!(out, "graph{}", list(&c.graph)).unwrap();
    writeln!(out, "tree_vertices{}", list(&c.tree.vertices)).unwrap();
    writeln!(out, "tree_edges{}", list(&c.tree.edges)).unwrap();
    if let (Some(ws), Some(w)) = (&c.w_set, c.w) {
        writeln!(out, "W{}", list(ws)).unwrap();
        writeln!(out, "w {w}").unwrap();
    }
    for (vs, y) in &c.y {
        writeln!(out, "y {} {y}", fmt_set(vs.iter().copied())).unwrap();
    }
    for i in &c.inequalities {
        writeln!(out, "ineq {} {} {}", i.name, i.lhs, i.rhs).unwrap();
    }
    writeln!(out, "end").unwrap();
}

/// `opt <r>` followed by the witness in original ids.
pub fn write_exact(inst: &Instance, res: &ExactResult, decimal: bool) -> String {
    let t = inst.lift_tree(&res.tree);
    let mut out = String::new();
    writeln!(out, "opt {}", num(&res.opt, decimal)).unwrap();
    writeln!(out, "vertices{}", list(&t.vertices)).unwrap();
    writeln!(out, "edges{}", list(&t.edges)).unwrap();
    writeln!(out, "examined {}", res.examined).unwrap();
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultFile {
    pub objective: Option<Rational>,
    pub edge_cost: Option<Rational>,
    pub penalty_cost: Option<Rational>,
    pub tree: Tree,
    pub certificates: Vec<Certificate>,
}

fn ids(toks: &[&str], line: usize) -> Result<Vec<usize>> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| Error::Parse { line, msg: format!("bad id `{t}`") }))
        .collect()
}

fn rat(tok: Option<&&str>, line: usize) -> Result<Rational> {
    let t = tok.ok_or_else(|| Error::Parse { line, msg: "missing number".into() })?;
    t.parse().map_err(|_| Error::Parse { line, msg: format!("bad number `{t}`") })
}

pub fn parse_result(text: &str) -> Result<ResultFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(Error::Parse { line: 1, msg: format!("expected `{HEADER}`") }),
    }
    let mut out = ResultFile::default();
    let mut cert: Option<Certificate> = None;
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse { line: ln, msg: msg.to_string() };
        if let Some(c) = cert.as_mut() {
            match toks[0] {
                "lambda" => c.lambda = rat(toks.get(1), ln)?,
                "tau" => c.tau = if toks.get(1) == Some(&"-") { vec![] } else { parse_tau(&toks[1..].join(" "))? },
                "graph" => c.graph = ids(&toks[1..], ln)?,
                "tree_vertices" => c.tree.vertices = ids(&toks[1..], ln)?,
                "tree_edges" => c.tree.edges = ids(&toks[1..], ln)?,
                "W" => c.w_set = Some(ids(&toks[1..], ln)?),
                "w" => c.w = Some(ids(&toks[1..2], ln)?[0]),
                "y" => {
                    let close = line.find('}').ok_or_else(|| bad("bad y line"))?;
                    let open = line.find('{').ok_or_else(|| bad("bad y line"))?;
                    let vs: Vec<&str> = line[open + 1..close].split_whitespace().collect();
                    let y = rat(line[close + 1..].split_whitespace().collect::<Vec<_>>().first(), ln)?;
                    c.y.push((ids(&vs, ln)?, y));
                }
                "ineq" if toks.len() == 4 => {
                    c.inequalities.push(Inequality { name: toks[1].into(), lhs: rat(toks.get(2), ln)?, rhs: rat(toks.get(3), ln)? })
                }
                "end" => out.certificates.push(cert.take().unwrap()),
                _ => return Err(bad("unexpected line inside a certificate")),
            }
            continue;
        }
        match toks[0] {
            "objective" => out.objective = Some(rat(toks.get(1), ln)?),
            "edge_cost" => out.edge_cost = Some(rat(toks.get(1), ln)?),
            "penalty_cost" => out.penalty_cost = Some(rat(toks.get(1), ln)?),
            "vertices" => out.tree.vertices = ids(&toks[1..], ln)?,
            "edges" => out.tree.edges = ids(&toks[1..], ln)?,
            "chosen" | "iteration" => {}
            "certificate" if toks.len() == 3 => {
                cert = Some(Certificate {
                    iteration: ids(&toks[1..2], ln)?[0],
                    branch: toks[2].parse()?,
                    lambda: Rational::zero(),
                    tau: vec![],
                    graph: vec![],
                    tree: Tree::default(),
                    w_set: None,
                    w: None,
                    y: vec![],
                    inequalities: vec![],
                })
            }
            _ => return Err(bad("unexpected line")),
        }
    }
    if cert.is_some() {
        return Err(Error::Parse { line: 0, msg: "unterminated certificate".into() });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub spans: usize,
    pub certificates: usize,
}

/// Re-verifies a result file against its instance: tree validity, the three
/// cost lines, coverage of `k`, and every certificate.
pub fn check_result(inst: &Instance, text: &str) -> Result<CheckReport> {
    let r = parse_result(text)?;
    let mismatch = |what: &str, got: &Rational, want: &Rational| Error::Mismatch {
        what: what.to_string(),
        stored: got.to_string(),
        actual: want.to_string(),
    };
    let tree = localize_tree(inst, &r.tree)?;
    check_tree(inst, &tree)?;
    if tree.vertices.len() < inst.k() {
        return Err(Error::Precondition(format!("tree spans {} < k vertices", tree.vertices.len())));
    }
    let ec = edge_cost(inst, &tree);
    let pc = penalty_cost(inst, &tree);
    let obj = &ec + &pc;
    for (what, stored, actual) in [("objective", &r.objective, &obj), ("edge_cost", &r.edge_cost, &ec), ("penalty_cost", &r.penalty_cost, &pc)] {
        match stored {
            Some(s) if s == actual => {}
            Some(s) => return Err(mismatch(what, s, actual)),
            None => return Err(Error::Parse { line: 0, msg: format!("missing {what}") }),
        }
    }
    for c in &r.certificates {
        check_certificate(inst, c)?;
    }
    Ok(CheckReport { spans: tree.vertices.len(), certificates: r.certificates.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::solver::solve;

    const EX_A: &str = "kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1 4\n";

    #[test]
    fn roundtrip_and_check() {
        let inst = parse_instance(EX_A).unwrap();
        let sol = solve(&inst).unwrap();
        let text = write_solution(&sol, &WriteOptions { certificates: true, decimal: false });
        assert!(text.contains("\nobjective 4\n"));
        let parsed = parse_result(&text).unwrap();
        assert_eq!(parsed.certificates, sol.certificates);
        assert_eq!(parsed.tree, sol.tree);
        assert_eq!(check_result(&inst, &text).unwrap(), CheckReport { spans: 2, certificates: 1 });

        let dec = write_solution(&sol, &WriteOptions { certificates: false, decimal: true });
        assert!(dec.contains("objective 4 ~4.000000"));
        check_result(&inst, &dec).unwrap();
    }

    #[test]
    fn tampering_is_caught() {
        let inst = parse_instance(EX_A).unwrap();
        let text = write_solution(&solve(&inst).unwrap(), &WriteOptions { certificates: true, decimal: false });
        for (from, to) in [("objective 4", "objective 3"), ("y {1} 2", "y {1} 3"), ("edges 0\n", "edges\n"), ("ineq pv_combined 4 8", "ineq pv_combined 5 8")] {
            let bad = text.replacen(from, to, 1);
            assert_ne!(bad, text, "{from}");
            assert!(check_result(&inst, &bad).is_err(), "{from}");
        }
        assert!(parse_result("nonsense").is_err());
    }
}
