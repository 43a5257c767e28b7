use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::Path;

use multipark::dirichlet::{self, Firing};
use multipark::multiparking::{self, BurnReason, BurningCertificate};
use multipark::oracle::{self, SuiteMember};
use multipark::traversal;
use multipark::{
    Avalanche, Burning, ChoiceFunction, Configuration, DirichletError, Graph, OracleError, RootSet,
    StandardChoice, Traversal, TraversalError, VertexFunction,
};
use serde_json::{json, Value};

use crate::{Family, GraphArgs, ZetaArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Verified,
    Rejected,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub human: String,
    pub json: Value,
}

impl Outcome {
    fn verified(human: String, json: Value) -> Self {
        Outcome { status: Status::Verified, human, json }
    }

    fn rejected(human: String, json: Value) -> Self {
        Outcome { status: Status::Rejected, human, json }
    }
}

/// Unreadable files, malformed payloads, or payloads that do not fit the graph.
#[derive(Debug)]
pub struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn input(e: impl fmt::Display) -> InputError {
    InputError(e.to_string())
}

type CmdResult = Result<Outcome, InputError>;

struct Target {
    graph: Graph,
    roots: RootSet,
}

fn load_graph(path: &Path) -> Result<Graph, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load(args: &GraphArgs) -> Result<Target, InputError> {
    let graph = load_graph(&args.graph)?;
    let roots = parse_roots(&graph, &args.roots)?;
    Ok(Target { graph, roots })
}

fn parse_roots(graph: &Graph, text: &str) -> Result<RootSet, InputError> {
    let roots: RootSet = text.parse().map_err(input)?;
    roots.validate(graph).map_err(input)?;
    Ok(roots)
}

fn choice(arg: &ZetaArg) -> Result<StandardChoice, InputError> {
    match arg.zeta.as_str() {
        "std" => Ok(StandardChoice),
        other => Err(InputError(format!("unknown choice function `{other}` (available: std)"))),
    }
}

fn check_shape(t: &Target, len: usize, payload_roots: BTreeSet<usize>) -> Result<(), InputError> {
    if len != t.graph.vertex_count() {
        return Err(InputError(format!(
            "payload has {len} values but the graph has {} vertices",
            t.graph.vertex_count()
        )));
    }
    if &payload_roots != t.roots.as_set() {
        return Err(InputError(format!(
            "payload roots {{{}}} differ from --roots {{{}}}",
            join(&payload_roots),
            t.roots
        )));
    }
    Ok(())
}

fn parse_function(t: &Target, text: &str) -> Result<VertexFunction, InputError> {
    let f: VertexFunction = text.parse().map_err(input)?;
    check_shape(t, f.len(), f.roots())?;
    Ok(f)
}

fn parse_configuration(t: &Target, text: &str) -> Result<Configuration, InputError> {
    let mu: Configuration = text.parse().map_err(input)?;
    check_shape(t, mu.len(), mu.roots())?;
    Ok(mu)
}

fn parse_traversal(text: &str) -> Result<Traversal, InputError> {
    text.parse().map_err(input)
}

fn parse_order(text: &str) -> Result<Vec<usize>, InputError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim_start_matches('v')
                .parse::<usize>()
                .map_err(|_| InputError(format!("bad vertex `{t}` in firing order")))
        })
        .collect()
}

fn join<'a>(items: impl IntoIterator<Item = &'a usize>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn header(t: &Target) -> Value {
    json!({ "graph": t.graph.id(), "roots": t.roots.iter().collect::<Vec<_>>() })
}

fn with_header(t: &Target, body: Value) -> Value {
    let mut out = header(t);
    if let (Value::Object(out), Value::Object(body)) = (&mut out, body) {
        out.extend(body);
    }
    out
}

/// Rejections carry a witness; everything else is an input error.
enum Failure {
    Rejected { reason: String, witness: Value },
    Input(InputError),
}

fn dirichlet_failure(e: DirichletError) -> Failure {
    match e {
        DirichletError::NotMultiparking { witness } => Failure::Rejected {
            reason: format!("not a multiparking function: witness U = {{{}}}", join(&witness)),
            witness: json!({ "subset": witness }),
        },
        DirichletError::NotDirichlet(reason) => Failure::Rejected {
            reason: format!("not a Dirichlet configuration: {reason}"),
            witness: json!({ "reason": reason }),
        },
        e @ (DirichletError::NotACertificate(_)
        | DirichletError::Inconsistent { .. }
        | DirichletError::NotReady { .. }
        | DirichletError::SingleRootFiring(_)
        | DirichletError::NotStable { .. }) => {
            let reason = e.to_string();
            Failure::Rejected { witness: json!({ "reason": reason }), reason }
        }
        other => Failure::Input(input(other)),
    }
}

fn traversal_failure(e: TraversalError) -> Failure {
    match e {
        TraversalError::Violation(v) => Failure::Rejected {
            reason: format!("not a descending traversal: {v}"),
            witness: serde_json::to_value(&v).expect("violation serializes"),
        },
        e @ (TraversalError::Stuck { .. } | TraversalError::SimultaneousReady { .. }) => {
            let reason = e.to_string();
            Failure::Rejected { witness: json!({ "reason": reason }), reason }
        }
        other => Failure::Input(input(other)),
    }
}

fn reject(t: &Target, failure: Failure) -> CmdResult {
    match failure {
        Failure::Rejected { reason, witness } => Ok(Outcome::rejected(
            format!("rejected: {reason}\n"),
            with_header(t, json!({ "verified": false, "reason": reason, "witness": witness })),
        )),
        Failure::Input(e) => Err(e),
    }
}

fn describe_burning(cert: &BurningCertificate) -> String {
    let mut out = format!("burning order: {}\n", join(&cert.order()));
    for step in &cert.steps {
        match step.reason {
            BurnReason::Root => writeln!(out, "  v{}  root", step.vertex),
            BurnReason::WellBehaved { value, out_degree } => {
                writeln!(out, "  v{}  f = {value} < out-degree {out_degree}", step.vertex)
            }
        }
        .expect("writing to a String");
    }
    out
}

fn describe_avalanche(avalanche: &Avalanche) -> String {
    let mut out = format!("start: {}\n", avalanche.start);
    for (i, step) in avalanche.steps.iter().enumerate() {
        let what = match &step.firing {
            Firing::RootBlock(block) => {
                let names: Vec<String> = block.iter().map(|r| format!("v{r}")).collect();
                format!("roots {}", names.join(","))
            }
            Firing::Vertex(v) => format!("v{v}"),
        };
        writeln!(out, "  {:>2}. fire {what:<12} -> {}", i + 1, step.result).expect("writing to a String");
    }
    out
}

pub fn check_mp(args: &GraphArgs, values: &str) -> CmdResult {
    let t = load(args)?;
    let f = parse_function(&t, values)?;
    match multiparking::burning_sequence(&t.graph, &f).map_err(input)? {
        Burning::Certificate(cert) => Ok(Outcome::verified(
            format!("multiparking function: {f}\n{}", describe_burning(&cert)),
            with_header(&t, json!({ "verified": true, "function": f, "certificate": cert })),
        )),
        Burning::Stuck { removed, remaining } => {
            let reason = format!(
                "not a multiparking function: witness U = {{{}}} has no root and no well-behaved vertex",
                join(&remaining)
            );
            Ok(Outcome::rejected(
                format!("rejected: {reason}\nburned before getting stuck: {}\n", join(&removed)),
                with_header(
                    &t,
                    json!({
                        "verified": false,
                        "function": f,
                        "reason": reason,
                        "witness": { "subset": remaining, "burned": removed },
                    }),
                ),
            ))
        }
    }
}

pub fn check_dc(args: &GraphArgs, values: &str) -> CmdResult {
    let t = load(args)?;
    let mu = parse_configuration(&t, values)?;
    match dirichlet::find_certificate(&t.graph, &mu) {
        Ok(order) => Ok(Outcome::verified(
            format!("Dirichlet configuration: {mu}\ncertificate: {}\n", join(&order)),
            with_header(&t, json!({ "verified": true, "configuration": mu, "certificate": order })),
        )),
        Err(e) => reject(&t, dirichlet_failure(e)),
    }
}

pub fn omega(args: &GraphArgs, values: &str) -> CmdResult {
    let t = load(args)?;
    let f = parse_function(&t, values)?;
    match dirichlet::omega(&t.graph, &f) {
        Ok(mu) => Ok(Outcome::verified(
            format!("{mu}\n"),
            with_header(&t, json!({ "function": f, "configuration": mu })),
        )),
        Err(e) => reject(&t, dirichlet_failure(e)),
    }
}

pub fn omega_inv(args: &GraphArgs, values: &str) -> CmdResult {
    let t = load(args)?;
    let mu = parse_configuration(&t, values)?;
    match dirichlet::omega_inv(&t.graph, &mu) {
        Ok(f) => Ok(Outcome::verified(
            format!("{f}\n"),
            with_header(&t, json!({ "configuration": mu, "function": f })),
        )),
        Err(e) => reject(&t, dirichlet_failure(e)),
    }
}

pub fn psi(args: &GraphArgs, zeta: &ZetaArg, text: &str) -> CmdResult {
    let t = load(args)?;
    let zeta = choice(zeta)?;
    let sigma = parse_traversal(text)?;
    match traversal::psi(&t.graph, &t.roots, &zeta, &sigma) {
        Ok(f) => Ok(Outcome::verified(
            format!("{f}\n"),
            with_header(&t, json!({ "traversal": sigma, "function": f })),
        )),
        Err(e) => reject(&t, traversal_failure(e)),
    }
}

pub fn phi(args: &GraphArgs, zeta: &ZetaArg, values: &str) -> CmdResult {
    let t = load(args)?;
    let zeta = choice(zeta)?;
    let f = parse_function(&t, values)?;
    match traversal::phi(&t.graph, &t.roots, &zeta, &f) {
        Ok(sigma) => Ok(Outcome::verified(
            format!("{sigma}\n"),
            with_header(&t, json!({ "function": f, "traversal": sigma })),
        )),
        Err(e) => reject(&t, traversal_failure(e)),
    }
}

pub fn validate_dt(args: &GraphArgs, zeta: &ZetaArg, text: &str) -> CmdResult {
    let t = load(args)?;
    let zeta = choice(zeta)?;
    let sigma = parse_traversal(text)?;
    match traversal::validate_traversal(&t.graph, &t.roots, &zeta, &sigma) {
        Ok(()) => Ok(Outcome::verified(
            format!("descending traversal: {sigma}\n"),
            with_header(&t, json!({ "verified": true, "traversal": sigma })),
        )),
        Err(e) => reject(&t, traversal_failure(e)),
    }
}

pub fn avalanche(args: &GraphArgs, values: &str, order: Option<&str>) -> CmdResult {
    let t = load(args)?;
    let mu = parse_configuration(&t, values)?;
    let order = match order {
        Some(text) => {
            let order = parse_order(text)?;
            let distinct: BTreeSet<usize> = order.iter().copied().collect();
            if order.len() != t.graph.vertex_count() || distinct != t.graph.vertices().collect() {
                return Err(InputError(format!("firing order {text} is not a permutation of the vertices")));
            }
            order
        }
        None => match dirichlet::find_certificate(&t.graph, &mu) {
            Ok(order) => order,
            Err(e) => return reject(&t, dirichlet_failure(e)),
        },
    };
    match dirichlet::avalanche_from_certificate(&t.graph, &mu, &order) {
        Ok(trace) => Ok(Outcome::verified(
            format!("certificate: {}\n{}", join(&order), describe_avalanche(&trace)),
            with_header(&t, json!({ "verified": true, "certificate": order, "avalanche": trace })),
        )),
        Err(e) => reject(&t, dirichlet_failure(e)),
    }
}

pub fn stabilize(args: &GraphArgs, values: &str) -> CmdResult {
    let t = load(args)?;
    let mu = parse_configuration(&t, values)?;
    let (stable, trace) = dirichlet::stabilize(&t.graph, &mu).map_err(input)?;
    Ok(Outcome::verified(
        format!("{}stable: {stable}\n", describe_avalanche(&trace)),
        with_header(&t, json!({ "start": mu, "stable": stable, "avalanche": trace })),
    ))
}

pub fn enumerate(family: Family, args: &GraphArgs, zeta: &ZetaArg) -> CmdResult {
    let t = load(args)?;
    let zeta = choice(zeta)?;
    let (name, items): (&str, Vec<String>) = match family {
        Family::Mp => (
            "mp",
            multiparking::enumerate_mp(&t.graph, &t.roots)
                .map_err(input)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::Dc => (
            "dc",
            dirichlet::enumerate_dc(&t.graph, &t.roots)
                .map_err(input)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        Family::Dt => (
            "dt",
            traversal::enumerate_dt(&t.graph, &t.roots, &zeta)
                .map_err(input)?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
    };
    let mut human = String::new();
    for item in &items {
        writeln!(human, "{item}").expect("writing to a String");
    }
    writeln!(human, "# {} {name}", items.len()).expect("writing to a String");
    Ok(Outcome::verified(
        human,
        with_header(&t, json!({ "family": name, "count": items.len(), "items": items })),
    ))
}

fn summarize(report: &oracle::CrossCheckReport) -> String {
    let c = &report.counts;
    let mut out = format!(
        "{} roots {}: mp {} dc {} fibers {} forests {} traversals {}: {}\n",
        report.graph,
        join(&report.roots),
        c.multiparking,
        c.dirichlet,
        c.fibers,
        c.forests,
        c.traversals,
        if report.passed() { "ok" } else { "FAILED" }
    );
    for check in report.failures() {
        writeln!(out, "  {} failed: {}", check.name, check.detail.as_deref().unwrap_or("")).expect("writing to a String");
    }
    out
}

pub fn crosscheck(graph: Option<&Path>, roots: Option<&str>, suite: Option<usize>, zeta: &ZetaArg) -> CmdResult {
    let zeta = choice(zeta)?;
    let members: Vec<SuiteMember> = match (graph, suite) {
        (Some(path), _) => {
            let graph = load_graph(path)?;
            let roots = parse_roots(&graph, roots.unwrap_or_default())?;
            vec![SuiteMember { graph, roots }]
        }
        (None, Some(n)) => oracle::graph_suite(n).map_err(input)?.collect(),
        (None, None) => return Err(InputError("either --graph or --suite is required".into())),
    };
    let reports = run_reports(&members, &zeta).map_err(input)?;
    let failed: Vec<&oracle::CrossCheckReport> = reports.iter().filter(|r| !r.passed()).collect();
    let status = if failed.is_empty() { Status::Verified } else { Status::Rejected };

    let (human, json) = if suite.is_some() && graph.is_none() {
        let mut human = String::new();
        for r in &failed {
            human.push_str(&summarize(r));
        }
        writeln!(human, "{} of {} graph/root pairs passed", reports.len() - failed.len(), reports.len())
            .expect("writing to a String");
        let json = json!({
            "suite": suite,
            "members": reports.len(),
            "passed": reports.len() - failed.len(),
            "failures": failed,
        });
        (human, json)
    } else {
        let report = &reports[0];
        (summarize(report), serde_json::to_value(report).expect("report serializes"))
    };
    Ok(Outcome { status, human, json })
}

fn run_reports(
    members: &[SuiteMember],
    zeta: &dyn ChoiceFunction,
) -> Result<Vec<oracle::CrossCheckReport>, OracleError> {
    members
        .iter()
        .map(|m| oracle::cross_check(&m.graph, &m.roots, zeta))
        .collect()
}
