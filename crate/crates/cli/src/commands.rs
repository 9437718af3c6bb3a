use std::fmt::Write as _;
use std::path::Path;

use osx_core::asym::{check_admissible, check_forwards_cauchy, equivalent, CLimit, Certificate, LipschitzSpace};
use osx_core::completion::{
    approximate_from_interior, candidates_ext, collapse_zero, distance_ext, pinch_sequence, translation_length_ext,
    CompletionPoint, GoGView,
};
use osx_core::error::{Error, Result};
use osx_core::fixtures::{named_completion_points, rose_q};
use osx_core::fs_complex::{axes_vector, face, face_distance, strictness_family, Strictness};
use osx_core::marked_graph::GraphJson;
use osx_core::metric::{distance, sym_distance, DistanceResult};
use osx_core::rational::{format_q, parse_q, parse_q_list, Q};
use osx_core::suite::{self, Sizes, SuiteConfig, CRITERIA};
use osx_core::words::Word;
use serde_json::{json, Value};

use crate::io::{
    edge_set, factor_value, graph_text, graph_value, load_blow_up, load_graph, load_list, load_point, log_value, read_text,
};
use crate::{Cli, Command, Global, SeqAction, SeqKind};

pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Distance { x, y, sym } => {
            let (x, y) = (load_graph(g, x)?, load_graph(g, y)?);
            if *sym {
                let f = sym_distance(&x, &y)?;
                Ok(Output::new(format!("factor {f} (log {})", f.log()), json!({ "factor": factor_value(&f), "log": log_value(f.log()) })))
            } else {
                Ok(distance_output(&distance(&x, &y)?))
            }
        }
        Command::Cdistance { s, t } => Ok(distance_output(&distance_ext(&load_point(g, s)?, &load_point(g, t)?)?)),
        Command::Length { x, word } => {
            let x = load_blow_up(g, x)?;
            let w = Word::parse_in_rank(word, x.rank())?;
            let l = format_q(&x.translation_length(&w));
            Ok(Output::new(l.clone(), Value::String(l)))
        }
        Command::Candidates { x } => candidates(&load_point(g, x)?),
        Command::Collapse { x, edges } => {
            let t = load_point(g, x)?;
            match edges {
                Some(list) => {
                    let forest = edge_set(t.graph(), list)?;
                    let y = t.graph().collapse_forest(&forest)?;
                    Ok(Output::new(graph_text(&y), graph_value(&y)))
                }
                None => Ok(view_output(&collapse_zero(&t))),
            }
        }
        Command::Face { x, keep } => {
            let t = load_point(g, x)?;
            let f = face(&t, &edge_set(t.graph(), keep)?)?;
            Ok(Output::new(graph_text(f.graph()), graph_value(f.graph())))
        }
        Command::Facedist { x, subgraph } => {
            let x = load_graph(g, x)?;
            let d = format_q(&face_distance(&x, &edge_set(&x, subgraph)?)?);
            Ok(Output::new(d.clone(), Value::String(d)))
        }
        Command::Axes { t, words } => axes(&load_point(g, t)?, &read_text(words)?),
        Command::Pinch { x, edges, schedule } => {
            let x = load_graph(g, x)?;
            let seq = pinch_sequence(&x, &edge_set(&x, edges)?, &parse_q_list(schedule)?)?;
            let values: Vec<Value> = seq.iter().map(graph_value).collect();
            Ok(Output::new(serde_json::to_string_pretty(&values).expect("plain data serializes"), Value::Array(values)))
        }
        Command::Approx { t, eps } => {
            let y = approximate_from_interior(&load_point(g, t)?, &parse_q(eps)?)?;
            Ok(Output::new(graph_text(&y), graph_value(&y)))
        }
        Command::Seq { action: SeqAction::Check { list, kind, schedule, other } } => {
            seq_check(g, list, *kind, &parse_q_list(schedule)?, other.as_deref())
        }
        Command::Strictness { i, m } => strictness(&strictness_family(*i, *m)?),
        Command::Verify { suite } => verify(g, suite),
        Command::Fixtures { out } => fixtures(g, out),
    }
}

fn distance_output(d: &DistanceResult) -> Output {
    let witness = d.witness.as_ref().map(|w| w.word.to_string());
    let mut text = format!("factor {} (log {})", d.factor, d.factor.log());
    if let Some(w) = &d.witness {
        let _ = write!(text, " witness {} ({})", w.word, w.kind);
    }
    Output::new(text, json!({ "factor": factor_value(&d.factor), "log": log_value(d.factor.log()), "witness": witness }))
}

fn candidates(t: &CompletionPoint) -> Result<Output> {
    let x = t.graph();
    let list: Vec<Value> = candidates_ext(t)
        .iter()
        .map(|c| {
            let w = c.word.to_word();
            json!({
                "kind": c.kind.to_string(),
                "word": c.word.to_string(),
                "path": x.graph().format_path(&c.path),
                "length": format_q(&translation_length_ext(t, &w)),
            })
        })
        .collect();
    let text = list
        .iter()
        .map(|c| format!("{:<22} {:<12} {:<8} {}", c["kind"].as_str().unwrap(), c["word"].as_str().unwrap(), c["length"].as_str().unwrap(), c["path"].as_str().unwrap()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::new(text, Value::Array(list)))
}

fn view_output(view: &GoGView) -> Output {
    let q = &view.quotient;
    let vertices: Vec<Value> = q
        .vertices
        .iter()
        .zip(&view.groups)
        .map(|(name, group)| json!({ "id": name, "group": group.iter().map(|w| w.to_string()).collect::<Vec<_>>() }))
        .collect();
    let edges: Vec<Value> = q
        .edges
        .iter()
        .map(|e| json!({ "id": e.id, "from": q.vertices[e.from], "to": q.vertices[e.to], "length": format_q(&e.length) }))
        .collect();
    Output::new(view.to_string(), json!({ "vertices": vertices, "edges": edges }))
}

fn axes(t: &CompletionPoint, text: &str) -> Result<Output> {
    let words = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Word::parse_in_rank(l, t.rank()))
        .collect::<Result<Vec<_>>>()?;
    let v = axes_vector(t, &words);
    let values: Vec<String> = v.values.iter().map(format_q).collect();
    let text = words.iter().zip(&values).map(|(w, l)| format!("{w} {l}")).collect::<Vec<_>>().join("\n");
    let words: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    Ok(Output::new(text, json!({ "words": words, "lengths": values })))
}

fn certificate_value(c: &Certificate) -> Value {
    json!({
        "verdict": c.verdict.to_string(),
        "horizon": c.horizon,
        "reserve": c.reserve,
        "records": c.records.iter().map(|r| json!({ "eps": format_q(&r.eps), "n": r.n, "k": r.k })).collect::<Vec<_>>(),
        "witness": c.witness.as_ref().map(|v| json!({ "eps": format_q(&v.eps), "i": v.i, "j": v.j })),
    })
}

fn certificate_text(c: &Certificate) -> String {
    let mut s = format!("{} (horizon {}, reserve {})", c.verdict, c.horizon, c.reserve);
    for r in &c.records {
        let _ = write!(s, "\n  eps {:<8} N {}", format_q(&r.eps), r.n);
    }
    if let Some(v) = &c.witness {
        let _ = write!(s, "\n  witness: d(x_{}, x_{}) >= {}", v.i, v.j, format_q(&v.eps));
    }
    s
}

fn climit_value(c: &CLimit) -> Value {
    match c {
        CLimit::Diverges { n, value } => json!({ "diverges_at": n, "value": log_value(*value) }),
        CLimit::Estimate { value, inner_spread, outer_spread, .. } => {
            json!({ "value": log_value(*value), "inner_spread": log_value(*inner_spread), "outer_spread": log_value(*outer_spread) })
        }
    }
}

fn seq_check(g: &Global, list: &Path, kind: SeqKind, eps: &[Q], other: Option<&Path>) -> Result<Output> {
    let points = load_list(g, list)?;
    match kind {
        SeqKind::Cauchy | SeqKind::Admissible => {
            let cert = if kind == SeqKind::Cauchy {
                check_forwards_cauchy(&LipschitzSpace, &points, eps)?
            } else {
                check_admissible(&LipschitzSpace, &points, eps)?
            };
            Ok(Output::new(certificate_text(&cert), certificate_value(&cert)))
        }
        SeqKind::Equiv => {
            let other = other.ok_or_else(|| Error::Precondition("equiv needs --other".into()))?;
            let e = equivalent(&LipschitzSpace, &points, &load_list(g, other)?, eps)?;
            let text = format!(
                "{} (threshold {}): forward {:?}, backward {:?}; interlace {}",
                e.verdict,
                format_q(&e.threshold),
                e.forward.value(),
                e.backward.value(),
                e.interlace.verdict
            );
            let value = json!({
                "verdict": e.verdict.to_string(),
                "threshold": format_q(&e.threshold),
                "forward": climit_value(&e.forward),
                "backward": climit_value(&e.backward),
                "interlace": certificate_value(&e.interlace),
                "consistent": e.consistent(),
            });
            Ok(Output::new(text, value))
        }
    }
}

fn strictness(f: &Strictness) -> Result<Output> {
    let fwd = distance_ext(&f.y, &f.x)?.factor;
    let back = distance_ext(&f.x, &f.y)?.factor;
    let probes = Strictness::probes();
    let (ax, ay) = (axes_vector(&f.x, &probes), axes_vector(&f.y, &probes));
    let gap = format_q(&ay.sup_distance(&ax));
    let fmt = |v: &[Q]| v.iter().map(format_q).collect::<Vec<_>>();
    let text = format!(
        "i {} m {}: s {} t {}\naxes x {:?} y {:?}, sup difference {gap}\nfactor y->x {fwd}, x->y {back}",
        f.i,
        f.m,
        format_q(&f.s),
        format_q(&f.t),
        fmt(&ax.values),
        fmt(&ay.values)
    );
    let value = json!({
        "i": f.i,
        "m": f.m,
        "s": format_q(&f.s),
        "t": format_q(&f.t),
        "axes_x": fmt(&ax.values),
        "axes_y": fmt(&ay.values),
        "sup_difference": gap,
        "factor_y_x": factor_value(&fwd),
        "factor_x_y": factor_value(&back),
        "y": GraphJson::from_marked(f.y.graph()),
    });
    Ok(Output::new(text, value))
}

fn verify(g: &Global, which: &str) -> Result<Output> {
    let (sizes, ids): (Sizes, Vec<u32>) = match which {
        "all" => (Sizes::full(), CRITERIA.iter().map(|c| c.0).collect()),
        "quick" => (Sizes::quick(), CRITERIA.iter().map(|c| c.0).collect()),
        list => {
            let ids = list
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("unknown suite {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            (Sizes::full(), ids)
        }
    };
    let cfg = SuiteConfig { threads: g.threads.max(1), ..SuiteConfig::new(g.seed, sizes) };
    let mut results = Vec::new();
    for id in ids {
        results.push(suite::run(id, &cfg).ok_or_else(|| Error::Parse(format!("no criterion {id}")))?);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let mut text: Vec<String> = results.iter().map(|r| r.to_string()).collect();
    text.push(format!("{passed}/{} criteria pass", results.len()));
    let value = json!({
        "seed": g.seed,
        "passed": passed,
        "total": results.len(),
        "criteria": results
            .iter()
            .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "passes": r.passes, "cases": r.cases, "detail": r.detail }))
            .collect::<Vec<_>>(),
    });
    Ok(Output::new(text.join("\n"), value))
}

fn fixtures(g: &Global, out: &Path) -> Result<Output> {
    let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", out.display()));
    std::fs::create_dir_all(out).map_err(io)?;
    let mut points: Vec<(String, CompletionPoint)> =
        named_completion_points().into_iter().map(|(n, p)| (n.to_string(), p)).collect();
    points.push(("rose2".into(), CompletionPoint::interior(rose_q(&[(3, 4), (1, 4)]))));
    let mut written = Vec::new();
    for (name, p) in points.iter().filter(|(_, p)| g.rank.is_none_or(|r| r as usize == p.rank())) {
        let file = format!("{name}.json");
        std::fs::write(out.join(&file), graph_text(p.graph()) + "\n").map_err(io)?;
        written.push(file);
    }
    std::fs::write(out.join("words.txt"), "a\nb\nab\naB\n").map_err(io)?;
    written.push("words.txt".into());
    Ok(Output::new(written.join("\n"), json!({ "dir": out.display().to_string(), "files": written })))
}
