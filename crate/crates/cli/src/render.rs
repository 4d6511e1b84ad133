//! JSON views of library results, with letters and subsets by name.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use toeplitz_core::gtheta::{LetterSet, SubsetGraph};
use toeplitz_core::independence::{IndependenceReport, IndependenceScheme};
use toeplitz_core::odometer::OdometerHead;
use toeplitz_core::substitution::{AnalysisReport, Substitution, Verdict, Word};

pub fn names(alphabet: &[String], s: LetterSet) -> Vec<String> {
    s.iter().map(|a| alphabet[a as usize].clone()).collect()
}

pub fn rules(t: &Substitution) -> Value {
    let m: BTreeMap<&str, String> = (0..t.size())
        .map(|a| (t.name(a as u8), t.render(t.rule(a as u8))))
        .collect();
    json!(m)
}

pub fn graph(t: &Substitution, g: &SubsetGraph) -> Value {
    json!({
        "vertices": g.vertices.iter().zip(&g.extendable).map(|(&v, &ext)| json!({
            "set": t.set_name(v),
            "extendable": ext,
        })).collect::<Vec<_>>(),
        "edges": g.edges.iter().map(|e| json!({
            "source": t.set_name(g.vertices[e.source]),
            "target": t.set_name(g.vertices[e.target]),
            "label": e.label,
        })).collect::<Vec<_>>(),
    })
}

pub fn analysis(r: &AnalysisReport) -> Value {
    let base = r.pure_base.as_ref().unwrap_or(&r.substitution);
    let mut out = json!({
        "command": "analyze",
        "alphabet": r.substitution.alphabet(),
        "rules": rules(&r.substitution),
        "primitive": r.primitive,
        "aperiodic": {
            "aperiodic": r.aperiodic.aperiodic,
            "bound": r.aperiodic.bound,
            "checked_up_to": r.aperiodic.checked_up_to,
        },
        "height": r.height,
        "pure_base": r.pure_base.as_ref().map(rules),
        "coincidence": r.coincidence,
        "graph": r.graph.as_ref().map(|g| graph(base, g)),
        "cyclic_components": r.census.as_ref().map(|c| c.cyclic_components()),
        "simple_cycles": r.census.as_ref().and_then(|c| c.cycles.as_ref().map(|x| x.len())),
        "verdict": r.verdict.label(),
    });
    match &r.verdict {
        Verdict::NonTame { shared_vertex } => {
            out["shared_vertex"] = json!(names(base.alphabet(), *shared_vertex));
        }
        Verdict::Inconclusive { reason } => out["reason"] = json!(reason),
        _ => {}
    }
    out
}

pub fn independence(s: &IndependenceScheme, r: &IndependenceReport, scan: Option<&[(Word, Option<i64>)]>) -> Value {
    let alpha = s.theta_m.alphabet();
    let show = |w: &[u8]| -> Vec<&str> { w.iter().map(|&a| alpha[a as usize].as_str()).collect() };
    json!({
        "command": "independence",
        "scheme": {
            "power": s.power,
            "j0": s.j0, "j1": s.j1, "j2": s.j2, "i": s.i,
            "delta": s.delta,
            "L": s.big_l(),
            "A": names(alpha, s.a_set),
            "B": names(alpha, s.b_set),
        },
        "depth": r.depth,
        "times": r.times,
        "classes": r.classes.iter().map(|(a, b)| json!([names(alpha, *a), names(alpha, *b)])).collect::<Vec<_>>(),
        "patterns": r.patterns.iter().map(|p| json!({
            "phi": p.phi,
            "head_index": p.head_index,
            "positions": p.positions,
            "letters": p.letters.iter().map(|(v, row)| json!({
                "vertex": alpha[*v as usize],
                "letters": show(row),
            })).collect::<Vec<_>>(),
            "realized": p.realized,
        })).collect::<Vec<_>>(),
        "all_realized": r.all_realized,
        "first_failure": r.first_failure,
        "scan": scan.map(|rows| rows.iter().map(|(w, pos)| json!({
            "letters": show(w),
            "position": pos,
        })).collect::<Vec<_>>()),
    })
}

pub fn digits(h: &OdometerHead) -> Vec<String> {
    h.digits().iter().map(|d| d.to_string()).collect()
}

/// Exponents of a head of powers of 3, top digit first.
pub fn power_digits(exps: &[u32]) -> Vec<u32> {
    exps.iter().rev().copied().collect()
}
