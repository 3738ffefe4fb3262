//! Text and JSON renderings of analysis results.

use std::fmt::Write;

use intercausal::copositivity::{Certificate, SideVerdict};
use intercausal::qual::{Instance, SignWitness};
use intercausal::synergy2::{PairVerdict, SynergyVerdict};
use intercausal::{Network, VarId};
use serde_json::{json, Value};

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn label(net: &Network, var: VarId, idx: usize) -> &str {
    &net.variable(var).outcomes[idx]
}

fn context(net: &Network, ctx: &[(VarId, usize)]) -> Value {
    ctx.iter()
        .map(|&(v, o)| (net.name(v).to_string(), Value::from(label(net, v, o))))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

pub fn instance_json(net: &Network, inst: &Instance, a: VarId, b: Option<VarId>) -> Value {
    let pair = |v: VarId, p: (usize, usize)| json!([label(net, v, p.0), label(net, v, p.1)]);
    json!({
        "a_pair": pair(a, inst.a_pair),
        "b_pair": b.zip(inst.b_pair).map(|(b, p)| pair(b, p)),
        "context": context(net, &inst.context),
        "threshold": inst.threshold,
        "difference": inst.difference,
    })
}

pub fn witness_json(net: &Network, w: &SignWitness, a: VarId, b: Option<VarId>) -> Value {
    json!({
        "sign": w.sign,
        "positive": w.positive.as_ref().map(|i| instance_json(net, i, a, b)),
        "negative": w.negative.as_ref().map(|i| instance_json(net, i, a, b)),
    })
}

/// Short description of an instance for the text report.
pub fn instance_text(net: &Network, inst: &Instance) -> String {
    let ctx: Vec<String> = inst
        .context
        .iter()
        .map(|&(v, o)| format!("{}={}", net.name(v), label(net, v, o)))
        .collect();
    let at = if ctx.is_empty() { String::new() } else { format!(" at {}", ctx.join(", ")) };
    format!("{:+.3e}{at}", inst.difference)
}

fn side_text(name: &str, side: &SideVerdict) -> String {
    let method = serde_json::to_value(side.method).unwrap();
    let method = method.as_str().unwrap_or_default();
    let holds = match side.holds {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "undetermined",
    };
    let detail = match &side.certificate {
        Certificate::Counterexample { vector: v, value } => {
            format!(", counterexample {} with value {}", vector(v), num(*value))
        }
        Certificate::SimplexMinimum { value, .. } => format!(", simplex minimum {}", num(*value)),
        _ => String::new(),
    };
    format!("{name}: {holds} ({method}){detail}")
}

fn pair_text(net: &Network, pv: &PairVerdict, out: &mut String) {
    let m = &pv.matrix;
    let _ = writeln!(
        out,
        "  {} {} > {}, {} {} > {}: {}",
        net.name(m.a),
        label(net, m.a, m.a_pair.0),
        label(net, m.a, m.a_pair.1),
        net.name(m.b),
        label(net, m.b, m.b_pair.0),
        label(net, m.b, m.b_pair.1),
        pv.sign
    );
    let _ = writeln!(out, "    x* outcomes: {}", m.x_labels.join(" | "));
    for row in m.entries.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>24}", num(*v))).collect();
        let _ = writeln!(out, "    [{}]", cells.join(" "));
    }
    let _ = writeln!(out, "    {}", side_text("half positive", &pv.classification.positive));
    let _ = writeln!(out, "    {}", side_text("half negative", &pv.classification.negative));
}

pub fn verdict_text(net: &Network, title: &str, v: &SynergyVerdict) -> String {
    let mut out = format!("{title}: {}\n", v.overall);
    for pv in &v.per_pair {
        pair_text(net, pv, &mut out);
    }
    for w in &v.witnesses {
        let dir = if w.value > 0.0 { "positive" } else { "negative" };
        let _ = writeln!(
            out,
            "  {dir} witness: prior over x* {} gives p'Dp = {}",
            vector(&w.prior),
            num(w.value)
        );
    }
    out
}

pub fn verdict_json(net: &Network, v: &SynergyVerdict) -> Value {
    let pairs: Vec<Value> = v
        .per_pair
        .iter()
        .map(|pv| {
            let m = &pv.matrix;
            json!({
                "a_pair": [label(net, m.a, m.a_pair.0), label(net, m.a, m.a_pair.1)],
                "b_pair": [label(net, m.b, m.b_pair.0), label(net, m.b, m.b_pair.1)],
                "x_outcomes": m.x_labels,
                "matrix": m.entries.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
                "sign": pv.sign,
                "classification": pv.classification,
            })
        })
        .collect();
    let witnesses: Vec<Value> = v
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "direction": if w.value > 0.0 { "positive" } else { "negative" },
                "a_pair": w.a_pair,
                "b_pair": w.b_pair,
                "prior": w.prior,
                "value": w.value,
            })
        })
        .collect();
    json!({
        "sign": v.overall,
        "pairs": pairs,
        "witnesses": witnesses,
        "undetermined": v.undetermined,
    })
}
