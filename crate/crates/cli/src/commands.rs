use std::fmt::Write;
use std::fs;
use std::path::Path;

use intercausal::copositivity::ClassifyOptions;
use intercausal::model::parse_network;
use intercausal::oracle::{self, Evidence};
use intercausal::synergy2::{self, IndirectSetup, SecondZero, SynergyVerdict};
use intercausal::{qual, Network, Sign, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde_json::{json, Value};

use crate::args::{Observation, Pair};
use crate::error::CliError;
use crate::render::{self, num, vector};
use crate::{Cli, Command};

pub struct Output {
    pub human: String,
    pub json: Value,
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<Output> {
    let opts = ClassifyOptions {
        eps: cli.eps,
        samples: cli.samples,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Report { file } => report(&load(file)?, cli.eps),
        Command::Prodsyn {
            file,
            child,
            pair,
            outcome,
            version,
        } => {
            let net = load(file)?;
            let child = net.require(child)?;
            let outcome = outcome_of(&net, child, outcome)?;
            prodsyn(&net, child, resolve(&net, pair)?, outcome, *version, &opts)
        }
        Command::Intercausal { file, pair, observe } => {
            let net = load(file)?;
            let (c, outcome) = observation(&net, observe)?;
            intercausal(&net, resolve(&net, pair)?, c, outcome, &opts)
        }
        Command::Indirect {
            file,
            pair,
            effect,
            observed,
            lambda,
            deltas,
            x_prior,
            a_pair,
            b_pair,
        } => {
            if observed.is_none() && lambda.is_none() && deltas.is_none() {
                return Err(CliError::Input(
                    "indirect needs at least one of --observed, --lambda, --deltas".into(),
                ));
            }
            let net = load(file)?;
            let effect = net.require(effect)?;
            let observed = observed.as_deref().map(|d| net.require(d)).transpose()?;
            let request = IndirectRequest {
                pair: resolve(&net, pair)?,
                effect,
                observed,
                lambda: *lambda,
                deltas: deltas.map(|d| d.0),
                x_prior: x_prior.clone(),
                a_pair: (a_pair.0, a_pair.1),
                b_pair: (b_pair.0, b_pair.1),
            };
            indirect(&net, &request, &opts)
        }
        Command::Sweep {
            file,
            pair,
            prior,
            grid,
            observe,
            lambda,
            effect,
            csv,
        } => {
            let net = load(file)?;
            let (a, b) = resolve(&net, pair)?;
            let series = if let Some(root) = prior {
                let root = net.require(root)?;
                let ev = match observe {
                    Some(o) => {
                        let (v, outcome) = observation(&net, o)?;
                        Evidence::new().observe(v, outcome)
                    }
                    None => Evidence::new(),
                };
                let grid = grid.as_ref().expect("clap requires --grid").points();
                oracle::sweep_prior(&net, root, &grid, a, b, &ev)?
            } else {
                let grid = lambda.as_ref().expect("clap requires --prior or --lambda").points();
                let c = net.require(effect.as_deref().expect("clap requires --effect"))?;
                oracle::sweep_lambda(&net, c, &grid, a, b)?
            };
            sweep_output(&series, csv.as_deref())
        }
        Command::OracleCheck {
            file,
            pair,
            observe,
            priors,
        } => {
            let net = load(file)?;
            let (c, outcome) = observation(&net, observe)?;
            oracle_check(&net, resolve(&net, pair)?, c, outcome, *priors, &opts)
        }
    }
}

fn load(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn resolve(net: &Network, pair: &Pair) -> Result<(VarId, VarId)> {
    Ok((net.require(&pair.0)?, net.require(&pair.1)?))
}

fn outcome_of(net: &Network, var: VarId, outcome: &str) -> Result<usize> {
    match net.outcome(var, outcome) {
        Ok(i) => Ok(i),
        Err(e) => outcome
            .parse::<usize>()
            .ok()
            .filter(|&i| i < net.card(var))
            .ok_or_else(|| e.into()),
    }
}

fn observation(net: &Network, o: &Observation) -> Result<(VarId, usize)> {
    let var = net.require(&o.variable)?;
    Ok((var, outcome_of(net, var, &o.outcome)?))
}

fn validate(file: &Path) -> Result<Output> {
    let net = load(file)?;
    let edges: usize = net.ids().map(|v| net.parents(v).len()).sum();
    let roots = net.ids().filter(|&v| net.is_root(v)).count();
    Ok(Output {
        human: format!("ok: {} variables, {roots} roots, {edges} edges\n", net.len()),
        json: json!({ "valid": true, "variables": net.len(), "roots": roots, "edges": edges }),
    })
}

fn report(net: &Network, eps: f64) -> Result<Output> {
    let mut human = String::new();
    let mut children = Vec::new();
    for &child in net.order() {
        let parents = net.parents(child).to_vec();
        if parents.is_empty() {
            continue;
        }
        let cname = net.name(child);
        let _ = writeln!(human, "{cname}");
        let mut entries = Vec::new();
        let line = |human: &mut String, text: String, w: &qual::SignWitness| {
            let mut text = format!("  {text}");
            if w.sign == Sign::Ambiguous {
                let pos = w.positive.as_ref().map(|i| render::instance_text(net, i)).unwrap_or_default();
                let neg = w.negative.as_ref().map(|i| render::instance_text(net, i)).unwrap_or_default();
                let _ = write!(text, "    [{pos} / {neg}]");
            }
            let _ = writeln!(human, "{text}");
        };
        for &p in &parents {
            let w = qual::qualitative_influence(net, p, child, eps)?;
            line(&mut human, format!("S{}({}, {cname})", w.sign.symbol(), net.name(p)), &w);
            entries.push(json!({
                "property": "influence",
                "cause": net.name(p),
                "result": render::witness_json(net, &w, p, None),
            }));
        }
        for (i, &p) in parents.iter().enumerate() {
            for &q in &parents[i + 1..] {
                let pair = format!("{{{}, {}}}", net.name(p), net.name(q));
                let w = qual::additive_synergy(net, (p, q), child, eps)?;
                line(&mut human, format!("Y{}({pair}, {cname})", w.sign.symbol()), &w);
                entries.push(json!({
                    "property": "additive_synergy",
                    "pair": [net.name(p), net.name(q)],
                    "result": render::witness_json(net, &w, p, Some(q)),
                }));
                for (o, label) in net.variable(child).outcomes.iter().enumerate() {
                    let w = qual::product_synergy_1(net, (p, q), child, o, eps)?;
                    line(&mut human, format!("X{}({pair}, {label})", w.sign.symbol()), &w);
                    entries.push(json!({
                        "property": "product_synergy",
                        "pair": [net.name(p), net.name(q)],
                        "outcome": label,
                        "result": render::witness_json(net, &w, p, Some(q)),
                    }));
                }
            }
        }
        children.push(json!({ "child": cname, "properties": entries }));
    }
    Ok(Output {
        human,
        json: json!({ "children": children }),
    })
}

fn prodsyn(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    outcome: usize,
    version: u8,
    opts: &ClassifyOptions,
) -> Result<Output> {
    let label = &net.variable(child).outcomes[outcome];
    let names = format!("{{{}, {}}}", net.name(pair.0), net.name(pair.1));
    if version == 1 {
        let w = qual::product_synergy_1(net, pair, child, outcome, opts.eps)?;
        let mut human = format!("X{}({names}, {label})\n", w.sign.symbol());
        for (dir, inst) in [("positive", &w.positive), ("negative", &w.negative)] {
            if let Some(i) = inst {
                let _ = writeln!(human, "  most {dir} instance: {}", render::instance_text(net, i));
            }
        }
        return Ok(Output {
            human,
            json: render::witness_json(net, &w, pair.0, Some(pair.1)),
        });
    }
    let v = synergy2::product_synergy_2(net, child, pair, outcome, opts)?;
    check_undetermined(&v)?;
    Ok(Output {
        human: render::verdict_text(net, &format!("product synergy of {names} for {label}"), &v),
        json: render::verdict_json(net, &v),
    })
}

/// An ambiguous verdict is settled once witnesses exist in both directions;
/// otherwise an undetermined matrix leaves the answer open.
fn check_undetermined(v: &SynergyVerdict) -> Result<()> {
    let settled = v.witness(Sign::Positive).is_some() && v.witness(Sign::Negative).is_some();
    if v.undetermined && !settled {
        let n = v.per_pair.first().map_or(0, |p| p.matrix.entries.nrows());
        return Err(CliError::Limit(format!(
            "{n}x{n} synergy matrix is beyond the exact test and sampling found no violation"
        )));
    }
    Ok(())
}

fn intercausal(
    net: &Network,
    pair: (VarId, VarId),
    child: VarId,
    outcome: usize,
    opts: &ClassifyOptions,
) -> Result<Output> {
    let v = synergy2::observed_intercausal_verdict(net, pair, child, outcome, opts)?;
    check_undetermined(&v)?;
    let title = format!(
        "influence between {} and {} given {}={}",
        net.name(pair.0),
        net.name(pair.1),
        net.name(child),
        net.variable(child).outcomes[outcome]
    );
    Ok(Output {
        human: render::verdict_text(net, &title, &v),
        json: render::verdict_json(net, &v),
    })
}

struct IndirectRequest {
    pair: (VarId, VarId),
    effect: VarId,
    observed: Option<VarId>,
    lambda: Option<f64>,
    deltas: Option<[Sign; 4]>,
    x_prior: Option<Vec<f64>>,
    a_pair: (usize, usize),
    b_pair: (usize, usize),
}

fn indirect(net: &Network, req: &IndirectRequest, opts: &ClassifyOptions) -> Result<Output> {
    let setup = match req.deltas {
        Some([delta1, delta2, delta3, delta4]) => IndirectSetup {
            delta1,
            delta2,
            delta3,
            delta4,
        },
        None => match req.observed {
            Some(d) => synergy2::indirect_setup(net, req.effect, req.pair, d, opts)?,
            // the evidence direction follows from lambda alone
            None => IndirectSetup {
                delta1: synergy2::product_synergy_2(net, req.effect, req.pair, 0, opts)?.overall,
                delta2: synergy2::product_synergy_2(net, req.effect, req.pair, 1, opts)?.overall,
                delta3: qual::additive_synergy(net, req.pair, req.effect, opts.eps)?.sign,
                delta4: Sign::of(req.lambda.expect("checked by caller") - 1.0, 0.0),
            },
        },
    };
    let prediction = synergy2::indirect_prediction(&setup);
    let rule = serde_json::to_value(prediction.rule).unwrap();
    let mut human = format!(
        "signs: product synergy for C {}, for ~C {}, additive {}, evidence {}\n",
        setup.delta1.symbol(),
        setup.delta2.symbol(),
        setup.delta3.symbol(),
        setup.delta4.symbol()
    );
    let _ = writeln!(human, "predicted influence: {} ({})", prediction.sign, rule.as_str().unwrap_or_default());
    let mut json = json!({ "setup": setup, "prediction": prediction });

    if let Some(lambda) = req.lambda {
        let prior = match &req.x_prior {
            Some(p) => p.clone(),
            None => synergy2::compound_prior(net, req.effect, req.pair)?,
        };
        let form = synergy2::lambda_form(net, req.effect, req.pair, req.a_pair, req.b_pair, &prior, lambda)?;
        let zero = synergy2::SecondZero::from_forms(form.q_c, form.q_not_c, opts.eps);
        let _ = writeln!(human, "at lambda = {lambda} with prior over x* {}:", vector(&prior));
        let _ = writeln!(human, "  p'D(C)p  = {}", num(form.q_c));
        let _ = writeln!(human, "  p'D(~C)p = {}", num(form.q_not_c));
        let _ = writeln!(human, "  additive = {}", num(form.additive));
        let _ = writeln!(
            human,
            "  E(lambda) = {} ({})",
            num(form.value),
            Sign::of(form.value, opts.eps)
        );
        let zero_text = match zero {
            SecondZero::InRange(z) => format!("{z}"),
            SecondZero::OutOfRange(z) => format!("{z} (outside the admissible range)"),
            SecondZero::Degenerate => "none (linear in lambda)".into(),
        };
        let _ = writeln!(human, "  second zero: {zero_text}");
        json["lambda"] = json!({ "form": form, "second_zero": zero, "prior": prior });

        let binary = |v: VarId| net.variable(v).is_binary();
        if req.x_prior.is_none() && binary(req.pair.0) && binary(req.pair.1) && binary(req.effect) {
            let ev = Evidence::new().lambda(req.effect, lambda);
            let influence = oracle::intercausal_influence(net, req.pair.0, req.pair.1, &ev)?;
            let _ = writeln!(human, "  oracle influence: {influence:+.6e}");
            json["lambda"]["oracle_influence"] = json!(influence);
        }
    }
    Ok(Output { human, json })
}

fn sweep_output(series: &[(f64, f64)], csv: Option<&Path>) -> Result<Output> {
    let text = oracle::sweep_csv(series);
    let rows: Vec<Value> = series
        .iter()
        .map(|&(p, v)| json!({ "param": p, "influence": v, "sign": Sign::of(v, 0.0) }))
        .collect();
    let human = match csv {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            format!("wrote {} rows to {}\n", series.len(), path.display())
        }
        None => text,
    };
    Ok(Output {
        human,
        json: json!({ "rows": rows }),
    })
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

fn oracle_check(
    net: &Network,
    pair: (VarId, VarId),
    child: VarId,
    outcome: usize,
    priors: usize,
    opts: &ClassifyOptions,
) -> Result<Output> {
    let v = synergy2::observed_intercausal_verdict(net, pair, child, outcome, opts)?;
    check_undetermined(&v)?;
    let (a, b) = pair;
    let ev = Evidence::new().observe(child, outcome);
    let roots: Vec<VarId> = net.ids().filter(|&r| net.is_root(r) && r != child).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut observed = [0usize; 4];
    let mut inconsistent = 0;
    for _ in 0..priors {
        let mut probe = net.clone();
        for &r in &roots {
            probe = probe.with_prior(r, random_dist(&mut rng, net.card(r)))?;
        }
        let s = oracle::intercausal_dominance(&probe, a, b, &ev, 1e-12)?;
        observed[match s {
            Sign::Positive => 0,
            Sign::Negative => 1,
            Sign::Zero => 2,
            Sign::Ambiguous => 3,
        }] += 1;
        if !s.satisfies(v.overall) {
            inconsistent += 1;
        }
    }

    // witnesses can be replayed when the compound is a single root and a is a root
    let members = v.per_pair.first().map(|p| p.matrix.x_members.clone()).unwrap_or_default();
    let replayable = net.is_root(a) && members.len() == 1 && net.is_root(members[0]);
    let mut confirmed = Vec::new();
    if replayable {
        for w in &v.witnesses {
            let mut pa = vec![0.0; net.card(a)];
            pa[w.a_pair.0] = 0.5;
            pa[w.a_pair.1] = 0.5;
            let probe = net.with_prior(a, pa)?.with_prior(members[0], w.prior.clone())?;
            let shift = oracle::posterior_shift(&probe, a, b, w.b_pair, &ev)?[w.a_pair.0];
            confirmed.push(Sign::of(shift, 0.0) == Sign::of(w.value, 0.0));
        }
    }

    let mut human = format!("verdict: {}\n", v.overall);
    let _ = writeln!(
        human,
        "oracle on {priors} random priors: {} positive, {} negative, {} zero, {} mixed; {inconsistent} inconsistent with the verdict",
        observed[0], observed[1], observed[2], observed[3]
    );
    if replayable && !v.witnesses.is_empty() {
        let ok = confirmed.iter().filter(|&&c| c).count();
        let _ = writeln!(human, "witnesses confirmed by the oracle: {ok}/{}", confirmed.len());
    }
    Ok(Output {
        human,
        json: json!({
            "verdict": v.overall,
            "priors": priors,
            "oracle": { "positive": observed[0], "negative": observed[1], "zero": observed[2], "mixed": observed[3] },
            "inconsistent": inconsistent,
            "witnesses_confirmed": if replayable { json!(confirmed) } else { Value::Null },
        }),
    })
}
