use std::fmt::Write as _;
use std::path::PathBuf;

use pbisim::bisim::{are_bisimilar, coarsest_bisimulation, quotient, BisimError};
use pbisim::epsilon::{
    epsilon_bisim_exact, epsilon_bisim_search, EpsilonError, EpsilonResult, ExactOptions,
    SearchOptions,
};
use pbisim::galois::{
    check_abstraction_basis, check_galois, check_simulation, largest_simulation, GaloisError,
    GaloisSpec, GaloisViolation, KripkeStructure, Relation, Subset,
};
use pbisim::gen::{gen_planted, gen_random_pts, perturb};
use pbisim::io::{
    default_state_names, parse_galois, parse_kripke, parse_partition, parse_pts, parse_relation,
    print_partition, print_pts, KripkeFile, PtsFile,
};
use pbisim::linalg::LumpViolation;
use pbisim::{Classification, Partition};
use serde_json::{json, Value};

use crate::args::{Command, EpsilonArgs, GenCommand};
use crate::report::Inputs;
use crate::CliError;

/// Text written to standard output, or to a file when `output` is set.
pub struct Payload {
    pub text: String,
    pub output: Option<PathBuf>,
}

pub struct Outcome {
    pub holds: bool,
    pub parameters: Value,
    pub result: Value,
    pub summary: String,
    pub payload: Option<Payload>,
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Bisim { .. } => "bisim",
        Command::Quotient { .. } => "quotient",
        Command::Epsilon(_) => "epsilon",
        Command::SimCheck { .. } => "sim-check",
        Command::GaloisCheck { .. } => "galois-check",
        Command::Gen(GenCommand::Random { .. }) => "gen random",
        Command::Gen(GenCommand::Planted { .. }) => "gen planted",
        Command::Gen(GenCommand::Perturb { .. }) => "gen perturb",
    }
}

pub fn run(cmd: &Command, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    match cmd {
        Command::Bisim { p1, p2, tol } => bisim(inputs, p1, p2, *tol),
        Command::Quotient {
            system,
            partition,
            tol,
            output,
            ..
        } => quotient_cmd(inputs, system, partition.as_deref(), *tol, output.clone()),
        Command::Epsilon(args) => epsilon(inputs, args),
        Command::SimCheck {
            concrete,
            abs,
            relation,
            ..
        } => sim_check(inputs, concrete, abs, relation.as_deref()),
        Command::GaloisCheck {
            galois,
            against,
            cap,
        } => galois_check(inputs, galois, against.as_deref(), *cap),
        Command::Gen(g) => gen(inputs, g),
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "tolerance must be finite and non-negative, got {tol}"
        )))
    }
}

fn load_pts(inputs: &mut Inputs, path: &str, tol: f64) -> Result<PtsFile, CliError> {
    let input = inputs.load(path)?;
    parse_pts(&input.text, tol).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn load_kripke(inputs: &mut Inputs, path: &str) -> Result<KripkeFile, CliError> {
    let input = inputs.load(path)?;
    parse_kripke(&input.text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn pick(names: &[String], states: impl IntoIterator<Item = usize>) -> Vec<&str> {
    states.into_iter().map(|s| names[s].as_str()).collect()
}

fn blocks_of(c: &Classification, names: &[String]) -> Vec<Vec<String>> {
    c.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|s| names[s].clone()).collect())
        .collect()
}

fn describe_violation(v: &LumpViolation, names: &[String], c: &Classification) -> String {
    let (p, q) = v.states;
    let block = |b: usize| {
        format!(
            "{{{}}}",
            pick(names, c.blocks()[b].iter().copied()).join(" ")
        )
    };
    match v.target {
        Some(t) => format!(
            "action `{}`: `{}` and `{}` send different mass into {}",
            v.action,
            names[p],
            names[q],
            block(t)
        ),
        None => format!(
            "action `{}`: `{}` and `{}` differ in whether it is enabled",
            v.action, names[p], names[q]
        ),
    }
}

fn bisim(inputs: &mut Inputs, p1: &str, p2: &str, tol: f64) -> Result<Outcome, CliError> {
    check_tol(tol)?;
    let a = load_pts(inputs, p1, tol)?;
    let b = load_pts(inputs, p2, tol)?;
    let out = are_bisimilar(&a.system, &b.system, tol);
    let off = out.offset;
    let blocks: Vec<Value> = out
        .union_partition
        .blocks()
        .iter()
        .map(|blk| {
            let left = pick(&a.state_names, blk.iter().copied().filter(|&s| s < off));
            let right = pick(
                &b.state_names,
                blk.iter().copied().filter(|&s| s >= off).map(|s| s - off),
            );
            json!({ "first": left, "second": right })
        })
        .collect();
    let mut summary = format!("bisimilar: {}\n", if out.bisimilar { "yes" } else { "no" });
    for blk in &blocks {
        let side = |k: &str| {
            blk[k]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(summary, "  {{{}}} | {{{}}}", side("first"), side("second")).unwrap();
    }
    let witness = out.witness.as_ref().map(|w| {
        json!({
            "classes": w.m,
            "first": blocks_of(&w.k1, &a.state_names),
            "second": blocks_of(&w.k2, &b.state_names),
            "quotient": print_pts(&w.quotient, &default_state_names(w.m)),
        })
    });
    Ok(Outcome {
        holds: out.bisimilar,
        parameters: json!({ "tol": tol }),
        result: json!({
            "bisimilar": out.bisimilar,
            "union_blocks": blocks,
            "witness": witness,
        }),
        summary,
        payload: None,
    })
}

fn quotient_cmd(
    inputs: &mut Inputs,
    system: &str,
    partition: Option<&str>,
    tol: f64,
    output: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    check_tol(tol)?;
    let p = load_pts(inputs, system, tol)?;
    let names = &p.state_names;
    let part: Partition = match partition {
        Some(path) => {
            let input = inputs.load(path)?;
            parse_partition(&input.text, names)
                .map_err(|e| CliError::Input(format!("{path}: {e}")))?
        }
        None => coarsest_bisimulation(&p.system, tol),
    };
    let c = part.to_classification();
    let parameters = json!({
        "tol": tol,
        "partition": if partition.is_some() { "file" } else { "coarsest" },
    });
    match quotient(&p.system, &c, tol) {
        Ok(q) => {
            // Each class is named after its first member.
            let qnames: Vec<String> = part.blocks().iter().map(|b| names[b[0]].clone()).collect();
            let text = print_pts(&q, &qnames);
            Ok(Outcome {
                holds: true,
                parameters,
                result: json!({
                    "lumpable": true,
                    "classes": blocks_of(&c, names),
                    "quotient": text,
                }),
                summary: format!("quotient with {} classes\n", q.n()),
                payload: Some(Payload { text, output }),
            })
        }
        Err(BisimError::NotLumpable(v)) => {
            let why = describe_violation(&v, names, &c);
            Ok(Outcome {
                holds: false,
                parameters,
                result: json!({ "lumpable": false, "violation": why }),
                summary: format!("partition is not lumpable: {why}\n"),
                payload: None,
            })
        }
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn epsilon(inputs: &mut Inputs, args: &EpsilonArgs) -> Result<Outcome, CliError> {
    check_tol(args.tol)?;
    let a = load_pts(inputs, &args.p1, args.tol)?;
    let b = load_pts(inputs, &args.p2, args.tol)?;
    let (result, parameters): (Result<EpsilonResult, EpsilonError>, Value) = match args.budget {
        Some(budget) => {
            let mut opts = SearchOptions {
                norm: args.norm,
                aggregation: args.aggregation,
                budget,
                ..Default::default()
            };
            if let Some(seed) = args.seed {
                opts.seed = seed;
            }
            if let Some(patience) = args.patience {
                opts.patience = patience;
            }
            let params = json!({
                "method": "local-search",
                "norm": args.norm,
                "aggregation": args.aggregation,
                "budget": opts.budget,
                "seed": opts.seed,
                "patience": opts.patience,
                "tol": args.tol,
            });
            (
                Ok(epsilon_bisim_search(&a.system, &b.system, &opts)),
                params,
            )
        }
        None => {
            let opts = ExactOptions {
                norm: args.norm,
                aggregation: args.aggregation,
                budget: args.max_pairs,
                jobs: args.jobs,
                lumpable_only: args.lumpable_only.then_some(args.tol),
            };
            // `jobs` is left out on purpose: it never changes the result.
            let params = json!({
                "method": "exhaustive",
                "norm": args.norm,
                "aggregation": args.aggregation,
                "max_pairs": args.max_pairs,
                "lumpable_only": args.lumpable_only,
                "tol": args.tol,
            });
            (epsilon_bisim_exact(&a.system, &b.system, &opts), params)
        }
    };
    match result {
        Ok(r) => {
            let summary = format!(
                "epsilon: {} (m = {}, {}, {})\n",
                r.epsilon,
                r.k1.m(),
                if r.optimal { "exact" } else { "upper bound" },
                r.norm.as_str()
            );
            Ok(Outcome {
                holds: true,
                parameters,
                result: json!({
                    "epsilon": r.epsilon,
                    "classes": r.k1.m(),
                    "first": blocks_of(&r.k1, &a.state_names),
                    "second": blocks_of(&r.k2, &b.state_names),
                    "method": r.method,
                    "optimal": r.optimal,
                }),
                summary,
                payload: None,
            })
        }
        Err(EpsilonError::NoAdmissiblePair) => Ok(Outcome {
            holds: false,
            parameters,
            result: json!({ "epsilon": null, "reason": EpsilonError::NoAdmissiblePair.to_string() }),
            summary: format!("epsilon: undefined, {}\n", EpsilonError::NoAdmissiblePair),
            payload: None,
        }),
        Err(e @ EpsilonError::BudgetExceeded { .. }) => Err(CliError::Budget(format!(
            "{e}; raise --max-pairs or use --budget for local search"
        ))),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn relation_json(r: &Relation, cn: &[String], an: &[String]) -> Vec<[String; 2]> {
    r.iter()
        .map(|(c, a)| [cn[c].clone(), an[a].clone()])
        .collect()
}

fn sim_check(
    inputs: &mut Inputs,
    concrete: &str,
    abs: &str,
    relation: Option<&str>,
) -> Result<Outcome, CliError> {
    let c = load_kripke(inputs, concrete)?;
    let a = load_kripke(inputs, abs)?;
    let marked = json!({
        "concrete": pick(&c.names, c.structure.marked().iter().copied()),
        "abstract": pick(&a.names, a.structure.marked().iter().copied()),
    });
    match relation {
        Some(path) => {
            let input = inputs.load(path)?;
            let r = parse_relation(&input.text, &c.names, &a.names)
                .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            let cex = check_simulation(&c.structure, &a.structure, &r)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let (summary, cex_json) = match cex {
                None => ("simulation: yes\n".to_string(), Value::Null),
                Some(x) => {
                    let (cc, aa, succ) =
                        (&c.names[x.concrete], &a.names[x.abs], &c.names[x.successor]);
                    (
                        format!(
                            "simulation: no\n  `{cc}` is related to `{aa}` and steps to `{succ}`, \
                             but no step of `{aa}` reaches a state related to `{succ}`\n"
                        ),
                        json!({ "concrete": cc, "abstract": aa, "successor": succ }),
                    )
                }
            };
            Ok(Outcome {
                holds: cex.is_none(),
                parameters: json!({ "mode": "check" }),
                result: json!({
                    "simulation": cex.is_none(),
                    "counterexample": cex_json,
                    "marked": marked,
                }),
                summary,
                payload: None,
            })
        }
        None => {
            let r = largest_simulation(&c.structure, &a.structure);
            let unsimulated: Vec<&str> = (0..c.structure.n())
                .filter(|&x| !(0..a.structure.n()).any(|y| r.contains(x, y)))
                .map(|x| c.names[x].as_str())
                .collect();
            let mut summary = format!("largest simulation: {} pairs\n", r.len());
            for (x, y) in r.iter() {
                writeln!(summary, "  {} {}", c.names[x], a.names[y]).unwrap();
            }
            if !unsimulated.is_empty() {
                writeln!(summary, "not simulated: {}", unsimulated.join(" ")).unwrap();
            }
            Ok(Outcome {
                holds: unsimulated.is_empty(),
                parameters: json!({ "mode": "largest" }),
                result: json!({
                    "relation": relation_json(&r, &c.names, &a.names),
                    "unsimulated": unsimulated,
                    "marked": marked,
                }),
                summary,
                payload: None,
            })
        }
    }
}

fn subset_names(s: Subset, names: &[String]) -> String {
    let members = pick(names, (0..names.len()).filter(|&c| s & (1 << c) != 0));
    format!("{{{}}}", members.join(" "))
}

fn describe_galois(g: &GaloisSpec, v: &GaloisViolation, cn: &[String], en: &[String]) -> String {
    match *v {
        GaloisViolation::AlphaNotMonotone { smaller, larger } => format!(
            "alpha is not monotone: {} is contained in {} but alpha maps them to `{}` and `{}`",
            subset_names(smaller, cn),
            subset_names(larger, cn),
            en[g.alpha(smaller)],
            en[g.alpha(larger)]
        ),
        GaloisViolation::GammaNotMonotone { lower, upper } => format!(
            "gamma is not monotone: `{}` <= `{}` but gamma({}) is not contained in gamma({})",
            en[lower], en[upper], en[lower], en[upper]
        ),
        GaloisViolation::NotExtensive { subset } => format!(
            "not extensive: {} is not contained in gamma(alpha({}))",
            subset_names(subset, cn),
            subset_names(subset, cn)
        ),
        GaloisViolation::NotReductive { element } => format!(
            "not reductive: gamma(`{}`) = {} but alpha of that set is `{}`, not below `{}`",
            en[element],
            subset_names(g.gamma(element), cn),
            en[g.alpha(g.gamma(element))],
            en[element]
        ),
    }
}

fn galois_err(e: GaloisError) -> CliError {
    CliError::Input(e.to_string())
}

/// Reorders `k` so that state `i` is the one named `order[i]`.
fn align_states(k: &KripkeFile, order: &[String], what: &str) -> Result<KripkeStructure, CliError> {
    let mut sorted_k = k.names.clone();
    let mut sorted_o = order.to_vec();
    sorted_k.sort();
    sorted_o.sort();
    if sorted_k != sorted_o {
        return Err(CliError::Input(format!(
            "{what} state names [{}] do not match [{}]",
            k.names.join(" "),
            order.join(" ")
        )));
    }
    let pos = |name: &String| order.iter().position(|o| o == name).unwrap();
    let map: Vec<usize> = k.names.iter().map(pos).collect();
    KripkeStructure::new(
        order.len(),
        k.structure.edges().map(|(s, t)| (map[s], map[t])),
        k.structure.marked().iter().map(|&s| map[s]),
    )
    .map_err(galois_err)
}

fn galois_check(
    inputs: &mut Inputs,
    path: &str,
    against: Option<&[String]>,
    cap: usize,
) -> Result<Outcome, CliError> {
    let input = inputs.load(path)?;
    let g = parse_galois(&input.text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let cn = &g.concrete_names;
    let en = g.spec.lattice().names().to_vec();
    let violation = check_galois(&g.spec, cap).map_err(galois_err)?;
    let mut parameters = json!({ "cap": cap });
    let mut summary = String::new();
    let mut result = json!({
        "galois": violation.is_none(),
        "violation": violation.map(|v| {
            let mut j = serde_json::to_value(v).unwrap();
            j["message"] = json!(describe_galois(&g.spec, &v, cn, &en));
            j
        }),
    });
    match &violation {
        None => summary.push_str("galois connection: yes\n"),
        Some(_) => {
            writeln!(
                summary,
                "galois connection: no\n  {}",
                result["violation"]["message"].as_str().unwrap()
            )
            .unwrap();
        }
    }
    let mut holds = violation.is_none();
    if let Some([cpath, apath]) = against {
        parameters["against"] = json!(true);
        if violation.is_some() {
            summary.push_str("abstraction basis: skipped, not a Galois connection\n");
            result["basis"] = Value::Null;
        } else {
            let c = load_kripke(inputs, cpath)?;
            let a = load_kripke(inputs, apath)?;
            let cs = align_states(&c, cn, "concrete")?;
            let as_ = align_states(&a, &en, "abstract")?;
            let identity: Vec<usize> = (0..en.len()).collect();
            let cex =
                check_abstraction_basis(&cs, &as_, &g.spec, &identity, cap).map_err(galois_err)?;
            match cex {
                None => {
                    summary.push_str("abstraction basis: yes\n");
                    result["basis"] = json!({ "holds": true, "counterexample": null });
                }
                Some(x) => {
                    writeln!(
                        summary,
                        "abstraction basis: no\n  {} is related to `{}` but its successors have no matching abstract step",
                        subset_names(x.subset, cn),
                        en[x.element]
                    )
                    .unwrap();
                    result["basis"] = json!({
                        "holds": false,
                        "counterexample": {
                            "subset": subset_names(x.subset, cn),
                            "element": en[x.element],
                        },
                    });
                    holds = false;
                }
            }
        }
    }
    Ok(Outcome {
        holds,
        parameters,
        result,
        summary,
        payload: None,
    })
}

fn gen(inputs: &mut Inputs, g: &GenCommand) -> Result<Outcome, CliError> {
    let gen_err = |e: pbisim::gen::GenError| CliError::Input(e.to_string());
    match g {
        GenCommand::Random {
            states,
            actions,
            density,
            seed,
            output,
        } => {
            let mut table = Vec::new();
            for a in actions {
                if table.contains(a) {
                    return Err(CliError::Input(format!("duplicate action `{a}`")));
                }
                table.push(a.clone());
            }
            // Reuse the file grammar's name rules.
            let header = format!("states: s0\nactions: {}\n", actions.join(" "));
            parse_pts(&header, 0.0).map_err(|e| CliError::Input(format!("--actions: {e}")))?;
            let p = gen_random_pts(*states, actions, *density, *seed).map_err(gen_err)?;
            let text = print_pts(&p, &default_state_names(*states));
            Ok(Outcome {
                holds: true,
                parameters: json!({
                    "states": states, "actions": actions, "density": density, "seed": seed,
                }),
                result: json!({ "system": text }),
                summary: String::new(),
                payload: Some(Payload {
                    text,
                    output: output.clone(),
                }),
            })
        }
        GenCommand::Planted {
            quotient,
            multiplicities,
            seed,
            output,
            truth,
        } => {
            let q = load_pts(inputs, quotient, pbisim::DEFAULT_TOL)?;
            let (lift, c) = gen_planted(&q.system, multiplicities, *seed).map_err(gen_err)?;
            let names: Vec<String> = c
                .assignment()
                .iter()
                .enumerate()
                .map(|(s, &j)| {
                    let first = c.assignment().iter().position(|&x| x == j).unwrap();
                    format!("{}_{}", q.state_names[j], s - first)
                })
                .collect();
            let text = print_pts(&lift, &names);
            let truth_text = print_partition(&c.to_partition(), &names);
            if let Some(path) = truth {
                std::fs::write(path, &truth_text)
                    .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            }
            Ok(Outcome {
                holds: true,
                parameters: json!({ "multiplicities": multiplicities, "seed": seed }),
                result: json!({ "system": text, "truth": truth_text }),
                summary: String::new(),
                payload: Some(Payload {
                    text,
                    output: output.clone(),
                }),
            })
        }
        GenCommand::Perturb {
            system,
            delta,
            seed,
            output,
        } => {
            let p = load_pts(inputs, system, pbisim::DEFAULT_TOL)?;
            let out = perturb(&p.system, *delta, *seed).map_err(gen_err)?;
            let text = print_pts(&out, &p.state_names);
            Ok(Outcome {
                holds: true,
                parameters: json!({ "delta": delta, "seed": seed }),
                result: json!({ "system": text }),
                summary: String::new(),
                payload: Some(Payload {
                    text,
                    output: output.clone(),
                }),
            })
        }
    }
}
