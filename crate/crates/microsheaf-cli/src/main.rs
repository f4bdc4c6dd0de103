use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use microsheaf::ainfty::{cochain_model, cochain_preset, hpl_transfer, AInftyJson, AInftyStructure};
use microsheaf::laggr::{pair_report, random_holomorphic_pair, LagrangianPlane, PlaneJson};
use microsheaf::microloc::{
    characteristic_cycle, curated_data, morse_duality_check, morse_groups, perversity_by_morse_groups,
    perversity_by_stalks, singular_support, MorseDataSet, MorseDataSetJson, Perversity,
};
use microsheaf::morse::{count_morse_trees, family, open_vs_mor, MorseCategory, SequenceJson, FAMILIES};
use microsheaf::sheafcat::corpus::corpus_entry;
use microsheaf::sheafcat::{decompose_into_standards, SheafComplex, SheafJson, SpaceRef};
use microsheaf::stratspace::{preset, SpaceJson, StratifiedComplex, PRESETS};

const SCHEMA: &str = "microsheaf.report/1";

#[derive(Parser)]
#[command(name = "microsheaf", version, about = "Constructible sheaves, local Morse groups, A∞ transfer and Lagrangian degrees")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a stratified space: a preset name or a space JSON file.
    Validate { space: String },
    /// Perversity, characteristic cycle, Morse groups, singular support and duality of a sheaf.
    /// With no flag every report is produced.
    SheafReport {
        /// Sheaf JSON file, inline JSON, or PRESET:ENTRY from the built-in corpus.
        sheaf: String,
        /// Morse data JSON; defaults to the curated data of a preset space.
        #[arg(long)]
        data: Option<String>,
        #[arg(long)]
        perversity: bool,
        #[arg(long)]
        cc: bool,
        #[arg(long)]
        morse_groups: bool,
        #[arg(long)]
        ss: bool,
        #[arg(long)]
        dual_check: bool,
    },
    /// Write a sheaf as iterated cones of shifted standard objects.
    Decompose { sheaf: String },
    /// Check the A∞ relations of a structure file, or transfer a cochain preset to its minimal model.
    Ainfty {
        file: Option<String>,
        /// interval, circle, s2, or random-SEED.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_arity: usize,
    },
    /// Compare Morse trees with the homotopy transfer on a directed sequence of objects.
    Morse {
        /// Sequence JSON file.
        file: Option<String>,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(FAMILIES))]
        family: Option<String>,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// List every rigid tree behind the binary operations.
        #[arg(long)]
        trees: bool,
    },
    /// Short path angles and intersection degrees of Lagrangian plane pairs.
    Degree {
        /// JSON file `{"pairs": [{"l0": plane, "l1": plane}]}`.
        file: Option<String>,
        /// Draw this many random holomorphic pairs instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Complex dimension; random runs cycle through 1..=4 when absent.
        #[arg(long)]
        n: Option<usize>,
        /// Relative tolerance on Im of the squared phases.
        #[arg(long, default_value_t = 1e-9)]
        phase_tol: f64,
        /// Tolerance on angle pairing and the angle sum.
        #[arg(long, default_value_t = 1e-8)]
        angle_tol: f64,
        /// Tolerance on the degree.
        #[arg(long, default_value_t = 1e-6)]
        degree_tol: f64,
    },
}

struct Outcome {
    ok: bool,
    body: Value,
    lines: Vec<String>,
}

/// Bad input: exit code 2.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

type Run = Result<Outcome, InputError>;

fn read_text(arg: &str) -> anyhow::Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))
}

fn parse<T: serde::de::DeserializeOwned>(arg: &str) -> anyhow::Result<T> {
    let text = read_text(arg)?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {arg}"))
}

fn load_space(arg: &str) -> anyhow::Result<(SpaceRef, Result<StratifiedComplex, microsheaf::Error>)> {
    if PRESETS.contains(&arg) {
        return Ok((SpaceRef::Preset(arg.into()), preset(arg)));
    }
    let j: SpaceJson = parse(arg)?;
    let built = StratifiedComplex::from_json(&j);
    Ok((SpaceRef::Inline(j), built))
}

fn load_sheaf(arg: &str) -> anyhow::Result<(Option<String>, SheafComplex)> {
    if !Path::new(arg).exists() && !arg.trim_start().starts_with('{') {
        if let Some((p, entry)) = arg.split_once(':') {
            let space = Arc::new(preset(p)?);
            let f = corpus_entry(&space, entry)?;
            return Ok((Some(p.to_string()), f));
        }
    }
    let j: SheafJson = parse(arg)?;
    let name = match &j.space {
        SpaceRef::Preset(p) => Some(p.clone()),
        SpaceRef::Inline(_) => None,
    };
    Ok((name, SheafComplex::from_json(&j)?))
}

fn dims_text(d: &[(i32, usize)]) -> String {
    if d.is_empty() {
        return "0".into();
    }
    d.iter().map(|(k, n)| format!("Q^{n}[{}]", -k)).collect::<Vec<_>>().join(" + ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_validate(space: &str) -> Run {
    let (_, built) = load_space(space)?;
    let x = match built {
        Ok(x) => x,
        Err(e) => {
            return Ok(Outcome {
                ok: false,
                body: json!({"diagnostics": [{"kind": "structure", "message": e.to_string()}]}),
                lines: vec![format!("invalid: {e}")],
            })
        }
    };
    let diags = x.validate();
    let ok = !diags.iter().any(|d| d.is_error());
    let mut lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
    lines.push(format!(
        "{}: {} cells, {} strata",
        if ok { "valid" } else { "invalid" },
        x.num_cells(),
        x.strata().len()
    ));
    Ok(Outcome {
        ok,
        body: json!({"cells": x.num_cells(), "strata": x.strata().len(), "diagnostics": diags}),
        lines,
    })
}

struct ReportFlags {
    perversity: bool,
    cc: bool,
    morse_groups: bool,
    ss: bool,
    dual_check: bool,
}

fn cmd_sheaf_report(sheaf: &str, data: Option<&str>, mut fl: ReportFlags) -> Run {
    if !(fl.perversity || fl.cc || fl.morse_groups || fl.ss || fl.dual_check) {
        fl = ReportFlags { perversity: true, cc: true, morse_groups: true, ss: true, dual_check: true };
    }
    let (preset_name, f) = load_sheaf(sheaf)?;
    let space = f.space();
    let set = match (data, &preset_name) {
        (Some(d), _) => MorseDataSet::from_json(space, &parse::<MorseDataSetJson>(d)?)?,
        (None, Some(p)) => curated_data(space, p)?,
        (None, None) => return Err(anyhow!("an inline space needs --data").into()),
    };
    let mut ok = true;
    let mut body = serde_json::Map::new();
    let mut lines = Vec::new();
    let mut run = |key: &str, r: Result<(bool, Value, String), microsheaf::Error>| match r {
        Ok((pass, v, line)) => {
            ok &= pass;
            body.insert(key.into(), v);
            lines.push(line);
        }
        Err(e) => {
            ok = false;
            body.insert(key.into(), json!({"error": e.to_string()}));
            lines.push(format!("{key}: error: {e}"));
        }
    };
    if fl.perversity {
        run(
            "perversity",
            (|| {
                let a = perversity_by_stalks(&f, &Perversity::Middle)?;
                let b = perversity_by_morse_groups(&f, &set.data)?;
                let agree = a.perverse == b.perverse;
                let mut line = format!("perverse: {}", yes(a.perverse));
                if !agree {
                    line = format!("perverse: stalks {}, morse groups {} (disagree)", yes(a.perverse), yes(b.perverse));
                }
                for w in a.witnesses.iter().chain(&b.witnesses) {
                    line.push_str(&format!("\n  witness: {w}"));
                }
                Ok((agree, json!({"stalks": a, "morse_groups": b, "agree": agree}), line))
            })(),
        );
    }
    if fl.cc {
        run(
            "cc",
            characteristic_cycle(&f, &set.data).map(|cc| {
                let parts: Vec<String> = cc.multiplicities.iter().map(|(l, m)| format!("{l}:{m}")).collect();
                (true, json!(cc), format!("CC = ({})", parts.join(", ")))
            }),
        );
    }
    if fl.morse_groups {
        run(
            "morse_groups",
            morse_groups(&f, &set.data).map(|groups| {
                let v: Vec<Value> = groups
                    .iter()
                    .map(|g| json!({"datum": g.datum.to_json(space), "dims": g.dims, "euler": g.euler}))
                    .collect();
                let text: Vec<String> = groups
                    .iter()
                    .map(|g| format!(
                            "  M at {} ({}), negative {{{}}}: {}",
                            space.name(g.datum.cell),
                            g.datum.stratum,
                            space.names(&g.datum.negative).join(","),
                            dims_text(&g.dims)
                        ))
                    .collect();
                (true, json!(v), format!("Morse groups:\n{}", text.join("\n")))
            }),
        );
    }
    if fl.ss {
        run(
            "ss",
            singular_support(&f, &set.data).map(|ss| (true, json!(ss), format!("SS over strata: {}", ss.join(", ")))),
        );
    }
    if fl.dual_check {
        run(
            "dual_check",
            morse_duality_check(&f, &set).map(|r| {
                let line = format!("duality: {}", if r.ok { "pass" } else { "FAIL" });
                (r.ok, json!(r), line)
            }),
        );
    }
    if lines.len() >= 2 && lines[0].starts_with("perverse:") && !lines[0].contains('\n') && lines[1].starts_with("CC =") {
        let cc = lines.remove(1);
        lines[0] = format!("{}; {cc}", lines[0]);
    }
    Ok(Outcome { ok, body: Value::Object(body), lines })
}

fn cmd_decompose(sheaf: &str) -> Run {
    let (_, f) = load_sheaf(sheaf)?;
    let space = f.space();
    match decompose_into_standards(&f) {
        Ok(d) => {
            let check = d.sections_check(&f);
            let qi = d.certificate.is_quasi_isomorphism();
            let ok = qi && check.iter().all(|l| l.ok);
            let mut lines = vec![format!("tree: {}", d.tree.render(space)), format!("leaves: {}", d.tree.leaf_count())];
            lines.extend(check.iter().filter(|l| !l.ok).map(|l| {
                format!("  mismatch on {}: {} vs {}", l.open, dims_text(&l.sheaf), dims_text(&l.tree))
            }));
            lines.push(format!("certificate: {}", if qi { "quasi-isomorphism" } else { "FAIL" }));
            Ok(Outcome {
                ok,
                body: json!({"tree": d.tree.to_json(space), "leaves": d.tree.leaf_count(), "quasi_isomorphism": qi, "sections": check}),
                lines,
            })
        }
        Err(e) => Ok(Outcome { ok: false, body: json!({"error": e.to_string()}), lines: vec![format!("error: {e}")] }),
    }
}

fn relation_lines(a: &AInftyStructure, max_arity: usize) -> Result<(bool, Vec<Value>, Vec<String>), microsheaf::Error> {
    let mut ok = true;
    let mut v = Vec::new();
    let mut lines = Vec::new();
    for d in 1..=max_arity {
        let r = a.check_relations(d)?;
        ok &= r.ok;
        lines.push(format!("  arity {d}: {}", if r.ok { "pass" } else { "FAIL" }));
        v.push(json!({"arity": d, "ok": r.ok, "witness": r.witness.map(|(k, w)| json!({"inputs": k, "residual": w.iter().map(|(g, c)| (g, c.to_string())).collect::<Vec<_>>()}))}));
    }
    Ok((ok, v, lines))
}

fn cmd_ainfty(file: Option<&str>, preset_name: Option<&str>, max_arity: usize) -> Run {
    let max_arity = max_arity.max(1);
    match (file, preset_name) {
        (Some(path), None) => {
            let a = AInftyStructure::from_json(&parse::<AInftyJson>(path)?)?;
            let (ok, rel, mut lines) = relation_lines(&a, max_arity)?;
            lines.insert(0, format!("{} generators, relations through arity {max_arity}:", a.num_gens()));
            Ok(Outcome { ok, body: json!({"generators": a.num_gens(), "relations": rel}), lines })
        }
        (None, Some(p)) => {
            let m = cochain_model(&cochain_preset(p)?)?;
            let tr = hpl_transfer(&m.dg, &m.transfer, max_arity, 1)?;
            let b = &tr.b;
            let (ok, rel, rl) = relation_lines(b, max_arity)?;
            let ops: Vec<usize> = (1..=max_arity).map(|d| b.op(d).len()).collect();
            let gens: Vec<Value> = b.gens.iter().map(|g| json!({"label": g.label, "degree": g.degree})).collect();
            let mut lines = vec![
                format!("{p}: {} cochains, {} matched pairs, minimal model on {} generators", m.dg.num_gens(), m.pairs.len(), b.num_gens()),
                format!("nonzero operation entries by arity: {ops:?}"),
                "transferred relations:".into(),
            ];
            lines.extend(rl);
            Ok(Outcome {
                ok,
                body: json!({"preset": p, "cochains": m.dg.num_gens(), "matching": m.pairs, "generators": gens, "entries_by_arity": ops, "relations": rel, "structure": b.to_json()}),
                lines,
            })
        }
        _ => Err(anyhow!("give exactly one of a structure file or --preset").into()),
    }
}

fn cmd_morse(file: Option<&str>, fam: Option<&str>, arity: usize, trees: bool) -> Run {
    let (space, objects) = match (file, fam) {
        (Some(path), None) => parse::<SequenceJson>(path)?.resolve()?,
        (None, Some(name)) => family(name)?,
        _ => return Err(anyhow!("give exactly one of a sequence file or --family").into()),
    };
    let report = match open_vs_mor(space.clone(), objects.clone(), arity) {
        Ok(r) => r,
        Err(e) => {
            return Ok(Outcome { ok: false, body: json!({"error": e.to_string()}), lines: vec![format!("error: {e}")] })
        }
    };
    let mut lines = vec![format!("convention: {}", report.convention)];
    let tagged = report.homs.iter().map(|h| ("", h)).chain(report.module_homs.iter().map(|h| ("module ", h)));
    for (tag, h) in tagged {
        lines.push(format!(
            "  {tag}Hom({}, {}): morse {} | sheaf {}{}",
            h.source,
            h.target,
            dims_text(&h.morse),
            dims_text(&h.sheaf),
            if h.ok { "" } else { "  MISMATCH" }
        ));
    }
    let bad: Vec<_> = report.operations.iter().chain(&report.module).filter(|l| !l.ok).collect();
    lines.push(format!(
        "operations compared: {} (+{} module), mismatches: {}",
        report.operations.len(),
        report.module.len(),
        bad.len()
    ));
    for l in &bad {
        lines.push(format!("  {:?}: transferred {:?}, trees {:?}", l.inputs, l.transferred, l.counted));
    }
    lines.push(format!("relations: {}", if report.relations_ok { "pass" } else { "FAIL" }));
    let mut body = json!(report);
    if trees {
        let cat = MorseCategory::new(space, objects, 2)?;
        let k = cat.critical.len();
        let mut list = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if !cat.dg.composable(&[cat.critical[a], cat.critical[b]]) {
                    continue;
                }
                for out in 0..k {
                    let tc = count_morse_trees(&cat, &[a, b], out)?;
                    if tc.trees.is_empty() {
                        continue;
                    }
                    let labels = [a, b, out].map(|i| cat.label(cat.critical[i]).to_string());
                    lines.push(format!("  trees {} , {} → {}: count {}", labels[0], labels[1], labels[2], tc.count));
                    for t in &tc.trees {
                        lines.push(format!("    {} at {:?}, weight {}", t.shape, t.vertices, t.weight));
                    }
                    list.push(json!({"inputs": [labels[0], labels[1]], "output": labels[2], "count": tc}));
                }
            }
        }
        body["trees"] = Value::Array(list);
    }
    Ok(Outcome { ok: report.ok, body, lines })
}

#[derive(serde::Deserialize)]
struct PairJson {
    l0: PlaneJson,
    l1: PlaneJson,
}

#[derive(serde::Deserialize)]
struct PairsJson {
    pairs: Vec<PairJson>,
}

#[derive(Clone, Copy)]
struct Tolerances {
    phase: f64,
    angle: f64,
    degree: f64,
}

fn holomorphic_checks(r: &microsheaf::laggr::PairReport, l0: &LagrangianPlane, l1: &LagrangianPlane, tol: Tolerances) -> Value {
    let real_positive = r.phases.iter().all(|&(re, im)| re > 0.0 && im.abs() < tol.phase * (re * re + im * im).sqrt());
    let n = r.n as f64;
    let expected = match (l0.theta, l1.theta) {
        (Some(t0), Some(t1)) => Some(t1 - t0 + n),
        _ => None,
    };
    let degree_ok = match (r.degree, expected) {
        (Some(d), Some(e)) => (d - e).abs() < tol.degree,
        _ => false,
    };
    json!({
        "phase_real_positive": real_positive,
        "pairing": r.pairing_defect < tol.angle,
        "angle_sum": (r.angle_sum + n / 2.0).abs() < tol.angle,
        "degree": degree_ok,
        "expected_degree": expected,
    })
}

fn all_true(v: &Value) -> bool {
    ["phase_real_positive", "pairing", "angle_sum", "degree"].iter().all(|k| v[k] == json!(true))
}

fn cmd_degree(file: Option<&str>, random: Option<usize>, seed: u64, n: Option<usize>, tol: Tolerances) -> Run {
    let pairs: Vec<(LagrangianPlane, LagrangianPlane)> = match (file, random) {
        (Some(path), None) => {
            let j: PairsJson = parse(path)?;
            j.pairs
                .iter()
                .map(|p| Ok((LagrangianPlane::from_json(&p.l0)?, LagrangianPlane::from_json(&p.l1)?)))
                .collect::<Result<_, microsheaf::Error>>()?
        }
        (None, Some(count)) => {
            if n == Some(0) {
                return Err(anyhow!("--n must be positive").into());
            }
            (0..count)
                .map(|i| random_holomorphic_pair(n.unwrap_or(1 + i % 4), seed.wrapping_add(i as u64)))
                .collect::<Result<_, _>>()?
        }
        _ => return Err(anyhow!("give exactly one of a pairs file or --random").into()),
    };
    let mut ok = true;
    let mut out = Vec::new();
    let mut lines = Vec::new();
    let mut failures = 0;
    for (i, (l0, l1)) in pairs.iter().enumerate() {
        match pair_report(l0, l1) {
            Ok(r) => {
                let checks = holomorphic_checks(&r, l0, l1, tol);
                let holo = random.is_some() || checks["phase_real_positive"] == json!(true);
                let pass = !holo || all_true(&checks);
                ok &= pass;
                if !pass {
                    failures += 1;
                }
                if random.is_none() || !pass {
                    let angles: Vec<String> = r.angles.iter().map(|a| format!("{a:.9}")).collect();
                    lines.push(format!(
                        "pair {i} (n = {}): angles [{}], sum {:.9}, degree {}{}",
                        r.n,
                        angles.join(", "),
                        r.angle_sum,
                        r.degree.map_or("ungraded".into(), |d| format!("{d:.9}")),
                        if pass { "" } else { "  FAIL" }
                    ));
                }
                out.push(json!({"pair": i, "report": r, "checks": checks}));
            }
            Err(e) => {
                ok = false;
                failures += 1;
                lines.push(format!("pair {i}: error: {e}"));
                out.push(json!({"pair": i, "error": e.to_string()}));
            }
        }
    }
    if let Some(count) = random {
        lines.push(format!("{count} random holomorphic pairs from seed {seed}: {failures} failing"));
    }
    Ok(Outcome { ok, body: json!({"pairs": out}), lines })
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, run) = match &cli.command {
        Command::Validate { space } => ("validate", cmd_validate(space)),
        Command::SheafReport { sheaf, data, perversity, cc, morse_groups, ss, dual_check } => (
            "sheaf-report",
            cmd_sheaf_report(
                sheaf,
                data.as_deref(),
                ReportFlags {
                    perversity: *perversity,
                    cc: *cc,
                    morse_groups: *morse_groups,
                    ss: *ss,
                    dual_check: *dual_check,
                },
            ),
        ),
        Command::Decompose { sheaf } => ("decompose", cmd_decompose(sheaf)),
        Command::Ainfty { file, preset, max_arity } => ("ainfty", cmd_ainfty(file.as_deref(), preset.as_deref(), *max_arity)),
        Command::Morse { file, family, arity, trees } => ("morse", cmd_morse(file.as_deref(), family.as_deref(), *arity, *trees)),
        Command::Degree { file, random, seed, n, phase_tol, angle_tol, degree_tol } => {
            let tol = Tolerances { phase: *phase_tol, angle: *angle_tol, degree: *degree_tol };
            ("degree", cmd_degree(file.as_deref(), *random, *seed, *n, tol))
        }
    };
    match run {
        Ok(o) => {
            match cli.format {
                Format::Json => {
                    let mut v = json!({"schema": SCHEMA, "command": name, "ok": o.ok});
                    if let Value::Object(m) = o.body {
                        v.as_object_mut().expect("object").extend(m);
                    }
                    emit(&serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Format::Human => {
                    let mut text = o.lines.join("\n");
                    text.push_str(if o.ok { "\nPASS" } else { "\nFAIL" });
                    emit(text.trim_start());
                }
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(e)) => {
            match cli.format {
                Format::Json => {
                    let v = json!({"schema": SCHEMA, "command": name, "ok": false, "input_error": format!("{e:#}")});
                    emit(&serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Format::Human => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
