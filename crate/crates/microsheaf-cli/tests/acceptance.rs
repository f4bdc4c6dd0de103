//! Acceptance checks. Each criterion prints one PASS/FAIL line and a CLI command that reproduces
//! it; failing items print their own command.

use std::sync::Arc;
use std::time::{Duration, Instant};

use microsheaf::ainfty::{cochain_model, cochain_preset, hpl_transfer};
use microsheaf::laggr::{pair_report, random_holomorphic_pair};
use microsheaf::microloc::{
    characteristic_cycle, curated_data, local_morse_group, morse_duality_check, morse_groups,
    perversity_by_morse_groups, perversity_by_stalks, MorseDatum, Perversity,
};
use microsheaf::morse::{family, open_vs_mor, FAMILIES};
use microsheaf::sheafcat::corpus::{corpus, random_sheaf};
use microsheaf::sheafcat::{decompose_into_standards, standard_object, SheafComplex};
use microsheaf::stratspace::{preset, CellSet, StratifiedComplex, PRESETS};

const COMPLEX_PRESETS: [&str; 3] = ["p1", "c-origin", "s2"];
const RANDOM_SHEAVES_PER_PRESET: u64 = 40;
const RANDOM_COMPLEXES: u64 = 10;
const MAX_ARITY: usize = 6;
const DEGREE_PAIRS: usize = 1000;
const PHASE_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-8;
const DEGREE_TOL: f64 = 1e-6;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn criterion(n: usize, title: &str, limit: Option<Duration>, repro: &str, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let t = start.elapsed();
    let in_time = limit.map_or(true, |l| t <= l);
    let ok = out.failures.is_empty() && in_time;
    let limit_text = limit.map_or(String::new(), |l| format!(" (limit {:.0} s)", l.as_secs_f64()));
    println!(
        "criterion {n:>2} {}: {title}; {:.3} s{limit_text}; {}",
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        out.detail
    );
    println!("    reproduce: {repro}");
    if !in_time {
        println!("    over the time limit");
    }
    for f in &out.failures {
        println!("    failure: {f}");
    }
    ok
}

fn space(name: &str) -> Arc<StratifiedComplex> {
    Arc::new(preset(name).expect("preset"))
}

fn datum(x: &StratifiedComplex, cell: &str, negative: &[&str]) -> MorseDatum {
    MorseDatum {
        stratum: cell.into(),
        cell: x.cell_index(cell).expect("cell"),
        negative: negative.iter().map(|n| x.cell_index(n).expect("cell")).collect(),
        index_shift: 0,
    }
}

fn endpoint_groups() -> Outcome {
    let mut o = Outcome::new();
    let x = space("interval");
    let v = standard_object(&x, &x.open_by_names(&["e"]).expect("open"));
    let left = local_morse_group(&v, &datum(&x, "a", &[])).expect("group").dims;
    let right = local_morse_group(&v, &datum(&x, "b", &["e"])).expect("group").dims;
    o.check(left == vec![(0, 1)], || format!("M at a: {left:?}, expected Q in degree 0"));
    o.check(right.is_empty(), || format!("M at b: {right:?}, expected 0"));
    for (fam, brane, expected) in [("brane-left", "M_a", &left), ("brane-right", "M_b", &right)] {
        let (s, objects) = family(fam).expect("family");
        let r = open_vs_mor(s, objects, 2).expect("comparison");
        let h = r.homs.iter().find(|l| l.source == brane && l.target == "V").expect("hom line");
        o.check(h.ok && &h.morse == expected, || format!("{fam}: Hom({brane}, V) = {:?} vs {expected:?}", h.morse));
    }
    o.detail = format!("M_a = {left:?}, M_b = {right:?}");
    o
}

/// χ of the order complex of `cells` under the face relation, by counting chains.
fn nerve_euler(x: &StratifiedComplex, cells: &CellSet) -> i64 {
    let below = |c: usize| -> Vec<usize> {
        let one: CellSet = [c].into_iter().collect();
        x.closure(&one).into_iter().filter(|&d| d != c && cells.contains(&d)).collect()
    };
    // chains ending at c, counted by length parity
    let mut order: Vec<usize> = cells.iter().copied().collect();
    order.sort_by_key(|&c| x.cells()[c].dim);
    let mut signed = std::collections::HashMap::new();
    for &c in &order {
        let s: i64 = 1 - below(c).iter().map(|d| signed[d]).sum::<i64>();
        signed.insert(c, s);
    }
    signed.values().sum()
}

fn p1_pushforward() -> Outcome {
    let mut o = Outcome::new();
    let x = space("p1");
    let set = curated_data(&x, "p1").expect("data");
    let v_names = ["e0", "e1", "f+", "f-"];
    let f = standard_object(&x, &x.open_by_names(&v_names).expect("open")).shift(1);
    let a = perversity_by_stalks(&f, &Perversity::Middle).expect("stalk test");
    let b = perversity_by_morse_groups(&f, &set.data).expect("morse test");
    o.check(a.perverse, || format!("stalk test: {:?}", a.witnesses));
    o.check(b.perverse, || format!("morse group test: {:?}", b.witnesses));
    let cc = characteristic_cycle(&f, &set.data).expect("cc");
    let want = [("p0", 1), ("pinf", 1), ("C*", 1)];
    for (label, m) in want {
        o.check(cc.multiplicity(label) == Some(m), || format!("CC at {label}: {:?}", cc.multiplicity(label)));
    }
    // independent route at the points: χ(fib) = χ(star ∩ V) − χ(neg ∩ V), negated by the shift
    let v: CellSet = v_names.iter().map(|n| x.cell_index(n).expect("cell")).collect();
    for d in set.data.iter().filter(|d| d.stratum != "C*") {
        let star: CellSet = x.open_star(d.cell).cells().intersection(&v).copied().collect();
        let neg: CellSet = d.negative.intersection(&v).copied().collect();
        let oracle = -(nerve_euler(&x, &star) - nerve_euler(&x, &neg));
        o.check(cc.multiplicity(&d.stratum) == Some(oracle), || {
            format!("nerve oracle at {} gives {oracle}, CC gives {:?}", d.stratum, cc.multiplicity(&d.stratum))
        });
    }
    let parts: Vec<String> = cc.multiplicities.iter().map(|(l, m)| format!("{l}:{m}")).collect();
    o.detail = format!("perverse by stalks {}, by Morse groups {}, CC = ({})", a.perverse, b.perverse, parts.join(", "));
    o
}

fn perversity_agreement() -> Outcome {
    let mut o = Outcome::new();
    let (mut total, mut perverse) = (0, 0);
    for p in COMPLEX_PRESETS {
        let x = space(p);
        o.check(x.num_cells() <= 40, || format!("{p} has {} cells", x.num_cells()));
        let data = curated_data(&x, p).expect("data");
        for seed in 0..RANDOM_SHEAVES_PER_PRESET {
            let f = random_sheaf(&x, seed).expect("random sheaf");
            let a = perversity_by_stalks(&f, &Perversity::Middle).expect("stalk test");
            let b = perversity_by_morse_groups(&f, &data.data).expect("morse test");
            total += 1;
            perverse += a.perverse as usize;
            o.check(a.perverse == b.perverse, || {
                format!("microsheaf sheaf-report {p}:random-{seed} --perversity: stalks {}, Morse groups {}", a.perverse, b.perverse)
            });
        }
    }
    o.check(total >= 100, || format!("only {total} sheaves"));
    o.detail = format!("{total} random sheaves, {perverse} perverse");
    o
}

fn corpora() -> Vec<(&'static str, Vec<(String, SheafComplex)>)> {
    PRESETS.iter().map(|&p| (p, corpus(&space(p)))).collect()
}

fn vanishing() -> Outcome {
    let mut o = Outcome::new();
    let (mut total, mut vanishing) = (0, 0);
    for (p, entries) in corpora() {
        let data = curated_data(entries[0].1.space(), p).expect("data");
        for (name, f) in entries {
            total += 1;
            let groups = morse_groups(&f, &data.data).expect("groups");
            if groups.iter().all(|g| g.is_zero()) {
                vanishing += 1;
                let n = f.space().num_cells();
                let bad: Vec<usize> = (0..n).filter(|&c| !f.stalk_cohomology(c).is_empty()).collect();
                o.check(bad.is_empty(), || {
                    format!("microsheaf sheaf-report '{p}:{name}' --morse-groups: zero groups but stalk cohomology at {bad:?}")
                });
            }
        }
    }
    o.detail = format!("{total} corpus sheaves, {vanishing} with all Morse groups zero");
    o
}

fn duality() -> Outcome {
    let mut o = Outcome::new();
    let mut total = 0;
    for (p, entries) in corpora() {
        let data = curated_data(entries[0].1.space(), p).expect("data");
        for (name, f) in entries {
            total += 1;
            let r = morse_duality_check(&f, &data).expect("duality");
            o.check(r.ok, || format!("microsheaf sheaf-report '{p}:{name}' --dual-check"));
        }
    }
    o.detail = format!("{total} corpus sheaves on {} presets", PRESETS.len());
    o
}

fn generation() -> Outcome {
    let mut o = Outcome::new();
    let (mut total, mut opens) = (0, 0);
    for (p, entries) in corpora() {
        for (name, f) in entries {
            total += 1;
            let repro = format!("microsheaf decompose '{p}:{name}'");
            match decompose_into_standards(&f) {
                Ok(d) => {
                    let lines = d.sections_check(&f);
                    opens += lines.len();
                    o.check(d.certificate.is_quasi_isomorphism(), || format!("{repro}: certificate"));
                    for l in lines.iter().filter(|l| !l.ok) {
                        o.check(false, || format!("{repro}: sections on {} differ", l.open));
                    }
                }
                Err(e) => o.check(false, || format!("{repro}: {e}")),
            }
        }
    }
    o.detail = format!("{total} corpus sheaves, {opens} open checks");
    o
}

fn ainfty_relations() -> Outcome {
    let mut o = Outcome::new();
    let mut names: Vec<String> = vec!["interval".into(), "circle".into()];
    names.extend((0..RANDOM_COMPLEXES).map(|s| format!("random-{s}")));
    let mut largest = 0;
    for name in &names {
        let repro = format!("microsheaf ainfty --preset {name} --max-arity {MAX_ARITY}");
        let m = cochain_model(&cochain_preset(name).expect("preset")).expect("model");
        largest = largest.max(m.dg.num_gens());
        o.check(m.dg.num_gens() <= 12, || format!("{repro}: {} generators", m.dg.num_gens()));
        match hpl_transfer(&m.dg, &m.transfer, MAX_ARITY, 1) {
            Ok(tr) => {
                let r = tr.b.check_relations_through(MAX_ARITY).expect("relations");
                o.check(r.ok, || format!("{repro}: fails at arity {}", r.arity));
            }
            Err(e) => o.check(false, || format!("{repro}: {e}")),
        }
    }
    o.detail = format!("{} structures, up to {largest} generators, through arity {MAX_ARITY}", names.len());
    o
}

fn open_vs_morse() -> Outcome {
    let mut o = Outcome::new();
    let mut ops = 0;
    for name in FAMILIES {
        let (s, objects) = family(name).expect("family");
        let r = open_vs_mor(s, objects, 2).expect("comparison");
        ops += r.operations.len();
        o.check(r.ok, || format!("microsheaf morse --family {name} --arity 2"));
    }
    o.detail = format!("{} families, {ops} m1/m2 entries compared", FAMILIES.len());
    o
}

fn module_correspondence() -> Outcome {
    let mut o = Outcome::new();
    let mut entries = 0;
    for name in ["brane-left", "brane-right"] {
        let (s, objects) = family(name).expect("family");
        let r = open_vs_mor(s, objects, 3).expect("comparison");
        entries += r.module.len();
        let module_ok = r.module.iter().all(|l| l.ok) && r.module_homs.iter().all(|l| l.ok);
        o.check(module_ok, || format!("microsheaf morse --family {name} --arity 3"));
    }
    o.check(entries > 0, || "no module entries compared".into());
    o.detail = format!("{entries} module pairing entries");
    o
}

fn degree_law() -> Outcome {
    let mut o = Outcome::new();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..DEGREE_PAIRS {
        let n = 1 + i % 4;
        let repro = format!("microsheaf degree --random 1 --seed {i} --n {n}");
        let (l0, l1) = random_holomorphic_pair(n, i as u64).expect("pair");
        let r = match pair_report(&l0, &l1) {
            Ok(r) => r,
            Err(e) => {
                o.check(false, || format!("{repro}: {e}"));
                continue;
            }
        };
        let phase_ok = r.phases.iter().all(|&(re, im)| re > 0.0 && im.abs() < PHASE_TOL * re.hypot(im));
        let sum_err = (r.angle_sum + n as f64 / 2.0).abs();
        let expected = l1.theta.expect("graded") - l0.theta.expect("graded") + n as f64;
        let deg_err = (r.degree.expect("graded") - expected).abs();
        worst = (worst.0.max(r.pairing_defect), worst.1.max(sum_err), worst.2.max(deg_err));
        o.check(phase_ok, || format!("{repro}: phases {:?}", r.phases));
        o.check(r.pairing_defect < ANGLE_TOL, || format!("{repro}: pairing defect {:e}", r.pairing_defect));
        o.check(sum_err < ANGLE_TOL, || format!("{repro}: angle sum {}", r.angle_sum));
        o.check(deg_err < DEGREE_TOL, || format!("{repro}: degree {:?} vs {expected}", r.degree));
    }
    o.detail = format!(
        "{DEGREE_PAIRS} pairs; worst pairing {:.1e}, sum {:.1e}, degree {:.1e}",
        worst.0, worst.1, worst.2
    );
    o
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "endpoint Morse groups on the interval match Morse homs", Some(s(1)), "microsheaf morse --family brane-left; microsheaf morse --family brane-right", endpoint_groups),
        criterion(2, "i_*Q_{C*}[1] on P1 is perverse with CC = (1, 1, 1)", Some(s(1)), r#"microsheaf sheaf-report '{"space":"p1","standard":["e0","e1","f+","f-"],"shift":1}' --perversity --cc"#, p1_pushforward),
        criterion(3, "perversity by stalks agrees with perversity by Morse groups", Some(s(60)), "microsheaf sheaf-report PRESET:random-SEED --perversity", perversity_agreement),
        criterion(4, "vanishing Morse groups force vanishing stalks", None, "microsheaf sheaf-report PRESET:ENTRY --morse-groups", vanishing),
        criterion(5, "Morse groups commute with Verdier duality", None, "microsheaf sheaf-report PRESET:ENTRY --dual-check", duality),
        criterion(6, "standard objects generate", None, "microsheaf decompose PRESET:ENTRY", generation),
        criterion(7, "transferred A-infinity relations", Some(s(30)), "microsheaf ainfty --preset NAME --max-arity 6", ainfty_relations),
        criterion(8, "homotopy transfer reproduces Morse trees", None, "microsheaf morse --family NAME --arity 2", open_vs_morse),
        criterion(9, "module pairing matches the Morse side", None, "microsheaf morse --family brane-left --arity 3", module_correspondence),
        criterion(10, "holomorphic degree law", Some(s(10)), "microsheaf degree --random 1000 --seed 0", degree_law),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
