// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Runs as a plain binary and prints one line per
//! criterion: PASS, FAIL or SKIP (for criteria that need external data).
//!
//! Optional inputs:
//! - `LEXSIMP_TSAR_GOLD` and `LEXSIMP_TSAR_RUN`: official English gold file
//!   and the submitted run file.
//! - `LEXSIMP_VERBNET_DIR`: a full VerbNet 3.1 class directory.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lexsimp::inflect::InflectionForm;
use lexsimp::pos::modules_for_pos;
use lexsimp::verbnet::{load_verbnet, VerbClass, VerbLexicon};
use lexsimp::vsd::{vsd_candidates, VsdConfig, VsdError};
use lexsimp::{
    evaluate, evaluate_files, run_dataset, write_run_tsv, AppConfig, GoldInstance, Inflector, Instance,
    MetricConfig, ModuleId, PipelineConfig, PosCategory, PredictionRecord, RoutingConfig, UnigramScorer,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

type Criterion = (&'static str, fn() -> Outcome);

fn mini_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources/mini")
}

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Pass(pass)
    } else {
        Fail(fail)
    }
}

// ---------------------------------------------------------------------------
// metric oracle: a direct transcription of the definitions

fn oracle_norm(s: &str) -> String {
    s.trim().to_lowercase()
}

fn oracle_metrics(pairs: &[(Vec<String>, Vec<String>)]) -> BTreeMap<String, f64> {
    let n = pairs.len() as f64;
    let mut out = BTreeMap::new();
    for k in [1usize, 3, 5, 10] {
        let mut ap_total = 0.0;
        let mut potential = 0.0;
        for (gold, preds) in pairs {
            let gold: Vec<String> = gold.iter().map(|g| oracle_norm(g)).collect();
            let top: Vec<String> = preds.iter().take(k).map(|p| oracle_norm(p)).collect();
            let rel: Vec<f64> = top.iter().map(|p| if gold.contains(p) { 1.0 } else { 0.0 }).collect();
            let mut ap = 0.0;
            for i in 0..rel.len() {
                let precision: f64 = rel[..=i].iter().sum::<f64>() / (i + 1) as f64;
                ap += rel[i] * precision;
            }
            ap_total += ap / k as f64;
            if rel.contains(&1.0) {
                potential += 1.0;
            }
        }
        out.insert(format!("MAP@{k}"), ap_total / n);
        let name = if k == 1 { "ACC@1".to_string() } else { format!("Potential@{k}") };
        out.insert(name, potential / n);
    }
    for k in [1usize, 2, 3] {
        let mut hits = 0.0;
        for (gold, preds) in pairs {
            let mut votes: HashMap<String, usize> = HashMap::new();
            for g in gold {
                *votes.entry(oracle_norm(g)).or_insert(0) += 1;
            }
            let best = votes.values().max().copied().unwrap_or(0);
            let top1: Vec<&String> = votes.iter().filter(|(_, v)| **v == best).map(|(w, _)| w).collect();
            if preds.iter().take(k).any(|p| top1.contains(&&oracle_norm(p))) {
                hits += 1.0;
            }
        }
        out.insert(format!("ACC@{k}@Top1"), hits / n);
    }
    out
}

const VOCAB: [&str; 12] = [
    "easy", "simple", "clear", "plain", "basic", "light", "soft", "quick", "small", "short", "fine", "neat",
];

fn variant(rng: &mut ChaCha8Rng, w: &str) -> String {
    match rng.gen_range(0..4) {
        0 => w.to_uppercase(),
        1 => format!(" {w}"),
        _ => w.to_string(),
    }
}

fn random_pair(rng: &mut ChaCha8Rng, exact_preds: Option<usize>) -> (Vec<String>, Vec<String>) {
    let gold: Vec<String> = (0..rng.gen_range(1..=8))
        .map(|_| {
            let w = VOCAB[rng.gen_range(0..VOCAB.len())];
            variant(rng, w)
        })
        .collect();
    let n = exact_preds.unwrap_or_else(|| rng.gen_range(0..=10));
    let mut pool = VOCAB.to_vec();
    pool.shuffle(rng);
    let preds = pool[..n].iter().map(|w| variant(rng, w)).collect();
    (gold, preds)
}

fn to_records(pairs: &[(Vec<String>, Vec<String>)]) -> (Vec<GoldInstance>, Vec<PredictionRecord>) {
    let mut gold = Vec::new();
    let mut run = Vec::new();
    for (i, (g, p)) in pairs.iter().enumerate() {
        let context = format!("sentence {i} has target");
        gold.push(GoldInstance {
            instance: Instance::new(context.clone(), "target").unwrap(),
            annotations: g.clone(),
            line: i + 1,
        });
        run.push(PredictionRecord::new(context, "target", p.iter().cloned()).0);
    }
    (gold, run)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2022);
    let cfg = MetricConfig::default();
    let pairs: Vec<_> = (0..1000).map(|_| random_pair(&mut rng, None)).collect();
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    let mut batches: Vec<&[(Vec<String>, Vec<String>)]> = pairs.chunks(1).collect();
    batches.push(&pairs);
    for batch in batches {
        let (gold, run) = to_records(batch);
        let report = evaluate(&gold, &run, &cfg).unwrap();
        let expected = oracle_metrics(batch);
        if report.metrics.len() != expected.len() {
            return Fail(format!("{} metrics reported, oracle has {}", report.metrics.len(), expected.len()));
        }
        for (name, value) in &report.metrics {
            let Some(want) = expected.get(name) else {
                return Fail(format!("unexpected metric {name}"));
            };
            worst = worst.max((value - want).abs());
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("1000 pairs, {compared} values, max |diff| {worst:.1e}, {elapsed:.2?}"),
        format!("max |diff| {worst:.1e} (limit 1e-12), {elapsed:.2?} (limit 5s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(510);
    let cfg = MetricConfig::default();
    for run_no in 0..100 {
        let size = rng.gen_range(1..=40);
        let pairs: Vec<_> = (0..size).map(|_| random_pair(&mut rng, Some(5))).collect();
        let (gold, run) = to_records(&pairs);
        let r = evaluate(&gold, &run, &cfg).unwrap();
        let (m5, m10) = (r.get("MAP@5").unwrap(), r.get("MAP@10").unwrap());
        let (p5, p10) = (r.get("Potential@5").unwrap(), r.get("Potential@10").unwrap());
        if m10 != m5 / 2.0 || p10 != p5 {
            return Fail(format!("run {run_no}: MAP@5 {m5} MAP@10 {m10} Potential@5 {p5} Potential@10 {p10}"));
        }
    }
    Pass("100 runs: MAP@10 == MAP@5/2 and Potential@10 == Potential@5 exactly".into())
}

const REFERENCE_SCORES: [(&str, f64); 10] = [
    ("ACC@1", 0.4664),
    ("ACC@1@Top1", 0.1823),
    ("ACC@2@Top1", 0.3056),
    ("ACC@3@Top1", 0.3378),
    ("MAP@3", 0.2743),
    ("MAP@5", 0.195),
    ("MAP@10", 0.0975),
    ("Potential@3", 0.6729),
    ("Potential@5", 0.7506),
    ("Potential@10", 0.7506),
];

fn criterion_3() -> Outcome {
    let (Some(gold), Some(run)) = (std::env::var_os("LEXSIMP_TSAR_GOLD"), std::env::var_os("LEXSIMP_TSAR_RUN")) else {
        return Skip("set LEXSIMP_TSAR_GOLD and LEXSIMP_TSAR_RUN to the official gold and run files".into());
    };
    let report = match evaluate_files(Path::new(&gold), Path::new(&run), &MetricConfig::default()) {
        Ok(r) => r,
        Err(e) => return Fail(e.to_string()),
    };
    let off: Vec<String> = REFERENCE_SCORES
        .iter()
        .filter_map(|&(name, want)| {
            let got = report.get(name)?;
            ((got - want).abs() > 0.0005).then(|| format!("{name} {got:.4} vs {want}"))
        })
        .collect();
    check(
        off.is_empty(),
        format!("10 values within 0.0005 over {} instances", report.instances),
        off.join("; "),
    )
}

fn criterion_4() -> Outcome {
    use ModuleId::*;
    use PosCategory::*;
    let expected: [(PosCategory, [bool; 4]); 3] = [
        (Verb, [true, true, true, false]),
        (Noun, [false, true, true, true]),
        (Adj, [false, true, true, false]),
    ];
    let table = RoutingConfig::table1();
    let mut cells = 0;
    for (pos, row) in expected {
        let routed = modules_for_pos(pos, &table);
        for (m, want) in ModuleId::ALL.into_iter().zip(row) {
            if routed.contains(&m) != want {
                return Fail(format!("{pos} x {m}: expected {want}"));
            }
            cells += 1;
        }
    }
    let alt = RoutingConfig::algorithm1();
    let verbs = modules_for_pos(Verb, &alt);
    let others_same = [Noun, Adj, Other].iter().all(|&p| modules_for_pos(p, &alt) == modules_for_pos(p, &table));
    check(
        cells == 12 && verbs == [Vsd, Ppdb, Mlm, Kg] && others_same,
        format!("{cells} cells match; algorithm1 routes verbs to {verbs:?}"),
        format!("algorithm1 verbs {verbs:?}, other rows unchanged: {others_same}"),
    )
}

fn transpose_holds(lex: &VerbLexicon) -> Result<usize, String> {
    let mut checked = 0;
    let lemmas: BTreeSet<String> = lex.lemmas().map(str::to_string).collect();
    for class in lex.classes() {
        for lemma in &lemmas {
            let member = class.members.contains(lemma);
            let indexed = lex.classes_for_verb(lemma).contains(&class.class_id);
            if member != indexed {
                return Err(format!("{lemma} / {}", class.class_id));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_5() -> Outcome {
    let (lex, report) = match load_verbnet(&mini_dir().join("verbnet")) {
        Ok(x) => x,
        Err(e) => return Fail(e.to_string()),
    };
    let checked = match transpose_holds(&lex) {
        Ok(n) => n,
        Err(pair) => return Fail(format!("transpose violated at {pair}")),
    };
    let mini = format!("{checked} (lemma, class) pairs over {} classes", report.classes);
    let Some(dir) = std::env::var_os("LEXSIMP_VERBNET_DIR") else {
        return Pass(format!("{mini}; full-lexicon check skipped (LEXSIMP_VERBNET_DIR unset)"));
    };
    let full = match load_verbnet(Path::new(&dir)) {
        Ok((lex, _)) => lex,
        Err(e) => return Fail(e.to_string()),
    };
    if let Err(pair) = transpose_holds(&full) {
        return Fail(format!("full lexicon: transpose violated at {pair}"));
    }
    let rise = full.classes_for_verb("rise");
    check(
        rise.len() == 6,
        format!("{mini}; full lexicon: rise in {} classes", rise.len()),
        format!("full lexicon: rise in {} classes {rise:?}, expected 6", rise.len()),
    )
}

fn mini_setup(workers: usize) -> Result<(lexsimp::Resources, PipelineConfig, Vec<Instance>), String> {
    let cfg = AppConfig::load(&mini_dir().join("mini.toml")).map_err(|e| e.to_string())?;
    let mut pipeline = cfg.pipeline_config().map_err(|e| e.to_string())?;
    pipeline.workers = workers;
    let active = cfg.active_modules().map_err(|e| e.to_string())?;
    let res = cfg.load_resources(&active).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(mini_dir().join("dataset.tsv")).map_err(|e| e.to_string())?;
    let instances = lexsimp::parse_dataset_tsv(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok((res, pipeline, instances))
}

fn criterion_6() -> Outcome {
    let golden = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/mini_golden_run.tsv")).unwrap();
    let start = Instant::now();
    let mut runs = 0;
    for workers in [1, 4] {
        let (res, cfg, instances) = match mini_setup(workers) {
            Ok(x) => x,
            Err(e) => return Fail(e),
        };
        for _ in 0..5 {
            let outcomes = run_dataset(&instances, &res, &cfg).unwrap();
            let records: Vec<_> = outcomes.into_iter().map(|o| o.record).collect();
            let mut bytes = Vec::new();
            write_run_tsv(&records, &mut bytes).unwrap();
            if bytes != golden {
                return Fail(format!("run {runs} with {workers} workers differs from the golden file"));
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(2),
        format!("{runs} runs byte-identical (workers 1 and 4), {elapsed:.2?}"),
        format!("identical output but took {elapsed:.2?} (limit 2s)"),
    )
}

fn vsd_case(
    classes: Vec<VerbClass>,
    counts: &[(&str, u64)],
    sentence: &str,
    target: &str,
    cfg: VsdConfig,
) -> Result<(String, Vec<String>), VsdError> {
    let lex = VerbLexicon::from_classes(classes).unwrap();
    let scorer = UnigramScorer::from_counts(counts.iter().map(|&(w, c)| (w, c))).unwrap();
    let instance = Instance::new(sentence, target).unwrap();
    let out = vsd_candidates(&instance, &lex, &scorer, &Inflector::bundled(), &cfg)?;
    let mut members: Vec<String> = out.candidates.into_iter().map(|c| c.surface).collect();
    members.sort();
    Ok((out.vote.winning_class, members))
}

fn criterion_7() -> Outcome {
    let cfg = VsdConfig::default();
    let strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let two = || {
        vec![
            VerbClass::new("calibratable_cos-45.6", ["rise", "climb", "soar"]),
            VerbClass::new("escape-51.1", ["rise", "leave", "exit"]),
        ]
    };
    let nested = || {
        let mut parent = VerbClass::new("run-51.3.2", ["walk", "run"]);
        let mut child = VerbClass::new("run-51.3.2-1", ["sprint", "jog"]);
        parent.adopt(&mut child);
        vec![parent, child]
    };
    type Case = (&'static str, Result<(String, Vec<String>), VsdError>, Option<(&'static str, Vec<String>)>);
    let cases: Vec<Case> = vec![
        (
            "single class",
            vsd_case(
                vec![VerbClass::new("put-9.1", ["put", "place", "deploy"])],
                &[("put", 9)],
                "They deploy troops",
                "deploy",
                cfg,
            ),
            Some(("put-9.1", strings(&["place", "put"]))),
        ),
        (
            "forced frequencies",
            vsd_case(two(), &[("climbed", 90), ("soared", 80), ("left", 1)], "Prices rose fast", "rose", VsdConfig { k: 2, ..cfg }),
            Some(("calibratable_cos-45.6", strings(&["climbed", "soared"]))),
        ),
        (
            "tally tie",
            vsd_case(two(), &[("exit", 50), ("climb", 40)], "They rise early", "rise", VsdConfig { k: 2, ..cfg }),
            Some(("escape-51.1", strings(&["exit", "leave"]))),
        ),
        ("unknown verb", vsd_case(two(), &[("x", 1)], "They wander", "wander", cfg), None),
        (
            "subclasses on",
            vsd_case(nested(), &[("run", 5)], "They walk home", "walk", cfg),
            Some(("run-51.3.2", strings(&["jog", "run", "sprint"]))),
        ),
        (
            "subclasses off",
            vsd_case(nested(), &[("run", 5)], "They walk home", "walk", VsdConfig { include_subclasses: false, ..cfg }),
            Some(("run-51.3.2", strings(&["run"]))),
        ),
    ];
    for (name, got, want) in cases {
        match (got, want) {
            (Err(VsdError::NotAVerbNetVerb(_)), None) => {}
            (Ok((class, members)), Some((want_class, want_members))) if class == want_class && members == want_members => {}
            (got, _) => return Fail(format!("{name}: got {got:?}")),
        }
    }
    Pass("6 fixtures: winning class and member list as expected".into())
}

use PosCategory::{Adj as A, Noun as N, Verb as V};

const INFLECTIONS: [(PosCategory, &str, &str, &str); 100] = [
    (V, "walk", "THIRD_SG", "walks"),
    (V, "walk", "PAST", "walked"),
    (V, "walk", "GERUND", "walking"),
    (V, "play", "THIRD_SG", "plays"),
    (V, "play", "PAST", "played"),
    (V, "play", "GERUND", "playing"),
    (V, "hope", "THIRD_SG", "hopes"),
    (V, "hope", "PAST", "hoped"),
    (V, "hope", "GERUND", "hoping"),
    (V, "stop", "THIRD_SG", "stops"),
    (V, "stop", "PAST", "stopped"),
    (V, "stop", "GERUND", "stopping"),
    (V, "carry", "THIRD_SG", "carries"),
    (V, "carry", "PAST", "carried"),
    (V, "carry", "GERUND", "carrying"),
    (V, "try", "THIRD_SG", "tries"),
    (V, "try", "PAST", "tried"),
    (V, "try", "GERUND", "trying"),
    (V, "visit", "THIRD_SG", "visits"),
    (V, "visit", "PAST", "visited"),
    (V, "visit", "GERUND", "visiting"),
    (V, "create", "THIRD_SG", "creates"),
    (V, "create", "PAST", "created"),
    (V, "create", "GERUND", "creating"),
    (V, "jump", "THIRD_SG", "jumps"),
    (V, "jump", "PAST", "jumped"),
    (V, "jump", "GERUND", "jumping"),
    (V, "cry", "THIRD_SG", "cries"),
    (V, "cry", "PAST", "cried"),
    (V, "cry", "GERUND", "crying"),
    (V, "study", "THIRD_SG", "studies"),
    (V, "study", "PAST", "studied"),
    (V, "study", "GERUND", "studying"),
    (V, "fix", "THIRD_SG", "fixes"),
    (V, "fix", "PAST", "fixed"),
    (V, "fix", "GERUND", "fixing"),
    (V, "watch", "THIRD_SG", "watches"),
    (V, "watch", "PAST", "watched"),
    (V, "watch", "GERUND", "watching"),
    (V, "push", "THIRD_SG", "pushes"),
    (V, "push", "PAST", "pushed"),
    (V, "push", "GERUND", "pushing"),
    (V, "go", "PAST", "went"),
    (V, "go", "PAST_PART", "gone"),
    (V, "run", "PAST", "ran"),
    (V, "run", "PAST_PART", "run"),
    (V, "be", "PAST", "was"),
    (V, "be", "PAST_PART", "been"),
    (V, "have", "PAST", "had"),
    (V, "have", "PAST_PART", "had"),
    (V, "do", "PAST", "did"),
    (V, "do", "PAST_PART", "done"),
    (V, "take", "PAST", "took"),
    (V, "take", "PAST_PART", "taken"),
    (V, "see", "PAST", "saw"),
    (V, "see", "PAST_PART", "seen"),
    (V, "rise", "PAST", "rose"),
    (V, "rise", "PAST_PART", "risen"),
    (N, "house", "PLURAL", "houses"),
    (N, "city", "PLURAL", "cities"),
    (N, "box", "PLURAL", "boxes"),
    (N, "church", "PLURAL", "churches"),
    (N, "bus", "PLURAL", "buses"),
    (N, "tree", "PLURAL", "trees"),
    (N, "idea", "PLURAL", "ideas"),
    (N, "baby", "PLURAL", "babies"),
    (N, "child", "PLURAL", "children"),
    (N, "man", "PLURAL", "men"),
    (N, "woman", "PLURAL", "women"),
    (N, "mouse", "PLURAL", "mice"),
    (N, "foot", "PLURAL", "feet"),
    (N, "tooth", "PLURAL", "teeth"),
    (A, "tall", "COMPARATIVE", "taller"),
    (A, "tall", "SUPERLATIVE", "tallest"),
    (A, "happy", "COMPARATIVE", "happier"),
    (A, "happy", "SUPERLATIVE", "happiest"),
    (A, "big", "COMPARATIVE", "bigger"),
    (A, "big", "SUPERLATIVE", "biggest"),
    (A, "large", "COMPARATIVE", "larger"),
    (A, "large", "SUPERLATIVE", "largest"),
    (A, "hot", "COMPARATIVE", "hotter"),
    (A, "hot", "SUPERLATIVE", "hottest"),
    (A, "easy", "COMPARATIVE", "easier"),
    (A, "easy", "SUPERLATIVE", "easiest"),
    (A, "good", "COMPARATIVE", "better"),
    (A, "good", "SUPERLATIVE", "best"),
    (A, "bad", "COMPARATIVE", "worse"),
    (A, "bad", "SUPERLATIVE", "worst"),
    (A, "far", "COMPARATIVE", "farther"),
    (A, "far", "SUPERLATIVE", "farthest"),
    (V, "be", "THIRD_SG", "is"),
    (V, "have", "THIRD_SG", "has"),
    (V, "do", "THIRD_SG", "does"),
    (V, "go", "THIRD_SG", "goes"),
    (V, "run", "GERUND", "running"),
    (N, "knife", "PLURAL", "knives"),
    (N, "wife", "PLURAL", "wives"),
    (N, "person", "PLURAL", "persons"),
    (N, "day", "PLURAL", "days"),
    (N, "wish", "PLURAL", "wishes"),
];

fn criterion_8() -> Outcome {
    let inflector = Inflector::bundled();
    let mut wrong = Vec::new();
    let mut regular = 0;
    let mut round_trip_failures = Vec::new();
    for (pos, lemma, form, surface) in INFLECTIONS {
        let form: InflectionForm = form.parse().unwrap();
        let got = inflector.inflect_to(lemma, form);
        if got != surface {
            wrong.push(format!("{lemma}/{} -> {got}, expected {surface}", form.as_str()));
        }
        let is_regular = inflector.table().lookup(lemma, form).is_none() && form != InflectionForm::PastPart;
        if is_regular {
            regular += 1;
            let back = inflector.detect_form(&got, pos);
            if back != (lemma.to_string(), form) {
                round_trip_failures.push(format!("{got} -> {back:?}"));
            }
        }
    }
    check(
        wrong.is_empty() && round_trip_failures.is_empty(),
        format!("100 cases; {regular} regular cases round-trip"),
        format!("table: [{}] round-trip: [{}]", wrong.join(", "), round_trip_failures.join(", ")),
    )
}

fn synthetic_dataset(n: usize) -> Vec<Instance> {
    let frames: [(&str, &str); 10] = [
        ("Stocks {} from 10 to 12", "rise"),
        ("The army will {} new units", "deploy"),
        ("Prices {} after the report", "soared"),
        ("We must {} before noon", "depart"),
        ("He sold the {} yesterday", "automobile"),
        ("The {} called back", "physician"),
        ("It was an {} crowd", "enormous"),
        ("The exam was {} for everyone", "difficult"),
        ("They hired {} staff", "additional"),
        ("Local {} complained", "residents"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(373);
    (0..n)
        .map(|i| {
            let (frame, word) = frames[rng.gen_range(0..frames.len())];
            let sentence = format!("{} (case {i})", frame.replace("{}", word));
            Instance::new(sentence, word).unwrap()
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let (res, cfg, _) = match mini_setup(1) {
        Ok(x) => x,
        Err(e) => return Fail(e),
    };
    let instances = synthetic_dataset(373);
    let start = Instant::now();
    let outcomes = run_dataset(&instances, &res, &cfg).unwrap();
    let elapsed = start.elapsed();
    let produced = outcomes.iter().filter(|o| !o.record.substitutes().is_empty()).count();
    check(
        outcomes.len() == 373 && elapsed < Duration::from_secs(5),
        format!("373 instances on one thread in {elapsed:.2?}, {produced} with substitutes"),
        format!("{} outcomes in {elapsed:.2?} (limit 5s)", outcomes.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("metric oracle equivalence", criterion_1),
        ("halving identity", criterion_2),
        ("shared-task score reproduction", criterion_3),
        ("routing table conformance", criterion_4),
        ("verb lexicon round-trip", criterion_5),
        ("end-to-end determinism", criterion_6),
        ("class vote fixtures", criterion_7),
        ("inflection suite", criterion_8),
        ("throughput floor", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("{tag} {}. {name}: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
