use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use careg_core::automata::DeBruijnGraph;
use careg_core::golden::golden;
use careg_core::image::{classify_image, image_language, ImageKind};
use careg_core::periodic::{wpp_check, wpp_check_bounded, WppResult};
use careg_core::random::{run_trials, summarize, TrialRecord};
use careg_core::regularity::{
    find_weak_inverses, minimal_weak_inverse_radius, regularity_verdict, spp_falsify, verify_weak_inverse, Budgets,
    RadiusSearch, SppResult,
};
use careg_core::{format_word, LocalRule};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "careg", version, about = "Von Neumann regularity of one-dimensional cellular automata")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Largest inverse radius to search.
    #[arg(long, default_value_t = 4)]
    rmax: u32,
    /// Longest periodic point used by the inverse search.
    #[arg(long, default_value_t = 11)]
    p: usize,
    /// Longest tail period tried by the strong periodic point falsifier.
    #[arg(long = "spp-p", default_value_t = 2)]
    spp_p: usize,
    /// Longest middle word tried by the falsifier.
    #[arg(long = "spp-mid", default_value_t = 8)]
    spp_mid: usize,
}

impl From<BudgetArgs> for Budgets {
    fn from(b: BudgetArgs) -> Self {
        Budgets { r_max: b.rmax, p: b.p, spp_p: b.spp_p, spp_mid_len: b.spp_mid }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full regularity verdict with image and periodic point analysis.
    Analyze {
        rule: String,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Recompute the condition and optimal-inverse tables and diff them
    /// against the embedded reference values.
    Tables {
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// All weak inverses of one radius.
    FindInverses {
        rule: String,
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = 11)]
        p: usize,
    },
    /// Check f g f = f.
    CheckInverse { f: String, g: String },
    /// Weak periodic point condition.
    Wpp {
        rule: String,
        /// Only check periods up to this bound.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Classify the image subshift.
    Image {
        rule: String,
        /// Directory for de Bruijn and orphan DFA graphs.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Bounded falsifier of the strong periodic point condition.
    Spp {
        rule: String,
        #[arg(long = "spp-p", default_value_t = 2)]
        spp_p: usize,
        #[arg(long = "spp-mid", default_value_t = 8)]
        spp_mid: usize,
    },
    /// Monte Carlo over random one-sided rules.
    Random {
        /// Alphabet size.
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// One-sided radius.
        #[arg(long, default_value_t = 1)]
        radius: u32,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-trial records to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    runtime_ms: u128,
    tool_version: &'static str,
}

/// What a command produced: JSON result, text lines, exit code.
struct Outcome {
    result: Value,
    text: Vec<String>,
    code: u8,
}

impl Outcome {
    fn ok(result: Value, text: Vec<String>) -> Self {
        Outcome { result, text, code: 0 }
    }
}

fn parse_rule(spec: &str) -> Result<LocalRule, String> {
    if let Some(rest) = spec.strip_prefix("hex:") {
        let (digits, radius) = rest.split_once("@r").ok_or_else(|| format!("expected hex:<digits>@r<radius>, got {spec:?}"))?;
        let radius: u32 = radius.parse().map_err(|_| format!("bad radius in {spec:?}"))?;
        return LocalRule::from_hex(digits, radius).map_err(|e| e.to_string());
    }
    let n: u32 = spec.parse().map_err(|_| format!("expected an ECA number or hex:<digits>@r<radius>, got {spec:?}"))?;
    LocalRule::eca(n).map_err(|e| e.to_string())
}

fn label(rule: &LocalRule) -> String {
    match rule.eca_number() {
        Some(n) if rule.radius() <= 1 => format!("ECA {n}"),
        _ => rule.to_hex().map(|h| format!("hex {h}")).unwrap_or_else(|_| format!("{rule:?}")),
    }
}

fn hexes(rules: &[LocalRule]) -> Vec<String> {
    rules.iter().map(|g| g.to_hex().unwrap_or_else(|_| format!("{g:?}"))).collect()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, inputs, outcome) = match run(&cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if cli.json {
        let report = Report {
            command: name,
            inputs,
            result: outcome.result,
            runtime_ms: start.elapsed().as_millis(),
            tool_version: env!("CARGO_PKG_VERSION"),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for line in &outcome.text {
            println!("{line}");
        }
    }
    ExitCode::from(outcome.code)
}

fn run(command: &Command) -> Result<(&'static str, Value, Outcome), String> {
    Ok(match command {
        Command::Analyze { rule, budgets } => {
            let f = parse_rule(rule)?;
            let budgets = Budgets::from(*budgets);
            ("analyze", json!({ "rule": rule, "budgets": budgets }), analyze(&f, budgets))
        }
        Command::Tables { budgets } => {
            let budgets = Budgets::from(*budgets);
            ("tables", json!({ "budgets": budgets }), tables(budgets))
        }
        Command::FindInverses { rule, radius, p } => {
            let f = parse_rule(rule)?;
            let found = hexes(&find_weak_inverses(&f, *radius, *p));
            let mut text = vec![format!("{}: {} weak inverses of radius {radius}", label(&f), found.len())];
            text.extend(found.iter().cloned());
            ("find-inverses", json!({ "rule": rule, "radius": radius, "p": p }), Outcome::ok(json!(found), text))
        }
        Command::CheckInverse { f, g } => {
            let (fr, gr) = (parse_rule(f)?, parse_rule(g)?);
            let ok = verify_weak_inverse(&fr, &gr);
            let outcome = Outcome { result: json!(ok), text: vec![ok.to_string()], code: if ok { 0 } else { 1 } };
            ("check-inverse", json!({ "f": f, "g": g }), outcome)
        }
        Command::Wpp { rule, p } => {
            let f = parse_rule(rule)?;
            let result = match p {
                Some(p) => wpp_check_bounded(&f, *p),
                None => wpp_check(&f),
            };
            let text = match &result {
                WppResult::Holds => vec![format!("{}: weak periodic point condition holds", label(&f))],
                WppResult::Fails { witness } => {
                    vec![format!("{}: fails, {witness} has no preimage of its period", label(&f))]
                }
            };
            ("wpp", json!({ "rule": rule, "p": p }), Outcome::ok(to_value(&result), text))
        }
        Command::Image { rule, dot } => {
            let f = parse_rule(rule)?;
            let c = classify_image(&f);
            let mut text = vec![format!("{}: {:?}, {}", label(&f), c.kind, c.evidence)];
            text.extend(c.offenders.iter().map(|o| format_word(o)));
            let mut result = to_value(&c);
            if let Some(dir) = dot {
                let files = write_dot(&f, dir).map_err(|e| format!("writing DOT files: {e}"))?;
                text.extend(files.iter().map(|p| format!("wrote {}", p.display())));
                result["dot_files"] = json!(files);
            }
            ("image", json!({ "rule": rule, "dot": dot }), Outcome::ok(result, text))
        }
        Command::Spp { rule, spp_p, spp_mid } => {
            let f = parse_rule(rule)?;
            let result = spp_falsify(&f, *spp_p, *spp_mid);
            let line = match &result {
                SppResult::Falsified { certificate } => {
                    format!("{}: falsified, certificate re-checks: {}", label(&f), certificate.verify(&f))
                }
                SppResult::Inconclusive => format!("{}: inconclusive", label(&f)),
            };
            ("spp", json!({ "rule": rule, "spp_p": spp_p, "spp_mid": spp_mid }), Outcome::ok(to_value(&result), vec![line]))
        }
        Command::Random { n, radius, trials, seed, csv } => {
            let records = run_trials(*n, *radius, *trials, *seed).map_err(|e| e.to_string())?;
            let stats = summarize(*n, *radius, *seed, &records);
            let mut text = vec![format!(
                "n={n} r={radius} trials={trials} seed={seed}: failure_freq={:.4} mean_N={:.4} mean_M={:.4}",
                stats.failure_freq, stats.mean_N, stats.mean_M
            )];
            if let Some(path) = csv {
                write_csv(path, &records).map_err(|e| format!("writing {}: {e}", path.display()))?;
                text.push(format!("wrote {}", path.display()));
            }
            let inputs = json!({ "n": n, "radius": radius, "trials": trials, "seed": seed, "csv": csv });
            ("random", inputs, Outcome::ok(to_value(&stats), text))
        }
    })
}

fn analyze(f: &LocalRule, budgets: Budgets) -> Outcome {
    let verdict = regularity_verdict(f, budgets);
    let image = classify_image(f);
    let wpp = wpp_check(f);
    let v = to_value(&verdict);
    let mut text = vec![format!("{}: {:?} ({})", label(f), verdict.status, v["reason"].as_str().unwrap_or("?"))];
    text.push(format!("image: {:?}, {}", image.kind, image.evidence));
    text.push(format!("weak periodic point condition: {}", if wpp.holds() { "holds" } else { "fails" }));
    if let Some(r) = verdict.optimal_radius() {
        text.push(format!("weak inverses of radius {r}: {}", hexes(&verdict.inverses).join(" ")));
    }
    Outcome::ok(json!({ "verdict": v, "image": to_value(&image), "wpp": to_value(&wpp) }), text)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn tables(budgets: Budgets) -> Outcome {
    let g = golden();
    let mut mismatches = Vec::new();
    let mut text = vec!["conditions: ECA | SFT image | WPP | SPP".to_string()];
    let mut conditions = Vec::new();
    for row in &g.conditions {
        let f = LocalRule::eca(row.eca).expect("ECA number");
        let sft = classify_image(&f).kind != ImageKind::ProperSofic;
        let wpp = wpp_check(&f).holds();
        let spp = !matches!(spp_falsify(&f, budgets.spp_p, budgets.spp_mid_len), SppResult::Falsified { .. });
        for (col, got, want) in [("sft_image", sft, row.sft_image), ("wpp", wpp, row.wpp), ("spp", spp, row.spp)] {
            if got != want {
                mismatches.push(format!("ECA {} {col}: got {}, expected {}", row.eca, yes_no(got), yes_no(want)));
            }
        }
        text.push(format!("{} | {} | {} | {}", row.eca, yes_no(sft), yes_no(wpp), yes_no(spp)));
        conditions.push(json!({ "eca": row.eca, "sft_image": sft, "wpp": wpp, "spp": spp }));
    }
    text.push("optimal inverses: ECA | radius | count".to_string());
    let mut optimal = Vec::new();
    for row in &g.optimal_inverses {
        let f = LocalRule::eca(row.eca).expect("ECA number");
        let (radius, inverses) = match minimal_weak_inverse_radius(&f, budgets.r_max, budgets.p) {
            RadiusSearch::Found { radius, inverses } => (Some(radius), hexes(&inverses)),
            RadiusSearch::NoneUpTo { .. } => (None, Vec::new()),
        };
        if radius != Some(row.radius) {
            mismatches.push(format!("ECA {} radius: got {radius:?}, expected {}", row.eca, row.radius));
        }
        if inverses.len() != row.count {
            mismatches.push(format!("ECA {} count: got {}, expected {}", row.eca, inverses.len(), row.count));
        }
        let mut sorted = inverses.clone();
        sorted.sort();
        if let Some(expected) = g.expected_inverses(row.eca) {
            if sorted != expected {
                mismatches.push(format!("ECA {} inverse hex codes differ from the reference", row.eca));
            }
        }
        let shown = radius.map_or("none".to_string(), |r| r.to_string());
        text.push(format!("{} | {shown} | {}", row.eca, inverses.len()));
        optimal.push(json!({ "eca": row.eca, "radius": radius, "count": inverses.len(), "inverse_hex": inverses }));
    }
    if mismatches.is_empty() {
        text.push("all cells match".to_string());
    } else {
        text.extend(mismatches.iter().map(|m| format!("MISMATCH {m}")));
    }
    let code = if mismatches.is_empty() { 0 } else { 1 };
    let result = json!({ "conditions": conditions, "optimal_inverses": optimal, "mismatches": mismatches });
    Outcome { result, text, code }
}

fn write_dot(f: &LocalRule, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let stem = label(f).replace(' ', "_").to_lowercase();
    let graph = dir.join(format!("{stem}_debruijn.dot"));
    std::fs::write(&graph, DeBruijnGraph::new(f).to_dot(&format!("{stem}_debruijn")))?;
    let orphans = dir.join(format!("{stem}_orphans.dot"));
    std::fs::write(&orphans, image_language(f).complement().to_dot(&format!("{stem}_orphans")))?;
    Ok(vec![graph, orphans])
}

#[derive(Serialize)]
struct CsvRow {
    trial: u64,
    n: usize,
    m: usize,
    witness: bool,
    a: Option<u8>,
    b: Option<u8>,
    c: Option<u8>,
}

fn write_csv(path: &Path, records: &[TrialRecord]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(CsvRow {
            trial: r.trial,
            n: r.n_count,
            m: r.m_count,
            witness: r.witness.is_some(),
            a: r.witness.map(|x| x.a),
            b: r.witness.map(|x| x.b),
            c: r.witness.map(|x| x.c),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_specs() {
        assert_eq!(parse_rule("23").unwrap(), LocalRule::eca(23).unwrap());
        assert_eq!(parse_rule("hex:00070707@r2").unwrap(), LocalRule::from_hex("00070707", 2).unwrap());
        assert!(parse_rule("256").is_err());
        assert!(parse_rule("hex:0007@r2").is_err());
        assert!(parse_rule("hex:00070707").is_err());
        assert!(parse_rule("rule30").is_err());
    }
}
