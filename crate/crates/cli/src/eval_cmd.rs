use std::path::PathBuf;

use lep_core::{accuracy, brackets_of, parse_annotated, read_trees, SentenceScore};

use crate::{read_file, CliError};

/// One sentence block from a `lep parse` output file: the header fields
/// and the first (best) analysis.
struct CandidateSentence {
    id: usize,
    failed: bool,
    tree: Option<String>,
    edges: Option<u64>,
    seconds: Option<f64>,
}

pub fn run(gold_path: &PathBuf, candidate_path: &PathBuf) -> Result<u8, CliError> {
    let gold_text = read_file(gold_path)?;
    let gold = read_trees(&gold_text)
        .map_err(|e| CliError::Data(format!("{}: {e}", gold_path.display())))?;
    let candidate_text = read_file(candidate_path)?;
    let candidates = read_candidates(&candidate_text, candidate_path)?;

    if candidates.len() != gold.trees.len() {
        let first = candidates.len().min(gold.trees.len()) + 1;
        return Err(CliError::Data(format!(
            "sentence {first}: candidate file has {} sentences but gold treebank has {}",
            candidates.len(),
            gold.trees.len()
        )));
    }

    let mut scores = Vec::new();
    let mut excluded = 0usize;
    for (cand, gold_tree) in candidates.iter().zip(&gold.trees) {
        if cand.failed {
            excluded += 1;
            continue;
        }
        let Some(tree_text) = &cand.tree else {
            excluded += 1;
            continue;
        };
        let tree = parse_annotated(tree_text)
            .map_err(|e| CliError::Data(format!("sentence {}: {e}", cand.id)))?;
        let candidate = tree.brackets();
        let gold_brackets = brackets_of(gold_tree);
        if candidate.tokens != gold_brackets.tokens {
            return Err(CliError::Data(format!(
                "sentence {}: candidate spans {} tokens but gold spans {}",
                cand.id, candidate.tokens, gold_brackets.tokens
            )));
        }
        scores.push(SentenceScore {
            candidate,
            gold: gold_brackets,
            edges: cand.edges,
            seconds: cand.seconds,
        });
    }

    if scores.is_empty() {
        return Err(CliError::Data("no scorable sentences (all excluded)".to_string()));
    }
    let report = accuracy(&scores).map_err(|e| CliError::Data(e.to_string()))?;
    print!("{report}");
    println!("{:<34} {excluded}", "excluded (failed) sentences");
    println!();
    print!("{}", report.machine_block());
    println!("excluded={excluded}");
    Ok(0)
}

fn read_candidates(text: &str, path: &std::path::Path) -> Result<Vec<CandidateSentence>, CliError> {
    let mut out: Vec<CandidateSentence> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix("# sent ") {
            let mut fields = header.split_whitespace();
            let id: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad_line(path, lineno))?;
            let mut failed = true;
            let mut edges = None;
            let mut seconds = None;
            for field in fields {
                if let Some((k, v)) = field.split_once('=') {
                    match k {
                        "status" => failed = v == "failed",
                        "edges" => edges = v.parse().ok(),
                        "time_ms" => seconds = v.parse::<f64>().ok().map(|ms| ms / 1e3),
                        _ => {}
                    }
                }
            }
            out.push(CandidateSentence { id, failed, tree: None, edges, seconds });
        } else if line.starts_with('#') {
            continue;
        } else {
            let current = out.last_mut().ok_or_else(|| bad_line(path, lineno))?;
            if current.tree.is_none() {
                current.tree = Some(line.to_string());
            }
        }
    }
    Ok(out)
}

fn bad_line(path: &std::path::Path, lineno: usize) -> CliError {
    CliError::Data(format!(
        "{}:{}: expected `# sent <id> ...` headers before analyses",
        path.display(),
        lineno + 1
    ))
}
