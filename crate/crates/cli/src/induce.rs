use std::path::PathBuf;

use lep_core::{induce_grammar, read_trees};

use crate::{read_file, CliError};

pub fn run(treebank: &PathBuf, out: &PathBuf, prune: bool) -> Result<u8, CliError> {
    let text = read_file(treebank)?;
    let file = read_trees(&text).map_err(|e| CliError::Data(format!("{}: {e}", treebank.display())))?;
    for w in &file.warnings {
        eprintln!("{}: {w}", treebank.display());
    }
    let grammar =
        induce_grammar(&file.trees).map_err(|e| CliError::Data(format!("{}: {e}", treebank.display())))?;
    let mean = grammar.mean_frequency();
    let final_grammar = if prune {
        let pruned = grammar.prune_by_average_frequency();
        println!(
            "trees: {}\nrules: {} -> {} (mean frequency {:.2})\nstart: {}",
            file.trees.len(),
            grammar.rules().len(),
            pruned.rules().len(),
            mean,
            grammar.start(),
        );
        pruned
    } else {
        println!(
            "trees: {}\nrules: {} (mean frequency {:.2})\nstart: {}",
            file.trees.len(),
            grammar.rules().len(),
            mean,
            grammar.start(),
        );
        grammar
    };
    for d in final_grammar.validate() {
        eprintln!("{d}");
    }
    std::fs::write(out, final_grammar.to_text())
        .map_err(|error| CliError::Io { path: out.clone(), error })?;
    println!("wrote {}", out.display());
    Ok(0)
}
