use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use lep_core::{
    parse_normal_logged, recover_with, Cost, EngineOptions, Grammar, NormalOutcome, RunConfig,
    TaggedSentence,
};

use crate::{read_file, CliError, RobustMode, CONFIG_ENV};

pub struct ParseArgs {
    pub grammar: PathBuf,
    pub input: PathBuf,
    pub config: Option<PathBuf>,
    pub max_trees: usize,
    pub budget: Option<String>,
    pub robust: RobustMode,
    pub jobs: usize,
    pub dump_chart: bool,
}

struct SentenceResult {
    id: usize,
    status: Status,
    best_error: Option<Cost>,
    trees: Vec<String>,
    edges: u64,
    seconds: f64,
    diagnostics: Vec<String>,
    dumps: Vec<(String, String)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Normal,
    Recovered,
    Failed,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Normal => "normal",
            Status::Recovered => "recovered",
            Status::Failed => "failed",
        }
    }
}

pub fn run(args: &ParseArgs) -> Result<u8, CliError> {
    let grammar_text = read_file(&args.grammar)?;
    let grammar = Grammar::from_text(&grammar_text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.grammar.display())))?;

    let config = load_config(args.config.as_ref())?;
    let grammar = config
        .apply_to(grammar)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for d in grammar.validate() {
        eprintln!("{d}");
    }
    config
        .params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    for notice in config.params.ordering_notices() {
        eprintln!("{notice}");
    }

    let budget = match &args.budget {
        Some(text) => Some(text.parse::<Cost>().map_err(|e| CliError::Config(e.to_string()))?),
        None => config.budget,
    };
    let opts = EngineOptions {
        budget,
        keep_log: args.dump_chart,
        phrase_mutation: config.params.beta_mutation.is_some(),
        ..Default::default()
    };

    let input_text = read_file(&args.input)?;
    let sentences = lep_core::read_tagged(&input_text)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;

    let runner = |sentence: &TaggedSentence| {
        run_sentence(&grammar, &config, &opts, args, sentence)
    };
    let results: Vec<SentenceResult> = if args.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| CliError::Data(e.to_string()))?;
        pool.install(|| sentences.par_iter().map(runner).collect())
    } else {
        sentences.iter().map(runner).collect()
    };

    let mut all_analyzed = true;
    for r in &results {
        print!(
            "# sent {} status={} ",
            r.id,
            r.status.name(),
        );
        if let Some(e) = r.best_error {
            print!("e={e} ");
        }
        println!("trees={} edges={} time_ms={:.3}", r.trees.len(), r.edges, r.seconds * 1e3);
        for t in &r.trees {
            println!("{t}");
        }
        for d in &r.diagnostics {
            eprintln!("# sent {}: {d}", r.id);
        }
        for (label, dump) in &r.dumps {
            eprintln!("# chart sent {} ({label})", r.id);
            eprint!("{dump}");
        }
        if r.status == Status::Failed {
            all_analyzed = false;
        }
    }
    Ok(if all_analyzed { 0 } else { 1 })
}

fn load_config(flag: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    let path = flag.cloned().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            let text = read_file(&p)?;
            RunConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
        None => Ok(RunConfig::default()),
    }
}

fn run_sentence(
    grammar: &Grammar,
    config: &RunConfig,
    opts: &EngineOptions,
    args: &ParseArgs,
    sentence: &TaggedSentence,
) -> SentenceResult {
    let started = Instant::now();
    let mut result = SentenceResult {
        id: sentence.id,
        status: Status::Failed,
        best_error: None,
        trees: Vec::new(),
        edges: 0,
        seconds: 0.0,
        diagnostics: Vec::new(),
        dumps: Vec::new(),
    };
    if sentence.tags.is_empty() {
        result.diagnostics.push("empty sentence".to_string());
        return result;
    }

    let normal = if args.robust != RobustMode::On {
        match parse_normal_logged(grammar, &sentence.tags, args.dump_chart) {
            Ok(outcome) => {
                result.edges += outcome.chart().stats.admissions();
                if args.dump_chart {
                    result
                        .dumps
                        .push(("normal".to_string(), outcome.chart().dump(grammar)));
                }
                Some(outcome)
            }
            Err(e) => {
                result.diagnostics.push(e.to_string());
                return result;
            }
        }
    } else {
        None
    };

    match normal {
        Some(NormalOutcome::Success { trees, .. }) => {
            result.status = Status::Normal;
            result.best_error = trees.first().map(|t| t.error);
            result.trees = trees.iter().take(args.max_trees).map(|t| t.to_string()).collect();
        }
        other => {
            let seed_chart = match &other {
                Some(NormalOutcome::Failure { chart, diagnostics }) => {
                    result.diagnostics.extend(diagnostics.iter().cloned());
                    Some(chart)
                }
                _ => None,
            };
            if args.robust == RobustMode::Off {
                result.status = Status::Failed;
            } else {
                match recover_with(
                    grammar,
                    &sentence.tags,
                    &config.params,
                    seed_chart,
                    args.max_trees,
                    opts,
                ) {
                    Ok(rec) => {
                        result.edges += rec.stats.admissions();
                        if args.dump_chart {
                            result.dumps.push(("robust".to_string(), rec.chart.dump(grammar)));
                        }
                        result.diagnostics.extend(rec.diagnostics.iter().cloned());
                        if rec.trees.is_empty() {
                            result.status = Status::Failed;
                        } else {
                            result.status = if rec.trees[0].error.is_zero() {
                                Status::Normal
                            } else {
                                Status::Recovered
                            };
                            result.best_error = Some(rec.trees[0].error);
                            result.trees = rec.trees.iter().map(|t| t.to_string()).collect();
                        }
                    }
                    Err(e) => result.diagnostics.push(e.to_string()),
                }
            }
        }
    }
    result.seconds = started.elapsed().as_secs_f64();
    result
}
