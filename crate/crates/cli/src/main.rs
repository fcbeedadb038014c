use clap::{Parser, Subcommand};
use sqs_cli::commands::{
    EvaluateArgs, GenDataArgs, GeneralizationArgs, PreprocessArgs, ReportArgs, ScalingArgs, SearchArgs,
};
use sqs_cli::{CliError, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "sqs", version, about = "Evolved quantum-kernel search and evaluation")]
struct Cli {
    /// Worker thread cap.
    #[arg(long, global = true, env = "SQS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset and its provenance sidecar.
    GenData(GenDataArgs),
    /// Split a dataset and fit the feature reduction on its training part.
    Preprocess(PreprocessArgs),
    /// Evolve a feature map on training data.
    Search(SearchArgs),
    /// Train and score SVMs on a feature map and optional baselines.
    Evaluate(EvaluateArgs),
    /// Search and evaluate on stratified subsamples of increasing size.
    ScalingBench(ScalingArgs),
    /// Search on a small training split and evaluate on the rest.
    GeneralizationBench(GeneralizationArgs),
    /// Render result files as a table.
    Report(ReportArgs),
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenData(a) => sqs_cli::gen_data(a),
        Command::Preprocess(a) => sqs_cli::preprocess(a),
        Command::Search(a) => sqs_cli::search(a),
        Command::Evaluate(a) => sqs_cli::evaluate(a).map(drop),
        Command::ScalingBench(a) => sqs_cli::scaling_bench(a).map(drop),
        Command::GeneralizationBench(a) => sqs_cli::generalization_bench(a).map(drop),
        Command::Report(a) => sqs_cli::report_cmd(a).map(drop),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            std::process::exit(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is built once");
    }
    if let Err(e) = dispatch(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
