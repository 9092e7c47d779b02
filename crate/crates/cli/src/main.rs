mod commands;
mod error;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{
    BracketArgs, CgcArgs, LambdaArgs, NormalFormArgs, ProductArgs, TableArgs, TransvectantArgs,
};
use verify::VerifyArgs;

#[derive(Parser)]
#[command(
    name = "nilnorm",
    version,
    about = "Exact structure constants and normal forms for nilpotent Euler-family vector fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Upper bound on worker threads for `table` and `verify`.
    #[arg(long, env = "NILNORM_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// One rational Clebsch-Gordan coefficient.
    Cgc(CgcArgs),
    /// A transvectant expanded over the tensor basis.
    Transvectant(TransvectantArgs),
    /// One orbit-product coefficient.
    Lambda(LambdaArgs),
    /// Product of two orbit functions over the orbit basis.
    Product(ProductArgs),
    /// Bracket of two basis elements.
    Bracket(BracketArgs),
    /// Every bracket up to a degree bound.
    Table(TableArgs),
    /// Multi-level normal form of a vector field.
    Normalform(NormalFormArgs),
    /// Closed forms against direct computation.
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        // Only fails if a pool already exists, which cannot happen this early.
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }
    let result = match &cli.command {
        Command::Cgc(a) => commands::cgc(a, cli.format),
        Command::Transvectant(a) => commands::transvectant(a, cli.format),
        Command::Lambda(a) => commands::lambda(a, cli.format),
        Command::Product(a) => commands::product(a, cli.format),
        Command::Bracket(a) => commands::bracket(a, cli.format),
        Command::Table(a) => commands::table(a, cli.format),
        Command::Normalform(a) => commands::normalform(a, cli.format),
        Command::Verify(a) => verify::run(a, cli.format),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
