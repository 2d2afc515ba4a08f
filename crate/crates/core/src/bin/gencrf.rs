use clap::{Parser, ValueEnum};
use gencrf::cli::{self, CliError, Report};
use std::io::Read;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Human,
    Json,
}

/// Exact checks of generalized CRF structures on framed Courant algebroids.
#[derive(Parser, Debug)]
#[command(name = "gencrf", version)]
struct Args {
    /// validate-algebra, check-sgf, check-crf, check-normal-pair,
    /// check-morimoto, build-product, check-contact, check-bicontact,
    /// check-bly, obstructions, catalog, or run (every declared check).
    command: String,
    /// Document path; `-` or absent reads standard input.
    file: Option<String>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Truncation order for every ring.
    #[arg(long)]
    jet_order: Option<usize>,
    /// Catalog entry name.
    #[arg(long)]
    entry: Option<String>,
    /// Catalog parameters, `k=v`; repeatable.
    #[arg(long)]
    params: Vec<String>,
    /// Run the command on this object instead of the declared checks.
    #[arg(long)]
    target: Option<String>,
}

fn report(args: &Args) -> Result<Report, CliError> {
    if args.command == "catalog" {
        return cli::run_catalog(args.entry.as_deref(), &args.params, args.jet_order);
    }
    let text = match args.file.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Command(format!("reading standard input: {e}")))?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Command(format!("reading {p}: {e}")))?,
    };
    let doc = cli::parse(&text)?;
    cli::run(&doc, &args.command, args.target.as_deref(), args.jet_order)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match report(&args) {
        Ok(r) => {
            match args.format {
                Format::Human => print!("{}", r.human()),
                Format::Json => println!("{}", r.json()),
            }
            if r.has_errors() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("gencrf: {e}");
            ExitCode::from(1)
        }
    }
}
