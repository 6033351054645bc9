use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nftsoliton::cli::{self, Command, JobSpec};

/// Multi-soliton generation with a fast inverse nonlinear Fourier transform.
#[derive(Parser)]
#[command(name = "nftsoliton", version)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Io {
    /// Job file: {"lambdas": [[re, im], ...], "delta": .., "D": .., "omega_c": ..}
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct IoWithInput {
    #[command(flatten)]
    io: Io,
    /// Existing CSV to process instead of synthesizing from the spec.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build (a, b) for the spectrum and invert it to a signal.
    Synthesize(Io),
    /// Invert a pair CSV (i,re_a,im_a,re_b,im_b) to a signal.
    Invert(IoWithInput),
    /// Forward transform of a signal CSV (n,t,re_Q,im_Q).
    Forward(IoWithInput),
    /// Synthesize, invert, transform back and compare with the predictions.
    Roundtrip(Io),
    /// Many-samples predictions for the reflection and norming constants.
    Asymptotics(Io),
    /// Per-sample timings of the inversions over a range of D.
    Bench(Io),
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (cmd, io, input) = match args.command {
        Cmd::Synthesize(io) => (Command::Synthesize, io, None),
        Cmd::Invert(x) => (Command::Invert, x.io, x.input),
        Cmd::Forward(x) => (Command::Forward, x.io, x.input),
        Cmd::Roundtrip(io) => (Command::Roundtrip, io, None),
        Cmd::Asymptotics(io) => (Command::Asymptotics, io, None),
        Cmd::Bench(io) => (Command::Bench, io, None),
    };
    let result =
        JobSpec::from_path(&io.spec).and_then(|job| cli::run(cmd, &job, &io.out, input.as_deref()));
    match result {
        Ok(_) => {
            println!(
                "{}: wrote {}",
                cmd.name(),
                io.out.join("report.json").display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
