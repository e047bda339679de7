use clap::Parser;
use pdqi_cli::{main_with, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    main_with(Cli::parse())
}
