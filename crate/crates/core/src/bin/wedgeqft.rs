use clap::Parser;
use wedgeqft::cli::{run, CliArgs};

fn main() {
    std::process::exit(run(&CliArgs::parse()));
}
