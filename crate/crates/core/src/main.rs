use clap::Parser;
use hypext::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
