use clap::Parser;
use wpbound::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
