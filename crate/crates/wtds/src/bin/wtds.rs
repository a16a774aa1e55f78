use clap::Parser;
use wtds::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
