use clap::Parser;

fn main() {
    let args = beltrami_cli::Args::parse();
    std::process::exit(beltrami_cli::execute(&args));
}
