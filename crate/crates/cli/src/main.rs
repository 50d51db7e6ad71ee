use clap::Parser;

fn main() {
    let cli = pathsum_cli::Cli::parse();
    std::process::exit(pathsum_cli::run(&cli));
}
