use clap::Parser;
use monopsony_cli::{run, Cli, RunConfig};

fn main() {
    let cli = Cli::parse();
    let result = RunConfig::resolve(cli.command, cli.knobs).and_then(|config| run(&config));
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
