use clap::Parser;
use stringcap_cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("stringcap: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(run(cli));
}
