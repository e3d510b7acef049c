use clap::Parser;
use cv_triparty_cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = cv_triparty_cli::run(&cli) {
        eprintln!("cv-triparty: {e}");
        std::process::exit(e.exit_code());
    }
}
