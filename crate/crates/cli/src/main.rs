use clap::Parser;

fn main() {
    let cli = spdrange_cli::Cli::parse();
    if let Err(err) = spdrange_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(spdrange_cli::exit_code(&err));
    }
}
