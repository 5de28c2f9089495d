use clap::Parser;
use cms_cli::{exit_code, run, Cli, RunConfig};

fn main() {
    let code = match RunConfig::from_cli(Cli::parse()) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("cms: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}
