use clap::Parser;
use steerseq_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match cli.into_config() {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
