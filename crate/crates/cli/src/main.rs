use clap::Parser;

fn main() {
    let cli = lhpvi_cli::Cli::parse();
    match lhpvi_cli::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
