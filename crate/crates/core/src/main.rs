use clap::Parser;

fn main() {
    let cli = linkforge::cli::Cli::parse();
    let code = linkforge::cli::run(cli, &mut std::io::stdout().lock());
    std::process::exit(code);
}
