use clap::Parser;
use gridcast_cli::Cli;

fn main() {
    // clap exits with code 2 on usage errors; runtime failures exit 1.
    let cli = Cli::parse();
    if let Err(err) = cli.command.run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
