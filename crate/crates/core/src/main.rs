use std::io::Write;

fn main() {
    let outcome = queens_lab::cli::dispatch(std::env::args_os(), &mut std::io::stdin());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(outcome.exit_code);
}
