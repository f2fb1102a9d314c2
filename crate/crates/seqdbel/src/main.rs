use std::process::ExitCode;

fn main() -> ExitCode {
    seqdbel::cli::run()
}
