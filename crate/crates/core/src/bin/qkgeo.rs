use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var(qkgeo::cli::SEED_ENV).ok();
    ExitCode::from(qkgeo::cli::main_with_args(std::env::args_os(), seed))
}
