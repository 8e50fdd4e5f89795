use std::process::ExitCode;

fn main() -> ExitCode {
    photon_gauntlet::cli::main()
}
