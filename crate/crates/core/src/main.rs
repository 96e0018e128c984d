fn main() -> std::process::ExitCode {
    dispersal::cli::run(std::env::args_os()).into()
}
