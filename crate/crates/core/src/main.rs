fn main() -> std::process::ExitCode {
    primewave::cli::main()
}
