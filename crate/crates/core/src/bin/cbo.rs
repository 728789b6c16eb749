fn main() -> std::process::ExitCode {
    cbo_core::cli::main()
}
