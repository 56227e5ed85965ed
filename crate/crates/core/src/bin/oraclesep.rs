fn main() -> std::process::ExitCode {
    oraclesep::cli::main()
}
