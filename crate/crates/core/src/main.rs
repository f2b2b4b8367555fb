fn main() -> std::process::ExitCode {
    porec::cli::main()
}
