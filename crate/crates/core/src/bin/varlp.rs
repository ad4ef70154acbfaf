fn main() -> std::process::ExitCode {
    varlp::cli::main()
}
