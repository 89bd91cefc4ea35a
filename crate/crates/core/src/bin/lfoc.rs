fn main() -> std::process::ExitCode {
    lfoc::cli::main()
}
