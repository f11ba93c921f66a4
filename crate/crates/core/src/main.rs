fn main() -> std::process::ExitCode {
    semibfs::cli::main()
}
