fn main() -> std::process::ExitCode {
    resonance_poles::cli::main()
}
