fn main() -> std::process::ExitCode {
    polarmol::scan::main()
}
