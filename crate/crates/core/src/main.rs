fn main() -> std::process::ExitCode {
    efg_cyclic::cli::main()
}
