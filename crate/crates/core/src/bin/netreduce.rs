fn main() -> std::process::ExitCode {
    netreduce::cli::run()
}
