fn main() { std::process::exit(nsak::cli::run()); }
