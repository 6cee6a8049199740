fn main() {
    std::process::exit(lensduel::cli_io::run_from_env());
}
