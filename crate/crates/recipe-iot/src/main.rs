fn main() {
    std::process::exit(recipe_iot::cli::run(std::env::args_os()));
}
