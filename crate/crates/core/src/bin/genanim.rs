fn main() {
    std::process::exit(genanim::cli::main_with_args(std::env::args_os()));
}
