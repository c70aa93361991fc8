fn main() {
    if let Err(e) = peergraph::cli::run(std::env::args_os()) {
        eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
        std::process::exit(1);
    }
}
