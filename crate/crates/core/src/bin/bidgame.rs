fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = bidgame::cli::run(args, &mut std::io::stdout().lock(), &mut std::io::stdin().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
