fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let color = lampar::cli::color_enabled();
    let code = lampar::cli::main_with(&args, &mut std::io::stdout(), &mut std::io::stderr(), color);
    std::process::exit(code);
}
