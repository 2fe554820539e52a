use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match laglab::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // exit code 2 is reserved for unparseable input files
            let _ = e.print();
            std::process::exit(if e.use_stderr() { laglab::cli::EXIT_OTHER } else { laglab::cli::EXIT_OK });
        }
    };
    std::process::exit(laglab::cli::run(cli));
}
