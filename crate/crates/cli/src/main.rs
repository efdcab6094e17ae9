use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use log::error;
use nagaolab_cli::config::CACHE_ENV;
use nagaolab_cli::{run, Args, ExperimentConfig, Interrupt};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let env_cache = std::env::var_os(CACHE_ENV).map(Into::into);
    let config = match ExperimentConfig::from_args(args, env_cache) {
        Ok(c) => c,
        Err(e) => {
            error!("{}", e);
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let stop = Interrupt::new();
    {
        let stop = stop.clone();
        if let Err(e) = ctrlc::set_handler(move || stop.trigger()) {
            log::warn!("no interrupt handler: {}", e);
        }
    }

    let report = match run(&config, &stop) {
        Ok(r) => r,
        Err(e) => {
            error!("{}", e);
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let written = match &config.output {
        Some(path) => report.write(path, config.format),
        None => std::io::stdout()
            .write_all(report.render(config.format).as_bytes())
            .map_err(|e| nagaolab_cli::CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
