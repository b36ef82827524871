mod args;
mod output;
mod run;

use clap::error::ErrorKind;
use clap::Parser;
use optosqueeze::error::Error;
use std::process::ExitCode;

use args::{Cli, Command};

fn dispatch(cli: Cli) -> run::RunResult {
    match cli.command {
        Command::Point {
            config,
            output,
            qubit_delta_q_ghz,
            qubit_lambda_q_mhz,
            qubit_convention,
        } => run::run_point(&config, &output, qubit_delta_q_ghz, qubit_lambda_q_mhz, qubit_convention),
        Command::Fig2 { config, output, p_min, p_max, points } => {
            run::run_fig2(&config, &output, p_min, p_max, points)
        }
        Command::Fig3 {
            config,
            output,
            delta_min,
            delta_max,
            lambda_min,
            lambda_max,
            grid,
            coupling_g,
        } => run::run_fig3(
            &config, &output, delta_min, delta_max, lambda_min, lambda_max, grid, coupling_g,
        ),
        Command::Fig4 {
            config,
            output,
            powers,
            n_th_max,
            n_th_points,
            n_th_values,
            p_min,
            p_max,
            p_points,
            analytic_overlay,
        } => run::run_fig4(
            &config,
            &output,
            &powers,
            n_th_max,
            n_th_points,
            &n_th_values,
            p_min,
            p_max,
            p_points,
            analytic_overlay,
        ),
        Command::Fig5 { config, output, drive_min, drive_max, points, n_cav, n_mech } => {
            run::run_fig5(&config, &output, drive_min, drive_max, points, n_cav, n_mech)
        }
        Command::Sweep {
            config,
            output,
            variable,
            start,
            stop,
            points,
            log,
            optimal_detuning,
            analytic_overlay,
        } => run::run_sweep(
            &config,
            &output,
            variable,
            start,
            stop,
            points,
            log,
            optimal_detuning,
            analytic_overlay,
        ),
        Command::EtaFromQubit { output, delta_q_ghz, lambda_q_mhz, convention, omega_m_hz } => {
            run::run_eta_from_qubit(&output, delta_q_ghz, lambda_q_mhz, convention, omega_m_hz)
        }
        Command::StabilityScan { config, output, g0_min, g0_max, points, drive_amplitude } => {
            run::run_stability_scan(&config, &output, g0_min, g0_max, points, drive_amplitude)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) => ExitCode::from(1),
                Error::Capacity(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
