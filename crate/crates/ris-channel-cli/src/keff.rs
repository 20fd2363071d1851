//! `keff-sweep`: estimated inverse shape factor across a grid of element
//! counts and power ratios, next to the analytic inverse line, plus a per-M
//! regression summary.

use num_complex::Complex64;

use ris_channel::montecarlo::{run_trials, ScenarioParams};
use ris_channel::statistics::{effective_moments, effective_shape, fit_line, keff_inverse_line};

use crate::config::{self, KeffConfig};
use crate::output::{fint, fnum, plot_script, resolved, Csv};
use crate::{Failure, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg: KeffConfig = config::load(&args.config)?;
    let trials = args.trials.unwrap_or(100_000);
    if trials == 0 {
        return Err(config::bad("--trials", "needs at least one trial"));
    }
    let sweep = &cfg.sweep;
    if sweep.m_values.is_empty() {
        return Err(config::bad("sweep.m_values", "must not be empty"));
    }
    if sweep.k_0_values.is_empty() {
        return Err(config::bad("sweep.k_0_values", "must not be empty"));
    }
    let span = sweep.residual_span_deg.to_radians();

    // Validate the whole grid before burning time on any point.
    let mut scenarios = Vec::new();
    for &m in &sweep.m_values {
        let line = keff_inverse_line(m, span)
            .map_err(|e| Failure::Config(format!("sweep: {e}")))?;
        let mut row = Vec::new();
        for &k_0 in &sweep.k_0_values {
            let params = ScenarioParams::from_power_ratio(m, sweep.n_paths, k_0, span)
                .map_err(|e| Failure::Config(format!("sweep: {e}")))?;
            row.push((k_0, params));
        }
        scenarios.push((m, line, row));
    }

    let header = resolved(&cfg);
    let mut sweep_csv = Csv::new("keff-sweep", args.seed, Some(trials), &header);
    sweep_csv.columns(&["m", "k_0", "inv_k_0", "inv_k_hat", "inv_k_line"]);
    let mut fit_csv = Csv::new("keff-sweep", args.seed, Some(trials), &header);
    fit_csv.columns(&[
        "m",
        "slope",
        "intercept",
        "analytic_slope",
        "analytic_intercept",
    ]);

    for (i, (m, (slope_want, intercept_want), row)) in scenarios.iter().enumerate() {
        let mut xs = Vec::with_capacity(row.len());
        let mut ys = Vec::with_capacity(row.len());
        for (j, (k_0, params)) in row.iter().enumerate() {
            let seed = args.seed + (i * row.len() + j) as u64;
            let values: Vec<Complex64> = run_trials(params, seed, trials)
                .iter()
                .map(|t| t.value())
                .collect();
            let shape = effective_shape(
                &effective_moments(&values).map_err(|e| Failure::Infeasible(e.to_string()))?,
            )
            .map_err(|e| Failure::Infeasible(e.to_string()))?;
            let inv_k_0 = 1.0 / k_0;
            let inv_k_hat = 1.0 / shape.k_factor;
            xs.push(inv_k_0);
            ys.push(inv_k_hat);
            sweep_csv.row(&[
                fint(*m),
                fnum(*k_0),
                fnum(inv_k_0),
                fnum(inv_k_hat),
                fnum(slope_want * inv_k_0 + intercept_want),
            ]);
        }
        let (slope, intercept) =
            fit_line(&xs, &ys).map_err(|e| Failure::Infeasible(e.to_string()))?;
        fit_csv.row(&[
            fint(*m),
            fnum(slope),
            fnum(intercept),
            fnum(*slope_want),
            fnum(*intercept_want),
        ]);
    }

    let sweep_path = format!("{}_sweep.csv", args.out);
    sweep_csv.write(&sweep_path)?;
    fit_csv.write(&format!("{}_fit.csv", args.out))?;
    if args.plot_script {
        plot_script(
            &format!("{}_sweep.gp", args.out),
            &sweep_path,
            "set xlabel \"1 / K_0\"\n\
             set ylabel \"1 / K_eff\"\n\
             plot csv using 3:4 with points title \"estimated\", \\\n\
                  csv using 3:5 with lines title \"analytic\"",
        )?;
    }
    Ok(())
}
