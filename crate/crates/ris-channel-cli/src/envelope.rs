//! `envelope-dist`: per-trial envelope samples for one scenario, plus a fit
//! summary holding the complex-moment fit, the magnitude-distribution fit,
//! and the closed-form parameters side by side.

use num_complex::Complex64;

use ris_channel::montecarlo::{run_trials, ScenarioParams};
use ris_channel::statistics::{
    effective_moments, effective_shape, fit_rician, keff_discrete, omega_discrete,
};

use crate::config::{self, EnvelopeConfig};
use crate::output::{fint, fnum, plot_script, resolved, Csv};
use crate::{Failure, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg: EnvelopeConfig = config::load(&args.config)?;
    let trials = args.trials.unwrap_or(10_000);
    if trials < 100 {
        return Err(config::bad("--trials", "needs at least 100 for a fit"));
    }

    let s = &cfg.scenario;
    let span = s.residual_span_deg.to_radians();
    let params = ScenarioParams::from_power_ratio(s.m, s.n_paths, s.k_0, span)
        .map_err(|e| Failure::Config(format!("scenario: {e}")))?;

    let samples = run_trials(&params, args.seed, trials);
    let values: Vec<Complex64> = samples.iter().map(|t| t.value()).collect();
    let magnitudes: Vec<f64> = samples.iter().map(|t| t.magnitude()).collect();

    let complex_fit = effective_shape(
        &effective_moments(&values).map_err(|e| Failure::Infeasible(e.to_string()))?,
    )
    .map_err(|e| Failure::Infeasible(e.to_string()))?;
    let magnitude_fit = fit_rician(&magnitudes).map_err(|e| Failure::Infeasible(e.to_string()))?;
    let k_analytic = keff_discrete(s.m, span, s.k_0);
    let omega_analytic = omega_discrete(s.m, span, 1.0, s.n_paths, params.omega_d);

    let header = resolved(&cfg);
    let mut samples_csv = Csv::new("envelope-dist", args.seed, Some(trials), &header);
    samples_csv.columns(&["trial", "re", "im", "magnitude"]);
    for (trial, sample) in samples.iter().enumerate() {
        let value = sample.value();
        samples_csv.row(&[
            fint(trial),
            fnum(value.re),
            fnum(value.im),
            fnum(sample.magnitude()),
        ]);
    }

    let mut fit_csv = Csv::new("envelope-dist", args.seed, Some(trials), &header);
    fit_csv.columns(&["method", "k", "omega_p"]);
    fit_csv.row(&[
        "complex-moment".to_string(),
        fnum(complex_fit.k_factor),
        fnum(complex_fit.omega_p),
    ]);
    fit_csv.row(&[
        "magnitude-fit".to_string(),
        fnum(magnitude_fit.k_factor),
        fnum(magnitude_fit.omega_p),
    ]);
    fit_csv.row(&[
        "analytic".to_string(),
        fnum(k_analytic),
        fnum(omega_analytic),
    ]);

    let samples_path = format!("{}_samples.csv", args.out);
    let fit_path = format!("{}_fit.csv", args.out);
    samples_csv.write(&samples_path)?;
    fit_csv.write(&fit_path)?;
    if args.plot_script {
        plot_script(
            &format!("{}_samples.gp", args.out),
            &samples_path,
            "binwidth = 0.5\n\
             bin(x, w) = w * floor(x / w) + w / 2.0\n\
             set xlabel \"envelope magnitude\"\n\
             set ylabel \"count\"\n\
             plot csv using (bin($4, binwidth)):(1.0) smooth freq with boxes title \"samples\"",
        )?;
    }
    Ok(())
}
