//! `ma-sumrate`: ergodic sum rate of NOMA, FDMA, and TDMA swept over the
//! steering angle, with the analytic per-user outage alongside. All three
//! schemes share the channel draws at each angle, so their comparison is
//! paired rather than independently noisy.

use ris_channel::multiaccess::{sum_rate, user_outage, MaScheme};

use crate::config::{self, SumRateConfig};
use crate::outage::check_decodable;
use crate::output::{fnum, plot_script, resolved, Csv};
use crate::{Failure, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg: SumRateConfig = config::load(&args.config)?;
    let trials = args.trials.unwrap_or(10_000);
    if trials == 0 {
        return Err(config::bad("--trials", "needs at least one trial"));
    }
    let scenario = cfg.multiaccess.scenario()?;
    check_decodable(&scenario)?;
    let angles = config::grid(
        cfg.sweep.start_deg,
        cfg.sweep.stop_deg,
        cfg.sweep.step_deg,
        "sweep.step_deg",
    )?;

    let mut csv = Csv::new("ma-sumrate", args.seed, Some(trials), &resolved(&cfg));
    let mut names = vec![
        "angle_deg".to_string(),
        "scheme".to_string(),
        "sum_rate_bps_hz".to_string(),
    ];
    for user in 0..scenario.users.len() {
        names.push(format!("user{user}_outage"));
    }
    csv.columns(&names);

    let schemes = [
        (MaScheme::Noma, "noma"),
        (MaScheme::Fdma, "fdma"),
        (MaScheme::Tdma, "tdma"),
    ];
    for (i, &angle_deg) in angles.iter().enumerate() {
        let target = angle_deg.to_radians();
        for (scheme, name) in schemes {
            let rate = sum_rate(&scenario, target, scheme, trials, args.seed + i as u64)
                .map_err(|e| Failure::Infeasible(e.to_string()))?;
            let mut row = vec![fnum(angle_deg), name.to_string(), fnum(rate)];
            for user in 0..scenario.users.len() {
                let outage = user_outage(&scenario, user, target, scheme)
                    .map_err(|e| Failure::Infeasible(e.to_string()))?
                    .probability();
                row.push(fnum(outage));
            }
            csv.row(&row);
        }
    }

    let csv_path = format!("{}.csv", args.out);
    csv.write(&csv_path)?;
    if args.plot_script {
        plot_script(
            &format!("{}.gp", args.out),
            &csv_path,
            "set xlabel \"target angle (deg)\"\n\
             set ylabel \"sum rate (bit/s/Hz)\"\n\
             plot csv using 1:(strcol(2) eq \"noma\" ? $3 : 1/0) with linespoints title \"NOMA\", \\\n\
                  csv using 1:(strcol(2) eq \"fdma\" ? $3 : 1/0) with linespoints title \"FDMA\", \\\n\
                  csv using 1:(strcol(2) eq \"tdma\" ? $3 : 1/0) with linespoints title \"TDMA\"",
        )?;
    }
    Ok(())
}
