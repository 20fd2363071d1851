//! `outage`: Monte Carlo outage next to the analytic curve, one row per
//! (SNR, curve) pair. Three curve families share the command: random-phase
//! envelopes, one-bit envelopes, and the per-user NOMA pair. The envelope
//! kinds simulate the physical surface; outage is reported against the mean
//! SNR with the decode threshold fixed at 0 dB, i.e. the probability that
//! snr_mean * |h|^2 / omega_p falls below 1.

use ris_channel::montecarlo::{run_trials, sample_rician, trial_rng, ScenarioParams};
use ris_channel::multiaccess::{
    noma_sinr, outage_threshold, user_outage, MaScheme, MultiAccessScenario, ThresholdResult,
};
use ris_channel::statistics::{keff_discrete, omega_discrete, outage_probability, RicianParams};

use crate::config::{self, db_to_linear, OutageBlock, OutageConfig, OutageKind};
use crate::output::{fnum, plot_script, resolved, Csv};
use crate::{Failure, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg: OutageConfig = config::load(&args.config)?;
    let trials = args.trials.unwrap_or(100_000);
    if trials == 0 {
        return Err(config::bad("--trials", "needs at least one trial"));
    }
    let block = &cfg.outage;
    let snrs = config::grid(
        block.snr_db_start,
        block.snr_db_stop,
        block.snr_db_step,
        "outage.snr_db_step",
    )?;

    let mut csv = Csv::new("outage", args.seed, Some(trials), &resolved(&cfg));
    csv.columns(&["snr_db", "curve", "mc_outage", "analytic_outage"]);
    match block.kind {
        OutageKind::RandomPhase => {
            envelope_curves(block, std::f64::consts::TAU, &snrs, trials, args.seed, &mut csv)?
        }
        OutageKind::OneBit => {
            envelope_curves(block, std::f64::consts::PI, &snrs, trials, args.seed, &mut csv)?
        }
        OutageKind::Noma => noma_curves(&cfg, &snrs, trials, args.seed, &mut csv)?,
    }

    let csv_path = format!("{}.csv", args.out);
    csv.write(&csv_path)?;
    if args.plot_script {
        plot_script(
            &format!("{}.gp", args.out),
            &csv_path,
            "set xlabel \"mean SNR (dB)\"\n\
             set ylabel \"outage probability\"\n\
             set logscale y\n\
             plot csv using 1:3 with points title \"monte carlo\", \\\n\
                  csv using 1:4 with lines title \"analytic\"",
        )?;
    }
    Ok(())
}

/// One curve per element count: simulate the physical envelope at the given
/// residual span, then compare against the effective-Rician closed form.
fn envelope_curves(
    block: &OutageBlock,
    span: f64,
    snrs: &[f64],
    trials: usize,
    seed: u64,
    csv: &mut Csv,
) -> Result<(), Failure> {
    if block.m_values.is_empty() {
        return Err(config::bad("outage.m_values", "required for this kind"));
    }
    let k_0 = block
        .k_0
        .ok_or_else(|| config::bad("outage.k_0", "required for this kind"))?;
    let n_paths = block
        .n_paths
        .ok_or_else(|| config::bad("outage.n_paths", "required for this kind"))?;

    // Validate every curve before simulating the first one.
    let mut curves = Vec::new();
    for &m in &block.m_values {
        let params = ScenarioParams::from_power_ratio(m, n_paths, k_0, span)
            .map_err(|e| Failure::Config(format!("outage: {e}")))?;
        let channel = RicianParams {
            k_factor: keff_discrete(m, span, k_0),
            omega_p: omega_discrete(m, span, 1.0, n_paths, params.omega_d),
        };
        curves.push((m, params, channel));
    }

    for (i, (m, params, channel)) in curves.iter().enumerate() {
        let powers: Vec<f64> = run_trials(params, seed + i as u64, trials)
            .iter()
            .map(|t| t.magnitude_sq())
            .collect();
        for &db in snrs {
            let threshold = channel.omega_p * db_to_linear(-db);
            let below = powers.iter().filter(|&&w| w <= threshold).count();
            csv.row(&[
                fnum(db),
                format!("m={m}"),
                fnum(below as f64 / trials as f64),
                fnum(outage_probability(channel, threshold)),
            ]);
        }
    }
    Ok(())
}

/// Per-user decode-failure rates of the NOMA pair at a fixed steering angle,
/// replayed stage by stage, next to the analytic per-user outage.
fn noma_curves(
    cfg: &OutageConfig,
    snrs: &[f64],
    trials: usize,
    seed: u64,
    csv: &mut Csv,
) -> Result<(), Failure> {
    let block = cfg
        .multiaccess
        .as_ref()
        .ok_or_else(|| config::bad("multiaccess", "block required for kind = \"noma\""))?;
    let target_deg = block.target_angle_deg.ok_or_else(|| {
        config::bad("multiaccess.target_angle_deg", "required for kind = \"noma\"")
    })?;
    let scenario = block.scenario()?;
    let target = target_deg.to_radians();
    check_decodable(&scenario)?;

    let order = scenario
        .decode_order(target)
        .map_err(|e| Failure::Config(format!("multiaccess: {e}")))?;

    for user in 0..scenario.users.len() {
        let channel = scenario
            .user_channel(user, target)
            .map_err(|e| Failure::Config(format!("multiaccess: {e}")))?;
        let position = order
            .iter()
            .position(|&u| u == user)
            .expect("decode order covers every user");
        let draws: Vec<f64> = (0..trials)
            .map(|t| {
                let mut rng = trial_rng(seed + user as u64, t as u64);
                sample_rician(channel.k_factor, channel.omega_p, &mut rng).norm_sqr()
            })
            .collect();

        for &db in snrs {
            let snr = db_to_linear(db);
            let failed = draws
                .iter()
                .filter(|&&w| {
                    (0..=position).any(|l| {
                        noma_sinr(w, snr, &scenario.allocations, l) < scenario.thresholds[l]
                    })
                })
                .count();
            let mut at_snr = scenario.clone();
            at_snr.snr = snr;
            let analytic = user_outage(&at_snr, user, target, MaScheme::Noma)
                .map_err(|e| Failure::Infeasible(e.to_string()))?
                .probability();
            csv.row(&[
                fnum(db),
                format!("user-{user}"),
                fnum(failed as f64 / trials as f64),
                fnum(analytic),
            ]);
        }
    }
    Ok(())
}

/// NOMA decodability does not depend on the transmit SNR: a decode position
/// is feasible iff its allocation clears the threshold-weighted sum of the
/// later ones. Checked once, before any sampling.
pub fn check_decodable(scenario: &MultiAccessScenario) -> Result<(), Failure> {
    for position in 0..scenario.allocations.len() {
        if let ThresholdResult::Infeasible { position } = outage_threshold(
            &scenario.allocations,
            &scenario.thresholds,
            position,
            scenario.snr,
        ) {
            return Err(Failure::Infeasible(format!(
                "NOMA decode position {position} cannot clear its SINR threshold at any SNR; \
                 adjust multiaccess.allocations or multiaccess.thresholds_db"
            )));
        }
    }
    Ok(())
}
