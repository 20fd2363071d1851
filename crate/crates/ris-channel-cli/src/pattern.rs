//! `pattern`: far-field reflection pattern of one configured surface, one
//! CSV row per direction bin. Directions outside the visible region keep
//! their spectral coordinates but get empty angle fields.

use ris_channel::core_model::{co_phase_config, PhaseConfig, Quantization, RisGeometry};
use ris_channel::radiation::{ris_pattern, FieldMatrix};

use crate::config::{self, PatternConfig, PhaseBlock};
use crate::output::{fint, fnum, plot_script, resolved, Csv};
use crate::{Failure, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg: PatternConfig = config::load(&args.config)?;

    // The pattern depends on spacing only through p/lambda, so the
    // wavelength is normalized to 1.
    let geometry = RisGeometry::new(
        cfg.geometry.m_x,
        cfg.geometry.m_y,
        cfg.geometry.p_x_over_lambda,
        cfg.geometry.p_y_over_lambda,
        1.0,
    )
    .map_err(|e| Failure::Config(format!("geometry: {e}")))?;
    let theta_in = cfg.illumination.theta_in_deg.to_radians();

    let phases = match &cfg.phases {
        PhaseBlock::CoPhase {
            theta_target_deg,
            quantization_bits,
        } => {
            let quantization = match quantization_bits {
                None => Quantization::Continuous,
                Some(bits) => Quantization::Discrete { bits: *bits },
            };
            co_phase_config(
                &geometry,
                theta_in,
                theta_target_deg.to_radians(),
                quantization,
            )
            .map_err(|e| Failure::Config(format!("phases: {e}")))?
        }
        PhaseBlock::Uniform { phi_deg } => {
            PhaseConfig::uniform(phi_deg.to_radians(), geometry.m_x, geometry.m_y)
                .map_err(|e| Failure::Config(format!("phases: {e}")))?
        }
        PhaseBlock::Explicit { values_deg } => {
            if values_deg.len() != geometry.elements() {
                return Err(config::bad(
                    "phases.values_deg",
                    &format!(
                        "expected {} entries for a {} x {} surface, got {}",
                        geometry.elements(),
                        geometry.m_x,
                        geometry.m_y,
                        values_deg.len()
                    ),
                ));
            }
            let radians = values_deg.iter().map(|d| d.to_radians()).collect();
            PhaseConfig::new(radians, geometry.m_x, geometry.m_y)
                .map_err(|e| Failure::Config(format!("phases: {e}")))?
        }
    };

    if cfg.grid.p < geometry.m_x || cfg.grid.q < geometry.m_y {
        return Err(config::bad(
            "grid",
            "must be at least as fine as the element grid",
        ));
    }

    let field = FieldMatrix::from_phases(&geometry, theta_in, &phases)
        .map_err(|e| Failure::Config(format!("illumination: {e}")))?;
    let pattern = ris_pattern(&field, &geometry, cfg.grid.p, cfg.grid.q)
        .map_err(|e| Failure::Infeasible(e.to_string()))?;

    let mut csv = Csv::new("pattern", args.seed, None, &resolved(&cfg));
    csv.columns(&["p", "q", "theta_deg", "phi_deg", "re", "im", "magnitude_db"]);
    for p in 0..cfg.grid.p {
        let u = pattern.u(p);
        for q in 0..cfg.grid.q {
            let v = pattern.v(q);
            let value = pattern.value(p, q);
            let (theta_deg, phi_deg) = if pattern.is_physical(p, q) {
                let sin_theta = (u * u + v * v).sqrt().min(1.0);
                (
                    fnum(sin_theta.asin().to_degrees()),
                    fnum(v.atan2(u).to_degrees()),
                )
            } else {
                (String::new(), String::new())
            };
            let magnitude_db = 20.0 * value.norm().max(1e-300).log10();
            csv.row(&[
                fint(p),
                fint(q),
                theta_deg,
                phi_deg,
                fnum(value.re),
                fnum(value.im),
                fnum(magnitude_db),
            ]);
        }
    }

    let csv_path = format!("{}.csv", args.out);
    csv.write(&csv_path)?;
    if args.plot_script {
        plot_script(
            &format!("{}.gp", args.out),
            &csv_path,
            "set xlabel \"theta (deg), principal cut\"\n\
             set ylabel \"magnitude (dB)\"\n\
             plot csv using ($2 == 0 ? $3 : 1/0):7 with linespoints title \"q = 0 cut\"",
        )?;
    }
    Ok(())
}
