use super::{build_ls_system, rsrp_to_distance_sq, solve_ls, LocEstimate, LocalizerConfig, Measurement};
use crate::antenna::{link_gains, AntennaPattern};
use crate::error::{Error, Result};
use crate::geo::{link_geometry, ProjectionConfig};
use crate::propagation::CarrierConfig;

/// Everything the fixed-point solver needs besides the samples themselves.
#[derive(Debug, Clone)]
pub struct LocalizationModel<'a> {
    pub tx: &'a AntennaPattern,
    pub rx: &'a AntennaPattern,
    /// Known transmitter antenna height; only the horizontal position is estimated.
    pub bs_alt_m: f64,
    pub carrier: CarrierConfig,
    pub proj: ProjectionConfig,
}

impl LocalizationModel<'_> {
    /// Line-of-sight `(g_tx, g_rx)` of each sample as seen from a transmitter at `est`.
    pub fn gains_at(&self, samples: &[Measurement], est: &LocEstimate) -> Result<Vec<(f64, f64)>> {
        let bs = est.at_alt(self.bs_alt_m);
        samples
            .iter()
            .map(|m| {
                let g = link_geometry(&bs, &m.uav, &self.proj)?;
                let lg = link_gains(self.tx, self.rx, &g);
                Ok((lg.tx_los, lg.rx_los))
            })
            .collect()
    }

    /// Runs `k` LS solves, re-evaluating the antenna gains at each new
    /// estimate. The first solve assumes unit gains.
    pub fn fixed_point(&self, samples: &[Measurement], k: usize) -> Result<Vec<LocEstimate>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k_iters must be at least 1".into()));
        }
        let mut gains = vec![(1.0, 1.0); samples.len()];
        let mut trace = Vec::with_capacity(k);
        for iter in 0..k {
            let sys = build_ls_system(samples, &gains, self.bs_alt_m, &self.carrier, &self.proj)?;
            let est = solve_ls(&sys)?;
            trace.push(est);
            if iter + 1 < k {
                gains = self.gains_at(samples, &est)?;
            }
        }
        Ok(trace)
    }

    /// Mean squared gap between RSRP-implied and geometric 3D distances for
    /// a transmitter at `est`, using the gains seen from `est`.
    pub fn residual(&self, samples: &[Measurement], est: &LocEstimate) -> Result<f64> {
        let gains = self.gains_at(samples, est)?;
        super::residual(est, samples, &gains, self.bs_alt_m, &self.carrier, &self.proj)
    }
}

/// Offline localization by fixed-point iteration; one estimate per iteration.
/// Any RSRP prefiltering is the caller's job, since it must run over the
/// whole trace before samples are drawn from it.
pub fn fixed_point_localize(
    samples: &[Measurement],
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    bs_alt_m: f64,
    cfg: &LocalizerConfig,
    c: &CarrierConfig,
    proj: &ProjectionConfig,
) -> Result<Vec<LocEstimate>> {
    cfg.validate()?;
    let model = LocalizationModel {
        tx,
        rx,
        bs_alt_m,
        carrier: *c,
        proj: *proj,
    };
    model.fixed_point(samples, cfg.k_iters)
}

/// Per-sample 3D distance implied by RSRP under the given gains.
pub(crate) fn inferred_distance(m: &Measurement, gains: (f64, f64), c: &CarrierConfig) -> Result<f64> {
    Ok(rsrp_to_distance_sq(m.rsrp_dbm, gains.0, gains.1, c)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::TabulatedPattern;
    use crate::geo::GeoPoint;
    use crate::propagation::{synthesize_rsrp, GroundParams, PropagationModel, ShadowingModel};

    fn bs() -> GeoPoint {
        GeoPoint::new(-78.6960, 35.7270, 10.0).unwrap()
    }

    fn beam() -> AntennaPattern {
        let az: Vec<f64> = (0..36).map(|i| i as f64 * 10.0).collect();
        let el: Vec<f64> = (0..19).map(|i| -90.0 + i as f64 * 10.0).collect();
        AntennaPattern::Tabulated(
            TabulatedPattern::from_fn(az, el, |a, e| {
                let da = ((a - 100.0 + 540.0) % 360.0) - 180.0;
                -10.0 + 18.0 * (-(da / 60.0).powi(2) - ((e - 25.0) / 30.0).powi(2)).exp()
            })
            .unwrap(),
        )
    }

    fn ring(tx: &AntennaPattern) -> Vec<Measurement> {
        let bs = bs();
        let proj = ProjectionConfig::centered_on(&bs);
        let iso = AntennaPattern::Isotropic;
        let c = CarrierConfig::default();
        let mut sh = ShadowingModel::none().stream();
        (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                let r = 150.0 + 20.0 * i as f64;
                let uav = proj
                    .offset_point(&bs, r * t.cos(), r * t.sin())
                    .with_alt(50.0 + (i % 3) as f64 * 20.0);
                let g = link_geometry(&bs, &uav, &proj).unwrap();
                let s = synthesize_rsrp(
                    &g,
                    PropagationModel::FreeSpace,
                    tx,
                    &iso,
                    &c,
                    &GroundParams::default(),
                    &mut sh,
                )
                .unwrap();
                Measurement {
                    t_s: i as f64,
                    uav,
                    rsrp_dbm: s.rsrp_dbm,
                }
            })
            .collect()
    }

    fn model<'a>(tx: &'a AntennaPattern, rx: &'a AntennaPattern) -> LocalizationModel<'a> {
        LocalizationModel {
            tx,
            rx,
            bs_alt_m: 10.0,
            carrier: CarrierConfig::default(),
            proj: ProjectionConfig::centered_on(&bs()),
        }
    }

    #[test]
    fn isotropic_iterations_are_bitwise_identical() {
        let iso = AntennaPattern::Isotropic;
        let s = ring(&iso);
        let trace = model(&iso, &iso).fixed_point(&s, 8).unwrap();
        assert_eq!(trace.len(), 8);
        assert!(trace.iter().all(|e| e == &trace[0]));
        assert!(trace[0].distance_error_m(&bs(), &model(&iso, &iso).proj) < 1e-6);
    }

    #[test]
    fn matched_pattern_beats_isotropic() {
        let tx = beam();
        let iso = AntennaPattern::Isotropic;
        let s = ring(&tx);
        let proj = ProjectionConfig::centered_on(&bs());
        let matched = model(&tx, &iso).fixed_point(&s, 50).unwrap();
        let naive = model(&iso, &iso).fixed_point(&s, 50).unwrap();
        let e_m = matched.last().unwrap().distance_error_m(&bs(), &proj);
        let e_i = naive.last().unwrap().distance_error_m(&bs(), &proj);
        assert!(e_m < e_i, "matched {e_m} vs isotropic {e_i}");
        assert!(e_m < 1.0, "matched error {e_m}");
        let errs: Vec<f64> = matched.iter().map(|e| e.distance_error_m(&bs(), &proj)).collect();
        assert!(errs.windows(2).take(20).any(|w| (w[1] - w[0]).abs() < 0.1));
        assert!(errs[19] < errs[0]);
    }

    #[test]
    fn residual_vanishes_at_truth() {
        let tx = beam();
        let iso = AntennaPattern::Isotropic;
        let s = ring(&tx);
        let m = model(&tx, &iso);
        let truth = LocEstimate {
            lon_deg: bs().lon_deg,
            lat_deg: bs().lat_deg,
        };
        assert!(m.residual(&s, &truth).unwrap() < 1e-12);
        let off = LocEstimate {
            lat_deg: truth.lat_deg + 100.0 / m.proj.meters_per_deg(),
            ..truth
        };
        assert!(m.residual(&s, &off).unwrap() > 0.0);
    }

    #[test]
    fn zero_iterations_rejected() {
        let iso = AntennaPattern::Isotropic;
        assert!(model(&iso, &iso).fixed_point(&ring(&iso), 0).is_err());
    }
}
