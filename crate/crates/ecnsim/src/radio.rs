//! Narrowband radio link math shared by the ground mesh and the UAV
//! collection links.
//!
//! Everything here is scalar channel bookkeeping: free-space path loss at a
//! carrier wavelength, an elevation-angle logistic model for line-of-sight
//! probability, the blended air-to-ground loss, outage probability under
//! log-normal shadowing, SINR with explicit co-channel interferers, and
//! Shannon capacity. All gains and losses are handled in dB and powers in
//! dBm/mW, converting only at well-marked boundaries.

use serde::{Deserialize, Serialize};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, thiserror::Error)]
pub enum RadioError {
    #[error("{what} must satisfy {constraint} (got {value})")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },
}

fn require(ok: bool, what: &'static str, constraint: &'static str, value: f64) -> Result<(), RadioError> {
    if ok {
        Ok(())
    } else {
        Err(RadioError::Domain {
            what,
            constraint,
            value,
        })
    }
}

/// Radio-layer constants. Defaults model a 433 MHz narrowband emergency
/// band with 1 MHz channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioParams {
    /// Carrier frequency (Hz).
    pub frequency_hz: f64,
    /// Combined antenna gain (linear).
    pub antenna_gain: f64,
    /// Line-of-sight S-curve steepness parameters; the elevation angle they
    /// act on is in degrees.
    pub los_a: f64,
    pub los_b: f64,
    /// Mean excess losses added on top of free-space loss (dB).
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    /// Noise floor (dBm).
    pub noise_dbm: f64,
    /// Shadowing spread as tabulated (dB). The outage formula divides by this
    /// value directly; set `conventional_sigma` to divide by its square root
    /// instead (reading the tabulated number as a variance).
    pub sigma_sq_db: f64,
    pub conventional_sigma: bool,
    /// Maximum tolerated outage probability for a usable link.
    pub epsilon_outage: f64,
    /// Receiver sensitivity (dBm): received power compared against this in
    /// the outage model.
    pub p_min_dbm: f64,
    /// Ground-device transmit power ceiling (mW).
    pub p_max_gd_mw: f64,
    /// Fade margin (dB) added to the minimum link power so the assigned
    /// power actually meets the outage target instead of sitting at 50%
    /// outage on the sensitivity threshold.
    pub fade_margin_db: f64,
    /// Channel bandwidth (Hz).
    pub bandwidth_hz: f64,
    /// Number of orthogonal FDMA channels; devices take channel
    /// `index mod channels`.
    pub channels: usize,
    /// SINR threshold (linear) a collection link must meet.
    pub gamma_sinr: f64,
    /// Per-device payload size (bytes) behind link transmission-time costs.
    pub payload_bytes: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            frequency_hz: 433e6,
            antenna_gain: 1.0,
            los_a: 11.95,
            los_b: 0.14,
            eta_los_db: 3.0,
            eta_nlos_db: 23.0,
            noise_dbm: -130.0,
            sigma_sq_db: 3.65,
            conventional_sigma: false,
            epsilon_outage: 0.01,
            p_min_dbm: -75.0,
            p_max_gd_mw: 10.0,
            fade_margin_db: 8.5,
            bandwidth_hz: 1e6,
            channels: 5,
            gamma_sinr: 1.0,
            payload_bytes: 124.0,
        }
    }
}

impl RadioParams {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn noise_mw(&self) -> f64 {
        dbm_to_mw(self.noise_dbm)
    }

    pub fn p_min_mw(&self) -> f64 {
        dbm_to_mw(self.p_min_dbm)
    }

    /// Denominator of the outage deviate; see `sigma_sq_db`.
    pub fn shadowing_denominator_db(&self) -> f64 {
        if self.conventional_sigma {
            self.sigma_sq_db.sqrt()
        } else {
            self.sigma_sq_db
        }
    }

    /// Excess loss (dB) of the air-to-ground channel straight overhead,
    /// i.e. `a2g_loss_db(d, d) - fspl_db(d)` for any distance.
    pub fn overhead_excess_db(&self) -> f64 {
        let p_los = los_probability(self, 90.0).expect("90 degrees is in range");
        self.eta_nlos_db - p_los * (self.eta_nlos_db - self.eta_los_db)
    }
}

pub fn mw_to_dbm(p_mw: f64) -> f64 {
    10.0 * p_mw.log10()
}

pub fn dbm_to_mw(p_dbm: f64) -> f64 {
    10f64.powf(p_dbm / 10.0)
}

/// Gaussian tail probability `P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Free-space path loss (dB) over distance `d` meters:
/// `10 log10((4 pi d)^2 / (G lambda^2))`.
pub fn fspl_db(params: &RadioParams, d: f64) -> Result<f64, RadioError> {
    require(d > 0.0 && d.is_finite(), "distance", "> 0 and finite", d)?;
    let lambda = params.wavelength_m();
    let num = (4.0 * std::f64::consts::PI * d).powi(2);
    Ok(10.0 * (num / (params.antenna_gain * lambda * lambda)).log10())
}

/// Line-of-sight probability at elevation angle `theta_deg` in [0, 90]:
/// logistic `1 / (1 + a exp(-b (theta - a)))`.
pub fn los_probability(params: &RadioParams, theta_deg: f64) -> Result<f64, RadioError> {
    require(
        (0.0..=90.0).contains(&theta_deg),
        "elevation angle",
        "within [0, 90] degrees",
        theta_deg,
    )?;
    Ok(1.0 / (1.0 + params.los_a * (-params.los_b * (theta_deg - params.los_a)).exp()))
}

/// Air-to-ground loss (dB) over slant distance `d` with height difference
/// `h` (both meters, `d >= h > 0`): free-space loss plus the
/// LoS-probability-weighted blend of the two excess losses.
pub fn a2g_loss_db(params: &RadioParams, d: f64, h: f64) -> Result<f64, RadioError> {
    require(h > 0.0 && h.is_finite(), "height difference", "> 0 and finite", h)?;
    require(d >= h, "slant distance", ">= height difference", d)?;
    let theta_deg = (h / d).asin().to_degrees();
    let p_los = los_probability(params, theta_deg)?;
    let fspl = fspl_db(params, d)?;
    Ok(p_los * (fspl + params.eta_los_db) + (1.0 - p_los) * (fspl + params.eta_nlos_db))
}

/// Probability that a transmission at `p_tx_mw` over `loss_db` arrives below
/// the receiver sensitivity under log-normal shadowing:
/// `1 - Q((P_min - P_rx) / denom)` evaluated in dB.
pub fn outage_probability(
    params: &RadioParams,
    p_tx_mw: f64,
    loss_db: f64,
) -> Result<f64, RadioError> {
    require(p_tx_mw > 0.0 && p_tx_mw.is_finite(), "transmit power", "> 0 mW and finite", p_tx_mw)?;
    require(loss_db.is_finite(), "path loss", "finite", loss_db)?;
    let rx_dbm = mw_to_dbm(p_tx_mw) - loss_db;
    let deviate = (params.p_min_dbm - rx_dbm) / params.shadowing_denominator_db();
    Ok(1.0 - q_function(deviate))
}

/// Linear SINR of a received signal against noise plus co-channel
/// interference (all mW).
pub fn sinr(rx_mw: f64, interferers_mw: &[f64], noise_mw: f64) -> Result<f64, RadioError> {
    require(rx_mw > 0.0 && rx_mw.is_finite(), "received power", "> 0 mW and finite", rx_mw)?;
    require(noise_mw > 0.0, "noise power", "> 0 mW", noise_mw)?;
    let interference: f64 = interferers_mw.iter().sum();
    require(
        interference >= 0.0 && interference.is_finite(),
        "interference power",
        ">= 0 mW and finite",
        interference,
    )?;
    Ok(rx_mw / (noise_mw + interference))
}

/// Shannon capacity (bit/s) of a link with the given linear SINR.
pub fn capacity_bps(bandwidth_hz: f64, sinr: f64) -> Result<f64, RadioError> {
    require(bandwidth_hz > 0.0, "bandwidth", "> 0 Hz", bandwidth_hz)?;
    require(sinr >= 0.0 && sinr.is_finite(), "sinr", ">= 0 and finite", sinr)?;
    Ok(bandwidth_hz * (1.0 + sinr).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p() -> RadioParams {
        RadioParams::default()
    }

    #[test]
    fn fspl_is_zero_at_wavelength_over_4pi() {
        let params = p();
        let d = params.wavelength_m() / (4.0 * std::f64::consts::PI);
        assert_relative_eq!(fspl_db(&params, d).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fspl_at_100m_matches_frozen_value() {
        // Independent high-precision evaluation of the formula at 433 MHz.
        assert_relative_eq!(
            fspl_db(&p(), 100.0).unwrap(),
            65.177541148950682662,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fspl_rejects_nonpositive_distance() {
        assert!(fspl_db(&p(), 0.0).is_err());
        assert!(fspl_db(&p(), -5.0).is_err());
    }

    #[test]
    fn los_probability_frozen_values() {
        // At theta = a the logistic collapses to 1 / (1 + a).
        assert_relative_eq!(
            los_probability(&p(), 11.95).unwrap(),
            1.0 / 12.95,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            los_probability(&p(), 90.0).unwrap(),
            0.99978534605798357698,
            max_relative = 1e-12
        );
        assert!(los_probability(&p(), 90.1).is_err());
        assert!(los_probability(&p(), -0.1).is_err());
    }

    #[test]
    fn a2g_loss_matches_frozen_value() {
        assert_relative_eq!(
            a2g_loss_db(&p(), 200.0, 100.0).unwrap(),
            83.966838716880011397,
            max_relative = 1e-12
        );
    }

    #[test]
    fn a2g_loss_overhead_equals_fspl_plus_excess_constant() {
        let params = p();
        for d in [30.0, 150.0, 900.0] {
            let loss = a2g_loss_db(&params, d, d).unwrap();
            let fspl = fspl_db(&params, d).unwrap();
            assert_relative_eq!(loss - fspl, params.overhead_excess_db(), epsilon = 1e-12);
        }
        assert_relative_eq!(
            params.overhead_excess_db(),
            3.0042930788403284604,
            max_relative = 1e-12
        );
    }

    #[test]
    fn a2g_loss_with_equal_excesses_collapses_to_shifted_fspl() {
        let mut params = p();
        params.eta_los_db = 7.0;
        params.eta_nlos_db = 7.0;
        for (d, h) in [(200.0, 50.0), (500.0, 499.0), (80.0, 80.0)] {
            assert_relative_eq!(
                a2g_loss_db(&params, d, h).unwrap(),
                fspl_db(&params, d).unwrap() + 7.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn a2g_loss_stays_between_excess_extremes() {
        let params = p();
        for (d, h) in [(100.0, 10.0), (100.0, 99.0), (2000.0, 35.0)] {
            let loss = a2g_loss_db(&params, d, h).unwrap();
            let fspl = fspl_db(&params, d).unwrap();
            assert!(loss >= fspl + params.eta_los_db - 1e-12);
            assert!(loss <= fspl + params.eta_nlos_db + 1e-12);
        }
    }

    #[test]
    fn a2g_loss_rejects_height_above_distance() {
        assert!(a2g_loss_db(&p(), 100.0, 101.0).is_err());
        assert!(a2g_loss_db(&p(), 100.0, 0.0).is_err());
    }

    #[test]
    fn outage_is_half_on_the_sensitivity_threshold() {
        let params = p();
        // Transmit so the received power sits exactly on p_min.
        let loss = 60.0;
        let p_tx = dbm_to_mw(params.p_min_dbm + loss);
        assert_relative_eq!(
            outage_probability(&params, p_tx, loss).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn outage_at_default_fade_margin_is_just_under_epsilon() {
        let params = p();
        let loss = 74.0;
        let p_tx = dbm_to_mw(params.p_min_dbm + params.fade_margin_db + loss);
        let out = outage_probability(&params, p_tx, loss).unwrap();
        assert_relative_eq!(out, 0.0099357029898499366943, max_relative = 1e-10);
        assert!(out <= params.epsilon_outage);
    }

    #[test]
    fn conventional_sigma_switch_widens_the_deviate() {
        let mut params = p();
        let loss = 70.0;
        let p_tx = dbm_to_mw(params.p_min_dbm + 4.0 + loss);
        let printed = outage_probability(&params, p_tx, loss).unwrap();
        params.conventional_sigma = true;
        let conventional = outage_probability(&params, p_tx, loss).unwrap();
        // 4 dB of margin is ~1.1 deviates under the printed divisor but ~2.1
        // under sqrt(3.65), so the conventional reading gives less outage.
        assert!(conventional < printed);
        assert_relative_eq!(
            params.shadowing_denominator_db(),
            3.65f64.sqrt(),
            epsilon = 1e-15
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn fspl_strictly_increasing(d in 0.1f64..5000.0, extra in 0.1f64..500.0) {
            let params = p();
            prop_assert!(fspl_db(&params, d + extra).unwrap() > fspl_db(&params, d).unwrap());
        }

        #[test]
        fn los_probability_increases_with_elevation(theta in 0.0f64..89.0, extra in 0.01f64..1.0) {
            let params = p();
            prop_assert!(
                los_probability(&params, theta + extra).unwrap()
                    > los_probability(&params, theta).unwrap()
            );
        }

        #[test]
        fn outage_never_rises_with_power(p_tx in 1e-6f64..10.0, loss in 10.0f64..120.0) {
            let params = p();
            let lo = outage_probability(&params, p_tx, loss).unwrap();
            let hi = outage_probability(&params, p_tx * 2.0, loss).unwrap();
            prop_assert!(hi <= lo + 1e-15);
        }
    }

    #[test]
    fn sinr_with_no_interferers_is_snr() {
        let params = p();
        let s = sinr(1e-6, &[], params.noise_mw()).unwrap();
        assert_relative_eq!(s, 1e-6 / params.noise_mw(), max_relative = 1e-12);
    }

    #[test]
    fn sinr_counts_interferers_in_the_denominator() {
        let s = sinr(8.0, &[1.0, 1.0], 2.0).unwrap();
        assert_relative_eq!(s, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn capacity_matches_shannon_form_and_is_concave_increasing() {
        assert_relative_eq!(capacity_bps(1e6, 1.0).unwrap(), 1e6, epsilon = 1e-6);
        assert_relative_eq!(capacity_bps(1e6, 3.0).unwrap(), 2e6, epsilon = 1e-6);
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.5).collect();
        let caps: Vec<f64> = grid
            .iter()
            .map(|&s| capacity_bps(1e6, s).unwrap())
            .collect();
        for w in caps.windows(3) {
            assert!(w[1] > w[0], "capacity must increase with sinr");
            // Discrete concavity: second difference non-positive.
            assert!(w[2] - w[1] <= w[1] - w[0] + 1e-9);
        }
    }

    #[test]
    fn dbm_mw_roundtrip() {
        for v in [-130.0, -75.0, 0.0, 5.0, 10.0] {
            assert_relative_eq!(mw_to_dbm(dbm_to_mw(v)), v, epsilon = 1e-12);
        }
        assert_relative_eq!(dbm_to_mw(5.0), 3.162277660168379332, max_relative = 1e-14);
    }

    #[test]
    fn q_function_reference_points() {
        assert_relative_eq!(q_function(0.0), 0.5, epsilon = 1e-15);
        assert!(q_function(10.0) < 1e-20);
        assert_relative_eq!(q_function(-10.0), 1.0, epsilon = 1e-15);
        // Q(-x) = 1 - Q(x)
        assert_relative_eq!(q_function(-1.3), 1.0 - q_function(1.3), epsilon = 1e-15);
    }
}
