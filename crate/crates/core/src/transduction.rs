//! Link-layer models for interconnecting microwave-domain nodes over
//! optical fiber.
//!
//! Two strategies are compared on one link budget:
//!
//! - **Direct conversion on halves of entangled pairs** (`dqt_epr_rate`):
//!   a photon must survive up-conversion, the fiber, and down-conversion;
//!   below total transmissivity 1/2 the pure-loss channel has no two-way
//!   capacity, so the distribution rate factor is zero.
//! - **Heralded hybrid-entanglement generation** (`egt_herald`): each side
//!   emits a microwave-optical entangled excitation, the optical halves
//!   interfere on a 50/50 beam splitter, and a single detection heralds a
//!   microwave Bell pair. Any nonzero efficiency gives a nonzero heralding
//!   probability — loss costs rate and fidelity, not feasibility.
//!
//! Closed forms are validated against `fock_oracle`, an exact truncated
//! Fock-space simulation of emission, per-arm loss, interference, and
//! photon counting.

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum TransductionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("Fock truncation must allow at least 2 photons per mode, got {0}")]
    TruncationTooLow(usize),
}

/// Guard value reported when the rate-factor formula diverges (perfect
/// transmissivity): log2(eta/(1-eta)) grows without bound as eta -> 1.
pub const RATE_FACTOR_CAP: f64 = 1024.0;

/// One microwave-optical transducer: its conversion efficiency and the
/// amplitudes of the hybrid state it emits,
/// alpha |0_mw 1_opt> + beta |1_mw 0_opt>.
#[derive(Clone, Copy, Debug)]
pub struct TransducerParams {
    /// Conversion efficiency in [0, 1], modeled as a beam-splitter-type
    /// transmissivity on the converted photon.
    pub eta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Nominal microwave frequency, GHz (documentation only).
    pub microwave_ghz: f64,
    /// Nominal optical frequency, THz (documentation only).
    pub optical_thz: f64,
}

impl TransducerParams {
    pub fn new(
        eta: f64,
        alpha: Complex64,
        beta: Complex64,
        microwave_ghz: f64,
        optical_thz: f64,
    ) -> Result<TransducerParams, TransductionError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(TransductionError::InvalidParams(format!(
                "conversion efficiency must lie in [0, 1], got {eta}"
            )));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(TransductionError::InvalidParams(format!(
                "|alpha|^2 + |beta|^2 must be 1 within 1e-12, got {norm}"
            )));
        }
        Ok(TransducerParams { eta, alpha, beta, microwave_ghz, optical_thz })
    }

    /// Hardware defaults: balanced emission amplitudes, typical 5 GHz
    /// microwave and 193 THz telecom-band optical carriers.
    pub fn symmetric(eta: f64) -> Result<TransducerParams, TransductionError> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        TransducerParams::new(eta, a, a, 5.0, 193.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DetectorKind {
    /// Resolves photon number: heralds on exactly one detected photon.
    PhotonNumberResolving,
    /// Click/no-click: a two-photon bunch at one port fakes a herald.
    Threshold,
}

/// Fixed properties of the optical path between the two transducers.
#[derive(Clone, Copy, Debug)]
pub struct LinkBudget {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
    pub detector_efficiency: f64,
    pub detector: DetectorKind,
}

/// Standard telecom-fiber attenuation.
pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

impl LinkBudget {
    pub fn new(
        length_km: f64,
        attenuation_db_per_km: f64,
        detector_efficiency: f64,
        detector: DetectorKind,
    ) -> Result<LinkBudget, TransductionError> {
        if !(length_km >= 0.0) {
            return Err(TransductionError::InvalidParams(format!(
                "fiber length must be nonnegative, got {length_km}"
            )));
        }
        if !(attenuation_db_per_km >= 0.0) {
            return Err(TransductionError::InvalidParams(format!(
                "attenuation must be nonnegative, got {attenuation_db_per_km}"
            )));
        }
        if !(0.0..=1.0).contains(&detector_efficiency) {
            return Err(TransductionError::InvalidParams(format!(
                "detector efficiency must lie in [0, 1], got {detector_efficiency}"
            )));
        }
        Ok(LinkBudget { length_km, attenuation_db_per_km, detector_efficiency, detector })
    }

    /// A zero-length, loss-free link with perfect number-resolving
    /// detectors.
    pub fn lossless() -> LinkBudget {
        LinkBudget {
            length_km: 0.0,
            attenuation_db_per_km: DEFAULT_ATTENUATION_DB_PER_KM,
            detector_efficiency: 1.0,
            detector: DetectorKind::PhotonNumberResolving,
        }
    }

    /// End-to-end fiber transmissivity 10^(-attenuation * length / 10).
    pub fn fiber_transmissivity(&self) -> f64 {
        10f64.powf(-self.attenuation_db_per_km * self.length_km / 10.0)
    }

    /// Transmissivity of one interference arm (transducer to the midpoint
    /// beam splitter, then into the detector): the emitting side's
    /// conversion loss, half the fiber, and the detector's own efficiency.
    pub fn arm_transmissivity(&self, conversion_eta: f64) -> f64 {
        conversion_eta * self.fiber_transmissivity().sqrt() * self.detector_efficiency
    }
}

/// Per-attempt cost of distributing EPR halves by direct conversion.
#[derive(Clone, Copy, Debug)]
pub struct DqtRate {
    /// Probability that the converted photon survives source conversion,
    /// the full fiber, and destination conversion.
    pub per_attempt_success: f64,
    /// Two-way capacity factor of the effective pure-loss channel:
    /// max(0, log2(eta / (1 - eta))). Zero at or below eta = 1/2; capped
    /// at [`RATE_FACTOR_CAP`] as eta -> 1.
    pub ebit_rate_factor: f64,
}

pub fn dqt_epr_rate(source: &TransducerParams, dest: &TransducerParams, lb: &LinkBudget) -> DqtRate {
    let eta_tot = source.eta * lb.fiber_transmissivity() * dest.eta;
    let ebit_rate_factor = if eta_tot <= 0.5 {
        0.0
    } else if eta_tot >= 1.0 {
        RATE_FACTOR_CAP
    } else {
        (eta_tot / (1.0 - eta_tot)).log2().min(RATE_FACTOR_CAP)
    };
    DqtRate { per_attempt_success: eta_tot, ebit_rate_factor }
}

/// Heralding statistics of one beam-splitter attempt.
#[derive(Clone, Copy, Debug)]
pub struct HeraldStats {
    /// Probability that the detector pattern heralds a pair.
    pub p_herald: f64,
    /// Fidelity of the heralded microwave state to the Bell target
    /// (|01> + |10>)/sqrt(2), after the phase fix on minus-port heralds.
    /// `None` when heralding never happens.
    pub f_herald: Option<f64>,
}

/// Closed-form heralding statistics. One detection at either output port
/// heralds; a minus-port herald is counted after its local-Z phase fix.
///
/// With arm transmissivities eta_a (source) and eta_b (destination), the
/// exactly-one-photon probability to a fixed port is
///   p(port) = [eta_a |alpha_s beta_d|^2 + eta_b |beta_s alpha_d|^2] / 2
///           + [eta_a (1 - eta_b) + eta_b (1 - eta_a)] |alpha_s alpha_d|^2 / 2
/// (first line: one side emitted and it survived; second: both emitted,
/// one photon lost). Threshold detectors additionally accept two-photon
/// bunches, eta_a eta_b |alpha_s alpha_d|^2 / 2 per port. The surviving
/// entangled branch has amplitude
/// (sqrt(eta_a) alpha_s beta_d |01> +- sqrt(eta_b) beta_s alpha_d |10>)/sqrt(2),
/// giving fidelity |sqrt(eta_a) alpha_s beta_d + sqrt(eta_b) beta_s alpha_d|^2 / 4
/// against the target, per port, after the phase fix.
pub fn egt_herald(source: &TransducerParams, dest: &TransducerParams, lb: &LinkBudget) -> HeraldStats {
    let ea = lb.arm_transmissivity(source.eta);
    let eb = lb.arm_transmissivity(dest.eta);
    let asbd = (source.alpha * dest.beta).norm_sqr();
    let bsad = (source.beta * dest.alpha).norm_sqr();
    let asad = (source.alpha * dest.alpha).norm_sqr();
    let mut p_port = 0.5 * (ea * asbd + eb * bsad) + 0.5 * (ea * (1.0 - eb) + eb * (1.0 - ea)) * asad;
    if lb.detector == DetectorKind::Threshold {
        p_port += 0.5 * ea * eb * asad;
    }
    let p_herald = 2.0 * p_port;
    if p_herald <= 0.0 {
        return HeraldStats { p_herald: 0.0, f_herald: None };
    }
    let good = (ea.sqrt() * source.alpha * dest.beta + eb.sqrt() * source.beta * dest.alpha).norm_sqr() / 4.0;
    HeraldStats { p_herald, f_herald: Some(good / p_port) }
}

/// One sampled generation attempt.
#[derive(Clone, Copy, Debug)]
pub struct AttemptResult {
    pub heralded: bool,
    /// Fidelity of the delivered pair; present only on a herald.
    pub fidelity: Option<f64>,
    pub latency_us: f64,
}

/// Samples a single attempt of a heralded scheme with the given per-attempt
/// statistics and attempt period.
pub fn sample_attempt(stats: &HeraldStats, period_us: f64, rng: &mut dyn RngCore) -> AttemptResult {
    let draw = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let heralded = draw < stats.p_herald;
    AttemptResult {
        heralded,
        fidelity: if heralded { stats.f_herald } else { None },
        latency_us: period_us,
    }
}

/// Repeat-until-success statistics for a scheme with per-attempt success
/// probability `p`: the attempt count is geometric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reachability {
    /// Zero per-attempt probability: regeneration never terminates.
    Unreachable,
    Geometric {
        mean_attempts: f64,
        mean_latency_us: f64,
    },
}

impl Reachability {
    pub fn is_unreachable(&self) -> bool {
        matches!(self, Reachability::Unreachable)
    }
}

pub fn attempts_until_success(p: f64, attempt_period_us: f64) -> Reachability {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    if p == 0.0 {
        Reachability::Unreachable
    } else {
        Reachability::Geometric { mean_attempts: 1.0 / p, mean_latency_us: attempt_period_us / p }
    }
}

/// P(success within k attempts) = 1 - (1-p)^k.
pub fn prob_within(p: f64, k: u32) -> f64 {
    1.0 - (1.0 - p).powi(k as i32)
}

/// Smallest k with P(success within k) >= q.
pub fn attempts_quantile(p: f64, q: f64) -> Option<u64> {
    assert!((0.0..1.0).contains(&q), "quantile must lie in [0, 1)");
    if p <= 0.0 {
        return None;
    }
    if p >= 1.0 {
        return Some(1);
    }
    Some(((1.0 - q).ln() / (1.0 - p).ln()).ceil().max(1.0) as u64)
}

/// One grid point of the strategy-contrast sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta_s: f64,
    pub eta_d: f64,
    pub p_dqt: f64,
    pub rate_factor: f64,
    pub p_herald: f64,
    pub f_herald: f64,
}

/// Evaluates both strategies at one (eta_s, eta_d) point with emission
/// amplitudes |alpha|^2 = `alpha_sq` on both sides.
pub fn strategy_point(
    eta_s: f64,
    eta_d: f64,
    lb: &LinkBudget,
    alpha_sq: f64,
) -> Result<SweepRow, TransductionError> {
    if !(0.0..=1.0).contains(&alpha_sq) {
        return Err(TransductionError::InvalidParams(format!(
            "|alpha|^2 must lie in [0, 1], got {alpha_sq}"
        )));
    }
    let alpha = Complex64::new(alpha_sq.sqrt(), 0.0);
    let beta = Complex64::new((1.0 - alpha_sq).sqrt(), 0.0);
    let s = TransducerParams::new(eta_s, alpha, beta, 5.0, 193.0)?;
    let d = TransducerParams::new(eta_d, alpha, beta, 5.0, 193.0)?;
    let dqt = dqt_epr_rate(&s, &d, lb);
    let egt = egt_herald(&s, &d, lb);
    Ok(SweepRow {
        eta_s,
        eta_d,
        p_dqt: dqt.per_attempt_success,
        rate_factor: dqt.ebit_rate_factor,
        p_herald: egt.p_herald,
        f_herald: egt.f_herald.unwrap_or(0.0),
    })
}

/// Evaluates both strategies over an (eta_s, eta_d) grid at fixed emission
/// amplitudes |alpha|^2 = `alpha_sq` on both sides.
pub fn strategy_sweep(
    eta_grid: &[f64],
    lb: &LinkBudget,
    alpha_sq: f64,
) -> Result<Vec<SweepRow>, TransductionError> {
    let mut rows = Vec::with_capacity(eta_grid.len() * eta_grid.len());
    for &eta_s in eta_grid {
        for &eta_d in eta_grid {
            rows.push(strategy_point(eta_s, eta_d, lb, alpha_sq)?);
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Exact truncated Fock-space oracle.
// ---------------------------------------------------------------------------

/// Probability of one detector pattern and the microwave state it leaves
/// behind. The 4x4 density matrix is over |mw_s mw_d> with index
/// mw_s + 2 * mw_d.
#[derive(Clone, Debug)]
pub struct DetectionOutcome {
    pub probability: f64,
    pub mw_density: [[Complex64; 4]; 4],
}

/// Full photon-counting analysis of one beam-splitter attempt: one entry
/// per detector pattern (n_plus, n_minus).
#[derive(Clone, Debug)]
pub struct FockAnalysis {
    pub patterns: BTreeMap<(usize, usize), DetectionOutcome>,
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Mode layout of the four-mode register: [mw_s (2), opt_s (T), mw_d (2),
/// opt_d (T)], little-endian index.
struct FockSpace {
    t: usize,
}

impl FockSpace {
    fn dim(&self) -> usize {
        4 * self.t * self.t
    }

    fn index(&self, mw_s: usize, opt_s: usize, mw_d: usize, opt_d: usize) -> usize {
        mw_s + 2 * (opt_s + self.t * (mw_d + 2 * opt_d))
    }

    fn unpack(&self, i: usize) -> (usize, usize, usize, usize) {
        let mw_s = i % 2;
        let r = i / 2;
        let opt_s = r % self.t;
        let r = r / self.t;
        let mw_d = r % 2;
        let opt_d = r / 2;
        (mw_s, opt_s, mw_d, opt_d)
    }
}

/// Loss on one optical mode as a Kraus branch: `j` photons leak to the
/// environment. Returns the (unnormalized) branch states.
fn loss_branches(space: &FockSpace, state: &[Complex64], mode_is_source: bool, eta: f64) -> Vec<Vec<Complex64>> {
    let mut branches = Vec::new();
    for j in 0..space.t {
        let mut out = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut any = false;
        for (i, &amp) in state.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (mw_s, opt_s, mw_d, opt_d) = space.unpack(i);
            let n = if mode_is_source { opt_s } else { opt_d };
            if j > n {
                continue;
            }
            let coeff = (binom(n, j) * eta.powi((n - j) as i32) * (1.0 - eta).powi(j as i32)).sqrt();
            if coeff == 0.0 {
                continue;
            }
            let target = if mode_is_source {
                space.index(mw_s, n - j, mw_d, opt_d)
            } else {
                space.index(mw_s, opt_s, mw_d, n - j)
            };
            out[target] += amp * coeff;
            any = true;
        }
        if any {
            branches.push(out);
        }
    }
    branches
}

/// 50/50 beam splitter across the two optical modes; afterwards opt_s is
/// the plus detector port and opt_d the minus port. Amplitudes that would
/// overflow the truncation are rejected by the caller's truncation check.
fn beam_splitter(space: &FockSpace, state: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); space.dim()];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for (i, &amp) in state.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (mw_s, m, mw_d, n) = space.unpack(i);
        let total = m + n;
        assert!(total < space.t, "photon number exceeds truncation");
        // (a+)^m (b+)^n |00> with a+ -> (c+ + d+)/sqrt(2),
        // b+ -> (c+ - d+)/sqrt(2): collect the coefficient of |p, total-p>.
        for p in 0..=total {
            let q = total - p;
            let mut sum = 0.0;
            let lo = p.saturating_sub(n);
            for i_src in lo..=p.min(m) {
                let j_src = p - i_src;
                let sign = if (n - j_src) % 2 == 0 { 1.0 } else { -1.0 };
                sum += binom(m, i_src) * binom(n, j_src) * sign;
            }
            if sum == 0.0 {
                continue;
            }
            let coeff = sum * half.powi(total as i32) * (factorial(p) * factorial(q)).sqrt()
                / (factorial(m) * factorial(n)).sqrt();
            out[space.index(mw_s, p, mw_d, q)] += amp * coeff;
        }
    }
    out
}

/// Exact simulation of one attempt: both transducers emit, each optical
/// arm suffers loss, the arms interfere on the 50/50 beam splitter, and
/// both output ports are photon-counted.
pub fn fock_oracle(
    source: &TransducerParams,
    dest: &TransducerParams,
    lb: &LinkBudget,
    truncation: usize,
) -> Result<FockAnalysis, TransductionError> {
    if truncation < 2 {
        return Err(TransductionError::TruncationTooLow(truncation));
    }
    let space = FockSpace { t: truncation + 1 };
    let mut psi = vec![Complex64::new(0.0, 0.0); space.dim()];
    // Emission: (alpha_s |0,1> + beta_s |1,0>) x (alpha_d |0,1> + beta_d |1,0>).
    for (mw_s, opt_s, cs) in [(0usize, 1usize, source.alpha), (1, 0, source.beta)] {
        for (mw_d, opt_d, cd) in [(0usize, 1usize, dest.alpha), (1, 0, dest.beta)] {
            psi[space.index(mw_s, opt_s, mw_d, opt_d)] = cs * cd;
        }
    }
    let ea = lb.arm_transmissivity(source.eta);
    let eb = lb.arm_transmissivity(dest.eta);
    let mut branches = Vec::new();
    for b in loss_branches(&space, &psi, true, ea) {
        branches.extend(loss_branches(&space, &b, false, eb));
    }
    let mut patterns: BTreeMap<(usize, usize), DetectionOutcome> = BTreeMap::new();
    for branch in &branches {
        let mixed = beam_splitter(&space, branch);
        for n_plus in 0..space.t {
            for n_minus in 0..space.t {
                // Microwave amplitude vector conditioned on this pattern.
                let mut vec4 = [Complex64::new(0.0, 0.0); 4];
                for mw_s in 0..2 {
                    for mw_d in 0..2 {
                        vec4[mw_s + 2 * mw_d] = mixed[space.index(mw_s, n_plus, mw_d, n_minus)];
                    }
                }
                let w: f64 = vec4.iter().map(|a| a.norm_sqr()).sum();
                if w == 0.0 {
                    continue;
                }
                let entry = patterns.entry((n_plus, n_minus)).or_insert_with(|| DetectionOutcome {
                    probability: 0.0,
                    mw_density: [[Complex64::new(0.0, 0.0); 4]; 4],
                });
                entry.probability += w;
                for r in 0..4 {
                    for c in 0..4 {
                        entry.mw_density[r][c] += vec4[r] * vec4[c].conj();
                    }
                }
            }
        }
    }
    for outcome in patterns.values_mut() {
        let p = outcome.probability;
        for row in outcome.mw_density.iter_mut() {
            for x in row.iter_mut() {
                *x /= p;
            }
        }
    }
    Ok(FockAnalysis { patterns })
}

/// Fidelity of a 4x4 microwave density matrix against the Bell target
/// (|01> + |10>)/sqrt(2), optionally after the minus-port local-Z fix on
/// the source qubit.
pub fn bell_fidelity(rho: &[[Complex64; 4]; 4], z_fix: bool) -> f64 {
    // Indices: |mw_s mw_d>, index mw_s + 2*mw_d; target occupies 1 and 2.
    // The source-Z fix flips the sign of the |10> (index 1) component's
    // coherences with even-parity source states.
    let mut t = [Complex64::new(0.0, 0.0); 4];
    t[1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    t[2] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    if z_fix {
        t[1] = -t[1];
    }
    let mut f = Complex64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            f += t[r].conj() * rho[r][c] * t[c];
        }
    }
    f.re
}

impl FockAnalysis {
    /// Normalization check: detector patterns partition the outcome space.
    pub fn total_probability(&self) -> f64 {
        self.patterns.values().map(|o| o.probability).sum()
    }

    /// Heralding statistics under the given detector model: number-resolved
    /// detectors accept exactly one photon in exactly one port; threshold
    /// detectors accept any photons in exactly one port. Minus-port heralds
    /// enter after the local-Z phase fix.
    pub fn herald(&self, kind: DetectorKind) -> HeraldStats {
        let mut p = 0.0;
        let mut fp = 0.0;
        for (&(n_plus, n_minus), outcome) in &self.patterns {
            let one_sided = (n_plus > 0) != (n_minus > 0);
            if !one_sided {
                continue;
            }
            let accepted = match kind {
                DetectorKind::PhotonNumberResolving => n_plus + n_minus == 1,
                DetectorKind::Threshold => true,
            };
            if !accepted {
                continue;
            }
            p += outcome.probability;
            fp += outcome.probability * bell_fidelity(&outcome.mw_density, n_minus > 0);
        }
        if p == 0.0 {
            HeraldStats { p_herald: 0.0, f_herald: None }
        } else {
            HeraldStats { p_herald: p, f_herald: Some(fp / p) }
        }
    }
}
