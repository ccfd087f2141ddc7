//! Dense state-vector simulator for amplitude-level verification.
//!
//! Capped at 12 qubits (4096 amplitudes). Qubit q is bit q of the basis
//! index, matching the tableau convention. All checks that need numbers a
//! stabilizer tableau cannot produce — fidelities, branch probabilities,
//! reduced density matrices, entanglement overlap — run through this type.

use super::tableau::{OracleError, PauliString, StabGroup};
use num_complex::Complex64;
use rand::Rng;

pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n: usize) -> DenseState {
        assert!(n <= MAX_DENSE_QUBITS, "dense backend supports at most {MAX_DENSE_QUBITS} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    /// |+>^n: the starting point of every graph state.
    pub fn plus(n: usize) -> DenseState {
        assert!(n <= MAX_DENSE_QUBITS, "dense backend supports at most {MAX_DENSE_QUBITS} qubits");
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        DenseState { n, amps: vec![a; dim] }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2 — global-phase independent.
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        assert!(q < self.n);
        let stride = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0usize;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += stride << 1;
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n && a != b);
        let (ma, mb) = (1usize << a, 1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & ma != 0 && i & mb != 0 {
                *amp = -*amp;
            }
        }
    }

    /// In-place action of a signed Pauli string.
    pub fn apply_pauli_string(&mut self, p: &PauliString) {
        let xmask = p.x as usize;
        let zmask = p.z as usize;
        let ny = (p.x & p.z).count_ones();
        // Per-string prefactor: (-1)^neg * i^{#Y}.
        let mut pref = Complex64::new(1.0, 0.0);
        for _ in 0..ny % 4 {
            pref *= Complex64::new(0.0, 1.0);
        }
        if p.neg {
            pref = -pref;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let sign = if ((i & zmask).count_ones()) % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ xmask] = pref * sign * amp;
        }
        self.amps = out;
    }

    /// Expectation value <psi|P|psi> (real for Hermitian P).
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let mut moved = self.clone();
        moved.apply_pauli_string(p);
        self.inner(&moved).re
    }

    /// Probability that measuring observable `p` yields +1.
    pub fn prob_plus(&self, p: &PauliString) -> f64 {
        (1.0 + self.expectation(p)).clamp(0.0, 2.0) / 2.0
    }

    /// Projects onto the `outcome` eigenspace of `p` and renormalizes.
    /// Returns the branch probability; errs when it is (numerically) zero.
    pub fn measure_force(&mut self, p: &PauliString, outcome: i8) -> Result<f64, OracleError> {
        assert!(outcome == 1 || outcome == -1);
        let mut moved = self.clone();
        moved.apply_pauli_string(p);
        let o = outcome as f64;
        for (a, b) in self.amps.iter_mut().zip(&moved.amps) {
            *a = (*a + o * b) / 2.0;
        }
        let prob = self.norm_sq();
        if prob < 1e-12 {
            return Err(OracleError::ForcedImpossible);
        }
        let scale = 1.0 / prob.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(prob)
    }

    pub fn measure_sample<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> i8 {
        let p_plus = self.prob_plus(p);
        let outcome = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        self.measure_force(p, outcome)
            .expect("sampled branch has nonzero probability");
        outcome
    }

    /// Builds the unique state stabilized by a full-rank group by applying
    /// the projector prod_k (1 + S_k)/2 to computational basis seeds until
    /// one survives. Exact for stabilizer groups: diagonal entries of the
    /// projector are either 0 or at least 2^-n.
    pub fn from_stab_group(group: &StabGroup) -> Result<DenseState, OracleError> {
        let n = group.qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(OracleError::TooManyQubits(n));
        }
        if group.rank() != n {
            return Err(OracleError::DependentGenerators);
        }
        let dim = 1usize << n;
        let floor = 0.5 / dim as f64;
        for seed in 0..dim {
            let mut st = DenseState::zero(n);
            st.amps[0] = Complex64::new(0.0, 0.0);
            st.amps[seed] = Complex64::new(1.0, 0.0);
            let mut ok = true;
            for row in group.rows() {
                let mut moved = st.clone();
                moved.apply_pauli_string(row);
                for (a, b) in st.amps.iter_mut().zip(&moved.amps) {
                    *a = (*a + b) / 2.0;
                }
                if st.norm_sq() < floor {
                    ok = false;
                    break;
                }
            }
            if ok {
                let scale = 1.0 / st.norm_sq().sqrt();
                for a in &mut st.amps {
                    *a *= scale;
                }
                return Ok(st);
            }
        }
        unreachable!("a full-rank stabilizer projector has trace 1");
    }

    /// Contracts qubit `q` against a known single-qubit state, removing it.
    /// Valid when the global state factorizes as local ⊗ rest; the returned
    /// weight equals 1 exactly in that case, so callers should assert it.
    pub fn contract_qubit(&self, q: usize, local: [Complex64; 2]) -> (DenseState, f64) {
        assert!(q < self.n);
        let stride = 1usize << q;
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        let dim = self.amps.len();
        let mut base = 0usize;
        while base < dim {
            for i in base..base + stride {
                out.push(local[0].conj() * self.amps[i] + local[1].conj() * self.amps[i + stride]);
            }
            base += stride << 1;
        }
        let mut reduced = DenseState { n: self.n - 1, amps: out };
        let weight = reduced.norm_sq();
        if weight > 1e-12 {
            let scale = 1.0 / weight.sqrt();
            for a in &mut reduced.amps {
                *a *= scale;
            }
        }
        (reduced, weight)
    }

    /// Reduced density matrix of the ordered pair (a, b), indexed by
    /// bits (qa, qb): row = qa + 2*qb.
    pub fn reduced_density_2q(&self, a: usize, b: usize) -> [[Complex64; 4]; 4] {
        assert!(a < self.n && b < self.n && a != b);
        let (ma, mb) = (1usize << a, 1usize << b);
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, ai) in self.amps.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let rest_i = i & !(ma | mb);
            let ri = ((i & ma != 0) as usize) + 2 * ((i & mb != 0) as usize);
            for (cj, aj) in [(0usize, 0usize), (1, ma), (2, mb), (3, ma | mb)] {
                let j = rest_i | aj;
                rho[ri][cj] += ai * self.amps[j].conj();
            }
        }
        rho
    }

    /// tr(rho_ab^2): 1 for a pair disentangled from everything else.
    pub fn pair_purity(&self, a: usize, b: usize) -> f64 {
        let rho = self.reduced_density_2q(a, b);
        let mut p = Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                p += rho[r][c] * rho[c][r];
            }
        }
        p.re
    }

    /// Largest overlap of the pair state with any maximally entangled
    /// two-qubit state. Requires the pair to be pure (disentangled from the
    /// rest); for pure M with singular values s1, s2 the overlap is
    /// (s1 + s2)^2 / 2 = (tr(M†M) + 2|det M|) / 2.
    pub fn max_entangled_fidelity(&self, a: usize, b: usize) -> f64 {
        let purity = self.pair_purity(a, b);
        assert!(
            (purity - 1.0).abs() < 1e-9,
            "pair ({a}, {b}) is not pure: tr(rho^2) = {purity}"
        );
        let rho = self.reduced_density_2q(a, b);
        // Dominant eigenvector of a rank-1 projector by power iteration.
        let mut v = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.1),
            Complex64::new(0.5, -0.1),
            Complex64::new(0.5, 0.2),
        ];
        for _ in 0..64 {
            let mut w = [Complex64::new(0.0, 0.0); 4];
            for r in 0..4 {
                for c in 0..4 {
                    w[r] += rho[r][c] * v[c];
                }
            }
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm > 1e-12, "power iteration collapsed");
            for x in &mut w {
                *x /= norm;
            }
            v = w;
        }
        // v indexes (qa, qb) as qa + 2*qb: M[qa][qb] = v[qa + 2 qb].
        let m = [[v[0], v[2]], [v[1], v[3]]];
        let t = m.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>();
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
        (t + 2.0 * det) / 2.0
    }

    /// Reduced density matrix of a single qubit.
    pub fn reduced_density_1q(&self, q: usize) -> [[Complex64; 2]; 2] {
        assert!(q < self.n);
        let mq = 1usize << q;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, ai) in self.amps.iter().enumerate() {
            let rest = i & !mq;
            let r = (i & mq != 0) as usize;
            for c in 0..2 {
                let j = rest | (c * mq);
                rho[r][c] += ai * self.amps[j].conj();
            }
        }
        rho
    }

    /// Local state of a qubit that is in a pure product state.
    pub fn extract_qubit(&self, q: usize) -> [Complex64; 2] {
        let rho = self.reduced_density_1q(q);
        let purity = (rho[0][0] * rho[0][0] + rho[0][1] * rho[1][0] * 2.0 + rho[1][1] * rho[1][1]).re;
        assert!((purity - 1.0).abs() < 1e-9, "qubit {q} is not pure: tr(rho^2) = {purity}");
        let mut v = [Complex64::new(0.6, 0.0), Complex64::new(0.4, 0.3)];
        for _ in 0..64 {
            let w = [
                rho[0][0] * v[0] + rho[0][1] * v[1],
                rho[1][0] * v[0] + rho[1][1] * v[1],
            ];
            let norm = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            assert!(norm > 1e-12, "power iteration collapsed");
            v = [w[0] / norm, w[1] / norm];
        }
        v
    }
}

/// Normalized eigenvector of a single-qubit Pauli for the given sign.
pub fn pauli_eigenstate(p: crate::pauli::Pauli, sign: i8) -> [Complex64; 2] {
    use crate::pauli::Pauli;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match (p, sign >= 0) {
        (Pauli::Z, true) => [c(1.0, 0.0), c(0.0, 0.0)],
        (Pauli::Z, false) => [c(0.0, 0.0), c(1.0, 0.0)],
        (Pauli::X, true) => [c(h, 0.0), c(h, 0.0)],
        (Pauli::X, false) => [c(h, 0.0), c(-h, 0.0)],
        (Pauli::Y, true) => [c(h, 0.0), c(0.0, h)],
        (Pauli::Y, false) => [c(h, 0.0), c(0.0, -h)],
        (Pauli::I, _) => panic!("identity has no eigenbasis choice"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Clifford;
    use crate::oracle::tableau::StabilizerTableau;
    use crate::pauli::Pauli;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn bell_dense() -> DenseState {
        let mut d = DenseState::zero(2);
        d.apply_1q(0, Clifford::H.matrix());
        // CX 0->1 via H-CZ-H.
        d.apply_1q(1, Clifford::H.matrix());
        d.apply_cz(0, 1);
        d.apply_1q(1, Clifford::H.matrix());
        d
    }

    #[test]
    fn pauli_action_matches_matrices() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            for seed_bit in 0..2usize {
                let mut st = DenseState::zero(1);
                st.amps[0] = Complex64::new(0.0, 0.0);
                st.amps[seed_bit] = Complex64::new(1.0, 0.0);
                let mut via_string = st.clone();
                via_string.apply_pauli_string(&PauliString::single(0, p));
                let mut via_matrix = st.clone();
                via_matrix.apply_1q(0, p.matrix());
                assert!(via_string.fidelity(&via_matrix) > 1.0 - TOL);
                // Same global phase too:
                let diff: f64 = via_string
                    .amps
                    .iter()
                    .zip(&via_matrix.amps)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                assert_abs_diff_eq!(diff, 0.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn bell_probabilities() {
        let d = bell_dense();
        assert_abs_diff_eq!(d.prob_plus(&PauliString::parse("+XX").unwrap()), 1.0, epsilon = TOL);
        assert_abs_diff_eq!(d.prob_plus(&PauliString::parse("+ZZ").unwrap()), 1.0, epsilon = TOL);
        assert_abs_diff_eq!(d.prob_plus(&PauliString::parse("+ZI").unwrap()), 0.5, epsilon = TOL);
        let mut d2 = d.clone();
        assert_abs_diff_eq!(d2.measure_force(&PauliString::parse("+ZI").unwrap(), -1).unwrap(), 0.5, epsilon = TOL);
        assert_abs_diff_eq!(d2.prob_plus(&PauliString::parse("+IZ").unwrap()), 0.0, epsilon = TOL);
    }

    #[test]
    fn from_stab_group_rebuilds_states() {
        let mut t = StabilizerTableau::new(2);
        t.apply_h(0).unwrap();
        t.apply_cx(0, 1).unwrap();
        let rebuilt = DenseState::from_stab_group(&t.stab_group()).unwrap();
        assert!(rebuilt.fidelity(&bell_dense()) > 1.0 - TOL);
    }

    #[test]
    fn tableau_and_dense_agree_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6usize {
            for _ in 0..12 {
                let mut t = StabilizerTableau::new(n);
                let mut d = DenseState::zero(n);
                for _ in 0..40 {
                    match rng.gen_range(0..3) {
                        0 => {
                            let q = rng.gen_range(0..n);
                            t.apply_h(q).unwrap();
                            d.apply_1q(q, Clifford::H.matrix());
                        }
                        1 => {
                            let q = rng.gen_range(0..n);
                            t.apply_s(q).unwrap();
                            d.apply_1q(q, Clifford::S.matrix());
                        }
                        _ => {
                            let a = rng.gen_range(0..n);
                            let b = (a + rng.gen_range(1..n)) % n;
                            t.apply_cz(a, b).unwrap();
                            d.apply_cz(a, b);
                        }
                    }
                }
                let rebuilt = DenseState::from_stab_group(&t.stab_group()).unwrap();
                assert!(
                    rebuilt.fidelity(&d) > 1.0 - 1e-9,
                    "tableau and dense disagree on an n={n} circuit"
                );
                // Measurement branch probabilities agree too.
                let q = rng.gen_range(0..n);
                let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
                let m = PauliString::single(q, p);
                let dense_p = d.prob_plus(&m);
                let mut t2 = t.clone();
                match t2.measure_force(&m, 1) {
                    Ok(prob) => assert_abs_diff_eq!(dense_p, prob, epsilon = 1e-9),
                    Err(OracleError::ForcedImpossible) => assert_abs_diff_eq!(dense_p, 0.0, epsilon = 1e-9),
                    Err(e) => panic!("unexpected error {e}"),
                }
                // And the post-measurement states match when forced alike.
                let outcome: i8 = if dense_p > 0.5 || (dense_p > 1e-9 && rng.gen()) { 1 } else { -1 };
                let mut td = t.clone();
                let mut dd = d.clone();
                td.measure_force(&m, outcome).unwrap();
                dd.measure_force(&m, outcome).unwrap();
                let after = DenseState::from_stab_group(&td.stab_group()).unwrap();
                assert!(after.fidelity(&dd) > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn contraction_removes_product_qubits() {
        let mut d = DenseState::zero(3);
        d.apply_1q(0, Clifford::H.matrix());
        d.apply_1q(1, Clifford::H.matrix());
        d.apply_cz(0, 1);
        // Qubit 2 stays |0>.
        let (reduced, w) = d.contract_qubit(2, pauli_eigenstate(Pauli::Z, 1));
        assert_abs_diff_eq!(w, 1.0, epsilon = TOL);
        let mut expect = DenseState::zero(2);
        expect.apply_1q(0, Clifford::H.matrix());
        expect.apply_1q(1, Clifford::H.matrix());
        expect.apply_cz(0, 1);
        assert!(reduced.fidelity(&expect) > 1.0 - TOL);
        // Contracting against the wrong state reports weight 1/2.
        let (_, w_wrong) = d.contract_qubit(2, pauli_eigenstate(Pauli::X, 1));
        assert_abs_diff_eq!(w_wrong, 0.5, epsilon = TOL);
    }

    #[test]
    fn entanglement_overlap_metrics() {
        let d = bell_dense();
        assert_abs_diff_eq!(d.pair_purity(0, 1), 1.0, epsilon = TOL);
        assert_abs_diff_eq!(d.max_entangled_fidelity(0, 1), 1.0, epsilon = 1e-9);

        let mut prod = DenseState::zero(2);
        prod.apply_1q(0, Clifford::H.matrix());
        assert_abs_diff_eq!(prod.max_entangled_fidelity(0, 1), 0.5, epsilon = 1e-9);

        // Graph-state Bell pair (CZ form) is also maximally entangled.
        let mut gbell = DenseState::plus(2);
        gbell.apply_cz(0, 1);
        assert_abs_diff_eq!(gbell.max_entangled_fidelity(0, 1), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn extract_qubit_recovers_local_states() {
        for (p, s) in [(Pauli::X, 1i8), (Pauli::Y, -1), (Pauli::Z, 1)] {
            let mut d = DenseState::zero(3);
            d.apply_1q(1, Clifford::H.matrix());
            d.apply_cz(1, 2);
            let target = pauli_eigenstate(p, s);
            // Prepare qubit 0 in the target state from |0>.
            let m = [
                [target[0], -target[1].conj()],
                [target[1], target[0].conj()],
            ];
            d.apply_1q(0, m);
            let got = d.extract_qubit(0);
            let overlap = (got[0].conj() * target[0] + got[1].conj() * target[1]).norm_sqr();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sampling_tracks_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        // Biased state: cos(pi/8)|0> + sin(pi/8)|1>, p(+Z) = cos^2(pi/8) ~ 0.853.
        let th = std::f64::consts::PI / 8.0;
        let mut plus = 0u32;
        let trials = 10_000u32;
        for _ in 0..trials {
            let mut d = DenseState::zero(1);
            d.apply_1q(
                0,
                [
                    [Complex64::new(th.cos(), 0.0), Complex64::new(-th.sin(), 0.0)],
                    [Complex64::new(th.sin(), 0.0), Complex64::new(th.cos(), 0.0)],
                ],
            );
            if d.measure_sample(&PauliString::single(0, Pauli::Z), &mut rng) == 1 {
                plus += 1;
            }
        }
        let expect = (th.cos() * th.cos() * trials as f64) as u32;
        assert!((plus as i32 - expect as i32).unsigned_abs() < 250, "plus {plus} vs expected {expect}");
    }
}
