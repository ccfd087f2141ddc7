//! Stabilizer tableau simulator with destabilizer rows.
//!
//! State representation: n stabilizer generators plus n destabilizer rows,
//! each a signed Pauli string packed into two u32 bitmasks (x and z) and a
//! sign bit. Qubit q corresponds to bit q. Destabilizer row i anticommutes
//! with stabilizer row i and commutes with every other row; this pairing is
//! what makes deterministic measurement outcomes computable in O(n^2).

use crate::pauli::Pauli;
use rand::Rng;
use thiserror::Error;

pub const MAX_QUBITS: usize = 32;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum OracleError {
    #[error("qubit index {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("forced outcome has probability zero")]
    ForcedImpossible,
    #[error("qubit {0} is still entangled; cannot factor it out")]
    NotProductForm(usize),
    #[error("stabilizer set is not independent")]
    DependentGenerators,
    #[error("too many qubits: {0} (max {MAX_QUBITS})")]
    TooManyQubits(usize),
}

/// A signed n-qubit Pauli operator: (-1)^neg * prod_q P_q where P_q is
/// encoded by bits (x_q, z_q): 00 = I, 10 = X, 11 = Y, 01 = Z.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PauliString {
    pub x: u32,
    pub z: u32,
    pub neg: bool,
}

impl PauliString {
    pub fn identity() -> PauliString {
        PauliString { x: 0, z: 0, neg: false }
    }

    pub fn single(q: usize, p: Pauli) -> PauliString {
        let (xb, zb) = p.bits();
        PauliString {
            x: (xb as u32) << q,
            z: (zb as u32) << q,
            neg: false,
        }
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set_letter(&mut self, q: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        self.x = self.x & !(1 << q) | ((xb as u32) << q);
        self.z = self.z & !(1 << q) | ((zb as u32) << q);
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u32 {
        self.x | self.z
    }

    /// True iff the two operators commute.
    pub fn commutes(&self, other: &PauliString) -> bool {
        let cross = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        cross % 2 == 0
    }

    /// Operator product self * other with the exact phase: returns the
    /// result string (sign folded in) plus the leftover i-exponent, which is
    /// 0 for commuting factors and 1 or 3 for anticommuting ones.
    pub fn mul_tracked(&self, other: &PauliString) -> (PauliString, u8) {
        let mut exp: u32 = 0;
        let mut sites = self.support() | other.support();
        while sites != 0 {
            let q = sites.trailing_zeros() as usize;
            sites &= sites - 1;
            let (e, _) = self.letter(q).mul(other.letter(q));
            exp += e as u32;
        }
        let total = (exp % 4) as u8;
        let out = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            neg: self.neg ^ other.neg ^ (total & 2 != 0),
        };
        (out, total & 1)
    }

    /// Product of two commuting operators (panics if they anticommute).
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let (out, odd) = self.mul_tracked(other);
        assert_eq!(odd, 0, "product of anticommuting strings is not Hermitian");
        out
    }

    /// Renders like "+XIZ" with qubit 0 leftmost.
    pub fn to_text(&self, n: usize) -> String {
        let mut s = String::with_capacity(n + 1);
        s.push(if self.neg { '-' } else { '+' });
        for q in 0..n {
            s.push(match self.letter(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            });
        }
        s
    }

    /// Parses the `to_text` format.
    pub fn parse(text: &str) -> Option<PauliString> {
        let mut chars = text.chars();
        let neg = match chars.next()? {
            '+' => false,
            '-' => true,
            _ => return None,
        };
        let mut out = PauliString { x: 0, z: 0, neg };
        for (q, c) in chars.enumerate() {
            if q >= MAX_QUBITS {
                return None;
            }
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return None,
            };
            out.set_letter(q, p);
        }
        Some(out)
    }
}

/// Whether a measurement outcome is fixed by the state or a fair coin.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Determinism {
    /// The state is already an eigenstate; the outcome is this sign.
    Deterministic(i8),
    /// Both outcomes have probability 1/2.
    Random,
}

/// Canonical generating set of a stabilizer group.
///
/// Rows are in fully reduced row-echelon form over the column order
/// x_0..x_{n-1}, z_0..z_{n-1}, with signs tracked through every row
/// operation. Two stabilizer states are equal iff their canonical groups
/// compare equal, so this type is the exact-equality currency of the test
/// suite.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct StabGroup {
    n: usize,
    rows: Vec<PauliString>,
}

impl StabGroup {
    /// Canonicalizes the given generators (dependent rows are dropped).
    /// Fails if the rows generate -identity (not a valid stabilizer group).
    pub fn new(n: usize, rows: Vec<PauliString>) -> Result<StabGroup, OracleError> {
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits(n));
        }
        let mut work = rows;
        let mut pivots = 0usize;
        for col in 0..2 * n {
            let bit = |r: &PauliString| -> bool {
                if col < n {
                    r.x >> col & 1 == 1
                } else {
                    r.z >> (col - n) & 1 == 1
                }
            };
            let Some(piv) = (pivots..work.len()).find(|&i| bit(&work[i])) else {
                continue;
            };
            work.swap(pivots, piv);
            let pivot = work[pivots];
            for (i, row) in work.iter_mut().enumerate() {
                if i != pivots && bit(row) {
                    *row = row.mul(&pivot);
                }
            }
            pivots += 1;
        }
        for row in &work[pivots..] {
            if row.neg {
                return Err(OracleError::DependentGenerators);
            }
        }
        work.truncate(pivots);
        Ok(StabGroup { n, rows: work })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Number of independent generators.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.to_text(self.n)).collect()
    }

    /// Removes qubit `q`, which must be disentangled: the group must contain
    /// a bare single-qubit generator on q and nothing else touching q.
    /// Remaining qubits above q shift down by one.
    pub fn remove_qubit(&self, q: usize) -> Result<StabGroup, OracleError> {
        if q >= self.n {
            return Err(OracleError::QubitOutOfRange(q, self.n));
        }
        let mask = 1u32 << q;
        let mut bare: Option<PauliString> = None;
        for row in &self.rows {
            if row.support() & mask != 0 && row.support() == mask {
                bare = Some(*row);
                break;
            }
        }
        let bare = bare.ok_or(OracleError::NotProductForm(q))?;
        let mut kept = Vec::with_capacity(self.rows.len().saturating_sub(1));
        for row in &self.rows {
            if *row == bare {
                continue;
            }
            let mut r = *row;
            if r.support() & mask != 0 {
                if r.letter(q) != bare.letter(q) {
                    return Err(OracleError::NotProductForm(q));
                }
                r = r.mul(&bare);
            }
            r.x = drop_bit(r.x, q);
            r.z = drop_bit(r.z, q);
            kept.push(r);
        }
        StabGroup::new(self.n - 1, kept)
    }

    /// Removes every qubit not in `kept` (all must be disentangled from the
    /// kept set). Kept qubits are re-indexed in ascending order.
    pub fn keep_qubits(&self, kept: &std::collections::BTreeSet<usize>) -> Result<StabGroup, OracleError> {
        let mut g = self.clone();
        for q in (0..self.n).rev() {
            if !kept.contains(&q) {
                g = g.remove_qubit(q)?;
            }
        }
        Ok(g)
    }
}

impl std::fmt::Display for StabGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_strings().join(" "))
    }
}

fn drop_bit(mask: u32, q: usize) -> u32 {
    let low = mask & ((1u32 << q) - 1);
    let high = (mask >> (q + 1)) << q;
    low | high
}

/// Stabilizer tableau over at most 32 qubits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabilizerTableau {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

impl StabilizerTableau {
    /// |0...0> on n qubits: stabilizers Z_q, destabilizers X_q.
    pub fn new(n: usize) -> StabilizerTableau {
        assert!(n <= MAX_QUBITS, "tableau supports at most {MAX_QUBITS} qubits");
        StabilizerTableau {
            n,
            destab: (0..n).map(|q| PauliString::single(q, Pauli::X)).collect(),
            stab: (0..n).map(|q| PauliString::single(q, Pauli::Z)).collect(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    fn check_qubit(&self, q: usize) -> Result<(), OracleError> {
        if q < self.n {
            Ok(())
        } else {
            Err(OracleError::QubitOutOfRange(q, self.n))
        }
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut PauliString> {
        self.destab.iter_mut().chain(self.stab.iter_mut())
    }

    /// Applies any single-qubit Clifford gate by conjugating the local
    /// letter of every row through its signed image table.
    pub fn apply_clifford1(&mut self, q: usize, u: &crate::clifford::Clifford) -> Result<(), OracleError> {
        self.check_qubit(q)?;
        for row in self.rows_mut() {
            let p = row.letter(q);
            if p == Pauli::I {
                continue;
            }
            let img = u.conjugate(crate::pauli::SignedPauli::plus(p));
            row.set_letter(q, img.pauli);
            row.neg ^= img.neg;
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<(), OracleError> {
        self.apply_clifford1(q, &crate::clifford::Clifford::H)
    }

    pub fn apply_s(&mut self, q: usize) -> Result<(), OracleError> {
        self.apply_clifford1(q, &crate::clifford::Clifford::S)
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), OracleError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        assert_ne!(a, b);
        let (ma, mb) = (1u32 << a, 1u32 << b);
        for row in self.rows_mut() {
            let (xa, xb) = (row.x & ma != 0, row.x & mb != 0);
            let (za, zb) = (row.z & ma != 0, row.z & mb != 0);
            if xa && xb && (za ^ zb) {
                row.neg = !row.neg;
            }
            if xb {
                row.z ^= ma;
            }
            if xa {
                row.z ^= mb;
            }
        }
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<(), OracleError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        assert_ne!(control, target);
        let (mc, mt) = (1u32 << control, 1u32 << target);
        for row in self.rows_mut() {
            let (xc, xt) = (row.x & mc != 0, row.x & mt != 0);
            let (zc, zt) = (row.z & mc != 0, row.z & mt != 0);
            if xc && zt && (xt == zc) {
                row.neg = !row.neg;
            }
            if xc {
                row.x ^= mt;
            }
            if zt {
                row.z ^= mc;
            }
        }
        Ok(())
    }

    /// Classifies the outcome of measuring the observable `m` without
    /// changing the state.
    pub fn outcome_kind(&self, m: &PauliString) -> Determinism {
        if self.stab.iter().any(|s| !s.commutes(m)) {
            Determinism::Random
        } else {
            Determinism::Deterministic(self.deterministic_sign(m))
        }
    }

    /// Sign of the deterministic outcome: +1 if m itself stabilizes the
    /// state, -1 if -m does. Assumes m commutes with every stabilizer.
    fn deterministic_sign(&self, m: &PauliString) -> i8 {
        let mut acc = PauliString::identity();
        for i in 0..self.n {
            if !self.destab[i].commutes(m) {
                acc = acc.mul(&self.stab[i]);
            }
        }
        debug_assert_eq!(acc.x, m.x, "observable outside the stabilizer span");
        debug_assert_eq!(acc.z, m.z, "observable outside the stabilizer span");
        if acc.neg == m.neg {
            1
        } else {
            -1
        }
    }

    fn collapse(&mut self, m: &PauliString, outcome: i8) {
        let p = self
            .stab
            .iter()
            .position(|s| !s.commutes(m))
            .expect("collapse requires a random measurement");
        let pivot = self.stab[p];
        for (i, row) in self.destab.iter_mut().enumerate() {
            if i != p && !row.commutes(m) {
                let (r, odd) = row.mul_tracked(&pivot);
                // Destabilizer rows are phase conventions, not state content;
                // an odd i-exponent here is folded away.
                let _ = odd;
                *row = r;
            }
        }
        for (i, row) in self.stab.iter_mut().enumerate() {
            if i != p && !row.commutes(m) {
                *row = row.mul(&pivot);
            }
        }
        self.destab[p] = pivot;
        self.stab[p] = PauliString { neg: m.neg ^ (outcome < 0), ..*m };
        // Destabilizer p must anticommute with the new stabilizer p and
        // commute with all others; the pivot satisfies this by construction.
    }

    /// Measures observable `m`, drawing a fair coin for random outcomes.
    /// Returns +1 or -1.
    pub fn measure_sample<R: Rng + ?Sized>(&mut self, m: &PauliString, rng: &mut R) -> i8 {
        match self.outcome_kind(m) {
            Determinism::Deterministic(sign) => sign,
            Determinism::Random => {
                let outcome: i8 = if rng.gen::<bool>() { 1 } else { -1 };
                self.collapse(m, outcome);
                outcome
            }
        }
    }

    /// Forces the measurement of `m` to the given outcome and returns the
    /// probability of that branch (1.0 or 0.5). Errs if the branch has
    /// probability zero, leaving the state untouched.
    pub fn measure_force(&mut self, m: &PauliString, outcome: i8) -> Result<f64, OracleError> {
        assert!(outcome == 1 || outcome == -1);
        match self.outcome_kind(m) {
            Determinism::Deterministic(sign) => {
                if sign == outcome {
                    Ok(1.0)
                } else {
                    Err(OracleError::ForcedImpossible)
                }
            }
            Determinism::Random => {
                self.collapse(m, outcome);
                Ok(0.5)
            }
        }
    }

    /// Convenience: single-qubit Pauli measurement.
    pub fn measure_pauli_sample<R: Rng + ?Sized>(&mut self, q: usize, p: Pauli, rng: &mut R) -> Result<i8, OracleError> {
        self.check_qubit(q)?;
        assert_ne!(p, Pauli::I);
        Ok(self.measure_sample(&PauliString::single(q, p), rng))
    }

    pub fn measure_pauli_force(&mut self, q: usize, p: Pauli, outcome: i8) -> Result<f64, OracleError> {
        self.check_qubit(q)?;
        assert_ne!(p, Pauli::I);
        self.measure_force(&PauliString::single(q, p), outcome)
    }

    /// Canonical stabilizer group of the current state.
    pub fn stab_group(&self) -> StabGroup {
        StabGroup::new(self.n, self.stab.clone()).expect("tableau stabilizers are always independent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> StabilizerTableau {
        let mut t = StabilizerTableau::new(2);
        t.apply_h(0).unwrap();
        t.apply_cx(0, 1).unwrap();
        t
    }

    fn ghz(n: usize) -> StabilizerTableau {
        let mut t = StabilizerTableau::new(n);
        t.apply_h(0).unwrap();
        for q in 1..n {
            t.apply_cx(0, q).unwrap();
        }
        t
    }

    #[test]
    fn string_multiplication_tracks_phases() {
        let x = PauliString::single(0, Pauli::X);
        let z = PauliString::single(0, Pauli::Z);
        let (xz, odd) = x.mul_tracked(&z);
        assert_eq!(odd, 1); // X Z = -i Y: odd i power
        assert_eq!(xz.letter(0), Pauli::Y);
        let xx = PauliString::parse("+XX").unwrap();
        let zz = PauliString::parse("+ZZ").unwrap();
        assert!(xx.commutes(&zz));
        let yy = xx.mul(&zz);
        assert_eq!(yy.to_text(2), "-YY"); // XZ ⊗ XZ = (-iY)(-iY) = -YY
    }

    #[test]
    fn parse_round_trip() {
        for text in ["+XIZY", "-ZZZZ", "+I"] {
            let p = PauliString::parse(text).unwrap();
            assert_eq!(p.to_text(text.len() - 1), text);
        }
        assert!(PauliString::parse("XX").is_none());
        assert!(PauliString::parse("+XQ").is_none());
    }

    #[test]
    fn bell_pair_stabilizers() {
        let t = bell();
        assert_eq!(t.stab_group().to_strings(), vec!["+XX", "+ZZ"]);
    }

    #[test]
    fn bell_measurements_correlate() {
        // Z on one half is random; the other half then matches it.
        for forced in [1i8, -1] {
            let mut t = bell();
            let p = t.measure_pauli_force(0, Pauli::Z, forced).unwrap();
            assert_eq!(p, 0.5);
            assert_eq!(t.outcome_kind(&PauliString::single(1, Pauli::Z)), Determinism::Deterministic(forced));
        }
        // XX is a stabilizer: deterministic +1.
        let mut t = bell();
        assert_eq!(t.measure_force(&PauliString::parse("+XX").unwrap(), 1).unwrap(), 1.0);
        assert_eq!(
            t.measure_force(&PauliString::parse("+XX").unwrap(), -1),
            Err(OracleError::ForcedImpossible)
        );
    }

    #[test]
    fn ghz_collapse_chain() {
        let mut t = ghz(3);
        assert_eq!(t.measure_force(&PauliString::parse("+XXX").unwrap(), 1).unwrap(), 1.0);
        assert_eq!(t.measure_pauli_force(0, Pauli::Z, -1).unwrap(), 0.5);
        // Remaining qubits are now |1>.
        assert_eq!(t.measure_pauli_force(1, Pauli::Z, -1).unwrap(), 1.0);
        assert_eq!(t.measure_pauli_force(2, Pauli::Z, -1).unwrap(), 1.0);
    }

    #[test]
    fn sampling_is_roughly_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut plus = 0u32;
        let trials = 10_000;
        for _ in 0..trials {
            let mut t = StabilizerTableau::new(1);
            t.apply_h(0).unwrap();
            if t.measure_pauli_sample(0, Pauli::Z, &mut rng).unwrap() == 1 {
                plus += 1;
            }
        }
        // 6 sigma band around 5000 (sigma = 50).
        assert!((4700..=5300).contains(&plus), "plus count {plus} outside fair band");
    }

    #[test]
    fn canonical_group_is_preparation_independent() {
        let a = bell().stab_group();
        let mut t = StabilizerTableau::new(2);
        t.apply_h(1).unwrap();
        t.apply_cx(1, 0).unwrap();
        assert_eq!(t.stab_group(), a);

        // Same group from redundant, sign-twisted generators.
        let g = StabGroup::new(
            2,
            vec![
                PauliString::parse("-YY").unwrap(),
                PauliString::parse("+ZZ").unwrap(),
                PauliString::parse("+XX").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(g, a);
        assert_eq!(g.rank(), 2);
    }

    #[test]
    fn minus_identity_is_rejected() {
        let r = StabGroup::new(
            1,
            vec![PauliString::parse("+Z").unwrap(), PauliString::parse("-Z").unwrap()],
        );
        assert_eq!(r, Err(OracleError::DependentGenerators));
    }

    #[test]
    fn factor_out_measured_qubit() {
        let mut t = bell();
        t.measure_pauli_force(0, Pauli::X, 1).unwrap();
        let g = t.stab_group();
        let reduced = g.remove_qubit(0).unwrap();
        assert_eq!(reduced.to_strings(), vec!["+X"]); // partner left in |+>
        // The partner qubit is entangled before measurement: not removable.
        assert!(matches!(bell().stab_group().remove_qubit(0), Err(OracleError::NotProductForm(0))));
    }

    #[test]
    fn keep_qubits_reindexes() {
        let mut t = ghz(3);
        t.measure_pauli_force(1, Pauli::Z, 1).unwrap();
        let kept: std::collections::BTreeSet<usize> = [0, 2].into_iter().collect();
        let g = t.stab_group().keep_qubits(&kept).unwrap();
        // Measuring Z on one GHZ qubit collapses the rest to |00>.
        assert_eq!(g.to_strings(), vec!["+ZI", "+IZ"]);
    }

    #[test]
    fn clifford_gate_rules_match_direct_conjugation() {
        // S: X -> Y; H: X <-> Z; applied via the generic path.
        let mut t = StabilizerTableau::new(1);
        t.apply_h(0).unwrap(); // stab Z -> X
        assert_eq!(t.stab_group().to_strings(), vec!["+X"]);
        t.apply_s(0).unwrap(); // X -> Y
        assert_eq!(t.stab_group().to_strings(), vec!["+Y"]);
        t.apply_clifford1(0, &crate::clifford::Clifford::S).unwrap(); // Y -> -X
        assert_eq!(t.stab_group().to_strings(), vec!["-X"]);
    }

    #[test]
    fn cz_builds_graph_state_stabilizers() {
        // Triangle graph state: K_a = X_a Z_b Z_c.
        let mut t = StabilizerTableau::new(3);
        for q in 0..3 {
            t.apply_h(q).unwrap();
        }
        t.apply_cz(0, 1).unwrap();
        t.apply_cz(0, 2).unwrap();
        t.apply_cz(1, 2).unwrap();
        let g = t.stab_group();
        for text in ["+XZZ", "+ZXZ", "+ZZX"] {
            let m = PauliString::parse(text).unwrap();
            assert_eq!(t.outcome_kind(&m), Determinism::Deterministic(1), "{text} should stabilize");
        }
        assert_eq!(g.rank(), 3);
    }
}
