//! Single-qubit Pauli algebra with exact phase bookkeeping.
//!
//! Products of Pauli matrices pick up powers of `i`; everything downstream
//! (Clifford conjugation, tableau row products) needs those powers exact, so
//! they are tracked as an exponent mod 4 rather than a float.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic (x, z) bit pair: X = (1,0), Z = (0,1), Y = (1,1).
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product `self * other`, returned as (exponent of i mod 4, Pauli).
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        let out = Pauli::from_bits(x1 ^ x2, z1 ^ z2);
        // i-exponent of the product of two (x,z) encodings:
        //   P = i^{xz} X^x Z^z  up to that convention's bookkeeping.
        // Rather than juggle the closed form, read it off a literal table.
        let phase = PHASE_TABLE[self.idx()][other.idx()];
        (phase, out)
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    fn idx(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }
}

/// PHASE_TABLE[a][b] = k where  a * b = i^k (a xor b),  rows/cols I X Y Z.
///
/// XY = iZ, YZ = iX, ZX = iY and the reverses pick up i^3.
const PHASE_TABLE: [[u8; 4]; 4] = [
    [0, 0, 0, 0],
    [0, 0, 1, 3],
    [0, 3, 0, 1],
    [0, 1, 3, 0],
];

/// A Pauli with a real sign (+1 or -1). Hermitian observables and stabilizer
/// components never need the imaginary phases.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub struct SignedPauli {
    pub pauli: Pauli,
    pub neg: bool,
}

impl SignedPauli {
    pub fn plus(pauli: Pauli) -> SignedPauli {
        SignedPauli { pauli, neg: false }
    }

    pub fn minus(pauli: Pauli) -> SignedPauli {
        SignedPauli { pauli, neg: true }
    }

    pub fn sign(&self) -> i8 {
        if self.neg {
            -1
        } else {
            1
        }
    }

    /// Product of two signed Paulis. Panics if the result is not Hermitian
    /// (i.e. carries a leftover factor of i), which cannot happen for
    /// commuting inputs or for the i * P * Q combinations used internally.
    pub fn mul(self, other: SignedPauli) -> SignedPauli {
        let (ph, p) = self.pauli.mul(other.pauli);
        assert!(ph % 2 == 0, "non-Hermitian Pauli product");
        SignedPauli {
            pauli: p,
            neg: self.neg ^ other.neg ^ (ph == 2),
        }
    }

    /// i * self * other, defined exactly when self and other anticommute
    /// (then the result is Hermitian). Used for Y = i X Z style images.
    pub fn i_mul(self, other: SignedPauli) -> SignedPauli {
        let (ph, p) = self.pauli.mul(other.pauli);
        assert!(ph % 2 == 1, "i*P*Q is Hermitian only for anticommuting P, Q");
        // i * i^ph = -1 for ph = 1, +1 for ph = 3.
        SignedPauli {
            pauli: p,
            neg: self.neg ^ other.neg ^ (ph == 1),
        }
    }
}

impl std::fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:?}", if self.neg { '-' } else { '+' }, self.pauli)
    }
}
