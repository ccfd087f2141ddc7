//! The single-qubit Clifford group (24 elements up to global phase).
//!
//! An element is stored as its conjugation action: the signed images of X
//! and Z. That determines the image of Y (via Y = iXZ) and composes without
//! any reference to matrices. A canonical index 0..23 is assigned by
//! breadth-first generation from the identity over {H, S} products, which
//! also hands every element a shortest H/S word (used to drive the tableau
//! and dense oracles) and a concrete 2x2 matrix representative.

use crate::pauli::{Pauli, SignedPauli};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// A single-qubit Clifford as a conjugation map, U P U^dag.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub struct Clifford {
    img_x: SignedPauli,
    img_z: SignedPauli,
}

/// Generator alphabet for words representing group elements.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gate1 {
    H,
    S,
}

impl Clifford {
    pub const IDENTITY: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::X, neg: false },
        img_z: SignedPauli { pauli: Pauli::Z, neg: false },
    };
    pub const H: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::Z, neg: false },
        img_z: SignedPauli { pauli: Pauli::X, neg: false },
    };
    /// S = diag(1, i): X -> Y, Z -> Z.
    pub const S: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::Y, neg: false },
        img_z: SignedPauli { pauli: Pauli::Z, neg: false },
    };
    pub const S_DAG: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::Y, neg: true },
        img_z: SignedPauli { pauli: Pauli::Z, neg: false },
    };
    pub const X: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::X, neg: false },
        img_z: SignedPauli { pauli: Pauli::Z, neg: true },
    };
    pub const Y: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::X, neg: true },
        img_z: SignedPauli { pauli: Pauli::Z, neg: true },
    };
    pub const Z: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::X, neg: true },
        img_z: SignedPauli { pauli: Pauli::Z, neg: false },
    };
    /// exp(+i pi/4 Y): X -> Z, Z -> -X.
    pub const SQRT_Y: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::Z, neg: false },
        img_z: SignedPauli { pauli: Pauli::X, neg: true },
    };
    /// exp(-i pi/4 Y): X -> -Z, Z -> X.
    pub const SQRT_Y_DAG: Clifford = Clifford {
        img_x: SignedPauli { pauli: Pauli::Z, neg: true },
        img_z: SignedPauli { pauli: Pauli::X, neg: false },
    };

    pub fn new(img_x: SignedPauli, img_z: SignedPauli) -> Clifford {
        assert!(img_x.pauli != Pauli::I && img_z.pauli != Pauli::I && img_x.pauli != img_z.pauli);
        Clifford { img_x, img_z }
    }

    pub fn img_x(&self) -> SignedPauli {
        self.img_x
    }

    pub fn img_z(&self) -> SignedPauli {
        self.img_z
    }

    /// Image of an arbitrary signed Pauli under conjugation.
    pub fn conjugate(&self, p: SignedPauli) -> SignedPauli {
        let base = match p.pauli {
            Pauli::I => SignedPauli::plus(Pauli::I),
            Pauli::X => self.img_x,
            Pauli::Z => self.img_z,
            // U Y U^dag = U (iXZ) U^dag = i (UXU^dag)(UZU^dag)
            Pauli::Y => self.img_x.i_mul(self.img_z),
        };
        SignedPauli { pauli: base.pauli, neg: base.neg ^ p.neg }
    }

    /// Composition as matrix product: (self.then_after(first)) acts as
    /// first on the state, then self. (UV) P (UV)^dag = U (V P V^dag) U^dag.
    pub fn compose(self, applied_first: Clifford) -> Clifford {
        Clifford {
            img_x: self.conjugate(applied_first.img_x),
            img_z: self.conjugate(applied_first.img_z),
        }
    }

    pub fn inverse(self) -> Clifford {
        // Find preimages of X and Z by scanning the six basis images.
        let mut inv_x = None;
        let mut inv_z = None;
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let img = self.conjugate(SignedPauli::plus(p));
            let back = SignedPauli { pauli: p, neg: img.neg };
            if img.pauli == Pauli::X {
                inv_x = Some(back);
            } else if img.pauli == Pauli::Z {
                inv_z = Some(back);
            }
        }
        Clifford { img_x: inv_x.unwrap(), img_z: inv_z.unwrap() }
    }

    /// Canonical index in 0..24. Stable across runs: the table is generated
    /// deterministically.
    pub fn index(&self) -> u8 {
        table()
            .iter()
            .position(|e| e.element == *self)
            .expect("every valid Clifford is in the table") as u8
    }

    pub fn from_index(idx: u8) -> Option<Clifford> {
        table().get(idx as usize).map(|e| e.element)
    }

    /// A shortest word over {H, S} whose product (applied left to right to
    /// the state) realizes this element up to global phase.
    pub fn word(&self) -> &'static [Gate1] {
        &table()[self.index() as usize].word
    }

    /// A concrete 2x2 unitary representative (global phase unspecified).
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let mut m = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        for g in self.word() {
            m = mat_mul(g.matrix(), m);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        *self == Clifford::IDENTITY
    }

    /// Short human-readable tag for traces.
    pub fn name(&self) -> String {
        match *self {
            Clifford::IDENTITY => "i".into(),
            Clifford::H => "h".into(),
            Clifford::S => "s".into(),
            Clifford::S_DAG => "sdg".into(),
            Clifford::X => "x".into(),
            Clifford::Y => "y".into(),
            Clifford::Z => "z".into(),
            Clifford::SQRT_Y => "sqrt_y".into(),
            Clifford::SQRT_Y_DAG => "sqrt_y_dag".into(),
            c => format!("c{}", c.index()),
        }
    }

    /// Inverse of [`Clifford::name`].
    pub fn from_name(name: &str) -> Option<Clifford> {
        match name {
            "i" => Some(Clifford::IDENTITY),
            "h" => Some(Clifford::H),
            "s" => Some(Clifford::S),
            "sdg" => Some(Clifford::S_DAG),
            "x" => Some(Clifford::X),
            "y" => Some(Clifford::Y),
            "z" => Some(Clifford::Z),
            "sqrt_y" => Some(Clifford::SQRT_Y),
            "sqrt_y_dag" => Some(Clifford::SQRT_Y_DAG),
            other => other.strip_prefix('c')?.parse::<u8>().ok().and_then(Clifford::from_index),
        }
    }
}

impl Default for Clifford {
    fn default() -> Clifford {
        Clifford::IDENTITY
    }
}

impl std::fmt::Display for Clifford {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Gate1 {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let r = 1.0 / 2.0_f64.sqrt();
        match self {
            Gate1::H => [
                [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
            ],
            Gate1::S => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            ],
        }
    }
}

struct Entry {
    element: Clifford,
    word: Vec<Gate1>,
}

fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            for k in 0..2 {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    out
}

/// BFS over right-extension by H and S. Index 0 is the identity; words are
/// shortest and the enumeration order is deterministic.
fn table() -> &'static Vec<Entry> {
    static TABLE: OnceLock<Vec<Entry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut entries: Vec<Entry> = vec![Entry { element: Clifford::IDENTITY, word: vec![] }];
        let mut cursor = 0;
        while cursor < entries.len() {
            let (base, base_word) = (entries[cursor].element, entries[cursor].word.clone());
            for g in [Gate1::H, Gate1::S] {
                let gate = match g {
                    Gate1::H => Clifford::H,
                    Gate1::S => Clifford::S,
                };
                // Appending g to the word means g acts after everything so far.
                let next = gate.compose(base);
                if !entries.iter().any(|e| e.element == next) {
                    let mut word = base_word.clone();
                    word.push(g);
                    entries.push(Entry { element: next, word });
                }
            }
            cursor += 1;
        }
        assert_eq!(entries.len(), 24);
        entries
    })
}
