//! Exact solution counting for affine systems over GF(2) in the seed bits.
//!
//! Every output bit of the polynomial hash is a GF(2)-linear function of the
//! seed, so "the top `j` bits of `h(x)` are zero" is a homogeneous linear
//! system. Conjunctions of such coin events stay affine after substituting a
//! fixed seed prefix, and the number of consistent seeds satisfying them is
//! `2^(free − rank)` or zero.

/// One equation `⟨mask, seed⟩ = rhs` over GF(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Equation {
    pub mask: u128,
    pub rhs: bool,
}

/// Incrementally reduced row basis keyed by each row's highest set bit.
#[derive(Debug, Clone, Default)]
pub struct Basis {
    rows: Vec<Equation>,
    consistent: bool,
}

impl Basis {
    pub fn new() -> Self {
        Basis {
            rows: Vec::new(),
            consistent: true,
        }
    }

    pub fn rank(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn insert(&mut self, eq: Equation) {
        if !self.consistent {
            return;
        }
        let mut cur = eq;
        for row in &self.rows {
            let pivot = 127 - row.mask.leading_zeros();
            if cur.mask >> pivot & 1 == 1 {
                cur.mask ^= row.mask;
                cur.rhs ^= row.rhs;
            }
        }
        if cur.mask == 0 {
            if cur.rhs {
                self.consistent = false;
            }
            return;
        }
        // keep rows sorted by descending pivot so one pass reduces fully
        let pivot = 127 - cur.mask.leading_zeros();
        let pos = self
            .rows
            .iter()
            .position(|r| 127 - r.mask.leading_zeros() < pivot)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, cur);
    }
}

/// Number of seeds agreeing with the low `fixed` bits of `prefix` that
/// satisfy every equation, as a power-of-two exponent (`None` = zero seeds).
pub fn count_exponent(
    t: u32,
    prefix: u128,
    fixed: u32,
    equations: impl IntoIterator<Item = Equation>,
) -> Option<u32> {
    let fixed_mask = low_mask(fixed);
    let mut basis = Basis::new();
    for eq in equations {
        let known = (eq.mask & fixed_mask & prefix).count_ones() % 2 == 1;
        basis.insert(Equation {
            mask: eq.mask & !fixed_mask,
            rhs: eq.rhs ^ known,
        });
        if !basis.is_consistent() {
            return None;
        }
    }
    Some(t - fixed - basis.rank())
}

pub fn low_mask(bits: u32) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}
