//! The thirty coefficients of the general linear rank-3 equation
//!
//! ```text
//! a₁N_{αμν} + a₂N_{ναμ} + a₃N_{μνα} + a₄N_{ανμ} + a₅N_{νμα} + a₆N_{μαν}
//!   + Σᵢ (a₇ᵢ N⁽ⁱ⁾_μ g_{αν} + a₈ᵢ N⁽ⁱ⁾_ν g_{αμ} + a₉ᵢ N⁽ⁱ⁾_α g_{μν})
//!   + Σₖ (bₖ₁ M⁽ᵏ⁾_{αμν} + bₖ₂ M⁽ᵏ⁾_{ναμ} + bₖ₃ M⁽ᵏ⁾_{μνα})
//!   + ε_{ραμν} (b₁N⁽¹⁾ᵖ + b₂N⁽²⁾ᵖ + b₃N⁽³⁾ᵖ)
//!   + c₁M_μ g_{αν} + c₂M_ν g_{αμ} + c₃M_α g_{μν}  =  B_{αμν}
//! ```
//!
//! `a` and `a₇ᵢ…a₉ᵢ` are scalars; `bₖₗ`, `bₖ` and `cₘ` are pseudo-scalars.
//! The pseudo-trace couplings double as a fourth trace column:
//! `a₇₄ ≡ c₁`, `a₈₄ ≡ c₂`, `a₉₄ ≡ c₃`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::TensorError;

/// Number of coefficients.
pub const PARAM_COUNT: usize = 30;

/// Canonical flat order used for serialization.
pub const PARAM_NAMES: [&str; PARAM_COUNT] = [
    "a1", "a2", "a3", "a4", "a5", "a6", //
    "a71", "a72", "a73", "a81", "a82", "a83", "a91", "a92", "a93", //
    "b11", "b12", "b13", "b21", "b22", "b23", "b31", "b32", "b33", //
    "b1", "b2", "b3", //
    "c1", "c2", "c3",
];

/// The three metric-trace coupling families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `a₇ᵢ N⁽ⁱ⁾_μ g_{αν}`
    Seven,
    /// `a₈ᵢ N⁽ⁱ⁾_ν g_{αμ}`
    Eight,
    /// `a₉ᵢ N⁽ⁱ⁾_α g_{μν}`
    Nine,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParameterSet {
    /// `a₁ … a₆`
    pub a: [f64; 6],
    /// `a₇₁ a₇₂ a₇₃`
    pub a7: [f64; 3],
    /// `a₈₁ a₈₂ a₈₃`
    pub a8: [f64; 3],
    /// `a₉₁ a₉₂ a₉₃`
    pub a9: [f64; 3],
    /// `b_{kl}`, row k, column l (0-based)
    pub b_mat: [[f64; 3]; 3],
    /// `b₁ b₂ b₃`
    pub b_vec: [f64; 3],
    /// `c₁ c₂ c₃`
    pub c: [f64; 3],
}

impl ParameterSet {
    pub const ZERO: Self = Self {
        a: [0.0; 6],
        a7: [0.0; 3],
        a8: [0.0; 3],
        a9: [0.0; 3],
        b_mat: [[0.0; 3]; 3],
        b_vec: [0.0; 3],
        c: [0.0; 3],
    };

    /// `a₁ = 1`, everything else zero: the equation reads `N = B`.
    pub fn identity() -> Self {
        let mut p = Self::ZERO;
        p.a[0] = 1.0;
        p
    }

    /// Thirty i.i.d. uniform draws in `[−scale, scale]`, in flat order.
    pub fn random(seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, scale)
    }

    pub fn random_with<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
        let mut flat = [0.0; PARAM_COUNT];
        if scale > 0.0 {
            for x in flat.iter_mut() {
                *x = rng.gen_range(-scale..=scale);
            }
        }
        Self::from_flat(&flat)
    }

    /// `a₁ … a₆` by 1-based index.
    #[inline]
    pub fn perm(&self, i: usize) -> f64 {
        self.a[i - 1]
    }

    /// `b_{kl}` by 1-based indices.
    #[inline]
    pub fn b(&self, k: usize, l: usize) -> f64 {
        self.b_mat[k - 1][l - 1]
    }

    /// `a₇ᵢ`, `a₈ᵢ` or `a₉ᵢ` for `i ∈ 1..=4`; `i = 4` aliases `c₁`, `c₂`, `c₃`.
    pub fn coupling(&self, family: Coupling, i: usize) -> f64 {
        match (family, i) {
            (Coupling::Seven, 4) => self.c[0],
            (Coupling::Eight, 4) => self.c[1],
            (Coupling::Nine, 4) => self.c[2],
            (Coupling::Seven, i) => self.a7[i - 1],
            (Coupling::Eight, i) => self.a8[i - 1],
            (Coupling::Nine, i) => self.a9[i - 1],
        }
    }

    pub fn coupling_mut(&mut self, family: Coupling, i: usize) -> &mut f64 {
        match (family, i) {
            (Coupling::Seven, 4) => &mut self.c[0],
            (Coupling::Eight, 4) => &mut self.c[1],
            (Coupling::Nine, 4) => &mut self.c[2],
            (Coupling::Seven, i) => &mut self.a7[i - 1],
            (Coupling::Eight, i) => &mut self.a8[i - 1],
            (Coupling::Nine, i) => &mut self.a9[i - 1],
        }
    }

    pub fn to_flat(&self) -> [f64; PARAM_COUNT] {
        let mut out = [0.0; PARAM_COUNT];
        let mut k = 0;
        let mut push = |v: f64| {
            out[k] = v;
            k += 1;
        };
        self.a.iter().copied().for_each(&mut push);
        self.a7.iter().copied().for_each(&mut push);
        self.a8.iter().copied().for_each(&mut push);
        self.a9.iter().copied().for_each(&mut push);
        self.b_mat.iter().flatten().copied().for_each(&mut push);
        self.b_vec.iter().copied().for_each(&mut push);
        self.c.iter().copied().for_each(&mut push);
        out
    }

    pub fn from_flat(flat: &[f64; PARAM_COUNT]) -> Self {
        let mut p = Self::ZERO;
        for (slot, v) in p.slots_mut().into_iter().zip(flat) {
            *slot = *v;
        }
        p
    }

    fn slots_mut(&mut self) -> [&mut f64; PARAM_COUNT] {
        let [a1, a2, a3, a4, a5, a6] = &mut self.a;
        let [a71, a72, a73] = &mut self.a7;
        let [a81, a82, a83] = &mut self.a8;
        let [a91, a92, a93] = &mut self.a9;
        let [[b11, b12, b13], [b21, b22, b23], [b31, b32, b33]] = &mut self.b_mat;
        let [b1, b2, b3] = &mut self.b_vec;
        let [c1, c2, c3] = &mut self.c;
        [
            a1, a2, a3, a4, a5, a6, a71, a72, a73, a81, a82, a83, a91, a92, a93, b11, b12, b13,
            b21, b22, b23, b31, b32, b33, b1, b2, b3, c1, c2, c3,
        ]
    }

    fn flat_position(name: &str) -> Option<usize> {
        let canonical = match name {
            "a74" => "c1",
            "a84" => "c2",
            "a94" => "c3",
            other => other,
        };
        PARAM_NAMES.iter().position(|n| *n == canonical)
    }

    /// Looks up a coefficient by name; accepts the `a74/a84/a94` aliases.
    pub fn get(&self, name: &str) -> Option<f64> {
        Self::flat_position(name).map(|k| self.to_flat()[k])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut f64> {
        let k = Self::flat_position(name)?;
        Some(
            self.slots_mut()
                .into_iter()
                .nth(k)
                .expect("position in range"),
        )
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), TensorError> {
        match self.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(TensorError::UnknownParameter),
        }
    }

    /// Every coefficient multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Self::from_flat(&self.to_flat().map(|x| x * t))
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|x| x.is_finite())
    }
}
