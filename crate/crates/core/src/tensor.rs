//! Fixed-dimension tensor containers and contraction primitives.
//!
//! Everything here lives in four dimensions. Rank-3 tensors are stored fully
//! covariant in a flat row-major array with index `16·α + 4·μ + ν`.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::linalg;
use crate::TensorError;

/// Spacetime dimension.
pub const DIM: usize = 4;

/// Number of components of a rank-3 tensor.
pub const RANK3_LEN: usize = DIM * DIM * DIM;

/// Flat index of the component `(α, μ, ν)`.
#[inline(always)]
pub const fn flat_index(alpha: usize, mu: usize, nu: usize) -> usize {
    16 * alpha + 4 * mu + nu
}

/// Inverse of [`flat_index`].
#[inline(always)]
pub const fn triple(flat: usize) -> (usize, usize, usize) {
    (flat / 16, (flat / 4) % 4, flat % 4)
}

/// Non-degenerate symmetric metric with its inverse, determinant and
/// signature sign `(−1)^s = sign(det g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    components: [[f64; 4]; 4],
    inverse: [[f64; 4]; 4],
    det: f64,
    sign_factor: i8,
}

impl Metric {
    /// Relative asymmetry tolerated before a metric is rejected.
    pub const SYMMETRY_TOL: f64 = 1e-12;
    /// `|det g|` must exceed this fraction of `max|g_ij|^4`.
    pub const DEGENERACY_TOL: f64 = 1e-12;

    pub fn new(components: [[f64; 4]; 4]) -> Result<Self, TensorError> {
        if components.iter().flatten().any(|x| !x.is_finite()) {
            return Err(TensorError::NonFiniteMetric);
        }
        let scale = linalg::max_norm(&components);
        for (i, row) in components.iter().enumerate() {
            for j in (i + 1)..4 {
                let diff = (row[j] - components[j][i]).abs();
                if diff > Self::SYMMETRY_TOL * scale.max(1.0) {
                    return Err(TensorError::AsymmetricMetric { row: i, col: j });
                }
            }
        }
        let det = linalg::det4(&components);
        if scale == 0.0 || det.abs() <= Self::DEGENERACY_TOL * (scale * scale) * (scale * scale) {
            return Err(TensorError::DegenerateMetric { det });
        }
        let inverse = linalg::inverse4(&components, det);
        Ok(Self {
            components,
            inverse,
            det,
            sign_factor: if det > 0.0 { 1 } else { -1 },
        })
    }

    pub fn diagonal(diag: [f64; 4]) -> Result<Self, TensorError> {
        let mut c = [[0.0; 4]; 4];
        for (i, d) in diag.into_iter().enumerate() {
            c[i][i] = d;
        }
        Self::new(c)
    }

    /// diag(+1, +1, +1, +1).
    pub fn euclidean() -> Self {
        Self::diagonal([1.0; 4]).expect("identity metric is valid")
    }

    /// diag(−1, +1, +1, +1).
    pub fn minkowski() -> Self {
        Self::diagonal([-1.0, 1.0, 1.0, 1.0]).expect("Minkowski metric is valid")
    }

    #[inline]
    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.components[i][j]
    }

    #[inline]
    pub fn upper(&self, i: usize, j: usize) -> f64 {
        self.inverse[i][j]
    }

    pub fn components(&self) -> &[[f64; 4]; 4] {
        &self.components
    }

    pub fn inverse(&self) -> &[[f64; 4]; 4] {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// `(−1)^s`, computed as `sign(det g)`.
    pub fn sign_factor(&self) -> f64 {
        f64::from(self.sign_factor)
    }
}

/// Covariant 4-vector. Also used for traces and the pseudo-trace.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoVector(pub [f64; 4]);

impl CoVector {
    pub const ZERO: Self = Self([0.0; 4]);

    /// Contravariant components `v^μ = g^{μν} v_ν`.
    pub fn raised(&self, g: &Metric) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| g.upper(mu, nu) * self.0[nu]).sum();
        }
        out
    }

    /// Lowers a contravariant vector.
    pub fn lowered_from(v: [f64; 4], g: &Metric) -> Self {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| g.lower(mu, nu) * v[nu]).sum();
        }
        Self(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Index<usize> for CoVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for CoVector {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
        self
    }
}

impl Sub for CoVector {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            self.0[i] -= rhs.0[i];
        }
        self
    }
}

impl Mul<CoVector> for f64 {
    type Output = CoVector;
    fn mul(self, mut v: CoVector) -> CoVector {
        for x in v.0.iter_mut() {
            *x *= self;
        }
        v
    }
}

/// One of the three free indices of a rank-3 expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Free {
    Alpha,
    Mu,
    Nu,
}

/// An arrangement of the free indices `(α, μ, ν)` over the three slots of a
/// rank-3 tensor, e.g. `NAM` denotes `T_{ναμ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pattern(pub [Free; 3]);

impl Pattern {
    pub const AMN: Self = Self([Free::Alpha, Free::Mu, Free::Nu]);
    pub const NAM: Self = Self([Free::Nu, Free::Alpha, Free::Mu]);
    pub const MNA: Self = Self([Free::Mu, Free::Nu, Free::Alpha]);
    pub const ANM: Self = Self([Free::Alpha, Free::Nu, Free::Mu]);
    pub const NMA: Self = Self([Free::Nu, Free::Mu, Free::Alpha]);
    pub const MAN: Self = Self([Free::Mu, Free::Alpha, Free::Nu]);

    /// The six index orders in the order the permutation coefficients
    /// `a₁ … a₆` multiply them.
    pub const ALL: [Self; 6] = [
        Self::AMN,
        Self::NAM,
        Self::MNA,
        Self::ANM,
        Self::NMA,
        Self::MAN,
    ];

    /// Index triple addressed by this pattern when the free indices take the
    /// values `at = (α, μ, ν)`.
    #[inline]
    pub fn resolve(&self, at: (usize, usize, usize)) -> (usize, usize, usize) {
        let pick = |f: Free| match f {
            Free::Alpha => at.0,
            Free::Mu => at.1,
            Free::Nu => at.2,
        };
        (pick(self.0[0]), pick(self.0[1]), pick(self.0[2]))
    }

    /// Renames the free indices: `α → rename[0]`, `μ → rename[1]`,
    /// `ν → rename[2]`.
    pub fn substitute(&self, rename: Pattern) -> Pattern {
        let map = |f: Free| match f {
            Free::Alpha => rename.0[0],
            Free::Mu => rename.0[1],
            Free::Nu => rename.0[2],
        };
        Pattern([map(self.0[0]), map(self.0[1]), map(self.0[2])])
    }

    /// True for the cyclic orders `αμν`, `ναμ`, `μνα`.
    pub fn is_cyclic(&self) -> bool {
        matches!(*self, Self::AMN | Self::NAM | Self::MNA)
    }

    /// The same order with the last two slots exchanged.
    pub fn swap_last(&self) -> Pattern {
        Pattern([self.0[0], self.0[2], self.0[1]])
    }
}

/// Rank-3 tensor with 64 covariant components.
#[derive(Clone, Copy, PartialEq)]
pub struct Rank3Tensor(pub [f64; RANK3_LEN]);

impl core::fmt::Debug for Rank3Tensor {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_tuple("Rank3Tensor").field(&&self.0[..]).finish()
    }
}

impl Default for Rank3Tensor {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Rank3Tensor {
    pub const ZERO: Self = Self([0.0; RANK3_LEN]);

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::ZERO;
        for (k, x) in out.0.iter_mut().enumerate() {
            let (a, m, n) = triple(k);
            *x = f(a, m, n);
        }
        out
    }

    /// Unit tensor with a single 1 at `(α, μ, ν)`.
    pub fn basis(alpha: usize, mu: usize, nu: usize) -> Self {
        let mut out = Self::ZERO;
        out.0[flat_index(alpha, mu, nu)] = 1.0;
        out
    }

    #[inline(always)]
    pub fn get(&self, alpha: usize, mu: usize, nu: usize) -> f64 {
        self.0[flat_index(alpha, mu, nu)]
    }

    #[inline(always)]
    pub fn set(&mut self, alpha: usize, mu: usize, nu: usize, v: f64) {
        self.0[flat_index(alpha, mu, nu)] = v;
    }

    /// Reads `T_{pattern}` with the free indices set to `at`.
    #[inline]
    pub fn at_pattern(&self, pattern: Pattern, at: (usize, usize, usize)) -> f64 {
        let (i, j, k) = pattern.resolve(at);
        self.get(i, j, k)
    }

    /// The tensor `S_{αμν} = T_{pattern}`, e.g. `permuted(Pattern::NAM)`
    /// gives `S_{αμν} = T_{ναμ}`.
    pub fn permuted(&self, pattern: Pattern) -> Self {
        Self::from_fn(|a, m, n| self.at_pattern(pattern, (a, m, n)))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|x| x * x).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scaled(mut self, t: f64) -> Self {
        for x in self.0.iter_mut() {
            *x *= t;
        }
        self
    }
}

impl Index<(usize, usize, usize)> for Rank3Tensor {
    type Output = f64;
    fn index(&self, (a, m, n): (usize, usize, usize)) -> &f64 {
        &self.0[flat_index(a, m, n)]
    }
}

impl IndexMut<(usize, usize, usize)> for Rank3Tensor {
    fn index_mut(&mut self, (a, m, n): (usize, usize, usize)) -> &mut f64 {
        &mut self.0[flat_index(a, m, n)]
    }
}

impl AddAssign for Rank3Tensor {
    fn add_assign(&mut self, rhs: Self) {
        for (x, y) in self.0.iter_mut().zip(rhs.0) {
            *x += y;
        }
    }
}

impl SubAssign for Rank3Tensor {
    fn sub_assign(&mut self, rhs: Self) {
        for (x, y) in self.0.iter_mut().zip(rhs.0) {
            *x -= y;
        }
    }
}

impl Add for Rank3Tensor {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl Sub for Rank3Tensor {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl Neg for Rank3Tensor {
    type Output = Self;
    fn neg(self) -> Self {
        self.scaled(-1.0)
    }
}

impl Mul<Rank3Tensor> for f64 {
    type Output = Rank3Tensor;
    fn mul(self, t: Rank3Tensor) -> Rank3Tensor {
        t.scaled(self)
    }
}

#[inline(always)]
const fn idx4(a: usize, b: usize, c: usize, d: usize) -> usize {
    64 * a + 16 * b + 4 * c + d
}

fn permutation_sign(p: [usize; 4]) -> f64 {
    if p[0] == p[1] || p[0] == p[2] || p[0] == p[3] || p[1] == p[2] || p[1] == p[3] || p[2] == p[3]
    {
        return 0.0;
    }
    let mut inversions = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Levi-Civita pseudo-tensor of a metric, with orientation
/// `ε_{0123} = +sqrt|det g|`.
///
/// Besides the fully covariant and fully contravariant tables, the two
/// mixed forms used by the solver are precomputed by raising the leading
/// indices of `ε_{αβγδ}` with `g^{-1}`:
/// `ε^{α}{}_{βγδ}` and `ε^{αβ}{}_{γδ}`.
#[derive(Clone)]
pub struct LeviCivita {
    lower: [f64; 256],
    upper: [f64; 256],
    up1: [f64; 256],
    up2: [f64; 256],
    sign_factor: f64,
}

impl core::fmt::Debug for LeviCivita {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LeviCivita")
            .field("eps_0123", &self.lower[idx4(0, 1, 2, 3)])
            .field("sign_factor", &self.sign_factor)
            .finish_non_exhaustive()
    }
}

impl LeviCivita {
    pub fn new(g: &Metric) -> Self {
        let vol = libm::sqrt(g.det().abs());
        let sf = g.sign_factor();
        let mut lower = [0.0; 256];
        let mut upper = [0.0; 256];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let s = permutation_sign([a, b, c, d]);
                        lower[idx4(a, b, c, d)] = vol * s;
                        upper[idx4(a, b, c, d)] = sf / vol * s;
                    }
                }
            }
        }
        let mut up1 = [0.0; 256];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        up1[idx4(a, b, c, d)] = (0..4)
                            .map(|r| g.upper(a, r) * lower[idx4(r, b, c, d)])
                            .sum();
                    }
                }
            }
        }
        let mut up2 = [0.0; 256];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        up2[idx4(a, b, c, d)] =
                            (0..4).map(|r| g.upper(b, r) * up1[idx4(a, r, c, d)]).sum();
                    }
                }
            }
        }
        Self {
            lower,
            upper,
            up1,
            up2,
            sign_factor: sf,
        }
    }

    /// `ε_{abcd}`.
    #[inline(always)]
    pub fn lower(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.lower[idx4(a, b, c, d)]
    }

    /// `ε^{abcd}`.
    #[inline(always)]
    pub fn upper(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.upper[idx4(a, b, c, d)]
    }

    /// `ε^{a}{}_{bcd}`.
    #[inline(always)]
    pub fn up1(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.up1[idx4(a, b, c, d)]
    }

    /// `ε^{ab}{}_{cd}`.
    #[inline(always)]
    pub fn up2(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.up2[idx4(a, b, c, d)]
    }

    pub fn sign_factor(&self) -> f64 {
        self.sign_factor
    }
}

/// Which of the three inequivalent traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// `N^{(1)}_μ = N_{αβμ} g^{αβ}`
    First,
    /// `N^{(2)}_μ = N_{αμβ} g^{αβ}`
    Second,
    /// `N^{(3)}_μ = N_{μαβ} g^{αβ}`
    Third,
}

impl TraceKind {
    pub const ALL: [Self; 3] = [Self::First, Self::Second, Self::Third];
}

impl TryFrom<u8> for TraceKind {
    type Error = TensorError;
    fn try_from(which: u8) -> Result<Self, TensorError> {
        match which {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            3 => Ok(Self::Third),
            other => Err(TensorError::InvalidSelector(other)),
        }
    }
}

/// Contraction of two slots of `n` with the inverse metric.
pub fn trace(n: &Rank3Tensor, which: TraceKind, g: &Metric) -> CoVector {
    let mut out = [0.0; 4];
    for (mu, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let comp = match which {
                    TraceKind::First => n.get(a, b, mu),
                    TraceKind::Second => n.get(a, mu, b),
                    TraceKind::Third => n.get(mu, a, b),
                };
                acc += g.upper(a, b) * comp;
            }
        }
        *o = acc;
    }
    CoVector(out)
}

/// All three traces in order.
pub fn traces(n: &Rank3Tensor, g: &Metric) -> [CoVector; 3] {
    TraceKind::ALL.map(|k| trace(n, k, g))
}

/// Pseudo-trace `M^α = ε^{αμνλ} N_{μνλ}`, returned lowered as `M_α`.
pub fn pseudo_trace(n: &Rank3Tensor, eps: &LeviCivita, g: &Metric) -> CoVector {
    let mut up = [0.0; 4];
    for (a, u) in up.iter_mut().enumerate() {
        let mut acc = 0.0;
        for m in 0..4 {
            for nu in 0..4 {
                for l in 0..4 {
                    acc += eps.upper(a, m, nu, l) * n.get(m, nu, l);
                }
            }
        }
        *u = acc;
    }
    CoVector::lowered_from(up, g)
}

/// Which of the three parity-odd duals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    /// `M^{(1)}_{λαβ} = N_{μνλ} ε^{μν}{}_{αβ}`
    First,
    /// `M^{(2)}_{ναβ} = N_{μνλ} ε^{μλ}{}_{αβ}`
    Second,
    /// `M^{(3)}_{μαβ} = N_{μνλ} ε^{νλ}{}_{αβ}`
    Third,
}

impl DualKind {
    pub const ALL: [Self; 3] = [Self::First, Self::Second, Self::Third];
}

impl TryFrom<u8> for DualKind {
    type Error = TensorError;
    fn try_from(which: u8) -> Result<Self, TensorError> {
        match which {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            3 => Ok(Self::Third),
            other => Err(TensorError::InvalidSelector(other)),
        }
    }
}

/// Dualizes a pair of slots of `n` with `ε^{..}{}_{αβ}`. The result is
/// antisymmetric in its last two indices.
pub fn dual(n: &Rank3Tensor, which: DualKind, eps: &LeviCivita) -> Rank3Tensor {
    let mut out = Rank3Tensor::ZERO;
    for free in 0..4 {
        for a in 0..4 {
            for b in (a + 1)..4 {
                let mut acc = 0.0;
                for x in 0..4 {
                    for y in 0..4 {
                        let e = eps.up2(x, y, a, b);
                        if e == 0.0 {
                            continue;
                        }
                        let comp = match which {
                            DualKind::First => n.get(x, y, free),
                            DualKind::Second => n.get(x, free, y),
                            DualKind::Third => n.get(free, x, y),
                        };
                        acc += comp * e;
                    }
                }
                out.set(free, a, b, acc);
                out.set(free, b, a, -acc);
            }
        }
    }
    out
}

/// All three duals in order.
pub fn duals(n: &Rank3Tensor, eps: &LeviCivita) -> [Rank3Tensor; 3] {
    DualKind::ALL.map(|k| dual(n, k, eps))
}

/// A pair of slots of a rank-3 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotPair {
    FirstSecond,
    FirstThird,
    SecondThird,
}

impl TryFrom<(u8, u8)> for SlotPair {
    type Error = TensorError;
    fn try_from(pair: (u8, u8)) -> Result<Self, TensorError> {
        match pair {
            (1, 2) | (2, 1) => Ok(Self::FirstSecond),
            (1, 3) | (3, 1) => Ok(Self::FirstThird),
            (2, 3) | (3, 2) => Ok(Self::SecondThird),
            (a, b) => Err(TensorError::InvalidSlotPair(a, b)),
        }
    }
}

/// Weight-1/2 antisymmetrization over a slot pair, e.g. for
/// [`SlotPair::FirstSecond`]: `(T_{βγν} − T_{γβν}) / 2`.
pub fn antisymmetrize_pair(t: &Rank3Tensor, pair: SlotPair) -> Rank3Tensor {
    Rank3Tensor::from_fn(|a, b, c| {
        let swapped = match pair {
            SlotPair::FirstSecond => t.get(b, a, c),
            SlotPair::FirstThird => t.get(c, b, a),
            SlotPair::SecondThird => t.get(a, c, b),
        };
        0.5 * (t.get(a, b, c) - swapped)
    })
}

/// Placement of the vector in a vector-times-metric wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgePattern {
    /// `v_{[α} g_{μ]ν}`
    AlphaMuNu,
    /// `v_{[α} g_{ν]μ}`
    AlphaNuMu,
    /// `v_{[μ} g_{ν]α}`
    MuNuAlpha,
}

/// `v_{[x} g_{y]z}` with weight 1/2, arranged according to `pattern`.
pub fn vector_wedge_metric(v: &CoVector, g: &Metric, pattern: WedgePattern) -> Rank3Tensor {
    Rank3Tensor::from_fn(|a, m, n| {
        let (x, y, z) = match pattern {
            WedgePattern::AlphaMuNu => (a, m, n),
            WedgePattern::AlphaNuMu => (a, n, m),
            WedgePattern::MuNuAlpha => (m, n, a),
        };
        0.5 * (v[x] * g.lower(y, z) - v[y] * g.lower(x, z))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layout_round_trips() {
        for k in 0..RANK3_LEN {
            let (a, m, n) = triple(k);
            assert_eq!(flat_index(a, m, n), k);
        }
        assert_eq!(flat_index(1, 2, 3), 16 + 8 + 3);
    }

    #[test]
    fn metric_rejects_bad_input() {
        assert!(matches!(
            Metric::diagonal([1.0, 1.0, 0.0, 1.0]),
            Err(TensorError::DegenerateMetric { .. })
        ));
        let mut c = [[0.0; 4]; 4];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        c[0][1] = 0.5;
        assert!(matches!(
            Metric::new(c),
            Err(TensorError::AsymmetricMetric { row: 0, col: 1 })
        ));
        c[0][1] = f64::NAN;
        assert!(matches!(Metric::new(c), Err(TensorError::NonFiniteMetric)));
    }

    #[test]
    fn metric_inverse_and_sign() {
        let g = Metric::new([
            [-2.0, 0.3, 0.0, 0.1],
            [0.3, 1.5, 0.2, 0.0],
            [0.0, 0.2, 1.0, -0.4],
            [0.1, 0.0, -0.4, 3.0],
        ])
        .unwrap();
        assert_eq!(g.sign_factor(), -1.0);
        for i in 0..4 {
            for j in 0..4 {
                let p: f64 = (0..4).map(|k| g.lower(i, k) * g.upper(k, j)).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((p - id).abs() < 1e-12);
            }
        }
        assert_eq!(Metric::euclidean().sign_factor(), 1.0);
        assert_eq!(Metric::minkowski().sign_factor(), -1.0);
        assert_eq!(
            Metric::diagonal([-1.0, -1.0, 1.0, 1.0])
                .unwrap()
                .sign_factor(),
            1.0
        );
    }

    #[test]
    fn epsilon_orientation_and_antisymmetry() {
        let g = Metric::diagonal([-4.0, 1.0, 1.0, 1.0]).unwrap();
        let eps = LeviCivita::new(&g);
        assert_eq!(eps.lower(0, 1, 2, 3), 2.0);
        assert_eq!(eps.lower(1, 0, 2, 3), -2.0);
        assert_eq!(eps.lower(0, 0, 2, 3), 0.0);
        assert_eq!(eps.upper(0, 1, 2, 3), -0.5);
    }

    #[test]
    fn selectors_reject_out_of_range() {
        assert!(TraceKind::try_from(0).is_err());
        assert!(TraceKind::try_from(4).is_err());
        assert_eq!(TraceKind::try_from(2).unwrap(), TraceKind::Second);
        assert!(DualKind::try_from(7).is_err());
        assert!(SlotPair::try_from((1, 1)).is_err());
        assert_eq!(SlotPair::try_from((3, 2)).unwrap(), SlotPair::SecondThird);
    }

    #[test]
    fn kronecker_trace() {
        let g = Metric::euclidean();
        let v = [1.0, 0.0, 0.0, 0.0];
        let n = Rank3Tensor::from_fn(|a, m, nu| if a == m { v[nu] } else { 0.0 });
        assert_eq!(trace(&n, TraceKind::First, &g).0, [4.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            trace(&Rank3Tensor::ZERO, TraceKind::Third, &g),
            CoVector::ZERO
        );
    }

    #[test]
    fn pseudo_trace_single_entry() {
        let g = Metric::euclidean();
        let eps = LeviCivita::new(&g);
        let n = Rank3Tensor::basis(1, 2, 3);
        assert_eq!(pseudo_trace(&n, &eps, &g).0, [1.0, 0.0, 0.0, 0.0]);
        // lowering with Minkowski flips the time component
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        assert_eq!(pseudo_trace(&n, &eps, &g).0, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pseudo_trace_of_symmetric_tensor_vanishes() {
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let u = [0.3, -1.2, 0.7, 2.0];
        let n = Rank3Tensor::from_fn(|a, m, nu| u[a] * u[m] * u[nu]);
        assert!(pseudo_trace(&n, &eps, &g).max_abs() < 1e-14);
    }

    #[test]
    fn antisymmetrize_single_entry() {
        let t = Rank3Tensor::basis(0, 1, 2);
        let r = antisymmetrize_pair(&t, SlotPair::FirstSecond);
        assert_eq!(r.get(0, 1, 2), 0.5);
        assert_eq!(r.get(1, 0, 2), -0.5);
        assert_eq!(r.0.iter().filter(|x| **x != 0.0).count(), 2);
        let again = antisymmetrize_pair(&r, SlotPair::FirstSecond);
        assert_eq!(again, r);
    }

    #[test]
    fn wedge_example() {
        let g = Metric::euclidean();
        let v = CoVector([1.0, 0.0, 0.0, 0.0]);
        let w = vector_wedge_metric(&v, &g, WedgePattern::AlphaMuNu);
        assert_eq!(w.get(0, 1, 1), 0.5);
        assert_eq!(w.get(1, 0, 1), -0.5);
        assert_eq!(
            vector_wedge_metric(&CoVector::ZERO, &g, WedgePattern::MuNuAlpha),
            Rank3Tensor::ZERO
        );
    }

    #[test]
    fn pattern_substitution() {
        // cycling α → μ → ν → α takes αμν to μνα
        assert_eq!(Pattern::AMN.substitute(Pattern::MNA), Pattern::MNA);
        assert_eq!(Pattern::NAM.substitute(Pattern::MNA), Pattern::AMN);
        assert_eq!(Pattern::MAN.swap_last(), Pattern::MNA);
        let t = Rank3Tensor::from_fn(|a, m, n| (100 * a + 10 * m + n) as f64);
        assert_eq!(t.permuted(Pattern::NAM).get(1, 2, 3), t.get(3, 1, 2));
    }
}
